"""Balmer-like odd/even doublets and their small-cutoff closed form.

For small m a the excited levels pair up into doublets with

    E_n / m ~ [1 + (alpha / (n + eps - delta))^2]^(-1/2)

where the small corrections are

    eps_odd  ~ 2 alpha m a
    eps_even ~ 2 / [alpha / (m a) + 2 log(n / (2 alpha m a))]

Node-count convention for the numerical partners (validated against the
finite-difference oracle): the odd member of doublet n has n - 1 nodes on
x > 0, the even member has n nodes, the nodeless even slot belonging to the
anomalous state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from kg1d.eigensolver import SearchWindow, solve_energy
from kg1d.errors import DomainError
from kg1d.integrator import DEFAULT_POLICY, MeshPolicy
from kg1d.params import ModelParams
from kg1d.potentials import PotentialSpec


def epsilon_odd(params: ModelParams, a: float) -> float:
    if not a > 0.0:
        raise DomainError(f"cutoff a must be positive, got {a!r}")
    return 2.0 * params.alpha * params.m * a


def epsilon_even(params: ModelParams, a: float, n: int) -> float:
    if not a > 0.0:
        raise DomainError(f"cutoff a must be positive, got {a!r}")
    if n < 1:
        raise DomainError(f"principal index n must be >= 1, got {n}")
    ma = params.m * a
    arg = n / (2.0 * params.alpha * ma)
    if arg <= 1.0:
        raise DomainError(f"m a = {ma:g} too large for the small-cutoff formula (n = {n})")
    den = params.alpha / ma + 2.0 * math.log(arg)
    return 2.0 / den


def node_target(n: int, parity: str) -> int:
    if n < 1:
        raise DomainError(f"principal index n must be >= 1, got {n}")
    if parity == "odd":
        return n - 1
    if parity == "even":
        return n
    raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")


def balmer_energy(params: ModelParams, a: float, n: int, parity: str,
                  eps: float | None = None) -> float:
    """Closed-form doublet energy; ``eps`` overrides the parity correction."""
    if n < 1:
        raise DomainError(f"principal index n must be >= 1, got {n}")
    if eps is None:
        if parity == "odd":
            eps = epsilon_odd(params, a)
        elif parity == "even":
            eps = epsilon_even(params, a, n)
        else:
            raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")
    nu = n + eps - params.delta
    return params.m / math.sqrt(1.0 + (params.alpha / nu) ** 2)


def balmer_window(params: ModelParams) -> SearchWindow:
    m = params.m
    return SearchWindow(m * (1.0 - params.alpha**2), m)


def doublet_numeric(params: ModelParams, spec: PotentialSpec, n: int,
                    policy: MeshPolicy = DEFAULT_POLICY) -> tuple[float, float]:
    """Shooting energies ``(E_odd, E_even)`` of doublet n."""
    window = balmer_window(params)
    E_odd = solve_energy(params, spec, "odd", node_target(n, "odd"), window, policy).E
    E_even = solve_energy(params, spec, "even", node_target(n, "even"), window, policy).E
    return E_odd, E_even


@dataclass(frozen=True)
class DoubletRecord:
    n: int
    a: float
    E_formula_odd: float
    E_formula_even: float
    E_numeric_odd: float
    E_numeric_even: float
    epsilon_odd: float
    epsilon_even: float
    m: float = 1.0

    def __post_init__(self):
        for name in ("E_formula_odd", "E_formula_even", "E_numeric_odd", "E_numeric_even"):
            E = getattr(self, name)
            if not E > 0.0:
                raise DomainError(f"{name} must be positive, got {E!r}")

    def binding_deviation(self, parity: str) -> float:
        """Relative deviation of numerical from formula binding energy m - E."""
        m = self.m
        num = getattr(self, f"E_numeric_{parity}")
        form = getattr(self, f"E_formula_{parity}")
        return ((m - num) - (m - form)) / (m - form)


def doublet_record(params: ModelParams, family: str, a: float, n: int,
                   policy: MeshPolicy = DEFAULT_POLICY) -> DoubletRecord:
    spec = PotentialSpec(family, a, params.alpha)
    E_odd, E_even = doublet_numeric(params, spec, n, policy)
    rec = DoubletRecord(
        n=n, a=a,
        E_formula_odd=balmer_energy(params, a, n, "odd"),
        E_formula_even=balmer_energy(params, a, n, "even"),
        E_numeric_odd=E_odd, E_numeric_even=E_even,
        epsilon_odd=epsilon_odd(params, a),
        epsilon_even=epsilon_even(params, a, n),
        m=params.m,
    )
    m = params.m
    for E in (rec.E_formula_odd, rec.E_formula_even, E_odd, E_even):
        if not E < m:
            raise DomainError(f"doublet energy {E!r} is not bound (m = {m!r})")
    return rec


def doublet_table(params: ModelParams, family: str, ma_values, n_max: int,
                  policy: MeshPolicy = DEFAULT_POLICY) -> list[DoubletRecord]:
    return [doublet_record(params, family, ma / params.m, n, policy)
            for ma in ma_values for n in range(1, n_max + 1)]
