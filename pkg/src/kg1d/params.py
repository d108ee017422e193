"""Physical constants and the (a, E) <-> (s, beta) scaling maps.

Units are natural (hbar = c = 1).  The scaled coordinates are

    s    = m a / delta
    beta = alpha E / (delta sqrt(m^2 - E^2))

with delta = 1/2 - sqrt(1/4 - alpha^2).  Both maps are strictly increasing,
so (s, beta) is a faithful image of (a, E).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from kg1d.errors import DomainError

DEFAULT_ALPHA = float(Fraction(1, 137))
DEFAULT_MASS = 1.0

# |E| closer to m than this (relative) is treated as threshold, not bound.
THRESHOLD_GUARD = 1e-14

PARITIES = ("even", "odd")
BRANCHES = ("upper", "lower", "unassigned")


def delta_of(alpha: float) -> float:
    return 0.5 - math.sqrt(0.25 - alpha * alpha)


@dataclass(frozen=True)
class ModelParams:
    alpha: float = DEFAULT_ALPHA
    m: float = DEFAULT_MASS
    delta: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.alpha <= 0.5):
            raise DomainError(f"alpha must lie in (0, 1/2], got {self.alpha!r}")
        if not (self.m > 0.0 and math.isfinite(self.m)):
            raise DomainError(f"mass must be positive, got {self.m!r}")
        object.__setattr__(self, "delta", delta_of(self.alpha))


def make_model(alpha: float = DEFAULT_ALPHA, m: float = DEFAULT_MASS) -> ModelParams:
    return ModelParams(alpha=alpha, m=m)


def s_from_a(a: float, params: ModelParams) -> float:
    if not a > 0.0:
        raise DomainError(f"cutoff a must be positive, got {a!r}")
    return params.m * a / params.delta


def a_from_s(s: float, params: ModelParams) -> float:
    if not s > 0.0:
        raise DomainError(f"s must be positive, got {s!r}")
    return s * params.delta / params.m


def _check_bound_energy(E: float, params: ModelParams) -> None:
    if not math.isfinite(E) or params.m - abs(E) < THRESHOLD_GUARD * params.m:
        raise DomainError(
            f"|E| must be below m (bound state); got E={E!r}, m={params.m!r}")


def beta_from_E(E: float, params: ModelParams) -> float:
    _check_bound_energy(E, params)
    m = params.m
    # (m - E)(m + E) avoids cancellation in m^2 - E^2 near threshold
    return params.alpha * E / (params.delta * math.sqrt((m - E) * (m + E)))


def E_from_beta(beta: float, params: ModelParams) -> float:
    """Invert ``beta_from_E``: E = m b / sqrt(1 + b^2) with b = beta delta / alpha."""
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta!r}")
    b = beta * params.delta / params.alpha
    return params.m * b / math.hypot(1.0, b)


@dataclass(frozen=True)
class SpectralPoint:
    """A converged eigen-solution in both physical and scaled coordinates.

    ``beta`` is ``-inf`` only for the threshold point E = -m, which the
    cutoff search admits when locating the supercritical limit.
    """

    a: float
    E: float
    s: float
    beta: float
    parity: str
    nodes: int
    branch: str = "unassigned"

    @classmethod
    def from_physical(cls, a: float, E: float, params: ModelParams, parity: str,
                      nodes: int, branch: str = "unassigned") -> "SpectralPoint":
        if parity not in PARITIES:
            raise DomainError(f"parity must be one of {PARITIES}, got {parity!r}")
        if branch not in BRANCHES:
            raise DomainError(f"branch must be one of {BRANCHES}, got {branch!r}")
        if nodes < 0:
            raise DomainError(f"node count must be non-negative, got {nodes}")
        s = s_from_a(a, params)
        if E == -params.m:
            beta = -math.inf
        else:
            beta = beta_from_E(E, params)
        return cls(a=a, E=E, s=s, beta=beta, parity=parity, nodes=nodes, branch=branch)

    def with_branch(self, branch: str) -> "SpectralPoint":
        if branch not in BRANCHES:
            raise DomainError(f"branch must be one of {BRANCHES}, got {branch!r}")
        return SpectralPoint(self.a, self.E, self.s, self.beta, self.parity, self.nodes, branch)
