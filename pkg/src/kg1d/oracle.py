"""Finite-difference cross-check of the shooting solver.

Writing the wave equation as

    (-D^2 + m^2 - V^2) psi + 2 E V psi = E^2 psi

and discretising gives a quadratic eigenproblem (A + E B - E^2 I) psi = 0
with A = -D^2 + m^2 - V^2 and B = diag(2V).  Its companion linearisation

    [0  I] [psi  ]       [psi  ]
    [A  B] [E psi]  =  E [E psi]

is solved densely; real eigenvalues inside (-m, m) are bound states.

The grid is uniform in a stretched coordinate xi with x = b sinh(xi), b of
the order of the cutoff.  Steps are then ~b dxi near the core and grow
proportionally to x further out, so the core and the slowly decaying tail are
both resolved with a few thousand points.  For potentials with a kink (v2)
the step is chosen so that x = a is a grid point.  Boundary conditions:
even parity reflects psi across x = 0 (ghost point psi_{-1} = psi_1), odd
parity imposes psi(0) = 0; psi vanishes at the outer end.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla

from kg1d.errors import DomainError, SolverError
from kg1d.params import PARITIES, ModelParams
from kg1d.potentials import PotentialSpec

# |Im E| below this (times m) counts as a real eigenvalue
_REAL_TOL = 1e-9
# eigenvector entries below this fraction of the peak are ignored for nodes
_NODE_FLOOR = 1e-8


@dataclass(frozen=True)
class OracleConfig:
    x_max: float = 200.0
    n_grid: int = 2000
    parity: str = "even"
    # scale b of the sinh stretch; defaults to the cutoff a
    stretch: float | None = None

    def __post_init__(self):
        if self.n_grid < 50:
            raise DomainError(f"n_grid must be >= 50, got {self.n_grid}")
        if not self.x_max > 0.0:
            raise DomainError(f"x_max must be positive, got {self.x_max!r}")
        if self.parity not in PARITIES:
            raise DomainError(f"parity must be one of {PARITIES}, got {self.parity!r}")
        if self.stretch is not None and not self.stretch > 0.0:
            raise DomainError("stretch must be positive")


@dataclass(frozen=True)
class OracleEigen:
    E: float
    nodes: int
    parity: str


@dataclass
class OracleSpectrum:
    eigen: list[OracleEigen]
    d_xi: float
    x_max: float
    # eigenvalues with |Re E| < m but a non-negligible imaginary part
    complex_in_window: list[complex] = field(default_factory=list)
    # states whose decay length 1/kappa exceeds x_max / 10
    truncated: list[float] = field(default_factory=list)

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.E for e in self.eigen])


@dataclass(frozen=True)
class Grid:
    x: np.ndarray
    d_xi: float
    x_max: float
    # tridiagonal of -D^2: sub, diag, super
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray


def build_grid(spec: PotentialSpec, config: OracleConfig) -> Grid:
    b = config.stretch if config.stretch is not None else spec.a
    n = config.n_grid
    even = config.parity == "even"
    # even: nodes j = 0..n-1, Dirichlet at j = n; odd: j = 1..n, Dirichlet at 0 and n+1
    n_cells = n if even else n + 1
    xi_max = math.asinh(config.x_max / b)
    d_xi = xi_max / n_cells
    kink = spec.kink
    if kink is not None and kink < config.x_max:
        xi_k = math.asinh(kink / b)
        k = math.ceil(n_cells * xi_k / xi_max)
        d_xi = xi_k / k
    j = np.arange(n) if even else np.arange(1, n + 1)
    xi = j * d_xi
    x = b * np.sinh(xi)
    jac = b * np.cosh(xi)
    jac_p = b * np.cosh(xi + 0.5 * d_xi)
    jac_m = b * np.cosh(xi - 0.5 * d_xi)
    h2 = d_xi * d_xi
    diag = (1.0 / jac_p + 1.0 / jac_m) / (jac * h2)
    upper = -1.0 / (jac_p * jac * h2)
    lower = -1.0 / (jac_m * jac * h2)
    if even:
        # ghost point psi_{-1} = psi_1 folds the lower neighbour onto the upper
        upper = upper.copy()
        upper[0] += lower[0]
    return Grid(x=x, d_xi=d_xi, x_max=b * math.sinh(n_cells * d_xi),
                lower=lower[1:], diag=diag, upper=upper[:-1])


def pencil(params: ModelParams, spec: PotentialSpec, grid: Grid):
    """Dense A and the diagonal of B for (A + E B - E^2 I) psi = 0."""
    v = spec.values(grid.x)
    A = (np.diag(grid.diag + params.m**2 - v * v)
         + np.diag(grid.upper, 1) + np.diag(grid.lower, -1))
    return A, 2.0 * v


def _null_vector(params: ModelParams, spec: PotentialSpec, grid: Grid, E: float) -> np.ndarray:
    # inverse iteration on the tridiagonal T(E); T(E) psi is the first block
    # row of the companion problem, so psi is the eigenvector's first block
    v = spec.values(grid.x)
    d = grid.diag + params.m**2 - v * v + 2.0 * E * v - E * E
    n = len(d)
    ab = np.zeros((3, n))
    ab[0, 1:] = grid.upper
    ab[1] = d
    ab[2, :-1] = grid.lower
    psi = np.ones(n)
    shift = 1e-14 * max(1.0, float(np.max(np.abs(d))))
    for _ in range(3):
        try:
            psi = sla.solve_banded((1, 1), ab, psi, check_finite=False)
        except np.linalg.LinAlgError:
            ab[1] = d + shift
            shift *= 10.0
            psi = sla.solve_banded((1, 1), ab, np.ones(n), check_finite=False)
        psi /= np.max(np.abs(psi))
    return psi


def count_nodes(psi: np.ndarray) -> int:
    """Sign changes of a sampled function, ignoring round-off sized entries."""
    psi = np.asarray(psi, dtype=float)
    big = psi[np.abs(psi) > _NODE_FLOOR * np.max(np.abs(psi))]
    return int(np.count_nonzero(np.diff(np.sign(big)) != 0))


def oracle_spectrum(params: ModelParams, spec: PotentialSpec,
                    config: OracleConfig = OracleConfig()) -> OracleSpectrum:
    m = params.m
    grid = build_grid(spec, config)
    A, bdiag = pencil(params, spec, grid)
    n = len(bdiag)
    M = np.zeros((2 * n, 2 * n))
    M[:n, n:] = np.eye(n)
    M[n:, :n] = A
    M[n:, n:] = np.diag(bdiag)
    try:
        w = sla.eigvals(M, overwrite_a=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"dense eigenvalue solve failed: {exc}") from exc

    in_window = np.abs(w.real) < m
    is_real = np.abs(w.imag) <= _REAL_TOL * m
    energies = np.sort(w[in_window & is_real].real)
    spurious = [complex(z) for z in w[in_window & ~is_real]]
    if spurious:
        warnings.warn(f"{len(spurious)} complex eigenvalues inside (-m, m); "
                      "likely a discretisation artefact", RuntimeWarning, stacklevel=2)

    eigen = []
    truncated = []
    for E in energies:
        psi = _null_vector(params, spec, grid, float(E))
        eigen.append(OracleEigen(E=float(E), nodes=count_nodes(psi), parity=config.parity))
        kappa = math.sqrt(max(m * m - E * E, 0.0))
        if kappa * grid.x_max < 10.0:
            truncated.append(float(E))
    return OracleSpectrum(eigen=eigen, d_xi=grid.d_xi, x_max=grid.x_max,
                          complex_in_window=spurious, truncated=truncated)


@dataclass(frozen=True)
class OracleEstimate:
    E: float  # Richardson-extrapolated
    error: float  # |E - E_fine|
    nodes: int
    parity: str
    E_fine: float
    E_coarse: float


def richardson(params: ModelParams, spec: PotentialSpec,
               config: OracleConfig = OracleConfig()) -> list[OracleEstimate]:
    """Extrapolate eigenvalues from grids with n_grid/2 and n_grid points.

    The scheme is second order in d_xi, so E(h) = E + c h^2 + ...; states are
    paired across grids by node count.  The error estimate is the size of
    the extrapolation step.
    """
    coarse = oracle_spectrum(params, spec, replace(config, n_grid=config.n_grid // 2))
    fine = oracle_spectrum(params, spec, config)
    r = coarse.d_xi / fine.d_xi
    by_nodes: dict[int, list[float]] = {}
    for e in coarse.eigen:
        by_nodes.setdefault(e.nodes, []).append(e.E)
    out = []
    seen: dict[int, int] = {}
    for e in fine.eigen:
        k = seen.get(e.nodes, 0)
        seen[e.nodes] = k + 1
        partners = by_nodes.get(e.nodes, [])
        if k >= len(partners):
            continue
        Ec = partners[k]
        Er = e.E + (e.E - Ec) / (r * r - 1.0)
        out.append(OracleEstimate(E=Er, error=abs(Er - e.E), nodes=e.nodes,
                                  parity=e.parity, E_fine=e.E, E_coarse=Ec))
    return out


def lowest(estimates: list[OracleEstimate]) -> OracleEstimate:
    if not estimates:
        raise SolverError("oracle found no bound state in (-m, m)")
    return min(estimates, key=lambda e: e.E)
