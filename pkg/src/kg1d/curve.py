"""Tracing the two-branch beta(s) curve of the anomalous even ground state.

The cutoff a is a single-valued function of E along the whole curve, so the
primary representation fixes E on a grid and solves for a.  The curve then
looks like a U in the (E, a) plane: a falls as E decreases from m, reaches
its minimum a_min at the fold (E_at_min < 0), and rises again toward a_inf as
E approaches -m.  The part above the fold is the upper branch, the rest the
lower branch.

Special points:
    s0     beta = 0 (E = 0 exactly)
    s_min  fold, the smallest s with an anomalous bound state
    s_inf  supercritical limit E -> -m
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from kg1d.errors import BracketError, DomainError, SolverError
from kg1d.eigensolver import (
    A_TOL_REL, E_TOL_REL, Regime, SearchWindow, solve_cutoff, solve_energy,
)
from kg1d.integrator import DEFAULT_POLICY, MeshPolicy
from kg1d.params import E_from_beta, ModelParams, SpectralPoint
from kg1d.potentials import PotentialSpec

log = logging.getLogger(__name__)

GOLDEN_E_TOL = 1e-6  # absolute, in units of m
S_INF_AGREEMENT = 1e-2
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SpecialPoints:
    s0: float
    s_min: float
    E_at_min: float
    s_inf: float
    a0: float
    a_min: float
    a_inf: float
    # cross-check of s_inf by extrapolation toward E = -m
    s_inf_extrapolated: float = math.nan
    s_inf_disagreement: bool = False

    def __post_init__(self):
        vals = (self.s0, self.s_min, self.s_inf, self.a0, self.a_min, self.a_inf)
        if not all(v > 0.0 for v in vals):
            raise SolverError(f"special points must be positive: {vals}")
        if not (self.s_min < self.s0 < self.s_inf):
            raise SolverError(
                f"special points out of order: s_min={self.s_min}, s0={self.s0}, s_inf={self.s_inf}")


@dataclass
class BranchCurve:
    family: str
    points: list[SpectralPoint]
    special: SpecialPoints | None = None
    # grid values (E or a) for which no eigen-solution exists
    missing: list[float] = field(default_factory=list)

    def arrays(self) -> dict[str, np.ndarray]:
        return {k: np.array([getattr(p, k) for p in self.points]) for k in ("a", "E", "s", "beta")}

    def by_branch(self, branch: str) -> list[SpectralPoint]:
        return [p for p in self.points if p.branch == branch]


def worker_count() -> int:
    try:
        n = int(os.environ.get("KG1D_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _fan_out(fn, items, workers: int | None = None) -> list:
    """Map ``fn`` over ``items``; results come back in input order."""
    workers = worker_count() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _cutoff_task(E, params, family, policy):
    try:
        return solve_cutoff(params, family, E, "even", 0, policy=policy)
    except BracketError as exc:
        exc.context.setdefault("E", E)
        raise


def default_energy_grid(params: ModelParams, n: int = 400, beta_max: float = 1e3,
                        beta_min: float | None = None) -> list[float]:
    """Energies uniform in beta over [beta_min, beta_max], sorted descending."""
    beta_min = -beta_max if beta_min is None else beta_min
    betas = np.linspace(beta_max, beta_min, n)
    return [E_from_beta(float(b), params) for b in betas]


def assign_branches(points: list[SpectralPoint], E_at_min: float | None = None) -> list[SpectralPoint]:
    """Tag each point upper/lower relative to the fold energy.

    Without an explicit fold energy the grid minimum of a is used, provided
    it is interior; otherwise the points stay unassigned.
    """
    if not points:
        return []
    if E_at_min is None:
        a = [p.a for p in points]
        i = int(np.argmin(a))
        if i == 0 or i == len(points) - 1:
            return [p.with_branch("unassigned") for p in points]
        E_at_min = points[i].E
    return [p.with_branch("upper" if p.E >= E_at_min else "lower") for p in points]


def trace_by_energy(params: ModelParams, family: str, E_grid, policy: MeshPolicy = DEFAULT_POLICY,
                    special: SpecialPoints | None = None, workers: int | None = None) -> BranchCurve:
    """One cutoff search per grid energy (grid sorted descending, inside (-m, m))."""
    E_grid = [float(E) for E in E_grid]
    if any(not (-params.m < E < params.m) for E in E_grid):
        raise DomainError("E_grid must lie strictly inside (-m, m)")
    if any(e1 <= e2 for e1, e2 in zip(E_grid, E_grid[1:])):
        raise DomainError("E_grid must be sorted in strictly descending order")
    task = partial(_cutoff_task, params=params, family=family, policy=policy)
    points = _fan_out(task, E_grid, workers)
    points = assign_branches(points, None if special is None else special.E_at_min)
    return BranchCurve(family=family, points=points, special=special)


def _energy_task(a, params, family, branch, e_split, policy):
    spec = PotentialSpec(family, a, params.alpha)
    m = params.m
    if branch == "upper":
        window, regime = SearchWindow(e_split, m), Regime.E_POSITIVE
    else:
        window, regime = SearchWindow(-m, e_split), Regime.E_NEGATIVE
    try:
        return solve_energy(params, spec, "even", 0, window, policy, regime=regime).with_branch(branch)
    except BracketError:
        return None


def trace_by_cutoff(params: ModelParams, family: str, a_grid, branch: str,
                    policy: MeshPolicy = DEFAULT_POLICY, e_split: float = 0.0,
                    workers: int | None = None) -> BranchCurve:
    """One energy search per cutoff, on a single branch.

    The upper branch is searched in (e_split, m) with the positive-energy node
    rule, the lower branch in (-m, e_split) with the negative-energy rule.
    The default split E = 0 suits the large-scale curve; near the fold pass
    the fold energy instead.  Cutoffs with no eigenvalue on the branch are
    listed in ``missing``.
    """
    if branch not in ("upper", "lower"):
        raise DomainError(f"branch must be 'upper' or 'lower', got {branch!r}")
    a_grid = [float(a) for a in a_grid]
    task = partial(_energy_task, params=params, family=family, branch=branch,
                   e_split=e_split, policy=policy)
    results = _fan_out(task, a_grid, workers)
    points = [p for p in results if p is not None]
    missing = [a for a, p in zip(a_grid, results) if p is None]
    points.sort(key=lambda p: -p.E)
    return BranchCurve(family=family, points=points, missing=missing)


def find_s0(params: ModelParams, family: str, policy: MeshPolicy = DEFAULT_POLICY) -> SpectralPoint:
    return solve_cutoff(params, family, 0.0, "even", 0, policy=policy)


def _golden_min(f, lo: float, mid: float, hi: float, tol: float):
    """Golden-section search on a bracket with f(mid) < f(lo), f(hi).

    Returns every evaluated (x, f(x)) pair, so callers can refine further.
    """
    seen = {}

    def F(x):
        if x not in seen:
            seen[x] = f(x)
        return seen[x]

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = F(c), F(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = F(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = F(d)
    return sorted(seen.items())


def find_s_min(params: ModelParams, family: str, policy: MeshPolicy = DEFAULT_POLICY,
               coarse: int = 19, e_tol: float = GOLDEN_E_TOL) -> tuple[float, float, float]:
    """Minimise a(E) over the anomalous curve.

    Returns ``(s_min, E_at_min, a_min)``.
    """
    m = params.m

    def a_of(E):
        return solve_cutoff(params, family, E, "even", 0, policy=policy).a

    grid = np.linspace(0.9 * m, -0.9 * m, coarse)
    vals = [a_of(float(E)) for E in grid]
    i = int(np.argmin(vals))
    if i == 0 or i == len(grid) - 1:
        raise SolverError(f"no interior minimum of a(E) on the coarse grid for {family}")
    evals = _golden_min(a_of, float(grid[i + 1]), float(grid[i]), float(grid[i - 1]), e_tol * m)

    # one parabolic step through the three best points
    best = sorted(evals, key=lambda t: t[1])[:3]
    (x1, f1), (x2, f2), (x3, f3) = sorted(best)
    den = (x2 - x1) * (f2 - f3) - (x2 - x3) * (f2 - f1)
    if den != 0.0:
        xv = x2 - 0.5 * ((x2 - x1) ** 2 * (f2 - f3) - (x2 - x3) ** 2 * (f2 - f1)) / den
        if x1 < xv < x3:
            evals.append((xv, a_of(xv)))
    E_min, a_min = min(evals, key=lambda t: t[1])
    return a_min * m / params.delta, E_min, a_min


def _extrapolate_a_inf(params: ModelParams, family: str, policy: MeshPolicy) -> float:
    # a(E) - a_inf vanishes like kappa^2 = m^2 - E^2 at threshold, with
    # slowly decaying corrections; the last three points pin a quadratic.
    m = params.m
    Es = np.array([-m * (1.0 - 4.0 ** -k * 1e-2) for k in range(7)])
    a = np.array([solve_cutoff(params, family, float(E), "even", 0, policy=policy).a for E in Es])
    kappa_sq = (m - Es) * (m + Es)
    coef = np.polyfit(kappa_sq[-3:] / m**2, a[-3:], 2)
    return float(coef[-1])


def find_s_inf(params: ModelParams, family: str, policy: MeshPolicy = DEFAULT_POLICY,
               *, cross_check: bool = True) -> tuple[float, float, float, bool]:
    """Cutoff at the supercritical limit E = -m.

    Primary value: a cutoff search exactly at E = -m (the tail still
    separates into decaying and growing solutions there).  The cross-check
    extrapolates a(E) toward -m.  Returns
    ``(s_inf, a_inf, s_inf_extrapolated, disagreement)``.
    """
    m = params.m
    a_inf = solve_cutoff(params, family, -m, "even", 0, policy=policy).a
    s_inf = a_inf * m / params.delta
    if not cross_check:
        return s_inf, a_inf, math.nan, False
    s_ext = _extrapolate_a_inf(params, family, policy) * m / params.delta
    disagree = abs(s_ext - s_inf) > S_INF_AGREEMENT * s_inf
    if disagree:
        log.warning("s_inf methods disagree for %s: threshold %.8g vs extrapolated %.8g",
                    family, s_inf, s_ext)
    return s_inf, a_inf, s_ext, disagree


def special_points(params: ModelParams, family: str,
                   policy: MeshPolicy = DEFAULT_POLICY) -> SpecialPoints:
    p0 = find_s0(params, family, policy)
    s_min, E_min, a_min = find_s_min(params, family, policy)
    s_inf, a_inf, s_ext, disagree = find_s_inf(params, family, policy)
    return SpecialPoints(s0=p0.s, s_min=s_min, E_at_min=E_min, s_inf=s_inf,
                         a0=p0.a, a_min=a_min, a_inf=a_inf,
                         s_inf_extrapolated=s_ext, s_inf_disagreement=disagree)


def count_local_minima(values) -> int:
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        return 0
    d = np.sign(np.diff(v))
    return int(np.sum((d[:-1] < 0) & (d[1:] > 0)))


def is_u_shaped(values) -> bool:
    """Strictly decreasing then strictly increasing, with an interior minimum."""
    v = np.asarray(values, dtype=float)
    i = int(np.argmin(v))
    if i == 0 or i == len(v) - 1:
        return False
    return bool(np.all(np.diff(v[: i + 1]) < 0) and np.all(np.diff(v[i:]) > 0))


def mode_disagreement(params: ModelParams, family: str, curve: BranchCurve,
                      policy: MeshPolicy = DEFAULT_POLICY) -> list[tuple[float, float]]:
    """Re-solve each point of a cutoff-mode curve in energy mode.

    For each point returns ``(|a_E - a| / a, allowed)`` where a_E is the
    cutoff found at the point's energy and ``allowed`` combines both
    solver tolerances through the local slope d ln a / dE.
    """
    out = []
    m = params.m
    for p in curve.points:
        q = solve_cutoff(params, family, p.E, "even", 0, policy=policy)
        dE = 1e-4 * m
        E2 = p.E - dE if p.E - dE > -m else p.E + dE
        q2 = solve_cutoff(params, family, E2, "even", 0, policy=policy)
        slope = abs(math.log(q2.a / q.a) / (E2 - p.E))
        allowed = 10.0 * (A_TOL_REL + slope * E_TOL_REL * m) + 1e-12
        out.append((abs(q.a - p.a) / p.a, allowed))
    return out

