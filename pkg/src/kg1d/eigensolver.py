"""Bisection eigensolvers driven by node counting.

Two search modes are provided:

* :func:`solve_energy` fixes the cutoff and bisects on E.  Which side of the
  eigenvalue a trial E lies on follows from the node count, but the direction
  of the rule depends on the regime: for positive energies too many nodes
  means E is too large, for negative energies it means E is too small.
* :func:`solve_cutoff` fixes E and bisects on the cutoff a (geometrically,
  since a spans many decades).  The node count grows as a decreases, for
  either sign of E, so this mode works across E = 0 and near the fold of the
  anomalous-state curve.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from kg1d.errors import AmbiguousShotError, BracketError, DomainError, IterationLimitError
from kg1d.integrator import DEFAULT_POLICY, MeshPolicy, ShotResult, shoot
from kg1d.params import ModelParams, SpectralPoint
from kg1d.potentials import PotentialSpec

E_TOL_REL = 1e-12
A_TOL_REL = 1e-10
A_MIN = 1e-10  # in units of 1/m
A_MAX = 1e3

# relative size below which a non-escaping tail counts as decayed
_DECAYED = math.log(1e-6)


class Regime(str, enum.Enum):
    E_POSITIVE = "E_positive"
    E_NEGATIVE = "E_negative"
    A_SEARCH = "a_search"


class Verdict(str, enum.Enum):
    TOO_LOW = "too_low"
    TOO_HIGH = "too_high"
    CONVERGED_CANDIDATE = "converged_candidate"


@dataclass(frozen=True)
class SearchWindow:
    lo: float
    hi: float
    tol_rel: float = E_TOL_REL
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"search window needs lo < hi, got ({self.lo!r}, {self.hi!r})")
        if not self.tol_rel > 0.0:
            raise DomainError("tol_rel must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


def _extra_node(shot: ShotResult, target_nodes: int) -> bool:
    """True when the shot sits on the 'one node too many' side of an eigenvalue.

    With exactly the target node count and an unfinished tail, a psi heading
    back toward zero (psi * psi' < 0) is about to add a node.
    """
    if shot.nodes != target_nodes:
        return shot.nodes > target_nodes
    if shot.halted_early:
        return False
    return not shot.growing


# which side "one node too many" means, per regime
_EXTRA_NODE_SIDE = {
    Regime.E_POSITIVE: Verdict.TOO_HIGH,
    Regime.E_NEGATIVE: Verdict.TOO_LOW,
    Regime.A_SEARCH: Verdict.TOO_LOW,
}
_OTHER = {Verdict.TOO_HIGH: Verdict.TOO_LOW, Verdict.TOO_LOW: Verdict.TOO_HIGH}


def classify_shot(shot: ShotResult, target_nodes: int, regime: Regime | str) -> Verdict:
    """Decide on which side of the eigen-parameter a shot lies.

    Returns ``CONVERGED_CANDIDATE`` for a shot that ran to x_max with the
    target node count and a tail decayed well below its peak.  Raises
    :class:`AmbiguousShotError` when such a shot has not decayed, which means
    the domain was too short.
    """
    regime = Regime(regime)
    extra = _EXTRA_NODE_SIDE[regime]
    if shot.nodes > target_nodes:
        return extra
    if shot.nodes < target_nodes or shot.halted_early:
        return _OTHER[extra]
    decayed = shot.terminal_log_magnitude - shot.peak_log_magnitude < _DECAYED
    if decayed:
        return Verdict.CONVERGED_CANDIDATE
    if shot.growing:
        return _OTHER[extra]
    raise AmbiguousShotError(
        f"shot reached x_end={shot.x_end:.6g} with {shot.nodes} nodes and a tail that "
        "neither escaped nor decayed; enlarge x_max_factor or x_max_cap")


def _side(shot: ShotResult, target_nodes: int, regime: Regime) -> Verdict:
    verdict = classify_shot(shot, target_nodes, regime)
    if verdict is Verdict.CONVERGED_CANDIDATE:
        # inside the round-off band: fall back on the sign of psi psi'
        extra = _EXTRA_NODE_SIDE[regime]
        return extra if _extra_node(shot, target_nodes) else _OTHER[extra]
    return verdict


def _infer_regime(window: SearchWindow) -> Regime:
    if window.lo >= 0.0:
        return Regime.E_POSITIVE
    if window.hi <= 0.0:
        return Regime.E_NEGATIVE
    raise DomainError(
        "energy window straddles E = 0; pass an explicit regime or use solve_cutoff")


def solve_energy(params: ModelParams, spec: PotentialSpec, parity: str, target_nodes: int,
                 window: SearchWindow | None = None, policy: MeshPolicy = DEFAULT_POLICY,
                 regime: Regime | str | None = None) -> SpectralPoint:
    """Bisect on E at fixed cutoff until the bracket is below ``tol_rel * m``.

    The regime is inferred from the sign of the window.  An explicit
    ``regime`` overrides this, which is how the part of the upper branch with
    E < 0 (between the fold and E = 0) is reached: there the positive-energy
    node rule still holds.
    """
    m = params.m
    if window is None:
        window = SearchWindow(0.0, m)
    if window.lo < -m or window.hi > m:
        raise DomainError(f"energy window ({window.lo}, {window.hi}) must lie within [-m, m]")
    if target_nodes < 0:
        raise DomainError("target_nodes must be non-negative")
    regime = _infer_regime(window) if regime is None else Regime(regime)
    if regime is Regime.A_SEARCH:
        raise DomainError("solve_energy needs an energy regime")

    lo, hi = window.lo, window.hi
    shot_lo = shoot(params, spec, lo, parity, policy)
    shot_hi = shoot(params, spec, hi, parity, policy)
    side_lo = _side(shot_lo, target_nodes, regime)
    side_hi = _side(shot_hi, target_nodes, regime)
    if side_lo is not Verdict.TOO_LOW or side_hi is not Verdict.TOO_HIGH:
        raise BracketError(
            f"no {parity} eigenvalue with {target_nodes} nodes in E window ({lo!r}, {hi!r}) "
            f"[{spec.family}, a={spec.a!r}]: ends classify {side_lo.value}/{side_hi.value}",
            lo, hi, {"family": spec.family, "a": spec.a, "parity": parity})

    tol = window.tol_rel * m
    keep = shot_hi if regime is Regime.E_NEGATIVE else shot_lo
    for _ in range(window.max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        shot = shoot(params, spec, mid, parity, policy)
        if _side(shot, target_nodes, regime) is Verdict.TOO_LOW:
            lo = mid
        else:
            hi = mid
        if not _extra_node(shot, target_nodes):
            keep = shot
    else:
        raise IterationLimitError(
            f"energy bisection did not reach tol {tol:.3g} in {window.max_iter} iterations")

    E = 0.5 * (lo + hi)
    nodes = _converged_nodes(keep, lo, hi, parity, target_nodes)
    return SpectralPoint.from_physical(spec.a, E, params, parity, nodes)


def _converged_nodes(keep: ShotResult, lo, hi, parity, target_nodes) -> int:
    # The last shot without an extra node neighbours the eigenvalue; it has
    # exactly the target count unless the window hid a node-count gap.
    nodes = keep.nodes
    if nodes != target_nodes:
        raise BracketError(
            f"bisection converged to a boundary with {nodes} nodes, not {target_nodes}",
            lo, hi, {"parity": parity})
    return nodes


def solve_cutoff(params: ModelParams, family: str, E: float, parity: str, target_nodes: int,
                 window: SearchWindow | None = None,
                 policy: MeshPolicy = DEFAULT_POLICY) -> SpectralPoint:
    """Bisect on the cutoff a at fixed E (geometric midpoints).

    E = -m is admitted for the threshold shot; the returned point then
    carries beta = -inf.
    """
    m = params.m
    if not (-m <= E < m) or not math.isfinite(E):
        raise DomainError(f"cutoff search needs -m <= E < m, got E={E!r}")
    if target_nodes < 0:
        raise DomainError("target_nodes must be non-negative")
    if window is None:
        window = SearchWindow(A_MIN / m, A_MAX / m, A_TOL_REL)
    lo = max(window.lo, A_MIN / m)
    hi = min(window.hi, A_MAX / m)
    if not (0.0 < lo < hi):
        raise DomainError(f"cutoff window ({window.lo!r}, {window.hi!r}) is empty after clamping")

    def spec_at(a):
        return PotentialSpec(family, a, params.alpha)

    regime = Regime.A_SEARCH
    shot_lo = shoot(params, spec_at(lo), E, parity, policy)
    shot_hi = shoot(params, spec_at(hi), E, parity, policy)
    side_lo = _side(shot_lo, target_nodes, regime)
    side_hi = _side(shot_hi, target_nodes, regime)
    if side_lo is not Verdict.TOO_LOW or side_hi is not Verdict.TOO_HIGH:
        raise BracketError(
            f"no cutoff in ({lo!r}, {hi!r}) gives a {parity} state with {target_nodes} nodes "
            f"at E={E!r} [{family}]: ends classify {side_lo.value}/{side_hi.value}",
            lo, hi, {"family": family, "E": E, "parity": parity})

    keep = shot_hi
    for _ in range(window.max_iter):
        if hi - lo <= window.tol_rel * hi:
            break
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        shot = shoot(params, spec_at(mid), E, parity, policy)
        if _side(shot, target_nodes, regime) is Verdict.TOO_LOW:
            lo = mid
        else:
            hi = mid
        if not _extra_node(shot, target_nodes):
            keep = shot
    else:
        raise IterationLimitError(
            f"cutoff bisection did not reach tol {window.tol_rel:.3g} in {window.max_iter} iterations")

    a = math.sqrt(lo * hi)
    nodes = _converged_nodes(keep, lo, hi, parity, target_nodes)
    return SpectralPoint.from_physical(a, E, params, parity, nodes)
