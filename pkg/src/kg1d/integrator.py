"""Outward RK4 integration of psi'' = [m^2 - (E - V(x))^2] psi on a graded mesh.

The mesh starts with a step resolving the potential core (or the local
oscillation length, whichever is shorter) and grows geometrically away from
the origin.  Close to the supercritical limit the wave oscillates quickly near
x = 0 but decays very slowly far out, which a uniform mesh cannot handle.

A shot records the number of sign changes of psi and how the solution ends.
Integration stops early once psi has provably escaped: past the last
classically allowed point, with psi and psi' of equal sign, no further node
can appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from kg1d.errors import DomainError
from kg1d.params import PARITIES, ModelParams
from kg1d.potentials import PotentialSpec


@dataclass(frozen=True)
class MeshPolicy:
    """Mesh and stopping controls for a shot.

    ``h0`` and ``x_max_cap`` default to values derived from the potential
    and the mass (see :func:`build_mesh`).  ``max_phase_step`` caps
    ``h * sqrt(|Q|)`` so far-out Coulomb oscillations stay resolved.
    """

    h0: float | None = None
    growth: float = 1.01
    x_max_factor: float = 30.0
    x_max_cap: float | None = None
    blowup_threshold: float = 1e8
    max_phase_step: float = 0.1

    def __post_init__(self):
        if self.h0 is not None and not self.h0 > 0.0:
            raise DomainError(f"h0 must be positive, got {self.h0!r}")
        if not (1.0 <= self.growth <= 1.1):
            raise DomainError(f"growth must lie in [1, 1.1], got {self.growth!r}")
        if not self.x_max_factor >= 10.0:
            raise DomainError(f"x_max_factor must be >= 10, got {self.x_max_factor!r}")
        if self.x_max_cap is not None and not self.x_max_cap > 0.0:
            raise DomainError(f"x_max_cap must be positive, got {self.x_max_cap!r}")
        if not self.blowup_threshold > 1.0:
            raise DomainError("blowup_threshold must exceed 1")
        if not self.max_phase_step > 0.0:
            raise DomainError("max_phase_step must be positive")

    def cap(self, m: float) -> float:
        return self.x_max_cap if self.x_max_cap is not None else 1e6 / m

    def as_dict(self) -> dict:
        return {
            "h0": self.h0, "growth": self.growth, "x_max_factor": self.x_max_factor,
            "x_max_cap": self.x_max_cap, "blowup_threshold": self.blowup_threshold,
            "max_phase_step": self.max_phase_step,
        }


DEFAULT_POLICY = MeshPolicy()


@dataclass(frozen=True)
class ShotResult:
    nodes: int
    terminal_log_magnitude: float
    terminal_sign: int
    halted_early: bool
    x_end: float
    # sign of psi' at x_end; psi * psi' > 0 means the tail is growing
    terminal_slope_sign: int = 1
    # log of the largest |psi| met anywhere on the run
    peak_log_magnitude: float = 0.0
    # (x, psi, dpsi) arrays, only when requested
    trajectory: tuple | None = None

    @property
    def growing(self) -> bool:
        return self.terminal_sign * self.terminal_slope_sign > 0


def kappa_of(E: float, m: float) -> float:
    """Decay constant sqrt(m^2 - E^2); zero at (or beyond) threshold."""
    prod = (m - E) * (m + E)
    return math.sqrt(prod) if prod > 0.0 else 0.0


def x_max_of(params: ModelParams, E: float, policy: MeshPolicy) -> float:
    kappa = kappa_of(E, params.m)
    cap = policy.cap(params.m)
    if kappa == 0.0:
        return cap
    return min(policy.x_max_factor / kappa, cap)


def initial_step(params: ModelParams, E: float, spec: PotentialSpec,
                 policy: MeshPolicy) -> float:
    if policy.h0 is not None:
        return policy.h0
    m = params.m
    h0 = min(spec.a / 100.0, 1e-3 / m)
    v0 = float(spec.values(0.0))
    k0sq = (E - v0) ** 2 - m * m
    if k0sq > 0.0:
        h0 = min(h0, (2.0 * math.pi / 50.0) / math.sqrt(k0sq))
    return h0


def _q(params: ModelParams, E: float, spec: PotentialSpec, x: np.ndarray) -> np.ndarray:
    d = E - spec.values(x)
    return params.m * params.m - d * d


def build_mesh(params: ModelParams, E: float, spec: PotentialSpec,
               policy: MeshPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Mesh nodes 0 = x_0 < x_1 < ... < x_N = x_max for one shot.

    Returns the node array; step intervals are consecutive pairs.
    """
    m = params.m
    if not math.isfinite(E) or abs(E) > m:
        raise DomainError(f"shot energy must satisfy |E| <= m, got {E!r}")
    x_max = x_max_of(params, E, policy)
    h0 = initial_step(params, E, spec, policy)
    g = policy.growth

    if g == 1.0:
        n = int(math.ceil(x_max / h0))
        x = h0 * np.arange(n + 1, dtype=float)
    else:
        n = int(math.ceil(math.log1p(x_max * (g - 1.0) / h0) / math.log(g)))
        x = h0 * np.expm1(np.arange(n + 1) * math.log(g)) / (g - 1.0)
    x = x[x < x_max]
    x = np.append(x, x_max)

    # subdivide steps that would under-resolve a local oscillation or decay
    q_abs = np.maximum(np.abs(_q(params, E, spec, x[:-1])), np.abs(_q(params, E, spec, x[1:])))
    h = np.diff(x)
    pieces = np.maximum(1, np.ceil(h * np.sqrt(q_abs) / policy.max_phase_step)).astype(int)
    if np.any(pieces > 1):
        total = int(pieces.sum())
        if total > 5_000_000:
            raise DomainError("mesh refinement exploded; check the mesh policy")
        first = np.repeat(np.cumsum(pieces) - pieces, pieces)
        frac = (np.arange(total) - first) / np.repeat(pieces, pieces)
        x = np.append(np.repeat(x[:-1], pieces) + frac * np.repeat(h, pieces), x_max)

    kink = spec.kink
    if kink is not None and 0.0 < kink < x_max:
        i = int(np.searchsorted(x, kink))
        if x[i] != kink:
            x = np.insert(x, i, kink)

    if len(x) < 2 or not np.all(np.diff(x) > 0.0):
        raise DomainError("mesh is empty or not strictly increasing")
    return x


def _initial_state(parity: str) -> tuple[float, float]:
    if parity == "even":
        return 1.0, 0.0
    if parity == "odd":
        return 0.0, 1.0
    raise DomainError(f"parity must be one of {PARITIES}, got {parity!r}")


def shoot(params: ModelParams, spec: PotentialSpec, E: float, parity: str,
          policy: MeshPolicy = DEFAULT_POLICY, *, record: bool = False,
          scale: float = 1.0) -> ShotResult:
    """Integrate outward from x = 0 with parity initial conditions.

    Even parity starts at psi = 1, psi' = 0; odd parity at psi = 0, psi' = 1.
    ``scale`` multiplies the initial data (the equation is linear).
    """
    p, d = _initial_state(parity)
    p *= scale
    d *= scale
    x = build_mesh(params, E, spec, policy)
    mid = 0.5 * (x[:-1] + x[1:])
    qn = _q(params, E, spec, x)
    qm = _q(params, E, spec, mid)

    # index of the last node at or before which Q <= 0 somewhere
    allowed = np.flatnonzero(qn <= 0.0)
    allowed_m = np.flatnonzero(qm <= 0.0) + 1
    last_allowed = max(allowed[-1] if len(allowed) else 0,
                       allowed_m[-1] if len(allowed_m) else 0)

    xs = x.tolist()
    qn = qn.tolist()
    qm = qm.tolist()
    n_steps = len(xs) - 1
    thr = policy.blowup_threshold
    ref = max(abs(p), abs(d) / params.m)
    peak = ref
    nodes = 0
    last_sign = 0 if p == 0.0 else (1 if p > 0.0 else -1)
    last_p, last_d = p, d
    halted = False
    i_end = n_steps
    if record:
        tx, tp, td = [xs[0]], [p], [d]

    for i in range(n_steps):
        h = xs[i + 1] - xs[i]
        hh = 0.5 * h
        q0 = qn[i]
        q1 = qm[i]
        k1p = d
        k1d = q0 * p
        k2p = d + hh * k1d
        k2d = q1 * (p + hh * k1p)
        k3p = d + hh * k2d
        k3d = q1 * (p + hh * k2p)
        k4p = d + h * k3d
        k4d = qn[i + 1] * (p + h * k3p)
        p = p + h * (k1p + 2.0 * (k2p + k3p) + k4p) / 6.0
        d = d + h * (k1d + 2.0 * (k2d + k3d) + k4d) / 6.0

        if not (math.isfinite(p) and math.isfinite(d)):
            halted = True
            i_end = i
            break
        last_p, last_d = p, d
        if record:
            tx.append(xs[i + 1])
            tp.append(p)
            td.append(d)

        if p != 0.0:
            sgn = 1 if p > 0.0 else -1
            if last_sign != 0 and sgn != last_sign:
                nodes += 1
            last_sign = sgn
        ap = abs(p)
        if ap > peak:
            peak = ap
        if i + 1 <= last_allowed:
            if ap > ref:
                ref = ap
        elif ap > thr * ref and p * d > 0.0:
            halted = True
            i_end = i + 1
            break

    x_end = xs[i_end]
    if last_sign == 0:
        last_sign = 1 if d >= 0.0 else -1
    slope_sign = 1 if last_d >= 0.0 else -1
    traj = (np.array(tx), np.array(tp), np.array(td)) if record else None
    return ShotResult(
        nodes=nodes,
        terminal_log_magnitude=math.log(abs(last_p)) if last_p != 0.0 else -math.inf,
        terminal_sign=last_sign,
        halted_early=halted,
        x_end=x_end,
        terminal_slope_sign=slope_sign,
        peak_log_magnitude=math.log(peak),
        trajectory=traj,
    )


def trajectory(params: ModelParams, spec: PotentialSpec, E: float, parity: str,
               policy: MeshPolicy = DEFAULT_POLICY) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, psi, dpsi) samples of one shot, up to where it stopped."""
    return shoot(params, spec, E, parity, policy, record=True).trajectory
