"""Bound states of the 1D Klein-Gordon equation with cutoff Coulomb potentials."""

__version__ = "0.1.0"

from kg1d.params import (  # noqa: E402
    ModelParams, SpectralPoint, E_from_beta, a_from_s, beta_from_E, make_model, s_from_a,
)
from kg1d.potentials import PotentialSpec, depth, potential_value  # noqa: E402
from kg1d.integrator import MeshPolicy, ShotResult, build_mesh, shoot  # noqa: E402
from kg1d.eigensolver import (  # noqa: E402
    Regime, SearchWindow, Verdict, classify_shot, solve_cutoff, solve_energy,
)
from kg1d.curve import (  # noqa: E402
    BranchCurve, SpecialPoints, find_s0, find_s_inf, find_s_min, special_points,
    trace_by_cutoff, trace_by_energy,
)

__all__ = [
    "BranchCurve", "E_from_beta", "MeshPolicy", "ModelParams", "PotentialSpec", "Regime",
    "SearchWindow", "ShotResult", "SpecialPoints", "SpectralPoint", "Verdict", "a_from_s",
    "beta_from_E", "build_mesh", "classify_shot", "depth", "find_s0", "find_s_inf",
    "find_s_min", "make_model", "potential_value", "s_from_a", "shoot", "solve_cutoff",
    "solve_energy", "special_points", "trace_by_cutoff", "trace_by_energy",
]
