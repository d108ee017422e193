from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kg1d.errors import DomainError
from kg1d.integrator import (
    DEFAULT_POLICY, MeshPolicy, build_mesh, kappa_of, shoot, trajectory, x_max_of,
)
from kg1d.params import make_model
from kg1d.potentials import PotentialSpec


def flat_core_exact(params, a, E):
    """psi(a) for the even solution on the constant segment of v2."""
    k2 = (E + params.alpha / a) ** 2 - params.m**2
    return math.cos(math.sqrt(k2) * a) if k2 > 0 else math.cosh(math.sqrt(-k2) * a)


def core_error(params, a, E, h):
    spec = PotentialSpec("v2", a, params.alpha)
    pol = MeshPolicy(h0=h, growth=1.0, x_max_cap=a, max_phase_step=10.0)
    x, psi, _ = trajectory(params, spec, E, "even", pol)
    assert x[-1] == a
    return abs(psi[-1] - flat_core_exact(params, a, E))


def test_x_max_from_decay_length():
    p = make_model()
    assert x_max_of(p, 0.0, MeshPolicy(x_max_factor=25.0)) == 25.0
    mesh = build_mesh(p, 0.0, PotentialSpec("v1", 0.1, p.alpha), MeshPolicy(x_max_factor=25.0))
    assert mesh[0] == 0.0 and mesh[-1] == 25.0


def test_x_max_capped_near_threshold():
    p = make_model()
    E = 1.0 - 5e-7
    assert kappa_of(E, 1.0) == pytest.approx(1e-3, rel=1e-6)
    pol = MeshPolicy(x_max_cap=1e4)
    assert x_max_of(p, E, pol) == 1e4
    # the default cap sits above 30/kappa here
    assert x_max_of(p, E, DEFAULT_POLICY) == pytest.approx(3e4, rel=1e-6)
    assert x_max_of(p, 1.0, DEFAULT_POLICY) == 1e6
    assert x_max_of(p, -1.0, DEFAULT_POLICY) == 1e6


@pytest.mark.parametrize("a", [1e-4, 3.3e-3, 0.7])
def test_v2_mesh_contains_cutoff(a):
    p = make_model()
    mesh = build_mesh(p, 0.2, PotentialSpec("v2", a, p.alpha))
    assert a in mesh
    assert np.all(np.diff(mesh) > 0)


def test_mesh_grading():
    p = make_model()
    pol = MeshPolicy(growth=1.05, max_phase_step=1e9)
    mesh = build_mesh(p, 0.0, PotentialSpec("v1", 1.0, p.alpha), pol)
    h = np.diff(mesh)[:-1]
    assert h[0] == pytest.approx(1e-3)
    assert np.allclose(h[1:] / h[:-1], 1.05)


def test_mesh_rejects_unbound_energy():
    p = make_model()
    with pytest.raises(DomainError):
        build_mesh(p, 1.01, PotentialSpec("v1", 1.0, p.alpha))


@pytest.mark.parametrize("kwargs", [
    {"h0": 0.0}, {"growth": 0.99}, {"growth": 1.2}, {"x_max_factor": 5.0},
    {"x_max_cap": -1.0}, {"blowup_threshold": 0.5},
])
def test_policy_validation(kwargs):
    with pytest.raises(DomainError):
        MeshPolicy(**kwargs)


@pytest.mark.parametrize("E", [0.3, -0.5, 0.99])
def test_flat_core_matches_closed_form(E):
    p = make_model()
    a = 1e-3
    assert core_error(p, a, E, a / 1000) / flat_core_exact(p, a, E) <= 1e-8


@pytest.mark.parametrize("a,E", [(5.0, 0.7), (1.0, 0.9)])
def test_fourth_order_convergence(a, E):
    # strong coupling makes the core segment long in phase, so the error is measurable
    p = make_model(alpha=0.5)
    errs = [core_error(p, a, E, a / n) for n in (20, 40, 80)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    for r in ratios:
        assert 8.0 <= r <= 24.0


def test_near_free_grows_without_nodes():
    p = make_model()
    shot = shoot(p, PotentialSpec("v1", 1e9, p.alpha), 0.99, "even", record=True)
    assert shot.nodes == 0
    assert shot.terminal_sign == 1
    x, psi, _ = shot.trajectory
    assert np.all(np.diff(psi) >= 0)
    kappa = kappa_of(0.99, 1.0)
    # psi'' = kappa^2 psi with psi(0) = 1 gives cosh
    i = np.searchsorted(x, 10.0)
    assert psi[i] == pytest.approx(math.cosh(kappa * x[i]), rel=1e-6)


def test_odd_initial_data():
    p = make_model()
    x, psi, dpsi = trajectory(p, PotentialSpec("v1", 1e9, p.alpha), 0.99, "odd")
    kappa = kappa_of(0.99, 1.0)
    assert psi[0] == 0.0 and dpsi[0] == 1.0
    assert psi[20] == pytest.approx(math.sinh(kappa * x[20]) / kappa, rel=1e-9)


def test_blowup_halts_early():
    p = make_model()
    shot = shoot(p, PotentialSpec("v1", 1.0, p.alpha), 0.0, "even")
    assert shot.halted_early
    assert shot.terminal_log_magnitude > math.log(1e8)
    assert shot.x_end < x_max_of(p, 0.0, DEFAULT_POLICY)


@pytest.mark.parametrize("E", [0.5, 0.9, -0.3])
def test_nodes_stable_under_refinement(E):
    p = make_model()
    spec = PotentialSpec("v1", 1e-4, p.alpha)
    coarse = shoot(p, spec, E, "even")
    fine = shoot(p, spec, E, "even", MeshPolicy(h0=1e-6, growth=1.005))
    assert coarse.nodes == fine.nodes
    assert coarse.terminal_sign == fine.terminal_sign


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3),
       st.floats(min_value=-0.99, max_value=0.99),
       st.sampled_from(["even", "odd"]))
def test_linearity(c, E, parity):
    p = make_model()
    spec = PotentialSpec("v2", 1e-3, p.alpha)
    ref = shoot(p, spec, E, parity)
    scaled = shoot(p, spec, E, parity, scale=c)
    assert scaled.nodes == ref.nodes
    assert scaled.terminal_sign == ref.terminal_sign
    assert scaled.halted_early == ref.halted_early
    assert scaled.terminal_log_magnitude == pytest.approx(ref.terminal_log_magnitude + math.log(c),
                                                          abs=1e-9)
