from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from kg1d.errors import DomainError
from kg1d.params import (
    DEFAULT_ALPHA, ModelParams, SpectralPoint, E_from_beta, a_from_s, beta_from_E, make_model,
    s_from_a,
)

alphas = st.floats(min_value=1e-4, max_value=0.5)
masses = st.floats(min_value=1e-3, max_value=1e3)


def test_delta_fine_structure():
    # the quoted value is truncated, not rounded, so allow one unit in its last digit
    assert 0.0 <= make_model().delta - 5.32821e-5 < 1e-10


def test_delta_edge_cases():
    assert make_model(alpha=0.5).delta == 0.5
    assert make_model(alpha=0.01).delta == 0.5 - math.sqrt(0.25 - 1e-4)


def test_default_alpha_is_one_over_137():
    assert DEFAULT_ALPHA == 1.0 / 137.0


@pytest.mark.parametrize("alpha", [0.0, -0.1, 0.51, math.nan])
def test_alpha_out_of_range(alpha):
    with pytest.raises(DomainError):
        ModelParams(alpha=alpha)


@pytest.mark.parametrize("m", [0.0, -1.0, math.inf, math.nan])
def test_bad_mass(m):
    with pytest.raises(DomainError):
        ModelParams(m=m)


def test_s_of_published_fold_cutoffs():
    p = make_model()
    assert s_from_a(5.28217e-5, p) == pytest.approx(0.99136, abs=5e-5)
    assert s_from_a(1.05614e-4, p) == pytest.approx(1.98216, abs=5e-5)
    assert s_from_a(p.delta, p) == pytest.approx(1.0, rel=1e-15)


def test_beta_special_values():
    p = make_model()
    assert beta_from_E(0.0, p) == 0.0
    assert beta_from_E(1.0 / math.sqrt(2.0), p) == pytest.approx(p.alpha / p.delta, rel=1e-12)
    assert E_from_beta(0.0, p) == 0.0
    assert E_from_beta(beta_from_E(0.5, p), p) == pytest.approx(0.5, rel=1e-14)


def test_beta_diverges_at_threshold():
    p = make_model()
    betas = [beta_from_E(-1.0 + 10.0**-k, p) for k in range(2, 12, 2)]
    assert all(b2 < b1 for b1, b2 in zip(betas, betas[1:]))
    assert betas[-1] < -1e6


@pytest.mark.parametrize("E", [1.0, -1.0, 1.5, math.nan, math.inf])
def test_beta_rejects_unbound(E):
    with pytest.raises(DomainError):
        beta_from_E(E, make_model())


@pytest.mark.parametrize("bad", [0.0, -1e-3])
def test_cutoff_maps_reject_nonpositive(bad):
    with pytest.raises(DomainError):
        s_from_a(bad, make_model())
    with pytest.raises(DomainError):
        a_from_s(bad, make_model())


@given(alphas, masses, st.floats(min_value=1e-9, max_value=1e3))
def test_cutoff_round_trip(alpha, m, a):
    p = ModelParams(alpha, m)
    assert a_from_s(s_from_a(a, p), p) == pytest.approx(a, rel=1e-12)


@given(alphas, masses, st.floats(min_value=-0.999999, max_value=0.999999))
def test_energy_round_trip(alpha, m, e):
    p = ModelParams(alpha, m)
    E = e * m
    assert E_from_beta(beta_from_E(E, p), p) == pytest.approx(E, rel=1e-12, abs=1e-12 * m)


@given(alphas, st.floats(min_value=-0.9999, max_value=0.9999),
       st.floats(min_value=-0.9999, max_value=0.9999))
def test_beta_monotone_and_odd(alpha, e1, e2):
    p = ModelParams(alpha, 1.0)
    assert beta_from_E(-e1, p) == -beta_from_E(e1, p)
    if e1 < e2:
        assert beta_from_E(e1, p) < beta_from_E(e2, p)


def test_spectral_point_threshold_beta():
    p = make_model()
    pt = SpectralPoint.from_physical(1e-4, -1.0, p, "even", 0)
    assert pt.beta == -math.inf
    assert pt.s == pytest.approx(1e-4 / p.delta)


def test_spectral_point_validation():
    p = make_model()
    with pytest.raises(DomainError):
        SpectralPoint.from_physical(1e-4, 0.0, p, "sideways", 0)
    with pytest.raises(DomainError):
        SpectralPoint.from_physical(1e-4, 0.0, p, "even", -1)
    with pytest.raises(DomainError):
        SpectralPoint.from_physical(1e-4, 0.0, p, "even", 0).with_branch("middle")
    assert SpectralPoint.from_physical(1e-4, 0.0, p, "even", 0).with_branch("upper").branch == "upper"
