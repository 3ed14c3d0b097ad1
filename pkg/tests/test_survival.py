import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from engines.process import risk_neutral_model, waiting_transform
from engines.survival import (CorridorQuery, WienerParams, auxiliaries, corridor_auxiliaries,
                              corridor_curve, diffusive_parameters, phi_curve, phi_minus_laplace,
                              phi_plus_laplace, survival_at, survival_corridor_laplace,
                              wiener_exponents, wiener_phi)
from models.market import JumpLaw, MarketModel, WaitingLaw
from utils.errors import DomainError

LN_HALF = math.log(0.5)
LN_TWO = math.log(2.0)


def test_auxiliaries_without_waiting(jumps):
    aux = auxiliaries(jumps, 0.0)
    assert aux.alpha == pytest.approx(2.0, abs=1e-12)
    assert aux.beta == pytest.approx(-3.0, abs=1e-12)
    assert aux.delta is None


def test_auxiliaries_at_full_waiting(jumps):
    aux = auxiliaries(jumps, 1.0)
    assert aux.alpha * aux.beta == pytest.approx(0.0, abs=1e-12)
    assert aux.alpha + aux.beta == pytest.approx(-1.0, abs=1e-12)
    assert (aux.alpha, aux.beta) == pytest.approx((0.0, -1.0), abs=1e-12)


def test_auxiliaries_at_risk_free_rate(jumps):
    aux = auxiliaries(jumps, 2.0 / 3.0)
    assert aux.alpha == pytest.approx(1.0, abs=1e-12)
    assert aux.beta == pytest.approx(-2.0, abs=1e-12)


@pytest.mark.parametrize("psi", [-1e-6, 1.0 + 1e-6, 2.0])
def test_auxiliaries_reject_out_of_range(jumps, psi):
    with pytest.raises(DomainError):
        auxiliaries(jumps, psi)


@settings(max_examples=1000, deadline=None)
@given(rho=st.floats(0.01, 20.0), gamma=st.floats(0.01, 20.0), psi=st.floats(0.0, 1.0))
def test_auxiliaries_identities(rho, gamma, psi):
    aux = auxiliaries(JumpLaw(rho, gamma), psi)
    scale = max(1.0, (rho + gamma) ** 2)
    assert abs(aux.alpha + aux.beta - (rho - gamma)) <= 1e-12 * scale
    assert abs(aux.alpha * aux.beta + gamma * rho * (1.0 - psi)) <= 1e-12 * scale
    assert aux.beta <= (rho - gamma) / 2.0 <= aux.alpha


def test_corridor_determinant_is_negative(jumps):
    aux = corridor_auxiliaries(jumps, 0.5, LN_HALF, LN_TWO)
    assert aux.delta < 0


def test_phi_plus_reference(market):
    assert phi_plus_laplace(market, 0.0, LN_HALF, 0.05) == pytest.approx(15.0, rel=1e-12)


def test_phi_minus_reference(market):
    assert phi_minus_laplace(market, 0.0, LN_TWO, 0.05) == pytest.approx(20.0 - 5.0 / 3.0, rel=1e-12)


def test_one_sided_no_jump_limit(market):
    s = 1e10
    assert s * phi_plus_laplace(market, 0.0, 0.0, s) == pytest.approx(1.0, abs=1e-9)
    assert s * phi_minus_laplace(market, 0.0, 0.0, s) == pytest.approx(1.0, abs=1e-9)


def test_one_sided_wrong_side_rejected(market):
    with pytest.raises(DomainError):
        phi_plus_laplace(market, 0.0, 0.1, 0.05)
    with pytest.raises(DomainError):
        phi_minus_laplace(market, 0.0, -0.1, 0.05)
    with pytest.raises(DomainError):
        phi_plus_laplace(market, 0.0, -0.1, 0.0)


@pytest.mark.parametrize("s", [0.01, 0.05, 1.0, 10.0])
def test_one_sided_bounds_and_monotone_in_distance(market, s):
    grid = np.linspace(0.0, 3.0, 100)
    up = np.array([s * phi_plus_laplace(market, 0.0, -d, s) for d in grid])
    down = np.array([s * phi_minus_laplace(market, 0.0, d, s) for d in grid])
    for values in (up, down):
        assert np.all(values > 0) and np.all(values <= 1.0 + 1e-15)
        assert np.all(np.diff(values) >= -1e-15)


def test_corridor_no_jump_limit(market):
    s = 1e10
    q = CorridorQuery(LN_HALF, LN_TWO, 0.0, s)
    assert s * survival_corridor_laplace(market, q) == pytest.approx(1.0, abs=1e-9)


def test_corridor_wide_upper_matches_down_crossing(market):
    q = CorridorQuery(LN_HALF, 40.0, 0.0, 0.05)
    expected = phi_minus_laplace(market, LN_HALF, 0.0, 0.05)
    assert survival_corridor_laplace(market, q) == pytest.approx(expected, rel=1e-8)


def test_corridor_wide_lower_matches_up_crossing(market):
    q = CorridorQuery(-40.0, LN_TWO, 0.0, 0.05)
    expected = phi_plus_laplace(market, LN_TWO, 0.0, 0.05)
    assert survival_corridor_laplace(market, q) == pytest.approx(expected, rel=1e-8)


def test_corridor_very_wide_does_not_overflow(market):
    q = CorridorQuery(-500.0, 500.0, 0.0, 0.05)
    value = survival_corridor_laplace(market, q)
    assert math.isfinite(value)
    assert 0 < 0.05 * value <= 1.0


def test_corridor_below_each_one_sided_survival(market):
    s = 0.05
    corridor = survival_corridor_laplace(market, CorridorQuery(LN_HALF, LN_TWO, 0.0, s))
    assert corridor <= phi_minus_laplace(market, LN_HALF, 0.0, s)
    assert corridor <= phi_plus_laplace(market, LN_TWO, 0.0, s)
    assert 0 < s * corridor <= 1.0


def test_infinite_boundary_dispatches_to_one_sided(market):
    q = CorridorQuery(LN_HALF, math.inf, 0.0, 0.05)
    assert survival_corridor_laplace(market, q) == phi_minus_laplace(market, LN_HALF, 0.0, 0.05)


@pytest.mark.parametrize("a,b,x0,s", [
    (1.0, 0.0, 0.5, 1.0),
    (0.0, 1.0, 2.0, 1.0),
    (-math.inf, math.inf, 0.0, 1.0),
    (0.0, 1.0, 0.5, 0.0),
])
def test_corridor_query_validation(a, b, x0, s):
    with pytest.raises(DomainError):
        CorridorQuery(a, b, x0, s)


def test_boundary_start_is_alive():
    q = CorridorQuery(0.0, 1.0, 0.0, 1.0)
    assert not q.one_sided


def test_wiener_phi_at_threshold_is_zero():
    params = WienerParams(sigma=0.1)
    assert wiener_phi(params, 0.0, 0.0, 0.05, "up") == 0.0
    assert wiener_phi(params, 0.0, 0.0, 0.05, "down") == 0.0


def test_wiener_phi_driftless():
    params = WienerParams(sigma=0.1)
    alpha_bar = math.sqrt(2 * 0.05) / 0.1
    expected = (1.0 - 0.5 ** alpha_bar) / 0.05
    assert wiener_phi(params, 0.0, LN_HALF, 0.05, "up") == pytest.approx(expected, rel=1e-12)
    assert wiener_exponents(params, 0.05)[0] == pytest.approx(alpha_bar, rel=1e-12)


def test_wiener_phi_side_checks():
    params = WienerParams(sigma=0.2, vartheta=0.01)
    with pytest.raises(DomainError):
        wiener_phi(params, 0.0, 0.5, 0.05, "up")
    with pytest.raises(DomainError):
        wiener_phi(params, 0.0, 0.5, 0.05, "sideways")
    with pytest.raises(DomainError):
        WienerParams(sigma=0.0)


def test_ctrw_converges_to_wiener():
    # σ² = 2/(γρμ) = 0.01 and ϑ = 0 for ρ = γ = 1e4, μ = 2e-6
    model = MarketModel(JumpLaw(1e4, 1e4), WaitingLaw.exponential(5e5), 0.0, 0.5)
    params = diffusive_parameters(model)
    assert params.sigma == pytest.approx(0.1, rel=1e-12)
    assert params.vartheta == pytest.approx(0.0, abs=1e-12)
    ctrw = phi_plus_laplace(model, 0.0, LN_HALF, 0.05)
    wiener = wiener_phi(params, 0.0, LN_HALF, 0.05, "up")
    assert ctrw == pytest.approx(wiener, rel=1e-3)


def test_diffusive_parameters_drift(jumps):
    model = MarketModel(jumps, WaitingLaw.exponential(0.1), 0.05)
    params = diffusive_parameters(model)
    assert params.vartheta == pytest.approx((3 - 2) / (6 * 10.0))
    assert params.sigma ** 2 == pytest.approx(2 / (6 * 10.0))


@pytest.mark.parametrize("rho", [10.0, 100.0, 1000.0])
def test_exponents_at_rate_in_diffusive_scaling(rho):
    eps = 10.0
    model = risk_neutral_model(JumpLaw(rho, rho - 1.0 + eps), 0.05)
    aux = auxiliaries(model.jumps, waiting_transform(model.waits, 0.05))
    assert aux.alpha == pytest.approx(1.0, abs=1e-8)
    assert aux.beta == pytest.approx(-eps, abs=1e-8)


def test_phi_curve_shape(market):
    model = market.with_spot(0.5)
    curve = phi_curve(model, 0.0, model.x0, "up", [1e-6, 1.0, 10.0, 100.0])
    assert list(curve.columns) == ["t", "phi", "residual", "stehfest", "gap"]
    assert (curve["gap"] < 1e-6).all()
    assert curve["phi"].iloc[0] == pytest.approx(1.0, abs=1e-5)
    assert np.all(np.diff(curve["phi"].to_numpy()) <= 1e-9)
    assert curve["phi"].between(0.0, 1.0).all()


def test_phi_curve_rejects_side(market):
    with pytest.raises(DomainError):
        phi_curve(market, 0.0, 0.0, "left", [1.0])


def test_corridor_curve_decreases(market):
    curve = corridor_curve(market, LN_HALF, LN_TWO, 0.0, [1.0, 5.0, 20.0])
    values = curve["phi"].to_numpy()
    assert np.all(np.diff(values) <= 1e-9)
    assert values[0] <= 1.0


def test_survival_at_is_clamped(market):
    result = survival_at(market, -math.inf, 0.0, LN_HALF, 10.0)
    assert 0.0 <= result.value <= 1.0


def test_survival_at_long_time():
    model = risk_neutral_model(JumpLaw(2.0, 3.0), 0.05, 0.5)
    result = survival_at(model, -math.inf, 0.0, LN_HALF, 100.0)
    assert result.method == "talbot"
    assert result.value == pytest.approx(0.2115253733, abs=1e-9)
    stehfest = survival_at(model, -math.inf, 0.0, LN_HALF, 100.0, method="stehfest")
    assert stehfest.value == pytest.approx(result.value, abs=1e-6)
