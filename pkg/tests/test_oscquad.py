import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import airy

from foldcaustic.beam import make_incidence
from foldcaustic.oscquad import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureError,
    StationaryPointError,
    adaptive_gk15,
    cutoff_psi,
    damping_bound,
    doubling_sequence,
    gb_integrand,
    ibp_operator,
    minimal_radius,
    nonstat_phase_check,
    oscillatory_integral,
    regularized_integral,
    second_ibp_explicit,
    select_truncation_radius,
    smoothstep_cutoff,
    tail_bound,
)
from foldcaustic.phase import PhaseContext, calibrate_c0

INC = make_incidence(math.pi / 3)
K = 100.0


def airy_phase(rho, k=K):
    lin = -rho / k ** (2 / 3)
    return (lambda t: -(t**3) / 3 + t * lin), (lambda t: -(t**2) + lin)


def power_amp(p):
    return lambda t: np.asarray(t, dtype=float) ** p + 0j


def airy_reference(rho, p, k=K):
    ai, aip, _, _ = airy(rho)
    deriv = [ai, aip, rho * ai][p]
    return 2 * np.pi * 1j**p * k ** (-p / 3) * deriv


def bump(t):
    t = np.asarray(t, dtype=float)
    u = (t - 2) * (4 - t)
    out = np.zeros_like(t)
    out[u > 0] = np.exp(-1 / u[u > 0])
    return out


def test_kronrod_tables():
    assert np.allclose(NODES, -NODES[::-1], atol=0)
    assert math.fsum(KRONROD_WEIGHTS) == pytest.approx(2.0, abs=1e-15)
    assert math.fsum(GAUSS_WEIGHTS) == pytest.approx(2.0, abs=1e-15)
    x, w = np.polynomial.legendre.leggauss(7)
    used = GAUSS_WEIGHTS > 0
    assert np.allclose(np.sort(NODES[used]), np.sort(x), atol=1e-15)
    assert np.allclose(GAUSS_WEIGHTS[used][np.argsort(NODES[used])], w[np.argsort(x)], atol=1e-15)


def test_kronrod_polynomial_exactness():
    for n in range(23):
        exact = 0.0 if n % 2 else 2.0 / (n + 1)
        assert abs(NODES**n @ KRONROD_WEIGHTS - exact) < 1e-14
        if n <= 13:
            assert abs(NODES**n @ GAUSS_WEIGHTS - exact) < 1e-14
    assert abs(NODES**14 @ GAUSS_WEIGHTS - 2 / 15) > 1e-6


def test_cutoff_examples():
    assert cutoff_psi(0.5) == 1.0
    assert cutoff_psi(3.0) == 0.0
    assert cutoff_psi(1.5) == pytest.approx(0.5, abs=1e-15)
    assert smoothstep_cutoff(1.5) == pytest.approx(0.5, abs=1e-15)


@given(st.floats(-5, 5))
def test_cutoffs_even_and_bounded(x):
    for psi in (cutoff_psi, smoothstep_cutoff):
        assert psi(-x) == psi(x)
        assert 0.0 <= psi(x) <= 1.0
        if 1 < abs(x) < 2:
            assert 0.0 < psi(x) < 1.0


def test_cutoff_decreasing_on_transition():
    x = np.linspace(1, 2, 1001)
    assert np.all(np.diff(cutoff_psi(x)) <= 0)


def test_adaptive_rule_on_smooth_integrand():
    val, err, n, _ = adaptive_gk15(lambda t: np.exp(30j * t), np.linspace(0, 1, 3), 1e-12)
    exact = (np.exp(30j) - 1) / 30j
    assert abs(val - exact) < 1e-13
    assert err <= 1e-12 and n > 0


def test_adaptive_rule_failure_carries_partial_result():
    with pytest.raises(QuadratureError) as info:
        adaptive_gk15(lambda t: np.exp(2000j * t**2), np.array([0.0, 1.0]), 1e-14, max_rounds=2)
    assert info.value.partial is not None
    assert np.isfinite(info.value.partial.value)


@pytest.mark.parametrize("rho", [-0.5, 0.0, 0.4])
@pytest.mark.parametrize("p", [0, 1, 2])
def test_moment_integrals_give_airy_derivatives(rho, p):
    phase, dphase = airy_phase(rho)
    res = oscillatory_integral(power_amp(p), phase, K, 5.0, 1e-9, dphase)
    assert abs(res.value - airy_reference(rho, p)) <= 1e-6
    assert res.est_error == pytest.approx(res.quad_error + res.tail_error + res.pruned_bound)


def test_doubling_changes_less_than_tail_estimate():
    phase, dphase = airy_phase(0.2)
    r0 = oscillatory_integral(power_amp(0), phase, K, 5.0, 1e-10, dphase)
    r1 = oscillatory_integral(power_amp(0), phase, K, 10.0, 1e-10, dphase)
    assert abs(r1.value - r0.value) < r0.est_error


def test_halving_tol_never_increases_error():
    # tolerances stay above the rounding floor of about 1e-12
    phase, dphase = airy_phase(0.3)
    ref = airy_reference(0.3, 0)
    errs = []
    for tol in [1e-4 / 2**j for j in range(0, 20, 3)]:
        res = oscillatory_integral(power_amp(0), phase, K, 5.0, tol, dphase)
        errs.append(abs(res.value - ref))
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_cutoff_shape_independence():
    ctx = PhaseContext(INC, 0.1, 0.02)
    amp, phase, dphase = gb_integrand(ctx)
    T = 4 * minimal_radius(ctx)
    r1 = oscillatory_integral(amp, phase, K, T, 1e-10, dphase, cutoff_psi)
    r2 = oscillatory_integral(amp, phase, K, T, 1e-10, dphase, smoothstep_cutoff)
    assert abs(r1.value - r2.value) < r1.est_error + r2.est_error


def test_cutoff_shape_independence_for_airy_moment():
    phase, dphase = airy_phase(-0.3)
    r1 = oscillatory_integral(power_amp(0), phase, K, 10.0, 1e-10, dphase, cutoff_psi)
    r2 = oscillatory_integral(power_amp(0), phase, K, 10.0, 1e-10, dphase, smoothstep_cutoff)
    assert abs(r1.value - r2.value) < r1.est_error + r2.est_error


@pytest.mark.parametrize("eta,k", [(0.0, 50.0), (0.03, 100.0), (-0.05, 200.0)])
def test_successive_doublings_are_cauchy(eta, k):
    ctx = PhaseContext(INC, 0.0, eta)
    amp, phase, dphase = gb_integrand(ctx)
    seq = doubling_sequence(amp, phase, k, minimal_radius(ctx), 1e-10, 3, dphase)
    for a, b in zip(seq, seq[1:]):
        assert abs(a.value - b.value) < a.est_error + b.est_error


def test_regularized_integral_stops_when_doublings_agree():
    phase, dphase = airy_phase(0.1)
    out = regularized_integral(power_amp(0), phase, K, 5.0, 1e-8, dphase)
    assert len(out.history) >= 2
    assert abs(out.result.value - airy_reference(0.1, 0)) < 1e-8


def test_regularized_integral_fails_explicitly():
    phase, dphase = airy_phase(0.1)
    with pytest.raises(QuadratureError):
        regularized_integral(power_amp(2), phase, K, 1.0, 1e-16, dphase, max_doublings=1)


def test_results_are_bit_reproducible():
    ctx = PhaseContext(INC, 0.2, -0.01)
    amp, phase, dphase = gb_integrand(ctx)
    r1 = oscillatory_integral(amp, phase, K, 6.0, 1e-10, dphase)
    r2 = oscillatory_integral(amp, phase, K, 6.0, 1e-10, dphase)
    assert r1.value == r2.value and r1.est_error == r2.est_error


def test_truncation_radius_floor():
    c0 = calibrate_c0(INC)
    for eta in (0.0, 0.3, -1.0):
        ctx = PhaseContext(INC, 0.0, eta)
        T = select_truncation_radius(ctx, K, 1e-10)
        assert T >= 2 * c0 * (1 + math.sqrt(abs(eta)))


def test_truncation_radius_meets_tail_tolerance():
    ctx = PhaseContext(INC, 0.25, 0.4)
    amp, phase, dphase = gb_integrand(ctx)
    T = select_truncation_radius(ctx, 10.0, 1e-10)
    assert tail_bound(amp, phase, 10.0, T, dphase) < 1e-10


def test_truncation_radius_shrinks_with_k():
    ctx = PhaseContext(INC, 0.0, 2.0)
    radii = [select_truncation_radius(ctx, k, 1e-12) for k in (2.0, 10.0, 100.0, 1000.0)]
    assert all(b <= a for a, b in zip(radii, radii[1:]))


@pytest.mark.xfail(strict=True, reason="Im phi_g tends to eta0^2/(2|beta|^2) = 0.1875, so exp(-100 inf Im phi_g) >= 7e-9 for every T")
def test_damping_bound_example_at_k100():
    ctx = PhaseContext(INC, 0.0, 0.0)
    T = select_truncation_radius(ctx, 100.0, 1e-10)
    assert damping_bound(ctx, 100.0, T) < 1e-10


def test_damping_floor_value():
    ctx = PhaseContext(INC, 0.0, 0.0)
    limit = INC.eta0**2 / (2 * abs(INC.beta) ** 2)
    assert limit == pytest.approx(0.1875, abs=1e-15)
    assert damping_bound(ctx, 100.0, 50.0) == pytest.approx(math.exp(-100 * limit), rel=1e-3)


@pytest.mark.parametrize("n", [1, 2])
def test_non_stationary_identity(n):
    phase = lambda t: -np.asarray(t) ** 3 / 3
    assert nonstat_phase_check(bump, phase, 50.0, (2.0, 4.0), orders=(n,)) < 1e-8


def test_second_operator_is_first_applied_twice():
    phase = lambda t: -np.asarray(t) ** 3 / 3
    _, _, l2, _ = ibp_operator(bump, phase, (2.0, 4.0))
    ex = second_ibp_explicit(bump, phase, (2.0, 4.0))
    t = np.linspace(2, 4, 1001)
    assert np.max(np.abs(l2(t) - ex(t))) < 1e-6 * np.max(np.abs(l2(t)))


def test_stationary_point_rejected():
    phase = lambda t: -np.asarray(t) ** 3 / 3
    with pytest.raises(StationaryPointError):
        nonstat_phase_check(lambda t: np.exp(-np.asarray(t) ** 2 * 20), phase, 50.0, (-1.0, 1.0))
