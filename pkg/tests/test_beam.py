import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foldcaustic.beam import (
    GaussianEnvelope,
    beam_amplitude,
    beam_frame,
    beam_value,
    hessian,
    m11,
    m12,
    m22,
    make_incidence,
    q_poly,
    ray_x,
    ray_xi,
    ref_phase,
    sqrt_branch_safe,
)

INC = make_incidence(math.pi / 3)
thetas = st.floats(0.1, math.pi / 2 - 0.1)


def test_incidence_at_sixty_degrees():
    assert INC.xi0 == pytest.approx(0.5, abs=1e-15)
    assert INC.eta0 == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    assert INC.x_c == pytest.approx(0.25, abs=1e-15)
    assert INC.beta == complex(1, 2 * INC.xi0)


def test_incidence_with_eta0_three_quarters():
    inc = make_incidence(math.asin(0.75))
    assert inc.eta0 == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("theta", [0.05, 0.0, math.pi / 2, 1.5])
def test_rejects_degenerate_angles(theta):
    with pytest.raises(ValueError):
        make_incidence(theta)


@given(thetas)
def test_incidence_invariants(theta):
    inc = make_incidence(theta)
    assert abs(inc.xi0**2 + inc.eta0**2 - 1) < 1e-15
    assert 0 < inc.xi0 < 1 and 0 < inc.eta0 < 1
    assert inc.x_c == inc.xi0 * inc.xi0


def test_q_identities():
    assert q_poly(0.0, INC) == 1
    inc = make_incidence(math.acos(0.6))
    assert q_poly(0.6, inc) == pytest.approx(0.64 + 0.768j, abs=1e-15)
    val = q_poly(inc.xi0, inc)
    ref = inc.eta0**2 * inc.beta
    assert abs(val - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("xi0", [0.2, 0.5, 0.8])
def test_q_sandwich(xi0):
    inc = make_incidence(math.acos(xi0))
    theta = np.linspace(-50, 50, 20001)
    ratio = np.abs(q_poly(xi0 + theta, inc)) / (1 + theta**2)
    assert ratio.min() > 0
    assert math.log10(ratio.max() / ratio.min()) < 1


def test_branch_safe_root_on_positive_reals():
    assert sqrt_branch_safe(1.0, INC) == pytest.approx(1.0, abs=1e-15)
    assert sqrt_branch_safe(4.0, INC) == pytest.approx(2.0, abs=1e-15)


def test_branch_safe_root_is_continuous_where_principal_jumps():
    s = np.arange(0, 3 + 1e-12, 1e-3)
    q = q_poly(s, INC)
    safe = sqrt_branch_safe(q, INC)
    assert np.allclose(safe**2, q, rtol=1e-13, atol=0)
    local = np.abs(np.diff(q)) / np.maximum(np.abs(safe[:-1]), 1e-300)
    assert np.all(np.abs(np.diff(safe)) <= 10 * local)
    principal = np.sqrt(q)
    jump = np.argmax(np.abs(np.diff(principal)))
    assert abs(s[jump] - 1 / INC.xi0) < 2e-3
    assert np.abs(np.diff(principal))[jump] > 1.0


def test_branch_safe_root_rejects_excluded_ray():
    with pytest.raises(ValueError):
        sqrt_branch_safe(-2.0 * INC.beta, INC)


@pytest.mark.parametrize("s", [0.0, 0.3, 1.0, 5.0])
def test_imaginary_part_of_m11(s):
    inc = make_incidence(math.acos(0.6))
    ref = inc.eta0**2 / abs(q_poly(s, inc)) ** 2
    assert abs(m11(s, inc).imag - ref) <= 1e-13 * ref


def test_m11_at_turning_point():
    inc = make_incidence(math.acos(0.6))
    val = m11(0.6, inc)
    assert val == pytest.approx((-0.6 + 0.28j) / (0.64 + 0.768j), rel=1e-14)
    assert val.imag == pytest.approx(0.64 / 0.999424, rel=1e-12)


def test_m22_values():
    assert m22(INC.xi0, INC) == 0
    assert m22(0.0, INC) == pytest.approx(INC.xi0 * INC.beta / 2, rel=1e-15)


@settings(max_examples=200)
@given(thetas, st.floats(-100, 100))
def test_im_m11_positive(theta, s):
    assert m11(s, make_incidence(theta)).imag > 0


def test_ray_turns_at_caustic():
    h = 1e-6
    dx = (ray_x(INC.xi0 + h, INC) - ray_x(INC.xi0 - h, INC)) / (2 * h)
    assert abs(dx) < 1e-9
    assert ray_x(INC.xi0, INC) == pytest.approx(INC.x_c, abs=1e-15)
    assert ray_xi(INC.xi0, INC) == 0


@pytest.mark.parametrize("s", [-0.7, 0.0, 0.3, 0.5, 1.2, 3.0])
def test_riccati_equation(s):
    h = 1e-4
    dm = (hessian(s + h, INC) - hessian(s - h, INC)) / (2 * h)
    mm = hessian(s, INC)
    assert np.max(np.abs(dm + 2 * mm @ mm)) <= 1e-6
    assert abs(mm[0, 0] - m11(s, INC)) < 1e-15
    assert abs(mm[1, 1] - m22(s, INC)) < 1e-15
    assert abs(mm[0, 1] - m12(s, INC)) < 1e-15


@pytest.mark.parametrize("s", [-0.7, 0.0, 0.3, 0.5, 1.2, 3.0])
def test_trace_identity(s):
    h = 1e-5
    dlog = (np.log(q_poly(s + h, INC)) - np.log(q_poly(s - h, INC))) / (2 * h)
    assert abs(dlog - 2 * np.trace(hessian(s, INC))) <= 1e-8


def test_eikonal_as_polynomials():
    # dS/ds = 2 (1 - x(s)); compare polynomial coefficients in s
    s = np.linspace(-3, 3, 7)
    ds = np.polyder(np.polyfit(s, ref_phase(s, 0.0, INC), 3))
    rhs = np.polyfit(s, 2 * (1 - ray_x(s, INC)), 2)
    assert np.allclose(ds, rhs, atol=1e-12)


def test_beam_at_launch_point():
    env = GaussianEnvelope(1.0)
    for z in [-1.0, 0.0, 0.4]:
        k = 37.0
        ref = env(z) * np.sqrt(-1j * m22(0.0, INC)) * np.exp(1j * k * INC.eta0 * z)
        assert beam_value(0.0, z, z, INC, k) == pytest.approx(complex(ref), rel=1e-14)


def test_beam_modulus_along_central_ray():
    z, k = 0.3, 50.0
    s = np.linspace(-1, 3, 41)
    x = ray_x(s, INC)
    y = z + 2 * s * INC.eta0
    vals = np.abs(beam_value(x, y, z, INC, k)) * np.abs(q_poly(s, INC)) ** 0.5
    assert np.ptp(vals) <= 1e-12 * vals.max()


def test_beam_gaussian_profile_across_ray():
    z, k, s = 0.0, 200.0, 0.3
    y = z + 2 * s * INC.eta0
    x0 = ray_x(s, INC)
    dx = np.linspace(-0.2, 0.2, 9)
    ratio = np.abs(beam_value(x0 + dx, y, z, INC, k)) / abs(beam_value(x0, y, z, INC, k))
    width = 1 / math.sqrt(k * m11(s, INC).imag)
    assert np.allclose(ratio, np.exp(-0.5 * (dx / width) ** 2), rtol=1e-12)


def test_beam_frame_consistency():
    fr = beam_frame(0.4, -0.2, INC)
    assert fr.gamma == (ray_x(0.4, INC), -0.2 + 0.8 * INC.eta0)
    assert fr.p[1] == INC.eta0
    assert fr.a == beam_amplitude(0.4, -0.2, INC)
    assert abs(fr.a) * abs(fr.q_val) ** 0.5 == pytest.approx(abs(beam_amplitude(0.0, -0.2, INC)), rel=1e-14)


def test_envelope_transform_matches_quadrature():
    env = GaussianEnvelope(0.7)
    k = 20.0
    y = np.linspace(-12, 12, 8001)
    for eta in [0.0, 0.05, -0.11]:
        num = np.sqrt(k / (2 * np.pi)) * np.trapezoid(env(y) * np.exp(-1j * k * y * eta), y)
        assert abs(num - env.hat(eta, k)) < 1e-12
