"""Exact and Gaussian-beam solutions, in spectral form and in physical space.

Spectral quantities are functions of the offset eta from the incident
component eta0, i.e. the full transform variable is eta0 + eta, and

    u(x, y) = sqrt(k / 2 pi) e^{i k eta0 y} int v(eta, x) A_hat(eta) e^{i k eta y} d eta

where A_hat is the k-scaled transform of the launch envelope. With this
normalization the transform is unitary, so int |u|^2 dy = int |v A_hat|^2 d eta.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .airy import ALPHA, ai_scaled, airy_pair
from .beam import GaussianEnvelope, Incidence, beam_value
from .oscquad import (
    QuadratureResult,
    adaptive_gk15,
    gb_integrand,
    minimal_radius,
    oscillatory_integral,
    regularized_integral,
    select_truncation_radius,
)
from .phase import PhaseContext

DEFAULT_FLOOR = 1e-14


class Route(str, enum.Enum):
    exact = "exact"
    gb_spectral = "gb_spectral"
    gb_physical = "gb_physical"


def turning_point(inc: Incidence, eta):
    """X(eta) = 1 - (eta0 + eta)^2, where the spectral ODE changes type."""
    return 1 - (inc.eta0 + np.asarray(eta, dtype=float)) ** 2


def _airy_quotient(num, den):
    """Ai(num) / Ai(den) through scaled values, safe when both are huge or tiny."""
    sn, zn = ai_scaled(num)
    sd, zd = ai_scaled(den)
    return sn / sd * np.exp(zd - zn)


def _check_x(inc, x):
    if np.any(np.asarray(x) < 0) or np.any(np.asarray(x) > inc.x_c * (1 + 1e-12)):
        raise ValueError(f"x must lie in [0, x_c] = [0, {inc.x_c}]")


def _out(v):
    v = np.asarray(v)
    return complex(v) if v.ndim == 0 else v


def v_hat_exact(inc: Incidence, x, k, eta):
    """conj(alpha) Ai(k^{2/3} (x - X)) / Ai(alpha k^{2/3} X), broadcast over x and eta."""
    _check_x(inc, x)
    if k < 1:
        raise ValueError("k must be >= 1")
    X = turning_point(inc, eta)
    s = k ** (2 / 3)
    return _out(np.conj(ALPHA) * _airy_quotient(s * (np.asarray(x, dtype=float) - X), ALPHA * s * X))


def transmission_coeff(inc: Incidence, k, eta):
    """T(eta) = -alpha Ai(zeta_-(0)) / Ai(zeta_+(0)) with zeta_pm(0) = alpha^{pm 1} k^{2/3} X."""
    X = k ** (2 / 3) * turning_point(inc, eta)
    return _out(-ALPHA * _airy_quotient(np.conj(ALPHA) * X, ALPHA * X))


def one_plus_t(inc: Incidence, k, eta):
    """1 + T(eta) = conj(alpha) Ai(zeta(0)) / Ai(zeta_+(0)), zeta(0) = -k^{2/3} X."""
    X = k ** (2 / 3) * turning_point(inc, eta)
    return _out(np.conj(ALPHA) * _airy_quotient(-X, ALPHA * X))


def transmission_from_derivatives(inc: Incidence, k, eta, h=None):
    """(T_+' - T_0') / (T_0' - T_-') at x = 0 with x-derivatives by central differences.

    T_0, T_+, T_- are Ai(zeta(x)), Ai(zeta_+(x)), Ai(zeta_-(x)) normalized to 1 at x = 0.
    """
    s = k ** (2 / 3)
    h = 1e-6 / s if h is None else h
    X = turning_point(inc, eta)

    def slope(rot):
        f = lambda x: airy_pair(rot * s * (x - X))[0]
        return (f(h) - f(-h)) / (2 * h) / f(0.0)

    d0 = slope(1.0)
    dp = slope(-ALPHA)
    dm = slope(-np.conj(ALPHA))
    return _out((dp - d0) / (d0 - dm))


def p_gb(inc: Incidence, k, eta):
    """2 sqrt(pi xi0) e^{-i pi/4} e^{ik(2/3 xi0^3 - 2 eta eta0 xi0)}."""
    eta = np.asarray(eta, dtype=float)
    xi0 = inc.xi0
    phase = k * ((2 / 3) * xi0**3 - 2 * eta * inc.eta0 * xi0)
    return _out(2 * math.sqrt(math.pi * xi0) * np.exp(-0.25j * math.pi) * np.exp(1j * phase))


def gb_integral(inc: Incidence, x, k, eta, tol=1e-10, mode="bound", c0=None, tail_tol=None) -> QuadratureResult:
    """Regularized spectral integral I(eta, x, k) of the beam superposition.

    mode "bound" uses one truncation radius chosen so that the tail estimate
    is below tail_tol (default tol); mode "doubling" doubles the radius until
    successive values agree to tol.
    """
    _check_x(inc, x)
    ctx = PhaseContext(inc, float(inc.x_c - x) if x < inc.x_c else 0.0, float(eta))
    amp, phase, dphase = gb_integrand(ctx)
    if mode == "bound":
        T = select_truncation_radius(ctx, k, tol if tail_tol is None else tail_tol, c0)
        return oscillatory_integral(amp, phase, k, T, tol, dphase)
    if mode == "doubling":
        return regularized_integral(amp, phase, k, minimal_radius(ctx, c0), tol, dphase).result
    raise ValueError("mode must be 'bound' or 'doubling'")


def v_hat_gb(inc: Incidence, x, k, eta, tol=1e-10, mode="bound", c0=None, tail_tol=None):
    """k^{1/6} P_GB(k, eta) I(eta, x, k); loops over array eta."""
    etas = np.atleast_1d(np.asarray(eta, dtype=float))
    vals = np.array([gb_integral(inc, x, k, e, tol, mode, c0, tail_tol).value for e in etas])
    out = k ** (1 / 6) * np.asarray(p_gb(inc, k, etas)) * vals
    return complex(out[0]) if np.ndim(eta) == 0 else out


@dataclass
class SpectralProfile:
    """Spectral amplitudes v(eta) at fixed x and k on a uniform eta grid."""

    inc: Incidence
    x: float
    k: float
    eta: np.ndarray
    v: np.ndarray
    route: Route
    envelope: GaussianEnvelope = GaussianEnvelope()


@dataclass
class FieldSlice:
    x: float
    k: float
    y: np.ndarray
    u: np.ndarray
    route: Route


def make_eta_grid(k, envelope: GaussianEnvelope, y_span, floor=DEFAULT_FLOOR, refine=1):
    """Uniform grid symmetric about 0 covering |A_hat| >= floor |A_hat(0)|.

    The spacing pi / (k y_span) / refine keeps the aliasing period of the
    trapezoid sum at twice the y window.
    """
    step = math.pi / (k * y_span) / refine
    n = math.ceil(envelope.spectral_halfwidth(k, floor) / step)
    return step * np.arange(-n, n + 1)


def spectral_profile(inc, x, k, eta, route=Route.exact, envelope=GaussianEnvelope(), tol=1e-10, c0=None, tail_tol=None):
    route = Route(route)
    eta = np.asarray(eta, dtype=float)
    if route is Route.exact:
        v = np.asarray(v_hat_exact(inc, x, k, eta))
    elif route is Route.gb_spectral:
        v = np.asarray(v_hat_gb(inc, x, k, eta, tol, c0=c0, tail_tol=tail_tol))
    else:
        raise ValueError("spectral profiles exist only for the exact and gb_spectral routes")
    return SpectralProfile(inc, float(x), float(k), eta, v, route, envelope)


def check_eta_grid(eta, k, envelope, y_span, floor=DEFAULT_FLOOR):
    eta = np.asarray(eta, dtype=float)
    if eta.size < 3:
        raise ValueError("eta grid needs at least 3 points")
    d = np.diff(eta)
    if np.ptp(d) > 1e-9 * abs(d[0]):
        raise ValueError("eta grid must be uniform")
    limit = math.pi / (k * y_span)
    if d[0] > limit * (1 + 1e-12):
        raise ValueError(
            f"eta spacing {d[0]:.3e} exceeds the Nyquist-style limit pi/(k*(y_max-y_min)) = {limit:.3e}"
        )
    ends = np.abs(envelope.hat(eta[[0, -1]], k)) / abs(envelope.hat(0.0, k))
    if np.any(ends > floor):
        raise ValueError(f"eta grid truncates the envelope transform: |A_hat(eta_end)|/|A_hat(0)| = {ends.max():.1e} > {floor:.0e}")


def synthesize_field(profile: SpectralProfile, y_grid, floor=DEFAULT_FLOOR, span=None) -> FieldSlice:
    """Inverse k-scaled transform of v * A_hat by the trapezoid rule.

    span defaults to the extent of y_grid and enters the resolution check.
    """
    y = np.asarray(y_grid, dtype=float)
    span = float(np.ptp(y)) if span is None else span
    check_eta_grid(profile.eta, profile.k, profile.envelope, span, floor)
    k = profile.k
    eta = profile.eta
    w = np.full(eta.size, eta[1] - eta[0])
    w[[0, -1]] *= 0.5
    weighted = profile.v * profile.envelope.hat(eta, k) * w
    kernel = np.exp(1j * k * np.outer(y, eta))
    u = math.sqrt(k / (2 * math.pi)) * np.exp(1j * k * profile.inc.eta0 * y) * (kernel @ weighted)
    return FieldSlice(profile.x, k, y, u, profile.route)


def u_gb_physical(inc: Incidence, x, y, k, tol=1e-10, envelope=GaussianEnvelope()):
    """sqrt(k / 2 pi) int beam_value(x, y, z) dz over the envelope support."""
    ys = np.atleast_1d(np.asarray(y, dtype=float))
    if envelope.amplitude == 0:
        out = np.zeros(ys.shape, complex)
        return complex(out[0]) if np.ndim(y) == 0 else out
    half = envelope.support_halfwidth(1e-17)
    # a panel spans about 1.5 periods of the z-oscillation, whose rate is at most ~3k
    n = max(8, math.ceil(2 * half * 3 * k / (2 * math.pi * 1.5)))
    edges = np.linspace(-half, half, n + 1)
    vals = []
    for yy in ys:
        f = lambda z, yy=yy: beam_value(x, yy, z, inc, k, envelope)
        val, _, _, _ = adaptive_gk15(f, edges, tol)
        vals.append(math.sqrt(k / (2 * math.pi)) * val)
    out = np.array(vals)
    return complex(out[0]) if np.ndim(y) == 0 else out


def residual_regime(inc: Incidence, k) -> float:
    """Largest |eta| admitted by the residual split: xi0^2 k^{-2/3} / 4."""
    return inc.xi0**2 * k ** (-2 / 3) / 4


def residual_terms(inc: Incidence, k, eta, tol=1e-10, c0=None):
    """(R1, R2, R3) at x = x_c, summing to v_hat_exact - v_hat_gb.

    R1 = k^{1/6} P_GB [Ai(k^{2/3}(x - X)) - Ai(k^{2/3}(x - X - eta^2))]
    R2 = k^{1/6} (P - P_GB) Ai(k^{2/3}(x - X))
    R3 = k^{1/6} P_GB [Ai(k^{2/3}(x - X - eta^2)) - I]
    """
    eta = float(eta)
    if abs(eta) > residual_regime(inc, k) * (1 + 1e-12):
        raise ValueError(f"|eta| = {abs(eta)} outside the regime |eta| <= xi0^2 k^(-2/3) / 4")
    x = inc.x_c
    X = float(turning_point(inc, eta))
    s = k ** (2 / 3)
    ai_full = airy_pair(s * (x - X))[0]
    ai_shift = airy_pair(s * (x - X - eta * eta))[0]
    pgb = p_gb(inc, k, eta)
    p_exact = np.conj(ALPHA) * k ** (-1 / 6) / airy_pair(ALPHA * s * X)[0]
    integral = gb_integral(inc, x, k, eta, tol, c0=c0).value
    kk = k ** (1 / 6)
    r1 = kk * pgb * (ai_full - ai_shift)
    r2 = kk * (p_exact - pgb) * ai_full
    r3 = kk * pgb * (ai_shift - integral)
    return complex(r1), complex(r2), complex(r3)
