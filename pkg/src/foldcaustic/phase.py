"""Cubic Airy phase, Gaussian beam phase and related scalar functions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .beam import Incidence, make_incidence, q_poly, sqrt_branch_safe

Z_SERIES_RADIUS = 0.5
Z_SERIES_TERMS = 24


@dataclass(frozen=True)
class PhaseContext:
    """Position relative to the caustic and spectral offset.

    delta = x_c - x is the distance to the caustic, eta the offset from the
    incident spectral component eta0.
    """

    inc: Incidence
    delta: float
    eta: float

    def __post_init__(self):
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"delta = {self.delta} outside [0, 1]")

    @property
    def linear_coeff(self):
        return self.delta - 2 * self.inc.eta0 * self.eta


def phi_a(ctx: PhaseContext, theta):
    theta = np.asarray(theta, dtype=float)
    # factored form keeps the phase exactly odd in floating point
    out = theta * (ctx.linear_coeff - theta * theta / 3)
    return float(out) if out.ndim == 0 else out


def m11_derivatives(s, inc: Incidence, n: int):
    """[m11, m11', ..., m11^{(n)}] at s, from q * m11 = (2i - (xi0 + s) beta) / 2."""
    s = np.asarray(s, dtype=float)
    beta = inc.beta
    q = q_poly(s, inc)
    dq = 2j - 2 * s * beta
    ddq = -2 * beta
    rhs = [(2j - (inc.xi0 + s) * beta) / 2, -beta / 2 + 0 * s]
    out = []
    for j in range(n + 1):
        val = rhs[j] if j < 2 else 0.0
        if j >= 1:
            val = val - j * dq * out[j - 1]
        if j >= 2:
            val = val - math.comb(j, 2) * ddq * out[j - 2]
        out.append(val / q)
    return out


def _bump_derivatives(theta, delta, n):
    g = [
        (theta**2 - delta) ** 2,
        4 * theta**3 - 4 * delta * theta,
        12 * theta**2 - 4 * delta,
        24 * theta,
        24 + 0 * theta,
    ]
    return g[: n + 1]


def phi_g(ctx: PhaseContext, theta):
    """phi_a + m11(xi0 + theta) (theta^2 - delta)^2 / 2."""
    theta = np.asarray(theta, dtype=float)
    inc = ctx.inc
    s = inc.xi0 + theta
    m = m11_derivatives(s, inc, 0)[0]
    # Im m11 = eta0^2 / |q|^2 exactly; the quotient loses it to cancellation at large s
    m = m.real + 1j * inc.eta0**2 / np.abs(q_poly(s, inc)) ** 2
    out = phi_a(ctx, theta) + 0.5 * m * (theta**2 - ctx.delta) ** 2
    return complex(out) if np.ndim(out) == 0 else out


def phi_derivative(ctx: PhaseContext, theta, n: int, which: str = "airy"):
    """n-th theta-derivative (0 <= n <= 4) of the Airy or beam phase."""
    if not 0 <= n <= 4:
        raise ValueError("derivative order must be in 0..4")
    if which not in ("airy", "beam"):
        raise ValueError("which must be 'airy' or 'beam'")
    theta = np.asarray(theta, dtype=float)
    airy = [
        -(theta**3) / 3 + theta * ctx.linear_coeff,
        -(theta**2) + ctx.linear_coeff,
        -2 * theta,
        -2 + 0 * theta,
        0 * theta,
    ][n]
    if which == "airy":
        return float(airy) if np.ndim(airy) == 0 else airy
    m = m11_derivatives(ctx.inc.xi0 + theta, ctx.inc, n)
    g = _bump_derivatives(theta, ctx.delta, n)
    corr = sum(math.comb(n, j) * m[n - j] * g[j] for j in range(n + 1))
    out = airy + 0.5 * corr
    return complex(out) if np.ndim(out) == 0 else out


def spectral_amplitude(inc: Incidence, theta):
    """sqrt(q(xi0)) / (2 pi sqrt(q(xi0 + theta))), both roots branch-safe."""
    theta = np.asarray(theta, dtype=float)
    top = sqrt_branch_safe(q_poly(inc.xi0, inc), inc)
    out = top / (2 * np.pi * np.asarray(sqrt_branch_safe(q_poly(inc.xi0 + theta, inc), inc)))
    return complex(out) if np.ndim(out) == 0 else out


def z_remainder(z):
    """Z(z) = (e^{iz} - 1 - iz + z^2/2) / z^3, with a power series near 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < Z_SERIES_RADIUS
    out = np.empty_like(z)
    zs = z[small]
    acc = np.zeros_like(zs)
    term = np.full_like(zs, (1j) ** 3 / 6)
    for m in range(Z_SERIES_TERMS):
        acc += term
        term = term * 1j * zs / (m + 4)
    out[small] = acc
    zb = z[~small]
    out[~small] = (np.exp(1j * zb) - 1 - 1j * zb + zb * zb / 2) / zb**3
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _c0_cached(theta, eta_max, delta_steps):
    inc = make_incidence(theta)
    extent = 4 * (1 + math.sqrt(eta_max)) + 20
    thetas = np.arange(-extent, extent + 1e-9, 0.005)
    etas = np.concatenate([-np.geomspace(eta_max, 1e-3, 80), [0.0], np.geomspace(1e-3, eta_max, 80)])
    floor = thetas[:, None] ** 2 / 16
    scale = 1 + np.sqrt(np.abs(etas))
    worst = 0.0
    for delta in np.linspace(0, 1, delta_steps):
        ctx = PhaseContext(inc, float(delta), 0.0)
        airy = phi_derivative(ctx, thetas, 1, "airy")[:, None] - 2 * inc.eta0 * etas[None, :]
        # the beam correction to phi' does not depend on eta
        corr = (phi_derivative(ctx, thetas, 1, "beam") - phi_derivative(ctx, thetas, 1, "airy"))[:, None]
        for d1 in (np.abs(airy), np.abs(airy + corr)):
            bad = d1 < floor
            reach = np.where(bad, np.abs(thetas)[:, None], 0.0).max(axis=0)
            worst = max(worst, float((reach / scale).max()))
    return worst


def calibrate_c0(inc: Incidence, eta_max=16.0, delta_steps=11):
    """Smallest c on a dense grid with |phi'| >= theta^2/16 for |theta| >= c (1 + |eta|^{1/2}).

    Both the Airy and the beam phase are scanned over delta in [0, 1] and
    |eta| <= eta_max. The constant creeps up slowly with eta_max (the beam
    phase behaves like -theta^2/4 - 2 eta0 eta for large theta), so callers
    working at larger |eta| should pass a larger eta_max. The grid spacing in
    theta is 0.005, which is added as a margin to the returned value.
    """
    return _c0_cached(float(inc.theta), float(eta_max), int(delta_steps)) + 0.005
