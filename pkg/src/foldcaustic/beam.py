"""Closed-form Gaussian beams for the refractive index n(x)^2 = 1 - x.

Beams are launched from the line x = 0 at height z in direction
(xi0, eta0) = (cos theta, sin theta). With arclength-like parameter s the
central ray is x(s) = 2 s xi0 - s^2, y(s) = z + 2 s eta0; it turns at
s = xi0, x = x_c = xi0^2, which is the caustic of the beam family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

THETA_MIN = 0.1
THETA_MAX = math.pi / 2 - 0.1


@dataclass(frozen=True)
class Incidence:
    """Incidence angle and the quantities derived from it.

    Attributes
    ----------
    theta : float
        Angle between the incoming direction and the x-axis.
    xi0, eta0 : float
        cos(theta) and sin(theta).
    beta : complex
        1 + 2i xi0.
    x_c : float
        Caustic abscissa xi0**2.
    """

    theta: float
    xi0: float
    eta0: float
    beta: complex
    x_c: float


def make_incidence(theta, lo=THETA_MIN, hi=THETA_MAX) -> Incidence:
    theta = float(theta)
    if not (0 < lo <= hi < math.pi / 2):
        raise ValueError("admissible interval must lie inside (0, pi/2)")
    if not (lo <= theta <= hi):
        raise ValueError(f"incidence angle {theta} outside [{lo}, {hi}]")
    xi0 = math.cos(theta)
    eta0 = math.sin(theta)
    return Incidence(theta, xi0, eta0, complex(1.0, 2.0 * xi0), xi0 * xi0)


@dataclass(frozen=True)
class GaussianEnvelope:
    """Launch amplitude A(y) = amplitude * exp(-y^2 / (2 sigma^2))."""

    sigma: float = 1.0
    amplitude: float = 1.0

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return self.amplitude * np.exp(-0.5 * (y / self.sigma) ** 2)

    def hat(self, eta, k):
        """k-scaled Fourier transform sqrt(k/2pi) * int A(y) exp(-i k y eta) dy."""
        eta = np.asarray(eta, dtype=float)
        return self.amplitude * self.sigma * math.sqrt(k) * np.exp(-0.5 * (k * eta * self.sigma) ** 2)

    def support_halfwidth(self, floor=1e-14):
        return self.sigma * math.sqrt(2 * math.log(1 / floor))

    def spectral_halfwidth(self, k, floor=1e-14):
        return math.sqrt(2 * math.log(1 / floor)) / (k * self.sigma)


def _scalar(out):
    out = np.asarray(out)
    return complex(out) if out.ndim == 0 else out


def ray_x(s, inc):
    return 2 * s * inc.xi0 - s * s


def ray_y(s, z, inc):
    return z + 2 * s * inc.eta0


def ray_xi(s, inc):
    return inc.xi0 - s


def ref_phase(s, z, inc):
    """Real phase S(s; z) along the central ray."""
    return inc.eta0 * z + 2 * s - 2 * s * s * inc.xi0 + (2.0 / 3.0) * s**3


def q_poly(s, inc):
    s = np.asarray(s)
    return _scalar(1 + 2j * s - s * s * inc.beta)


def sqrt_branch_safe(w, inc):
    """Square root with its cut along {-t beta : t >= 0}.

    Computed as sqrt(w conj(beta)) / sqrt(conj(beta)) with principal roots, so
    that s -> sqrt(q(s)) is continuous for real s.
    """
    w = np.asarray(w, dtype=complex)
    bc = np.conj(inc.beta)
    rot = w * bc
    on_cut = (rot.real <= 0) & (np.abs(rot.imag) <= 1e-14 * np.abs(rot))
    if np.any(on_cut & (w != 0)):
        raise ValueError("argument lies on the excluded ray {-t beta : t >= 0}")
    return _scalar(np.sqrt(rot) / np.sqrt(bc))


def m11(s, inc):
    s = np.asarray(s)
    return _scalar((2j - (inc.xi0 + s) * inc.beta) / (2 * q_poly(s, inc)))


def m22(s, inc):
    s = np.asarray(s)
    return _scalar((inc.xi0 - s) * inc.beta / (2 * q_poly(s, inc)))


def m12(s, inc):
    s = np.asarray(s)
    return _scalar(-inc.eta0 * inc.beta / (2 * q_poly(s, inc)) + 0 * s)


def initial_hessian(inc):
    """M(0) = Q + iP for the incoming plane-wave direction."""
    xi0, eta0 = inc.xi0, inc.eta0
    Pm = np.array([[eta0**2, -eta0 * xi0], [-eta0 * xi0, xi0**2]])
    Qm = 0.5 * np.array([[-xi0, -eta0], [-eta0, xi0]])
    return Qm + 1j * Pm


def hessian(s, inc):
    """Full 2x2 Hessian M(s) = (M(0) - s beta I / 2) / q(s); shape (..., 2, 2)."""
    s = np.asarray(s, dtype=float)
    m0 = initial_hessian(inc)
    q = np.asarray(q_poly(s, inc))
    return (m0 - 0.5 * s[..., None, None] * inc.beta * np.eye(2)) / q[..., None, None]


def beam_amplitude(s, z, inc, envelope=GaussianEnvelope()):
    """a(s; z) = A(z) sqrt(-i m22(0)) / sqrt(q(s))."""
    c = np.sqrt(-1j * inc.xi0 * inc.beta / 2)
    return envelope(z) * c / sqrt_branch_safe(q_poly(s, inc), inc)


def beam_phase(x, y, z, inc):
    """Complex phase of one beam at (x, y), with s* = (y - z) / (2 eta0)."""
    s = (np.asarray(y) - np.asarray(z)) / (2 * inc.eta0)
    dx = x - ray_x(s, inc)
    return ref_phase(s, z, inc) + dx * ray_xi(s, inc) + 0.5 * m11(s, inc) * dx * dx


def beam_value(x, y, z, inc, k, envelope=GaussianEnvelope()):
    """Single beam launched at height z, evaluated at (x, y)."""
    s = (np.asarray(y) - np.asarray(z)) / (2 * inc.eta0)
    return _scalar(beam_amplitude(s, z, inc, envelope) * np.exp(1j * k * beam_phase(x, y, z, inc)))


@dataclass(frozen=True)
class BeamFrame:
    """Beam parameters at one (s, z).

    Attributes
    ----------
    gamma : tuple
        Central ray position (x(s), y(s; z)).
    p : tuple
        Momentum (xi(s), eta0).
    S : float
        Real reference phase.
    q_val, m11, m22, a : complex
        Spreading factor, Hessian entries and amplitude.
    """

    s: float
    z: float
    gamma: tuple
    p: tuple
    S: float
    q_val: complex
    m11: complex
    m22: complex
    a: complex


def beam_frame(s, z, inc, envelope=GaussianEnvelope()) -> BeamFrame:
    s = float(s)
    z = float(z)
    return BeamFrame(
        s=s,
        z=z,
        gamma=(ray_x(s, inc), ray_y(s, z, inc)),
        p=(ray_xi(s, inc), inc.eta0),
        S=ref_phase(s, z, inc),
        q_val=q_poly(s, inc),
        m11=m11(s, inc),
        m22=m22(s, inc),
        a=complex(beam_amplitude(s, z, inc, envelope)),
    )
