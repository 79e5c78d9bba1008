"""Airy function Ai and its derivative for complex arguments.

Evaluation is split by region of the complex plane:

* small |z|: the two-series Maclaurin solution anchored at Ai(0), Ai'(0);
* large |z|, |arg z| <= 2π/3: the Poincaré asymptotic series;
* large |z|, |arg z| > 2π/3: the rotation identity
  Ai(z) = α Ai(-αz) + ᾱ Ai(-ᾱz) with α = exp(iπ/3), which maps both
  terms back into the asymptotic sector;
* the annulus in between: Taylor stepping along the ray arg z = const,
  started from whichever end is numerically stable (inward from the
  asymptotic circle where Ai decays, outward from the Maclaurin disk
  where it grows or oscillates).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679841
ALPHA = np.exp(1j * np.pi / 3)

MACLAURIN_RADIUS = 3.0
MACLAURIN_RADIUS_GROWING = 5.0
ASYMPTOTIC_RADIUS = 10.0
ASYMPTOTIC_TERMS = 16
MACLAURIN_TERMS = 40
TAYLOR_TERMS = 30
_EXP_LIMIT = 700.0


class AiryMethod(enum.Enum):
    MACLAURIN = "maclaurin"
    ASYMPTOTIC = "asymptotic"
    ROTATED = "rotated"
    STEPPED = "stepped"


_METHODS = list(AiryMethod)


@dataclass(frozen=True)
class AiryValue:
    """Ai and Ai' at one point, tagged with the branch that produced them."""

    z: complex
    ai: complex
    ai_prime: complex
    method: AiryMethod

    @property
    def overflow(self):
        return not (np.isfinite(self.ai) and np.isfinite(self.ai_prime))


@lru_cache(maxsize=None)
def _asymptotic_coeffs(n):
    u = [1.0]
    v = [1.0]
    for j in range(1, n):
        u.append(u[-1] * (6 * j - 5) * (6 * j - 3) * (6 * j - 1) / ((2 * j - 1) * 216 * j))
        v.append(-(6 * j + 1) / (6 * j - 1) * u[-1])
    return np.array(u), np.array(v)


def _maclaurin(z):
    z3 = z**3
    tf = np.ones_like(z)
    tg = z.copy()
    tfp = z * z / 2
    tgp = np.ones_like(z)
    f, g, fp, gp = tf.copy(), tg.copy(), tfp.copy(), tgp.copy()
    for j in range(1, MACLAURIN_TERMS):
        tf = tf * z3 / ((3 * j - 1) * (3 * j))
        tg = tg * z3 / ((3 * j) * (3 * j + 1))
        tgp = tgp * z3 / ((3 * j) * (3 * j - 2))
        f += tf
        g += tg
        gp += tgp
        if j > 1:
            tfp = tfp * z3 / ((3 * j - 1) * 3 * (j - 1))
            fp += tfp
    return AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp


def _asymptotic(z):
    u, v = _asymptotic_coeffs(ASYMPTOTIC_TERMS)
    # z * sqrt(z) rounds better than z**1.5, which goes through exp(1.5 log z)
    zeta = (2.0 / 3.0) * z * np.sqrt(z)
    w = np.ones_like(z)
    su = np.zeros_like(z)
    sv = np.zeros_like(z)
    inv = -1.0 / zeta
    for j in range(ASYMPTOTIC_TERMS):
        su += u[j] * w
        sv += v[j] * w
        w = w * inv
    growth = -zeta.real
    big = growth > _EXP_LIMIT
    e = np.exp(np.where(big, 0.0, -zeta.real) - 1j * zeta.imag) / (2 * np.sqrt(np.pi))
    root = np.sqrt(np.sqrt(z))
    val = e * su / root
    der = -e * sv * root
    if np.any(big):
        warnings.warn("Airy evaluation overflowed; returning signed infinities", RuntimeWarning, stacklevel=3)
        val = np.where(big, _signed_inf(val), val)
        der = np.where(big, _signed_inf(der), der)
    return val, der


def _signed_inf(w):
    return np.copysign(np.inf, w.real) + 1j * np.copysign(np.inf, w.imag)


def _taylor_walk(c, y, yp, h, nsteps):
    # Integrate y'' = z y from c by nsteps steps of h using the local power series.
    for _ in range(nsteps):
        a = [y, yp, c * y / 2]
        val = y + yp * h + a[2] * h * h
        der = yp + 2 * a[2] * h
        hp = h * h
        for n in range(3, TAYLOR_TERMS):
            an = (c * a[n - 2] + a[n - 3]) / (n * (n - 1))
            a.append(an)
            der = der + n * an * hp
            hp = hp * h
            val = val + an * hp
        y, yp, c = val, der, c + h
    return y, yp


def _airy_core(z):
    """Vectorized evaluation; returns (ai, ai_prime, method_index)."""
    r = np.abs(z)
    ang = np.abs(np.angle(z))
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    method = np.empty(z.shape, dtype=np.int8)

    mac = (r <= MACLAURIN_RADIUS) | ((r <= MACLAURIN_RADIUS_GROWING) & (ang >= np.pi / 3))
    asym = (r >= ASYMPTOTIC_RADIUS) & (ang <= 2 * np.pi / 3)
    rot = (r >= ASYMPTOTIC_RADIUS) & ~asym
    step = ~(mac | asym | rot)

    if mac.any():
        ai[mac], aip[mac] = _maclaurin(z[mac])
        method[mac] = 0
    if asym.any():
        ai[asym], aip[asym] = _asymptotic(z[asym])
        method[asym] = 1
    if rot.any():
        zr = z[rot]
        a1, d1 = _asymptotic(-ALPHA * zr)
        a2, d2 = _asymptotic(-np.conj(ALPHA) * zr)
        ai[rot] = ALPHA * a1 + np.conj(ALPHA) * a2
        aip[rot] = -(ALPHA**2) * d1 - np.conj(ALPHA) ** 2 * d2
        method[rot] = 2
    if step.any():
        zs = z[step]
        unit = np.exp(1j * np.angle(zs))
        inward = np.abs(np.angle(zs)) < np.pi / 3
        start = np.where(inward, ASYMPTOTIC_RADIUS, MACLAURIN_RADIUS_GROWING) * unit
        y0 = np.empty_like(zs)
        y1 = np.empty_like(zs)
        if inward.any():
            y0[inward], y1[inward] = _asymptotic(start[inward])
        if (~inward).any():
            y0[~inward], y1[~inward] = _maclaurin(start[~inward])
        nsteps = 16
        h = (zs - start) / nsteps
        ai[step], aip[step] = _taylor_walk(start, y0, y1, h, nsteps)
        method[step] = 3
    return ai, aip, method


def _prepare(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Airy argument must be finite")
    return arr


def airy_pair(z):
    """Return (Ai(z), Ai'(z)) elementwise for scalar or array input."""
    arr = _prepare(z)
    flat = np.atleast_1d(arr).ravel()
    ai, aip, _ = _airy_core(flat)
    if arr.ndim == 0:
        return complex(ai[0]), complex(aip[0])
    return ai.reshape(arr.shape), aip.reshape(arr.shape)


def ai(z):
    return airy_pair(z)[0]


def ai_prime(z):
    return airy_pair(z)[1]


def airy_value(z) -> AiryValue:
    arr = _prepare(z)
    if arr.ndim != 0:
        raise ValueError("airy_value takes a scalar argument")
    a, d, m = _airy_core(arr.reshape(1))
    return AiryValue(complex(arr), complex(a[0]), complex(d[0]), _METHODS[int(m[0])])


def ai_tilde(z):
    """Leading-order surrogate exp(-2/3 z^{3/2}) / (2 sqrt(pi) z^{1/4})."""
    arr = np.asarray(z, dtype=complex)
    if np.any(arr == 0):
        raise ValueError("ai_tilde is singular at z = 0")
    out = 0.5 / np.sqrt(np.pi) * arr**-0.25 * np.exp(-(2.0 / 3.0) * arr**1.5)
    return complex(out) if arr.ndim == 0 else out


def ai_scaled(z):
    """Return (Ai(z) exp(zeta), zeta) with zeta = 2/3 z^{3/2} on the principal branch.

    Quotients of Airy values whose moduli are far outside the float range
    can then be formed as ratios of scaled values times exp(zeta2 - zeta1).
    For |z| >= 10 and |arg z| <= 2π/3 the scaled value is the asymptotic
    sum itself; elsewhere it is Ai(z) exp(zeta), which stays finite as long
    as |z| < 10 or the point lies off the growing sector.
    """
    arr = _prepare(z)
    flat = np.atleast_1d(arr).ravel()
    zeta = (2.0 / 3.0) * flat * np.sqrt(flat)
    out = np.empty_like(flat)
    asym = (np.abs(flat) >= ASYMPTOTIC_RADIUS) & (np.abs(np.angle(flat)) <= 2 * np.pi / 3 + 1e-12)
    if asym.any():
        za = flat[asym]
        u, _ = _asymptotic_coeffs(ASYMPTOTIC_TERMS)
        inv = -1.0 / zeta[asym]
        w = np.ones_like(za)
        su = np.zeros_like(za)
        for j in range(ASYMPTOTIC_TERMS):
            su += u[j] * w
            w = w * inv
        out[asym] = su / (2 * np.sqrt(np.pi) * np.sqrt(np.sqrt(za)))
    if (~asym).any():
        rest, _, _ = _airy_core(flat[~asym])
        out[~asym] = rest * np.exp(zeta[~asym])
    if arr.ndim == 0:
        return complex(out[0]), complex(zeta[0])
    return out.reshape(arr.shape), zeta.reshape(arr.shape)


@dataclass(frozen=True)
class AiryDerivativePolys:
    """Polynomials with Ai^{(m)}(x) = p_m(x) Ai(x) + q_m(x) Ai'(x).

    Coefficients are stored lowest degree first.
    """

    order: int
    p_coeffs: tuple
    q_coeffs: tuple

    def p(self, x):
        return P.polyval(x, self.p_coeffs)

    def q(self, x):
        return P.polyval(x, self.q_coeffs)


@lru_cache(maxsize=None)
def airy_derivative_polys(m: int) -> AiryDerivativePolys:
    if m < 0:
        raise ValueError("derivative order must be nonnegative")
    p = np.array([1.0])
    q = np.array([0.0])
    for _ in range(m):
        p, q = P.polyadd(P.polyder(p), P.polymulx(q)), P.polyadd(p, P.polyder(q))
        p, q = P.polytrim(p), P.polytrim(q)
    return AiryDerivativePolys(m, tuple(float(c) for c in p), tuple(float(c) for c in q))


def ai_nth_derivative(z, m: int):
    polys = airy_derivative_polys(m)
    a, d = airy_pair(z)
    out = polys.p(np.asarray(z, dtype=complex)) * a + polys.q(np.asarray(z, dtype=complex)) * d
    return complex(out) if np.ndim(out) == 0 else out
