"""Smooth cutoffs and adaptive quadrature for oscillatory integrals.

The integrals have the form

    k^{1/3} * int psi(theta / T) amp(theta) exp(i k phase(theta)) dtheta

with Im phase >= 0. They are evaluated on the real axis with Gauss-Kronrod
(7, 15) panels whose width follows the local oscillation period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .phase import PhaseContext, calibrate_c0, phi_derivative, phi_g, spectral_amplitude

# QUADPACK qk15 abscissae and weights (nonnegative half, center last)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]

PERIODS_PER_PANEL = 1.5
PREGRID_POINTS = 4097
PRUNE_FRACTION = 0.01
CHUNK_PANELS = 20000
MAX_ROUNDS = 40
MAX_PANELS = 4_000_000
STALL_RATIO = 0.5


def _bump_exp(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def cutoff_psi(x):
    """Even C-infinity cutoff: 1 on |x| <= 1, 0 on |x| >= 2."""
    ax = np.abs(np.asarray(x, dtype=float))
    a = _bump_exp(2 - ax)
    b = _bump_exp(ax - 1)
    out = np.where(ax <= 1, 1.0, np.where(ax >= 2, 0.0, a / np.where(a + b > 0, a + b, 1.0)))
    return float(out) if out.ndim == 0 else out


def smoothstep_cutoff(x):
    """Quintic smoothstep cutoff with the same plateau and support (C^2 only)."""
    ax = np.abs(np.asarray(x, dtype=float))
    s = np.clip(ax - 1, 0.0, 1.0)
    out = 1 - s**3 * (10 - 15 * s + 6 * s * s)
    return float(out) if out.ndim == 0 else out


@dataclass
class QuadratureResult:
    """Value of a truncated oscillatory integral with its error budget.

    est_error = quad_error + pruned_bound + tail_error; the last term bounds
    the distance to the untruncated (regularized) integral.
    """

    value: complex
    est_error: float
    n_evals: int
    truncation_radius: float
    quad_error: float = 0.0
    tail_error: float = 0.0
    pruned_bound: float = 0.0
    n_panels: int = 0


class QuadratureError(RuntimeError):
    def __init__(self, message, partial: QuadratureResult | None = None):
        super().__init__(message)
        self.partial = partial


class StationaryPointError(ValueError):
    pass


def gk15_panels(f, a, b):
    """Kronrod value and |Kronrod - Gauss| for each panel [a_i, b_i]."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    t = c[:, None] + h[:, None] * NODES[None, :]
    fv = np.asarray(f(t), dtype=complex)
    kr = h * (fv @ KRONROD_WEIGHTS)
    ga = h * (fv @ GAUSS_WEIGHTS)
    return kr, np.abs(kr - ga)


def adaptive_gk15(f, edges, tol, max_rounds=MAX_ROUNDS, max_panels=MAX_PANELS):
    """Integrate f over consecutive panels [edges[i], edges[i+1]] (or a pair of arrays).

    Each round all pending panels are evaluated. If the summed |K - G| of
    accepted and pending panels is within tol, everything is accepted.
    Otherwise the panels with the smallest errors are accepted up to half of
    the remaining budget and the others are bisected. A bisection that does not
    at least halve the error of its parent is taken as rounding-limited and
    both halves are accepted, so the returned error can exceed tol when tol is
    below the rounding floor.
    Returns (value, error, n_evals, n_panels).
    """
    if isinstance(edges, tuple):
        a, b = (np.asarray(e, dtype=float) for e in edges)
    else:
        edges = np.asarray(edges, dtype=float)
        a, b = edges[:-1], edges[1:]
    acc_a, acc_v, acc_e = [], [], []
    used = 0.0
    n_evals = 0
    v = e = np.zeros(0)
    ok = np.zeros(0, bool)
    parent_err = None
    for _ in range(max_rounds):
        if a.size == 0 or a.size > max_panels:
            break
        parts = [gk15_panels(f, a[lo:lo + CHUNK_PANELS], b[lo:lo + CHUNK_PANELS]) for lo in range(0, a.size, CHUNK_PANELS)]
        v = np.concatenate([p[0] for p in parts])
        e = np.concatenate([p[1] for p in parts])
        noise = np.zeros(a.size, bool)
        if parent_err is not None:
            half = parent_err.size
            stuck = e[:half] + e[half:] >= STALL_RATIO * parent_err
            noise[:half] = noise[half:] = stuck
        n_evals += 15 * a.size
        if used + float(np.sum(e)) <= tol:
            ok = np.ones(a.size, bool)
        else:
            order = np.argsort(e, kind="stable")
            n_ok = int(np.searchsorted(np.cumsum(e[order]), 0.5 * max(tol - used, 0.0), side="right"))
            ok = noise.copy()
            ok[order[:n_ok]] = True
        acc_a.append(a[ok])
        acc_v.append(v[ok])
        acc_e.append(e[ok])
        used += float(np.sum(e[ok]))
        mid = 0.5 * (a[~ok] + b[~ok])
        parent_err = e[~ok]
        a, b = np.concatenate([a[~ok], mid]), np.concatenate([mid, b[~ok]])
    pa = np.concatenate(acc_a) if acc_a else np.zeros(0)
    order = np.argsort(pa, kind="stable")
    vals = np.concatenate(acc_v)[order] if acc_v else np.zeros(0, complex)
    value = complex(math.fsum(vals.real), math.fsum(vals.imag))
    if a.size:
        # unfinished panels contribute their last Kronrod values
        partial = QuadratureResult(value + complex(np.sum(v[~ok])), used + float(np.sum(e[~ok])), n_evals, float("nan"))
        raise QuadratureError(f"adaptive quadrature did not converge: {a.size} panels left", partial)
    return value, used, n_evals, int(pa.size)


def _numeric_derivative(phase):
    def d(theta):
        theta = np.asarray(theta, dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(theta))
        return (np.asarray(phase(theta + h)) - np.asarray(phase(theta - h))) / (2 * h)

    return d


def _plan_panels(amp, phase, k, T, tol, cutoff):
    """Oscillation-aware panels on [-2T, 2T] with negligible cells removed.

    Returns (a, b, pruned_bound).
    """
    grid = np.linspace(-2 * T, 2 * T, PREGRID_POINTS)
    ph = np.asarray(phase(grid), dtype=complex)
    env = np.abs(np.asarray(amp(grid))) * cutoff(grid / T) * np.exp(-k * np.maximum(ph.imag, 0.0))
    freq = k * np.abs(np.gradient(ph.real, grid))
    width = np.diff(grid)
    cell_freq = 1.2 * np.maximum(freq[:-1], freq[1:])
    scale = k ** (1 / 3)
    cell_bound = 2 * scale * np.maximum(env[:-1], env[1:]) * width
    order = np.argsort(cell_bound, kind="stable")
    cum = np.cumsum(cell_bound[order])
    n_drop = int(np.searchsorted(cum, PRUNE_FRACTION * tol, side="right"))
    drop = np.zeros(width.size, bool)
    drop[order[:n_drop]] = True
    pruned = float(cum[n_drop - 1]) if n_drop else 0.0
    live = np.flatnonzero(~drop)
    n_sub = np.maximum(1, np.ceil(width[live] * cell_freq[live] / (2 * np.pi * PERIODS_PER_PANEL))).astype(int)
    starts = np.repeat(grid[live], n_sub)
    steps = np.repeat(width[live] / n_sub, n_sub)
    offs = np.arange(n_sub.sum()) - np.repeat(np.cumsum(n_sub) - n_sub, n_sub)
    a = starts + offs * steps
    return a, a + steps, pruned


def tail_bound(amp, phase, k, T, dphase=None, cutoff=cutoff_psi):
    """Integration-by-parts estimate of |k^{1/3} int (1 - psi(theta/T)) amp e^{ik phase}|.

    One and two integrations by parts are both evaluated numerically on
    |theta| >= T and the smaller result is returned. Both are estimates, not
    rigorous bounds: derivatives are taken on a sampling grid and the
    remainder past the grid is approximated by the last value.
    """
    dphase = dphase or _numeric_derivative(phase)
    half = np.concatenate([np.linspace(T, 2 * T, 801), np.geomspace(2 * T, 2000 * T, 1201)[1:]])
    one = two = 0.0
    for theta in (half, -half):
        d1 = np.asarray(dphase(theta), dtype=complex)
        damp = np.exp(-k * np.maximum(np.asarray(phase(theta), dtype=complex).imag, 0.0))
        g = (1 - cutoff(theta / T)) * np.asarray(amp(theta)) / d1
        h = np.gradient(g, theta) / d1
        cell_damp = np.maximum(damp[:-1], damp[1:])
        one += float(np.sum(np.abs(np.diff(g)) * cell_damp) + abs(g[-1]) * damp[-1]) / k
        two += float(np.sum(np.abs(np.diff(h)) * cell_damp) + abs(h[-1]) * damp[-1]) / k**2
    return k ** (1 / 3) * min(one, two)


def oscillatory_integral(amp, phase, k, T, tol, dphase=None, cutoff=cutoff_psi) -> QuadratureResult:
    """k^{1/3} int cutoff(theta / T) amp(theta) exp(i k phase(theta)) dtheta."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if T <= 0 or tol <= 0:
        raise ValueError("radius and tolerance must be positive")
    scale = k ** (1 / 3)

    def f(theta):
        return scale * cutoff(theta / T) * np.asarray(amp(theta)) * np.exp(1j * k * np.asarray(phase(theta)))

    a, b, pruned = _plan_panels(amp, phase, k, T, tol, cutoff)
    try:
        value, err, n_evals, n_panels = adaptive_gk15(f, (a, b), 0.5 * tol)
    except QuadratureError as exc:
        exc.partial.truncation_radius = T
        raise
    tail = tail_bound(amp, phase, k, T, dphase, cutoff)
    return QuadratureResult(
        value=value,
        est_error=err + pruned + tail,
        n_evals=n_evals,
        truncation_radius=T,
        quad_error=err,
        tail_error=tail,
        pruned_bound=pruned,
        n_panels=n_panels,
    )


def gb_integrand(ctx: PhaseContext):
    """(amp, phase, dphase) of the Gaussian-beam spectral integral."""
    inc = ctx.inc
    return (
        lambda t: spectral_amplitude(inc, t),
        lambda t: phi_g(ctx, t),
        lambda t: phi_derivative(ctx, t, 1, "beam"),
    )


def minimal_radius(ctx: PhaseContext, c0: float | None = None) -> float:
    c0 = calibrate_c0(ctx.inc) if c0 is None else c0
    return 2 * c0 * (1 + math.sqrt(abs(ctx.eta)))


def damping_bound(ctx: PhaseContext, k, T) -> float:
    """exp(-k inf_{|theta| >= T} Im phi_g), with the infimum taken on a sampling grid."""
    half = np.concatenate([np.linspace(T, 10 * T, 2000), np.geomspace(10 * T, 1e4 * T, 400)])
    im = np.imag(phi_g(ctx, np.concatenate([half, -half])))
    return math.exp(-k * float(im.min()))


def select_truncation_radius(ctx: PhaseContext, k, tol, c0: float | None = None, max_doublings=10) -> float:
    """Smallest T = T_min 2^j whose tail estimate falls below tol.

    T_min = 2 c0 (1 + |eta|^{1/2}). The tail estimate already carries the
    Gaussian damping exp(-k Im phi_g). A pure damping bound is not used as a
    stopping rule: Im phi_g tends to eta0^2 / (2 |beta|^2) for large theta, so
    exp(-k inf Im phi_g) has a floor independent of T.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    amp, phase, dphase = gb_integrand(ctx)
    T = minimal_radius(ctx, c0)
    for _ in range(max_doublings):
        if tail_bound(amp, phase, k, T, dphase) < tol:
            break
        T *= 2
    return T


@dataclass
class RegularizedResult:
    result: QuadratureResult
    history: list = field(default_factory=list)


def regularized_integral(amp, phase, k, T0, tol, dphase=None, max_doublings=10, cutoff=cutoff_psi) -> RegularizedResult:
    """Double T from T0 until consecutive values differ by less than tol.

    Raises QuadratureError after max_doublings doublings.
    """
    prev = oscillatory_integral(amp, phase, k, T0, tol, dphase, cutoff)
    history = [prev]
    T = T0
    for _ in range(max_doublings):
        T *= 2
        cur = oscillatory_integral(amp, phase, k, T, tol, dphase, cutoff)
        history.append(cur)
        if abs(cur.value - prev.value) < tol:
            cur.est_error = max(cur.est_error, abs(cur.value - prev.value))
            return RegularizedResult(cur, history)
        prev = cur
    raise QuadratureError(f"no convergence after {max_doublings} doublings of T", history[-1])


def doubling_sequence(amp, phase, k, T0, tol, count=3, dphase=None, cutoff=cutoff_psi) -> list:
    """Results at T0, 2 T0, ..., 2^count T0."""
    return [oscillatory_integral(amp, phase, k, T0 * 2**j, tol, dphase, cutoff) for j in range(count + 1)]


def _cheb(fn, deg, window):
    # drop trailing coefficients at rounding level; they only feed noise into derivatives
    c = np.polynomial.Chebyshev.interpolate(fn, deg, domain=list(window))
    mag = np.abs(c.coef)
    tail = np.maximum.accumulate(mag[::-1])[::-1]
    keep = int(np.argmax(tail <= 1e-13 * mag.max())) or mag.size
    return c.cutdeg(max(keep - 1, 1))


def _check_window(phase, window, deg):
    lo, hi = window
    d1 = _cheb(lambda t: np.real(phase(t)), deg, window).deriv()
    t = np.linspace(lo, hi, 4 * deg + 1)
    vals = d1(t)
    if np.any(np.sign(vals[:-1]) != np.sign(vals[1:])) or np.min(np.abs(vals)) < 1e-8 * max(1.0, np.max(np.abs(vals))):
        raise StationaryPointError(f"phase derivative vanishes in window [{lo}, {hi}]")
    return d1


def ibp_operator(amp, phase, window, deg=600):
    """Chebyshev approximations of amp, L[amp] = (amp / phase')' and L[L[amp]]."""
    lo, hi = window
    dphi = _check_window(phase, window, deg)
    a = _cheb(amp, deg, window)
    l1 = _cheb(lambda t: a(t) / dphi(t), deg, window).deriv()
    l2 = _cheb(lambda t: l1(t) / dphi(t), deg, window).deriv()
    return a, l1, l2, dphi


def second_ibp_explicit(amp, phase, window, deg=600):
    """L[L[a]] written out: a''/p'^2 - 3 a' p''/p'^3 + a (3 p''^2/p'^4 - p'''/p'^3)."""
    lo, hi = window
    dphi = _check_window(phase, window, deg)
    a = _cheb(amp, deg, window)
    p1, p2, p3 = dphi, dphi.deriv(), dphi.deriv(2)
    a1, a2 = a.deriv(), a.deriv(2)

    def out(t):
        d = p1(t)
        return a2(t) / d**2 - 3 * a1(t) * p2(t) / d**3 + a(t) * (3 * p2(t) ** 2 / d**4 - p3(t) / d**3)

    return out


def nonstat_phase_check(amp, phase, k, window, orders=(1, 2), tol=1e-13, deg=600) -> float:
    """Largest |int a e^{ik phase} - (i/k)^n int L^n[a] e^{ik phase}| over n in orders.

    amp must vanish with its derivatives at the window ends, and the phase
    must have no stationary point inside.
    """
    lo, hi = window
    a, l1, l2, _ = ibp_operator(amp, phase, window, deg)
    ops = {0: a, 1: l1, 2: l2}
    edges = np.linspace(lo, hi, 65)

    def integral(fn):
        val, _, _, _ = adaptive_gk15(lambda t: fn(t) * np.exp(1j * k * np.asarray(phase(t))), edges, tol)
        return val

    base = integral(lambda t: np.asarray(amp(t)))
    worst = 0.0
    for n in orders:
        if n not in ops or n == 0:
            raise ValueError("orders must be drawn from {1, 2}")
        rhs = (1j / k) ** n * integral(ops[n])
        worst = max(worst, abs(base - rhs))
    return worst
