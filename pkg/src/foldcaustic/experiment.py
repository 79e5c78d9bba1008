"""The k-sweep at the caustic: configuration, per-k errors, rate fits, reports."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .beam import THETA_MAX, THETA_MIN, GaussianEnvelope, make_incidence
from .fields import (
    Route,
    make_eta_grid,
    spectral_profile,
    synthesize_field,
    u_gb_physical,
)

REFINEMENT_LIMIT = 0.01
SPOT_CHECK_LIMIT = 1e-6
WIGGLE = 0.10


@dataclass
class WaveConfig:
    theta: float = math.pi / 3
    sigma: float = 1.0
    k_list: list = field(default_factory=lambda: [100.0, 200.0, 400.0, 800.0, 1600.0])
    y_points: int = 801
    y_halfwidth: float = 8.0  # in units of sigma, centred on the caustic touch point
    eta_floor: float = 1e-14
    quad_tol: float = 1e-10
    tail_tol: float = 1e-10
    seed: int = 0
    threads: int = 1
    spot_check: bool = True
    refinement_check: bool = True
    out_dir: str = "results"

    def __post_init__(self):
        self.k_list = [float(k) for k in self.k_list]
        if len(self.k_list) < 3:
            raise ValueError("k_list needs at least 3 wavenumbers for a rate fit")
        if any(k < 1 for k in self.k_list):
            raise ValueError("wavenumbers must be >= 1")
        if any(b <= a for a, b in zip(self.k_list, self.k_list[1:])):
            raise ValueError("k_list must be strictly increasing")
        if not THETA_MIN <= self.theta <= THETA_MAX:
            raise ValueError(f"theta must lie in [{THETA_MIN}, {THETA_MAX:.6f}]")
        if self.sigma <= 0 or self.y_halfwidth <= 0:
            raise ValueError("sigma and y_halfwidth must be positive")
        if self.y_points < 3:
            raise ValueError("y_points must be >= 3")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "WaveConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "WaveConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def incidence(self):
        return make_incidence(self.theta)

    @property
    def envelope(self):
        return GaussianEnvelope(self.sigma)

    def y_grid(self, refine: int = 1):
        inc = self.incidence
        n = refine * (self.y_points - 1) + 1
        centre = 2 * inc.xi0 * inc.eta0
        return centre + self.sigma * np.linspace(-self.y_halfwidth, self.y_halfwidth, n)


@dataclass
class CausticRecord:
    k: float
    linf_error: float
    max_u_exact: float
    y_at_max_error: float
    runtime: float
    spot_check_error: float | None = None

    @property
    def relative_error(self):
        return self.linf_error / self.max_u_exact


class RateFit(NamedTuple):
    slope: float
    intercept: float
    residual_spread: float


def fit_rate(points: Sequence[tuple[float, float]]) -> RateFit:
    """Least-squares line through (log k, log e).

    residual_spread is the max minus min of the fit residuals in natural log units.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("fit_rate needs at least 3 (k, e) pairs")
    if np.any(pts <= 0):
        raise ValueError("k and e must be positive for a log-log fit")
    lk, le = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(lk, le, 1)
    res = le - (slope * lk + intercept)
    return RateFit(float(slope), float(intercept), float(np.ptp(res)))


def caustic_fields(cfg: WaveConfig, k: float, y_refine: int = 1, eta_refine: int = 1):
    """(y, u_exact, u_gb) on the caustic line x = x_c."""
    inc, env = cfg.incidence, cfg.envelope
    y = cfg.y_grid(y_refine)
    eta = make_eta_grid(k, env, np.ptp(y), cfg.eta_floor, eta_refine)
    exact = synthesize_field(spectral_profile(inc, inc.x_c, k, eta, Route.exact, env), y, cfg.eta_floor)
    gb_prof = spectral_profile(inc, inc.x_c, k, eta, Route.gb_spectral, env, cfg.quad_tol, tail_tol=cfg.tail_tol)
    gb = synthesize_field(gb_prof, y, cfg.eta_floor)
    return y, exact.u, gb.u


def caustic_record(cfg: WaveConfig, k: float) -> CausticRecord:
    start = time.perf_counter()
    y, ue, ug = caustic_fields(cfg, k)
    diff = np.abs(ue - ug)
    i = int(np.argmax(diff))
    spot = None
    if cfg.spot_check:
        inc = cfg.incidence
        phys = u_gb_physical(inc, inc.x_c, y[i], k, cfg.quad_tol, cfg.envelope)
        spot = abs(phys - ug[i])
    return CausticRecord(k, float(diff[i]), float(np.abs(ue).max()), float(y[i]), time.perf_counter() - start, spot)


def linf_error_at_caustic(cfg: WaveConfig, k: float) -> float:
    """max over the y-grid of |u_GB(x_c, y) - u(x_c, y)|."""
    return caustic_record(cfg, k).linf_error


def refinement_change(cfg: WaveConfig, k: float, coarse: float | None = None) -> float:
    """Relative change of the max error when both y and eta grids are refined 2x."""
    if coarse is None:
        coarse = linf_error_at_caustic(cfg, k)
    _, ue, ug = caustic_fields(cfg, k, y_refine=2, eta_refine=2)
    return abs(float(np.abs(ue - ug).max()) - coarse) / coarse


@dataclass
class ConvergenceReport:
    records: list
    fitted_rate: float
    fitted_relative_rate: float
    rate_spread: float
    relative_rate_spread: float
    property_checks: list
    refinement_change: float | None
    config: dict
    hard_failures: list

    @property
    def passed(self):
        return not self.hard_failures

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ConvergenceReport":
        from .checks import PropertyCheck

        data = dict(data)
        data["records"] = [CausticRecord(**r) for r in data["records"]]
        data["property_checks"] = [PropertyCheck(**c) for c in data["property_checks"]]
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ConvergenceReport":
        return cls.from_dict(json.loads(text))


def sweep(cfg: WaveConfig) -> list[CausticRecord]:
    # map keeps k order whatever order the workers finish in
    if cfg.threads == 1:
        return [caustic_record(cfg, k) for k in cfg.k_list]
    with ThreadPoolExecutor(cfg.threads) as pool:
        return list(pool.map(lambda k: caustic_record(cfg, k), cfg.k_list))


def hard_failures(cfg, records, rate, rel_rate, checks, refine) -> list[str]:
    out = []
    if not -1.0 <= rate.slope <= -0.68:
        out.append(f"error slope {rate.slope:.4f} outside [-1.0, -0.68]")
    if not -1.15 <= rel_rate.slope <= -0.85:
        out.append(f"relative error slope {rel_rate.slope:.4f} outside [-1.15, -0.85]")
    for a, b in zip(records, records[1:]):
        if b.linf_error > a.linf_error * (1 + WIGGLE):
            out.append(f"error grows from k={a.k:g} to k={b.k:g}")
    growth = [r.max_u_exact * r.k ** (-1 / 6) for r in records]
    if max(growth) > 2 * min(growth):
        out.append("max|u| k^(-1/6) varies by more than a factor 2")
    for r in records:
        if r.spot_check_error is not None and r.spot_check_error > SPOT_CHECK_LIMIT:
            out.append(f"physical spot check at k={r.k:g} off by {r.spot_check_error:.2e}")
    if refine is not None and refine >= REFINEMENT_LIMIT:
        out.append(f"2x grid refinement changes the max error by {refine:.2%}")
    out.extend(f"check failed: {c.name}" for c in checks if not c.passed)
    return out


def run_experiment(cfg: WaveConfig, write: bool = True, checks: bool = True) -> ConvergenceReport:
    from .checks import run_checks

    records = sweep(cfg)
    rate = fit_rate([(r.k, r.linf_error) for r in records])
    rel_rate = fit_rate([(r.k, r.relative_error) for r in records])
    prop_checks = run_checks(cfg.incidence, seed=cfg.seed) if checks else []
    refine = None
    if cfg.refinement_check:
        last = records[-1]
        refine = refinement_change(cfg, last.k, last.linf_error)
    report = ConvergenceReport(
        records,
        rate.slope,
        rel_rate.slope,
        rate.residual_spread,
        rel_rate.residual_spread,
        prop_checks,
        refine,
        cfg.to_dict(),
        hard_failures(cfg, records, rate, rel_rate, prop_checks, refine),
    )
    if write:
        write_report(report, cfg)
    return report


def write_records_csv(records, path):
    names = [f.name for f in dataclasses.fields(CausticRecord)] + ["relative_error"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in records:
            row = [getattr(r, n) for n in names]
            w.writerow(["" if v is None else repr(float(v)) for v in row])


def read_records_csv(path) -> list[CausticRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        row.pop("relative_error")
        out.append(CausticRecord(**{k: (None if v == "" else float(v)) for k, v in row.items()}))
    return out


def write_complex_csv(path, columns: dict):
    """One column per real array, two (name_re, name_im) per complex array."""
    header, data = [], []
    for name, arr in columns.items():
        arr = np.asarray(arr)
        if np.iscomplexobj(arr):
            header += [f"{name}_re", f"{name}_im"]
            data += [arr.real, arr.imag]
        else:
            header.append(name)
            data.append(arr)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*data):
            w.writerow([repr(float(v)) for v in row])


def read_complex_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
    out = {}
    i = 0
    while i < len(header):
        name = header[i]
        if name.endswith("_re") and i + 1 < len(header) and header[i + 1] == name[:-3] + "_im":
            out[name[:-3]] = body[:, i] + 1j * body[:, i + 1]
            i += 2
        else:
            out[name] = body[:, i]
            i += 1
    return out


def write_report(report: ConvergenceReport, cfg: WaveConfig, plots: bool = True):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    write_records_csv(report.records, out / "errors.csv")
    np.savetxt(out / "error_vs_k.dat", [(r.k, r.linf_error) for r in report.records], fmt="%.17g", header="k linf_error")
    y, ue, ug = caustic_fields(cfg, report.records[0].k)
    np.savetxt(out / "caustic_slice.dat", np.column_stack([y, np.abs(ue), np.abs(ug)]), fmt="%.17g", header="y abs_u_exact abs_u_gb")
    if plots:
        from . import plotting

        plotting.error_plot(report, out / "error_vs_k.png")
        plotting.slice_plot(y, ue, ug, report.records[0].k, out / "caustic_slice.png")
    return out
