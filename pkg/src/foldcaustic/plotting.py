"""PNG figures for a finished sweep, drawn off-screen with the Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def error_plot(report, path):
    k = np.array([r.k for r in report.records])
    err = np.array([r.linf_error for r in report.records])
    rel = np.array([r.relative_error for r in report.records])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(k, err, "o-", label=f"max error (slope {report.fitted_rate:.3f})")
    ax.loglog(k, rel, "s-", label=f"relative (slope {report.fitted_relative_rate:.3f})")
    ax.loglog(k, err[0] * (k / k[0]) ** (-5 / 6), "k--", lw=0.8, label=r"$k^{-5/6}$")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\|u_{GB} - u\|_\infty$ at $x_c$")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def slice_plot(y, u_exact, u_gb, k, path):
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(5, 4.5), sharex=True)
    top.plot(y, np.abs(u_exact), label="exact")
    top.plot(y, np.abs(u_gb), "--", label="beam sum")
    top.set_ylabel("|u|")
    top.set_title(f"caustic line, k = {k:g}", fontsize=9)
    top.legend(frameon=False, fontsize=8)
    bottom.semilogy(y, np.abs(u_exact - u_gb))
    bottom.set_xlabel("y")
    bottom.set_ylabel("|difference|")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def field_plot(y, u, k, x, path):
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(y, u.real, lw=0.6, label="Re u")
    ax.plot(y, np.abs(u), label="|u|")
    ax.set_xlabel("y")
    ax.set_title(f"x = {x:g}, k = {k:g}", fontsize=9)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
