"""Figure rendering for the report-producing CLI paths.

All functions write a file and return its path; rendering uses the Agg
backend so it works headless.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .enumeration import CountProfile
from .randomlab import ChernoffReport, ExponentFit, predicted_b


def plot_b_curve(fits: Sequence[ExponentFit], d: int, path: str) -> str:
    """Piecewise predicted exponent b(a) with fitted slopes overlaid."""
    fig, ax = plt.subplots(figsize=(6, 4))
    a_grid = np.linspace(-d + 1e-3, 0, 400)
    ax.plot(a_grid, [predicted_b(a, d) for a in a_grid], "k-", label="predicted b(a)")
    if fits:
        a_vals = [f.a for f in fits]
        b_vals = [f.b_hat for f in fits]
        errs = [f.stderr for f in fits]
        ax.errorbar(a_vals, b_vals, yerr=errs, fmt="o", color="tab:red", capsize=3,
                    label="fitted slope")
    for knot in (-2 * d / 3, -d / 3):
        ax.axvline(knot, color="gray", ls=":", lw=0.8)
    ax.set_xlabel("a  (p = n^a)")
    ax.set_ylabel("b")
    ax.set_title(f"Exponent of max Sidon subset size, d={d}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_count_profile(profile: CountProfile, path: str) -> str:
    """Bar chart of counts by size, with a log-scale axis."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ts = list(range(len(profile.counts)))
    ax.bar(ts, profile.counts, color="tab:blue")
    if max(profile.counts) > 50:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("number of Sidon sets of size t")
    ax.set_title(f"n={profile.g.n}, d={profile.g.d}: total {profile.total}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_chernoff(reports: Sequence[ChernoffReport], path: str) -> str:
    """Empirical deviation frequency vs the Chernoff ceiling, per config."""
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = np.arange(len(reports))
    ax.plot(xs, [max(r.empirical_rate, 1e-12) for r in reports], "o", label="empirical")
    ax.plot(xs, [max(r.ceiling, 1e-12) for r in reports], "s--", label="ceiling")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(
        [f"λ={r.lam:g}\np={r.p:g}" for r in reports], fontsize=7
    )
    ax.set_ylabel("P[ | |R| - E | >= λE ]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
