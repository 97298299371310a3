"""Figures written next to a sweep's CSV/JSON output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _by_energy(rows):
    groups: dict[float, list] = {}
    for r in rows:
        if r.ok:
            groups.setdefault(r.E, []).append(r)
    return groups


def render_figures(rows, stem: Path) -> list[Path]:
    """log10|t| and -e00 against 1/ħ, plus the unitarity defect; one PNG each."""
    stem = Path(stem)
    groups = _by_energy(rows)
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    for E, rs in sorted(groups.items()):
        ax.plot([1 / r.hbar for r in rs], [r.log10_abs_t for r in rs], "o-", ms=3, label=f"E={E:g}")
    ax.set_xlabel(r"$1/\hbar$")
    ax.set_ylabel(r"$\log_{10}|t|$")
    ax.legend(fontsize=7)
    fig.tight_layout()
    path = stem.with_name(stem.name + "_transmission.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    for E, rs in sorted(groups.items()):
        ax.semilogy([1 / r.hbar for r in rs], [max(-r.e00, 1e-300) for r in rs], "s-", ms=3, label=f"E={E:g}")
    ax.set_xlabel(r"$1/\hbar$")
    ax.set_ylabel(r"$-e(0,0,E;\hbar)$")
    ax.legend(fontsize=7)
    fig.tight_layout()
    path = stem.with_name(stem.name + "_spectral.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6, 4))
    ok = [r for r in rows if r.ok]
    idx = np.arange(len(ok))
    ax.semilogy(idx, [max(r.unitarity_defect, 1e-18) for r in ok], "k.")
    ax.set_xlabel("grid point (E, hbar order)")
    ax.set_ylabel(r"$||t|^2+|r|^2-1|$")
    fig.tight_layout()
    path = stem.with_name(stem.name + "_unitarity.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
