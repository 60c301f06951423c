"""Figures for the ``report`` subcommand (rendered off-screen)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .io import PipelineReport  # noqa: E402

CHEMICAL_ACCURACY = 0.0016


def _save(fig, path: Path, config: Mapping | None) -> Path:
    meta = {"Software": "cspulse"}
    if config is not None:
        meta["Description"] = json.dumps(config, sort_keys=True)
    fig.savefig(path, dpi=120, metadata=meta)
    plt.close(fig)
    return path


def plot_error_curve(reports: Sequence[PipelineReport], path: str | Path, config: Mapping | None = None) -> Path:
    """Absolute error against the number of qubits kept, log scale."""
    pts = sorted((r.n_contextual, r.error) for r in reports if r.error is not None)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    xs = [p[0] for p in pts]
    ys = [max(p[1], 1e-16) for p in pts]
    ax.semilogy(xs, ys, "o-", label=reports[0].name if reports else None)
    ax.axhline(CHEMICAL_ACCURACY, color="gray", ls="--", label="chemical accuracy")
    ax.set_xlabel("qubits in the contextual subspace")
    ax.set_ylabel("|E - E_ref| (Ha)")
    ax.set_xticks(xs)
    ax.legend()
    fig.tight_layout()
    return _save(fig, Path(path), config)


def plot_grouping(report: PipelineReport, path: str | Path, config: Mapping | None = None) -> Path:
    """Term counts against qubit-wise and general commuting group counts, per stage."""
    stages = [s for s in ("original", "tapered", "reduced") if s in (report.groups or {})]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    width = 0.27
    for k, key in enumerate(("terms", "qubitwise", "general")):
        vals = [report.groups[s][key] for s in stages]
        ax.bar([i + (k - 1) * width for i in range(len(stages))], vals, width, label=key)
    ax.set_xticks(range(len(stages)), stages)
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    return _save(fig, Path(path), config)


def plot_convergence(reports: Sequence[PipelineReport], path: str | Path, config: Mapping | None = None) -> Path:
    """Energy per evaluation with its running minimum, one curve per report."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for r in reports:
        if not r.trace:
            continue
        its = [t[0] for t in r.trace]
        es = [r.e_nc + t[1] for t in r.trace]
        best = [min(es[: i + 1]) for i in range(len(es))]
        line, = ax.plot(its, es, alpha=0.3)
        ax.plot(its, best, color=line.get_color(), label=f"{r.n_contextual} qubits")
    ref = next((r.reference_energy for r in reports if r.reference_energy is not None), None)
    if ref is not None:
        ax.axhline(ref, color="gray", ls="--", label="reference")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("energy (Ha)")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    return _save(fig, Path(path), config)
