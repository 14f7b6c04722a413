"""Randomized experiments and constant plots: CSV tables and SVG figures.

Trial ``i`` of a run with seed ``s`` draws its configuration from
``split_seed(s, i)``.  This means any trial can be replayed on its own and
the output does not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bounds import bound_report, c_rho, c_tilde
from .errors import PreconditionError, SolverError
from .nodes import (
    NodeSet,
    gen_compare_bdgy,
    gen_compare_lili,
    gen_one_pair,
    gen_pairwise,
    separation_stats,
    split_seed,
)
from .spectral import MODES, spectral_summary

TRIAL_KINDS = ("one-pair", "pairwise", "compare-bdgy", "compare-lili")
FIGURE_KINDS = ("fig-crho", "fig-ctilde")
KINDS = TRIAL_KINDS + FIGURE_KINDS

CSV_HEADER = (
    "trial", "seed", "M", "N", "tau", "rho", "c", "sigma_min", "sigma_max", "cond",
    "lb_exact", "lb_simple", "ub_onepair", "ub_pairwise", "ub_bdgy", "ub_lili", "flags",
)
BOUND_COLUMNS = {
    "lb_exact": ("lower_cond_exact",),
    "lb_simple": ("lower_cond_simple",),
    "ub_onepair": ("onepair_cond",),
    "ub_pairwise": ("pairwise_cond", "pairwise_c1_cond"),
    "ub_bdgy": ("bdgy",),
    "ub_lili": ("lili_thm1",),
}

DEFAULT_CTILDE_PANELS = ((4, 1.0), (4, math.sqrt(2.0)), (64, 1.0))
CRHO_RANGE = (5.0, 50.0)
CTILDE_TAU_RANGE = (0.0, 0.5)
CTILDE_RHO_RANGE = (2.0, 150.0)


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    M: Optional[int] = None
    c: float = 2.0
    trials: int = 100
    seed: int = 0
    mode: str = "gram-dd"
    workers: Optional[int] = None
    resolution: Optional[int] = None  # figure grids only
    panels: Sequence[tuple[int, float]] = DEFAULT_CTILDE_PANELS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown experiment kind {self.kind!r}, expected one of {KINDS}")
        if self.trials < 1:
            raise PreconditionError(f"trials must be >= 1, got {self.trials}")
        if self.mode not in MODES:
            raise PreconditionError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if not 0 <= self.seed < 2 ** 64:
            raise PreconditionError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        M = self.M
        if self.kind == "one-pair" and (M is None or M < 3):
            raise PreconditionError(f"one-pair experiment needs M >= 3, got {M}")
        if self.kind in ("pairwise", "compare-lili") and (M is None or M < 4 or M % 2):
            raise PreconditionError(f"{self.kind} experiment needs even M >= 4, got {M}")
        if self.kind == "pairwise" and not self.c >= 1.0:
            raise PreconditionError(f"uniformity constant must be >= 1, got {self.c}")
        if self.resolution is not None and self.resolution < 2:
            raise PreconditionError(f"grid resolution must be >= 2, got {self.resolution}")

    def generate(self, seed: int) -> NodeSet:
        if self.kind == "one-pair":
            return gen_one_pair(self.M, seed)
        if self.kind == "pairwise":
            return gen_pairwise(self.M, self.c, seed)
        if self.kind == "compare-bdgy":
            return gen_compare_bdgy(seed)
        if self.kind == "compare-lili":
            return gen_compare_lili(self.M, seed)
        raise PreconditionError(f"{self.kind} has no node generator")

    @property
    def config_kind(self) -> str:
        return "pairwise" if self.kind in ("pairwise", "compare-lili") else "one-pair"

    @property
    def comparisons(self) -> tuple[str, ...]:
        return {"compare-bdgy": ("bdgy",), "compare-lili": ("lili_thm1", "lili_thm2")}.get(self.kind, ())

    @property
    def label(self) -> str:
        return self.kind if self.M is None or self.kind == "compare-bdgy" else f"{self.kind}-M{self.M}"


@dataclass
class TrialRecord:
    trial: int
    seed: int
    M: int
    N: int
    tau: float
    rho: float
    c: float
    sigma_min: float
    sigma_max: float
    cond: float
    bounds: dict[str, Optional[float]] = field(default_factory=dict)
    flags: tuple[str, ...] = ()
    wall_time: float = 0.0
    error: Optional[str] = None

    @property
    def pinv_normalized(self) -> float:
        """``||A^+|| tau sqrt(N)``, the quantity of the comparison figures."""
        return self.tau * math.sqrt(self.N) / self.sigma_min


def run_trial(spec: ExperimentSpec, index: int) -> TrialRecord:
    start = time.perf_counter()
    seed = split_seed(spec.seed, index)
    ns = spec.generate(seed)
    st = separation_stats(ns, ns.pairing)
    report = bound_report(
        ns.N, ns.M, st.tau, rho=st.rho, c=st.c, kind=spec.config_kind, gap=st.min_gap,
        comparisons=spec.comparisons,
    )
    bounds: dict[str, Optional[float]] = {}
    for col, names in BOUND_COLUMNS.items():
        bounds[col] = next((report.get(n).value for n in names if n in report), None)
    flags = tuple(e.name for e in report.applicable())
    error = None
    try:
        s = spectral_summary(ns, spec.mode)
        smin, smax, cond = float(s.sigma_min), float(s.sigma_max), float(s.cond)
    except SolverError as exc:
        smin = smax = cond = math.nan
        error = str(exc)
        flags = flags + ("solver_error",)
    return TrialRecord(
        trial=index, seed=seed, M=ns.M, N=ns.N, tau=st.tau, rho=st.rho, c=st.c,
        sigma_min=smin, sigma_max=smax, cond=cond, bounds=bounds, flags=flags,
        wall_time=time.perf_counter() - start, error=error,
    )


def _run_chunk(args):
    spec, indices = args
    return [run_trial(spec, i) for i in indices]


def run(spec: ExperimentSpec) -> list[TrialRecord]:
    """All trials of a node experiment, ordered by trial index."""
    if spec.kind not in TRIAL_KINDS:
        raise PreconditionError(f"{spec.kind} is a figure kind; use run_figure")
    workers = spec.workers or os.cpu_count() or 1
    workers = max(1, min(workers, spec.trials))
    if workers == 1:
        return [run_trial(spec, i) for i in range(spec.trials)]
    chunks = [(spec, list(range(w, spec.trials, workers))) for w in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        records = [r for part in pool.map(_run_chunk, chunks) for r in part]
    return sorted(records, key=lambda r: r.trial)


# ---------------------------------------------------------------------------
# constant figures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    rho: float
    value: float


@dataclass(frozen=True)
class GridPanel:
    M: int
    c: float
    tau: np.ndarray
    rho: np.ndarray
    values: np.ndarray  # shape (len(rho), len(tau)), negatives clamped to zero


def crho_curve(points: int = 200) -> list[CurvePoint]:
    return [CurvePoint(float(r), c_rho(float(r))) for r in np.linspace(*CRHO_RANGE, points)]


def ctilde_panel(M: int, c: float, resolution: int = 100) -> GridPanel:
    taus = np.linspace(*CTILDE_TAU_RANGE, resolution)
    rhos = np.linspace(*CTILDE_RHO_RANGE, resolution)
    vals = np.array([[max(c_tilde(float(t), float(r), c, M), 0.0) for t in taus] for r in rhos])
    return GridPanel(M, c, taus, rhos, vals)


def run_figure(spec: ExperimentSpec):
    if spec.kind == "fig-crho":
        return crho_curve(spec.resolution or 200)
    if spec.kind == "fig-ctilde":
        panels = [(spec.M, spec.c)] if spec.M is not None else list(spec.panels)
        return [ctilde_panel(M, c, spec.resolution or 100) for M, c in panels]
    raise PreconditionError(f"{spec.kind} is not a figure kind")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def csv_text(records: Sequence[TrialRecord]) -> str:
    if not records:
        raise PreconditionError("no records to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(
            [r.trial, r.seed, r.M, r.N, _fmt(r.tau), _fmt(r.rho), _fmt(r.c), _fmt(r.sigma_min),
             _fmt(r.sigma_max), _fmt(r.cond)]
            + [_fmt(r.bounds.get(col)) for col in CSV_HEADER[10:16]]
            + [";".join(r.flags)]
        )
    return buf.getvalue()


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_csv(records: Sequence[TrialRecord], path) -> None:
    _write(path, csv_text(records))


def figure_csv_text(data) -> str:
    if not data:
        raise PreconditionError("no figure data to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(data[0], CurvePoint):
        w.writerow(("rho", "C"))
        for p in data:
            w.writerow((_fmt(p.rho), _fmt(p.value)))
    else:
        w.writerow(("M", "c", "tau", "rho", "c_tilde"))
        for panel in data:
            for i, r in enumerate(panel.rho):
                for j, t in enumerate(panel.tau):
                    w.writerow((panel.M, _fmt(panel.c), _fmt(t), _fmt(r), _fmt(panel.values[i, j])))
    return buf.getvalue()


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "vandercond"
    return plt


def _save(fig, path) -> None:
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_plot(records: Sequence[TrialRecord], path, kind: Optional[str] = None) -> None:
    """Log-log scatter of the trials with the relevant bound curves."""
    if not records:
        raise PreconditionError("no records to plot")
    plt = _pyplot()
    ok = [r for r in records if r.error is None]
    tau = np.array([r.tau for r in ok])
    grid = np.logspace(-11, 0, 200)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    comparison = kind in ("compare-bdgy", "compare-lili") or any(r.bounds.get("ub_bdgy") or r.bounds.get("ub_lili") for r in ok)
    if comparison:
        ax.scatter(tau, [r.pinv_normalized for r in ok], s=10, label="measured")
        ax.axhline(math.sqrt(11.3), color="C1", label="pairwise bound")
        r0 = records[0]
        if r0.bounds.get("ub_bdgy") is not None:
            ax.axhline(r0.bounds["ub_bdgy"] * r0.tau * math.sqrt(r0.N), color="C2", ls="--", label="cluster bound")
        if r0.bounds.get("ub_lili") is not None:
            ax.axhline(r0.bounds["ub_lili"] * r0.tau * math.sqrt(r0.N), color="C2", ls="--", label="comparison bound")
        ax.set_ylabel(r"$\|A^\dagger\|\,\tau\sqrt{N}$")
    else:
        ax.scatter(tau, [r.cond for r in ok], s=10, label="measured")
        ax.plot(grid, math.sqrt(6.0) / (math.pi * grid), color="C2", label=r"lower $\sqrt{6}/(\pi\tau)$")
        if any(r.bounds.get("ub_pairwise") is not None for r in ok):
            ax.plot(grid, 5.0 / grid, color="C1", label=r"upper $5/\tau$")
        else:
            ax.plot(grid, 4.0 / grid, color="C1", label=r"upper $4/\tau$")
        ax.set_ylabel("cond(A)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\tau$")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def emit_figure_plot(data, path) -> None:
    if not data:
        raise PreconditionError("no figure data to plot")
    plt = _pyplot()
    if isinstance(data[0], CurvePoint):
        fig, ax = plt.subplots(figsize=(4.5, 3.5))
        ax.plot([p.rho for p in data], [p.value for p in data])
        ax.set_xlabel(r"$\rho$")
        ax.set_ylabel(r"$C(\rho)$")
    else:
        fig, axes = plt.subplots(1, len(data), figsize=(4.2 * len(data), 3.6), squeeze=False)
        for ax, panel in zip(axes[0], data):
            im = ax.pcolormesh(panel.tau, panel.rho, panel.values, shading="nearest", cmap="viridis", vmin=0.0,
                               rasterized=True)
            ax.set_title(f"M={panel.M}, c={panel.c:.3g}")
            ax.set_xlabel(r"$\tau$")
            ax.set_ylabel(r"$\rho$")
            fig.colorbar(im, ax=ax)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


@dataclass(frozen=True)
class ExperimentOutput:
    csv_path: Path
    plot_path: Path
    records: list
    failures: int


def execute(spec: ExperimentSpec, out_dir) -> ExperimentOutput:
    """Run ``spec`` and write ``<label>.csv`` and ``<label>.svg`` into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    csv_path = out / f"{spec.label}.csv"
    plot_path = out / f"{spec.label}.svg"
    if spec.kind in FIGURE_KINDS:
        data = run_figure(spec)
        _write(csv_path, figure_csv_text(data))
        emit_figure_plot(data, plot_path)
        return ExperimentOutput(csv_path, plot_path, data, 0)
    records = run(spec)
    emit_csv(records, csv_path)
    emit_plot(records, plot_path, spec.kind)
    return ExperimentOutput(csv_path, plot_path, records, sum(r.error is not None for r in records))
