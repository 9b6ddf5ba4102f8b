"""Figure rendering for sweep output.

Reads the sweep CSV back and writes the standard diagnostic views next to
it: hitting time against dimension (log-log, one line per mode and q),
hitting time against q at fixed d, and total arrival probability against q.
Only views the data actually supports are rendered.  Uses Agg figures
directly, so no interactive backend is touched.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure


def _load_rows(csv_path: Path) -> list[dict]:
    with open(csv_path, newline="", encoding="utf-8") as stream:
        return list(csv.DictReader(stream))


def _f(row: dict, key: str) -> float | None:
    value = row.get(key, "")
    return float(value) if value not in ("", None) else None


def _save(fig: Figure, path: Path) -> Path:
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    return path


def render_report(csv_path: str | Path, outdir: str | Path | None = None) -> list[Path]:
    """Render figures for a sweep CSV; returns the paths written."""
    csv_path = Path(csv_path)
    outdir = Path(outdir) if outdir is not None else csv_path.parent
    outdir.mkdir(parents=True, exist_ok=True)
    stem = csv_path.stem
    rows = _load_rows(csv_path)
    written: list[Path] = []

    # tau against d, one line per (scenario, mode, q)
    by_line: dict[tuple, list[tuple[int, float]]] = defaultdict(list)
    for row in rows:
        tau = _f(row, "tau")
        if tau is None or tau <= 0:
            continue
        key = (row["scenario"], row["mode"], row["q"])
        by_line[key].append((int(row["d"]), tau))
    lines = {k: sorted(v) for k, v in by_line.items() if len({d for d, _ in v}) >= 2}
    if lines:
        fig = Figure(figsize=(6, 4.5))
        ax = fig.add_subplot(111)
        for (scenario, mode, q), pts in sorted(lines.items()):
            label = f"{scenario} {mode}" + (f" q={q}" if q != "" else "")
            ax.loglog([p[0] for p in pts], [p[1] for p in pts], "o-", label=label)
        ax.set_xlabel("hypercube dimension d")
        ax.set_ylabel("expected hitting time")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
        written.append(_save(fig, outdir / f"{stem}_tau_vs_d.png"))

    # tau and p_tot against q at fixed d
    by_d: dict[tuple, list[tuple[int, float, float | None]]] = defaultdict(list)
    for row in rows:
        if row["q"] == "":
            continue
        tau = _f(row, "tau")
        if tau is None:
            continue
        key = (row["scenario"], row["mode"], int(row["d"]))
        by_d[key].append((int(row["q"]), tau, _f(row, "p_tot")))
    sweeps = {k: sorted(v) for k, v in by_d.items() if len({q for q, *_ in v}) >= 2}
    if sweeps:
        fig = Figure(figsize=(6, 4.5))
        ax = fig.add_subplot(111)
        for (scenario, mode, d), pts in sorted(sweeps.items()):
            ax.semilogy(
                [p[0] for p in pts],
                [p[1] for p in pts],
                "o-",
                label=f"{scenario} {mode} d={d}",
            )
        ax.set_xlabel("perturbation Hamming weight q")
        ax.set_ylabel("expected hitting time")
        ax.legend(fontsize=8)
        ax.grid(True, alpha=0.3)
        written.append(_save(fig, outdir / f"{stem}_tau_vs_q.png"))

        quantum = {
            k: v for k, v in sweeps.items() if k[1] == "quantum" and any(p[2] is not None for p in v)
        }
        if quantum:
            fig = Figure(figsize=(6, 4.5))
            ax = fig.add_subplot(111)
            for (scenario, _, d), pts in sorted(quantum.items()):
                qs = [p[0] for p in pts if p[2] is not None]
                ps = [p[2] for p in pts if p[2] is not None]
                ax.semilogy(qs, ps, "o-", label=f"{scenario} d={d}")
            ax.set_xlabel("perturbation Hamming weight q")
            ax.set_ylabel("total arrival probability")
            ax.legend(fontsize=8)
            ax.grid(True, alpha=0.3)
            written.append(_save(fig, outdir / f"{stem}_ptot_vs_q.png"))

    return written
