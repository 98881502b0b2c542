"""Files for humans and scripts: CSV tables plus rendered figures.

Every report call writes the delimited data and the matching PNGs into one
directory and returns the paths it created.  Figures use the Agg canvas so
reports work on headless machines.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_ENGINE_COLORS = {
    "randen": "#1f77b4",
    "randen-sw": "#9ecae1",
    "mt19937_64": "#ff7f0e",
    "splitmix64": "#2ca02c",
}


def _color(engine: str) -> str:
    return _ENGINE_COLORS.get(engine, "#7f7f7f")


def write_bench_csv(rows, path: str) -> str:
    fields = ["kind", "engine", "central", "mad", "unit", "bytes", "speedup_vs_randen"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.to_dict())
    return path


def render_bench_figures(rows, outdir: str):
    """Per-byte cost bars (log scale, MAD whiskers) and cost ratios."""
    kinds = list(dict.fromkeys(r.kind for r in rows))
    engines = list(dict.fromkeys(r.engine for r in rows))
    unit = rows[0].unit if rows else "cycles"
    by_key = {(r.kind, r.engine): r for r in rows}
    paths = []

    width = 0.8 / max(len(engines), 1)
    fig, ax = plt.subplots(figsize=(1.8 + 1.9 * len(kinds), 4.2))
    for ei, engine in enumerate(engines):
        xs, ys, errs = [], [], []
        for ki, kind in enumerate(kinds):
            row = by_key.get((kind, engine))
            if row is None:
                continue
            xs.append(ki + (ei - (len(engines) - 1) / 2) * width)
            ys.append(row.central / row.bytes)
            errs.append(row.mad / row.bytes)
        ax.bar(xs, ys, width=width, yerr=errs, capsize=2, label=engine,
               color=_color(engine))
    ax.set_yscale("log")
    ax.set_xticks(range(len(kinds)))
    ax.set_xticklabels(kinds)
    ax.set_ylabel(f"{unit} per byte (log)")
    ax.set_title("Workload cost per random byte")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(outdir, "bench_cost_per_byte.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    paths.append(path)

    ratio_rows = [r for r in rows if r.speedup_vs_randen is not None]
    if ratio_rows:
        fig, ax = plt.subplots(figsize=(1.8 + 1.9 * len(kinds), 4.2))
        for ei, engine in enumerate(engines):
            xs, ys = [], []
            for ki, kind in enumerate(kinds):
                row = by_key.get((kind, engine))
                if row is None or row.speedup_vs_randen is None:
                    continue
                xs.append(ki + (ei - (len(engines) - 1) / 2) * width)
                ys.append(row.speedup_vs_randen)
            ax.bar(xs, ys, width=width, label=engine, color=_color(engine))
        ax.axhline(1.0, color="black", linewidth=0.8, linestyle="--")
        ax.set_yscale("log")
        ax.set_xticks(range(len(kinds)))
        ax.set_xticklabels(kinds)
        ax.set_ylabel("cost relative to randen (log)")
        ax.set_title("Cost ratio vs hardware randen (above 1.0 = slower)")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = os.path.join(outdir, "bench_ratio_vs_randen.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def bench_report(rows, outdir: str):
    """Write bench.csv plus figures; returns all created paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = [write_bench_csv(rows, os.path.join(outdir, "bench.csv"))]
    paths.extend(render_bench_figures(rows, outdir))
    return paths


def write_bounds_csv(rows, path: str) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rounds", "fast_bound", "exact_bound", "expected", "ok"])
        for row in rows:
            writer.writerow([row.rounds, row.fast_bound, row.exact_bound,
                             "" if row.expected is None else row.expected,
                             "yes" if row.ok else "no"])
    return path


def render_bounds_figure(rows, outdir: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    rounds = [r.rounds for r in rows]
    ax.step(rounds, [r.fast_bound for r in rows], where="mid",
            label="fast rule", color="#ff7f0e")
    ax.step(rounds, [r.exact_bound for r in rows], where="mid",
            label="exact search", color="#1f77b4")
    expected = [(r.rounds, r.expected) for r in rows if r.expected is not None]
    if expected:
        ax.plot([e[0] for e in expected], [e[1] for e in expected], "k.",
                markersize=4, label="reference")
    bad = [(r.rounds, r.exact_bound) for r in rows if not r.ok]
    if bad:
        ax.plot([b[0] for b in bad], [b[1] for b in bad], "rx",
                markersize=8, label="mismatch")
    ax.set_xlabel("rounds")
    ax.set_ylabel("min active round functions")
    ax.set_title("Lower bound on active round functions")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(outdir, "bounds.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def bounds_report(rows, outdir: str):
    """Write bounds.csv plus the figure; returns all created paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = [write_bounds_csv(rows, os.path.join(outdir, "bounds.csv"))]
    paths.extend(render_bounds_figure(rows, outdir))
    return paths
