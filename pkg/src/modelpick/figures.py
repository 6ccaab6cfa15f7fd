"""Render report figures and the delimited leaderboard to files.

All rendering goes through the Agg backend so it works headless; figure
style is kept plain and deterministic.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reporting import AggregateReport, SelectionReport

_RC = {
    "figure.figsize": (7.0, 4.0),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
}

LEADERBOARD_COLUMNS = [
    "rank",
    "id",
    "estimated_value",
    "accuracy",
    "pulls",
    "size_mb",
    "complexity_mmac",
]


def write_leaderboard_csv(report: SelectionReport, path: Path) -> Path:
    """Delimited ranking table, one row per arm in rank order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(LEADERBOARD_COLUMNS)
        for rank, entry in enumerate(report.ranking, start=1):
            writer.writerow(
                [
                    rank,
                    entry.id,
                    f"{entry.estimated_value:.9g}",
                    f"{entry.accuracy:.9g}",
                    entry.pulls,
                    f"{entry.size_mb:.9g}",
                    f"{entry.complexity_mmac:.9g}",
                ]
            )
    return path


def write_frequency_csv(report: AggregateReport, path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "frequency"])
        for f in report.selection_frequency:
            writer.writerow([f.id, f"{f.frequency:.9g}"])
    return path


def _savings_figure(eval_savings: float, compute_savings: float, path: Path) -> Path:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.0, 3.2))
        bars = ax.bar(
            ["evaluations", "compute (MMAC)"],
            [eval_savings * 100.0, compute_savings * 100.0],
            color=["#4c72b0", "#55a868"],
        )
        for bar, v in zip(bars, (eval_savings, compute_savings)):
            ax.text(
                bar.get_x() + bar.get_width() / 2,
                bar.get_height(),
                f"{v * 100:.1f}%",
                ha="center",
                va="bottom",
            )
        ax.set_ylim(0, 105)
        ax.set_ylabel("saved vs brute force [%]")
        ax.set_title("Savings")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def render_selection_figures(report: SelectionReport, out_dir: Path, stem: str) -> list[Path]:
    """Pulls-per-arm bars, top-ranked values and the savings chart."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [write_leaderboard_csv(report, out_dir / f"{stem}_leaderboard.csv")]

    by_arm = sorted(report.ranking, key=lambda e: e.arm)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.bar([e.id for e in by_arm], [e.pulls for e in by_arm], color="#4c72b0")
        ax.set_ylabel("evaluations")
        ax.set_title("Evaluations per model")
        if len(by_arm) > 12:
            ax.tick_params(axis="x", labelrotation=90, labelsize=6)
        else:
            ax.tick_params(axis="x", labelrotation=45)
        fig.tight_layout()
        path = out_dir / f"{stem}_pulls.png"
        fig.savefig(path)
        plt.close(fig)
    paths.append(path)

    top = report.ranking[: min(10, len(report.ranking))]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.barh(
            [e.id for e in reversed(top)],
            [e.estimated_value for e in reversed(top)],
            color="#55a868",
        )
        ax.set_xlabel("estimated composite value")
        ax.set_title(f"Top models ({report.method})")
        fig.tight_layout()
        path = out_dir / f"{stem}_ranking.png"
        fig.savefig(path)
        plt.close(fig)
    paths.append(path)

    paths.append(
        _savings_figure(
            report.eval_savings, report.compute_savings_mmac, out_dir / f"{stem}_savings.png"
        )
    )
    return paths


def render_aggregate_figures(report: AggregateReport, out_dir: Path, stem: str) -> list[Path]:
    """Selection-frequency bars and the mean savings chart."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [write_frequency_csv(report, out_dir / f"{stem}_frequency.csv")]

    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        freqs = report.selection_frequency
        ax.bar([f.id for f in freqs], [f.frequency for f in freqs], color="#4c72b0")
        ax.set_ylabel("fraction of runs ranked first")
        ax.set_title(f"Selection frequency over {report.repetitions} runs")
        ax.tick_params(axis="x", labelrotation=45)
        fig.tight_layout()
        path = out_dir / f"{stem}_frequency.png"
        fig.savefig(path)
        plt.close(fig)
    paths.append(path)

    paths.append(
        _savings_figure(
            report.mean_eval_savings,
            report.mean_compute_savings_mmac,
            out_dir / f"{stem}_savings.png",
        )
    )
    return paths


def render_report_figures(
    report: SelectionReport | AggregateReport, out_dir: Path, stem: str = "report"
) -> list[Path]:
    if isinstance(report, AggregateReport):
        return render_aggregate_figures(report, out_dir, stem)
    return render_selection_figures(report, out_dir, stem)
