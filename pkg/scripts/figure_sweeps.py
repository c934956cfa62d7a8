"""
Write the standard distribution and mean-number sweeps as CSV files.

Usage:
    python scripts/figure_sweeps.py [OUTPUT_DIR] [--jobs N]
"""

import argparse
import logging
import os
import sys

# Ensure repo root is on path so `app` package is importable
repo_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if repo_root not in sys.path:
    sys.path.insert(0, repo_root)

import numpy as np

from app.schemas.distribution import Channel
from app.schemas.params import ScatterParams
from app.schemas.report import ResultTable
from app.schemas.run import SweepGrid
from app.services.counting_service import CountingService
from app.services.export_service import ExportService
from app.services.sweep_service import SweepService

logger = logging.getLogger("figure_sweeps")

DISTRIBUTION_GAMMAS = [0.5, 1.0, 2.0, 5.0]
DISTRIBUTION_NBARS = [1.0, 4.0, 9.0]
MEAN_GAMMAS = np.linspace(0.0, 10.0, 41)
MEAN_NBAR = 4.0


def mean_table() -> ResultTable:
    rows = []
    for gamma in MEAN_GAMMAS:
        forward, backward = CountingService.mean_curves(ScatterParams(gamma=float(gamma)), MEAN_NBAR)
        rows.append([float(gamma), MEAN_NBAR, forward.mean, backward.mean])
    return ResultTable(
        command="sweep",
        params={"nbar": MEAN_NBAR},
        columns=["gamma", "nbar", "mean_r", "mean_l"],
        rows=rows,
    )


def run(output_dir: str, jobs: int) -> None:
    grid = SweepGrid(gamma_values=DISTRIBUTION_GAMMAS, delta_values=[0.0], nbar_values=DISTRIBUTION_NBARS)
    for channel in (Channel.FORWARD, Channel.BACKWARD):
        table = SweepService.run(grid, channel, jobs=jobs)
        ExportService.write(ExportService.to_csv(table), os.path.join(output_dir, f"dist_{channel.value}.csv"))
    summary = SweepService.run(grid, summary=True, jobs=jobs)
    ExportService.write(ExportService.to_csv(summary), os.path.join(output_dir, "summary.csv"))
    ExportService.write(ExportService.to_csv(mean_table()), os.path.join(output_dir, "means.csv"))
    print(f"✅ Sweeps written to {output_dir}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output_dir", nargs="?", default="figures")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)
    run(args.output_dir, args.jobs)
