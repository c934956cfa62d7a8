import logging
import math
from typing import List, Optional, Tuple

from joblib import Parallel, delayed

from app.schemas.distribution import Channel
from app.schemas.params import ScatterParams
from app.schemas.report import ResultTable
from app.schemas.run import SweepGrid
from app.services.counting_service import CountingService

logger = logging.getLogger(__name__)

DISTRIBUTION_COLUMNS = ["gamma", "delta", "nbar", "n", "p_raw", "p_normalized", "s_abs2"]
SUMMARY_COLUMNS = [
    "gamma", "delta", "nbar",
    "mean_r", "variance_r", "mandel_q_r",
    "mean_l", "variance_l", "mandel_q_l",
    "reentrant_peak_r",
]

Point = Tuple[float, float, float]


def _nan_if_none(value: Optional[float]) -> float:
    return math.nan if value is None else value


def _distribution_rows(point: Point, channel: Channel, n_max: Optional[int]) -> List[list]:
    gamma, delta, nbar = point
    dist = CountingService.channel_distribution(
        ScatterParams(gamma=gamma, delta=delta), nbar, channel, n_max
    )
    return [[gamma, delta, nbar, *row] for row in dist.rows()]


def _summary_row(point: Point, n_max: Optional[int]) -> List[list]:
    gamma, delta, nbar = point
    params = ScatterParams(gamma=gamma, delta=delta)
    forward = CountingService.channel_distribution(params, nbar, Channel.FORWARD, n_max)
    backward = CountingService.channel_distribution(params, nbar, Channel.BACKWARD, n_max)
    moments_r = CountingService.moments(forward)
    moments_l = CountingService.moments(backward)
    peak = CountingService.find_reentrant_peak(forward.probs, nbar)
    return [[
        gamma, delta, nbar,
        moments_r.mean, moments_r.variance, _nan_if_none(moments_r.mandel_q),
        moments_l.mean, moments_l.variance, _nan_if_none(moments_l.mandel_q),
        -1 if peak is None else peak,
    ]]


class SweepService:
    @staticmethod
    def run(
        grid: SweepGrid,
        channel: Channel = Channel.FORWARD,
        n_max: Optional[int] = None,
        summary: bool = False,
        jobs: int = 1,
    ) -> ResultTable:
        """Evaluate every grid point; rows come back sorted by (gamma, delta, nbar)."""
        points = grid.points()
        logger.info(f"sweeping {len(points)} points with {jobs} job(s)")
        if summary:
            tasks = (delayed(_summary_row)(point, n_max) for point in points)
        else:
            tasks = (delayed(_distribution_rows)(point, channel, n_max) for point in points)
        # joblib returns results in submission order, so the merge is schedule independent
        chunks = Parallel(n_jobs=jobs)(tasks)
        rows = [row for chunk in chunks for row in chunk]
        return ResultTable(
            command="sweep",
            params={"channel": channel.value, "summary": int(summary), "points": len(points)},
            columns=SUMMARY_COLUMNS if summary else DISTRIBUTION_COLUMNS,
            rows=rows,
        )
