import argparse
import logging

from app.schemas.distribution import Channel
from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.services.counting_service import CountingService
from app.utils.cli_args import add_output_arguments, add_params_arguments, parse_nbar

logger = logging.getLogger(__name__)

COLUMNS = ["n", "p_raw", "p_normalized", "s_abs2"]


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "dist",
        help="forward or backward photon-number distribution for a coherent pulse",
        description="p_raw is p(n)|s_n|^2 for every n; p_normalized replaces n=0 by the "
                    "normalization-completing zero bucket.",
    )
    add_params_arguments(parser)
    parser.add_argument("--nbar", type=float, required=True, help="mean photon number of the pulse")
    parser.add_argument("--channel", choices=[Channel.FORWARD.value, Channel.BACKWARD.value], default="r")
    parser.add_argument("--nmax", default="auto", help="truncation, integer or 'auto'")
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    params = config.params
    nbar = parse_nbar(args.nbar)
    dist = CountingService.channel_distribution(params, nbar, Channel(args.channel), config.n_max)
    moments = CountingService.moments(dist)
    logger.info(f"dist {args.channel}: n_max={dist.n_max}, norm_defect={dist.norm_defect:.2e}")
    return ResultTable(
        command="dist",
        params={**params.describe(), "nbar": nbar, "channel": args.channel},
        columns=COLUMNS,
        rows=dist.rows(),
        meta={
            "n_max": dist.n_max,
            "zero_bucket_mass": dist.zero_bucket_mass,
            "raw_zero": dist.meta["raw_zero"],
            "norm_defect": dist.norm_defect,
            "mean": moments.mean,
            "variance": moments.variance,
        },
    )
