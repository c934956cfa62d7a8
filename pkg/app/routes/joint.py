import argparse
import logging

from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.services.counting_service import CountingService
from app.utils.cli_args import add_output_arguments, add_params_arguments, parse_nbar

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("joint", help="joint forward/backward distribution q[n][m]")
    add_params_arguments(parser)
    parser.add_argument("--nbar", type=float, required=True)
    parser.add_argument("--nmax", default="auto")
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    params = config.params
    nbar = parse_nbar(args.nbar)
    joint = CountingService.joint_distribution(params, nbar, config.n_max)
    return ResultTable(
        command="joint",
        params={**params.describe(), "nbar": nbar},
        columns=["n", "m", "q"],
        rows=joint.rows(),
        meta={
            "n_max": joint.n_max,
            "total_mass": joint.total_mass,
            "negative_mass": joint.negative_mass,
            "min_cell": joint.min_cell,
        },
    )
