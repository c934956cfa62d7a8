import argparse
import logging

from app.schemas.distribution import Channel
from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.services.sweep_service import SweepService
from app.utils.cli_args import add_output_arguments

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="distributions or summaries over a parameter grid")
    parser.add_argument("--gamma", required=True, help="VALUE or START:STOP:COUNT")
    parser.add_argument("--delta", default="0", help="VALUE or START:STOP:COUNT")
    parser.add_argument("--nbar", required=True, help="VALUE or START:STOP:COUNT")
    parser.add_argument("--channel", choices=[Channel.FORWARD.value, Channel.BACKWARD.value], default="r")
    parser.add_argument("--nmax", default="auto")
    parser.add_argument("--summary", action="store_true", help="one row of moments per grid point")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes")
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    return SweepService.run(config.grid, Channel(args.channel), config.n_max, args.summary, config.jobs)
