import argparse
import logging

from app.schemas.kernel import KernelRoute
from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.services.oracle_service import OracleService
from app.utils.cli_args import add_output_arguments, add_params_arguments

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("kernel", help="evaluate the reduced kernel d~(w) by every route")
    add_params_arguments(parser)
    parser.add_argument("--w-re", type=float, default=0.0)
    parser.add_argument("--w-im", type=float, default=0.0)
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    params = config.params
    w = complex(args.w_re, args.w_im)
    rows = []
    for route in KernelRoute:
        result = OracleService.kernel_value(params, w, route)
        rows.append([route.value, result.value.real, result.value.imag])
    spread = max(abs(complex(a[1], a[2]) - complex(b[1], b[2])) for a in rows for b in rows)
    return ResultTable(
        command="kernel",
        params={**params.describe(), "w_re": w.real, "w_im": w.imag},
        columns=["route", "d_re", "d_im"],
        rows=rows,
        meta={"max_route_spread": spread},
    )
