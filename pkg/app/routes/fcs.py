import argparse
import itertools
import logging

import numpy as np

from app.exceptions import InvalidParameterError
from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.services.continuum_service import ContinuumService
from app.services.counting_service import CountingService
from app.utils.cli_args import add_output_arguments, parse_nbar, parse_range

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "fcs",
        help="full-counting-statistics generating function F(lambda_r, lambda_l)",
        description="Finite pulse with --gamma/--nbar, or the continuum limit with --state/--T.",
    )
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--delta", type=float, default=0.0)
    parser.add_argument("--nbar", type=float, default=None)
    parser.add_argument("--nmax", default="auto")
    parser.add_argument("--state", default=None, help="continuum limit: coherent:NBAR | fock:N | ...")
    parser.add_argument("--T", dest="T", type=float, default=None)
    parser.add_argument("--lambda-r", default="0", help="VALUE or START:STOP:COUNT")
    parser.add_argument("--lambda-l", default="0", help="VALUE or START:STOP:COUNT")
    parser.add_argument("--fugacity", action="store_true",
                        help="read --lambda-r/--lambda-l as real fugacities z in [-1, 1]")
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    first = parse_range(args.lambda_r, "--lambda-r")
    second = parse_range(args.lambda_l, "--lambda-l")
    grid = np.array(list(itertools.product(first, second)), dtype=float)
    labels = ["z_r", "z_l"] if args.fugacity else ["lambda_r", "lambda_l"]

    if args.state is not None:
        if args.T is None:
            raise InvalidParameterError("--T: required with --state")
        if args.fugacity:
            raise InvalidParameterError("--fugacity: only available for finite pulses")
        values = ContinuumService.continuum_F(config.state, args.T, grid[:, 0], grid[:, 1])
        params = {"state": args.state, "T": args.T}
        meta = {}
    else:
        if args.gamma is None or args.nbar is None:
            raise InvalidParameterError("--gamma and --nbar are required without --state")
        scatter = config.params
        nbar = parse_nbar(args.nbar)
        n_max = config.n_max
        if args.fugacity:
            values = CountingService.evaluate_F_fugacity(scatter, nbar, grid[:, 0], grid[:, 1], n_max)
        else:
            values = CountingService.evaluate_F(scatter, nbar, grid[:, 0], grid[:, 1], n_max)
        params = {**scatter.describe(), "nbar": nbar}
        cumulants = CountingService.cumulants_from_generating_function(scatter, nbar, n_max=n_max)
        meta = {f"kappa_{k}_r": value for k, value in enumerate(cumulants, start=1)}

    values = np.atleast_1d(values)
    rows = [
        [float(a), float(b), float(v.real), float(v.imag)]
        for (a, b), v in zip(grid, values)
    ]
    logger.info(f"fcs: {len(rows)} generating-function samples")
    return ResultTable(command="fcs", params=params, columns=[*labels, "F_re", "F_im"], rows=rows, meta=meta)
