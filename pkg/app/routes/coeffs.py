import argparse
import logging
import math

from app.schemas.coeffs import CoeffRoute
from app.schemas.distribution import Channel
from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.services.oracle_service import OracleService
from app.services.scattering_service import ScatteringService
from app.utils.cli_args import add_output_arguments, add_params_arguments

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ["n", "m", "s_re", "s_im", "s_abs", "error_bound"]
MARGINAL_COLUMNS = ["n", "s_r_re", "s_r_im", "s_r_abs", "s_l_re", "s_l_im", "s_l_abs", "asymptotic_r"]


def register(subparsers) -> None:
    parser = subparsers.add_parser("coeffs", help="scattering coefficient table s_nm")
    add_params_arguments(parser)
    parser.add_argument("--nmax", default="10", help="largest n + m")
    parser.add_argument(
        "--route", choices=[CoeffRoute.BESSEL_SUM.value, CoeffRoute.JET_ORACLE.value],
        default=CoeffRoute.BESSEL_SUM.value,
    )
    parser.add_argument("--marginal", action="store_true",
                        help="emit s_n^r and s_n^l with the large-n overlay instead of the full table")
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    params = config.params
    n_max = 10 if config.n_max is None else config.n_max
    describe = {**params.describe(), "n_max": n_max}

    if args.marginal:
        forward = ScatteringService.marginal(params, n_max, Channel.FORWARD)
        backward = ScatteringService.marginal(params, n_max, Channel.BACKWARD)
        rows = []
        for n in range(n_max + 1):
            overlay = (
                ScatteringService.s_n_forward_asymptotic(params, n)
                if params.delta == 0 and n >= 1 else math.nan
            )
            rows.append([
                n, forward[n].real, forward[n].imag, abs(forward[n]),
                backward[n].real, backward[n].imag, abs(backward[n]), overlay,
            ])
        return ResultTable(command="coeffs", params=describe, columns=MARGINAL_COLUMNS, rows=rows)

    if args.route == CoeffRoute.JET_ORACLE.value:
        table = OracleService.oracle_table(params, n_max)
    else:
        table = ScatteringService.coeff_table(params, n_max)
    return ResultTable(
        command="coeffs",
        params=describe,
        columns=TABLE_COLUMNS,
        rows=table.rows(),
        meta={"route": table.route.value, "ill_conditioned": len(table.ill_conditioned)},
    )
