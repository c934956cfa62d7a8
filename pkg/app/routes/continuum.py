import argparse
import logging

from app.schemas.distribution import Channel
from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.schemas.state import SqueezedState
from app.services.continuum_service import ContinuumService
from app.utils.cli_args import add_output_arguments

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "continuum", help="bimodal distributions in the continuous-radiation limit"
    )
    parser.add_argument("--state", required=True,
                        help="coherent:NBAR | fock:N | squeezed:MAG,THETA | custom:FILE")
    parser.add_argument("--T", dest="T", type=float, required=True, help="transmission probability")
    parser.add_argument("--channel", choices=[Channel.FORWARD.value, Channel.BACKWARD.value], default="r")
    parser.add_argument("--nmax", default="auto")
    parser.add_argument("--power", type=int, default=None,
                        help="exponent of T in the squeezed closed form (default from settings)")
    add_output_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    state = config.state
    channel = Channel(args.channel)
    n_max = config.n_max
    params = {"state": args.state, "channel": channel.value}

    if isinstance(state, SqueezedState):
        T = args.T if channel == Channel.FORWARD else 1.0 - args.T
        dist = ContinuumService.squeezed_distribution(state.magnitude, state.theta, T, n_max, args.power)
        rows = [
            [n, float(p), float(ref), float(p - ref)]
            for n, (p, ref) in enumerate(zip(dist.probs, dist.reference_probs))
        ]
        meta = {"T": args.T, "R": 1.0 - args.T, **{k: dist.meta[k] for k in
                ("d", "magnitude_out", "power", "max_discrepancy")}}
        return ResultTable(command="continuum", params=params,
                           columns=["n", "p_closed_form", "p_general", "discrepancy"], rows=rows, meta=meta)

    dist = ContinuumService.continuum_distribution(state, args.T, channel, n_max)
    return ResultTable(
        command="continuum",
        params=params,
        columns=["n", "p"],
        rows=[[n, float(p)] for n, p in enumerate(dist.clamped())],
        meta={"T": args.T, "R": 1.0 - args.T, "norm_defect": dist.norm_defect},
    )
