import argparse
import logging

from app.exceptions import ValidationFailure
from app.schemas.report import ResultTable
from app.schemas.run import RunConfig
from app.services.export_service import ExportService
from app.services.validation_service import ValidationService
from app.utils.cli_args import add_output_arguments

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="run the numerical self-checks")
    parser.add_argument("--perturb-s", type=float, default=0.0,
                        help="add this offset to every Bessel-sum coefficient; checks must then fail")
    parser.add_argument("--json", dest="json_path", default=None, help="also write the full report here")
    add_output_arguments(parser)
    parser.set_defaults(handler=handle, deferred_error=None)


def handle(args: argparse.Namespace, config: RunConfig) -> ResultTable:
    report = ValidationService.run(args.perturb_s)
    if args.json_path:
        ExportService.write(ExportService.report_to_json(report), args.json_path)
    table = ResultTable(
        command="validate",
        params={"perturb_s": args.perturb_s},
        columns=["check", "residual", "tolerance", "passed", "informational"],
        rows=[[c.name, c.residual, c.tolerance, c.passed, c.informational] for c in report.checks],
        meta={"failures": len(report.failures)},
    )
    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        # main() writes the table before raising this
        args.deferred_error = ValidationFailure(f"{len(report.failures)} check(s) failed: {names}")
    return table
