import argparse
import logging
import sys
from typing import List, Optional

from app.config import get_settings
from app.exceptions import ScatteringError
from app.routes import coeffs, continuum, dist, fcs, joint, kernel, sweep, validate
from app.services.export_service import ExportService
from app.utils.cli_args import config_from_args

logger = logging.getLogger(__name__)

ROUTES = [dist, joint, coeffs, continuum, fcs, kernel, sweep, validate]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgfcs",
        description="Photon counting statistics of a two-level emitter coupled to a 1D waveguide",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for route in ROUTES:
        route.register(subparsers)
    return parser


def _configure_logging(verbose: int) -> None:
    settings = get_settings()
    if verbose >= 2 or settings.DEBUG:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = config_from_args(args)
        table = args.handler(args, config)
        ExportService.write(ExportService.render(table, config.output_format), config.output_path)
        logger.info(f"{config.command.value}: {len(table.rows)} rows")
        deferred = getattr(args, "deferred_error", None)
        if deferred is not None:
            raise deferred
    except ScatteringError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
