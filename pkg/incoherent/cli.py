"""
``incoherent <experiment> --config FILE``: runs one experiment and writes its
CSV report and JSON sidecar.

Exit status is 0 when every bound check passes, 1 when one fails and 2 on
invalid input.
"""
import argparse
import logging
import sys
import typing as t
from pathlib import Path

from incoherent.exceptions import IncoherentError
from incoherent.harness.experiments import Overrides
from incoherent.harness.experiments import build_experiment
from incoherent.harness.experiments import default_bus
from incoherent.harness.findings import BoundChecked
from incoherent.harness.findings import RunCompleted
from incoherent.harness.messages import ExperimentMeta
from incoherent.harness.output import ReportWriter
from incoherent.harness.output import VerdictTracker
from incoherent.harness.recorder import RunRecorder
from incoherent.harness.specfile import load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INVALID = 2


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incoherent",
        description="Error bounds and simulations for randomly compiled circuits.",
    )
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logs")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")

    subparsers = parser.add_subparsers(dest="experiment", required=True)
    for name in sorted(ExperimentMeta.registered()):
        experiment_cls = ExperimentMeta.registered()[name]
        summary = (experiment_cls.__doc__ or "").strip().splitlines()[0:1]
        sub = subparsers.add_parser(name, help=" ".join(summary))
        sub.add_argument(
            "--config", type=Path, required=True, help="experiment config file"
        )
        sub.add_argument(
            "--out", type=Path, help=f"CSV report path (default: {name}.csv)"
        )
        sub.add_argument("--seed", type=int, help="overrides the config seed")
        sub.add_argument(
            "--shots", type=_positive_int, help="overrides the config shots"
        )
        sub.add_argument(
            "--measure-diamond",
            action="store_true",
            help="check bounds against measured diamond distances",
        )
        sub.add_argument(
            "--sweep",
            nargs=3,
            metavar=("S_MIN", "S_MAX", "POINTS"),
            help="second-order scaling sweep of the injection bound",
        )
        sub.add_argument(
            "--jobs", type=_positive_int, default=1, help="worker processes"
        )
    return parser


def _sweep(values: list[str] | None) -> tuple[float, float, int] | None:
    if values is None:
        return None
    s_min, s_max, points = values
    return float(s_min), float(s_max), int(points)


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def run(args: argparse.Namespace) -> int:
    """
    Runs the experiment named by ``args.experiment`` and returns the exit
    status

    :raises IncoherentError: on invalid input
    """
    overrides = Overrides(
        seed=args.seed,
        shots=args.shots,
        measure_diamond=args.measure_diamond,
        sweep=_sweep(args.sweep),
        jobs=args.jobs,
    )
    config = load_config(args.config)
    experiment = build_experiment(args.experiment, config, overrides)
    out = args.out or Path(f"{args.experiment}.csv")

    bus = default_bus()
    verdicts = VerdictTracker()
    writer = ReportWriter(out, config.digest, config.echo(), experiment.seed, verdicts)
    bus.subscribe_finding(BoundChecked, verdicts)
    writer.subscribe(bus)

    applied = {
        key: value
        for key, value in vars(args).items()
        if key not in ("config", "out", "verbose", "quiet", "experiment")
        and value not in (None, False)
    }
    with RunRecorder(bus) as recorder:
        recorder.run(experiment)
        recorder.emit(RunCompleted(experiment.NAME, experiment.seed, applied))

    if not writer.written:
        logger.error(f"No report was written to {out}")
        return EXIT_INVALID
    logger.info(
        f"{verdicts.verified} bound checks passed, {len(verdicts.failed)} failed"
    )
    return verdicts.exit_status


def main(argv: t.Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return run(args)
    except IncoherentError as error:
        logger.error(str(error))
        return EXIT_INVALID
