"""
Finding listeners: the CSV/JSON report and the pass/fail verdict.
"""
import csv
import json
import logging
import typing as t
from pathlib import Path

import numpy as np
import scipy

import incoherent
from incoherent.harness.bus import ExperimentBus
from incoherent.harness.findings import BoundChecked
from incoherent.harness.findings import Cell
from incoherent.harness.findings import RunCompleted
from incoherent.harness.findings import TableComputed

logger = logging.getLogger(__name__)

FORMAT_VERSION = "v1"
FLOAT_FORMAT = "%.12g"


def format_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def table_path(out: Path, table: str) -> Path:
    """
    The main table goes to ``out``; ``foo.csv`` puts the ``sweep`` table in
    ``foo-sweep.csv``
    """
    if not table:
        return out
    return out.with_name(f"{out.stem}-{table}{out.suffix}")


def sidecar_path(out: Path) -> Path:
    return out.with_name(f"{out.name}.json")


class VerdictTracker:
    """
    Counts bound checks. The run fails if any check failed.
    """

    verified: int
    failed: list[BoundChecked]

    def __init__(self):
        self.verified = 0
        self.failed = []

    def __call__(self, finding: BoundChecked) -> None:
        if finding.passed:
            self.verified += 1
            return
        self.failed.append(finding)
        logger.warning(
            f"Bound check failed: {finding.experiment} {finding.label}: "
            f"{finding.measured:.6e} > {finding.bound:.6e}"
        )

    @property
    def passed(self) -> bool:
        return not self.failed

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1


class ReportWriter:
    """
    Writes each table to CSV and, once the run completes, the JSON sidecar
    next to the main table
    """

    out: Path
    digest: str
    config: dict[str, str]
    seed: int
    verdicts: VerdictTracker
    written: list[Path]

    def __init__(
        self,
        out: Path | str,
        digest: str,
        config: t.Mapping[str, str],
        seed: int,
        verdicts: VerdictTracker,
    ):
        self.out = Path(out)
        self.digest = digest
        self.config = dict(config)
        self.seed = seed
        self.verdicts = verdicts
        self.written = []

    def header(self, experiment: str) -> str:
        return (
            f"# incoherent-results {FORMAT_VERSION} experiment={experiment} "
            f"config_sha256={self.digest} seed={self.seed}"
        )

    def write_table(self, finding: TableComputed) -> Path:
        path = table_path(self.out, finding.table)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(self.header(finding.experiment) + "\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(finding.columns)
            for row in finding.rows:
                writer.writerow([format_cell(cell) for cell in row])
            for line in finding.footer:
                f.write(f"# {line}\n")
        logger.info(f"Wrote {len(finding.rows)} rows to {path}")
        self.written.append(path)
        return path

    def metadata(self, finding: RunCompleted) -> dict[str, t.Any]:
        return {
            "experiment": finding.experiment,
            "config": self.config,
            "config_sha256": self.digest,
            "seed": finding.seed,
            "parameters": finding.parameters,
            "tables": [p.name for p in self.written],
            "versions": {
                "incoherent": incoherent.__version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "verified": self.verdicts.verified,
            "failed": len(self.verdicts.failed),
        }

    def write_metadata(self, finding: RunCompleted) -> Path:
        path = sidecar_path(self.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(self.metadata(finding), sort_keys=True, indent=2)
        path.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote metadata to {path}")
        return path

    def on_table(self, finding: TableComputed) -> None:
        self.write_table(finding)

    def on_run_completed(self, finding: RunCompleted) -> None:
        self.write_metadata(finding)

    def subscribe(self, bus: ExperimentBus) -> None:
        bus.subscribe_finding(TableComputed, self.on_table)
        bus.subscribe_finding(RunCompleted, self.on_run_completed)
