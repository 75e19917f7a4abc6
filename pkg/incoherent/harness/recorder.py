import logging
import typing as t

from incoherent.exceptions import InvalidMessageError
from incoherent.exceptions import ProgrammingError
from incoherent.exceptions import RecorderContextError
from incoherent.harness.messages import Experiment
from incoherent.harness.messages import Finding

if t.TYPE_CHECKING:
    from incoherent.harness.bus import ExperimentBus

logger = logging.getLogger(__name__)


class FindingsFifo(t.Collection[Finding]):
    """
    Findings in emission order
    """

    queue: list[Finding]

    def __init__(self):
        self.queue = []

    def push(self, finding: Finding):
        self.queue.append(finding)

    def extend(self, findings: t.Iterable[Finding]):
        self.queue.extend(findings)

    def clear(self):
        self.queue = []

    def __len__(self):
        return len(self.queue)

    def __iter__(self):
        return iter(self.queue)

    def __contains__(self, finding: object):
        return finding in self.queue


class RunRecorder:
    """
    Collects findings while runs are open and hands them to the listeners
    when the outermost run closes cleanly. A failing run discards its
    findings.

        >>> with RunRecorder(bus) as recorder:
        ...     recorder.run(experiment)
    """

    bus: "ExperimentBus"
    stack: list["Record"]

    def __init__(self, bus: "ExperimentBus"):
        self.bus = bus
        self.stack = []

    def __enter__(self):
        self._begin()
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        if not exc_type:
            self._commit()
        else:
            self._rollback()

    def _begin(self):
        self.stack.append(Record(self, self.stack[-1] if self.stack else None))

    def _commit(self):
        self._end().commit()

    def _rollback(self):
        record = self._end()
        logger.info(f"Run failed: discarding {len(record.findings)} findings")
        record.rollback()

    def _end(self) -> "Record":
        self._ensure_context()
        return self.stack.pop()

    def _ensure_context(self):
        if not self.stack:
            raise RecorderContextError("No run in progress")

    def run(self, experiment: Experiment) -> t.Any:
        """
        Calls the experiment runner. Runner exceptions are propagated

        :raises InvalidMessageError: if this isn't an Experiment
        :raises MissingRunnerError: if no runner is configured for it
        """
        if not isinstance(experiment, Experiment):
            raise InvalidMessageError(f"This is not an experiment: '{experiment}'")
        return self.bus._run_experiment(experiment, self)

    def emit(self, finding: Finding):
        """
        Collects a finding on the current run

        :raises InvalidMessageError: if this isn't a Finding
        :raises RecorderContextError: outside a ``with`` block
        """
        if not isinstance(finding, Finding):
            raise InvalidMessageError(f"This is not a finding: '{finding}'")
        self._ensure_context()
        self.stack[-1].findings.push(finding)

    def _dispatch(self, findings: t.Iterable[Finding]):
        """
        Called on closing the outermost run
        """
        if self.stack:
            raise ProgrammingError("This call should happen outside the context")
        for finding in findings:
            self.bus._dispatch_finding(finding)


class Record:
    """
    The findings of one open run. Closing a nested record passes its findings
    to the parent instead of dispatching them.
    """

    recorder: RunRecorder
    findings: FindingsFifo
    parent: t.Optional["Record"]

    def __init__(self, recorder: RunRecorder, parent: t.Optional["Record"] = None):
        self.recorder = recorder
        self.findings = FindingsFifo()
        self.parent = parent

    def commit(self):
        if self.parent:
            self.parent.findings.extend(self.findings)
        else:
            self.recorder._dispatch(self.findings)

    def rollback(self):
        self.findings.clear()
