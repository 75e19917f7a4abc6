import inspect
import logging
import typing as t
from collections import defaultdict

from incoherent.exceptions import DuplicatedRunnerError
from incoherent.exceptions import FindingTypeError
from incoherent.exceptions import InvalidMessageError
from incoherent.exceptions import MissingRunnerError
from incoherent.harness.messages import Experiment
from incoherent.harness.messages import Finding

if t.TYPE_CHECKING:
    from incoherent.harness.recorder import RunRecorder

logger = logging.getLogger(__name__)

Runner = t.Callable[[t.Any, "RunRecorder"], t.Any]
Listener = t.Callable[[t.Any], None]

#
# NOTE: subscribing to Finding means subscribing to all findings, and
# subscribing to a parent finding class means receiving its subclasses too.
# Listeners of the exact class run before listeners of its parents, then by
# subscription order.
#


class ExperimentBus:
    """
    Routes experiments to their runner and findings to their listeners
    """

    runners: dict[type[Experiment], Runner]
    listeners: dict[type[Finding], list[Listener]]

    def __init__(self):
        self.runners = {}
        self.listeners = defaultdict(list)

    def subscribe_runner(self, cls: type[Experiment], runner: Runner) -> None:
        """
        Set the runner for this experiment. Only one runner allowed.

        :raises InvalidMessageError: if ``cls`` isn't an Experiment class
        :raises DuplicatedRunnerError: if there is already a runner
        """
        if not (isinstance(cls, type) and issubclass(cls, Experiment)):
            raise InvalidMessageError(f"This is not an experiment class: '{cls}'")

        current = self.runners.get(cls, None)
        if current is None:
            self.runners[cls] = runner
        elif current == runner:
            logger.info(
                f"Ignoring duplicated subscribe of runner '{runner}' to '{cls}'"
            )
        else:
            raise DuplicatedRunnerError(
                f"Duplicated runner for experiment '{cls}'. "
                f"The runner '{runner}' overrides the current '{current}'"
            )

    def subscribe_finding(self, cls: type[Finding], listener: Listener) -> None:
        """
        Subscribe to a finding type. A finding may have multiple listeners

        :raises FindingTypeError:
        """
        if not (isinstance(cls, type) and issubclass(cls, Finding)):
            raise FindingTypeError(f"This is not a finding class: '{cls}'")

        if listener in self.listeners[cls]:
            logger.info(
                f"Ignoring duplicated subscribe of listener '{listener}' to '{cls}'"
            )
        else:
            self.listeners[cls].append(listener)

    def _run_experiment(self, experiment: Experiment, recorder: "RunRecorder") -> t.Any:
        """
        Calls the runner. Runner exceptions are propagated

        :raises InvalidMessageError: if this isn't an Experiment
        :raises MissingRunnerError: if no runner is configured for it
        """
        if not isinstance(experiment, Experiment):
            raise InvalidMessageError(f"This is not an experiment: '{experiment}'")

        try:
            runner = self.runners[type(experiment)]
        except KeyError:
            raise MissingRunnerError(experiment)

        logger.info(f"Running experiment '{experiment.NAME}'")
        return runner(experiment, recorder)

    def _dispatch_finding(self, finding: Finding) -> None:
        """
        Calls the finding listeners. Listener exceptions are captured and
        error-logged.

        :raises InvalidMessageError: if this isn't a Finding
        """
        if not isinstance(finding, Finding):
            raise InvalidMessageError(f"This is not a finding: '{finding}'")

        seen: set[int] = set()
        listeners: list[Listener] = []
        for finding_cls in inspect.getmro(type(finding)):
            for listener in self.listeners.get(finding_cls, []):
                if id(listener) not in seen:
                    listeners.append(listener)
                    seen.add(id(listener))

        logger.debug(f"Dispatching '{finding.NAME}': {len(listeners)} listeners")
        for listener in listeners:
            try:
                listener(finding)
            except Exception:
                logger.exception(f"Exception handling finding '{finding.NAME}'")
