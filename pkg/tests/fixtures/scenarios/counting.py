from dataclasses import dataclass

import pytest

from incoherent.harness.bus import ExperimentBus
from incoherent.harness.messages import Experiment
from incoherent.harness.messages import Finding
from incoherent.harness.recorder import RunRecorder
from tests.fixtures.harness import Tracked

# --------------------------------------
# Messages definition
# --------------------------------------


@dataclass(frozen=True)
class CountExperiment(Experiment):
    NAME = "test-count"

    count: int
    fail: bool = False


@dataclass(frozen=True)
class Counted(Finding):
    NAME = "test-counted"

    value: int


@dataclass(frozen=True)
class CountedTwice(Counted):
    NAME = "test-counted-twice"


# --------------------------------------
# Fixtures
# --------------------------------------


def count(experiment: CountExperiment, recorder: RunRecorder) -> int:
    for value in range(experiment.count):
        recorder.emit(Counted(value))
    if experiment.fail:
        raise RuntimeError("counting failed")
    return experiment.count


@pytest.fixture()
def count_runner(bus: ExperimentBus) -> Tracked:
    """
    A runner emitting ``Counted(0..count-1)``, then failing if asked to
    """
    runner = Tracked(count)
    bus.subscribe_runner(CountExperiment, runner)
    return runner


@pytest.fixture()
def counted_listener(bus: ExperimentBus) -> Tracked:
    listener = Tracked()
    bus.subscribe_finding(Counted, listener)
    return listener
