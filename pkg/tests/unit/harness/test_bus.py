import pytest

from incoherent.exceptions import DuplicatedRunnerError
from incoherent.exceptions import FindingTypeError
from incoherent.exceptions import InvalidMessageError
from incoherent.exceptions import MissingRunnerError
from incoherent.harness.bus import ExperimentBus
from incoherent.harness.messages import Finding
from incoherent.harness.recorder import RunRecorder
from tests.fixtures.harness import Tracked
from tests.fixtures.scenarios.counting import Counted
from tests.fixtures.scenarios.counting import CountedTwice
from tests.fixtures.scenarios.counting import CountExperiment
from tests.fixtures.scenarios.counting import count


def test_bus_runs_experiments(recorder: RunRecorder, count_runner: Tracked):
    """
    Test simple runner configuration
    """
    experiment = CountExperiment(2)
    with recorder:
        assert recorder.run(experiment) == 2
    assert count_runner.calls == [experiment]


def test_bus_dispatches_findings(recorder: RunRecorder, counted_listener: Tracked):
    """
    Test simple listener configuration
    """
    finding = Counted(7)
    with recorder:
        recorder.emit(finding)
    assert counted_listener.calls == [finding]


def test_missing_runner_raises_error(recorder: RunRecorder):
    """
    Test experiments must have runners
    """
    with pytest.raises(MissingRunnerError):
        with recorder:
            recorder.run(CountExperiment(1))


def test_missing_listener_is_fine(recorder: RunRecorder):
    """
    Test findings don't require listeners
    """
    with recorder:
        recorder.emit(Counted(1))


def test_runs_emitting_findings(
    recorder: RunRecorder, count_runner: Tracked, counted_listener: Tracked
):
    """
    Test findings reach listeners in emission order
    """
    with recorder:
        recorder.run(CountExperiment(3))
    assert [f.value for f in counted_listener.calls] == [0, 1, 2]


def test_listeners_receive_subclasses(
    bus: ExperimentBus,
    recorder: RunRecorder,
    counted_listener: Tracked,
    listener: Tracked,
):
    """
    Test subscribing to a finding means subscribing to all its children
    """
    bus.subscribe_finding(Finding, listener)
    finding = CountedTwice(4)
    with recorder:
        recorder.emit(finding)
    assert counted_listener.calls == [finding]
    assert listener.calls == [finding]


def test_exact_listeners_run_first(bus: ExperimentBus, recorder: RunRecorder):
    """
    Test listeners of the finding class run before those of its parents
    """
    order = []
    bus.subscribe_finding(Counted, lambda f: order.append("parent"))
    bus.subscribe_finding(CountedTwice, lambda f: order.append("exact"))
    with recorder:
        recorder.emit(CountedTwice(1))
    assert order == ["exact", "parent"]


def test_listener_subscribed_twice_runs_once(
    bus: ExperimentBus, recorder: RunRecorder, listener: Tracked
):
    """
    Test duplicated subscriptions are ignored
    """
    bus.subscribe_finding(Counted, listener)
    bus.subscribe_finding(Counted, listener)
    bus.subscribe_finding(CountedTwice, listener)
    with recorder:
        recorder.emit(CountedTwice(1))
    assert len(listener.calls) == 1


def test_failing_listener_doesnt_stop_the_others(
    bus: ExperimentBus, recorder: RunRecorder, listener: Tracked, caplog
):
    """
    Test listener exceptions are logged and the next listener still runs
    """

    def broken(finding):
        raise ValueError("broken listener")

    bus.subscribe_finding(Counted, broken)
    bus.subscribe_finding(Counted, listener)
    with recorder:
        recorder.emit(Counted(1))
    assert len(listener.calls) == 1
    assert "Exception handling finding 'test-counted'" in caplog.text


def test_one_runner_per_experiment(bus: ExperimentBus, count_runner: Tracked):
    """
    Test a second runner is rejected and the same one is ignored
    """
    bus.subscribe_runner(CountExperiment, count_runner)
    with pytest.raises(DuplicatedRunnerError):
        bus.subscribe_runner(CountExperiment, count)


def test_subscriptions_check_message_types(bus: ExperimentBus):
    """
    Test runners need experiment classes and listeners finding classes
    """
    with pytest.raises(InvalidMessageError):
        bus.subscribe_runner(Counted, count)
    with pytest.raises(FindingTypeError):
        bus.subscribe_finding(CountExperiment, print)
    with pytest.raises(FindingTypeError):
        bus.subscribe_finding(Counted(1), print)
