import pytest

from incoherent.exceptions import InvalidMessageError
from incoherent.exceptions import RecorderContextError
from incoherent.harness.recorder import RunRecorder
from tests.fixtures.harness import Tracked
from tests.fixtures.scenarios.counting import Counted
from tests.fixtures.scenarios.counting import CountExperiment


class FakeException(Exception):
    pass


class TestRunRecorder:
    """
    Uses the counting scenario
    """

    def test_empty_context(self, recorder: RunRecorder):
        with recorder:
            pass

    def test_empty_nested_context(self, recorder: RunRecorder):
        with recorder:
            with recorder:
                pass
        assert not recorder.stack

    def test_commit_run(
        self,
        recorder: RunRecorder,
        count_runner: Tracked,
        counted_listener: Tracked,
    ):
        with recorder:
            recorder.run(CountExperiment(2))
            assert not counted_listener.calls
        assert count_runner.calls == [CountExperiment(2)]
        assert [f.value for f in counted_listener.calls] == [0, 1]

    def test_failed_run_discards_findings(
        self,
        recorder: RunRecorder,
        count_runner: Tracked,
        counted_listener: Tracked,
    ):
        with pytest.raises(RuntimeError):
            with recorder:
                recorder.run(CountExperiment(2, fail=True))
        assert len(count_runner.calls) == 1
        assert not counted_listener.calls
        assert not recorder.stack

    def test_committing_nested_run(
        self,
        recorder: RunRecorder,
        counted_listener: Tracked,
    ):
        with recorder:
            with recorder:
                recorder.emit(Counted(1))
            assert not counted_listener.calls
            recorder.emit(Counted(2))
        assert [f.value for f in counted_listener.calls] == [1, 2]

    def test_rollback_nested_run(
        self,
        recorder: RunRecorder,
        counted_listener: Tracked,
    ):
        with recorder:
            recorder.emit(Counted(1))
            try:
                with recorder:
                    recorder.emit(Counted(2))
                    raise FakeException()
            except FakeException:
                pass
            recorder.emit(Counted(3))
        assert [f.value for f in counted_listener.calls] == [1, 3]

    def test_rollback_outer_run_discards_nested_findings(
        self,
        recorder: RunRecorder,
        counted_listener: Tracked,
    ):
        with pytest.raises(FakeException):
            with recorder:
                with recorder:
                    recorder.emit(Counted(1))
                raise FakeException()
        assert not counted_listener.calls

    def test_emit_needs_a_context(self, recorder: RunRecorder):
        with pytest.raises(RecorderContextError):
            recorder.emit(Counted(1))

    def test_only_messages_are_accepted(self, recorder: RunRecorder):
        with recorder:
            with pytest.raises(InvalidMessageError):
                recorder.emit(CountExperiment(1))
            with pytest.raises(InvalidMessageError):
                recorder.run(Counted(1))
