from dataclasses import dataclass

import pytest

from incoherent.exceptions import DuplicatedNameError
from incoherent.exceptions import InvalidNameError
from incoherent.harness.messages import Experiment
from incoherent.harness.messages import ExperimentMeta
from incoherent.harness.messages import Finding
from incoherent.harness.messages import FindingMeta
from incoherent.harness.messages import MessageMeta


def test_findings_are_registered():
    """
    Test findings are registered in the FindingMeta metaclass
    """

    class Measured(Finding):
        NAME = "measured"

    assert Measured is FindingMeta._findings["measured"]
    assert Measured is MessageMeta._messages["measured"]


def test_experiments_are_registered_as_subcommands():
    """
    Test experiments are registered by NAME but the base classes aren't
    """

    class Sweep(Experiment):
        NAME = "sweep"

    assert ExperimentMeta.registered()["sweep"] is Sweep
    assert Experiment not in ExperimentMeta.registered().values()


def test_name_autogeneration():
    """
    Test a NAME is automatically generated when not defined
    """

    class Measured(Finding):
        pass

    assert type(Measured.NAME) is str
    assert Measured.NAME.endswith(".Measured")


def test_name_collision_raises_exception():
    """
    Test two messages with the same name raise an exception
    """

    class Measured(Finding):
        NAME = "measured"

    with pytest.raises(DuplicatedNameError):

        class Estimated(Experiment):
            NAME = "measured"


def test_name_must_be_a_string():
    """
    Test non-string names are rejected
    """
    with pytest.raises(InvalidNameError):

        class Measured(Finding):
            NAME = 3


def test_messages_can_be_dataclasses():
    """
    Test findings can be dataclasses
    """

    @dataclass(frozen=True)
    class Measured(Finding):
        NAME = "measured"
        value: float

    finding = Measured(value=0.5)
    assert finding.NAME == "measured"
    assert finding.value == 0.5
