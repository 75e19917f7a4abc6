import typing as t
from dataclasses import dataclass
from dataclasses import field

from incoherent.harness.messages import Finding

Cell = t.Union[str, int, float, bool, None]


@dataclass(frozen=True)
class TableComputed(Finding):
    """
    A result table. ``table`` is empty for an experiment's main table and
    names the extra tables (e.g. the injection scaling sweep).
    """

    NAME = "table-computed"

    experiment: str
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]
    footer: tuple[str, ...] = ()
    table: str = ""


@dataclass(frozen=True)
class BoundChecked(Finding):
    """
    A measured quantity compared with the bound that must cap it
    """

    NAME = "bound-checked"

    experiment: str
    label: str
    measured: float
    bound: float
    slack: float = 1e-6

    @property
    def passed(self) -> bool:
        return self.measured <= self.bound + self.slack


@dataclass(frozen=True)
class RunCompleted(Finding):
    """
    Emitted after the runner returns, still inside the recorder
    """

    NAME = "run-completed"

    experiment: str
    seed: int
    parameters: dict[str, t.Any] = field(default_factory=dict, hash=False)
