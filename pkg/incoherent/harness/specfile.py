"""
Line-numbered parsing of experiment configs, circuit files and ancilla lists.

All three share one grammar::

    # comment
    [section]
    key = value   # trailing comment

Values are numbers, comma-separated lists or words. Angles are radians and
may be written with ``pi`` (``pi/8``, ``-3*pi/4``); degrees are rejected.
"""
import hashlib
import re
import typing as t
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path

import numpy as np

from incoherent import linalg
from incoherent.circuits.base import GATES
from incoherent.circuits.base import Circuit
from incoherent.circuits.base import GateSlot
from incoherent.circuits.base import ensemble_slot
from incoherent.circuits.base import exact_slot
from incoherent.circuits.base import injected_t_slot
from incoherent.ensembles import MixedUnitaryEnsemble
from incoherent.ensembles import ZRotationSpec
from incoherent.ensembles import z_rotation_ensemble
from incoherent.exceptions import ConfigError
from incoherent.exceptions import IncoherentError
from incoherent.exceptions import SpecParseError
from incoherent.linalg import Matrix
from incoherent.state_injection import AncillaEnsemble
from incoherent.state_injection import AncillaState

SECTION_RE = re.compile(r"^\[\s*([A-Za-z_][\w-]*)\s*\]$")
ENTRY_RE = re.compile(r"^([A-Za-z_][\w-]*)\s*=\s*(.*)$")
DEGREES_RE = re.compile(r"(deg|degs|degree|degrees|°)$", re.IGNORECASE)
PI_RE = re.compile(
    r"^(?P<sign>[+-]?)\s*(?:(?P<coef>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\s*\*\s*)?pi"
    r"(?:\s*/\s*(?P<den>\d+(?:\.\d*)?))?$"
)
TRUE_WORDS = {"true", "yes", "on", "1"}
FALSE_WORDS = {"false", "no", "off", "0"}


def parse_number(text: str) -> float:
    """
    :raises ValueError: on anything but a finite number of radians
    """
    value = text.strip()
    if DEGREES_RE.search(value):
        raise ValueError(f"'{value}': degrees are not accepted, give radians")
    match = PI_RE.match(value)
    if match:
        number = np.pi * float(match["coef"] or 1) / float(match["den"] or 1)
        number = -number if match["sign"] == "-" else number
    else:
        try:
            number = float(value)
        except ValueError:
            raise ValueError(f"'{value}' is not a number")
    if not np.isfinite(number):
        raise ValueError(f"'{value}' is not finite")
    return float(number)


@dataclass(frozen=True)
class Entry:
    value: str
    lineno: int


@dataclass
class Section:
    """
    One ``[name]`` block with typed accessors. Accessor errors carry the
    line of the offending entry.
    """

    name: str
    lineno: int
    path: str
    entries: dict[str, Entry] = field(default_factory=dict)

    def error(self, message: str, key: str | None = None) -> SpecParseError:
        lineno = self.entries[key].lineno if key in self.entries else self.lineno
        return SpecParseError(self.path, lineno, message)

    def check_keys(self, allowed: t.Iterable[str]) -> None:
        allowed = set(allowed)
        for key in self.entries:
            if key not in allowed:
                raise self.error(f"unknown key '{key}' in [{self.name}]", key)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def _raw(self, key: str) -> str:
        try:
            return self.entries[key].value
        except KeyError:
            raise self.error(f"missing key '{key}' in [{self.name}]")

    def _convert(self, key: str, convert: t.Callable[[str], t.Any]) -> t.Any:
        try:
            return convert(self._raw(key))
        except ValueError as error:
            raise self.error(f"{key}: {error}", key)

    def string(self, key: str, default: str | None = None) -> str:
        if default is not None and key not in self:
            return default
        value = self._raw(key)
        if not value:
            raise self.error(f"{key}: empty value", key)
        return value

    def number(self, key: str, default: float | None = None) -> float:
        if default is not None and key not in self:
            return default
        return self._convert(key, parse_number)

    def integer(self, key: str, default: int | None = None) -> int:
        if default is not None and key not in self:
            return default
        return self._convert(key, _parse_int)

    def boolean(self, key: str, default: bool | None = None) -> bool:
        if default is not None and key not in self:
            return default
        return self._convert(key, _parse_bool)

    def numbers(self, key: str) -> list[float]:
        return self._convert(key, lambda raw: [parse_number(x) for x in _items(raw)])

    def integers(self, key: str) -> list[int]:
        return self._convert(key, lambda raw: [_parse_int(x) for x in _items(raw)])

    def strings(self, key: str) -> list[str]:
        return self._convert(key, _items)


def _items(raw: str) -> list[str]:
    items = [item.strip() for item in raw.split(",")]
    if not all(items):
        raise ValueError(f"'{raw}' has an empty list item")
    return items


def _parse_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"'{text.strip()}' is not an integer")


def _parse_bool(text: str) -> bool:
    word = text.strip().lower()
    if word in TRUE_WORDS:
        return True
    if word in FALSE_WORDS:
        return False
    raise ValueError(f"'{text.strip()}' is not a boolean")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_sections(text: str, path: str) -> list[Section]:
    """
    :raises SpecParseError:
    """
    sections: list[Section] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = _strip_comment(line)
        if not content:
            continue
        if match := SECTION_RE.match(content):
            sections.append(Section(match[1].lower(), lineno, path))
            continue
        match = ENTRY_RE.match(content)
        if not match:
            raise SpecParseError(path, lineno, f"cannot parse '{content}'")
        if not sections:
            raise SpecParseError(path, lineno, "key outside of any [section]")
        key, value = match[1].lower(), match[2].strip()
        current = sections[-1]
        if key in current.entries:
            raise SpecParseError(
                path, lineno, f"duplicated key '{key}' in [{current.name}]"
            )
        current.entries[key] = Entry(value, lineno)
    return sections


def read_text(path: Path | str) -> str:
    """
    :raises SpecParseError: if the file can't be read
    """
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as error:
        raise SpecParseError(path, None, f"cannot read file: {error}")


# Circuit files


GATE_KEYS = ("qubits", "name", "target", "options", "probs", "repeat")


@dataclass(frozen=True, eq=False)
class GateRecord:
    """
    One ``[gate]`` section. ``ensemble`` is None for named gates.
    """

    index: int
    lineno: int
    label: str
    placement: tuple[int, ...]
    repeat: int
    matrix: Matrix
    ensemble: MixedUnitaryEnsemble | None = None
    injected: bool = False

    def slot(self) -> GateSlot:
        if self.injected:
            return injected_t_slot(self.placement[0])
        if self.ensemble is not None:
            return ensemble_slot(self.ensemble, *self.placement)
        return exact_slot(self.matrix, *self.placement)


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    path: str
    circuit: Circuit
    gates: tuple[GateRecord, ...]


def _z_gate(section: Section) -> tuple[str, Matrix, MixedUnitaryEnsemble | None]:
    theta = section.number("target")
    if "options" not in section:
        if "probs" in section:
            raise section.error("probs given without options", "probs")
        return f"z({theta:.6g})", linalg.z_rotation(theta), None
    angles = section.numbers("options")
    probs = section.numbers("probs") if "probs" in section else None
    try:
        ensemble = z_rotation_ensemble(ZRotationSpec(theta, tuple(angles)), probs)
    except IncoherentError as error:
        raise section.error(str(error), "probs" if probs else "options")
    return f"z({theta:.6g})", ensemble.target, ensemble


def _gate_record(section: Section, index: int, inject_t: bool) -> GateRecord:
    section.check_keys(GATE_KEYS)
    placement = tuple(section.integers("qubits"))
    repeat = section.integer("repeat", 1)
    if repeat < 1:
        raise section.error(f"repeat must be at least 1, got {repeat}", "repeat")
    if ("name" in section) == ("target" in section):
        raise section.error("a [gate] needs exactly one of 'name' or 'target'")

    ensemble = None
    injected = False
    if "name" in section:
        for key in ("options", "probs"):
            if key in section:
                raise section.error(f"'{key}' only applies to a 'target' gate", key)
        label = section.string("name").lower()
        if label not in GATES:
            raise section.error(
                f"unknown gate '{label}', expected one of {', '.join(GATES)}", "name"
            )
        matrix = GATES[label]
        injected = inject_t and label == "t"
    else:
        label, matrix, ensemble = _z_gate(section)

    record = GateRecord(
        index, section.lineno, label, placement, repeat, matrix, ensemble, injected
    )
    try:
        record.slot()
    except IncoherentError as error:
        raise section.error(str(error), "qubits")
    return record


def parse_circuit(text: str, path: str, inject_t: bool = False) -> CircuitSpec:
    """
    Builds the circuit of ``[gate]`` sections in file order, each repeated
    ``repeat`` times. With ``inject_t`` the ``t`` gates become slots realized
    by state injection.

    :raises SpecParseError:
    """
    sections = parse_sections(text, path)
    width = None
    gates: list[GateRecord] = []
    for section in sections:
        if section.name == "circuit":
            section.check_keys(["width"])
            width = section.integer("width")
        elif section.name == "gate":
            gates.append(_gate_record(section, len(gates) + 1, inject_t))
        else:
            raise section.error(f"unexpected section [{section.name}]")
    if not gates:
        raise SpecParseError(path, None, "no [gate] sections")
    if width is None:
        width = max(max(g.placement) for g in gates) + 1
    for g in gates:
        if max(g.placement) >= width:
            raise SpecParseError(
                path, g.lineno, f"qubits {g.placement} outside a {width}-qubit register"
            )
    slots = [g.slot() for g in gates for _ in range(g.repeat)]
    try:
        circuit = Circuit(width, tuple(slots))
    except IncoherentError as error:
        raise SpecParseError(path, None, str(error))
    return CircuitSpec(path, circuit, tuple(gates))


def load_circuit(path: Path | str, inject_t: bool = False) -> CircuitSpec:
    return parse_circuit(read_text(path), str(path), inject_t)


# Ancilla lists


def parse_ancillas(text: str, path: str) -> AncillaEnsemble:
    """
    One ``theta, tau`` pair (or whitespace separated) per line, radians

    :raises SpecParseError:
    """
    ancillas = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = _strip_comment(line)
        if not content:
            continue
        fields = [x for x in re.split(r"[,\s]+", content) if x]
        if len(fields) != 2:
            raise SpecParseError(
                path, lineno, f"expected 'theta, tau', got {len(fields)} values"
            )
        try:
            theta, tau = (parse_number(x) for x in fields)
        except ValueError as error:
            raise SpecParseError(path, lineno, str(error))
        ancillas.append(AncillaState(theta, tau))
    if not ancillas:
        raise SpecParseError(path, None, "no ancillas listed")
    return AncillaEnsemble(tuple(ancillas))


def load_ancillas(path: Path | str) -> AncillaEnsemble:
    return parse_ancillas(read_text(path), str(path))


# Experiment configs


@dataclass(frozen=True)
class ExperimentConfig:
    """
    A parsed ``[experiment]`` file. Relative paths in it resolve against the
    file's directory.
    """

    path: Path
    text: str
    section: Section

    @property
    def kind(self) -> str | None:
        if "kind" not in self.section:
            return None
        return self.section.string("kind").lower()

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def resolve(self, key: str) -> Path:
        target = Path(self.section.string(key))
        if not target.is_absolute():
            target = self.path.parent / target
        return target

    def echo(self) -> dict[str, str]:
        return {key: entry.value for key, entry in sorted(self.section.entries.items())}


def parse_config(text: str, path: Path | str) -> ExperimentConfig:
    """
    :raises SpecParseError:
    """
    sections = parse_sections(text, str(path))
    experiments = [s for s in sections if s.name == "experiment"]
    for section in sections:
        if section.name != "experiment":
            raise section.error(f"unexpected section [{section.name}]")
    if len(experiments) != 1:
        raise SpecParseError(
            path, None, f"expected one [experiment] section, got {len(experiments)}"
        )
    return ExperimentConfig(Path(path), text, experiments[0])


def load_config(path: Path | str) -> ExperimentConfig:
    return parse_config(read_text(path), path)


def config_error(config: ExperimentConfig, message: str) -> ConfigError:
    return SpecParseError(config.path, config.section.lineno, message)
