import typing as t

if t.TYPE_CHECKING:
    from pathlib import Path


# --------------------------------------
# Base exceptions
# --------------------------------------


class ProgrammingError(BaseException):
    """
    Uncatchable error. Code violates some invariant
    """


class IncoherentError(Exception):
    """
    Library root exception
    """


class ConfigError(IncoherentError):
    """
    General configuration error
    """


# --------------------------------------
# Linear algebra
# --------------------------------------


class DimensionError(IncoherentError, ValueError):
    """
    Operand shapes don't fit the operation
    """


class NonFiniteError(IncoherentError, ValueError):
    """
    A matrix holds NaN or Inf entries
    """


class NotHermitianError(IncoherentError, ValueError):
    """
    The matrix must be Hermitian within tolerance
    """


class NotPositiveError(IncoherentError, ValueError):
    """
    The matrix must be positive semidefinite within tolerance
    """


class NotUnitaryError(IncoherentError, ValueError):
    """
    The matrix must be unitary within tolerance
    """


# --------------------------------------
# Channels
# --------------------------------------


class KrausCompletenessError(IncoherentError, ValueError):
    """
    The Kraus operators don't sum up to the identity
    """

    def __init__(self, deviation: float):
        self.message = f"Incomplete Kraus set: max |sum(A^+ A) - I| = {deviation:.3e}"
        self.deviation = deviation
        super().__init__(self.message)


class DistributionError(IncoherentError, ValueError):
    """
    Probabilities must be nonnegative and sum to one
    """


class DiamondDimensionError(IncoherentError, ValueError):
    """
    Diamond norms are computed for input dimension <= 4 only
    """


# --------------------------------------
# Ensembles
# --------------------------------------


class InvalidMixtureError(IncoherentError, ValueError):
    """
    No probability distribution reproduces the target angle
    """


# --------------------------------------
# Circuits
# --------------------------------------


class PlacementError(IncoherentError, ValueError):
    """
    Gate qubits are repeated, out of the register or don't fit the matrix
    """


class WidthCapError(IncoherentError, ValueError):
    """
    The register is too wide for the requested simulation mode
    """


class InvalidStateError(IncoherentError, ValueError):
    """
    Not a density matrix: Hermitian, PSD and trace one
    """


class InvalidObservableError(IncoherentError, ValueError):
    """
    Observables must be Hermitian
    """


class ProtocolError(IncoherentError, ValueError):
    """
    Invalid protocol parameters
    """


class InjectionCircuitError(IncoherentError, ValueError):
    """
    The circuit has no T slots to inject, or the ancilla ensemble is empty
    """


# --------------------------------------
# Experiment definitions
# --------------------------------------


class InvalidNameError(ConfigError, TypeError):
    """
    The Experiment.NAME must be a string
    """


class DuplicatedNameError(ConfigError, TypeError):
    """
    Two experiments have the same NAME
    """


class UnknownExperimentError(ConfigError):
    """
    No experiment registered under this name
    """


# --------------------------------------
# Runner configuration
# --------------------------------------


class DuplicatedRunnerError(ConfigError):
    """
    An Experiment can have only one runner
    """


class MissingRunnerError(ConfigError, RuntimeError):
    """
    No runner found for an Experiment
    """

    def __init__(self, experiment: t.Any):
        self.message = f"Missing runner for experiment: '{experiment}'"
        self.experiment = experiment
        super().__init__(self.message, self.experiment)


class FindingTypeError(ConfigError, TypeError):
    """
    Listeners subscribe to Finding classes only
    """


class InvalidMessageError(IncoherentError, TypeError):
    """
    The bus only handles Experiments and Findings
    """


# --------------------------------------
# Spec files
# --------------------------------------


class SpecParseError(ConfigError):
    """
    A config, circuit or ancilla file is malformed. Carries the location.
    """

    def __init__(self, path: "Path | str", lineno: int | None, message: str):
        where = f"{path}:{lineno}" if lineno is not None else f"{path}"
        self.message = f"{where}: {message}"
        self.path = path
        self.lineno = lineno
        super().__init__(self.message)


# --------------------------------------
# Run recorder
# --------------------------------------


class RecorderContextError(IncoherentError):
    """
    Code is emitting findings outside the recorder context or the
    open/close calls are unpaired.

        >>> recorder = RunRecorder(bus)
        >>> with recorder:
        ...     recorder.emit(finding)  # Good
        ... recorder.emit(finding)  # Bad
    """
