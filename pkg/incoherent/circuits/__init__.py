from incoherent.circuits.base import GATES  # noqa
from incoherent.circuits.base import Circuit  # noqa
from incoherent.circuits.base import GateSlot  # noqa
from incoherent.circuits.base import ensemble_slot  # noqa
from incoherent.circuits.base import exact_slot  # noqa
from incoherent.circuits.base import injected_t_slot  # noqa
from incoherent.circuits.protocols import ExactAveraged  # noqa
from incoherent.circuits.protocols import ExperimentResult  # noqa
from incoherent.circuits.protocols import FixedRealization  # noqa
from incoherent.circuits.protocols import ProtocolKind  # noqa
from incoherent.circuits.protocols import Resampled  # noqa
from incoherent.circuits.protocols import Systematic  # noqa
from incoherent.circuits.protocols import run_protocol  # noqa
from incoherent.circuits.protocols import scaling_sweep  # noqa
from incoherent.circuits.protocols import toy_circuit  # noqa
from incoherent.circuits.simulate import averaged_expectation  # noqa
from incoherent.circuits.simulate import averaged_state  # noqa
from incoherent.circuits.simulate import ideal_expectation  # noqa
from incoherent.circuits.simulate import ideal_state  # noqa
from incoherent.circuits.simulate import sample_realization  # noqa
