__version__ = "0.1a1"

from incoherent.channels import Channel  # noqa
from incoherent.circuits import Circuit  # noqa
from incoherent.ensembles import MixedUnitaryEnsemble  # noqa
from incoherent.state_injection import AncillaState  # noqa
