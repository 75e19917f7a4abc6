from incoherent.harness.bus import ExperimentBus  # noqa
from incoherent.harness.findings import BoundChecked  # noqa
from incoherent.harness.findings import RunCompleted  # noqa
from incoherent.harness.findings import TableComputed  # noqa
from incoherent.harness.messages import Experiment  # noqa
from incoherent.harness.messages import Finding  # noqa
from incoherent.harness.recorder import RunRecorder  # noqa
