from incoherent.channels.base import Channel  # noqa
from incoherent.channels.base import ChannelKind  # noqa
from incoherent.channels.base import ChoiMatrix  # noqa
from incoherent.channels.base import apply  # noqa
from incoherent.channels.base import channel_from_kraus  # noqa
from incoherent.channels.base import channel_from_unitary  # noqa
from incoherent.channels.base import compose  # noqa
from incoherent.channels.base import compose_all  # noqa
from incoherent.channels.base import difference  # noqa
from incoherent.channels.base import identity_channel  # noqa
from incoherent.channels.base import mix  # noqa
from incoherent.channels.base import to_choi  # noqa
from incoherent.channels.norms import diamond_norm  # noqa
from incoherent.channels.norms import diamond_norm_diff  # noqa
from incoherent.channels.norms import induced_one_norm_diff  # noqa
