from hypothesis import settings

from tests.fixtures.files import *  # noqa
from tests.fixtures.harness import *  # noqa
from tests.fixtures.linalg import *  # noqa
from tests.fixtures.scenarios.counting import *  # noqa

settings.register_profile("default", max_examples=50, deadline=None)
settings.register_profile("ci", max_examples=1000, deadline=None)
settings.load_profile("default")
