import pytest
from hypothesis import settings

from pmsim import section as se

# exact arithmetic is slow and must be reproducible
settings.register_profile("exact", deadline=None, derandomize=True)
settings.load_profile("exact")


@pytest.fixture(scope="session")
def section():
    return se.default_section()
