
import os

import pytest

def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: desk-scale acceptance runs, deselect with -m 'not slow'"
    )

@pytest.fixture
def octahedron_path():
    return os.path.join(os.path.dirname(__file__), "..", "test", "octahedron.off")
