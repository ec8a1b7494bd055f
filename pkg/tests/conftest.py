import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import fixture_instance, storage_instance, write_instance_files  # noqa: E402

#: external solver template used throughout the tests (module form avoids
#: depending on the console script being on PATH)
SHIM_TEMPLATE = f"{sys.executable} -m ucdispatch.mipshim {{model}} {{solution}}"


@pytest.fixture
def fixture_inst():
    return fixture_instance()


@pytest.fixture
def storage_inst():
    return storage_instance()


@pytest.fixture
def fixture_files(tmp_path):
    return write_instance_files(fixture_instance(), tmp_path / "data")
