import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session", autouse=True)
def basis_cache(tmp_path_factory):
    """Keep Stokes basis files out of the user's cache directory."""
    path = tmp_path_factory.mktemp("stokes-cache")
    old = os.environ.get("NLBOUSSINESQ_CACHE")
    os.environ["NLBOUSSINESQ_CACHE"] = str(path)
    yield path
    if old is None:
        os.environ.pop("NLBOUSSINESQ_CACHE", None)
    else:
        os.environ["NLBOUSSINESQ_CACHE"] = old


@pytest.fixture(scope="session")
def mesh16():
    from nlboussinesq.mesh import Mesh

    return Mesh(16)


@pytest.fixture(scope="session")
def mesh32():
    from nlboussinesq.mesh import Mesh

    return Mesh(32)


@pytest.fixture(scope="session")
def basis32(mesh32):
    from nlboussinesq.stokes import build_basis

    return build_basis(mesh32, 16)


@pytest.fixture(scope="session")
def basis16(mesh16):
    from nlboussinesq.stokes import build_basis

    return build_basis(mesh16, 16)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
