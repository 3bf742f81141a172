import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tilekit.generators import (FaceSpec, LiftSpec, RevolutionSpec, make_face_tiling,  # noqa: E402
                                make_lifted_tiling, make_revolution_tile)


@pytest.fixture(scope="session")
def cube_lift():
    return make_lifted_tiling(LiftSpec("Cube"))


@pytest.fixture(scope="session")
def icosa_lift():
    return make_lifted_tiling(LiftSpec("Icosahedron"))


@pytest.fixture(scope="session")
def square_lift():
    return make_lifted_tiling(LiftSpec("SquareGrid"))


@pytest.fixture(scope="session")
def rev6():
    return make_revolution_tile(RevolutionSpec(m=6))


@pytest.fixture(scope="session")
def icosa_faces():
    return make_face_tiling(FaceSpec("Icosahedron"))


@pytest.fixture(scope="session")
def disphenoid_faces():
    return make_face_tiling(FaceSpec("Disphenoid"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
