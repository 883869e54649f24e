import sys

import pytest

from manyspheres.assembly import assemble_sphere, triangulate_sphere
from manyspheres.complexes.simplicial import SimplicialComplex
from manyspheres.heffter import make_spec


def torus7():
    """The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex(facets)


@pytest.fixture(scope="session")
def torus():
    return torus7()


@pytest.fixture(scope="session")
def spec5():
    return make_spec(5)


@pytest.fixture(scope="session")
def spec9():
    return make_spec(9, "2,2", "2,1,1")


@pytest.fixture(scope="session")
def sphere5(spec5):
    return assemble_sphere(spec5, 2)


@pytest.fixture(scope="session")
def zeros5(sphere5):
    return triangulate_sphere(sphere5, [0] * sphere5.registry_size)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
