import pytest

from su3paths import get_graph, shipped_cells


@pytest.fixture(scope="session")
def a2():
    return get_graph("a2")


@pytest.fixture(scope="session")
def a3():
    return get_graph("a3")


@pytest.fixture(scope="session")
def e5():
    return get_graph("e5")


@pytest.fixture(scope="session")
def a2_cells(a2):
    return shipped_cells(a2)


@pytest.fixture(scope="session")
def e5_cells(e5):
    return shipped_cells(e5)
