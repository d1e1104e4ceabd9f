from fractions import Fraction

import pytest

from higherzhu.voa import State, VertexAlgebra

A = State.basis((1,))


@pytest.fixture(scope="session")
def heis():
    return VertexAlgebra.heisenberg(8)


@pytest.fixture(scope="session")
def vir():
    return VertexAlgebra.virasoro(Fraction(1, 2), 8)


@pytest.fixture(scope="session")
def a():
    return A


@pytest.fixture
def fresh_heis():
    """An algebra with empty memo tables, for cache tests."""
    return VertexAlgebra.heisenberg(6)
