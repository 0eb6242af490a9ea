from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from coxflat.cayley import CoxeterGroup  # noqa: E402
from coxflat.diagram import INF, dihedral, direct_sum, named, triangle  # noqa: E402


def orders(M):
    return [[M.order(i, j) for j in range(M.rank)] for i in range(M.rank)]


def dinf_square():
    """D_inf x D_inf with generators s, t | u, v."""
    return direct_sum(dihedral(INF, ("s", "t")), dihedral(INF, ("u", "v")))


MATRICES = {
    "A2": lambda: named("A2"),
    "333": lambda: triangle(3, 3, 3),
    "244": lambda: triangle(2, 4, 4),
    "DD": dinf_square,
}


@pytest.fixture(scope="session")
def groups():
    return {k: CoxeterGroup(f()) for k, f in MATRICES.items()}
