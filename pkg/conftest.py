"""
Shared pytest fixtures: carriers and small molecule systems
"""

import pytest

from phasecover.core.atomic import MoleculeSystem
from phasecover.core.cover import build_bupu
from phasecover.core.group import GFunc, GroupCarrier, RelSepSet
from phasecover.frames.gabor import GaborSystem, gabor_molecule_system


@pytest.fixture
def z():
    return GroupCarrier.lattice(1)


@pytest.fixture
def z4():
    return GroupCarrier.cyclic(4)


@pytest.fixture
def z8():
    return GroupCarrier.cyclic(8)


@pytest.fixture
def delta8(z8):
    """Orthonormal delta atoms on Z_8"""
    nodes = RelSepSet(z8, tuple(z8.elements()))
    deltas = [GFunc.delta(z8, lam) for lam in nodes]
    return MoleculeSystem.build(nodes, deltas, deltas, canonical=True)


@pytest.fixture(scope="session")
def gabor16():
    return GaborSystem.gaussian(16, 2, 2)


@pytest.fixture(scope="session")
def gabor16_system(gabor16):
    return gabor_molecule_system(gabor16)


@pytest.fixture(scope="session")
def gabor16_partition(gabor16_system):
    centers = RelSepSet.regular(gabor16_system.carrier, [4, 4])
    return build_bupu(centers, "raised_cosine", 8, window=gabor16_system.window)
