import pytest

from rotcav.core import AtomSpec, CavitySpec, MotionSpec

D = 1e-29


@pytest.fixture
def iso_atom():
    return AtomSpec.isotropic(1e7, D)


@pytest.fixture
def scenario1():
    """Atom, motion and tuned cavity of the first reference scenario."""
    atom = AtomSpec.isotropic(1e7, D)
    motion = MotionSpec(5e-8, 5e9)
    return atom, motion, CavitySpec(5e9 - 1e7, 1e7, 1e-14)


@pytest.fixture
def scenario2():
    atom = AtomSpec.isotropic(2.5e9, D)
    motion = MotionSpec(5e-8, 5e9)
    return atom, motion, CavitySpec(2.5e9, 1e7, 1e-14)
