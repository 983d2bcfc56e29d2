import numpy as np
import pytest

from qicalc import BlockAlgebra, DensityState, pure_state, tensor_many


def bell_pair():
    """Two qubits with the maximally entangled state."""
    tp = tensor_many([BlockAlgebra((2,)), BlockAlgebra((2,))])
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1.0 / np.sqrt(2.0)
    return tp, pure_state(tp.algebra, 0, vec)


def classical_joint_state(tp, joint):
    """State of a commutative tensor product from a joint probability array."""
    joint = np.asarray(joint, dtype=float)
    blocks = [np.array([[joint[bt] + 0j]]) for bt in tp.block_tuples]
    return DensityState(tp.algebra, blocks)


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
