import numpy as np
import pytest

from rfi_teleportation.groups import cyclic_group, dihedral_group, quaternion_group, symmetric_group
from rfi_teleportation.linalg import bell_state, dagger, ket_to_density, partial_trace, tensor
from rfi_teleportation.reps import make_representation

ROT120 = np.array([[-1 / 2, -np.sqrt(3) / 2],
                   [np.sqrt(3) / 2, -1 / 2]])
ROT90 = np.array([[0, -1],
                  [1, 0]])
FLIP = np.diag([1, -1])


@pytest.fixture(scope='session')
def z2():
    return cyclic_group(2)


@pytest.fixture(scope='session')
def s3():
    return symmetric_group(3)


@pytest.fixture(scope='session')
def s4():
    return symmetric_group(4)


@pytest.fixture(scope='session')
def d8():
    return dihedral_group(4)


@pytest.fixture(scope='session')
def q8():
    return quaternion_group()


@pytest.fixture(scope='session')
def small_groups():
    """Groups of order <= 24 used for the enumeration oracles."""
    return [cyclic_group(n) for n in (1, 2, 3, 4, 5, 6, 8, 12)] + [
        symmetric_group(3), symmetric_group(4), dihedral_group(4), dihedral_group(5), quaternion_group()]


@pytest.fixture(scope='session')
def s3_irrep(s3):
    """2-dimensional irreducible of S3: the transposition flips, the 3-cycle rotates by 120 degrees."""
    return make_representation(s3, [FLIP, ROT120])


@pytest.fixture(scope='session')
def d8_irrep(d8):
    return make_representation(d8, [ROT90, FLIP])


def brute_force_channel(rep, elements, frames, rho_in, procedure):
    """The defining sum over outcomes on the full three-system density matrix, without Kraus operators."""
    d = rep.dimension
    pi_A, pi_B = rep.matrices[frames.g_A], rep.matrices[frames.g_B]
    phis = [sum(tensor(np.eye(d)[i], U @ np.eye(d)[i]) for i in range(d)) / np.sqrt(d) for U in elements]
    alice = [np.kron(pi_A, pi_A) @ phi for phi in phis]
    bob = [np.kron(pi_B, pi_B) @ phi for phi in phis]
    joint = np.kron(rho_in, ket_to_density(bell_state(d)))
    keep = np.eye(d)
    out = np.zeros((d, d), dtype=complex)
    if procedure == 'speakable':
        for x, chi in enumerate(alice):
            P = np.kron(ket_to_density(chi), keep)
            C = pi_B @ elements[x].T @ dagger(pi_B)
            out += C @ partial_trace(P @ joint @ P, (d * d, d), 'first') @ dagger(C)
        return out
    decohered = sum(np.kron(ket_to_density(chi), keep) @ joint @ np.kron(ket_to_density(chi), keep) for chi in alice)
    for y, xi in enumerate(bob):
        Q = np.kron(ket_to_density(xi), keep)
        C = pi_B @ elements[y].T @ dagger(pi_B)
        out += C @ partial_trace(Q @ decohered @ Q, (d * d, d), 'first') @ dagger(C)
    return out
