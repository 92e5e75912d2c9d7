import numpy as np
import pytest
from numpy.testing import assert_allclose

from rfi_teleportation.errors import AmbiguousMatchError, CertificationError, ValidationError
from rfi_teleportation.groups import cyclic_group, natural_gset, symmetric_group
from rfi_teleportation.linalg import dagger, is_unitary
from rfi_teleportation.reps import change_basis, make_representation, permutation_representation
from rfi_teleportation.ueb import (Z2_ELEMENTS, Z2_PI_A, builtin_z2_example, commutes_with_rep, conjugate_ueb,
                                   construct_gueb_dim_le4, construct_gueb_from_hadamard, hadamard_ueb, is_hadamard,
                                   pauli_basis, two_parameter_unitary, verify_equivariance, verify_ueb, weyl_basis)

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def _natural(n):
    return permutation_representation(natural_gset(symmetric_group(n)))


def _fourier(n):
    w = np.exp(2j * np.pi / n)
    return np.array([[w ** (i * j) for j in range(n)] for i in range(n)]) / np.sqrt(n)


def test_builtin_basis_is_a_ueb():
    report = verify_ueb(Z2_ELEMENTS)
    assert report.valid
    assert report.unitarity_defect <= 1e-9
    assert report.orthogonality_defect <= 1e-9


def test_builtin_equivariance_equations():
    rep, gueb = builtin_z2_example()
    a = rep.group.index_of([1, 0])
    assert gueb.sigma[a].tolist() == [1, 0, 3, 2]
    assert gueb.sigma[0].tolist() == [0, 1, 2, 3]
    for i, j in enumerate([1, 0, 3, 2]):
        assert_allclose(Z2_PI_A @ Z2_ELEMENTS[i] @ dagger(Z2_PI_A), Z2_ELEMENTS[j], atol=1e-9)


def test_builtin_reflection_is_an_involution():
    assert_allclose(Z2_PI_A @ Z2_PI_A, np.eye(2), atol=1e-12)


@pytest.mark.parametrize('d', [2, 3, 4, 5])
def test_weyl_basis_is_a_ueb(d):
    assert verify_ueb(weyl_basis(d).elements).valid


def test_pauli_basis_is_a_ueb():
    assert verify_ueb(pauli_basis().elements).valid


def test_repeated_identity_fails_orthogonality():
    report = verify_ueb(np.array([np.eye(2)] * 4))
    assert not report.valid
    assert report.unitarity_defect == pytest.approx(0)
    assert report.orthogonality_defect == pytest.approx(2)


def test_wrong_element_count_is_rejected():
    with pytest.raises(ValidationError):
        verify_ueb(np.array([np.eye(2)] * 3))


def test_worst_unitary_offender_is_reported():
    elements = pauli_basis().elements.copy()
    elements[2, 0, 1] += 1e-3
    report = verify_ueb(elements)
    assert not report.valid
    assert report.worst_unitary_index == 2


def test_pauli_basis_is_not_equivariant_for_the_reflection():
    rep, _ = builtin_z2_example()
    assert verify_equivariance(pauli_basis().elements, rep) is None


def test_weyl_basis_is_equivariant_for_the_trivial_group():
    rep = make_representation(cyclic_group(1), [], dimension=3)
    sigma = verify_equivariance(weyl_basis(3).elements, rep)
    assert sigma.tolist() == [list(range(9))]


def test_ambiguous_match_is_an_error():
    rep, _ = builtin_z2_example()
    with pytest.raises(AmbiguousMatchError):
        verify_equivariance(Z2_ELEMENTS, rep, tol=10.0)


def test_two_parameter_n2():
    u = two_parameter_unitary(2, 1 / np.sqrt(2))
    assert u.b == pytest.approx(1j / np.sqrt(2))
    assert is_unitary(u.matrix)[0]
    assert commutes_with_rep(u.matrix, _natural(2))[0]


def test_two_parameter_n3_is_hadamard():
    u = two_parameter_unitary(3, 1 / np.sqrt(3))
    assert u.b == pytest.approx(np.exp(2j * np.pi / 3) / np.sqrt(3))
    assert is_hadamard(u.matrix)[0]


def test_two_parameter_n4():
    u = two_parameter_unitary(4, 0.5)
    assert u.b == pytest.approx(-0.5)
    assert_allclose(u.matrix, (2 * np.eye(4) - np.ones((4, 4))) / 2, atol=1e-12)


@pytest.mark.parametrize('n', [3, 4])
@pytest.mark.parametrize('sign', [1, -1])
def test_lower_boundary_forces_opposite_phases(n, sign):
    u = two_parameter_unitary(n, (n - 2) / n, phase_a=0.3, sign_choice=sign)
    alpha, beta = np.angle(u.a), np.angle(u.b)
    assert abs(np.exp(1j * beta) + np.exp(1j * alpha)) <= 1e-9


@pytest.mark.parametrize('n, abs_a', [(3, 0.2), (4, 0.4), (2, 0.0), (3, 1.2)])
def test_out_of_range_moduli_are_rejected(n, abs_a):
    with pytest.raises(ValidationError):
        two_parameter_unitary(n, abs_a)


def test_diagonal_case_is_rejected():
    with pytest.raises(ValidationError):
        two_parameter_unitary(3, 1.0)


def test_n_below_two_is_rejected():
    with pytest.raises(ValidationError):
        two_parameter_unitary(1, 1.0)


def test_commutes_with_rep():
    s3 = _natural(3)
    assert commutes_with_rep(two_parameter_unitary(3, 0.5).matrix, s3)[0]
    ok, defect = commutes_with_rep(_fourier(3), s3)
    assert not ok and defect > 0.1
    trivial = make_representation(cyclic_group(1), [], dimension=3)
    assert commutes_with_rep(np.arange(9).reshape(3, 3), trivial) == (True, 0.0)


@pytest.mark.parametrize('matrix, expected', [
    (HADAMARD, True),
    (_fourier(3), True),
    (np.eye(2), False),
    (np.eye(3), False),
])
def test_is_hadamard(matrix, expected):
    assert is_hadamard(matrix)[0] is expected


def test_real_hadamard_gives_a_ueb():
    ueb = hadamard_ueb(HADAMARD)
    assert len(ueb.elements) == 4
    assert verify_ueb(ueb.elements).valid
    assert ueb.provenance['diag_convention'] == 'column'


def test_hadamard_ueb_dimension_one():
    ueb = hadamard_ueb(np.ones((1, 1)))
    assert_allclose(ueb.elements, np.ones((1, 1, 1)))


def test_hadamard_ueb_rejects_non_hadamard():
    with pytest.raises(ValidationError):
        hadamard_ueb(np.eye(2))


@pytest.mark.parametrize('n', [2, 3, 4])
def test_construct_for_natural_action(n):
    rep = _natural(n)
    gueb = construct_gueb_dim_le4(rep)
    assert len(gueb.elements) == n * n
    assert verify_ueb(gueb.elements).valid
    G = rep.group
    for g in range(G.order):
        assert sorted(gueb.sigma[g].tolist()) == list(range(n * n))
        for h in range(G.order):
            assert gueb.sigma[G.product(g, h)].tolist() == gueb.sigma[g][gueb.sigma[h]].tolist()


def test_hadamard_label_action_permutes_both_indices():
    rep = _natural(3)
    gueb = construct_gueb_dim_le4(rep)
    G = rep.group
    for g in range(G.order):
        p = G.perms[g]
        expected = [p[i] * 3 + p[j] for i in range(3) for j in range(3)]
        assert gueb.sigma[g].tolist() == expected


def test_construct_rejects_dimension_five():
    with pytest.raises(ValidationError):
        construct_gueb_dim_le4(_natural(5))


def test_construct_rejects_non_permutation_basis(s3_irrep):
    with pytest.raises(ValidationError):
        construct_gueb_dim_le4(s3_irrep)


def test_construct_from_hadamard_needs_commuting_matrix():
    with pytest.raises(ValidationError):
        construct_gueb_from_hadamard(_natural(3), _fourier(3))


def test_construct_from_circulant_hadamard_for_cyclic_action():
    first_row = np.array([1, 1, 1, -1]) / 2
    circulant = np.array([[first_row[(j - i) % 4] for j in range(4)] for i in range(4)])
    rep = permutation_representation(natural_gset(cyclic_group(4)))
    gueb = construct_gueb_from_hadamard(rep, circulant)
    assert len(gueb.elements) == 16
    assert verify_ueb(gueb.elements).valid
    with pytest.raises(ValidationError):
        construct_gueb_from_hadamard(_natural(4), circulant)


def test_conjugate_ueb_carries_equivariance_back():
    rep = _natural(4)
    q, r = np.linalg.qr(np.random.default_rng(5).standard_normal((4, 4)))
    B = q * np.sign(np.diag(r))
    rotated = change_basis(rep, B.T)
    gueb = conjugate_ueb(construct_gueb_dim_le4(rep), B, rotated)
    assert verify_ueb(gueb.elements).valid
    assert verify_equivariance(gueb.elements, rotated) is not None


def test_conjugate_ueb_checks_the_target_rep():
    rep = _natural(2)
    gueb = construct_gueb_dim_le4(rep)
    rotation = np.array([[np.cos(0.3), -np.sin(0.3)], [np.sin(0.3), np.cos(0.3)]])
    with pytest.raises(CertificationError):
        conjugate_ueb(gueb, rotation, rep)
