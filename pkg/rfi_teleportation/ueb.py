"""
DESCRIPTION:
    Unitary error bases: verification, G-equivariance checks, the commuting
    two-parameter unitary, the Hadamard construction, and the constructor for
    permutation representations of dimension at most 4.

COMMENTS:
    Equivariance is exact matrix equality within tolerance, no phase freedom:
    π(g) U_i π(g)† must equal U_σg(i) entrywise.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from rfi_teleportation.config import MAX_DIMENSION_GUARANTEED
from rfi_teleportation.errors import AmbiguousMatchError, CertificationError, ValidationError
from rfi_teleportation.groups import make_group
from rfi_teleportation.linalg import as_matrix, as_tolerance, dagger, is_unitary, max_abs_diff
from rfi_teleportation.reps import Representation, is_permutation_basis, make_representation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnitaryErrorBasis:
    """
    Attributes:
    - dimension: d.
    - elements: (d², d, d) array.
    - provenance: how the basis was obtained ('method', 'diag_convention', 'hadamard').
    """
    dimension: int
    elements: np.ndarray = field(repr=False, compare=False)
    provenance: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class GEquivariantUEB:
    """
    A unitary error basis with the permutation action of the group on its labels.

    Attributes:
    - base: UnitaryErrorBasis.
    - rep: Representation it is equivariant for.
    - sigma: (order, d²) array, sigma[g] is the label permutation of element g.
    """
    base: UnitaryErrorBasis
    rep: Representation = field(repr=False, compare=False)
    sigma: np.ndarray = field(repr=False, compare=False)

    @property
    def elements(self):
        return self.base.elements

    @property
    def dimension(self):
        return self.base.dimension


@dataclass(frozen=True)
class UEBReport:
    valid: bool
    unitarity_defect: float
    orthogonality_defect: float
    worst_unitary_index: int
    worst_pair: tuple


@dataclass(frozen=True)
class TwoParameterUnitary:
    """The n x n matrix with diagonal a and off-diagonal b."""
    n: int
    a: complex
    b: complex
    matrix: np.ndarray = field(repr=False, compare=False)


def _as_elements(elements):
    elements = np.asarray(elements, dtype=complex)
    if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
        raise ValidationError(f"Error: expected a list of square matrices, got shape {elements.shape}.")
    d = elements.shape[1]
    if elements.shape[0] != d * d:
        raise ValidationError(f"Error: a unitary error basis in dimension {d} has {d * d} elements, got {elements.shape[0]}.")
    return elements


def verify_ueb(elements, tol=None):
    """
    Checks unitarity of every element and Tr(U_i† U_j) = d δ_ij.

    Returns:
    - UEBReport with the worst offenders.
    """
    tol = as_tolerance(tol)
    elements = _as_elements(elements)
    d = elements.shape[1]
    eye = np.eye(d)
    unitary_defects = [max_abs_diff(dagger(U) @ U, eye) for U in elements]
    gram = np.einsum('iab,jab->ij', elements.conj(), elements)
    off = np.abs(gram - d * np.eye(d * d))
    worst_pair = tuple(int(i) for i in np.unravel_index(np.argmax(off), off.shape))
    unitarity_defect = max(unitary_defects)
    orthogonality_defect = float(off.max())
    valid = unitarity_defect <= tol.epsilon and orthogonality_defect <= tol.epsilon * d
    return UEBReport(valid, unitarity_defect, orthogonality_defect, int(np.argmax(unitary_defects)), worst_pair)


def _match_conjugates(elements, M, tol):
    conjugated = M @ elements @ dagger(M)
    distance = np.max(np.abs(conjugated[:, None] - elements[None, :]), axis=(2, 3))
    images = []
    for i, row in enumerate(distance):
        candidates = np.flatnonzero(row <= tol.epsilon)
        if len(candidates) > 1:
            raise AmbiguousMatchError(
                f"Error: conjugate of element {i} matches elements {candidates.tolist()}; tolerance too large for this basis.")
        if len(candidates) == 0:
            logger.debug(f"Conjugate of element {i} matches nothing (closest at {row.min():.3e})")
            return None
        images.append(int(candidates[0]))
    return np.array(images, dtype=np.int64)


def verify_equivariance(elements, rep, tol=None):
    """
    Finds σ with π(g) U_i π(g)† = U_σg(i) for every element g.

    Returns:
    - sigma as an (order, d²) array, or None if the basis is not equivariant.

    Raises:
    - AmbiguousMatchError when a conjugate lies within tolerance of two elements.
    """
    tol = as_tolerance(tol)
    elements = _as_elements(elements)
    if rep.dimension != elements.shape[1]:
        raise ValidationError(f"Error: representation dimension {rep.dimension} differs from basis dimension {elements.shape[1]}.")
    G = rep.group
    labels = elements.shape[0]
    on_generators = []
    for s, M in enumerate(rep.generator_matrices):
        images = _match_conjugates(elements, M, tol)
        if images is None or len(set(images.tolist())) != labels:
            logger.info(f"Basis is not equivariant under generator {s}")
            return None
        on_generators.append(images)
    values, failures = G.extend_along_words(
        on_generators,
        combine=lambda s, x: s[x],
        identity=np.arange(labels, dtype=np.int64),
        equal=np.array_equal,
    )
    if failures:
        logger.info("Label permutations do not form a group action")
        return None
    sigma = np.array(values, dtype=np.int64).reshape(G.order, labels)
    for g in range(G.order):
        M = rep.matrices[g]
        if max_abs_diff(M @ elements @ dagger(M), elements[sigma[g]]) > tol.epsilon:
            logger.info(f"Equivariance fails on element {g} after extension")
            return None
    return sigma


def two_parameter_unitary(n, abs_a, phase_a=0.0, sign_choice=1, tol=None):
    """
    The unitary with diagonal a = |a| e^{i phase_a} and off-diagonal b, which
    commutes with every n x n permutation matrix.

    Parameters:
    - n: size, >= 2.
    - abs_a: |a| in [(n-2)/n, 1); |a| = 1 would force b = 0.
    - phase_a: phase of a.
    - sign_choice: +1 or -1, picks one of the two phases of b.

    Returns:
    - TwoParameterUnitary with |b|² = (1-|a|²)/(n-1) and Re(α*β) = ((2-n)/2)(|b|/|a|).
    """
    tol = as_tolerance(tol)
    if n < 2:
        raise ValidationError(f"Error: n must be >= 2, got {n}.")
    if sign_choice not in (1, -1):
        raise ValidationError(f"Error: sign_choice must be +1 or -1, got {sign_choice}.")
    lower = (n - 2) / n
    if abs_a <= 0:
        raise ValidationError("Error: |a| must be non-zero.")
    if abs_a < lower - tol.epsilon or abs_a > 1 + tol.epsilon:
        raise ValidationError(f"Error: |a| = {abs_a} lies outside [{lower}, 1].")
    abs_b_squared = (1 - abs_a ** 2) / (n - 1)
    if abs_b_squared <= tol.epsilon:
        raise ValidationError("Error: |a| = 1 forces b = 0; the two-parameter family needs b != 0.")
    abs_b = np.sqrt(abs_b_squared)
    cosine = np.clip((2 - n) / 2 * abs_b / abs_a, -1.0, 1.0)
    if 1 - abs(cosine) <= 64 * np.finfo(float).eps:
        # lower end of the interval: b is forced to -a|b|/|a|, arccos is ill-conditioned there
        cosine = np.sign(cosine)
    phase_b = phase_a + sign_choice * np.arccos(cosine)
    a = abs_a * np.exp(1j * phase_a)
    b = abs_b * np.exp(1j * phase_b)
    matrix = b * np.ones((n, n), dtype=complex) + (a - b) * np.eye(n)
    ok, defect = is_unitary(matrix, tol)
    if not ok:
        raise CertificationError(f"Error: two-parameter matrix is not unitary (defect {defect:.3e}).")
    return TwoParameterUnitary(n, complex(a), complex(b), matrix)


def commutes_with_rep(M, rep, tol=None):
    """Max over generators of |Mπ(g) - π(g)M|, and whether it is within tolerance."""
    tol = as_tolerance(tol)
    M = as_matrix(M)
    if M.shape != (rep.dimension, rep.dimension):
        raise ValidationError(f"Error: matrix shape {M.shape} does not match representation dimension {rep.dimension}.")
    defect = max((max_abs_diff(M @ P, P @ M) for P in rep.generator_matrices), default=0.0)
    return defect <= tol.epsilon, defect


def is_hadamard(M, tol=None):
    """Unitary with every entry of modulus 1/√n."""
    tol = as_tolerance(tol)
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValidationError(f"Error: expected a square matrix, got shape {M.shape}.")
    _, unitary_defect = is_unitary(M, tol)
    modulus_defect = float(np.max(np.abs(np.abs(M) - 1 / np.sqrt(M.shape[0]))))
    defect = max(unitary_defect, modulus_defect)
    return bool(defect <= tol.epsilon), defect


def _diag(M, k, convention):
    return np.diag(M[:, k] if convention == 'column' else M[k, :])


def _hadamard_elements(Hm, convention):
    n = Hm.shape[0]
    elements = []
    for i in range(n):
        for j in range(n):
            elements.append(n * Hm @ dagger(_diag(Hm, j, convention)) @ dagger(Hm) @ _diag(Hm.T, i, convention))
    return np.array(elements)


def hadamard_ueb(Hm, tol=None):
    """
    The basis U_(i,j) = n · H · diag(H,j)† · H† · diag(Hᵀ,i), label i*n + j.

    diag(M, k) takes the k-th column; if the result fails verify_ueb the
    row convention is tried. The convention used is kept in the provenance.
    """
    tol = as_tolerance(tol)
    Hm = as_matrix(Hm)
    ok, defect = is_hadamard(Hm, tol)
    if not ok:
        raise ValidationError(f"Error: not a Hadamard matrix (defect {defect:.3e}).")
    for convention in ('column', 'row'):
        elements = _hadamard_elements(Hm, convention)
        report = verify_ueb(elements, tol)
        if report.valid:
            return UnitaryErrorBasis(Hm.shape[0], elements,
                                     {'method': 'hadamard', 'diag_convention': convention, 'hadamard': Hm})
        logger.warning(f"Hadamard construction with the {convention} convention failed verification")
    raise CertificationError("Error: the Hadamard construction failed verification under both diag conventions.")


def construct_gueb_from_hadamard(rep, Hm, tol=None):
    """
    Hadamard construction for a permutation-basis representation with a
    Hadamard matrix commuting with it, certified by verify_equivariance.
    """
    tol = as_tolerance(tol)
    if is_permutation_basis(rep, tol) is None:
        raise ValidationError("Error: the representation is not given in a permutation basis.")
    Hm = as_matrix(Hm)
    ok, defect = commutes_with_rep(Hm, rep, tol)
    if not ok:
        raise ValidationError(f"Error: the Hadamard matrix does not commute with the representation (defect {defect:.3e}).")
    base = hadamard_ueb(Hm, tol)
    sigma = verify_equivariance(base.elements, rep, tol)
    if sigma is None:
        raise CertificationError("Error: the constructed basis is not equivariant.")
    return GEquivariantUEB(base, rep, sigma)


def construct_gueb_dim_le4(rep, tol=None):
    """
    G-equivariant UEB for a permutation-basis representation of dimension
    n <= 4, from the commuting Hadamard with |a| = 1/√n.
    """
    tol = as_tolerance(tol)
    n = rep.dimension
    if n > MAX_DIMENSION_GUARANTEED:
        raise ValidationError(
            f"Error: dimension {n} > {MAX_DIMENSION_GUARANTEED}; commuting Hadamards are only guaranteed up to "
            f"dimension {MAX_DIMENSION_GUARANTEED}. Supply one with construct_gueb_from_hadamard.")
    if n == 1:
        Hm = np.ones((1, 1), dtype=complex)
    else:
        Hm = two_parameter_unitary(n, 1 / np.sqrt(n), 0.0, 1, tol).matrix
    gueb = construct_gueb_from_hadamard(rep, Hm, tol)
    logger.info(f"Certified {n * n}-element G-equivariant UEB for {rep.group.label}")
    return gueb


def conjugate_ueb(gueb, B, rep, tol=None):
    """
    Carries a G-UEB built for B†πB back to π: U_i -> B U_i B†.
    The result is re-verified against rep.
    """
    tol = as_tolerance(tol)
    B = as_matrix(B)
    elements = B @ gueb.elements @ dagger(B)
    provenance = dict(gueb.base.provenance, change_of_basis=B)
    base = UnitaryErrorBasis(gueb.dimension, elements, provenance)
    if not verify_ueb(elements, tol).valid:
        raise CertificationError("Error: basis change broke the unitary error basis.")
    sigma = verify_equivariance(elements, rep, tol)
    if sigma is None:
        raise CertificationError("Error: basis change broke equivariance.")
    return GEquivariantUEB(base, rep, sigma)


def weyl_basis(d):
    """Shift-and-multiply basis X^a Z^b, label a*d + b."""
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    elements = [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) for a in range(d) for b in range(d)]
    return UnitaryErrorBasis(d, np.array(elements), {'method': 'user'})


def pauli_basis():
    elements = np.array([
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ], dtype=complex)
    return UnitaryErrorBasis(2, elements, {'method': 'user'})


### BUILT-IN EXAMPLE ###
SQRT2, SQRT3, SQRT6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)

Z2_PI_A = np.array([[SQRT3 / 2, 1 / 2],
                    [1 / 2, -SQRT3 / 2]], dtype=complex)

Z2_ELEMENTS = np.array([
    np.array([[1, 1], [-1, 1]]) / SQRT2,
    np.array([[1, -1], [1, 1]]) / SQRT2,
    np.array([[-SQRT2 - SQRT6, -SQRT2 + SQRT6], [-SQRT2 + SQRT6, SQRT2 + SQRT6]]) / 4,
    np.array([[SQRT2 - SQRT6, -SQRT2 - SQRT6], [-SQRT2 - SQRT6, -SQRT2 + SQRT6]]) / 4,
], dtype=complex)


def builtin_z2_example(tol=None):
    """
    Two orientations related by a half turn: Z2 acting on a qubit by a real
    reflection, with a four-element basis whose elements it swaps in pairs.

    Returns:
    - (rep, gueb) with sigma(a) = (0 1)(2 3).
    """
    tol = as_tolerance(tol)
    group = make_group(2, [[1, 0]], name='Z2')
    rep = make_representation(group, [Z2_PI_A], tol)
    base = UnitaryErrorBasis(2, Z2_ELEMENTS.copy(), {'method': 'builtin-z2'})
    if not verify_ueb(base.elements, tol).valid:
        raise CertificationError("Error: built-in Z2 basis is not a unitary error basis.")
    sigma = verify_equivariance(base.elements, rep, tol)
    if sigma is None:
        raise CertificationError("Error: built-in Z2 basis is not equivariant.")
    return rep, GEquivariantUEB(base, rep, sigma)
