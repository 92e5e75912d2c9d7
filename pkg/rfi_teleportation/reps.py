"""
DESCRIPTION:
    Unitary representations of permutation groups, their characters, the
    permutation representation of a G-set, and the character test deciding
    whether a representation has an orthonormal basis permuted by the group.

COMMENTS:
    Existence of a G-equivariant orthonormal basis is decided exactly by the
    integer decomposition of the character into basic permutation characters.
    The basis itself is found by a randomized orbit construction whose failure
    only means UNKNOWN.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from rfi_teleportation.config import DEFAULT_SEED, ONB_RETRIES
from rfi_teleportation.errors import (ConstructionFailedError, InfeasibleError,
                                      NotARepresentationError, ValidationError)
from rfi_teleportation.groups import GSet, PermGroup, coset_space, fixed_point_count, subgroups_up_to_conjugacy
from rfi_teleportation.linalg import as_matrix, as_tolerance, dagger, is_unitary, max_abs_diff

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Representation:
    """
    A unitary representation, given on generators and evaluated on every element.

    Attributes:
    - group: the PermGroup.
    - dimension: size of the carrier space.
    - generator_matrices: (n_generators, d, d) array.
    - matrices: (order, d, d) array in the group's element order.
    """
    group: PermGroup = field(repr=False, compare=False)
    dimension: int
    generator_matrices: np.ndarray = field(repr=False, compare=False)
    matrices: np.ndarray = field(repr=False, compare=False)

    def matrix(self, g):
        return self.matrices[g]

    @property
    def is_real(self):
        return bool(np.all(np.abs(self.matrices.imag) == 0))


def make_representation(G, generator_matrices, tol=None, dimension=None):
    """
    Evaluates generator matrices on every element along the breadth-first words.

    Parameters:
    - G: PermGroup.
    - generator_matrices: one unitary matrix per generator of G.
    - tol: Tolerance or float.
    - dimension: required only when G has no generators.

    Returns:
    - Representation.

    Raises:
    - ValidationError for a non-unitary or misshaped generator matrix.
    - NotARepresentationError when two words for one element give different matrices.
    """
    tol = as_tolerance(tol)
    if len(generator_matrices) != len(G.generators):
        raise ValidationError(f"Error: expected {len(G.generators)} generator matrices, got {len(generator_matrices)}.")
    mats = [as_matrix(M) for M in generator_matrices]
    dims = {M.shape for M in mats}
    if len(dims) > 1:
        raise ValidationError(f"Error: generator matrices have different shapes {sorted(dims)}.")
    if mats:
        d = mats[0].shape[0]
    elif dimension is not None:
        d = int(dimension)
    else:
        raise ValidationError("Error: a group without generators needs the dimension given explicitly.")
    for s, M in enumerate(mats):
        if M.shape != (d, d):
            raise ValidationError(f"Error: generator matrix {s} is not square.")
        ok, defect = is_unitary(M, tol)
        if not ok:
            raise ValidationError(f"Error: generator matrix {s} is not unitary (defect {defect:.3e}).")
    values, failures = G.extend_along_words(
        mats,
        combine=lambda s, x: s @ x,
        identity=np.eye(d, dtype=complex),
        equal=lambda a, b: max_abs_diff(a, b) <= tol.epsilon,
    )
    if failures:
        x, s = failures[0]
        raise NotARepresentationError(
            f"Error: not a representation of {G.label}: {len(failures)} relations fail (first at element {x}, generator {s}).")
    return Representation(G, d, np.array(mats).reshape(len(mats), d, d), np.array(values))


def trivial_representation(G, dimension=1):
    eye = np.eye(dimension, dtype=complex)
    return Representation(G, dimension, np.array([eye] * len(G.generators)).reshape(len(G.generators), dimension, dimension),
                          np.array([eye] * G.order))


def permutation_representation(X):
    """The representation of G on the free Hilbert space of the G-set X."""
    G = X.group
    matrices = np.zeros((G.order, X.size, X.size), dtype=complex)
    for g in range(G.order):
        matrices[g, X.action[g], np.arange(X.size)] = 1.0
    gens = np.array([matrices[G.index_of(s)] for s in G.generators]).reshape(len(G.generators), X.size, X.size)
    return Representation(G, X.size, gens, matrices)


def change_basis(rep, B, tol=None):
    """The representation g -> B† π(g) B for a unitary B."""
    B = as_matrix(B)
    ok, defect = is_unitary(B, tol)
    if not ok:
        raise ValidationError(f"Error: change of basis is not unitary (defect {defect:.3e}).")
    return Representation(rep.group, rep.dimension,
                          np.einsum('ji,gjk,kl->gil', B.conj(), rep.generator_matrices, B),
                          np.einsum('ji,gjk,kl->gil', B.conj(), rep.matrices, B))


def direct_sum(r1, r2):
    if not r1.group.same_as(r2.group):
        raise ValidationError("Error: representations of different groups.")
    gens = np.array([scipy.linalg.block_diag(a, b) for a, b in zip(r1.generator_matrices, r2.generator_matrices)])
    mats = np.array([scipy.linalg.block_diag(a, b) for a, b in zip(r1.matrices, r2.matrices)])
    d = r1.dimension + r2.dimension
    return Representation(r1.group, d, gens.reshape(len(gens), d, d), mats)


def tensor_product(r1, r2):
    if not r1.group.same_as(r2.group):
        raise ValidationError("Error: representations of different groups.")
    gens = np.array([np.kron(a, b) for a, b in zip(r1.generator_matrices, r2.generator_matrices)])
    mats = np.array([np.kron(a, b) for a, b in zip(r1.matrices, r2.matrices)])
    d = r1.dimension * r2.dimension
    return Representation(r1.group, d, gens.reshape(len(gens), d, d), mats)


@dataclass(frozen=True)
class ClassFunction:
    """
    One complex value per conjugacy class, in the group's class order.
    """
    group: PermGroup = field(repr=False, compare=False)
    values: tuple

    def __getitem__(self, c):
        return self.values[c]

    def __len__(self):
        return len(self.values)

    def as_integers(self, tol=None):
        """The values rounded to integers, or None if some value is not an integer within tolerance."""
        tol = as_tolerance(tol)
        rounded = []
        for v in self.values:
            v = complex(v)
            r = round(v.real)
            if abs(v.imag) > tol.epsilon or abs(v.real - r) > tol.epsilon:
                return None
            rounded.append(int(r))
        return tuple(rounded)

    def at(self, g):
        return self.values[self.group.class_of[g]]


def character(rep, tol=None):
    """
    Trace of π(g) on each conjugacy class.

    Raises:
    - NotARepresentationError when the trace is not constant on a class.
    """
    tol = as_tolerance(tol)
    traces = np.trace(rep.matrices, axis1=1, axis2=2)
    values = []
    for members in rep.group.conjugacy_classes:
        spread = max_abs_diff(traces[list(members)], traces[members[0]])
        if spread > tol.epsilon:
            raise NotARepresentationError(f"Error: trace varies by {spread:.3e} on the class of element {members[0]}.")
        values.append(complex(traces[members[0]]))
    return ClassFunction(rep.group, tuple(values))


def end_character(rep, tol=None):
    """Character of the conjugation action M -> π(g) M π(g)† on End(H): |χ(g)|²."""
    chi = character(rep, tol)
    return ClassFunction(rep.group, tuple(complex(abs(v) ** 2) for v in chi.values))


def gset_character(X):
    """Character of M(X), computed by counting fixed points."""
    G = X.group
    return ClassFunction(G, tuple(complex(fixed_point_count(X, members[0])) for members in G.conjugacy_classes))


def orbit_character_sum(X):
    """Number of orbits of X as the class-weighted mean of its character."""
    G = X.group
    chi = gset_character(X)
    total = sum(len(members) * chi[c] for c, members in enumerate(G.conjugacy_classes))
    return int(round((total / G.order).real))


def basic_permutation_characters(G, cap=None):
    """
    (subgroup, character of M(G/H)) for one H per conjugacy class of subgroups,
    largest coset space first; the last entry is the trivial character.
    """
    kwargs = {} if cap is None else {'cap': cap}
    return [(H, gset_character(coset_space(G, H))) for H in subgroups_up_to_conjugacy(G, **kwargs)]


@dataclass(frozen=True)
class FeasibilityCertificate:
    """
    Attributes:
    - feasible: whether the target is a non-negative integer sum of basic characters.
    - coefficients: the lexicographically least coefficient vector, or None.
    - bounds: per-basic coefficient bound used by the search.
    - nodes: search nodes explored.
    - target: integer target values, or None if the target was not integral.
    """
    feasible: bool
    coefficients: tuple = None
    bounds: tuple = ()
    nodes: int = 0
    target: tuple = None


def decompose_into_basics(target, basics, tol=None):
    """
    Exhaustive depth-first search for non-negative integers c_i with
    Σ c_i basic_i = target, in lexicographic order of c.

    Parameters:
    - target: ClassFunction.
    - basics: list of ClassFunction or of (Subgroup, ClassFunction).
    """
    tol = as_tolerance(tol)
    chars = [b[1] if isinstance(b, tuple) else b for b in basics]
    goal = target.as_integers(tol)
    if goal is None or any(v < 0 for v in goal):
        logger.info("Target character is not a non-negative integer vector: infeasible")
        return FeasibilityCertificate(False, None, (), 0, goal)
    rows = []
    for b in chars:
        ints = b.as_integers(tol)
        if ints is None or any(v < 0 for v in ints) or ints[0] < 1:
            raise ValidationError("Error: basic characters must be non-negative integers with positive degree.")
        rows.append(np.array(ints, dtype=np.int64))
    bounds = tuple(int(goal[0] // r[0]) for r in rows)
    nodes = 0

    def search(i, remaining, chosen):
        nonlocal nodes
        nodes += 1
        if i == len(rows):
            return chosen if not remaining.any() else None
        for c in range(bounds[i] + 1):
            left = remaining - c * rows[i]
            if (left < 0).any():
                break
            found = search(i + 1, left, chosen + (c,))
            if found is not None:
                return found
        return None

    coefficients = search(0, np.array(goal, dtype=np.int64), ())
    feasible = coefficients is not None
    logger.info(f"Character {goal}: {'feasible ' + str(coefficients) if feasible else 'infeasible'} ({nodes} nodes)")
    return FeasibilityCertificate(feasible, coefficients, bounds, nodes, goal)


def _is_zero_one_permutation(M, tol):
    rounded = np.rint(M.real)
    if max_abs_diff(M, rounded) > tol.epsilon or np.any((rounded != 0) & (rounded != 1)):
        return None
    if not (np.all(rounded.sum(axis=0) == 1) and np.all(rounded.sum(axis=1) == 1)):
        return None
    return np.argmax(rounded, axis=0)


def is_permutation_basis(rep, tol=None):
    """
    The G-set permuted by the standard basis, if every π(g) is a 0/1
    permutation matrix; otherwise None.
    """
    tol = as_tolerance(tol)
    action = np.empty((rep.group.order, rep.dimension), dtype=np.int64)
    for g in range(rep.group.order):
        images = _is_zero_one_permutation(rep.matrices[g], tol)
        if images is None:
            return None
        action[g] = images
    return GSet(rep.group, rep.dimension, action, 'user')


def _coset_representatives(X):
    reps = [-1] * X.size
    for g in range(X.group.order):
        k = int(X.action[g, 0])
        if reps[k] < 0:
            reps[k] = g
    return reps


def _random_vector(rng, d, real):
    v = rng.standard_normal(d)
    if not real:
        v = v + 1j * rng.standard_normal(d)
    return v.astype(complex)


def _orbit_basis(rep, basics, coefficients, rng, real, tol):
    G, d = rep.group, rep.dimension
    blocks = []
    complement = np.eye(d, dtype=complex)
    for (H, _), count in zip(basics, coefficients):
        if count == 0:
            continue
        X = coset_space(G, H)
        transversal = _coset_representatives(X)
        average = rep.matrices[list(H.members)].mean(axis=0)
        for _ in range(count):
            v = average @ complement @ dagger(complement) @ _random_vector(rng, d, real)
            if np.linalg.norm(v) < 1e-6:
                return None
            orbit = np.stack([rep.matrices[t] @ v for t in transversal], axis=1)
            gram = dagger(orbit) @ orbit
            eigenvalues, eigenvectors = np.linalg.eigh(gram)
            if eigenvalues.min() < 1e-8:
                return None
            # symmetric orthogonalization commutes with the permutation action
            block = orbit @ eigenvectors @ np.diag(eigenvalues ** -0.5) @ dagger(eigenvectors)
            blocks.append(block)
            remainder = complement - block @ (dagger(block) @ complement)
            expected = complement.shape[1] - block.shape[1]
            complement = scipy.linalg.orth(remainder) if expected > 0 else np.zeros((d, 0), dtype=complex)
            if complement.shape[1] != expected:
                return None
    return np.concatenate(blocks, axis=1)


def find_equivariant_onb(rep, tol=None, retries=ONB_RETRIES, seed=DEFAULT_SEED, cap=None):
    """
    Finds a unitary B with B†π(g)B a permutation matrix for every g.

    Returns:
    - (B, X): the change of basis and the G-set its columns carry.

    Raises:
    - InfeasibleError when the character is not a sum of basic permutation
      characters (no such basis exists).
    - ConstructionFailedError when the randomized search runs out of retries
      (existence undecided by this search).
    """
    tol = as_tolerance(tol)
    if seed < 0:
        raise ValidationError(f"Error: seed must be >= 0, got {seed}.")
    existing = is_permutation_basis(rep, tol)
    if existing is not None:
        return np.eye(rep.dimension, dtype=complex), existing
    basics = basic_permutation_characters(rep.group, cap=cap)
    certificate = decompose_into_basics(character(rep, tol), basics, tol)
    if not certificate.feasible:
        raise InfeasibleError("Error: the character is not a sum of basic permutation characters.", certificate)
    rng = np.random.default_rng(seed)
    real = rep.is_real
    for attempt in range(1, retries + 1):
        B = _orbit_basis(rep, basics, certificate.coefficients, rng, real, tol)
        if B is None or not is_unitary(B, tol)[0]:
            logger.debug(f"Orbit construction attempt {attempt} failed")
            continue
        X = is_permutation_basis(change_basis(rep, B, tol), tol)
        if X is not None:
            logger.info(f"Equivariant basis found after {attempt} attempt(s)")
            return B, X
    raise ConstructionFailedError(f"Error: no equivariant basis found in {retries} attempts.")
