"""
DESCRIPTION:
    Dense complex matrix and state helpers: unitarity and Hilbert-Schmidt
    checks, tensor products, Bell states, partial traces and fidelities.

    Matrices, state vectors and density matrices are plain complex numpy
    arrays. All comparisons are absolute and entrywise against one tolerance.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from rfi_teleportation.config import DEFAULT_TOLERANCE
from rfi_teleportation.errors import ValidationError


@dataclass(frozen=True)
class Tolerance:
    """Absolute entrywise tolerance."""
    epsilon: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if not self.epsilon > 0 or not np.isfinite(self.epsilon):
            raise ValidationError(f"Error: tolerance must be positive and finite, got {self.epsilon}.")

    def __float__(self):
        return float(self.epsilon)


def as_tolerance(tol):
    if tol is None:
        return Tolerance()
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol))


def as_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValidationError(f"Error: expected a matrix, got an array of shape {M.shape}.")
    if not np.all(np.isfinite(M)):
        raise ValidationError("Error: matrix has non-finite entries.")
    return M


def _as_square(M):
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValidationError(f"Error: expected a square matrix, got shape {M.shape}.")
    return M


def dagger(M):
    return np.conj(np.asarray(M)).T


def max_abs_diff(A, B):
    A, B = np.asarray(A), np.asarray(B)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A - B)))


def is_unitary(M, tol=None):
    """
    Checks M†M = I entrywise.

    Returns:
    - (ok, defect): defect is the max abs entry of M†M - I.
    """
    tol = as_tolerance(tol)
    M = _as_square(M)
    defect = max_abs_diff(dagger(M) @ M, np.eye(M.shape[0]))
    return defect <= tol.epsilon, defect


def hs_inner(A, B):
    """Hilbert-Schmidt inner product Tr(A†B)."""
    A, B = _as_square(A), _as_square(B)
    if A.shape != B.shape:
        raise ValidationError(f"Error: shape mismatch {A.shape} vs {B.shape}.")
    return complex(np.vdot(A, B))


def tensor(*factors):
    """Kronecker product, index (i_A, i_B) -> i_A * dim_B + i_B. Works for vectors and matrices."""
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors])


def basis_state(d, i):
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def bell_state(d):
    """(1/√d) Σ_i |i⟩⊗|i⟩."""
    if d < 1:
        raise ValidationError(f"Error: dimension must be >= 1, got {d}.")
    return np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)


def ket_to_density(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def partial_trace(rho, dims, which='second'):
    """
    Traces out one factor of a bipartite density matrix.

    Parameters:
    - rho: (d1*d2, d1*d2) matrix.
    - dims: (d1, d2).
    - which: 'first' or 'second', the factor that is traced out.
    """
    rho = _as_square(rho)
    d1, d2 = dims
    if d1 * d2 != rho.shape[0]:
        raise ValidationError(f"Error: dimension {rho.shape[0]} does not factor as {d1} x {d2}.")
    blocks = rho.reshape(d1, d2, d1, d2)
    if which == 'second':
        return np.einsum('ijkj->ik', blocks)
    if which == 'first':
        return np.einsum('ijil->jl', blocks)
    raise ValidationError(f"Error: which must be 'first' or 'second', got {which!r}.")


def fidelity(psi, rho, tol=None):
    """⟨ψ|ρ|ψ⟩ for a pure ψ, as a real number."""
    tol = as_tolerance(tol)
    psi = np.asarray(psi, dtype=complex)
    rho = _as_square(rho)
    if psi.shape[0] != rho.shape[0]:
        raise ValidationError(f"Error: state of dimension {psi.shape[0]} vs density matrix of dimension {rho.shape[0]}.")
    value = complex(np.vdot(psi, rho @ psi))
    if abs(value.imag) > tol.epsilon:
        raise ValidationError(f"Error: fidelity has imaginary part {value.imag:.3e}; rho is not Hermitian.")
    return value.real


def purity(rho):
    rho = _as_square(rho)
    return float(np.real(np.trace(rho @ rho)))


def is_density_matrix(rho, tol=None):
    """Hermitian, unit trace and positive semidefinite within tolerance."""
    tol = as_tolerance(tol)
    rho = _as_square(rho)
    if max_abs_diff(rho, dagger(rho)) > tol.epsilon:
        return False
    if abs(np.trace(rho) - 1) > tol.epsilon:
        return False
    return bool(np.min(np.linalg.eigvalsh((rho + dagger(rho)) / 2)) >= -tol.epsilon)
