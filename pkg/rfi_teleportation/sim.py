"""
DESCRIPTION:
    Density-matrix simulation of teleportation between two parties whose
    reference frames differ by unknown group elements g_A and g_B.

    Both procedures share the Bell resource |η⟩ on systems (1, 2), created in
    a common frame. Alice measures systems (0, 1) in the maximally entangled
    basis |φ_x⟩ = (1/√d) Σ_i |i⟩⊗U_x|i⟩ as her lab sees it, i.e. rotated by
    π(g_A)⊗π(g_A).
    - speakable: the outcome x travels as plain bits and Bob applies
      π(g_B) U_xᵀ π(g_B)†.
    - unspeakable: the decohered bipartite system itself travels; Bob reads
      it in his own rotated basis and corrects for what he read.

COMMENTS:
    Each channel is assembled as a list of Kraus operators on the input
    system. The partial-trace description and the Kraus form agree because
    (⟨χ|⊗I)(|ψ⟩⊗|η⟩) = V_χ† |ψ⟩ / √d, with V_χ the coefficient matrix of χ.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from tqdm import tqdm

from rfi_teleportation.config import DEFAULT_SEED, DEFAULT_TRIALS
from rfi_teleportation.errors import ValidationError
from rfi_teleportation.linalg import as_tolerance, dagger
from rfi_teleportation.reps import Representation
from rfi_teleportation.ueb import GEquivariantUEB, UnitaryErrorBasis

logger = logging.getLogger(__name__)

PROCEDURES = ('speakable', 'unspeakable')


@dataclass(frozen=True)
class FrameConfig:
    """Element indices of Alice's and Bob's frames in the group's element order."""
    g_A: int
    g_B: int


@dataclass(frozen=True)
class ProtocolSpec:
    """
    Attributes:
    - rep: Representation describing how frames act on one system.
    - ueb: UnitaryErrorBasis or GEquivariantUEB.
    - procedure: 'speakable' or 'unspeakable'.
    - conjugate_ancilla: rotate Alice's half of the resource by π(g)* instead of π(g).
      Only matters for representations with complex entries.
    """
    rep: Representation = field(repr=False)
    ueb: object = field(repr=False)
    procedure: str = 'unspeakable'
    conjugate_ancilla: bool = False

    def __post_init__(self):
        if self.procedure not in PROCEDURES:
            raise ValidationError(f"Error: procedure must be one of {PROCEDURES}, got {self.procedure!r}.")
        if not isinstance(self.ueb, (UnitaryErrorBasis, GEquivariantUEB)):
            raise ValidationError("Error: ueb must be a UnitaryErrorBasis or GEquivariantUEB.")
        if self.rep.dimension != self.ueb.dimension:
            raise ValidationError(
                f"Error: representation dimension {self.rep.dimension} differs from basis dimension {self.ueb.dimension}.")
        count = len(self.ueb.elements)
        if count != self.ueb.dimension ** 2:
            raise ValidationError(
                f"Error: a unitary error basis in dimension {self.ueb.dimension} has {self.ueb.dimension ** 2} elements, got {count}.")
        if not self.rep.is_real and not self.conjugate_ancilla:
            logger.warning("Representation has complex entries; Alice's systems are rotated by π(g)⊗π(g)")

    @property
    def dimension(self):
        return self.rep.dimension


@dataclass(frozen=True)
class FidelityReport:
    """
    Attributes:
    - grid: |G| x |G| nested list, grid[g_A][g_B] is the minimum fidelity over the trial states.
    - global_min, global_max: extreme fidelities over every frame pair and trial.
    - max_deviation: largest entrywise |ρ_out - ρ_in|.
    - min_purity: smallest Tr(ρ_out²).
    """
    group: str
    procedure: str
    grid: list
    global_min: float
    global_max: float
    trials: int
    seed: int
    tolerance: float
    max_deviation: float
    min_purity: float

    def is_perfect(self, slack):
        return self.global_min >= 1 - slack


def measurement_basis(ueb):
    """
    Rows are the vectors (1/√d) Σ_i |i⟩⊗U_x|i⟩, index i*d + j.

    Returns:
    - (d², d²) array.
    """
    elements = np.asarray(ueb.elements if hasattr(ueb, 'elements') else ueb, dtype=complex)
    n, d, _ = elements.shape
    return elements.transpose(0, 2, 1).reshape(n, d * d) / np.sqrt(d)


def _check_frames(G, frames):
    for g in (frames.g_A, frames.g_B):
        if not 0 <= g < G.order:
            raise ValidationError(f"Error: frame index {g} is not an element of {G.label} (order {G.order}).")


def _rotated_coefficients(coefficients, M, ancilla):
    # (M⊗N)|χ⟩ has coefficient matrix M V Nᵀ
    return M @ coefficients @ ancilla.T


def channel_kraus(spec, frames, procedure=None):
    """
    Kraus operators of the teleportation channel for one frame pair.

    Parameters:
    - spec: ProtocolSpec.
    - frames: FrameConfig.
    - procedure: overrides spec.procedure.

    Returns:
    - (k, d, d) array with Σ A_k† A_k = I.
    """
    procedure = procedure or spec.procedure
    if procedure not in PROCEDURES:
        raise ValidationError(f"Error: procedure must be one of {PROCEDURES}, got {procedure!r}.")
    rep, d = spec.rep, spec.dimension
    _check_frames(rep.group, frames)
    pi_A, pi_B = rep.matrices[frames.g_A], rep.matrices[frames.g_B]
    elements = np.asarray(spec.ueb.elements, dtype=complex)
    n = elements.shape[0]
    coefficients = measurement_basis(elements).reshape(n, d, d)

    alice = _rotated_coefficients(coefficients, pi_A, pi_A.conj() if spec.conjugate_ancilla else pi_A)
    collapse = alice.conj().transpose(0, 2, 1) / np.sqrt(d)
    corrections = pi_B @ elements.transpose(0, 2, 1) @ dagger(pi_B)
    if procedure == 'speakable':
        return corrections @ collapse

    bob = _rotated_coefficients(coefficients, pi_B, pi_B.conj() if spec.conjugate_ancilla else pi_B)
    overlaps = np.einsum('yij,xij->yx', bob.conj(), alice)
    kraus = overlaps[:, :, None, None] * (corrections[:, None] @ collapse[None, :])
    return kraus.reshape(n * n, d, d)


def apply_channel(kraus, rho):
    return np.einsum('kab,bc,kdc->ad', kraus, rho, kraus.conj())


def _check_input(spec, rho_in):
    rho_in = np.asarray(rho_in, dtype=complex)
    if rho_in.shape != (spec.dimension, spec.dimension):
        raise ValidationError(f"Error: input state has shape {rho_in.shape}, expected dimension {spec.dimension}.")
    return rho_in


def teleport_speakable(spec, frames, rho_in):
    """Procedure over a generic classical channel; returns Bob's state."""
    return apply_channel(channel_kraus(spec, frames, 'speakable'), _check_input(spec, rho_in))


def teleport_unspeakable(spec, frames, rho_in):
    """Procedure sending the decohered measured system; returns Bob's state."""
    return apply_channel(channel_kraus(spec, frames, 'unspeakable'), _check_input(spec, rho_in))


def random_pure_state(d, seed=DEFAULT_SEED):
    """Haar-random pure state from a normalized complex Gaussian vector. seed may be an int or a SeedSequence."""
    if d < 1:
        raise ValidationError(f"Error: dimension must be >= 1, got {d}.")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def trial_states(d, trials, seed):
    """One independent child seed per trial, so the states do not depend on evaluation order."""
    return np.array([random_pure_state(d, child) for child in np.random.SeedSequence(seed).spawn(trials)])


def _evaluate_pair(spec, frames, states):
    kraus = channel_kraus(spec, frames)
    branches = np.einsum('kab,tb->tka', kraus, states)
    outputs = np.einsum('tka,tkb->tab', branches, branches.conj())
    fidelities = np.einsum('ta,tab,tb->t', states.conj(), outputs, states).real
    purities = np.einsum('tab,tba->t', outputs, outputs).real
    inputs = np.einsum('ta,tb->tab', states, states.conj())
    deviation = float(np.max(np.abs(outputs - inputs)))
    return float(fidelities.min()), float(fidelities.max()), float(purities.min()), deviation


def sweep(spec, trials=DEFAULT_TRIALS, seed=DEFAULT_SEED, tol=None, workers=1, progress=False):
    """
    Runs the protocol for every frame pair (g_A, g_B) on `trials` seeded
    random pure inputs.

    Parameters:
    - spec: ProtocolSpec.
    - trials: number of input states, >= 1.
    - seed: root seed of the input states.
    - workers: thread count; the report does not depend on it.
    - progress: show a tqdm bar.

    Returns:
    - FidelityReport.
    """
    tol = as_tolerance(tol)
    if trials < 1:
        raise ValidationError(f"Error: trials must be >= 1, got {trials}.")
    if workers < 1:
        raise ValidationError(f"Error: workers must be >= 1, got {workers}.")
    if seed < 0:
        raise ValidationError(f"Error: seed must be >= 0, got {seed}.")
    G = spec.rep.group
    states = trial_states(spec.dimension, trials, seed)
    pairs = [FrameConfig(a, b) for a, b in product(range(G.order), repeat=2)]
    logger.info(f"Sweeping {len(pairs)} frame pairs x {trials} states ({spec.procedure}, {workers} worker(s))")

    def evaluate(frames):
        return _evaluate_pair(spec, frames, states)

    bar = dict(total=len(pairs), desc=f"{spec.procedure} frame pairs", disable=not progress)
    if workers == 1:
        results = [evaluate(frames) for frames in tqdm(pairs, **bar)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(tqdm(pool.map(evaluate, pairs), **bar))

    grid = [[results[a * G.order + b][0] for b in range(G.order)] for a in range(G.order)]
    report = FidelityReport(
        group=G.label,
        procedure=spec.procedure,
        grid=grid,
        global_min=min(r[0] for r in results),
        global_max=max(r[1] for r in results),
        trials=trials,
        seed=seed,
        tolerance=tol.epsilon,
        max_deviation=max(r[3] for r in results),
        min_purity=min(r[2] for r in results),
    )
    logger.info(f"Fidelity range [{report.global_min:.12f}, {report.global_max:.12f}], max deviation {report.max_deviation:.3e}")
    return report
