"""Three-party controlled teleportation.

Alice holds M (the unknown qubit) and A, Bob holds B, Charlie holds C. The
shared channel is ``1/2 (|000> + |110> + |011> + |101>)`` on (A, B, C).
Charlie measures C in the computational basis and broadcasts the bit, Alice
makes a Bell measurement on (M, A) and broadcasts the outcome, and Bob applies
the Pauli correction looked up from both broadcasts.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .rng import ForcedBranches, draw
from .statevec import (
    GateMatrix,
    MeasurementBasis,
    PureState,
    DimMismatch,
    I,
    X,
    Z,
    computational_basis,
    apply_gate,
    measure,
    tensor,
)


class CharlieBit(enum.IntEnum):
    ZERO = 0
    ONE = 1


class BellOutcome(enum.IntEnum):
    """Enumeration order is the sampling order of :func:`bell_basis`."""

    PHI_PLUS = 0
    PSI_PLUS = 1
    PHI_MINUS = 2
    PSI_MINUS = 3


class CorrectionOp(enum.IntEnum):
    I = 0
    X = 1
    Z = 2
    ZX = 3  # X first, then Z

    @property
    def gate(self) -> GateMatrix:
        return _CORRECTION_GATES[self]


_CORRECTION_GATES = {
    CorrectionOp.I: I,
    CorrectionOp.X: X,
    CorrectionOp.Z: Z,
    CorrectionOp.ZX: Z @ X,
}

_CORRECTIONS = {
    (CharlieBit.ZERO, BellOutcome.PHI_PLUS): CorrectionOp.I,
    (CharlieBit.ZERO, BellOutcome.PSI_PLUS): CorrectionOp.X,
    (CharlieBit.ZERO, BellOutcome.PHI_MINUS): CorrectionOp.Z,
    (CharlieBit.ZERO, BellOutcome.PSI_MINUS): CorrectionOp.ZX,
    (CharlieBit.ONE, BellOutcome.PHI_PLUS): CorrectionOp.X,
    (CharlieBit.ONE, BellOutcome.PSI_PLUS): CorrectionOp.I,
    (CharlieBit.ONE, BellOutcome.PHI_MINUS): CorrectionOp.ZX,
    (CharlieBit.ONE, BellOutcome.PSI_MINUS): CorrectionOp.Z,
}


@dataclass(frozen=True)
class QubitRegisterMap:
    """Tensor slot of each party's particle in the joint state."""

    m_slot: int = 0
    a_slot: int = 1
    b_slot: int = 2
    c_slot: int = 3

    def __post_init__(self) -> None:
        slots = (self.m_slot, self.a_slot, self.b_slot, self.c_slot)
        if sorted(slots) != [0, 1, 2, 3]:
            raise ValueError(f"slots {slots} must be a permutation of 0..3")

    @property
    def labels(self) -> dict[str, int]:
        return {"M": self.m_slot, "A": self.a_slot, "B": self.b_slot, "C": self.c_slot}


CANONICAL = QubitRegisterMap()


@dataclass(frozen=True)
class MeasurementRecord:
    """One classical broadcast."""

    who: str
    basis: str
    outcome: str
    probability: float

    def to_dict(self) -> dict:
        return {
            "who": self.who,
            "basis": self.basis,
            "outcome": self.outcome,
            "probability": self.probability,
        }


@dataclass(frozen=True, eq=False)
class TeleportResult:
    charlie: CharlieBit
    bell: BellOutcome
    correction: CorrectionOp
    received: PureState
    bob_state: PureState
    records: tuple[MeasurementRecord, ...] = field(default=())


@lru_cache(maxsize=None)
def channel_state() -> PureState:
    """The shared (A, B, C) channel state."""
    amps = np.zeros(8, dtype=np.complex128)
    for bits in ("000", "110", "011", "101"):
        amps[int(bits, 2)] = 0.5
    return PureState(3, amps)


@lru_cache(maxsize=None)
def bell_basis() -> MeasurementBasis:
    """Bell basis on slots (0, 1) in the order PhiPlus, PsiPlus, PhiMinus, PsiMinus."""
    s = 1 / np.sqrt(2)
    states = (
        PureState(2, [s, 0, 0, s]),
        PureState(2, [0, s, s, 0]),
        PureState(2, [s, 0, 0, -s]),
        PureState(2, [0, s, -s, 0]),
    )
    return MeasurementBasis((0, 1), states)


def _place(state: PureState, layout: QubitRegisterMap) -> PureState:
    # state is in canonical M, A, B, C order; move each label to its slot
    if layout == CANONICAL:
        return state
    order = (layout.m_slot, layout.a_slot, layout.b_slot, layout.c_slot)
    moved = state.amps.reshape(2, 2, 2, 2).transpose(np.argsort(order)).reshape(-1)
    return PureState(4, moved)


def joint_state(
    input_state: PureState,
    layout: QubitRegisterMap = CANONICAL,
    channel: PureState | None = None,
) -> PureState:
    """Input qubit joined with a channel triplet (default: the ideal channel)."""
    if input_state.num_qubits != 1:
        raise DimMismatch(f"input must be one qubit, got {input_state.num_qubits}")
    if channel is None:
        channel = channel_state()
    elif channel.num_qubits != 3:
        raise DimMismatch("channel must be a 3-qubit (A, B, C) state")
    return _place(tensor(input_state, channel), layout)


def _remaining(slots: tuple[int, ...], removed: tuple[int, ...], total: int = 4) -> tuple[int, ...]:
    # positions of ``slots`` once the ``removed`` slots are dropped
    kept = [s for s in range(total) if s not in removed]
    return tuple(kept.index(s) for s in slots)


def charlie_measure(
    joint: PureState, rng, layout: QubitRegisterMap = CANONICAL
) -> tuple[CharlieBit, PureState, float]:
    """Charlie's computational-basis measurement of C.

    Returns the broadcast bit, the (M, A, B) state with C removed, and the
    branch probability.
    """
    if joint.num_qubits != 4:
        raise DimMismatch("expected the 4-qubit joint state")
    outcome, p, collapsed = measure(
        joint, computational_basis(layout.c_slot), discard=True, **draw(rng)
    )
    return CharlieBit(outcome), collapsed, p


def alice_bell_measure(
    mab: PureState, rng, layout: QubitRegisterMap = CANONICAL
) -> tuple[BellOutcome, PureState, float]:
    """Alice's Bell measurement of (M, A); returns the outcome, Bob's qubit, and its probability."""
    if mab.num_qubits != 3:
        raise DimMismatch("expected the 3-qubit (M, A, B) state")
    m, a = _remaining((layout.m_slot, layout.a_slot), (layout.c_slot,))
    outcome, p, bob = measure(mab, _bell_on(m, a), discard=True, **draw(rng))
    return BellOutcome(outcome), bob, p


@lru_cache(maxsize=None)
def _bell_on(m: int, a: int) -> MeasurementBasis:
    return bell_basis().on(m, a)


def correction_for(charlie: CharlieBit, bell: BellOutcome) -> CorrectionOp:
    return _CORRECTIONS[CharlieBit(charlie), BellOutcome(bell)]


def correction_table() -> np.ndarray:
    """``table[charlie, bell]`` holds the :class:`CorrectionOp` code."""
    table = np.zeros((2, 4), dtype=np.int8)
    for (c, b), op in _CORRECTIONS.items():
        table[c, b] = op
    return table


def apply_correction(bob: PureState, op: CorrectionOp) -> PureState:
    return apply_gate(bob, CorrectionOp(op).gate, [0])


def teleport(
    input_state: PureState,
    rng,
    layout: QubitRegisterMap = CANONICAL,
    *,
    channel: PureState | None = None,
    apply_corrections: bool = True,
) -> TeleportResult:
    """Run the full protocol once.

    ``channel`` substitutes a prepared (possibly disturbed) triplet for the
    ideal one. ``apply_corrections=False`` leaves Bob's qubit as received
    (diagnostic only); the looked-up correction is still reported.
    """
    joint = joint_state(input_state, layout, channel)
    charlie, mab, p_c = charlie_measure(joint, rng, layout)
    bell, received, p_b = alice_bell_measure(mab, rng, layout)
    op = correction_for(charlie, bell)
    bob = apply_correction(received, op) if apply_corrections else received
    records = (
        MeasurementRecord("Charlie", "Z", charlie.name, p_c),
        MeasurementRecord("Alice", "Bell", bell.name, p_b),
    )
    return TeleportResult(charlie, bell, op, received, bob, records)


@dataclass(frozen=True, eq=False)
class Branch:
    charlie: CharlieBit
    bell: BellOutcome
    probability: float
    received: PureState


def branches(input_state: PureState, layout: QubitRegisterMap = CANONICAL) -> list[Branch]:
    """All eight outcome branches with exact probabilities and Bob's uncorrected qubit."""
    out = []
    joint = joint_state(input_state, layout)
    for c in CharlieBit:
        _, mab, p_c = charlie_measure(joint, ForcedBranches([c]), layout)
        for b in BellOutcome:
            _, received, p_b = alice_bell_measure(mab, ForcedBranches([b]), layout)
            out.append(Branch(c, b, p_c * p_b, received))
    return out


@dataclass(frozen=True, eq=False)
class BatchResult:
    charlie: np.ndarray
    bell: np.ndarray
    correction: np.ndarray
    bob: np.ndarray
    fidelity: np.ndarray


def teleport_many(inputs: np.ndarray, uniforms: np.ndarray) -> BatchResult:
    """Vectorized protocol runs for the canonical layout.

    ``inputs`` is ``(N, 2)`` complex amplitudes; ``uniforms`` supplies
    Charlie's and Alice's samples in columns 0 and 1.
    """
    inputs = np.ascontiguousarray(inputs, dtype=np.complex128)
    uniforms = np.ascontiguousarray(uniforms[:, :2], dtype=np.float64)
    return BatchResult(*kernels.teleport_batch(inputs, uniforms, correction_table()))


def haar_input(u_theta: float, u_phi: float) -> PureState:
    """Bloch-sphere-uniform qubit from two uniform samples."""
    return PureState(1, haar_amplitudes(np.array([u_theta]), np.array([u_phi]))[0])


def haar_amplitudes(u_theta: np.ndarray, u_phi: np.ndarray) -> np.ndarray:
    cos_theta = 1.0 - 2.0 * np.asarray(u_theta)
    half = np.arccos(np.clip(cos_theta, -1.0, 1.0)) / 2
    phi = 2 * np.pi * np.asarray(u_phi)
    return np.stack([np.cos(half), np.exp(1j * phi) * np.sin(half)], axis=-1).astype(np.complex128)


__all__ = [
    "BatchResult",
    "BellOutcome",
    "Branch",
    "CANONICAL",
    "CharlieBit",
    "CorrectionOp",
    "MeasurementRecord",
    "QubitRegisterMap",
    "TeleportResult",
    "alice_bell_measure",
    "apply_correction",
    "bell_basis",
    "branches",
    "channel_state",
    "charlie_measure",
    "correction_for",
    "correction_table",
    "haar_amplitudes",
    "haar_input",
    "joint_state",
    "teleport",
    "teleport_many",
]
