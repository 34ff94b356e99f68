"""Dense pure-state linear algebra for a handful of qubits.

Slot 0 is the leftmost ket label, so basis index ``i`` reads as a big-endian
bitstring over slots: ``|011>`` on three qubits is index 3.

All values are immutable. Operations return new objects and never own a random
generator; measurements take an explicit uniform sample (or a forced outcome).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
ADMIT_TOL = 1e-9
DEGENERATE_TOL = 1e-14
PSD_TOL = 1e-10


class StateError(ValueError):
    """Base class for invalid states, gates and measurements."""


class LengthMismatch(StateError):
    pass


class ZeroVector(StateError):
    pass


class TargetOutOfRange(StateError):
    pass


class DimMismatch(StateError):
    pass


class DegenerateBranch(StateError):
    """The requested measurement branch has (numerically) zero probability."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class PureState:
    num_qubits: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise LengthMismatch("a state needs at least one qubit")
        amps = _frozen(self.amps).reshape(-1)
        if amps.shape[0] != 2**self.num_qubits:
            raise LengthMismatch(
                f"{amps.shape[0]} amplitudes cannot describe {self.num_qubits} qubits"
            )
        if not np.all(np.isfinite(amps)):
            raise StateError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amps", amps)

    def __len__(self) -> int:
        return self.amps.shape[0]

    def __repr__(self) -> str:
        terms = []
        for index, amp in enumerate(self.amps):
            if abs(amp) > 1e-12:
                terms.append(f"({amp:.6g})|{index:0{self.num_qubits}b}>")
        return "PureState(" + " + ".join(terms) + ")"

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True, eq=False)
class GateMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimMismatch("gate must be a square matrix")
        dim = entries.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise DimMismatch(f"gate dimension {dim} is not a power of two")
        if not np.allclose(entries.conj().T @ entries, np.eye(dim), rtol=0, atol=NORM_TOL):
            raise StateError("gate is not unitary")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __matmul__(self, other: GateMatrix) -> GateMatrix:
        return GateMatrix(self.entries @ other.entries)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = _frozen(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimMismatch("density matrix must be square")
        if not np.allclose(entries, entries.conj().T, rtol=0, atol=NORM_TOL):
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(entries) - 1.0) > NORM_TOL:
            raise StateError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(entries).min() < -PSD_TOL:
            raise StateError("density matrix is not positive semidefinite")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal basis over ``target_qubits``; outcome ``k`` is ``basis_states[k]``."""

    target_qubits: tuple[int, ...]
    basis_states: tuple[PureState, ...]

    def __post_init__(self) -> None:
        targets = tuple(int(q) for q in self.target_qubits)
        states = tuple(self.basis_states)
        k = len(targets)
        if k == 0 or len(set(targets)) != k:
            raise TargetOutOfRange("targets must be nonempty and distinct")
        if len(states) != 2**k or any(s.num_qubits != k for s in states):
            raise DimMismatch(f"a basis on {k} qubits needs {2**k} states of {k} qubits")
        matrix = self.matrix_of(states)
        matrix.flags.writeable = False
        if not np.allclose(matrix @ matrix.conj().T, np.eye(2**k), rtol=0, atol=NORM_TOL):
            raise StateError("basis states are not orthonormal")
        object.__setattr__(self, "target_qubits", targets)
        object.__setattr__(self, "basis_states", states)
        object.__setattr__(self, "_matrix", matrix)

    @staticmethod
    def matrix_of(states: Sequence[PureState]) -> np.ndarray:
        return np.stack([s.amps for s in states])

    @property
    def matrix(self) -> np.ndarray:
        """Rows are the basis vectors."""
        return self._matrix

    def on(self, *targets: int) -> MeasurementBasis:
        """The same basis vectors placed on different qubit slots."""
        return MeasurementBasis(targets, self.basis_states)


_S = 1 / np.sqrt(2)

I = GateMatrix(np.eye(2))
X = GateMatrix([[0, 1], [1, 0]])
Y = GateMatrix([[0, -1j], [1j, 0]])
Z = GateMatrix([[1, 0], [0, -1]])
H = GateMatrix(np.array([[1, 1], [1, -1]]) * _S)


def make_state(amps: Iterable[complex], num_qubits: int) -> PureState:
    """Build a state, renormalizing amplitudes whose norm is within 1e-9 of one."""
    amps = np.asarray(list(amps) if not isinstance(amps, np.ndarray) else amps, dtype=np.complex128)
    amps = amps.reshape(-1)
    if amps.shape[0] != 2**num_qubits:
        raise LengthMismatch(f"expected {2**num_qubits} amplitudes, got {amps.shape[0]}")
    norm = float(np.sqrt(np.vdot(amps, amps).real))
    if not np.isfinite(norm):
        raise StateError("amplitudes must be finite")
    if norm < ADMIT_TOL:
        raise ZeroVector("cannot normalize the zero vector")
    if abs(norm - 1.0) > ADMIT_TOL:
        raise StateError(f"norm {norm!r} is not within {ADMIT_TOL} of 1")
    return PureState(num_qubits, amps / norm)


def normalized(amps: Iterable[complex], num_qubits: int) -> PureState:
    """Like :func:`make_state` but accepts any nonzero norm."""
    amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
    if amps.shape[0] != 2**num_qubits:
        raise LengthMismatch(f"expected {2**num_qubits} amplitudes, got {amps.shape[0]}")
    norm = float(np.sqrt(np.vdot(amps, amps).real))
    if norm < ADMIT_TOL:
        raise ZeroVector("cannot normalize the zero vector")
    return PureState(num_qubits, amps / norm)


def basis_state(bits: str) -> PureState:
    """Computational basis ket from a bitstring, e.g. ``basis_state("011")``."""
    amps = np.zeros(2 ** len(bits), dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return PureState(len(bits), amps)


ZERO = basis_state("0")
ONE = basis_state("1")
PLUS = PureState(1, [_S, _S])
MINUS = PureState(1, [_S, -_S])


def tensor(left: PureState, right: PureState) -> PureState:
    """Joint state; ``left`` occupies the lower slot indices."""
    return PureState(left.num_qubits + right.num_qubits, np.kron(left.amps, right.amps))


def tensor_all(*states: PureState) -> PureState:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def _check_targets(targets: Sequence[int], num_qubits: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if not targets:
        raise TargetOutOfRange("no target qubits given")
    if len(set(targets)) != len(targets):
        raise TargetOutOfRange(f"repeated target in {targets}")
    for t in targets:
        if not 0 <= t < num_qubits:
            raise TargetOutOfRange(f"qubit {t} not in a {num_qubits}-qubit state")
    return targets


def _split(amps: np.ndarray, num_qubits: int, targets: tuple[int, ...]):
    """Reshape amplitudes into (targets, rest) and return the permutation used."""
    rest = tuple(q for q in range(num_qubits) if q not in targets)
    perm = targets + rest
    tensor_ = amps.reshape((2,) * num_qubits).transpose(perm)
    return tensor_.reshape(2 ** len(targets), -1), perm, rest


def _merge(matrix: np.ndarray, num_qubits: int, perm: tuple[int, ...]) -> np.ndarray:
    return matrix.reshape((2,) * num_qubits).transpose(np.argsort(perm)).reshape(-1)


def apply_gate(state: PureState, gate: GateMatrix, targets: Sequence[int]) -> PureState:
    """Apply ``gate`` to ``targets`` (first target is the gate's most significant qubit)."""
    targets = _check_targets(targets, state.num_qubits)
    if gate.dim != 2 ** len(targets):
        raise DimMismatch(f"{gate.dim}x{gate.dim} gate on {len(targets)} target(s)")
    block, perm, _ = _split(state.amps, state.num_qubits, targets)
    return PureState(state.num_qubits, _merge(gate.entries @ block, state.num_qubits, perm))


def outcome_probabilities(state: PureState, basis: MeasurementBasis) -> np.ndarray:
    """Born probabilities of every basis outcome, in basis order."""
    targets = _check_targets(basis.target_qubits, state.num_qubits)
    block, _, _ = _split(state.amps, state.num_qubits, targets)
    residuals = basis.matrix.conj() @ block
    return np.sum(np.abs(residuals) ** 2, axis=1)


def sample_index(probabilities: np.ndarray, rand: float) -> int:
    """Pick the first outcome whose cumulative probability exceeds ``rand``.

    Outcomes with probability at or below 1e-14 are skipped.
    """
    if not 0.0 <= rand < 1.0:
        raise ValueError(f"uniform sample {rand!r} not in [0, 1)")
    # numerically-zero branches can never be selected
    probabilities = np.where(probabilities > DEGENERATE_TOL, probabilities, 0.0)
    cumulative = np.cumsum(probabilities)
    index = int(np.searchsorted(cumulative, rand, side="right"))
    if index >= len(probabilities):
        # rounding left the total a hair under rand; take the last live outcome
        index = int(np.flatnonzero(probabilities > DEGENERATE_TOL)[-1])
    return index


def measure(
    state: PureState,
    basis: MeasurementBasis,
    rand: float | None = None,
    *,
    outcome: int | None = None,
    discard: bool = False,
) -> tuple[int, float, PureState]:
    """Projective measurement of ``basis.target_qubits``.

    Exactly one of ``rand`` (a uniform sample in [0, 1)) or ``outcome`` (a
    forced branch index) selects the branch. Returns ``(outcome, probability,
    collapsed)``. With ``discard=True`` the measured qubits are dropped and the
    collapsed state lives on the remaining slots in ascending order; otherwise
    the measured slots hold the selected basis vector.
    """
    if (rand is None) == (outcome is None):
        raise ValueError("give exactly one of rand or outcome")
    targets = _check_targets(basis.target_qubits, state.num_qubits)
    block, perm, rest = _split(state.amps, state.num_qubits, targets)
    residuals = basis.matrix.conj() @ block
    probs = np.sum(np.abs(residuals) ** 2, axis=1)
    if outcome is None:
        outcome = sample_index(probs, rand)
    elif not 0 <= outcome < len(probs):
        raise ValueError(f"outcome {outcome} out of range for {len(probs)} outcomes")
    p = float(probs[outcome])
    if p < DEGENERATE_TOL:
        raise DegenerateBranch(f"outcome {outcome} has probability {p!r}")
    residual = residuals[outcome] / np.sqrt(p)
    if discard:
        if not rest:
            raise TargetOutOfRange("cannot discard every qubit")
        return outcome, p, PureState(len(rest), residual)
    collapsed = np.outer(basis.basis_states[outcome].amps, residual)
    return outcome, p, PureState(state.num_qubits, _merge(collapsed, state.num_qubits, perm))


@lru_cache(maxsize=None)
def computational_basis(*targets: int) -> MeasurementBasis:
    k = len(targets)
    return MeasurementBasis(
        targets, tuple(basis_state("".join(bits)) for bits in product("01", repeat=k))
    )


@lru_cache(maxsize=None)
def hadamard_basis(*targets: int) -> MeasurementBasis:
    """Product basis of ``|+>``/``|->`` on each target; ``+`` is outcome bit 0."""
    states = []
    for signs in product((PLUS, MINUS), repeat=len(targets)):
        states.append(tensor_all(*signs))
    return MeasurementBasis(targets, tuple(states))


def inner(s1: PureState, s2: PureState) -> complex:
    if s1.num_qubits != s2.num_qubits:
        raise DimMismatch(f"{s1.num_qubits} vs {s2.num_qubits} qubits")
    return complex(np.vdot(s1.amps, s2.amps))


def fidelity(s1: PureState, s2: PureState) -> float:
    """Overlap ``|<s1|s2>|^2``; insensitive to global phase."""
    return min(1.0, abs(inner(s1, s2)) ** 2)


def projector(state: PureState) -> DensityMatrix:
    return DensityMatrix(np.outer(state.amps, state.amps.conj()))


def mixture(states: Sequence[PureState], weights: Sequence[float]) -> DensityMatrix:
    """Weighted sum of pure-state projectors."""
    dims = {s.num_qubits for s in states}
    if len(dims) != 1:
        raise DimMismatch("mixture of states with different qubit counts")
    rho = sum(w * np.outer(s.amps, s.amps.conj()) for s, w in zip(states, weights))
    return DensityMatrix(rho)


def reduced_density(state: PureState, keep: Iterable[int]) -> DensityMatrix:
    """Partial trace over every qubit not in ``keep`` (kept qubits in ascending order)."""
    keep = tuple(sorted(set(keep)))
    keep = _check_targets(keep, state.num_qubits)
    block, _, _ = _split(state.amps, state.num_qubits, keep)
    return DensityMatrix(block @ block.conj().T)


def trace_distance(d1: DensityMatrix, d2: DensityMatrix) -> float:
    if d1.dim != d2.dim:
        raise DimMismatch(f"{d1.dim} vs {d2.dim}")
    eigenvalues = np.linalg.eigvalsh(d1.entries - d2.entries)
    return min(1.0, 0.5 * float(np.sum(np.abs(eigenvalues))))


def maximally_mixed(num_qubits: int = 1) -> DensityMatrix:
    dim = 2**num_qubits
    return DensityMatrix(np.eye(dim) / dim)
