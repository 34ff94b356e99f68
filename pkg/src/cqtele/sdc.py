"""Controlled secure direct communication over the teleportation channel.

Bit 1 is sent as ``|+>`` and bit 0 as ``|->``. A session prepares a batch of
channel triplets (optionally disturbed by an eavesdropper model), sacrifices a
random subset to check the channel, and, only if the check passes and Charlie
grants permission, teleports one encoded bit through each surviving triplet.
Bob reads every bit with a ``|+>``/``|->`` measurement.

Session functions take a ``numpy.random.Generator``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .statevec import (
    MINUS,
    PLUS,
    PureState,
    Y,
    I,
    X,
    Z,
    apply_gate,
    computational_basis,
    hadamard_basis,
    measure,
)
from .teleport import channel_state, teleport

TRANSCRIPT_VERSION = 1


class BatchTooSmall(ValueError):
    pass


class InvalidCount(ValueError):
    pass


class AttackKind(enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND_Z = "ir-z"
    INTERCEPT_RESEND_X = "ir-x"
    DEPOLARIZE = "depol"


class Target(enum.Enum):
    A = "A"
    B = "B"

    @property
    def slot(self) -> int:
        # slot within an (A, B, C) triplet
        return 0 if self is Target.A else 1


@dataclass(frozen=True)
class AdversaryModel:
    kind: AttackKind = AttackKind.NONE
    p: float | None = None
    target: Target = Target.B

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AttackKind(self.kind))
        object.__setattr__(self, "target", Target(self.target))
        if self.kind is AttackKind.DEPOLARIZE:
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("depolarizing adversary needs p in [0, 1]")
        elif self.p is not None:
            raise ValueError(f"p only applies to depolarizing noise, not {self.kind.value}")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "p": self.p, "target": self.target.value}


NO_ADVERSARY = AdversaryModel()


@dataclass(frozen=True)
class VerificationPolicy:
    sacrifice_fraction: float = 0.25
    min_sacrifice: int = 20
    z_test_weight: float = 0.5
    failure_threshold: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.sacrifice_fraction < 1.0:
            raise ValueError("sacrifice_fraction must be in (0, 1)")
        if self.min_sacrifice < 1:
            raise ValueError("min_sacrifice must be positive")
        if not 0.0 <= self.z_test_weight <= 1.0:
            raise ValueError("z_test_weight must be in [0, 1]")
        if not 0.0 <= self.failure_threshold < 1.0:
            raise ValueError("failure_threshold must be in [0, 1)")

    def sacrifice_count(self, batch: int) -> int:
        # tolerate float noise such as 0.25 * 80 = 20.000000000000004
        return math.ceil(self.sacrifice_fraction * batch - 1e-9)

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_POLICY = VerificationPolicy()


@dataclass(frozen=True)
class VerificationReport:
    tested: int
    z_tested: int
    x_tested: int
    z_failures: int
    x_failures: int
    failure_rate: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BitEntry:
    encoded: int
    charlie: str
    bell: str
    correction: str | None
    decoded: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SessionTranscript:
    seed: int
    message: tuple[int, ...]
    permission: bool
    policy: VerificationPolicy
    adversary: AdversaryModel
    prepared: int
    verification: VerificationReport | None
    entries: tuple[BitEntry, ...] = ()
    decoded: tuple[int, ...] | None = None
    aborted_reason: str | None = None
    withhold_charlie: bool = False

    @property
    def teleported(self) -> int:
        """Number of message qubits that went through the protocol."""
        return len(self.entries)

    @property
    def accuracy(self) -> float | None:
        if self.decoded is None:
            return None
        hits = sum(a == b for a, b in zip(self.message, self.decoded))
        return hits / len(self.message)

    def to_dict(self) -> dict:
        return {
            "version": TRANSCRIPT_VERSION,
            "seed": self.seed,
            "message": bits_to_text(self.message),
            "permission": self.permission,
            "withhold_charlie": self.withhold_charlie,
            "policy": self.policy.to_dict(),
            "adversary": self.adversary.to_dict(),
            "prepared": self.prepared,
            "verification": None if self.verification is None else self.verification.to_dict(),
            "entries": [e.to_dict() for e in self.entries],
            "decoded": None if self.decoded is None else bits_to_text(self.decoded),
            "accuracy": self.accuracy,
            "aborted_reason": self.aborted_reason,
        }


def parse_message(text: str) -> tuple[int, ...]:
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"message must be a nonempty string of 0/1, got {text!r}")
    return tuple(int(ch) for ch in text)


def bits_to_text(bits) -> str:
    return "".join(str(int(b)) for b in bits)


def encode_bit(bit: int) -> PureState:
    if bit not in (0, 1):
        raise ValueError(f"not a bit: {bit!r}")
    return PLUS if bit == 1 else MINUS


def encode_message(bits) -> list[PureState]:
    return [encode_bit(b) for b in bits]


_PM_BASIS = hadamard_basis(0)


def decode_bit(bob: PureState, rng) -> int:
    """Measure in the ``|+>``/``|->`` basis; ``|+>`` reads as 1."""
    outcome, _, _ = measure(bob, _PM_BASIS, float(rng.random()))
    return 1 if outcome == 0 else 0


_PAULIS = (I, X, Y, Z)


def _attack(triplet: PureState, adversary: AdversaryModel, rng) -> PureState:
    slot = adversary.target.slot
    kind = adversary.kind
    if kind is AttackKind.INTERCEPT_RESEND_Z:
        return measure(triplet, computational_basis(slot), float(rng.random()))[2]
    if kind is AttackKind.INTERCEPT_RESEND_X:
        return measure(triplet, hadamard_basis(slot), float(rng.random()))[2]
    if kind is AttackKind.DEPOLARIZE:
        if rng.random() < adversary.p:
            return apply_gate(triplet, _PAULIS[int(rng.integers(4))], [slot])
    return triplet


def prepare_channel(n: int, adversary: AdversaryModel, rng) -> list[PureState]:
    """``n`` channel triplets as they arrive after the adversary acts on them."""
    if n < 1:
        raise InvalidCount(f"need at least one triplet, got {n}")
    ideal = channel_state()
    if adversary.kind is AttackKind.NONE:
        return [ideal] * n
    return [_attack(ideal, adversary, rng) for _ in range(n)]


def triplet_failed(outcome: int, z_test: bool) -> bool:
    """Whether a full 3-qubit measurement outcome violates the channel check.

    Z test: bit parity must be even. X test: all three results must agree
    (``+`` is bit 0 of the outcome, ``-`` is bit 1).
    """
    if z_test:
        return bin(outcome).count("1") % 2 == 1
    return outcome not in (0, 7)


def check_triplet(triplet: PureState, z_test: bool, rand: float) -> bool:
    """Measure one triplet through the general engine; True means it failed."""
    basis = computational_basis(0, 1, 2) if z_test else hadamard_basis(0, 1, 2)
    outcome, _, _ = measure(triplet, basis, rand)
    return triplet_failed(outcome, z_test)


def run_tests(states: np.ndarray, z_tests: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Failure flags for a stack of ``(N, 8)`` triplet amplitudes."""
    outcomes = kernels.measure_triplets(
        np.ascontiguousarray(states, dtype=np.complex128),
        np.ascontiguousarray(~z_tests, dtype=np.uint8),
        np.ascontiguousarray(uniforms, dtype=np.float64),
    )
    odd = np.array([bin(k).count("1") % 2 for k in range(8)], dtype=bool)
    return np.where(z_tests, odd[outcomes], (outcomes != 0) & (outcomes != 7))


def verify_channel(
    triplets: list[PureState], policy: VerificationPolicy, rng
) -> tuple[VerificationReport, list[PureState]]:
    """Sacrifice a random subset of the batch to test it; survivors keep batch order."""
    n = len(triplets)
    k = policy.sacrifice_count(n)
    if k < policy.min_sacrifice or k >= n:
        raise BatchTooSmall(
            f"batch of {n} sacrifices {k}; need at least {policy.min_sacrifice} and a survivor"
        )
    chosen = np.sort(rng.choice(n, size=k, replace=False))
    z_tests = rng.random(k) < policy.z_test_weight
    uniforms = rng.random(k)
    states = np.stack([triplets[i].amps for i in chosen])
    failed = run_tests(states, z_tests, uniforms)
    z_failures = int(np.sum(failed & z_tests))
    x_failures = int(np.sum(failed & ~z_tests))
    rate = (z_failures + x_failures) / k
    report = VerificationReport(
        tested=k,
        z_tested=int(np.sum(z_tests)),
        x_tested=int(k - np.sum(z_tests)),
        z_failures=z_failures,
        x_failures=x_failures,
        failure_rate=rate,
        passed=rate <= policy.failure_threshold,
    )
    keep = np.ones(n, dtype=bool)
    keep[chosen] = False
    return report, [t for t, kept in zip(triplets, keep) if kept]


def batch_size(message_length: int, policy: VerificationPolicy) -> int:
    """Smallest batch that covers the message after sacrificing, with headroom."""
    n = math.ceil(message_length / (1 - policy.sacrifice_fraction)) + policy.min_sacrifice
    while (
        policy.sacrifice_count(n) < policy.min_sacrifice
        or n - policy.sacrifice_count(n) < message_length
    ):
        n += 1
    return n


def run_session(
    message,
    permission: bool,
    policy: VerificationPolicy = DEFAULT_POLICY,
    adversary: AdversaryModel = NO_ADVERSARY,
    seed: int = 0,
    *,
    withhold_charlie: bool = False,
) -> SessionTranscript:
    """One complete session; aborts are reported in the transcript, never raised.

    ``withhold_charlie`` is an out-of-protocol diagnostic: Bob never learns
    Charlie's bit and so applies no correction at all.
    """
    bits = parse_message(message) if isinstance(message, str) else tuple(int(b) for b in message)
    if not bits or any(b not in (0, 1) for b in bits):
        raise ValueError("message must be a nonempty sequence of bits")
    rng = np.random.default_rng(seed)
    n = batch_size(len(bits), policy)
    triplets = prepare_channel(n, adversary, rng)
    report, survivors = verify_channel(triplets, policy, rng)
    common = dict(
        seed=seed,
        message=bits,
        permission=permission,
        policy=policy,
        adversary=adversary,
        prepared=n,
        verification=report,
        withhold_charlie=withhold_charlie,
    )
    if not report.passed:
        return SessionTranscript(**common, aborted_reason="verification failed")
    if not permission:
        return SessionTranscript(**common, aborted_reason="permission denied")

    entries = []
    for bit, triplet in zip(bits, survivors):
        result = teleport(
            encode_bit(bit), rng, channel=triplet, apply_corrections=not withhold_charlie
        )
        decoded = decode_bit(result.bob_state, rng)
        entries.append(
            BitEntry(
                encoded=bit,
                charlie=result.charlie.name,
                bell=result.bell.name,
                correction=None if withhold_charlie else result.correction.name,
                decoded=decoded,
            )
        )
    return SessionTranscript(
        **common, entries=tuple(entries), decoded=tuple(e.decoded for e in entries)
    )
