"""Brute-force reference computations.

Everything here works on plain dicts / explicit index loops and does not
import the engine's reshape/transposition code, so it can check it.
"""
from __future__ import annotations

import cmath
import itertools
import math

import numpy as np

S = 1 / math.sqrt(2)


def ket(terms: dict[str, complex]) -> np.ndarray:
    """Amplitude vector from {bitstring: amplitude}; leftmost bit is slot 0."""
    n = len(next(iter(terms)))
    vec = np.zeros(2**n, dtype=complex)
    for bits, amp in terms.items():
        vec[int(bits, 2)] += amp
    return vec


def bits_of(index: int, n: int) -> list[int]:
    return [(index >> (n - 1 - q)) & 1 for q in range(n)]


def index_of(bits) -> int:
    out = 0
    for b in bits:
        out = 2 * out + b
    return out


def kron_all(*vecs) -> np.ndarray:
    """Tensor product by enumerating every index combination."""
    sizes = [len(v) for v in vecs]
    out = []
    for combo in itertools.product(*[range(s) for s in sizes]):
        amp = 1
        for v, i in zip(vecs, combo):
            amp *= v[i]
        out.append(amp)
    return np.array(out, dtype=complex)


def single_qubit_op(vec: np.ndarray, n: int, target: int, m: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to one slot by looping over basis indices."""
    out = np.zeros_like(vec)
    for idx in range(2**n):
        bits = bits_of(idx, n)
        for new in (0, 1):
            nb = list(bits)
            nb[target] = new
            out[index_of(nb)] += m[new, bits[target]] * vec[idx]
    return out


def partial_trace(vec: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    """Reduced density matrix from the full outer product, index by index."""
    rho = np.outer(vec, vec.conj())
    k = len(keep)
    out = np.zeros((2**k, 2**k), dtype=complex)
    for i in range(2**n):
        for j in range(2**n):
            bi, bj = bits_of(i, n), bits_of(j, n)
            if any(bi[q] != bj[q] for q in range(n) if q not in keep):
                continue
            out[index_of([bi[q] for q in keep]), index_of([bj[q] for q in keep])] += rho[i, j]
    return out


def haar_grid(points: int = 6) -> list[tuple[complex, complex]]:
    """Bloch-sphere grid: poles plus rings of real, imaginary and mixed phases."""
    states = [(1, 0), (0, 1)]
    thetas = [math.pi * (k + 1) / (points + 1) for k in range(points)]
    phases = [0, math.pi / 2, math.pi, 3 * math.pi / 2, 0.7, 2.3]
    for theta in thetas:
        for phi in phases[: max(4, points - 1)]:
            states.append((math.cos(theta / 2), cmath.exp(1j * phi) * math.sin(theta / 2)))
    return states


X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * S

XI = ket({"000": 0.5, "110": 0.5, "011": 0.5, "101": 0.5})
BELL = {
    "PHI_PLUS": ket({"00": S, "11": S}),
    "PSI_PLUS": ket({"01": S, "10": S}),
    "PHI_MINUS": ket({"00": S, "11": -S}),
    "PSI_MINUS": ket({"01": S, "10": -S}),
}


def teleport_branch(a: complex, b: complex, charlie: int, bell: str) -> tuple[float, np.ndarray]:
    """Probability and (unnormalized-then-normalized) Bob residual for one branch.

    Joint order M, A, B, C. Sums amplitudes explicitly over every basis index.
    """
    joint = kron_all(np.array([a, b]), XI)
    bob = np.zeros(2, dtype=complex)
    for idx in range(16):
        m, a_, b_, c = bits_of(idx, 4)
        if c != charlie:
            continue
        bob[b_] += np.conj(BELL[bell][2 * m + a_]) * joint[idx]
    p = float(np.vdot(bob, bob).real)
    return p, bob / math.sqrt(p)


def triplet_density_after(attack: str, target: int, p: float = 0.0) -> np.ndarray:
    """Exact 8x8 density matrix of a channel triplet after the adversary acts."""
    rho = np.outer(XI, XI.conj())
    if attack == "none":
        return rho

    def lift(m):
        mats = [I2, I2, I2]
        mats[target] = m
        return np.kron(np.kron(mats[0], mats[1]), mats[2])

    if attack in ("ir-z", "ir-x"):
        basis = [np.array([1, 0]), np.array([0, 1])] if attack == "ir-z" else [
            np.array([S, S]),
            np.array([S, -S]),
        ]
        out = np.zeros_like(rho)
        for v in basis:
            proj = lift(np.outer(v, v.conj()))
            out += proj @ rho @ proj
        return out
    if attack == "depol":
        out = (1 - p) * rho
        for pauli in (I2, X, Y, Z):
            u = lift(pauli)
            out += (p / 4) * u @ rho @ u.conj().T
        return out
    raise ValueError(attack)


def failure_probability(rho: np.ndarray, test: str) -> float:
    """Exact probability that a full Z or X measurement of the triplet fails the check."""
    u = np.eye(8) if test == "Z" else np.kron(np.kron(H, H), H)
    rotated = u @ rho @ u.conj().T
    total = 0.0
    for outcome in range(8):
        bits = bits_of(outcome, 3)
        failed = sum(bits) % 2 == 1 if test == "Z" else len(set(bits)) != 1
        if failed:
            total += rotated[outcome, outcome].real
    return total


def binomial_band(n: int, p: float, sigmas: float = 4.0) -> tuple[float, float]:
    half = sigmas * math.sqrt(p * (1 - p) / n)
    return p - half, p + half
