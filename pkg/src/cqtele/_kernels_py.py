"""NumPy implementations of the batch kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the compiled version is tested against.
"""
from __future__ import annotations

import numpy as np

DEGENERATE_TOL = 1e-14
_S = 1 / np.sqrt(2)

# rows: PhiPlus, PsiPlus, PhiMinus, PsiMinus over (m, a) index 2*m + a
BELL = np.array(
    [
        [_S, 0, 0, _S],
        [0, _S, _S, 0],
        [_S, 0, 0, -_S],
        [0, _S, -_S, 0],
    ]
)
# channel amplitudes over (a, b, c) index 4*a + 2*b + c
XI = np.array([0.5, 0, 0, 0.5, 0, 0.5, 0.5, 0])
_H3 = np.array([[1.0]])
for _ in range(3):
    _H3 = np.kron(_H3, np.array([[1, 1], [1, -1]]))
_H3 = _H3 * _S**3


def _abs2(z: np.ndarray) -> np.ndarray:
    return z.real * z.real + z.imag * z.imag


def pick(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Row-wise inverse-CDF sampling; mirrors ``statevec.sample_index``."""
    probs = np.where(probs > DEGENERATE_TOL, probs, 0.0)
    cumulative = np.cumsum(probs, axis=1)
    idx = np.sum(cumulative <= uniforms[:, None], axis=1)
    overflow = idx >= probs.shape[1]
    if np.any(overflow):
        live = probs[overflow] > DEGENERATE_TOL
        last = probs.shape[1] - 1 - np.argmax(live[:, ::-1], axis=1)
        idx[overflow] = last
    return idx


def teleport_batch(inputs: np.ndarray, uniforms: np.ndarray, table: np.ndarray):
    inputs = np.ascontiguousarray(inputs, dtype=np.complex128)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    n = inputs.shape[0]
    if inputs.shape != (n, 2) or uniforms.shape[0] != n or uniforms.shape[1] < 2:
        raise ValueError("inputs must be (N, 2) and uniforms (N, >=2)")
    rows = np.arange(n)

    psi = (inputs[:, :, None] * XI[None, None, :]).reshape(n, 8, 2)
    pc = _abs2(psi).sum(axis=1)
    charlie = pick(pc, uniforms[:, 0])
    p_charlie = pc[rows, charlie]
    if np.any(p_charlie < DEGENERATE_TOL):
        raise ValueError("degenerate measurement branch; inputs not normalized?")
    mab = (psi[rows, :, charlie] / np.sqrt(p_charlie)[:, None]).reshape(n, 4, 2)

    resid = np.einsum("km,nmb->nkb", BELL, mab)
    pk = _abs2(resid).sum(axis=2)
    bell = pick(pk, uniforms[:, 1])
    p_bell = pk[rows, bell]
    if np.any(p_bell < DEGENERATE_TOL):
        raise ValueError("degenerate measurement branch; inputs not normalized?")
    bob = resid[rows, bell] / np.sqrt(p_bell)[:, None]

    ops = np.asarray(table)[charlie, bell].astype(np.int8)
    flip = (ops == 1) | (ops == 3)
    bob[flip] = bob[flip][:, ::-1]
    phase = (ops == 2) | (ops == 3)
    bob[phase, 1] *= -1

    overlap = np.sum(inputs.conj() * bob, axis=1)
    return (
        charlie.astype(np.int8),
        bell.astype(np.int8),
        ops,
        bob,
        _abs2(overlap),
    )


def measure_triplets(states: np.ndarray, x_basis: np.ndarray, uniforms: np.ndarray):
    states = np.ascontiguousarray(states, dtype=np.complex128)
    x_basis = np.asarray(x_basis, dtype=bool)
    uniforms = np.asarray(uniforms, dtype=np.float64)
    n = states.shape[0]
    if states.shape != (n, 8) or x_basis.shape != (n,) or uniforms.shape != (n,):
        raise ValueError("states must be (N, 8) with matching basis flags and uniforms")
    rotated = states.copy()
    rotated[x_basis] = states[x_basis] @ _H3.T
    return pick(_abs2(rotated), uniforms).astype(np.int64)
