"""Engine invariants over generated inputs.

Collected through ``test_acceptance`` (criterion 8); run standalone with
``pytest tests/test_acceptance.py -k engine``.
"""
import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cqtele import statevec as sv
from cqtele.statevec import (
    GateMatrix,
    MeasurementBasis,
    PureState,
    apply_gate,
    fidelity,
    measure,
    outcome_probabilities,
    reduced_density,
    tensor,
)
from cqtele.teleport import CorrectionOp

CASES = 1000
finite = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw, min_qubits=1, max_qubits=4):
    n = draw(st.integers(min_qubits, max_qubits))
    re = draw(st.lists(finite, min_size=2**n, max_size=2**n))
    im = draw(st.lists(finite, min_size=2**n, max_size=2**n))
    v = np.array(re) + 1j * np.array(im)
    norm = np.linalg.norm(v)
    assume(norm > 1e-3)
    return PureState(n, v / norm)


@st.composite
def unitaries(draw, dim):
    re = draw(st.lists(finite, min_size=dim * dim, max_size=dim * dim))
    im = draw(st.lists(finite, min_size=dim * dim, max_size=dim * dim))
    m = (np.array(re) + 1j * np.array(im)).reshape(dim, dim)
    assume(abs(np.linalg.det(m)) > 1e-3)
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@st.composite
def state_and_targets(draw, max_targets=2, spare=0):
    s = draw(states(min_qubits=1 + spare))
    k = draw(st.integers(1, min(max_targets, s.num_qubits - spare)))
    targets = draw(st.permutations(range(s.num_qubits)))[:k]
    return s, tuple(targets)


@st.composite
def state_and_basis(draw, spare=0):
    s, targets = draw(state_and_targets(spare=spare))
    u = draw(unitaries(2 ** len(targets)))
    rows = tuple(PureState(len(targets), row) for row in u)
    return s, MeasurementBasis(targets, rows)


NAMED_GATES = [sv.I, sv.X, sv.Y, sv.Z, sv.H] + [op.gate for op in CorrectionOp]


@settings(max_examples=CASES)
@given(st.sampled_from(NAMED_GATES) | st.sampled_from([2, 4]).flatmap(unitaries).map(GateMatrix))
def prop_gates_are_unitary(gate):
    np.testing.assert_allclose(gate.entries.conj().T @ gate.entries, np.eye(gate.dim), atol=1e-12)


@settings(max_examples=CASES)
@given(st.data())
def prop_apply_gate_preserves_norm(data):
    s, targets = data.draw(state_and_targets())
    u = data.draw(unitaries(2 ** len(targets)))
    out = apply_gate(s, GateMatrix(u), targets)
    assert abs(np.vdot(out.amps, out.amps).real - 1) < 1e-12


@settings(max_examples=CASES)
@given(state_and_basis())
def prop_born_probabilities_sum_to_one(case):
    s, basis = case
    probs = outcome_probabilities(s, basis)
    assert np.all(probs >= -1e-15)
    assert abs(probs.sum() - 1) < 1e-12


@settings(max_examples=CASES)
@given(state_and_basis(), st.floats(min_value=0, max_value=1, exclude_max=True))
def prop_projection_is_idempotent(case, u):
    s, basis = case
    outcome, _, collapsed = measure(s, basis, u)
    again = outcome_probabilities(collapsed, basis)
    assert abs(again[outcome] - 1) < 1e-12
    assert abs(np.vdot(collapsed.amps, collapsed.amps).real - 1) < 1e-12


@settings(max_examples=CASES)
@given(states(), st.integers(0, 63))
def prop_fidelity_ignores_global_phase(s, step):
    theta = 2 * math.pi * step / 64
    rotated = PureState(s.num_qubits, np.exp(1j * theta) * s.amps)
    assert abs(fidelity(s, rotated) - 1) < 1e-12


@settings(max_examples=CASES)
@given(states(max_qubits=2), states(max_qubits=2))
def prop_partial_trace_of_product_is_pure(s1, s2):
    rho = reduced_density(tensor(s1, s2), range(s1.num_qubits))
    np.testing.assert_allclose(rho.entries, np.outer(s1.amps, s1.amps.conj()), atol=1e-12)
    assert abs(np.trace(rho.entries) - 1) < 1e-12


@settings(max_examples=CASES)
@given(state_and_basis(spare=1), st.floats(min_value=0, max_value=1, exclude_max=True))
def prop_discarding_measured_qubits_keeps_norm(case, u):
    s, basis = case
    _, _, rest = measure(s, basis, u, discard=True)
    assert rest.num_qubits == s.num_qubits - len(basis.target_qubits)
    assert abs(np.vdot(rest.amps, rest.amps).real - 1) < 1e-12
