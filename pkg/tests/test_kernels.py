import numpy as np
import pytest

from cqtele import _kernels_py, kernels
from cqtele.rng import trial_uniforms
from cqtele.sdc import check_triplet, prepare_channel, AdversaryModel, AttackKind, triplet_failed
from cqtele.statevec import PureState, fidelity
from cqtele.teleport import correction_table, haar_amplitudes


def batch_inputs(seed, n):
    u = trial_uniforms(seed, range(n), 4)
    return haar_amplitudes(u[:, 0], u[:, 1]), np.ascontiguousarray(u[:, 2:])


def test_teleport_batch_recovers_inputs(backend):
    inputs, u = batch_inputs(1, 5000)
    charlie, bell, ops, bob, fid = backend.teleport_batch(inputs, u, correction_table())
    assert fid.min() >= 1 - 1e-12
    np.testing.assert_array_equal(ops, correction_table()[charlie, bell])
    for i in range(0, 5000, 500):
        assert fidelity(PureState(1, bob[i]), PureState(1, inputs[i])) >= 1 - 1e-12


def test_teleport_batch_validates_shapes(backend):
    with pytest.raises(ValueError):
        backend.teleport_batch(np.zeros((3, 2), complex) + 1, np.zeros((2, 2)), correction_table())


def test_teleport_batch_rejects_degenerate(backend):
    with pytest.raises(ValueError):
        backend.teleport_batch(np.zeros((1, 2), complex), np.zeros((1, 2)), correction_table())


def test_backends_agree_on_teleport():
    pytest.importorskip("cqtele._kernels")
    from cqtele import _kernels

    inputs, u = batch_inputs(2, 20000)
    table = correction_table()
    compiled = _kernels.teleport_batch(inputs, u, table)
    fallback = _kernels_py.teleport_batch(inputs, u, table)
    for got, want in zip(compiled[:3], fallback[:3]):
        np.testing.assert_array_equal(got, want)
    np.testing.assert_allclose(compiled[3], fallback[3], atol=1e-14)
    np.testing.assert_allclose(compiled[4], fallback[4], atol=1e-14)


@pytest.mark.parametrize(
    "adversary",
    [
        AdversaryModel(),
        AdversaryModel(AttackKind.INTERCEPT_RESEND_Z),
        AdversaryModel(AttackKind.INTERCEPT_RESEND_X, target="A"),
        AdversaryModel(AttackKind.DEPOLARIZE, 0.7),
    ],
)
def test_measure_triplets_matches_engine(backend, adversary):
    rng = np.random.default_rng(5)
    triplets = prepare_channel(400, adversary, rng)
    states = np.stack([t.amps for t in triplets])
    z_tests = rng.random(400) < 0.5
    uniforms = rng.random(400)
    outcomes = backend.measure_triplets(states, (~z_tests).astype(np.uint8), uniforms)
    for i in range(400):
        assert triplet_failed(int(outcomes[i]), bool(z_tests[i])) == check_triplet(
            triplets[i], bool(z_tests[i]), float(uniforms[i])
        )


def test_measure_triplets_validates_shapes(backend):
    with pytest.raises(ValueError):
        backend.measure_triplets(np.zeros((2, 4), complex), np.zeros(2, np.uint8), np.zeros(2))


def test_selected_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")
