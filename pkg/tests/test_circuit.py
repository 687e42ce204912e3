import json

import numpy as np
import pytest

from bosonic_classifier import circuit as circ
from bosonic_classifier import fock
from bosonic_classifier.circuit import CircuitSpec, ElementSpec, EncodingSpec, Kind
from bosonic_classifier.errors import DimensionError, SpecError

BS = fock.BEAMSPLITTER


def _chain_probability(phases, psi=(0, 1, 0), m=1):
    """Reference circuit by explicit 2x2 composition and permanent-oracle lifting."""
    mzi = lambda p: BS @ np.diag([np.exp(1j * p), 1]) @ BS
    ps = lambda p: np.diag([np.exp(1j * p), 1])
    U = mzi(phases[2]) @ ps(phases[1]) @ mzi(phases[0])
    out = fock.lift_oracle(U, 2).matrix @ np.asarray(psi, dtype=complex)
    return abs(out[m]) ** 2


def test_resolve_phases_encoding(reference):
    th = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    x = np.array([0.7, 0.9])
    assert np.allclose(circ.resolve_phases(reference, th, x), [0.1 + 0.2 * 0.9, 0.3 + 0.4 * 0.7, 0.5 + 0.6 * 0.9])
    assert np.array_equal(circ.resolve_phases(reference, np.zeros(6), x), np.zeros(3))
    assert np.allclose(circ.resolve_phases(reference, [1.0, 0, 2.0, 0, 3.0, 0], x), [1, 2, 3])
    with pytest.raises(DimensionError):
        circ.resolve_phases(reference, np.zeros(6), [0.1, 0.2, 0.3])
    with pytest.raises(DimensionError):
        circ.resolve_phases(reference, np.zeros(5), x)


def test_forward_at_zero_parameters(reference):
    # MZI(0) = iX twice gives -I on modes, identity on |11>
    want = _chain_probability([0.0, 0.0, 0.0])
    assert want == pytest.approx(1.0, abs=1e-12)
    assert circ.forward(reference, np.zeros(6), [0.3, 0.8]) == pytest.approx(want, abs=1e-12)


def test_empty_circuit_keeps_input():
    spec = CircuitSpec(2, (), fock.FockVector.basis(1, 1).amplitudes, 1, 0, 2)
    assert circ.forward(spec, np.zeros(0), [0.5, 0.5]) == pytest.approx(1.0)


def test_forward_matches_fock_apply_chain(reference, rng):
    for _ in range(20):
        th = rng.uniform(-4, 4, 6)
        x = rng.uniform(0, 1, 2)
        phi = circ.resolve_phases(reference, th, x)
        v = fock.FockVector(reference.input_state)
        v = fock.apply(fock.mzi(phi[0], 2), v)
        v = fock.apply(fock.phase_shifter(phi[1], "a", 2), v)
        v = fock.apply(fock.mzi(phi[2], 2), v)
        assert circ.forward(reference, th, x) == pytest.approx(fock.outcome_probability(v, 1), abs=1e-12)
        assert circ.forward(reference, th, x) == pytest.approx(_chain_probability(phi), abs=1e-12)


def test_forward_is_a_probability_and_periodic(reference, rng):
    th = rng.uniform(-10, 10, (10_000, 6))
    X = rng.uniform(0, 1, (10_000, 2))
    phases = np.stack([circ.resolve_phases(reference, t, x) for t, x in zip(th[:200], X[:200])])
    p = circ.forward_phases(reference, phases)
    for e in range(3):
        shifted = phases.copy()
        shifted[:, e] += 2 * np.pi
        assert np.allclose(circ.forward_phases(reference, shifted), p, atol=1e-12)
    batch = np.concatenate([circ.forward_batch(reference, t, x[None]) for t, x in zip(th, X)])
    assert np.all((batch >= 0) & (batch <= 1))


def test_arbitrary_input_state_is_supported():
    psi = np.array([0.6, 0.0, 0.8j])
    spec = CircuitSpec(
        2, (ElementSpec(Kind.MZI, EncodingSpec(0)),), psi, outcome=1, param_count=1, feature_dim=2
    )
    want = abs((fock.mzi(0.4, 2).matrix @ psi)[1]) ** 2
    assert circ.forward(spec, [0.4], [0.0, 0.0]) == pytest.approx(want, abs=1e-14)


def test_three_photon_circuit(rng):
    spec = CircuitSpec(
        3,
        (ElementSpec(Kind.MZI, EncodingSpec(0, ((1, 0),))), ElementSpec(Kind.PHASE, EncodingSpec(2))),
        fock.FockVector.basis(2, 1).amplitudes,
        outcome=2,
        param_count=3,
        feature_dim=1,
    )
    th, x = rng.uniform(-3, 3, 3), np.array([0.4])
    phi = circ.resolve_phases(spec, th, x)
    U = np.diag([np.exp(1j * phi[1]), 1]) @ BS @ np.diag([np.exp(1j * phi[0]), 1]) @ BS
    want = abs((fock.lift_oracle(U, 3).matrix @ spec.input_state)[2]) ** 2
    assert circ.forward(spec, th, x) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize(
    "p,b,label", [(0.7, 0.5, 1), (0.5, 0.5, 0), (0.01, 0.0, 1), (0.3, 0.5, 0)]
)
def test_classify_threshold_rule(p, b, label):
    spec = CircuitSpec(
        1,
        (ElementSpec(Kind.MZI, EncodingSpec(0)),),
        np.array([1.0, 0.0]),
        outcome=0,
        param_count=1,
        feature_dim=1,
        threshold=b,
    )
    # |<10|MZI(phi)|10>|^2 = sin^2(phi/2)
    phi = 2 * np.arcsin(np.sqrt(p))
    assert circ.forward(spec, [phi], [0.0]) == pytest.approx(p, abs=1e-12)
    if p == b:
        # land exactly on the threshold
        spec = spec.with_threshold(circ.forward(spec, [phi], [0.0]))
    assert circ.classify(spec, [phi], [0.0]) == label


def test_forward_sampled_extremes_and_seed(reference):
    th = np.zeros(6)
    assert circ.forward_sampled(reference, th, [0.2, 0.2], shots=17, seed=1) == 1.0
    hom = CircuitSpec(2, (ElementSpec(Kind.PHASE, EncodingSpec(0)),), np.array([1, 0, 0]), 1, 1, 1)
    assert circ.forward_sampled(hom, [0.3], [0.0], shots=50, seed=2) == 0.0
    a = circ.forward_sampled(reference, np.full(6, 0.8), [0.1, 0.9], 1000, seed=5)
    b = circ.forward_sampled(reference, np.full(6, 0.8), [0.1, 0.9], 1000, seed=5)
    assert a == b
    with pytest.raises(ValueError):
        circ.forward_sampled(reference, th, [0.2, 0.2], shots=0)


def test_sampling_concentrates():
    # p = 0.5 with 1e6 shots: sd 5e-4, so 0.002 is 4 sd
    est = circ.sample_probabilities(np.full(100, 0.5), 10**6, np.random.default_rng(0))
    assert np.mean(np.abs(est - 0.5) <= 0.002) >= 0.99
    assert np.mean(np.abs(est - 0.5) <= 5e-3) >= 0.99


def test_boundary_amplitudes_single_element():
    spec = CircuitSpec(2, (ElementSpec(Kind.PHASE, EncodingSpec(0)),), np.array([0.6, 0.0, 0.8]), 1, 1, 1)
    pre, post = circ.boundary_amplitudes(spec, [0.4], [0.0], 0)
    assert np.allclose(pre.amplitudes, [0.6, 0, 0.8])
    assert np.allclose(post.amplitudes, [0, 1, 0])


def test_boundary_amplitudes_reconstruct_forward(reference, rng):
    n = np.array([2, 1, 0])
    for e in range(3):
        th, x = rng.uniform(-3, 3, 6), rng.uniform(0, 1, 2)
        pre, post = circ.boundary_amplitudes(reference, th, x, e)
        assert pre.is_normalized() and post.is_normalized()
        base = circ.resolve_phases(reference, th, x)
        for phi in rng.uniform(-np.pi, np.pi, 20):
            amp = np.sum(np.conj(post.amplitudes) * np.exp(1j * n * phi) * pre.amplitudes)
            ph = base.copy()
            ph[e] = phi
            assert abs(amp) ** 2 == pytest.approx(circ.forward_phases(reference, ph[None])[0], abs=1e-10)


def test_boundary_amplitudes_middle_element(reference, rng):
    th, x = rng.uniform(-3, 3, 6), rng.uniform(0, 1, 2)
    phi = circ.resolve_phases(reference, th, x)
    pre, post = circ.boundary_amplitudes(reference, th, x, 1)
    assert np.allclose(pre.amplitudes, fock.mzi(phi[0], 2).matrix @ [0, 1, 0], atol=1e-14)
    assert np.allclose(post.amplitudes, fock.mzi(phi[2], 2).matrix.conj().T @ [0, 1, 0], atol=1e-14)
    batch_pre, batch_post = circ.boundary_amplitudes_batch(reference, phi[None], 1)
    assert np.allclose(batch_pre[0], pre.amplitudes) and np.allclose(batch_post[0], post.amplitudes)


def test_spec_validation():
    psi = np.array([0, 1, 0])
    mzi = lambda b, *w: ElementSpec(Kind.MZI, EncodingSpec(b, tuple(w)))
    with pytest.raises(SpecError, match="not referenced"):
        CircuitSpec(2, (mzi(0),), psi, 1, param_count=2, feature_dim=1)
    with pytest.raises(SpecError, match="parameter index"):
        CircuitSpec(2, (mzi(3),), psi, 1, param_count=1, feature_dim=1)
    with pytest.raises(SpecError, match="feature index"):
        CircuitSpec(2, (mzi(0, (1, 4)),), psi, 1, param_count=2, feature_dim=2)
    with pytest.raises(SpecError, match="normalized"):
        CircuitSpec(2, (mzi(0),), [1, 1, 0], 1, 1, 1)
    with pytest.raises(SpecError, match="threshold"):
        CircuitSpec(2, (mzi(0),), psi, 1, 1, 1, threshold=1.5)
    with pytest.raises(SpecError, match="outcome"):
        CircuitSpec(2, (mzi(0),), psi, 3, 1, 1)


def test_json_roundtrip(reference):
    text = circ.dumps(reference)
    again = circ.loads(text)
    assert again == reference
    assert circ.dumps(again) == text
    odd = CircuitSpec(2, reference.elements, np.array([0.6, 0.48j, 0.64]), 2, 6, 2, threshold=0.123456789012345)
    assert circ.loads(circ.dumps(odd)) == odd
    assert np.array_equal(circ.loads(circ.dumps(odd)).input_state, odd.input_state)


def test_json_preset_and_errors(reference):
    doc = circ.to_dict(reference)
    doc["input_state"] = "1,1"
    assert circ.from_dict(doc) == reference
    doc["input_state"] = "2,1"
    with pytest.raises(SpecError):
        circ.from_dict(doc)
    doc = circ.to_dict(reference)
    del doc["outcome"]
    with pytest.raises(SpecError, match="outcome"):
        circ.from_dict(doc)
    doc = circ.to_dict(reference)
    doc["elements"][0]["kind"] = "laser"
    with pytest.raises(SpecError):
        circ.from_dict(doc)


def test_fit_threshold_separates():
    p = [0.1, 0.2, 0.35, 0.6, 0.9]
    y = [0, 0, 0, 1, 1]
    b = circ.fit_threshold(p, y)
    assert 0.35 < b < 0.6
    assert circ.fit_threshold([0.3, 0.4], [1, 1]) == circ.DEFAULT_THRESHOLD


def test_shipped_paper_config_matches_builder(reference):
    from importlib import resources

    doc = json.loads(resources.files("bosonic_classifier").joinpath("configs/paper.json").read_text())
    assert circ.from_dict(doc["circuit"]) == reference
