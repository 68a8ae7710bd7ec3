import numpy as np
import pytest

from robust_pulses.benchmarking import (
    CLIFFORD_WORDS, GENERATORS, DecoherenceSetting, GateSet, RBDataset, clifford_group, clifford_ptms,
    decoherence_channel, decoherence_kraus, decoherence_ptm, fit_decay, generator_ptms, irb_fidelity,
    rb_fit, rb_run, rb_sequences, rcp_gate_set, reference_gate_set, sequence_rng, sequence_variance, word_unitary,
)
from robust_pulses.metrics import liouville_from_unitary
from robust_pulses.quantum import I2, dagger

from conftest import equal_up_to_phase

LENGTHS = (1, 10, 50, 100)


@pytest.fixture(scope="module")
def group():
    return clifford_group()


def test_clifford_group_closure_exhaustive(group):
    us = group.unitaries
    for a in range(24):
        for b in range(24):
            assert equal_up_to_phase(us[a] @ us[b], us[group.table[a, b]])


def test_clifford_inverses_and_identity(group):
    assert CLIFFORD_WORDS[0] == ()
    assert np.allclose(group.unitaries[0], I2)
    for a in range(24):
        assert equal_up_to_phase(group.unitaries[a] @ group.unitaries[group.inverse[a]], I2)


def test_clifford_elements_distinct(group):
    for a in range(24):
        for b in range(a):
            assert not equal_up_to_phase(group.unitaries[a], group.unitaries[b])


def test_mean_gate_count(group):
    assert group.mean_gate_count == pytest.approx(44 / 24)
    with pytest.raises(ValueError):
        group.index_of(np.diag([1, np.exp(0.3j)]))


def test_decoherence_limits():
    rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    assert np.allclose(decoherence_channel(DecoherenceSetting(), 50.0)(rho), rho)
    out = decoherence_channel(DecoherenceSetting(1.0, 1.5), 1e6)(rho)
    assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-12)
    with pytest.raises(ValueError):
        DecoherenceSetting(10.0, 25.0)
    with pytest.raises(ValueError):
        DecoherenceSetting(-1.0, 1.0)


def test_decoherence_rates():
    s = DecoherenceSetting(20.0, 25.0)
    ks = decoherence_kraus(s, 50.0)
    assert np.allclose(sum(dagger(k) @ k for k in ks), I2)
    L = decoherence_ptm(s, 50.0)
    tau = 0.05
    assert L[3, 3] == pytest.approx(np.exp(-tau / 20.0))
    assert L[1, 1] == pytest.approx(np.exp(-tau / 25.0))
    assert s.T_phi == pytest.approx(1 / (1 / 25 - 1 / 40))


def test_gate_set_requires_generators():
    with pytest.raises(ValueError):
        GateSet("partial", {"X": None})


@pytest.mark.parametrize("make", [lambda: reference_gate_set("gaussian"), rcp_gate_set])
def test_generators_realise_their_rotations(make):
    ptms = generator_ptms(make())
    for g in GENERATORS:
        ideal = liouville_from_unitary(word_unitary([g])).L
        assert np.allclose(ptms[g], ideal, atol=2e-4)


def test_noiseless_rb_is_perfect():
    data = rb_run(reference_gate_set("cosine"), 0.0, None, LENGTHS, n_seq=5)
    assert np.allclose(data.fidelities, 1.0, atol=1e-6)
    ideal = clifford_ptms(clifford_group(), {g: liouville_from_unitary(word_unitary([g])).L for g in GENERATORS})
    exact = rb_sequences(ideal, clifford_group(), LENGTHS, 5)
    assert np.allclose(exact, 1.0, atol=1e-9)


def test_rb_deterministic_per_seed():
    gs = reference_gate_set("gaussian")
    a = rb_run(gs, 0.005, None, LENGTHS, 4, seed=3)
    b = rb_run(gs, 0.005, None, LENGTHS, 4, seed=3)
    c = rb_run(gs, 0.005, None, LENGTHS, 4, seed=4)
    assert np.array_equal(a.fidelities, b.fidelities)
    assert not np.array_equal(a.fidelities, c.fidelities)


def test_sequence_rng_streams_differ():
    assert sequence_rng(0, 10, 1).integers(1 << 30) != sequence_rng(0, 10, 1, 1).integers(1 << 30)


def test_depolarizing_rb_recovers_q():
    group = clifford_group()
    q = 0.995
    depol = np.diag([1.0, q, q, q])
    ideal = {g: liouville_from_unitary(word_unitary([g])).L for g in GENERATORS}
    cps = np.einsum("ij,kjl->kil", depol, clifford_ptms(group, ideal))
    lengths = (1, 20, 50, 100, 200, 400)
    fids = rb_sequences(cps, group, lengths, 10)
    fit = fit_decay(lengths, fids.mean(axis=1))
    assert fit.p == pytest.approx(q, abs=1e-3)


def test_decoherence_only_rb_matches_analytic_rate():
    s = DecoherenceSetting(20.0, 25.0)
    gs = reference_gate_set("gaussian")
    data = rb_run(gs, 0.0, s, (1, 50, 200, 500, 1000), n_seq=10)
    fit = rb_fit(data)
    # per gate, the unital part of amplitude damping + dephasing has mean eigenvalue below
    group = clifford_group()
    logs = []
    for w in group.words:
        total = 0.0
        for g in w:
            L = decoherence_ptm(s, gs.durations()[g])
            total += np.log((L[1, 1] + L[2, 2] + L[3, 3]) / 3)
        logs.append(total)
    predicted = np.exp(np.mean(logs))
    assert 1 - fit.p == pytest.approx(1 - predicted, rel=0.1)


def test_fit_recovers_synthetic_decay():
    m = np.array([1, 10, 25, 50, 100, 200, 400, 800])
    fit = fit_decay(m, 0.5 * 0.996**m + 0.5)
    assert fit.p == pytest.approx(0.996, abs=1e-4)
    assert fit_decay(m, np.ones(m.size)).F_avg == pytest.approx(1.0)
    assert 1 - (1 - 0.99625) / 3.75 == pytest.approx(0.999)


def test_irb_formula_and_warning():
    assert irb_fidelity(0.999, 0.999) == 1.0
    assert irb_fidelity(0.998, 0.999) == pytest.approx(1 - (1 - 0.998 / 0.999) / 2)
    with pytest.warns(RuntimeWarning):
        irb_fidelity(0.9995, 0.999)


def test_interleaved_ideal_gate_keeps_reference_decay():
    s = DecoherenceSetting(20.0, 25.0)
    data = rb_run(rcp_gate_set(), 0.0, s, LENGTHS, 4, interleave="X")
    assert np.all(data.fidelities <= 1.0) and np.all(data.fidelities > 0.5)
    with pytest.raises(ValueError):
        rb_run(rcp_gate_set(), interleave="Z")


def test_sequence_variance_of_identical_sequences():
    data = RBDataset(np.array([1, 2]), np.full((2, 5), 0.9))
    assert np.allclose(sequence_variance(data), 0.0)
    assert len(data.rows()) == 10


def test_shot_sampling_is_binomial_and_reproducible():
    gs = reference_gate_set("cosine")
    a = rb_run(gs, 0.0, None, (1, 10), 20, shots=100)
    assert np.allclose(a.fidelities * 100, np.round(a.fidelities * 100))
    assert np.array_equal(a.fidelities, rb_run(gs, 0.0, None, (1, 10), 20, shots=100).fidelities)
