import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qudit_teleport import (
    DistributionError,
    Exhaustive,
    Forced,
    ImpossibleOutcomeError,
    MeasurementRecord,
    NormalizationError,
    PureState,
    Sampled,
    ShapeError,
    assemble_initial_state,
    collapse_on_outcome,
    compose_index,
    make_shape,
    mix_seed,
    outcome_distribution,
    prepare_epr_pairs,
    prepare_input_state,
    random_amplitudes,
    run_teleportation,
    sample_outcome,
)
from qudit_teleport.protocol import (
    pre_message_bob_state,
    sample_outcomes,
    teleported_state,
)

R2 = 1 / math.sqrt(2)


def after_u_ac(shape, amps, mode="direct"):
    return teleported_state(shape, prepare_input_state(shape, amps), mode)


def test_epr_pairs_single():
    out = prepare_epr_pairs(make_shape(2))
    np.testing.assert_allclose(out.amplitudes, [R2, 0, 0, R2], atol=1e-15)


def test_epr_pairs_two_pairs_is_tensor_product():
    shape = make_shape(3)
    out = prepare_epr_pairs(shape)
    # |n>>_A |b>>_B with A ordered first; each pair contributes (|00>+|11>)/sqrt2
    expected = np.zeros(16)
    for n in range(4):
        expected[n * 4 + n] = 0.5
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)


@pytest.mark.parametrize("s", [2, 5, 9, 16])
def test_epr_pairs_diagonal_support(s):
    shape = make_shape(s)
    amps = prepare_epr_pairs(shape).amplitudes.reshape(shape.n_dim, shape.n_dim)
    np.testing.assert_allclose(amps, np.eye(shape.n_dim) / math.sqrt(shape.n_dim), atol=1e-15)
    assert np.count_nonzero(amps) == shape.n_dim


def test_prepare_input_state():
    shape2 = make_shape(2)
    np.testing.assert_array_equal(prepare_input_state(shape2, [1, 0]).amplitudes, [1, 0])
    equal = [1 / math.sqrt(3)] * 3
    psi = prepare_input_state(make_shape(3), equal)
    assert abs(psi.norm() - 1) <= 1e-12
    with pytest.raises(NormalizationError):
        prepare_input_state(shape2, [0.6, 0.7])
    np.testing.assert_allclose(prepare_input_state(shape2, [0.6, 0.7], normalize=True).amplitudes,
                               np.array([0.6, 0.7]) / math.sqrt(0.85), atol=1e-15)
    with pytest.raises(ShapeError):
        prepare_input_state(shape2, [1, 0, 0])


def test_assemble_initial_state():
    shape = make_shape(2)
    full = assemble_initial_state(prepare_input_state(shape, [1, 0]), prepare_epr_pairs(shape))
    assert full.amplitudes[compose_index(shape, 0, 1, 1)] == pytest.approx(R2)

    shape3 = make_shape(3)
    alpha = 1 / math.sqrt(3)
    full = assemble_initial_state(prepare_input_state(shape3, [alpha] * 3),
                                  prepare_epr_pairs(shape3))
    assert full.amplitudes[compose_index(shape3, 1, 2, 2)] == pytest.approx(alpha / 2, abs=1e-15)
    for idx, a in enumerate(full.amplitudes):
        m, n, b = divmod(idx // 4, 4) + (idx % 4,)
        if n != b:
            assert a == 0


def test_assemble_rejects_wrong_registers():
    shape = make_shape(2)
    with pytest.raises(ShapeError):
        assemble_initial_state(prepare_epr_pairs(shape), prepare_input_state(shape, [1, 0]))


@pytest.mark.parametrize("s, amps", [
    (2, [1, 0]),
    (2, [R2, 1j * R2]),
    (3, [1 / math.sqrt(3)] * 3),
    (3, [0.6, 0, 0.8j]),
])
def test_outcome_distribution_uniform(s, amps):
    shape = make_shape(s)
    dist = outcome_distribution(after_u_ac(shape, amps))
    assert len(dist) == s * shape.n_dim
    assert [(r.j, r.n) for r in dist] == [(j, n) for j in range(s) for n in range(shape.n_dim)]
    for r in dist:
        assert abs(r.probability - 1 / (s * shape.n_dim)) <= 1e-12
    assert abs(sum(r.probability for r in dist) - 1) <= 1e-12


def test_collapse_examples():
    shape = make_shape(2)
    bob = collapse_on_outcome(after_u_ac(shape, [1, 0]), 1, 0)
    np.testing.assert_allclose(bob.amplitudes, [0, 1], atol=1e-15)

    bob = collapse_on_outcome(after_u_ac(shape, [R2, R2]), 1, 0)
    np.testing.assert_allclose(bob.amplitudes, [-R2, R2], atol=1e-15)

    alpha = [0.6, 0.8j]
    bob = collapse_on_outcome(after_u_ac(shape, alpha), 0, 0)
    np.testing.assert_allclose(bob.amplitudes, alpha, atol=1e-15)


@pytest.mark.parametrize("s", [3, 5, 7, 12])
def test_collapse_matches_conditional_state_formula(s):
    shape = make_shape(s)
    alpha = random_amplitudes(s, 99)
    state = after_u_ac(shape, alpha, "decomposed")
    for j in range(s):
        for n in range(shape.n_dim):
            expected = np.zeros(shape.n_dim, dtype=complex)
            for m in range(s):
                expected[n ^ j ^ m] = alpha[m] * cmath.exp(2j * math.pi * m * j / s)
            bob = collapse_on_outcome(state, j, n).amplitudes
            # equal up to global phase; the slice carries a real positive factor here
            assert np.max(np.abs(bob - expected)) <= 1e-12


def test_collapse_impossible_outcome():
    shape = make_shape(2)
    state = PureState(shape, "CAB", np.eye(1, 8, 0).ravel())
    with pytest.raises(ImpossibleOutcomeError):
        collapse_on_outcome(state, 1, 1)


def test_sample_outcome_single_record():
    record = MeasurementRecord(0, 0, 1.0)
    assert sample_outcome([record], 12345) == record


def test_sample_outcome_deterministic():
    dist = outcome_distribution(after_u_ac(make_shape(5), random_amplitudes(5, 3)))
    draws = {sample_outcome(dist, 2**63 + 17) for _ in range(5)}
    assert len(draws) == 1


def test_sample_outcome_rejects_malformed():
    with pytest.raises(DistributionError):
        sample_outcome([], 0)
    with pytest.raises(DistributionError):
        sample_outcome([MeasurementRecord(0, 0, 0.5)], 0)
    with pytest.raises(DistributionError):
        sample_outcome([MeasurementRecord(0, 0, 1.5), MeasurementRecord(0, 1, -0.5)], 0)


def test_sampling_frequencies_within_five_sigma():
    shape = make_shape(2)
    dist = outcome_distribution(after_u_ac(shape, [R2, R2]))
    trials = 10**5
    counts = {}
    for _, r in sample_outcomes(dist, 2024, trials):
        counts[(r.j, r.n)] = counts.get((r.j, r.n), 0) + 1
    p = 0.25
    sigma = math.sqrt(p * (1 - p) / trials)
    assert len(counts) == 4
    for c in counts.values():
        assert abs(c / trials - p) <= 5 * sigma


def test_mix_seed_is_splitmix64():
    # first outputs of the SplitMix64 stream seeded with 0
    assert mix_seed(0, 0) == 0xE220A8397B1DCDAF
    assert mix_seed(0, 1) == 0x6E789E6AA1B965F4
    assert mix_seed(1234, 5) == mix_seed(1234, 5)
    assert mix_seed(1234, 5) != mix_seed(1234, 6)
    with pytest.raises(ValueError):
        mix_seed(-1, 0)


def test_run_exhaustive_bennett():
    transcripts = run_teleportation(make_shape(2), [1, 0])
    assert len(transcripts) == 4
    for tr in transcripts:
        assert tr.fidelity >= 1 - 1e-10
        assert tr.seed is None


def test_run_exhaustive_random_states_s5():
    shape = make_shape(5)
    assert shape.qubit_count == 3
    for t in range(64):
        amps = random_amplitudes(5, mix_seed(77, t))
        transcripts = run_teleportation(shape, amps, mode="decomposed", outcome=Exhaustive())
        assert len(transcripts) == 40
        assert min(tr.fidelity for tr in transcripts) >= 1 - 1e-10


def test_run_forced_outcome_always_succeeds():
    shape = make_shape(6)
    amps = random_amplitudes(6, 8)
    for j in range(6):
        for n in range(shape.n_dim):
            (tr,) = run_teleportation(shape, amps, outcome=Forced(j, n))
            assert (tr.record.j, tr.record.n) == (j, n)
            assert tr.fidelity >= 1 - 1e-10


def test_run_sampled_records_per_trial_seed():
    shape = make_shape(3)
    amps = random_amplitudes(3, 4)
    transcripts = run_teleportation(shape, amps, outcome=Sampled(seed=9, trials=50))
    assert [tr.trial for tr in transcripts] == list(range(50))
    assert [tr.seed for tr in transcripts] == [mix_seed(9, t) for t in range(50)]
    again = run_teleportation(shape, amps, outcome=Sampled(seed=9, trials=50))
    assert [(a.record.j, a.record.n) for a in transcripts] == \
           [(b.record.j, b.record.n) for b in again]


def test_run_rejects_unknown_mode():
    with pytest.raises(ValueError):
        run_teleportation(make_shape(2), [1, 0], mode="bell")


@settings(max_examples=40, deadline=None)
@given(s=st.integers(2, 16), seed=st.integers(0, 2**64 - 1),
       mode=st.sampled_from(["direct", "decomposed"]))
def test_teleportation_identity(s, seed, mode):
    shape = make_shape(s)
    for tr in run_teleportation(shape, random_amplitudes(s, seed), mode=mode):
        assert abs(tr.record.probability - 1 / (s * shape.n_dim)) <= 1e-12
        assert tr.fidelity >= 1 - 1e-10
        assert tr.leakage <= 1e-12
        assert abs(tr.bob_raw.norm() - 1) <= 1e-12
        assert abs(tr.bob_corrected.norm() - 1) <= 1e-12


@pytest.mark.parametrize("s", range(2, 9))
def test_modes_agree(s):
    shape = make_shape(s)
    amps = random_amplitudes(s, s)
    direct = run_teleportation(shape, amps, mode="direct")
    decomposed = run_teleportation(shape, amps, mode="decomposed")
    for a, b in zip(direct, decomposed):
        assert np.max(np.abs(a.bob_raw.amplitudes - b.bob_raw.amplitudes)) <= 1e-12
        assert np.max(np.abs(a.bob_corrected.amplitudes - b.bob_corrected.amplitudes)) <= 1e-12


@pytest.mark.parametrize("s", range(2, 9))
def test_bob_is_maximally_mixed_before_message(s):
    shape = make_shape(s)
    rho = pre_message_bob_state(after_u_ac(shape, random_amplitudes(s, 100 + s)))
    assert np.max(np.abs(rho - np.eye(shape.n_dim) / shape.n_dim)) <= 1e-10
