"""End-to-end teleportation of a qudit state through L EPR pairs.

Pipeline: EPR pairs on A x B, input qudit on C, U_AC on C x A, a joint
measurement of C and A giving the classical message ``(j, n)``, Bob's
conditional state, his correction, and the fidelity against the input.

Randomness comes from numpy's PCG64 seeded per trial with
``mix_seed(base_seed, trial_index)`` (a SplitMix64 finalizer), so every
sampled outcome can be reproduced from the seed stored in its transcript.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import gates
from .errors import (
    CapacityError,
    DistributionError,
    ImpossibleOutcomeError,
    NormalizationError,
    RegisterIndexError,
    ShapeError,
)
from .hilbert import PureState, SystemShape

INPUT_NORM_TOL = 1e-9
IMPOSSIBLE_OUTCOME_PROB = 1e-15
DISTRIBUTION_SUM_TOL = 1e-9

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(base_seed: int, trial_index: int) -> int:
    """Per-trial 64-bit seed: SplitMix64 of ``base_seed + trial_index * gamma``."""
    if not 0 <= base_seed <= _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {base_seed}")
    return _splitmix64((base_seed + trial_index * _GOLDEN_GAMMA) & _MASK64)


def random_amplitudes(s_level: int, seed: int) -> np.ndarray:
    """Haar-random unit vector in C^S (complex normals, then normalized)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(s_level) + 1j * rng.standard_normal(s_level)
    return z / np.linalg.norm(z)


@dataclass(frozen=True)
class MeasurementRecord:
    j: int
    n: int
    probability: float


@dataclass(frozen=True)
class Exhaustive:
    """Enumerate every outcome with its exact probability."""


@dataclass(frozen=True)
class Sampled:
    seed: int
    trials: int = 1


@dataclass(frozen=True)
class Forced:
    j: int
    n: int


OutcomeSpec = Union[Exhaustive, Sampled, Forced]


@dataclass(frozen=True, eq=False)
class ProtocolTranscript:
    shape: SystemShape
    input_amplitudes: np.ndarray
    mode: str
    seed: int | None
    record: MeasurementRecord
    bob_raw: PureState
    bob_corrected: PureState
    fidelity: float
    # largest |amplitude| of the corrected state on B labels >= S
    leakage: float
    trial: int | None = None


def prepare_epr_pairs(shape: SystemShape) -> PureState:
    """Product of L pairs (|00> + |11>)/sqrt(2): amplitude 1/sqrt(N) on every |n>|n>."""
    N = shape.n_dim
    if N * N > shape.capacity:
        raise CapacityError(f"EPR register needs {N * N} amplitudes, cap is {shape.capacity}")
    amps = np.zeros((N, N), dtype=np.complex128)
    amps[np.arange(N), np.arange(N)] = 1.0 / np.sqrt(N)
    return PureState(shape, "AB", amps)


def prepare_input_state(shape: SystemShape, amplitudes: Sequence[complex],
                        normalize: bool = False) -> PureState:
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if amps.size != shape.s_level:
        raise ShapeError(f"expected {shape.s_level} amplitudes, got {amps.size}")
    norm = float(np.linalg.norm(amps))
    if norm == 0.0 or not np.isfinite(norm):
        raise NormalizationError("input amplitudes have zero or non-finite norm")
    if not normalize and abs(norm * norm - 1.0) > INPUT_NORM_TOL:
        raise NormalizationError(f"input norm^2 is {norm * norm:.17g}, expected 1")
    return PureState(shape, "C", amps / norm)


def assemble_initial_state(input_state: PureState, epr: PureState) -> PureState:
    if input_state.register != "C" or epr.register != "AB":
        raise ShapeError("expected a C input state and an AB EPR state")
    return input_state.tensor(epr)


def _outcome_slices(state: PureState) -> np.ndarray:
    if state.register != "CAB":
        raise ShapeError(f"expected a CAB state, got register {state.register!r}")
    S, N = state.shape.s_level, state.shape.n_dim
    return state.amplitudes.reshape(S, N, N)


def outcome_distribution(state: PureState) -> list[MeasurementRecord]:
    """Exact probabilities of every (j, n), ordered lexicographically."""
    probs = np.sum(np.abs(_outcome_slices(state)) ** 2, axis=2)
    S, N = probs.shape
    return [MeasurementRecord(j, n, float(probs[j, n])) for j in range(S) for n in range(N)]


def collapse_on_outcome(state: PureState, j: int, n: int) -> PureState:
    """Bob's normalized state after Alice observes ``(j, n)``."""
    slices = _outcome_slices(state)
    S, N = state.shape.s_level, state.shape.n_dim
    if not (0 <= j < S and 0 <= n < N):
        raise RegisterIndexError(f"outcome (j={j}, n={n}) outside shape {state.shape}")
    bob = slices[j, n]
    weight = float(np.vdot(bob, bob).real)
    if weight <= IMPOSSIBLE_OUTCOME_PROB:
        raise ImpossibleOutcomeError(f"outcome (j={j}, n={n}) has probability {weight:.3g}")
    return PureState(state.shape, "B", bob / np.sqrt(weight))


def _validated_cdf(distribution: Sequence[MeasurementRecord]) -> np.ndarray:
    if not distribution:
        raise DistributionError("empty distribution")
    probs = np.array([r.probability for r in distribution], dtype=float)
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise DistributionError("probabilities must be finite and non-negative")
    total = probs.sum()
    if abs(total - 1.0) > DISTRIBUTION_SUM_TOL:
        raise DistributionError(f"probabilities sum to {total:.17g}")
    return np.cumsum(probs)


def _draw(cdf: np.ndarray, u: float) -> int:
    idx = int(np.searchsorted(cdf, u, side="right"))
    return min(idx, cdf.size - 1)


def sample_outcome(distribution: Sequence[MeasurementRecord], rng_seed: int) -> MeasurementRecord:
    """Inverse-CDF draw over the records in the order given."""
    cdf = _validated_cdf(distribution)
    u = np.random.default_rng(rng_seed).random()
    return distribution[_draw(cdf, u)]


def sample_outcomes(distribution: Sequence[MeasurementRecord], base_seed: int,
                    trials: int) -> list[tuple[int, MeasurementRecord]]:
    """``trials`` independent draws, trial ``t`` seeded with ``mix_seed(base_seed, t)``."""
    cdf = _validated_cdf(distribution)
    out = []
    for t in range(trials):
        seed = mix_seed(base_seed, t)
        u = np.random.default_rng(seed).random()
        out.append((seed, distribution[_draw(cdf, u)]))
    return out


def apply_u_ac(state: PureState, shape: SystemShape, mode: str) -> PureState:
    if mode == "direct":
        return gates.apply_u_ac_direct(state, shape)
    if mode == "decomposed":
        return gates.apply_u_ac_decomposed(state, shape)
    raise ValueError(f"mode must be 'direct' or 'decomposed', got {mode!r}")


def teleported_state(shape: SystemShape, input_state: PureState, mode: str) -> PureState:
    """Composite C x A x B state right after Alice applies U_AC."""
    initial = assemble_initial_state(input_state, prepare_epr_pairs(shape))
    return apply_u_ac(initial, shape, mode)


def _transcript(shape, input_state, mode, state, record, seed=None, trial=None):
    raw = collapse_on_outcome(state, record.j, record.n)
    corrected = gates.bob_correction(raw, shape, record.j, record.n)
    S = shape.s_level
    # B label m < S is identified with qudit level m; labels >= S must be empty
    embedded = corrected.amplitudes[:S]
    leakage = float(np.max(np.abs(corrected.amplitudes[S:]), initial=0.0))
    fid = abs(complex(np.vdot(input_state.amplitudes, embedded)))
    return ProtocolTranscript(
        shape=shape,
        input_amplitudes=input_state.amplitudes,
        mode=mode,
        seed=seed,
        record=record,
        bob_raw=raw,
        bob_corrected=corrected,
        fidelity=fid,
        leakage=leakage,
        trial=trial,
    )


def run_teleportation(shape: SystemShape, amplitudes: Sequence[complex],
                      mode: str = "direct", outcome: OutcomeSpec = Exhaustive(),
                      normalize: bool = False) -> list[ProtocolTranscript]:
    """Teleport ``amplitudes`` and return one transcript per produced outcome.

    ``Exhaustive()`` yields all S*N outcomes in (j, n) order, ``Forced(j, n)``
    a single chosen one, ``Sampled(seed, trials)`` one transcript per trial.
    """
    input_state = prepare_input_state(shape, amplitudes, normalize=normalize)
    state = teleported_state(shape, input_state, mode)
    distribution = outcome_distribution(state)

    if isinstance(outcome, Exhaustive):
        return [_transcript(shape, input_state, mode, state, r) for r in distribution]
    if isinstance(outcome, Forced):
        if not (0 <= outcome.j < shape.s_level and 0 <= outcome.n < shape.n_dim):
            raise RegisterIndexError(f"forced outcome ({outcome.j}, {outcome.n}) out of range")
        record = distribution[outcome.j * shape.n_dim + outcome.n]
        return [_transcript(shape, input_state, mode, state, record)]
    if isinstance(outcome, Sampled):
        if outcome.trials < 1:
            raise ValueError("trials must be >= 1")
        cache: dict[tuple[int, int], ProtocolTranscript] = {}
        out = []
        for t, (seed, record) in enumerate(sample_outcomes(distribution, outcome.seed,
                                                           outcome.trials)):
            key = (record.j, record.n)
            if key not in cache:
                cache[key] = _transcript(shape, input_state, mode, state, record)
            base = cache[key]
            out.append(ProtocolTranscript(
                shape, base.input_amplitudes, mode, seed, record, base.bob_raw,
                base.bob_corrected, base.fidelity, base.leakage, trial=t))
        return out
    raise TypeError(f"unsupported outcome spec {outcome!r}")


def pre_message_bob_state(state: PureState) -> np.ndarray:
    """Bob's density matrix before hearing (j, n): sum_(j,n) p |raw><raw|."""
    N = state.shape.n_dim
    rho = np.zeros((N, N), dtype=np.complex128)
    for record in outcome_distribution(state):
        if record.probability <= IMPOSSIBLE_OUTCOME_PROB:
            continue
        raw = collapse_on_outcome(state, record.j, record.n).amplitudes
        rho += record.probability * np.outer(raw, raw.conj())
    return rho
