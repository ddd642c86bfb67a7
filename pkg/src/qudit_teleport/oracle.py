"""Brute-force checks of the gate kernels and the protocol.

Dense matrices here are written entry by entry from the defining formulas
and never call the kernels under test; :func:`dense_from_kernel` is the
one bridge, and exists so the two can be compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import gates, protocol
from .errors import CapacityError
from .hilbert import PureState, SystemShape, basis_state

DEFAULT_DENSE_CAP = 1024

UNITARITY_TOL = 1e-12
DECOMPOSITION_TOL = 1e-12
COMMUTATION_TOL = 1e-15
UNIFORMITY_TOL = 1e-12
FIDELITY_TOL = 1e-10
SUPPORT_TOL = 1e-12
MODE_AGREEMENT_TOL = 1e-12
NO_SIGNALLING_TOL = 1e-10


def _check_cap(dim: int, dense_cap: int) -> None:
    if dim > dense_cap:
        raise CapacityError(f"dense matrix of dimension {dim} exceeds cap {dense_cap}")


def _omega_power(S: int, e: int) -> complex:
    return complex(np.exp(2j * np.pi * (e % S) / S))


def dense_dft(shape: SystemShape) -> np.ndarray:
    S = shape.s_level
    out = np.empty((S, S), dtype=np.complex128)
    for j in range(S):
        for m in range(S):
            out[j, m] = _omega_power(S, m * j) / np.sqrt(S)
    return out


def dense_ctrl_xor(shape: SystemShape, k: int, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    S, N = shape.s_level, shape.n_dim
    _check_cap(S * N, dense_cap)
    out = np.zeros((S * N, S * N), dtype=np.complex128)
    for m in range(S):
        for n in range(N):
            m_k = (m >> k) & 1
            n_k = (n >> k) & 1
            target = (n & ~(1 << k)) | ((m_k ^ n_k) << k)
            out[m * N + target, m * N + n] = 1.0
    return out


def dense_u_ac(shape: SystemShape, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """U_AC on C x A, one column per source |m>|n>, bits of the target set one at a time."""
    S, N, L = shape.s_level, shape.n_dim, shape.qubit_count
    _check_cap(S * N, dense_cap)
    out = np.zeros((S * N, S * N), dtype=np.complex128)
    for m in range(S):
        for n in range(N):
            for j in range(S):
                f = 0
                for k in range(L):
                    bit = ((n >> k) & 1) ^ ((j >> k) & 1) ^ ((m >> k) & 1)
                    f |= bit << k
                out[j * N + f, m * N + n] = _omega_power(S, m * j) / np.sqrt(S)
    return out


def dense_bob_correction(shape: SystemShape, j: int, n: int) -> np.ndarray:
    """Map taking Bob's basis vector e^{2i pi m j/S}|n^j^m> to |m>, for all m < N."""
    S, N = shape.s_level, shape.n_dim
    out = np.zeros((N, N), dtype=np.complex128)
    for m in range(N):
        out[m, m ^ n ^ j] = np.conj(_omega_power(S, m * j))
    return out


def dense_from_kernel(gate: gates.GateSpec, shape: SystemShape,
                      dense_cap: int = DEFAULT_DENSE_CAP,
                      kernel: Callable[[PureState, SystemShape], PureState] | None = None
                      ) -> np.ndarray:
    """Matrix whose column ``i`` is the kernel applied to basis vector ``i``."""
    gate.validate(shape)
    dim = shape.register_dim(gate.target)
    _check_cap(dim, dense_cap)
    if kernel is None:
        def kernel(state, shape):
            return gates.apply_gate(gate, state, shape)
    out = np.empty((dim, dim), dtype=np.complex128)
    for i in range(dim):
        out[:, i] = kernel(basis_state(shape, gate.target, i), shape).amplitudes
    return out


def unitarity_deviation(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


@dataclass
class OrthogonalityReport:
    passed: bool
    pairs_checked: int
    extra_pairs_checked: int
    # first colliding pair found, as a readable description
    worst_pair: str | None = None


def check_orthogonality(shape: SystemShape) -> OrthogonalityReport:
    """Exhaustively confirm that n ^ j ^ m is injective in each argument.

    ``pairs_checked`` counts the (n, j, m, m') sweep; the sweeps over n and j
    with the other two fixed are counted in ``extra_pairs_checked``.
    """
    S, N = shape.s_level, shape.n_dim
    worst = None
    pairs = 0
    extra = 0

    def same(a, b):
        return gates.f_index(shape, *a) == gates.f_index(shape, *b)

    for n, j in itertools.product(range(N), range(S)):
        for m, m2 in itertools.product(range(S), repeat=2):
            pairs += 1
            if same((n, j, m), (n, j, m2)) != (m == m2) and worst is None:
                worst = f"n={n}, j={j}: m={m} and m'={m2} share label"
    for j, m in itertools.product(range(S), range(S)):
        for n, n2 in itertools.product(range(N), repeat=2):
            extra += 1
            if same((n, j, m), (n2, j, m)) != (n == n2) and worst is None:
                worst = f"j={j}, m={m}: n={n} and n'={n2} share label"
    for n, m in itertools.product(range(N), range(S)):
        for j, j2 in itertools.product(range(S), repeat=2):
            extra += 1
            if same((n, j, m), (n, j2, m)) != (j == j2) and worst is None:
                worst = f"n={n}, m={m}: j={j} and j'={j2} share label"
    return OrthogonalityReport(worst is None, pairs, extra, worst)


@dataclass
class CheckResult:
    name: str
    deviation: float
    tolerance: float
    passed: bool
    skipped: bool = False
    detail: str = ""


@dataclass
class VerificationReport:
    shape: SystemShape
    trials: int
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _result(name, deviation, tol, detail=""):
    deviation = float(deviation)
    return CheckResult(name, deviation, tol, bool(deviation <= tol), detail=detail)


def _dense_checks(shape, dense_cap, u_ac_decomposed):
    S, N, L = shape.s_level, shape.n_dim, shape.qubit_count
    reference = dense_u_ac(shape, dense_cap)
    dft = dense_from_kernel(gates.GateSpec.dft(), shape, dense_cap)
    ctrl = [dense_from_kernel(gates.GateSpec.ctrl_xor(k), shape, dense_cap) for k in range(L)]
    direct = dense_from_kernel(gates.GateSpec(gates.GateKind.U_AC_DIRECT), shape, dense_cap)
    decomposed = dense_from_kernel(gates.GateSpec(gates.GateKind.U_AC_DECOMPOSED), shape,
                                   dense_cap, kernel=u_ac_decomposed)
    corrections = {(j, n): dense_from_kernel(gates.GateSpec.correction(j, n), shape, dense_cap)
                   for j in range(S) for n in range(N)}

    yield _result("unitarity_dft", unitarity_deviation(dft), UNITARITY_TOL)
    yield _result("unitarity_ctrl_xor", max(unitarity_deviation(c) for c in ctrl), UNITARITY_TOL)
    yield _result("unitarity_u_ac", max(unitarity_deviation(reference),
                                        unitarity_deviation(direct)), UNITARITY_TOL)
    yield _result("unitarity_bob_correction",
                  max(unitarity_deviation(c) for c in corrections.values()), UNITARITY_TOL,
                  detail=f"{len(corrections)} corrections")
    yield _result("dft_vs_formula", np.max(np.abs(dft - dense_dft(shape))), UNITARITY_TOL)
    yield _result("ctrl_xor_vs_formula",
                  max(np.max(np.abs(c - dense_ctrl_xor(shape, k, dense_cap)))
                      for k, c in enumerate(ctrl)), 0.0)
    yield _result("u_ac_direct_vs_formula", np.max(np.abs(direct - reference)), DECOMPOSITION_TOL)
    yield _result("decomposition", np.max(np.abs(decomposed - reference)), DECOMPOSITION_TOL)
    yield _result("bob_correction_vs_formula",
                  max(np.max(np.abs(c - dense_bob_correction(shape, j, n)))
                      for (j, n), c in corrections.items()), UNITARITY_TOL)


def _skipped(name, reason):
    return CheckResult(name, 0.0, 0.0, True, skipped=True, detail=reason)


def check_all(shape: SystemShape, trials: int = 32, seed: int = 0,
              dense_cap: int = DEFAULT_DENSE_CAP,
              u_ac_decomposed: Callable[[PureState, SystemShape], PureState]
              = gates.apply_u_ac_decomposed) -> VerificationReport:
    """Run every dense and protocol-level check; failures are reported, not raised."""
    report = VerificationReport(shape, trials, seed)
    S, N, L = shape.s_level, shape.n_dim, shape.qubit_count

    if S * N <= dense_cap:
        report.checks.extend(_dense_checks(shape, dense_cap, u_ac_decomposed))
    else:
        for name in ("unitarity_dft", "unitarity_ctrl_xor", "unitarity_u_ac",
                     "unitarity_bob_correction", "dft_vs_formula", "ctrl_xor_vs_formula",
                     "u_ac_direct_vs_formula", "decomposition", "bob_correction_vs_formula"):
            report.checks.append(_skipped(name, f"S*N={S * N} exceeds dense cap {dense_cap}"))

    ortho = check_orthogonality(shape)
    report.checks.append(CheckResult(
        "orthogonality", 0.0 if ortho.passed else 1.0, 0.0, ortho.passed,
        detail=ortho.worst_pair or f"{ortho.pairs_checked}+{ortho.extra_pairs_checked} pairs"))

    commutation = 0.0
    state_decomposition = 0.0
    uniformity = 0.0
    min_fidelity = 1.0
    leakage = 0.0
    mode_gap = 0.0
    no_signalling = 0.0
    rng = np.random.default_rng(seed)
    target_p = 1.0 / (N * S)
    for t in range(trials):
        amps = protocol.random_amplitudes(S, protocol.mix_seed(seed, t))
        ca = rng.standard_normal(S * N) + 1j * rng.standard_normal(S * N)
        ca = PureState(shape, "CA", ca / np.linalg.norm(ca))
        forward = gates.apply_u_ac_decomposed(ca, shape)
        backward = gates.apply_u_ac_decomposed(ca, shape, order=range(L - 1, -1, -1))
        commutation = max(commutation, np.max(np.abs(forward.amplitudes - backward.amplitudes)))
        direct_ca = gates.apply_u_ac_direct(ca, shape)
        via = u_ac_decomposed(ca, shape)
        state_decomposition = max(state_decomposition,
                                  np.max(np.abs(via.amplitudes - direct_ca.amplitudes)))

        runs = {}
        for mode in ("direct", "decomposed"):
            runs[mode] = protocol.run_teleportation(shape, amps, mode=mode)
            for tr in runs[mode]:
                uniformity = max(uniformity, abs(tr.record.probability - target_p))
                min_fidelity = min(min_fidelity, tr.fidelity)
                leakage = max(leakage, tr.leakage)
        for a, b in zip(runs["direct"], runs["decomposed"]):
            mode_gap = max(mode_gap,
                           np.max(np.abs(a.bob_raw.amplitudes - b.bob_raw.amplitudes)),
                           np.max(np.abs(a.bob_corrected.amplitudes - b.bob_corrected.amplitudes)),
                           abs(a.record.probability - b.record.probability))
        state = protocol.teleported_state(
            shape, protocol.prepare_input_state(shape, amps), "direct")
        rho = protocol.pre_message_bob_state(state)
        no_signalling = max(no_signalling, np.max(np.abs(rho - np.eye(N) / N)))

    report.checks.extend([
        _result("commutation", commutation, COMMUTATION_TOL),
        _result("decomposition_states", state_decomposition, DECOMPOSITION_TOL),
        _result("uniformity", uniformity, UNIFORMITY_TOL),
        _result("fidelity", 1.0 - min_fidelity, FIDELITY_TOL,
                detail=f"min fidelity {min_fidelity:.17g}"),
        _result("support", leakage, SUPPORT_TOL),
        _result("mode_agreement", mode_gap, MODE_AGREEMENT_TOL),
        _result("no_signalling", no_signalling, NO_SIGNALLING_TOL),
    ])
    return report
