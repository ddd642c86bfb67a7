"""Matrix-free gate kernels on the C x A (x B) register.

Kernels reshape the amplitude vector to ``(S, N, rest)`` (qudit, Alice
qubits, whatever follows) and act by index arithmetic and phase
multiplication. Dense matrices are never built here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RegisterIndexError, ShapeError
from .hilbert import PureState, SystemShape


def f_index(shape: SystemShape, n: int, j: int, m: int) -> int:
    """Alice/Bob label carrying amplitude ``m`` after outcome ``(j, n)``: n ^ j ^ m."""
    S, N = shape.s_level, shape.n_dim
    if not (0 <= n < N and 0 <= j < S and 0 <= m < S):
        raise RegisterIndexError(f"(n={n}, j={j}, m={m}) outside shape {shape}")
    return n ^ j ^ m


def _check_state(state: PureState, shape: SystemShape, prefix: str) -> None:
    if state.shape != shape:
        raise ShapeError(f"state shape {state.shape} does not match {shape}")
    if not state.register.startswith(prefix):
        raise ShapeError(f"kernel needs register starting with {prefix!r}, got {state.register!r}")


def _qudit_view(state: PureState) -> np.ndarray:
    """Amplitudes as (S, N, rest) for a register starting with CA."""
    S, N = state.shape.s_level, state.shape.n_dim
    return state.amplitudes.reshape(S, N, -1)


def apply_dft_qudit(state: PureState, shape: SystemShape, inverse: bool = False) -> PureState:
    """|m> -> S**-0.5 * sum_j exp(+2i pi m j / S) |j> on the qudit."""
    _check_state(state, shape, "C")
    psi = state.amplitudes.reshape(shape.s_level, -1)
    # numpy's ifft carries the +i sign convention; ortho gives the 1/sqrt(S)
    if inverse:
        out = np.fft.fft(psi, axis=0, norm="ortho")
    else:
        out = np.fft.ifft(psi, axis=0, norm="ortho")
    return state.with_amplitudes(out)


def apply_ctrl_xor(state: PureState, shape: SystemShape, k: int) -> PureState:
    """XOR bit ``k`` of the qudit label into qubit A_k. Pure permutation."""
    _check_state(state, shape, "CA")
    if not 0 <= k < shape.qubit_count:
        raise RegisterIndexError(f"qubit index {k} outside [0, {shape.qubit_count})")
    psi = _qudit_view(state)
    out = psi.copy()
    labels = np.arange(shape.n_dim)
    for m in range(shape.s_level):
        if (m >> k) & 1:
            out[m] = psi[m][labels ^ (1 << k)]
    return state.with_amplitudes(out)


def apply_u_ac_direct(state: PureState, shape: SystemShape) -> PureState:
    """|m>|n> -> S**-0.5 * sum_j exp(2i pi m j / S) |j>|n ^ j ^ m>, in one pass."""
    _check_state(state, shape, "CA")
    S = shape.s_level
    psi = _qudit_view(state)
    out = np.zeros_like(psi)
    labels = np.arange(shape.n_dim)
    scale = 1.0 / np.sqrt(S)
    for m in range(S):
        for j in range(S):
            phase = np.exp(2j * np.pi * ((m * j) % S) / S) * scale
            # source |m>|n> lands on |j>|n ^ j ^ m>
            out[j, labels ^ j ^ m] += phase * psi[m]
    return state.with_amplitudes(out)


def apply_u_ac_decomposed(state: PureState, shape: SystemShape,
                          order: Sequence[int] | None = None,
                          dft=apply_dft_qudit) -> PureState:
    """U_AC as (prod_k U_Ck) . DFT_S . (prod_k U_Ck), rightmost block first.

    ``order`` permutes the U_Ck factors inside each block; ``dft`` lets
    callers swap in a different qudit transform (fault injection in tests).
    """
    _check_state(state, shape, "CA")
    ks = list(range(shape.qubit_count)) if order is None else list(order)
    for k in ks:
        state = apply_ctrl_xor(state, shape, k)
    state = dft(state, shape)
    for k in ks:
        state = apply_ctrl_xor(state, shape, k)
    return state


def bob_correction(state: PureState, shape: SystemShape, j: int, n: int) -> PureState:
    """Undo outcome ``(j, n)`` on Bob's register.

    Relabels |b> -> |b ^ n ^ j>, then multiplies |m> by exp(-2i pi m j / S)
    for every m in [0, N).
    """
    if state.shape != shape or state.register != "B":
        raise ShapeError("bob_correction acts on the B register only")
    S, N = shape.s_level, shape.n_dim
    if not (0 <= j < S and 0 <= n < N):
        raise RegisterIndexError(f"outcome (j={j}, n={n}) outside shape {shape}")
    labels = np.arange(N)
    out = np.empty(N, dtype=np.complex128)
    out[labels ^ n ^ j] = state.amplitudes
    out *= np.exp(-2j * np.pi * ((labels * j) % S) / S)
    return state.with_amplitudes(out)


class GateKind(enum.Enum):
    DFT_S = "dft_s"
    DFT_S_INVERSE = "dft_s_inverse"
    CTRL_XOR = "ctrl_xor"
    U_AC_DIRECT = "u_ac_direct"
    U_AC_DECOMPOSED = "u_ac_decomposed"
    BOB_CORRECTION = "bob_correction"


# register each gate kind acts on when applied in isolation
_TARGETS = {
    GateKind.DFT_S: "C",
    GateKind.DFT_S_INVERSE: "C",
    GateKind.CTRL_XOR: "CA",
    GateKind.U_AC_DIRECT: "CA",
    GateKind.U_AC_DECOMPOSED: "CA",
    GateKind.BOB_CORRECTION: "B",
}


@dataclass(frozen=True)
class GateSpec:
    kind: GateKind
    k: int | None = None
    j: int | None = None
    n: int | None = None

    @property
    def target(self) -> str:
        return _TARGETS[self.kind]

    def validate(self, shape: SystemShape) -> None:
        if self.kind is GateKind.CTRL_XOR:
            if self.k is None or not 0 <= self.k < shape.qubit_count:
                raise RegisterIndexError(f"CtrlXor needs 0 <= k < {shape.qubit_count}")
        if self.kind is GateKind.BOB_CORRECTION:
            if (self.j is None or self.n is None
                    or not 0 <= self.j < shape.s_level or not 0 <= self.n < shape.n_dim):
                raise RegisterIndexError(
                    f"BobCorrection needs 0 <= j < {shape.s_level}, 0 <= n < {shape.n_dim}")

    @classmethod
    def dft(cls, inverse: bool = False) -> GateSpec:
        return cls(GateKind.DFT_S_INVERSE if inverse else GateKind.DFT_S)

    @classmethod
    def ctrl_xor(cls, k: int) -> GateSpec:
        return cls(GateKind.CTRL_XOR, k=k)

    @classmethod
    def correction(cls, j: int, n: int) -> GateSpec:
        return cls(GateKind.BOB_CORRECTION, j=j, n=n)


def apply_gate(gate: GateSpec, state: PureState, shape: SystemShape) -> PureState:
    gate.validate(shape)
    kind = gate.kind
    if kind is GateKind.DFT_S:
        return apply_dft_qudit(state, shape)
    if kind is GateKind.DFT_S_INVERSE:
        return apply_dft_qudit(state, shape, inverse=True)
    if kind is GateKind.CTRL_XOR:
        return apply_ctrl_xor(state, shape, gate.k)
    if kind is GateKind.U_AC_DIRECT:
        return apply_u_ac_direct(state, shape)
    if kind is GateKind.U_AC_DECOMPOSED:
        return apply_u_ac_decomposed(state, shape)
    return bob_correction(state, shape, gate.j, gate.n)
