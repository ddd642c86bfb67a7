"""Register layout and state-vector primitives.

The full register is C (qudit, S levels) x A (L qubits) x B (L qubits).
A composite basis label is ``(m * N + n) * N + b`` where ``m`` labels the
qudit and ``n``/``b`` pack the A and B qubits little-endian: bit ``k`` of
``n`` is the state of particle A_k, bit ``k`` of ``b`` that of B_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CapacityError,
    InsufficientQubitsError,
    InvalidDimensionError,
    RegisterIndexError,
    ShapeError,
)

DEFAULT_CAPACITY = 2**26

_VALID_REGISTERS = ("C", "A", "B", "CA", "AB", "CAB")


@dataclass(frozen=True)
class SystemShape:
    """Dimensions of the C x A x B register."""

    s_level: int
    qubit_count: int
    capacity: int = field(default=DEFAULT_CAPACITY, compare=False, repr=False)

    @property
    def n_dim(self) -> int:
        return 1 << self.qubit_count

    @property
    def total_dim(self) -> int:
        return self.s_level * self.n_dim * self.n_dim

    def register_dim(self, register: str) -> int:
        dims = {"C": self.s_level, "A": self.n_dim, "B": self.n_dim}
        out = 1
        for name in register:
            out *= dims[name]
        return out


def minimal_qubits(s_level: int) -> int:
    """Smallest L with 2**L >= s_level."""
    return max(1, (s_level - 1).bit_length())


def make_shape(s_level: int, qubit_count: int | None = None,
               capacity: int = DEFAULT_CAPACITY) -> SystemShape:
    """Build a :class:`SystemShape`, defaulting to the fewest qubits that fit S.

    Raises InvalidDimensionError for S < 2, InsufficientQubitsError when
    2**L < S and CapacityError when S * 4**L exceeds ``capacity``.
    """
    if int(s_level) != s_level or s_level < 2:
        raise InvalidDimensionError(f"s-level must be ≥ 2, got {s_level}")
    s_level = int(s_level)
    if qubit_count is None:
        qubit_count = minimal_qubits(s_level)
    if int(qubit_count) != qubit_count or qubit_count < 1:
        raise InsufficientQubitsError(f"qubit count must be ≥ 1, got {qubit_count}")
    qubit_count = int(qubit_count)
    if (1 << qubit_count) < s_level:
        raise InsufficientQubitsError(
            f"{qubit_count} qubits span {1 << qubit_count} levels, fewer than S={s_level}")
    shape = SystemShape(s_level, qubit_count, capacity)
    if shape.total_dim > capacity:
        raise CapacityError(
            f"state needs {shape.total_dim} amplitudes, cap is {capacity}")
    return shape


def compose_index(shape: SystemShape, m: int, n: int, b: int) -> int:
    N = shape.n_dim
    if not (0 <= m < shape.s_level and 0 <= n < N and 0 <= b < N):
        raise RegisterIndexError(f"(m={m}, n={n}, b={b}) outside shape {shape}")
    return (m * N + n) * N + b


def decompose_index(shape: SystemShape, idx: int) -> tuple[int, int, int]:
    if not 0 <= idx < shape.total_dim:
        raise RegisterIndexError(f"index {idx} outside [0, {shape.total_dim})")
    N = shape.n_dim
    rest, b = divmod(idx, N)
    m, n = divmod(rest, N)
    return m, n, b


@dataclass(frozen=True, eq=False)
class PureState:
    """Immutable amplitude vector over one of the registers C, A, B, CA, AB, CAB."""

    shape: SystemShape
    register: str
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.register not in _VALID_REGISTERS:
            raise ShapeError(f"unknown register {self.register!r}")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.shape.register_dim(self.register):
            raise ShapeError(
                f"register {self.register} needs {self.shape.register_dim(self.register)}"
                f" amplitudes, got {amps.size}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> PureState:
        return PureState(self.shape, self.register, self.amplitudes / self.norm())

    def with_amplitudes(self, amplitudes) -> PureState:
        return PureState(self.shape, self.register, amplitudes)

    def tensor(self, other: PureState) -> PureState:
        """Product state; ``self`` must precede ``other`` in C, A, B order."""
        if self.shape != other.shape:
            raise ShapeError("tensor factors have different shapes")
        register = self.register + other.register
        if register not in _VALID_REGISTERS:
            raise ShapeError(f"cannot form register {register!r}")
        return PureState(self.shape, register, np.kron(self.amplitudes, other.amplitudes))


def basis_state(shape: SystemShape, register: str, label: int) -> PureState:
    dim = shape.register_dim(register)
    if not 0 <= label < dim:
        raise RegisterIndexError(f"basis label {label} outside [0, {dim})")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[label] = 1.0
    return PureState(shape, register, amps)


def _check_compatible(a: PureState, b: PureState) -> None:
    if a.shape != b.shape or a.register != b.register:
        raise ShapeError(
            f"states live on different registers: {a.register}{a.shape} vs {b.register}{b.shape}")


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    _check_compatible(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|; insensitive to global phase."""
    return abs(inner_product(a, b))
