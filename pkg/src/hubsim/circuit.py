"""Minimal circuit IR: parametrized gates, mid-circuit reset and barriers.

Rotations use the half-angle convention ``R_P(l) = exp(-i l P / 2)``; for
controlled gates the first target is the control.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .densmat import SX, check_density, embed

_ARITY = {}


class GateKind(enum.Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    RZZ = "RZZ"
    CNOT = "CNOT"
    CRY = "CRY"
    X = "X"
    H = "H"

    @property
    def num_targets(self) -> int:
        return _ARITY[self][0]

    @property
    def num_params(self) -> int:
        return _ARITY[self][1]


_ARITY.update({
    GateKind.RX: (1, 1), GateKind.RY: (1, 1), GateKind.RZ: (1, 1),
    GateKind.RZZ: (2, 1), GateKind.CNOT: (2, 0), GateKind.CRY: (2, 1),
    GateKind.X: (1, 0), GateKind.H: (1, 0),
})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.targets) != self.kind.num_targets:
            raise ValueError(f"{self.kind.value} acts on {self.kind.num_targets} qubit(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind.value} targets must be distinct")
        if len(self.params) != self.kind.num_params:
            raise ValueError(f"{self.kind.value} takes {self.kind.num_params} parameter(s)")


class Prep(enum.Enum):
    ZERO = "ZERO"
    PLUS = "PLUS"
    MIXED = "MIXED"


@dataclass(frozen=True)
class Reset:
    """Discard ``target`` and re-prepare it in ``prep`` (``state`` for MIXED)."""

    target: int
    prep: Prep = Prep.ZERO
    state: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.prep is Prep.MIXED:
            if self.state is None:
                raise ValueError("MIXED reset needs a density matrix")
            st = check_density(self.state)
            if st.shape != (2, 2):
                raise ValueError("reset state must be a single-qubit density matrix")
            object.__setattr__(self, "state", st)

    @property
    def targets(self) -> tuple[int, ...]:
        return (self.target,)

    def density(self) -> np.ndarray:
        if self.prep is Prep.ZERO:
            return np.diag([1.0, 0.0]).astype(complex)
        if self.prep is Prep.PLUS:
            return np.full((2, 2), 0.5, dtype=complex)
        return self.state


@dataclass(frozen=True)
class Barrier:
    targets: tuple[int, ...] = ()


Instruction = Union[Gate, Reset, Barrier]


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    instructions: tuple = ()

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "instructions", tuple(self.instructions))
        for ins in self.instructions:
            for q in ins.targets:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(f"instruction {ins} targets qubit {q} outside {self.num_qubits}")

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.num_qubits, other.num_qubits), self.instructions + other.instructions)

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    @property
    def gates(self) -> list[Gate]:
        return [i for i in self.instructions if isinstance(i, Gate)]

    def widened(self, num_qubits: int) -> "Circuit":
        return Circuit(num_qubits, self.instructions)

    def dump(self) -> str:
        """One instruction per line, e.g. ``RX(0.2) q0`` or ``RESET q2 PLUS``."""
        return "\n".join(format_instruction(i) for i in self.instructions)


def format_instruction(ins: Instruction) -> str:
    if isinstance(ins, Gate):
        head = ins.kind.value + (f"({', '.join(repr(p) for p in ins.params)})" if ins.params else "")
        return " ".join([head] + [f"q{q}" for q in ins.targets])
    if isinstance(ins, Reset):
        return f"RESET q{ins.target} {ins.prep.value}"
    return " ".join(["BARRIER"] + [f"q{q}" for q in ins.targets])


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rzz(theta: float) -> np.ndarray:
    a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
    return np.diag([a, b, b, a])


def controlled(u) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


CNOT = controlled(SX)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def gate_matrix(g: Gate) -> np.ndarray:
    k = g.kind
    if k is GateKind.RX:
        return rx(g.params[0])
    if k is GateKind.RY:
        return ry(g.params[0])
    if k is GateKind.RZ:
        return rz(g.params[0])
    if k is GateKind.RZZ:
        return rzz(g.params[0])
    if k is GateKind.CNOT:
        return CNOT.copy()
    if k is GateKind.CRY:
        return controlled(ry(g.params[0]))
    if k is GateKind.X:
        return SX.copy()
    return HADAMARD.copy()


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Product of the embedded gate matrices, first instruction applied first."""
    u = np.eye(1 << c.num_qubits, dtype=complex)
    for ins in c.instructions:
        if isinstance(ins, Reset):
            raise ValueError("circuit contains a reset; it has no unitary (use the engine)")
        if isinstance(ins, Gate):
            u = embed(gate_matrix(ins), ins.targets, c.num_qubits) @ u
    return u


def gate(kind: str | GateKind, *targets: int, params: Sequence[float] | float = ()) -> Gate:
    """Shorthand constructor: ``gate("RX", 0, params=0.2)``."""
    if isinstance(params, (int, float)):
        params = (params,)
    return Gate(GateKind(kind) if isinstance(kind, str) else kind, tuple(targets), tuple(params))


def make_circuit(num_qubits: int, instructions: Iterable[Instruction]) -> Circuit:
    return Circuit(num_qubits, tuple(instructions))

