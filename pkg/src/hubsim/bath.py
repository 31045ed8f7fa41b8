"""Spin-bath collisions: ancilla preparation, Fig.-style collision circuits
and the exact single-step reduced channel they induce on the system.

Two couplings are modelled, each by a fixed two-qubit fragment between a
system qubit ``s`` and a bath qubit ``b``:

* ``ZZ``: ``CNOT(b->s) RZ(g)_s CNOT(b->s)`` = ``exp(-i g/2 Z_s Z_b)``; with the
  bath in ``|+>`` this dephases, scaling coherences by ``cos(g)``.
* ``XY``: ``CRY(g)(s->b)`` then ``CNOT(b->s)``; with the bath in ``|0>`` this
  is amplitude damping with decay probability ``sin(g/2)**2``.

``angle_convention="stated"`` rescales ``g`` so the XY fragment reproduces the
textbook action ``|1,0> -> cos(g)|1,0> + sin(g)|0,1>`` instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit, circuit_unitary, gate
from .densmat import KrausChannel, channel_fixed_point, channel_from_dilation, projector


class Coupling(enum.Enum):
    NONE = "none"
    ZZ = "zz"
    XY = "xy"


class Topology(enum.Enum):
    COMMON = "common"
    PER_QUBIT = "per_qubit"


class BathMode(enum.Enum):
    RESET = "reset"
    FRESH = "fresh"


ANGLE_CONVENTIONS = ("circuit", "stated")


@dataclass(frozen=True)
class BathSpec:
    """One or more bath modes coupled once per step.

    ``beta_omega=None`` is the ground state (``|+>`` for ZZ, ``|0>`` for XY);
    a number selects the thermal state at that ``beta * omega``.
    ``extra_modes`` holds ``(g_dt, beta_omega)`` pairs for additional modes,
    each colliding with its own ancilla after the first.
    """

    coupling: Coupling = Coupling.NONE
    g_dt: float = 0.0
    topology: Topology = Topology.PER_QUBIT
    mode: BathMode = BathMode.RESET
    beta_omega: float | None = None
    angle_convention: str = "circuit"
    extra_modes: tuple[tuple[float, float | None], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coupling", Coupling(self.coupling))
        object.__setattr__(self, "topology", Topology(self.topology))
        object.__setattr__(self, "mode", BathMode(self.mode))
        object.__setattr__(self, "extra_modes",
                           tuple((float(g), None if b is None else float(b)) for g, b in self.extra_modes))
        if self.angle_convention not in ANGLE_CONVENTIONS:
            raise ValueError(f"angle_convention must be one of {ANGLE_CONVENTIONS}")
        for g, b in self.modes():
            if g < 0:
                raise ValueError(f"g_dt must be >= 0, got {g}")
            if b is not None and b < 0:
                raise ValueError(f"beta_omega must be >= 0, got {b}")

    @property
    def active(self) -> bool:
        return self.coupling is not Coupling.NONE

    def modes(self) -> list[tuple[float, float | None]]:
        return [(float(self.g_dt), self.beta_omega)] + list(self.extra_modes)

    def circuit_angle(self, g_dt: float | None = None) -> float:
        """Rotation angle fed to the collision fragment for coupling ``g_dt``."""
        g = self.g_dt if g_dt is None else g_dt
        if self.angle_convention == "stated" and self.coupling is Coupling.XY:
            return 2.0 * g
        return g

    def scaled(self, scale: int) -> "BathSpec":
        return replace(self, g_dt=self.g_dt / scale,
                       extra_modes=tuple((g / scale, b) for g, b in self.extra_modes))


NO_BATH = BathSpec()


def _require_coupling(spec: BathSpec):
    if not spec.active:
        raise ValueError("bath coupling is NONE")


def thermal_weight(beta_omega: float | None) -> float:
    """Ground-state weight ``e^{bw} / (e^{bw} + e^{-bw})``."""
    if beta_omega is None:
        return 1.0
    return 0.5 * (1.0 + np.tanh(beta_omega))


def bath_prep_state(spec: BathSpec, beta_omega: float | None = None, *, mode_index: int = 0) -> np.ndarray:
    """Single-qubit ancilla state for bath mode ``mode_index``.

    For ZZ the bath Hamiltonian is ``-w X`` so the ground state is ``|+>``; for
    XY it is ``-w Z`` with ground state ``|0>``.
    """
    _require_coupling(spec)
    if beta_omega is None:
        beta_omega = spec.modes()[mode_index][1]
    p = thermal_weight(beta_omega)
    if spec.coupling is Coupling.ZZ:
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        minus = np.array([1, -1], dtype=complex) / np.sqrt(2)
        return p * projector(plus) + (1 - p) * projector(minus)
    return np.diag([p, 1 - p]).astype(complex)


def collision_circuit(spec: BathSpec, system_qubit: int, bath_qubit: int,
                      num_qubits: int | None = None, g_dt: float | None = None) -> Circuit:
    """Collision fragment between one system qubit and one bath qubit."""
    _require_coupling(spec)
    n = max(system_qubit, bath_qubit) + 1 if num_qubits is None else num_qubits
    g = spec.circuit_angle(g_dt)
    s, b = system_qubit, bath_qubit
    if spec.coupling is Coupling.ZZ:
        ins = (gate("CNOT", b, s), gate("RZ", s, params=g), gate("CNOT", b, s))
    else:
        ins = (gate("CRY", s, b, params=g), gate("CNOT", b, s))
    return Circuit(n, ins)


def mode_collision_circuit(spec: BathSpec, system_qubits: int, g_dt: float) -> Circuit:
    """Fragments coupling every system qubit to one shared bath qubit (the last)."""
    n = system_qubits + 1
    c = Circuit(n)
    for s in range(system_qubits):
        c = c + collision_circuit(spec, s, system_qubits, n, g_dt)
    return c


def _mode_channel(spec: BathSpec, system_qubits: int, g_dt: float, beta_omega) -> KrausChannel:
    prep = bath_prep_state(spec, beta_omega)
    if spec.topology is Topology.COMMON:
        u = circuit_unitary(mode_collision_circuit(spec, system_qubits, g_dt))
        return channel_from_dilation(u, prep, system_qubits)
    single = channel_from_dilation(circuit_unitary(collision_circuit(spec, 0, 1, 2, g_dt)), prep, 1)
    ch = single
    for _ in range(system_qubits - 1):
        ch = ch.tensor(single)
    return ch


def collision_channel(spec: BathSpec, system_qubits: int) -> KrausChannel:
    """Exact reduced system channel of one collision step (all modes)."""
    _require_coupling(spec)
    ch = None
    for g, beta in spec.modes():
        m = _mode_channel(spec, system_qubits, g, beta)
        ch = m if ch is None else ch.compose(m)
    return ch


def damping_fixed_point(spec: BathSpec, system_qubits: int) -> np.ndarray:
    """Long-time state of repeated collisions.

    Pure dephasing (ZZ) fixes every diagonal state, so on its own it has no
    unique fixed point; combined with any mixing system dynamics the state
    ends maximally mixed, which is what is returned. For XY the unique
    fixed point of the channel is computed (``|0...0>`` for a ground-state bath).
    """
    _require_coupling(spec)
    if not all(0 < spec.circuit_angle(g) < np.pi for g, _ in spec.modes()):
        raise ValueError("collision angle must lie in (0, pi)")
    dim = 1 << system_qubits
    if spec.coupling is Coupling.ZZ:
        return np.eye(dim, dtype=complex) / dim
    return channel_fixed_point(collision_channel(spec, system_qubits))
