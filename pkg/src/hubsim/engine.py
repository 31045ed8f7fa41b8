"""Experiment execution: Trotter steps interleaved with bath collisions.

The bath is never held in the state. Resetting an uncorrelated ancilla after
every collision makes each step an exact Kraus channel on the system, so a
step is a short list of unitaries and channels applied in place. The
``dilated`` path keeps explicit bath qubits (with resets and partial traces)
and exists only to cross-check that shortcut.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .bath import NO_BATH, BathMode, BathSpec, Topology, bath_prep_state, collision_channel, collision_circuit
from .circuit import Circuit, Gate, Reset, Barrier, Prep, circuit_unitary, gate_matrix
from .densmat import (PAULIS, SX, KrausChannel, embed, insert_qubit, kron_all, partial_trace,
                      populations)
from .model import ModelSpec, trotter_step_circuit
from .trace import PopulationTrace, basis_labels

NEGATIVE_POPULATION_ATOL = 1e-10
MAX_DILATED_QUBITS = 4


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


@dataclass(frozen=True)
class NoiseModel:
    """Phenomenological hardware noise.

    ``gate_depolarizing`` follows every gate (``gate_depolarizing_2q`` overrides
    it for two-qubit gates); ``amplitude_decay_per_step`` damps every system
    qubit once per step; ``readout_flip`` is ``(p(read 1 | 0), p(read 0 | 1))``
    applied independently to each measured qubit. ``fresh_swap_depolarizing``
    depolarizes each system qubit per step in FRESH bath mode, standing in for
    the routing swaps a fresh ancilla costs on hardware.
    """

    gate_depolarizing: float = 0.0
    gate_depolarizing_2q: float | None = None
    amplitude_decay_per_step: float = 0.0
    readout_flip: tuple[float, float] = (0.0, 0.0)
    fresh_swap_depolarizing: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "readout_flip", tuple(float(p) for p in self.readout_flip))
        if len(self.readout_flip) != 2:
            raise ValueError("readout_flip must be a pair (p01, p10)")
        _check_prob("gate_depolarizing", self.gate_depolarizing)
        if self.gate_depolarizing_2q is not None:
            _check_prob("gate_depolarizing_2q", self.gate_depolarizing_2q)
        _check_prob("amplitude_decay_per_step", self.amplitude_decay_per_step)
        _check_prob("fresh_swap_depolarizing", self.fresh_swap_depolarizing)
        for p in self.readout_flip:
            _check_prob("readout_flip", p)

    def depolarizing_for(self, arity: int) -> float:
        if arity >= 2 and self.gate_depolarizing_2q is not None:
            return self.gate_depolarizing_2q
        return self.gate_depolarizing

    @property
    def has_gate_noise(self) -> bool:
        return self.gate_depolarizing > 0 or bool(self.gate_depolarizing_2q)

    @property
    def has_state_noise(self) -> bool:
        """True if any noise acts before measurement."""
        return (self.has_gate_noise or self.amplitude_decay_per_step > 0
                or self.fresh_swap_depolarizing > 0)


NOISELESS = NoiseModel()


def depolarizing_channel(p: float, num_qubits: int = 1) -> KrausChannel:
    """``rho -> (1-p) rho + p I/d`` as a Pauli Kraus set."""
    _check_prob("depolarizing probability", p)
    d2 = 4 ** num_qubits
    ops = []
    for idx in np.ndindex(*([4] * num_qubits)):
        w = 1 - p + p / d2 if not any(idx) else p / d2
        if w > 0:
            ops.append(np.sqrt(w) * kron_all([PAULIS[i] for i in idx]))
    return KrausChannel(np.array(ops))


def amplitude_damping_channel(gamma: float) -> KrausChannel:
    _check_prob("gamma", gamma)
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausChannel(np.array([k0, k1]))


def _all_x(num_qubits: int) -> np.ndarray:
    return kron_all([SX] * num_qubits)


class StepMap:
    """One full step as an ordered list of stages, each a Kraus stack.

    Unitary stages are fused into their neighbours at construction, so the
    hot loop only ever calls the unitary or Kraus kernel.
    """

    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self.dim = 1 << num_qubits
        self._stages: list[np.ndarray] = []
        self._pending = None

    def unitary(self, u):
        self._pending = u if self._pending is None else u @ self._pending
        return self

    def channel(self, ch: KrausChannel):
        ops = ch.operators
        if self._pending is not None:
            ops = ops @ self._pending
            self._pending = None
        self._stages.append(np.ascontiguousarray(ops))
        return self

    def finish(self) -> "StepMap":
        if self._pending is not None:
            self._stages.append(np.ascontiguousarray(self._pending[None]))
            self._pending = None
        return self

    @property
    def stages(self) -> tuple[np.ndarray, ...]:
        return tuple(self._stages)

    def apply(self, rho) -> np.ndarray:
        rho = np.ascontiguousarray(rho, dtype=complex)
        for ops in self._stages:
            if ops.shape[0] == 1:
                rho = kernels.apply_unitary(rho, ops[0])
            else:
                rho = kernels.apply_kraus(rho, ops)
        return rho

    def as_channel(self) -> KrausChannel:
        ch = KrausChannel(np.eye(self.dim, dtype=complex))
        for ops in self._stages:
            ch = ch.compose(KrausChannel(ops))
        return ch


def build_step(model: ModelSpec, bath: BathSpec = NO_BATH, noise: NoiseModel = NOISELESS,
               relabel: bool = False) -> StepMap:
    """Assemble ``N U`` for one step: gates (+noise), collisions, decay.

    With ``relabel`` the system dynamics and collision channel are conjugated
    by X on every qubit while noise stays in the lab frame.
    """
    nq = model.num_qubits
    step = StepMap(nq)
    flip = _all_x(nq) if relabel else None

    def conj(u):
        return u if flip is None else flip @ u @ flip

    circuit = trotter_step_circuit(model)
    if noise.has_gate_noise:
        for g in circuit.gates:
            step.unitary(conj(embed(gate_matrix(g), g.targets, nq)))
            p = noise.depolarizing_for(len(g.targets))
            if p > 0:
                step.channel(depolarizing_channel(p, len(g.targets)).embedded(g.targets, nq))
    else:
        step.unitary(conj(circuit_unitary(circuit)))

    if bath.active:
        ch = collision_channel(bath, nq)
        step.channel(ch if flip is None else ch.conjugated(flip))
        if bath.mode is BathMode.FRESH and noise.fresh_swap_depolarizing > 0:
            dep = depolarizing_channel(noise.fresh_swap_depolarizing)
            for q in range(nq):
                step.channel(dep.embedded([q], nq))

    if noise.amplitude_decay_per_step > 0:
        ad = amplitude_damping_channel(noise.amplitude_decay_per_step)
        full = ad
        for _ in range(nq - 1):
            full = full.tensor(ad)
        step.channel(full)
    return step.finish()


def evolve_step(rho, model: ModelSpec, bath: BathSpec = NO_BATH, noise: NoiseModel = NOISELESS,
                relabel: bool = False) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (1 << model.num_qubits,) * 2:
        raise ValueError(f"state of shape {rho.shape} does not fit {model.num_qubits} system qubit(s)")
    return build_step(model, bath, noise, relabel).apply(rho)


def initial_density(config) -> np.ndarray:
    rho = config.init.density(config.model.filling)
    if getattr(config, "relabel", False):
        x = _all_x(config.model.num_qubits)
        rho = x @ rho @ x
    return rho


def evolve_states(config) -> list[np.ndarray]:
    """Lab-frame system states after ``k = 0..steps`` steps."""
    step = build_step(config.model, config.bath, config.noise, getattr(config, "relabel", False))
    rho = np.ascontiguousarray(initial_density(config))
    states = [rho]
    for _ in range(config.model.steps):
        rho = step.apply(rho)
        states.append(rho)
    return states


def relabel_permutation(num_qubits: int) -> np.ndarray:
    """Index map flipping every bit of a basis label (an involution)."""
    return np.arange(1 << num_qubits)[::-1].copy()


def readout_confusion(readout, num_qubits: int) -> np.ndarray:
    """Column-stochastic ``P(read i | true j)`` for independent per-qubit flips.

    ``readout`` is one ``(p01, p10)`` pair for all qubits or one pair per qubit.
    """
    pairs = _readout_pairs(readout, num_qubits)
    mats = [np.array([[1 - p01, p10], [p01, 1 - p10]]) for p01, p10 in pairs]
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _readout_pairs(readout, num_qubits: int):
    if readout is None:
        return [(0.0, 0.0)] * num_qubits
    arr = np.asarray(readout, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (num_qubits, 1))
    if arr.shape != (num_qubits, 2):
        raise ValueError(f"readout must be a pair or {num_qubits} pairs")
    for p in arr.ravel():
        _check_prob("readout flip", p)
    return [tuple(r) for r in arr]


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_indices(probs, shots: int, rng, readout=None) -> np.ndarray:
    """Counts per basis index from ``shots`` measurements with readout flips."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.asarray(probs, dtype=float)
    if p.min() < -NEGATIVE_POPULATION_ATOL:
        raise ValueError(f"invalid state: population {p.min()} is negative")
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    counts = rng.multinomial(shots, p)
    if readout is None or not np.any(readout):
        return counts
    nq = p.size.bit_length() - 1
    cm = readout_confusion(readout, nq)
    observed = np.zeros_like(counts)
    for j in np.flatnonzero(counts):
        observed += rng.multinomial(counts[j], cm[:, j])
    return observed


def sample_counts(rho, shots: int, seed=0, readout=None) -> dict[str, int]:
    """Measure ``rho`` ``shots`` times in the computational basis.

    ``seed`` may be an int or a ``numpy.random.Generator``; every label is
    present in the result, including zero counts.
    """
    rho = np.asarray(rho)
    counts = sample_indices(populations(rho), shots, _as_rng(seed), readout)
    labels = basis_labels(rho.shape[0].bit_length() - 1)
    return {lab: int(c) for lab, c in zip(labels, counts)}


def trace_from_states(states: Sequence[np.ndarray], shots: int = 0, rng=None, readout=None,
                      relabel: bool = False) -> PopulationTrace:
    nq = states[0].shape[0].bit_length() - 1
    rows = []
    for rho in states:
        p = populations(rho)
        if shots:
            p = sample_indices(p, shots, rng, readout) / shots
        rows.append(p)
    rows = np.array(rows)
    if relabel:
        rows = rows[:, relabel_permutation(nq)]
    return PopulationTrace(basis_labels(nq), rows, shots)


def run_experiment(config, rng: np.random.Generator | None = None, exact: bool | None = None) -> PopulationTrace:
    """Population trace for ``config``.

    Exact mode (``shots == 0`` or ``exact=True``) reads ``diag(rho_k)``;
    sampled mode draws ``shots`` measurements per step, step-major, from one
    generator seeded with ``config.seed``.
    """
    states = evolve_states(config)
    shots = 0 if exact else config.shots
    if shots and rng is None:
        rng = np.random.default_rng(config.seed)
    readout = config.noise.readout_flip
    return trace_from_states(states, shots, rng, readout, getattr(config, "relabel", False))


# -- explicit dilation ----------------------------------------------------------

def execute_circuit(rho, circuit: Circuit) -> np.ndarray:
    """Run ``circuit`` on a density matrix; resets trace out and re-prepare."""
    n = circuit.num_qubits
    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            rho = kernels.apply_unitary(np.ascontiguousarray(rho), embed(gate_matrix(ins), ins.targets, n))
        elif isinstance(ins, Reset):
            reduced = partial_trace(rho, [ins.target])
            rho = insert_qubit(reduced, ins.density(), ins.target)
        elif not isinstance(ins, Barrier):
            raise TypeError(f"unknown instruction {ins!r}")
    return rho


def _bath_layout(bath: BathSpec, nq: int) -> list[list[int]]:
    """Bath qubit index per (mode, system qubit)."""
    layout, nxt = [], nq
    for _ in bath.modes():
        if bath.topology is Topology.COMMON:
            layout.append([nxt] * nq)
            nxt += 1
        else:
            layout.append(list(range(nxt, nxt + nq)))
            nxt += nq
    return layout


def dilated_step_circuit(model: ModelSpec, bath: BathSpec) -> Circuit:
    """A literal step transcript: system gates, collisions, then bath resets."""
    nq = model.num_qubits
    layout = _bath_layout(bath, nq) if bath.active else []
    total = nq + (max(max(m) for m in layout) - nq + 1 if layout else 0)
    ins = list(trotter_step_circuit(model).instructions) + [Barrier()]
    for (g, beta), qubits in zip(bath.modes() if bath.active else [], layout):
        for s, b in enumerate(qubits):
            ins.extend(collision_circuit(bath, s, b, total, g).instructions)
        ins.append(Barrier())
        state = bath_prep_state(bath, beta)
        for b in sorted(set(qubits)):
            ins.append(Reset(b, Prep.MIXED, state))
    return Circuit(total, ins)


def run_dilated(config) -> list[np.ndarray]:
    """System states from the explicit system+bath register (at most 4 qubits)."""
    if getattr(config, "relabel", False):
        raise ValueError("dilated mode does not support relabeled runs")
    model, bath, noise = config.model, config.bath, config.noise
    nq = model.num_qubits
    circ = dilated_step_circuit(model, bath)
    total = circ.num_qubits
    if total > MAX_DILATED_QUBITS:
        raise ValueError(f"dilated mode needs {total} qubits, cap is {MAX_DILATED_QUBITS}")
    rho = config.init.density(model.filling)
    for ins in circ.instructions:
        if isinstance(ins, Reset):
            rho = insert_qubit(rho, ins.density(), rho.shape[0].bit_length() - 1)
    bath_qubits = list(range(nq, total))

    def sys_channel(ch: KrausChannel, targets):
        nonlocal rho
        full = ch.embedded(targets, total)
        rho = kernels.apply_kraus(np.ascontiguousarray(rho), full.operators)

    # gate noise hits the Trotter gates only; collisions are ideal, as in the channel engine
    n_system = len(trotter_step_circuit(model).instructions)
    states = [partial_trace(rho, bath_qubits) if bath_qubits else rho]
    for _ in range(model.steps):
        for i, ins in enumerate(circ.instructions):
            rho = execute_circuit(rho, Circuit(total, (ins,)))
            if i < n_system and noise.has_gate_noise:
                p = noise.depolarizing_for(len(ins.targets))
                if p > 0:
                    sys_channel(depolarizing_channel(p, len(ins.targets)), ins.targets)
        if bath.active and bath.mode is BathMode.FRESH and noise.fresh_swap_depolarizing > 0:
            for q in range(nq):
                sys_channel(depolarizing_channel(noise.fresh_swap_depolarizing), [q])
        if noise.amplitude_decay_per_step > 0:
            for q in range(nq):
                sys_channel(amplitude_damping_channel(noise.amplitude_decay_per_step), [q])
        states.append(partial_trace(rho, bath_qubits) if bath_qubits else rho)
    return states
