"""Two-site Hubbard system: Hamiltonians, Trotter circuits, exact dynamics.

Time is measured in units of the Trotter step, so every parameter is the
dimensionless product with the step (``eps_dt`` = epsilon * dt, ...).

Basis conventions (qubit 0 is the most significant bit):

* one electron: ``|0>`` = electron on site 1, ``|1>`` = electron on site 2;
* two electrons: ``|00>`` = pair on site 1, ``|01>``/``|10>`` = one electron
  per site, ``|11>`` = pair on site 2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit, gate, circuit_unitary
from .densmat import I2, SX, SZ, check_density, ket, matexp_unitary, populations, projector
from .trace import PopulationTrace, basis_labels


class Filling(enum.Enum):
    ONE_ELECTRON = "one_electron"
    TWO_ELECTRON = "two_electron"

    @property
    def num_qubits(self) -> int:
        return 1 if self is Filling.ONE_ELECTRON else 2


@dataclass(frozen=True)
class ModelSpec:
    filling: Filling
    eps_dt: float = 0.0
    t12_dt: float = 0.0
    uc_dt: float = 0.0
    steps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "filling", Filling(self.filling))
        if self.filling is Filling.TWO_ELECTRON and self.eps_dt != 0:
            raise ValueError("two-electron model requires eps_dt == 0 (no on-site energy gates)")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"steps must be a non-negative integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def num_qubits(self) -> int:
        return self.filling.num_qubits

    def refined(self, scale: int) -> "ModelSpec":
        """Same physical evolution with ``scale`` times as many, shorter steps."""
        return replace(self, eps_dt=self.eps_dt / scale, t12_dt=self.t12_dt / scale,
                       uc_dt=self.uc_dt / scale, steps=self.steps * scale)


class InitialKind(enum.Enum):
    SITE1 = "site1"
    SITE2 = "site2"
    DOUBLE_SITE1 = "double_site1"
    DOUBLE_SITE2 = "double_site2"
    SINGLET = "singlet"
    CUSTOM = "custom"


_ONE = {InitialKind.SITE1: "0", InitialKind.SITE2: "1"}
_TWO = {InitialKind.DOUBLE_SITE1: "00", InitialKind.DOUBLE_SITE2: "11"}


@dataclass(frozen=True)
class InitialState:
    kind: InitialKind
    matrix: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", InitialKind(self.kind))
        if self.kind is InitialKind.CUSTOM:
            if self.matrix is None:
                raise ValueError("custom initial state needs a density matrix")
            object.__setattr__(self, "matrix", check_density(self.matrix))

    def __eq__(self, other):
        if not isinstance(other, InitialState) or other.kind is not self.kind:
            return False
        if self.kind is InitialKind.CUSTOM:
            return np.array_equal(self.matrix, other.matrix)
        return True

    def __hash__(self):
        return hash(self.kind)

    @classmethod
    def custom(cls, rho) -> "InitialState":
        return cls(InitialKind.CUSTOM, np.asarray(rho, dtype=complex))

    def density(self, filling: Filling) -> np.ndarray:
        filling = Filling(filling)
        if self.kind is InitialKind.CUSTOM:
            if self.matrix.shape[0] != 1 << filling.num_qubits:
                raise ValueError(f"custom state has wrong dimension for {filling.value}")
            return self.matrix.copy()
        if filling is Filling.ONE_ELECTRON:
            if self.kind not in _ONE:
                raise ValueError(f"initial state {self.kind.value} needs two electrons")
            return projector(ket(_ONE[self.kind]))
        if self.kind is InitialKind.SINGLET:
            return projector((ket("01") - ket("10")) / np.sqrt(2))
        if self.kind not in _TWO:
            raise ValueError(f"initial state {self.kind.value} needs one electron")
        return projector(ket(_TWO[self.kind]))


def default_initial_state(filling: Filling) -> InitialState:
    """The starting point used throughout: electron (pair) on site 2."""
    if Filling(filling) is Filling.ONE_ELECTRON:
        return InitialState(InitialKind.SITE2)
    return InitialState(InitialKind.DOUBLE_SITE2)


def hamiltonian(spec: ModelSpec) -> np.ndarray:
    if spec.filling is Filling.ONE_ELECTRON:
        return spec.eps_dt * SZ + spec.t12_dt * SX
    hop = spec.t12_dt * (np.kron(I2, SX) + np.kron(SX, I2))
    return hop + 0.5 * spec.uc_dt * np.kron(SZ, SZ)


def trotter_step_circuit(spec: ModelSpec) -> Circuit:
    """One Trotter step: hopping rotations first, then the diagonal part."""
    if spec.filling is Filling.ONE_ELECTRON:
        return Circuit(1, (gate("RX", 0, params=2 * spec.t12_dt),
                           gate("RZ", 0, params=2 * spec.eps_dt)))
    return Circuit(2, (
        gate("RX", 0, params=2 * spec.t12_dt),
        gate("RX", 1, params=2 * spec.t12_dt),
        gate("CNOT", 0, 1),
        gate("RZ", 1, params=spec.uc_dt),
        gate("CNOT", 0, 1),
    ))


def exact_populations(spec: ModelSpec, init: InitialState, n: float) -> np.ndarray:
    """Populations under ``exp(-i H n)``; ``n`` may be fractional."""
    if n < 0:
        raise ValueError("n must be >= 0")
    u = matexp_unitary(hamiltonian(spec), n)
    rho = init.density(spec.filling)
    return populations(u @ rho @ u.conj().T)


def exact_trace(spec: ModelSpec, init: InitialState) -> PopulationTrace:
    rows = [exact_populations(spec, init, k) for k in range(spec.steps + 1)]
    return PopulationTrace(basis_labels(spec.num_qubits), np.array(rows))


def trotterized_populations(spec: ModelSpec, init: InitialState) -> PopulationTrace:
    u = circuit_unitary(trotter_step_circuit(spec))
    rho = init.density(spec.filling)
    rows = [populations(rho)]
    for _ in range(spec.steps):
        rho = u @ rho @ u.conj().T
        rows.append(populations(rho))
    return PopulationTrace(basis_labels(spec.num_qubits), np.array(rows))


@dataclass(frozen=True)
class Frequencies:
    """Characteristic angular frequencies in units of 1/dt; ``None`` if undefined."""

    pair_freq: float | None
    fast_freq: float | None
    effective_hopping: float | None


def characteristic_frequencies(spec: ModelSpec) -> Frequencies:
    """Strong-coupling scales: pair hopping ``4 t^2/U``, ``U``, and ``t^2/eps``."""
    t2 = spec.t12_dt ** 2
    if spec.filling is Filling.TWO_ELECTRON:
        if spec.uc_dt == 0:
            raise ValueError("uc_dt must be nonzero for the pair-oscillation frequency")
        return Frequencies(4 * t2 / spec.uc_dt, spec.uc_dt, None)
    if spec.eps_dt == 0:
        raise ValueError("eps_dt must be nonzero for the effective hopping")
    return Frequencies(None, None, t2 / spec.eps_dt)


def pair_splitting(spec: ModelSpec) -> float:
    """Exact pair-oscillation frequency ``sqrt(U^2/4 + 4 t^2) - U/2``.

    Tends to ``4 t^2 / U`` for ``U >> t``.
    """
    if spec.filling is not Filling.TWO_ELECTRON:
        raise ValueError("pair oscillations need two electrons")
    u = abs(spec.uc_dt)
    return float(np.sqrt(u * u / 4 + 4 * spec.t12_dt ** 2) - u / 2)


def dominant_frequency(signal, max_freq: float | None = None, pad_to: int = 1 << 16) -> float:
    """Angular frequency (rad/step) of the largest non-DC FFT peak of ``signal``.

    The mean is removed and the series zero-padded to ``pad_to`` points,
    which interpolates the spectrum; the true resolution is still set by the
    signal length.
    """
    x = np.asarray(signal, dtype=float)
    x = x - x.mean()
    n = max(pad_to, x.size)
    spec = np.abs(np.fft.rfft(x, n))
    freqs = 2 * np.pi * np.fft.rfftfreq(n)
    mask = freqs > 0
    if max_freq is not None:
        mask &= freqs <= max_freq
    idx = np.flatnonzero(mask)
    return float(freqs[idx[np.argmax(spec[idx])]])


def population_peak(spec: ModelSpec, init: InitialState, index: int,
                    t_max: float | None = None) -> tuple[float, float]:
    """Maximum of the exact population ``index`` over continuous time.

    Returns ``(time, value)``. A coarse grid over ``[0, t_max]`` (default: the
    trace length) brackets the peak, then a bounded scalar search refines it.
    """
    from scipy.optimize import minimize_scalar

    t_max = float(spec.steps if t_max is None else t_max)
    grid = np.linspace(0.0, t_max, max(64, int(t_max * 16)) + 1)
    vals = np.array([exact_populations(spec, init, t)[index] for t in grid])
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda t: -exact_populations(spec, init, t)[index],
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    if -res.fun < vals[i]:
        return float(grid[i]), float(vals[i])
    return float(res.x), float(-res.fun)
