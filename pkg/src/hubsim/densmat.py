"""Dense complex linear algebra and quantum-channel primitives.

Operators and density matrices are plain ``complex128`` numpy arrays. Qubit 0
is the most significant bit of a basis label, so for a register ordered
``(system, bath)`` the basis state ``|s, b>`` has index ``s * 2**n_bath + b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from . import kernels

MAX_QUBITS = 12
UNITARY_ATOL = 1e-12
HERMITIAN_ATOL = 1e-12
CHANNEL_ATOL = 1e-10
TRACE_ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)


def _as_square(a, name="operator"):
    a = np.ascontiguousarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def num_qubits_of(a) -> int:
    dim = a.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise ValueError(f"dimension {dim} is not a power of 2")
    return n


def max_abs(a) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def is_unitary(u, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= atol


def is_hermitian(h, atol: float = HERMITIAN_ATOL) -> bool:
    h = np.asarray(h)
    return max_abs(h - h.conj().T) <= atol


def kron(a, b) -> np.ndarray:
    """Kronecker product with the 12-qubit size guard."""
    a, b = _as_square(a, "a"), _as_square(b, "b")
    dim = a.shape[0] * b.shape[0]
    if dim > 1 << MAX_QUBITS:
        raise ValueError(f"kron result dimension {dim} exceeds {MAX_QUBITS} qubits")
    return np.kron(a, b)


def kron_all(ops: Iterable) -> np.ndarray:
    return reduce(kron, ops)


def matexp_unitary(h, t: float, sign: int = 1) -> np.ndarray:
    """Return ``exp(-i * sign * h * t)`` for Hermitian ``h``.

    Uses the eigendecomposition of ``h``, which keeps the result unitary to
    machine precision and serves as the exact-dynamics oracle.
    """
    h = _as_square(h, "h")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if h.shape[0] > 64:
        raise ValueError("matexp_unitary supports dimensions up to 64")
    if not is_hermitian(h):
        raise ValueError("matexp_unitary requires a Hermitian generator")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * sign * w * t)) @ v.conj().T


def _check_targets(targets: Sequence[int], num_qubits: int):
    targets = tuple(int(q) for q in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated qubit index in {targets}")
    for q in targets:
        if not 0 <= q < num_qubits:
            raise ValueError(f"qubit index {q} out of range for {num_qubits} qubits")
    return targets


def embed(u, targets: Sequence[int], num_qubits: int) -> np.ndarray:
    """Lift ``u`` acting on ``targets`` (in order) to the full register."""
    u = _as_square(u, "u")
    if num_qubits > MAX_QUBITS:
        raise ValueError(f"at most {MAX_QUBITS} qubits supported")
    targets = _check_targets(targets, num_qubits)
    k = len(targets)
    if u.shape[0] != 1 << k:
        raise ValueError(f"operator of dim {u.shape[0]} cannot act on {k} qubits")
    rest = [q for q in range(num_qubits) if q not in targets]
    full = np.kron(u, np.eye(1 << len(rest), dtype=complex))
    order = list(targets) + rest
    n = num_qubits
    full = full.reshape([2] * (2 * n))
    # axis for qubit q currently sits at position order.index(q)
    inv = np.argsort(order)
    full = full.transpose(list(inv) + [n + i for i in inv])
    return np.ascontiguousarray(full.reshape(1 << n, 1 << n))


def _trace_index_map(num_qubits: int, discard: Sequence[int]) -> np.ndarray:
    keep = [q for q in range(num_qubits) if q not in discard]
    idx = np.arange(1 << num_qubits).reshape([2] * num_qubits)
    idx = idx.transpose(keep + list(discard))
    return idx.reshape(1 << len(keep), 1 << len(discard))


def partial_trace(rho, discard: Iterable[int]) -> np.ndarray:
    """Trace out the qubits in ``discard``; the rest keep their order."""
    rho = _as_square(rho, "rho")
    n = num_qubits_of(rho)
    discard = sorted(set(_check_targets(list(discard), n)))
    if len(discard) == n:
        raise ValueError("cannot trace out every qubit")
    if not discard:
        return rho.copy()
    return kernels.partial_trace(rho, _trace_index_map(n, discard))


def insert_qubit(rho, state, position: int) -> np.ndarray:
    """Tensor a single-qubit ``state`` into ``rho`` at qubit index ``position``."""
    rho = _as_square(rho, "rho")
    n = num_qubits_of(rho)
    full = kron(rho, state)
    if position == n:
        return full
    # new qubit is last; move it to ``position``
    order = list(range(n))
    order.insert(position, n)
    t = full.reshape([2] * (2 * (n + 1))).transpose(order + [n + 1 + q for q in order])
    return np.ascontiguousarray(t.reshape(full.shape))


def ket(label: str) -> np.ndarray:
    v = np.zeros(1 << len(label), dtype=complex)
    v[int(label, 2)] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def check_density(rho, atol: float = TRACE_ATOL) -> np.ndarray:
    """Validate the density-matrix invariants; returns ``rho`` as an array."""
    rho = _as_square(rho, "density matrix")
    num_qubits_of(rho)
    if not is_hermitian(rho):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace {tr} != 1")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {lo}")
    return rho


def trace_distance(a, b) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(np.asarray(a) - np.asarray(b))).sum())


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    w, v = np.linalg.eigh(rho)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = np.linalg.eigvalsh(sq @ sigma @ sq)
    return float(np.sqrt(np.clip(inner, 0, None)).sum() ** 2)


def populations(rho) -> np.ndarray:
    return np.real(np.diagonal(rho)).copy()


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map stored as a stack of Kraus operators of shape ``(k, d, d)``."""

    operators: np.ndarray

    def __post_init__(self):
        ops = np.array(self.operators, dtype=complex, order="C")
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] == 0:
            raise ValueError(f"Kraus stack must have shape (k, d, d), got {ops.shape}")
        ops.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    @property
    def num_qubits(self) -> int:
        return num_qubits_of(self.operators[0])

    def completeness_error(self) -> float:
        s = np.einsum("kji,kjl->il", self.operators.conj(), self.operators)
        return max_abs(s - np.eye(self.dim))

    def choi(self) -> np.ndarray:
        """Choi matrix ``sum_ij |i><j| (x) E(|i><j|)``."""
        d = self.dim
        vecs = self.operators.transpose(0, 2, 1).reshape(-1, d * d)  # row i: K[:, i] blocks
        return np.einsum("ka,kb->ab", vecs, vecs.conj())

    def is_cptp(self, atol: float = CHANNEL_ATOL) -> bool:
        return (self.completeness_error() <= atol
                and np.linalg.eigvalsh(self.choi()).min() >= -atol)

    def compose(self, after: "KrausChannel") -> "KrausChannel":
        """Channel applying ``self`` first, then ``after``."""
        if after.dim != self.dim:
            raise ValueError("cannot compose channels of different dimension")
        ops = np.einsum("aij,bjk->baik", after.operators, self.operators)
        return KrausChannel(ops.reshape(-1, self.dim, self.dim))

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        ops = [np.kron(a, b) for a in self.operators for b in other.operators]
        return KrausChannel(np.array(ops))

    def conjugated(self, u) -> "KrausChannel":
        """Channel ``rho -> u E(u^H rho u) u^H``."""
        u = np.asarray(u, dtype=complex)
        return KrausChannel(u @ self.operators @ u.conj().T)

    def embedded(self, targets: Sequence[int], num_qubits: int) -> "KrausChannel":
        return KrausChannel(np.array([embed(k, targets, num_qubits) for k in self.operators]))

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(rho, self)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(np.eye(dim, dtype=complex))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel(_as_square(u, "u"))


def apply_unitary(rho, u) -> np.ndarray:
    return kernels.apply_unitary(_as_square(rho, "rho"), _as_square(u, "u"))


def apply_channel(rho, ch: KrausChannel) -> np.ndarray:
    rho = _as_square(rho, "rho")
    if rho.shape[0] != ch.dim:
        raise ValueError(f"state dim {rho.shape[0]} does not match channel dim {ch.dim}")
    return kernels.apply_kraus(rho, ch.operators)


def channel_from_dilation(u, bath_state, system_qubits: int) -> KrausChannel:
    """Reduced map ``rho -> Tr_bath(u (rho (x) bath) u^H)`` as Kraus operators.

    With ``bath_state = sum_j p_j |e_j><e_j|`` the operators are
    ``sqrt(p_j) <i|_bath u |e_j>_bath``; the system occupies the leading qubits.
    """
    u = _as_square(u, "u")
    bath_state = check_density(bath_state)
    if not is_unitary(u):
        raise ValueError("dilation operator must be unitary")
    ds = 1 << system_qubits
    db = bath_state.shape[0]
    if u.shape[0] != ds * db:
        raise ValueError(f"dilation dim {u.shape[0]} != {ds} x {db}")
    p, e = np.linalg.eigh(bath_state)
    u4 = u.reshape(ds, db, ds, db)  # (s_out, b_out, s_in, b_in)
    ops = []
    for pj, ej in zip(p, e.T):
        if pj <= 1e-15:
            continue
        block = np.einsum("abcd,d->bac", u4, ej)  # (b_out, s_out, s_in)
        ops.extend(np.sqrt(pj) * block)
    return KrausChannel(np.array(ops))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(num_qubits: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    dim = 1 << num_qubits
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def superoperator(ch: KrausChannel) -> np.ndarray:
    """Matrix ``S`` with ``vec(E(rho)) = S vec(rho)`` for row-major ``vec``."""
    return np.einsum("kij,klm->iljm", ch.operators, ch.operators.conj()).reshape(ch.dim ** 2, ch.dim ** 2)


def channel_fixed_point(ch: KrausChannel) -> np.ndarray:
    """Stationary state of ``ch`` (eigenvector of eigenvalue 1, trace-normalized).

    If the fixed space is degenerate an arbitrary member is returned.
    """
    w, v = np.linalg.eig(superoperator(ch))
    i = int(np.argmin(np.abs(w - 1)))
    rho = v[:, i].reshape(ch.dim, ch.dim)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)
