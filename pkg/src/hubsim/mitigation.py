"""Post-processing error mitigation.

* readout calibration: build a confusion matrix from basis-state runs and
  undo it (least squares + projection onto the probability simplex);
* zero-noise extrapolation: rerun with ``c`` times as many, ``c`` times
  shorter steps (same physics, ``c`` times the gates) and Richardson-extrapolate
  to ``c = 0``;
* bit-flip relabeling: run in the X-conjugated frame so population sitting in
  ``|1>`` (which decays) is stored in ``|0>`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .engine import _as_rng, readout_confusion, relabel_permutation, sample_indices
from .trace import basis_labels

SINGULAR_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """``matrix[i, j] = P(measure i | prepared j)``; columns sum to one."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(m < -1e-12) or np.any(m > 1 + 1e-12):
            raise ValueError("confusion matrix entries must lie in [0, 1]")
        if np.max(np.abs(m.sum(axis=0) - 1)) > 1e-9:
            raise ValueError("confusion matrix columns must sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_confusion_matrix(readout, qubits: int, shots: int, seed=0) -> ConfusionMatrix:
    """Calibrate by preparing each basis state and measuring ``shots`` times."""
    if not 1 <= qubits <= 4:
        raise ValueError("calibration supports 1 to 4 qubits")
    if shots < 1:
        raise ValueError("calibration needs shots >= 1")
    rng = _as_rng(seed)
    dim = 1 << qubits
    cols = []
    for j in range(dim):
        p = np.zeros(dim)
        p[j] = 1.0
        cols.append(sample_indices(p, shots, rng, readout) / shots)
    return ConfusionMatrix(np.array(cols).T)


def exact_confusion_matrix(readout, qubits: int) -> ConfusionMatrix:
    return ConfusionMatrix(readout_confusion(readout, qubits))


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{x : x >= 0, sum x = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def correct_readout(raw, cm: ConfusionMatrix, raw_inverse: bool = False) -> np.ndarray:
    """Estimate the pre-readout distribution from measured frequencies.

    ``raw_inverse=True`` returns the plain solution of ``cm x = raw``, which
    may have negative entries.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (cm.dim,):
        raise ValueError(f"distribution of length {raw.size} does not match {cm.dim}x{cm.dim} matrix")
    if np.linalg.svd(cm.matrix, compute_uv=False).min() < SINGULAR_ATOL:
        raise ValueError("confusion matrix is singular")
    if raw_inverse:
        return np.linalg.solve(cm.matrix, raw)
    x, *_ = np.linalg.lstsq(cm.matrix, raw, rcond=None)
    return project_to_simplex(x)


@dataclass(frozen=True)
class ZnePoint:
    scale: int
    value: float

    def __post_init__(self):
        if int(self.scale) != self.scale or self.scale < 1:
            raise ValueError(f"noise scale must be a positive integer, got {self.scale}")


def zne_richardson(points: Sequence[ZnePoint], order: int = 1) -> float:
    """Lagrange-extrapolate ``value(scale)`` to zero using the lowest ``order+1`` scales."""
    scales = [p.scale for p in points]
    if len(set(scales)) != len(scales):
        raise ValueError(f"duplicate noise scales in {scales}")
    if order < 1 or len(points) < order + 1:
        raise ValueError(f"order {order} needs at least {order + 1} points")
    use = sorted(points, key=lambda p: p.scale)[: order + 1]
    total = 0.0
    for i, pi in enumerate(use):
        w = 1.0
        for j, pj in enumerate(use):
            if j != i:
                w *= pj.scale / (pj.scale - pi.scale)
        total += w * pi.value
    return float(total)


def noise_scaled_config(config, scale: int):
    """Same physical run with ``scale``-times more steps of ``1/scale`` the length."""
    if int(scale) != scale or scale < 1:
        raise ValueError("scale must be a positive integer")
    if scale == 1:
        return config
    return replace(config, model=config.model.refined(scale), bath=config.bath.scaled(scale))


def zne_trace_rows(traces: dict[int, np.ndarray], steps: int, order: int = 1) -> np.ndarray:
    """Extrapolate every population at steps ``0..steps`` across scaled traces.

    ``traces[c]`` has ``c * steps + 1`` rows; its row ``c * k`` matches physical
    step ``k``. Each extrapolated row is projected back onto the simplex.
    """
    out = []
    for k in range(steps + 1):
        rows = {c: np.asarray(t)[c * k] for c, t in traces.items()}
        dim = next(iter(rows.values())).size
        est = np.array([zne_richardson([ZnePoint(c, r[i]) for c, r in rows.items()], order)
                        for i in range(dim)])
        out.append(project_to_simplex(est))
    return np.array(out)


def bitflip_relabel(config):
    """Toggle the X-conjugated frame; returns ``(config, label_map)``.

    ``label_map`` sends each reported label to the lab-frame label it was
    measured as. Applying this twice restores the original config.
    """
    nq = config.model.num_qubits
    labels = basis_labels(nq)
    perm = relabel_permutation(nq)
    mapping = {labels[i]: labels[perm[i]] for i in range(len(labels))}
    return replace(config, relabel=not config.relabel), mapping
