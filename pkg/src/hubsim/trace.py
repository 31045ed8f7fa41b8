"""Per-step population output shared by the model, engine and CLI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def basis_labels(num_qubits: int) -> tuple[str, ...]:
    return tuple(format(i, f"0{num_qubits}b") for i in range(1 << num_qubits))


@dataclass(frozen=True, eq=False)
class PopulationTrace:
    """Row ``k`` holds the basis-state populations after ``k`` steps.

    ``shots == 0`` marks exact probabilities; otherwise rows are normalized
    counts.
    """

    labels: tuple[str, ...]
    rows: np.ndarray
    shots: int = 0

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float, ndmin=2)
        if rows.shape[1] != len(self.labels):
            raise ValueError(f"{rows.shape[1]} columns for {len(self.labels)} labels")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def steps(self) -> int:
        return self.rows.shape[0] - 1

    def column(self, label: str) -> np.ndarray:
        return self.rows[:, self.labels.index(label)]

    def __len__(self):
        return self.rows.shape[0]
