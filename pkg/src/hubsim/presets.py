"""Named experiment configurations for the published figure set.

Parameters are the step products quoted for each figure. Noisy presets use
a generic phenomenological noise model, not a fit to any device.
"""

from __future__ import annotations

from .bath import BathSpec, Coupling, Topology
from .config import ExperimentConfig, Mitigation, ZneSettings
from .engine import NoiseModel
from .model import Filling, InitialKind, InitialState, ModelSpec

ONE, TWO = Filling.ONE_ELECTRON, Filling.TWO_ELECTRON

# qualitative stand-in: CNOT-dominated depolarizing, |1> decay, asymmetric readout
GENERIC_NOISE = NoiseModel(gate_depolarizing=0.001, gate_depolarizing_2q=0.01,
                           amplitude_decay_per_step=0.005, readout_flip=(0.02, 0.05))
READOUT_ONLY = NoiseModel(readout_flip=(0.02, 0.05))
ZNE_NOISE = NoiseModel(gate_depolarizing=0.005, amplitude_decay_per_step=0.01, readout_flip=(0.02, 0.05))

FIG4_MODEL = ModelSpec(ONE, eps_dt=0.2, t12_dt=0.1, steps=25)
FIG5_MODEL = ModelSpec(ONE, eps_dt=0.0, t12_dt=0.1, steps=25)
FIG6_MODEL = ModelSpec(TWO, t12_dt=0.1, uc_dt=0.4, steps=30)

_PRESETS = {
    "fig4_upper": dict(model=FIG4_MODEL, noise=GENERIC_NOISE),
    "fig4_lower": dict(model=FIG4_MODEL, bath=BathSpec(Coupling.XY, 0.5), noise=GENERIC_NOISE),
    "fig5_upper": dict(model=FIG5_MODEL, noise=GENERIC_NOISE),
    "fig5_lower": dict(model=FIG5_MODEL, bath=BathSpec(Coupling.ZZ, 0.5), noise=GENERIC_NOISE),
    "fig6_upper": dict(model=FIG6_MODEL, noise=READOUT_ONLY, mitigation=Mitigation(readout=True)),
    "fig6_lower": dict(model=ModelSpec(TWO, t12_dt=0.1, uc_dt=0.4, steps=40),
                       bath=BathSpec(Coupling.XY, 0.5, Topology.PER_QUBIT), noise=GENERIC_NOISE),
    "fig7_dfs": dict(model=FIG6_MODEL, init=InitialState(InitialKind.SINGLET),
                     bath=BathSpec(Coupling.ZZ, 0.5, Topology.COMMON)),
    "fig7_mitigation": dict(model=ModelSpec(TWO, t12_dt=0.1, uc_dt=0.4, steps=10), noise=ZNE_NOISE,
                            mitigation=Mitigation(readout=True, zne=ZneSettings(1, (1, 2)), bitflip=True)),
}

DESCRIPTIONS = {
    "fig4_upper": "one electron, eps*dt=0.2, t12*dt=0.1: Rabi oscillation",
    "fig4_lower": "as fig4_upper plus XY bath g*dt=0.5 (amplitude damping)",
    "fig5_upper": "one electron, eps=0, t12*dt=0.1: full Rabi oscillation",
    "fig5_lower": "as fig5_upper plus ZZ bath g*dt=0.5 (phase damping)",
    "fig6_upper": "two electrons, t12*dt=0.1, U*dt=0.4 from |1,1>: pair oscillation, readout correction",
    "fig6_lower": "as fig6_upper plus per-qubit XY bath g*dt=0.5",
    "fig7_dfs": "singlet under two-electron dynamics with a common ZZ bath (decoherence-free)",
    "fig7_mitigation": "|1,1> population under gate noise with readout, ZNE and bit-flip mitigation",
}


def preset_names() -> list[str]:
    return list(_PRESETS)


def get_preset(name: str) -> ExperimentConfig:
    try:
        kwargs = _PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}") from None
    return ExperimentConfig(name=name, **kwargs)
