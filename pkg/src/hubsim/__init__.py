"""Collision-model simulation of a dissipative two-site Hubbard model."""

__version__ = "0.1.0"

from .bath import BathMode, BathSpec, Coupling, Topology, collision_channel
from .config import ExperimentConfig, Mitigation, ZneSettings, parse_config, serialize_config
from .engine import NoiseModel, run_experiment, sample_counts
from .model import Filling, InitialKind, InitialState, ModelSpec
from .trace import PopulationTrace
