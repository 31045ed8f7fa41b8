import math

import numpy as np
import pytest

from hubsim.bath import NO_BATH, BathMode, BathSpec, Coupling, Topology, collision_channel
from hubsim.circuit import circuit_unitary
from hubsim.config import ExperimentConfig
from hubsim.densmat import check_density, random_density
from hubsim.engine import (NOISELESS, NoiseModel, build_step, depolarizing_channel, dilated_step_circuit,
                           evolve_states, evolve_step, run_dilated, run_experiment, sample_counts)
from hubsim.model import Filling, InitialKind, InitialState, ModelSpec, trotter_step_circuit, trotterized_populations

ONE, TWO = Filling.ONE_ELECTRON, Filling.TWO_ELECTRON
FIG4 = ModelSpec(ONE, 0.2, 0.1, steps=20)
FIG5 = ModelSpec(ONE, 0.0, 0.1, steps=20)
FIG6 = ModelSpec(TWO, t12_dt=0.1, uc_dt=0.4, steps=20)
PARAM_SETS = [
    (FIG4, BathSpec(Coupling.XY, 0.5)),
    (FIG5, BathSpec(Coupling.ZZ, 0.5)),
    (FIG6, NO_BATH),
    (FIG6, BathSpec(Coupling.XY, 0.5, Topology.PER_QUBIT)),
]
ALL_NOISE = NoiseModel(gate_depolarizing=0.01, gate_depolarizing_2q=0.03, amplitude_decay_per_step=0.02,
                       readout_flip=(0.02, 0.05), fresh_swap_depolarizing=0.01)


def test_noiseless_step_is_circuit_conjugation():
    u = circuit_unitary(trotter_step_circuit(FIG6))
    rho = random_density(2, np.random.default_rng(0))
    assert np.allclose(evolve_step(rho, FIG6), u @ rho @ u.conj().T, atol=1e-14)


def test_bath_only_step_decays_excited_state():
    frozen = ModelSpec(ONE)
    out = evolve_step(np.diag([0, 1]), frozen, BathSpec(Coupling.XY, 0.5))
    assert out[1, 1].real == pytest.approx(np.cos(0.25) ** 2, abs=1e-12)
    assert out[1, 1].real == pytest.approx(0.93879, abs=1e-5)


def test_full_depolarizing_gives_maximally_mixed():
    rho = random_density(1, np.random.default_rng(1))
    assert np.allclose(depolarizing_channel(1.0)(rho), np.eye(2) / 2, atol=1e-15)


def test_evolve_step_shape_checked():
    with pytest.raises(ValueError):
        evolve_step(np.eye(4) / 4, FIG4)


@pytest.mark.parametrize("model,bath", PARAM_SETS)
def test_engine_matches_trotter_plus_dilation_oracle(model, bath):
    init = InitialState(InitialKind.SITE2 if model.filling is ONE else InitialKind.DOUBLE_SITE2)
    states = evolve_states(ExperimentConfig(model, init, bath, shots=0))
    if not bath.active:
        ref = trotterized_populations(model, init).rows
        assert np.max(np.abs(np.array([np.diag(s).real for s in states]) - ref)) <= 1e-10
        return
    u = circuit_unitary(trotter_step_circuit(model))
    ch = collision_channel(bath, model.num_qubits)
    rho = init.density(model.filling)
    for k, s in enumerate(states):
        assert np.max(np.abs(s - rho)) <= 1e-10, k
        rho = ch(u @ rho @ u.conj().T)


@pytest.mark.parametrize("model,bath", PARAM_SETS)
@pytest.mark.parametrize("noise", [NOISELESS, ALL_NOISE])
def test_channel_engine_matches_dilated(model, bath, noise):
    cfg = ExperimentConfig(model, bath=bath, noise=noise, shots=0)
    a, b = evolve_states(cfg), run_dilated(cfg)
    assert max(np.max(np.abs(x - y)) for x, y in zip(a, b)) <= 1e-10


def test_dilated_circuit_has_resets():
    text = dilated_step_circuit(FIG6, BathSpec(Coupling.XY, 0.5)).dump()
    assert text.count("RESET") == 2 and "CRY" in text


@pytest.mark.parametrize("model,bath", PARAM_SETS)
def test_trace_preserved_with_all_noise(model, bath):
    bath = BathSpec(bath.coupling, bath.g_dt, bath.topology, BathMode.FRESH) if bath.active else bath
    for rho in evolve_states(ExperimentConfig(model, bath=bath, noise=ALL_NOISE, shots=0)):
        assert abs(np.trace(rho) - 1) <= 1e-9
        check_density(rho)


@pytest.mark.parametrize("model,bath", [p for p in PARAM_SETS if p[1].active])
def test_fresh_equals_reset(model, bath):
    fresh = BathSpec(bath.coupling, bath.g_dt, bath.topology, BathMode.FRESH)
    a = evolve_states(ExperimentConfig(model, bath=bath, shots=0))
    b = evolve_states(ExperimentConfig(model, bath=fresh, shots=0))
    assert max(np.max(np.abs(x - y)) for x, y in zip(a, b)) <= 1e-14


def _zz_mixing_deviation(g, steps):
    cfg = ExperimentConfig(ModelSpec(ONE, 0.0, 0.1, steps=steps), bath=BathSpec(Coupling.ZZ, g), shots=0)
    return np.array([abs(s[0, 0].real - 0.5) for s in evolve_states(cfg)])


def test_zz_bath_mixes_by_stated_bound():
    g = 0.5
    n = math.ceil(6 / -math.log(math.cos(g)))
    dev = _zz_mixing_deviation(g, 3 * n)
    assert np.max(dev[n:]) <= 0.01


def test_zz_bath_mixing_rate_is_half_log_cos():
    # underdamped regime: the (z, y) step map has eigenvalues of modulus sqrt(cos g)
    g = 0.5
    n = math.ceil(math.log(0.5 / 0.01) / (-0.5 * math.log(math.cos(g))))
    dev = _zz_mixing_deviation(g, 3 * n)
    assert np.max(dev[n:]) <= 0.01
    assert dev[-1] < 1e-3


def test_xy_two_electron_relaxes_to_fixed_point():
    model = ModelSpec(TWO, t12_dt=0.1, uc_dt=0.4, steps=200)
    bath = BathSpec(Coupling.XY, 0.5, Topology.PER_QUBIT)
    step = build_step(model, bath)
    rho = np.diag([0, 0, 0, 1]).astype(complex)
    for _ in range(5000):
        nxt = step.apply(rho)
        if np.max(np.abs(nxt - rho)) < 1e-15:
            break
        rho = nxt
    fixed = rho[0, 0].real
    states = evolve_states(ExperimentConfig(model, bath=bath, shots=0))
    assert abs(states[-1][0, 0].real - fixed) <= 0.05
    p11 = np.array([s[3, 3].real for s in states])
    assert p11[-1] < 0.2 < p11[0]


def test_relabel_noiseless_is_identical():
    for model, bath in PARAM_SETS:
        cfg = ExperimentConfig(model, bath=bath, shots=0)
        a = run_experiment(cfg).rows
        b = run_experiment(ExperimentConfig(model, bath=bath, shots=0, relabel=True)).rows
        assert np.max(np.abs(a - b)) <= 1e-12


def test_relabel_avoids_decay():
    gamma, n = 0.02, 15
    model = ModelSpec(TWO, steps=n)
    noise = NoiseModel(amplitude_decay_per_step=gamma)
    orig = run_experiment(ExperimentConfig(model, noise=noise, shots=0)).column("11")
    flipped = run_experiment(ExperimentConfig(model, noise=noise, shots=0, relabel=True)).column("11")
    assert np.allclose(orig, (1 - gamma) ** (2 * np.arange(n + 1)), atol=1e-12)
    assert np.allclose(flipped, 1.0, atol=1e-12)


def test_sample_counts_pure_state():
    assert sample_counts(np.diag([1.0, 0.0]), 1000, seed=3) == {"0": 1000, "1": 0}


def test_sample_counts_readout_flip_rate():
    shots = 200_000
    c = sample_counts(np.diag([1.0, 0.0]), shots, seed=4, readout=(0.1, 0.0))
    sigma = math.sqrt(shots * 0.1 * 0.9)
    assert abs(c["1"] - 0.1 * shots) <= 3 * sigma


def test_sample_counts_mixed_state():
    c = sample_counts(np.eye(2) / 2, 8192, seed=5)
    assert abs(c["0"] - 4096) <= 3 * 45 and sum(c.values()) == 8192


def test_sample_counts_rejects_negative_population():
    with pytest.raises(ValueError, match="negative"):
        sample_counts(np.diag([1.1, -0.1]), 10)


@pytest.mark.parametrize("shots", [2**10, 2**13, 2**16])
def test_sampled_trace_converges(shots):
    cfg = ExperimentConfig(FIG6, shots=shots, seed=11)
    exact = run_experiment(cfg, exact=True).rows
    sampled = run_experiment(cfg).rows
    assert np.max(np.abs(sampled - exact)) <= 5 / math.sqrt(shots)


def test_run_experiment_deterministic():
    cfg = ExperimentConfig(FIG4, noise=ALL_NOISE, shots=8192, seed=42)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert np.array_equal(a.rows, b.rows)
    assert not np.array_equal(a.rows, run_experiment(ExperimentConfig(FIG4, noise=ALL_NOISE, seed=43)).rows)
    assert a.rows.shape == (FIG4.steps + 1, 2)
