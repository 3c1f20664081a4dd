import json
import math

import numpy as np
import pytest

from merminlab.experiment import ExperimentConfig, run_orthogonal_pair
from merminlab.measurement import CountsTable
from merminlab.mermin import canonical_operator
from merminlab.noise import (
    NoiseSpec,
    apply_depolarizing_trajectory,
    apply_readout_flip,
    prepare_state,
    readout_attenuation,
    theta_radius,
    trajectory_ensemble,
    trajectory_expectation,
)
from merminlab.statevector import build_ghz_circuit, expectation_exact, ghz_like_state, prepare_theta_state

# frozen regression anchor: n=2, phi=pi/4, p=0.05, 500 trajectories, seed 0
DEPOL_ANCHOR = 2.364565076287814


def test_theta_radius_examples():
    assert theta_radius(math.pi / 4) == pytest.approx(2 * math.sqrt(2))
    assert theta_radius(0) == 0
    assert theta_radius(math.pi / 8) == pytest.approx(2)


def test_spec_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        NoiseSpec(depol_p=1.5)
    with pytest.raises(ValueError):
        NoiseSpec(theta=2.0)
    spec = NoiseSpec(theta=0.7854, depol_p=0.01, readout_eps=0.02)
    f = tmp_path / "noise.json"
    f.write_text(json.dumps(spec.to_dict()))
    assert NoiseSpec.from_json_file(f) == spec
    assert NoiseSpec(theta=math.pi / 4).is_noiseless


def test_readout_flip_examples():
    c = CountsTable({"00": 100}, 100)
    assert apply_readout_flip(c, 0.0, 1) == c
    assert apply_readout_flip(c, 1.0, 1).counts == {"11": 100}
    big = apply_readout_flip(CountsTable({"0": 10**6}, 10**6), 0.5, 3)
    f = big.counts["1"] / 10**6
    assert abs(f - 0.5) <= 3 * math.sqrt(0.25 / 10**6)
    assert apply_readout_flip(CountsTable({"01": 50, "10": 50}, 100), 0.3, 9) == apply_readout_flip(
        CountsTable({"01": 50, "10": 50}, 100), 0.3, 9
    )


def test_readout_attenuation():
    assert readout_attenuation("XYX", 0.1) == pytest.approx(0.8**3)
    assert readout_attenuation("IXI", 0.25) == pytest.approx(0.5)


def test_depolarizing_examples():
    c = build_ghz_circuit(4, 0.3)
    assert apply_depolarizing_trajectory(c, 0.0, 5) == c
    noisy = apply_depolarizing_trajectory(c, 1.0, 5)
    n_cx = sum(op.g == "cx" for op in c.ops)
    assert len(noisy) == len(c) + 2 * n_cx
    assert apply_depolarizing_trajectory(c, 0.2, 5) == apply_depolarizing_trajectory(c, 0.2, 5)


def test_depolarizing_anchor():
    p = canonical_operator(2)
    (m,) = trajectory_expectation(2, math.pi / 4, [p.m], NoiseSpec(depol_p=0.05), 500, 0)
    assert 2 * (1 - 3 * 0.05) ** 2 < m < 2 * math.sqrt(2)
    assert m == pytest.approx(DEPOL_ANCHOR, abs=1e-9)


def test_theta_state_matches_prepare():
    for theta in (0.1, 0.5, 1.2):
        a = prepare_state(3, 0.4, NoiseSpec(theta=theta))
        assert a.fidelity(prepare_theta_state(3, theta, 0.4)) == pytest.approx(1, abs=1e-12)


def test_radius_monotone_in_theta():
    p = canonical_operator(2)
    thetas = [k * math.pi / 16 for k in range(9)]
    radii = []
    for th in thetas:
        s = prepare_state(2, 0.6, NoiseSpec(theta=th))
        radii.append(math.hypot(expectation_exact(s, p.m), expectation_exact(s, p.m_prime)))
        assert radii[-1] == pytest.approx(theta_radius(th), abs=1e-9)
    centre = 4
    assert all(radii[i] <= radii[i + 1] + 1e-12 for i in range(centre))
    assert all(radii[i] >= radii[i + 1] - 1e-12 for i in range(centre, 8))


def test_zero_noise_identity():
    zero = NoiseSpec(theta=math.pi / 4, depol_p=0.0, readout_eps=0.0)
    assert np.array_equal(prepare_state(4, 0.3, zero).amps, prepare_state(4, 0.3, None).amps)
    assert prepare_state(4, 0.3, zero).fidelity(ghz_like_state(4, 0.3)) == pytest.approx(1, abs=1e-12)
    for mode in ("exact", "sampled"):
        a = run_orthogonal_pair(ExperimentConfig(n=3, chains=((0, 1, 2),), noise=zero, mode=mode, repeats=2))
        b = run_orthogonal_pair(ExperimentConfig(n=3, chains=((0, 1, 2),), mode=mode, repeats=2))
        assert a == b


def test_ensemble_weights():
    ens = trajectory_ensemble(3, 0.2, NoiseSpec(depol_p=0.1), 40, 0)
    assert ens.weights.sum() == pytest.approx(1)
    assert len(ens) <= 40
