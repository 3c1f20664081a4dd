import json
import math

import pytest

from merminlab.device import Chain, TopologyError, load_reference_table, load_topology
from merminlab.experiment import (
    REPORT_COLUMNS,
    ExperimentConfig,
    RunRecord,
    SummaryStats,
    emit_report,
    fit_sinusoid,
    population_stats,
    results_from_dict,
    results_to_dict,
    run_orthogonal_pair,
    summarize,
    sweep_phase,
)
from merminlab.mermin import AnalyticSpec, analytic_expectation, phi_max, quantum_max_normalized
from merminlab.noise import NoiseSpec

SQ2 = math.sqrt(2)


def records(values):
    return [RunRecord(Chain((0, 1)), i, v, 0.0, i) for i, v in enumerate(values)]


def test_summarize_examples():
    s = summarize(records([2, 2, 2, 2, 2]))
    assert (s.m_mean, s.m_sigma) == (2, 0)
    s = summarize(records([1, 3]))
    assert (s.m_mean, s.m_sigma) == (2, 1)
    vals = [2.0, 2.5, 2.2, 2.4, 2.46]
    mean = sum(vals) / 5
    sigma = math.sqrt(sum((v - mean) ** 2 for v in vals) / 5)
    assert population_stats(vals) == pytest.approx((2.312, sigma))
    with pytest.raises(ValueError):
        summarize([])


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n=2, shots=0)
    with pytest.raises(ValueError):
        ExperimentConfig(n=2, repeats=0)
    with pytest.raises(ValueError):
        ExperimentConfig(n=2, mode="fast")
    assert ExperimentConfig(n=4).phase == pytest.approx(phi_max(4))


def test_exact_pair_n2():
    [(chain, st)] = run_orthogonal_pair(ExperimentConfig(n=2, chains=((29, 36),), mode="exact"), load_topology())
    assert st.m_norm_mean == pytest.approx(SQ2, abs=1e-9)
    assert st.m_prime_norm_mean == pytest.approx(0, abs=1e-9)


def test_exact_pair_theta():
    cfg = ExperimentConfig(n=2, chains=((0, 1),), mode="exact", noise=NoiseSpec(theta=math.pi / 8), phi=0.3)
    [(_, st)] = run_orthogonal_pair(cfg)
    assert st.m_norm_mean**2 + st.m_prime_norm_mean**2 == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("n", range(2, 8))
def test_exact_maxima(n):
    [(_, st)] = run_orthogonal_pair(ExperimentConfig(n=n, chains=(tuple(range(n)),), mode="exact", repeats=1))
    assert st.m_norm_mean == pytest.approx(quantum_max_normalized(n), abs=1e-9)
    assert st.m_prime_norm_mean == pytest.approx(0, abs=1e-9)


def test_run_rejects_non_path():
    with pytest.raises(TopologyError):
        run_orthogonal_pair(ExperimentConfig(n=3, chains=((34, 40, 41),)), load_topology())


def test_run_deterministic():
    cfg = ExperimentConfig(n=3, chains=((0, 1, 2), (1, 2, 3)), seed=42)
    assert run_orthogonal_pair(cfg) == run_orthogonal_pair(cfg)
    other = run_orthogonal_pair(ExperimentConfig(n=3, chains=((0, 1, 2), (1, 2, 3)), seed=43))
    assert other != run_orthogonal_pair(cfg)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sampled_soundness(n):
    analytic, _ = analytic_expectation(AnalyticSpec(n, phi_max(n)))
    hits = 0
    for seed in range(50):
        [(_, st)] = run_orthogonal_pair(ExperimentConfig(n=n, chains=(tuple(range(n)),), seed=seed))
        sigma_mean = st.m_sigma / math.sqrt(st.count)
        hits += abs(st.m_mean - analytic) <= 4 * sigma_mean
    assert hits >= 48


def test_sweep_examples():
    [row] = sweep_phase(4, [3 * math.pi / 4])
    assert row["m_norm"] == pytest.approx(2 * SQ2, abs=1e-9)
    [row] = sweep_phase(6, [5 * math.pi / 4 + math.pi / 2])
    assert row["m_norm"] == pytest.approx(0, abs=1e-9)
    assert row["mp_norm"] == pytest.approx(4 * SQ2, abs=1e-9)
    for row in sweep_phase(5, [0.1 * k for k in range(20)]):
        assert row["m"] == pytest.approx(row["analytic_m"], abs=1e-9)
        assert row["mp"] == pytest.approx(row["analytic_mp"], abs=1e-9)


def test_fit_period():
    phis = [k * math.pi / 4 for k in range(8)]
    rows = sweep_phase(2, phis)
    amp, _, period = fit_sinusoid(phis, [r["m"] for r in rows])
    assert amp == pytest.approx(2 * SQ2, abs=1e-6)
    assert period == pytest.approx(2 * math.pi, abs=1e-6)


def stats(m):
    return SummaryStats(2, 5, m, 0.0, 0.1, 0.1)


def test_report_order_and_columns():
    results = [(Chain((0, 1)), stats(2.4)), (Chain((1, 2)), stats(1.8)), (Chain((2, 3)), stats(3.0))]
    lines = emit_report(results).splitlines()
    assert lines[0].split(",") == REPORT_COLUMNS
    assert [ln.split(",")[2] for ln in lines[1:]] == ["2-3", "0-1", "1-2"]


def test_report_empty_is_header_only():
    assert emit_report([]) == ",".join(REPORT_COLUMNS) + "\n"


def test_report_reference_join():
    results = [(Chain((36, 29)), stats(2.5))]
    doc = json.loads(emit_report(results, load_reference_table(n=2), "json", circles=[1.0]))
    row = doc["rows"][0]
    assert row["ref_m_mean"] == 2.3129
    assert row["delta"] == pytest.approx(2.5 - 2.3129)
    assert doc["annotations"]["circles"] == [1.0]
    assert "delta" in doc["columns"]


def test_report_byte_identical(tmp_path):
    cfg = ExperimentConfig(n=2, chains=((0, 1), (1, 2)), seed=7, noise=NoiseSpec(depol_p=0.02, readout_eps=0.01))
    a = emit_report(run_orthogonal_pair(cfg), path=tmp_path / "a.csv")
    b = emit_report(run_orthogonal_pair(cfg), path=tmp_path / "b.csv")
    assert a == b
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_results_round_trip():
    results = run_orthogonal_pair(ExperimentConfig(n=2, chains=((0, 1),), repeats=2))
    assert results_from_dict(json.loads(json.dumps(results_to_dict(results)))) == results
