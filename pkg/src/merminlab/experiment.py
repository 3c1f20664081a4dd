"""Experiment orchestration: orthogonal (M, M') runs over chains, phase
sweeps, repeat statistics and report emission."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .device import Chain, CouplingGraph, ReferenceRow, TopologyError, enumerate_chains
from .measurement import estimate_operator
from .mermin import (
    AnalyticSpec,
    analytic_expectation,
    canonical_operator,
    lr_bound,
    normalize,
    phi_max,
    quantum_max_normalized,
)
from .statevector import StateVector
from .noise import (
    NoiseSpec,
    apply_readout_flip,
    mixture_probabilities,
    trajectory_ensemble,
    trajectory_expectation,
)

MODES = ("sampled", "exact")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    chains: tuple[Chain, ...] | str = "all"
    phi: float | None = None
    shots: int = 1024
    repeats: int = 5
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0
    mode: str = "sampled"
    trajectories: int = 64

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.trajectories < 1:
            raise ValueError("trajectories must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.chains != "all":
            object.__setattr__(
                self, "chains", tuple(c if isinstance(c, Chain) else Chain(tuple(c)) for c in self.chains)
            )

    @property
    def phase(self) -> float:
        return phi_max(self.n) if self.phi is None else self.phi


@dataclass(frozen=True)
class RunRecord:
    chain: Chain
    repeat: int
    m_estimate: float
    m_prime_estimate: float
    seed: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m_estimate) and math.isfinite(self.m_prime_estimate)):
            raise ValueError("non-finite estimate")


@dataclass(frozen=True)
class SummaryStats:
    n: int
    count: int
    m_mean: float
    m_prime_mean: float
    m_sigma: float
    m_prime_sigma: float

    @property
    def m_norm_mean(self) -> float:
        return normalize(self.m_mean, self.n)

    @property
    def m_prime_norm_mean(self) -> float:
        return normalize(self.m_prime_mean, self.n)

    @property
    def m_norm_sigma(self) -> float:
        return normalize(self.m_sigma, self.n)

    @property
    def m_prime_norm_sigma(self) -> float:
        return normalize(self.m_prime_sigma, self.n)


def population_stats(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard deviation with divisor len(values)."""
    if len(values) == 0:
        raise ValueError("no values")
    a = np.asarray(values, dtype=np.float64)
    mean = float(a.mean())
    return mean, float(math.sqrt(float(np.mean((a - mean) ** 2))))


def summarize(records: Sequence[RunRecord]) -> SummaryStats:
    if not records:
        raise ValueError("cannot summarize an empty record list")
    n = len(records[0].chain)
    m_mean, m_sigma = population_stats([r.m_estimate for r in records])
    mp_mean, mp_sigma = population_stats([r.m_prime_estimate for r in records])
    return SummaryStats(n, len(records), m_mean, mp_mean, m_sigma, mp_sigma)


def task_seed(seed: int, *keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))


def _seed_int(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def estimate_pair(
    n: int,
    phi: float,
    noise: NoiseSpec,
    *,
    mode: str = "sampled",
    shots: int = 1024,
    trajectories: int = 64,
    seed: int = 0,
) -> tuple[float, float]:
    """One (<M_n>, <M'_n>) estimate of the canonical pair."""
    pair = canonical_operator(n)
    ss_traj, ss_m, ss_mp = task_seed(seed, 0).spawn(3)
    if mode == "exact":
        m, mp = trajectory_expectation(n, phi, [pair.m, pair.m_prime], noise, trajectories, ss_traj)
        return m, mp
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    ens = trajectory_ensemble(n, phi, noise, trajectories, ss_traj)
    state = StateVector(n, ens.amps[0], check=False)

    def probs(term: str) -> np.ndarray:
        return mixture_probabilities(ens, term)

    out = []
    for op, ss in ((pair.m, ss_m), (pair.m_prime, ss_mp)):
        base = _seed_int(ss)
        hook = None
        if noise.readout_eps > 0:
            def hook(counts, t, _base=base):
                return apply_readout_flip(counts, noise.readout_eps, task_seed(_base, 1, t))
        out.append(estimate_operator(state, op, shots, base, counts_hook=hook, probabilities=probs).value)
    return out[0], out[1]


def resolve_chains(config: ExperimentConfig, graph: CouplingGraph | None) -> list[Chain]:
    if config.chains == "all":
        if graph is None:
            raise ValueError("chains='all' needs a coupling graph")
        return enumerate_chains(graph, config.n)
    chains = list(config.chains)
    for c in chains:
        if len(c) != config.n:
            raise ValueError(f"chain {c.label()} has length {len(c)}, expected {config.n}")
        if graph is not None and not graph.is_path(c.qubits):
            raise TopologyError(f"chain {c.label()} is not a path in the coupling graph")
    return chains


def run_records(config: ExperimentConfig, graph: CouplingGraph | None = None) -> list[RunRecord]:
    records = []
    for ci, chain in enumerate(resolve_chains(config, graph)):
        for r in range(config.repeats):
            s = _seed_int(task_seed(config.seed, ci, r))
            m, mp = estimate_pair(
                config.n,
                config.phase,
                config.noise,
                mode=config.mode,
                shots=config.shots,
                trajectories=config.trajectories,
                seed=s,
            )
            records.append(RunRecord(chain, r, m, mp, s))
    return records


def run_orthogonal_pair(
    config: ExperimentConfig, graph: CouplingGraph | None = None
) -> list[tuple[Chain, SummaryStats]]:
    """Per-chain repeat statistics of (<M_n>, <M'_n>) at ``config.phase``."""
    records = run_records(config, graph)
    by_chain: dict[Chain, list[RunRecord]] = {}
    for rec in records:
        by_chain.setdefault(rec.chain, []).append(rec)
    return [(c, summarize(rs)) for c, rs in by_chain.items()]


def sweep_phase(
    n: int,
    phis: Sequence[float],
    mode: str = "exact",
    noise: NoiseSpec | None = None,
    *,
    shots: int = 1024,
    trajectories: int = 64,
    seed: int = 0,
) -> list[dict]:
    """<M_n>(phi) and <M'_n>(phi) with analytic columns alongside."""
    noise = noise or NoiseSpec()
    rows = []
    for i, phi in enumerate(phis):
        m, mp = estimate_pair(
            n, phi, noise, mode=mode, shots=shots, trajectories=trajectories,
            seed=_seed_int(task_seed(seed, i)),
        )
        am, amp = analytic_expectation(AnalyticSpec(n, phi))
        rows.append(
            {
                "n": n,
                "phi": float(phi),
                "m": m,
                "mp": mp,
                "m_norm": normalize(m, n),
                "mp_norm": normalize(mp, n),
                "analytic_m": am,
                "analytic_mp": amp,
            }
        )
    return rows


def fit_sinusoid(phis: Sequence[float], values: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares amplitude, phase offset and period of A cos(2 pi phi / T - d).

    The period is scanned over T in (pi, 4 pi]; for each T the linear
    cos/sin coefficients are solved exactly.
    """
    phis = np.asarray(phis, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    best = None
    for T in np.linspace(math.pi * 1.01, 4 * math.pi, 3000):
        w = 2 * math.pi / T
        A = np.column_stack([np.cos(w * phis), np.sin(w * phis)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = float(np.sum((A @ coef - y) ** 2))
        if best is None or resid < best[0]:
            best = (resid, T, coef)
    from scipy.optimize import minimize_scalar

    def resid_at(T: float) -> float:
        w = 2 * math.pi / T
        A = np.column_stack([np.cos(w * phis), np.sin(w * phis)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return float(np.sum((A @ coef - y) ** 2))

    step = (4 * math.pi - math.pi * 1.01) / 2999
    T = float(minimize_scalar(resid_at, bounds=(best[1] - step, best[1] + step), method="bounded",
                              options={"xatol": 1e-12}).x)
    w = 2 * math.pi / T
    A = np.column_stack([np.cos(w * phis), np.sin(w * phis)])
    (c, s), *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(math.hypot(c, s)), float(math.atan2(s, c)), T


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

REPORT_COLUMNS = [
    "rank",
    "n",
    "chain",
    "m_mean",
    "mp_mean",
    "m_sigma",
    "mp_sigma",
    "m_norm_mean",
    "mp_norm_mean",
    "m_norm_sigma",
    "mp_norm_sigma",
]
REFERENCE_COLUMNS = ["ref_m_mean", "ref_mp_mean", "delta"]


def _fmt(x: float) -> str:
    return repr(float(x))


def report_rows(
    results: Sequence[tuple[Chain, SummaryStats]],
    reference: Sequence[ReferenceRow] | None = None,
) -> list[dict]:
    """Ranked rows, descending in m_mean; ties keep chain order."""
    ref = {r.chain.canonical(): r for r in reference or ()}
    ordered = sorted(results, key=lambda cs: (-cs[1].m_mean, cs[0].canonical().qubits))
    rows = []
    for rank, (chain, st) in enumerate(ordered, 1):
        row = {
            "rank": rank,
            "n": st.n,
            "chain": chain.label(),
            "m_mean": st.m_mean,
            "mp_mean": st.m_prime_mean,
            "m_sigma": st.m_sigma,
            "mp_sigma": st.m_prime_sigma,
            "m_norm_mean": st.m_norm_mean,
            "mp_norm_mean": st.m_prime_norm_mean,
            "m_norm_sigma": st.m_norm_sigma,
            "mp_norm_sigma": st.m_prime_norm_sigma,
        }
        if reference is not None:
            r = ref.get(chain.canonical())
            row["ref_m_mean"] = None if r is None else r.m_mean
            row["ref_mp_mean"] = None if r is None else r.m_prime_mean
            row["delta"] = None if r is None else st.m_mean - r.m_mean
        rows.append(row)
    return rows


def annotations(n: int, circles: Sequence[float] = ()) -> dict:
    """Plot constants for the (M~, M~') plane."""
    return {
        "n": n,
        "lr_square": 1.0,
        "lr_bound_raw": lr_bound(n),
        "quantum_radius": quantum_max_normalized(n),
        "circles": [float(c) for c in circles],
    }


def emit_report(
    results: Sequence[tuple[Chain, SummaryStats]],
    reference: Sequence[ReferenceRow] | None = None,
    fmt: str = "csv",
    path: str | Path | None = None,
    *,
    n: int | None = None,
    circles: Sequence[float] = (),
) -> str:
    """Render the ranked table as CSV or JSON; also written to ``path`` if given."""
    rows = report_rows(results, reference)
    columns = REPORT_COLUMNS + (REFERENCE_COLUMNS if reference is not None else [])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow(["" if row[c] is None else (_fmt(row[c]) if isinstance(row[c], float) else row[c]) for c in columns])
        text = buf.getvalue()
    elif fmt == "json":
        if n is None and results:
            n = results[0][1].n
        payload = {
            "columns": columns,
            "rows": rows,
            "annotations": annotations(n, circles) if n is not None else None,
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def results_to_dict(results: Sequence[tuple[Chain, SummaryStats]]) -> list[dict]:
    return [
        {
            "chain": list(c.qubits),
            "n": s.n,
            "count": s.count,
            "m_mean": s.m_mean,
            "mp_mean": s.m_prime_mean,
            "m_sigma": s.m_sigma,
            "mp_sigma": s.m_prime_sigma,
        }
        for c, s in results
    ]


def results_from_dict(items: Sequence[dict]) -> list[tuple[Chain, SummaryStats]]:
    return [
        (
            Chain(tuple(d["chain"])),
            SummaryStats(int(d["n"]), int(d["count"]), float(d["m_mean"]), float(d["mp_mean"]),
                         float(d["m_sigma"]), float(d["mp_sigma"])),
        )
        for d in items
    ]
