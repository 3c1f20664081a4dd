"""Measurement-setting compilation, shot sampling and Pauli estimators.

Bitstrings are written in qubit order: character ``i`` is the outcome of
qubit ``i`` (so "01" means qubit0=0, qubit1=1). Sampling uses numpy's PCG64
bit generator; per-term streams are derived with ``SeedSequence(seed,
spawn_key=(term_index,))`` so each term can be drawn independently.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels
from .pauli import WeightedPauliSum
from .statevector import GateOp, H, Sdg, StateVector, apply


@dataclass(frozen=True)
class MeasurementSetting:
    bases: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bases", tuple(self.bases))
        if not self.bases:
            raise ValueError("empty measurement setting")

    @classmethod
    def from_string(cls, s: str) -> "MeasurementSetting":
        return cls(tuple(s))

    def __str__(self) -> str:
        return "".join(self.bases)


@dataclass(frozen=True)
class CountsTable:
    counts: Mapping[str, int]
    shots: int

    def __post_init__(self) -> None:
        clean = {b: int(c) for b, c in sorted(self.counts.items()) if c}
        if any(c < 0 for c in clean.values()):
            raise ValueError("negative count")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if sum(clean.values()) != self.shots:
            raise ValueError(f"counts sum to {sum(clean.values())}, expected {self.shots}")
        lengths = {len(b) for b in clean}
        if len(lengths) > 1:
            raise ValueError("bitstrings of mixed length")
        object.__setattr__(self, "counts", clean)

    @property
    def n(self) -> int:
        return len(next(iter(self.counts)))

    def frequencies(self) -> dict[str, float]:
        return {b: c / self.shots for b, c in self.counts.items()}

    def to_dict(self) -> dict:
        return {"shots": self.shots, "counts": dict(self.counts)}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: Mapping) -> "CountsTable":
        return cls(dict(d["counts"]), int(d["shots"]))

    @classmethod
    def from_json(cls, text: str) -> "CountsTable":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class EstimateResult:
    value: float
    per_term: Mapping[str, tuple[float, int]] = field(default_factory=dict)
    coefficients: Mapping[str, float] = field(default_factory=dict)

    @property
    def standard_error(self) -> float:
        """Plug-in SE from the per-term binomial variances."""
        var = 0.0
        for s, (e, shots) in self.per_term.items():
            var += self.coefficients[s] ** 2 * max(0.0, 1.0 - e * e) / shots
        return math.sqrt(var)


def bitstring_to_index(b: str) -> int:
    return int(b[::-1], 2)


def index_to_bitstring(k: int, n: int) -> str:
    return format(k, f"0{n}b")[::-1]


def compile_basis_rotations(setting: MeasurementSetting | str | Sequence[str]) -> list[GateOp]:
    """X -> H; Y -> S^dagger then H, qubit by qubit."""
    bases = setting.bases if isinstance(setting, MeasurementSetting) else tuple(setting)
    ops: list[GateOp] = []
    for q, b in enumerate(bases):
        if b == "X":
            ops.append(H(q))
        elif b == "Y":
            ops += [Sdg(q), H(q)]
        else:
            raise ValueError(f"unsupported measurement basis {b!r} on qubit {q}")
    return ops


def rotated_probabilities(state: StateVector, setting: MeasurementSetting | str) -> np.ndarray:
    st = state.copy()
    for op in compile_basis_rotations(setting):
        apply(st, op)
    return st.probabilities()


def _generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def term_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=(int(index),))


def sample_from_probabilities(probs: np.ndarray, n: int, shots: int, seed) -> CountsTable:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(np.asarray(probs, dtype=np.float64), 0.0, None)
    p = p / p.sum()
    draws = _generator(seed).multinomial(shots, p)
    nz = np.flatnonzero(draws)
    return CountsTable({index_to_bitstring(int(k), n): int(draws[k]) for k in nz}, shots)


def sample_counts(state: StateVector, shots: int, seed) -> CountsTable:
    """Multinomial Born-rule sample in the computational basis."""
    return sample_from_probabilities(state.probabilities(), state.n, shots, seed)


def parity_expectation(counts: CountsTable) -> float:
    """Mean of (-1)^(number of ones) over the recorded shots."""
    idx = np.array([bitstring_to_index(b) for b in counts.counts], dtype=np.int64)
    w = np.array(list(counts.counts.values()), dtype=np.float64)
    return float(np.dot(_kernels.parity_signs(idx), w) / counts.shots)


CountsHook = Callable[[CountsTable, int], CountsTable]


def estimate_operator(
    state: StateVector,
    op: WeightedPauliSum,
    shots_per_term: int,
    seed: int,
    *,
    counts_hook: CountsHook | None = None,
    probabilities: Callable[[str], np.ndarray] | None = None,
) -> EstimateResult:
    """Estimate <op> with one compiled measurement setting per Pauli term.

    ``counts_hook(counts, term_index)`` post-processes each term's counts (used
    for readout noise). ``probabilities(term)`` overrides the outcome
    distribution of a term's rotated circuit, e.g. a trajectory-averaged one.
    """
    if op.arity != state.n:
        raise ValueError(f"operator arity {op.arity} != state size {state.n}")
    for s in op.terms:
        if set(s) - {"X", "Y"}:
            raise ValueError(f"term {s!r} is outside the X/Y measurement scheme")
    per_term: dict[str, tuple[float, int]] = {}
    value = 0.0
    for t, (s, c) in enumerate(op.terms.items()):
        probs = probabilities(s) if probabilities is not None else rotated_probabilities(state, s)
        counts = sample_from_probabilities(probs, state.n, shots_per_term, term_seed(seed, t))
        if counts_hook is not None:
            counts = counts_hook(counts, t)
        e = parity_expectation(counts)
        per_term[s] = (e, shots_per_term)
        value += c * e
    return EstimateResult(value, per_term, dict(op.terms))
