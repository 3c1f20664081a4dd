"""Noise models layered on the ideal GHZ-like preparation.

Three independent knobs, all off by default:

* ``theta``: amplitude imbalance sin(theta)|0..0> + cos(theta)e^{i phi}|1..1>
  substituted for the balanced preparation (not a channel).
* ``depol_p``: after every CNOT, each of its two qubits independently receives
  a uniformly random X, Y or Z with probability ``depol_p`` (Pauli trajectory
  unravelling of a depolarizing channel).
* ``readout_eps``: every recorded bit flips independently with this probability.

These are emulation choices for qualitative NISQ degradation, not a
calibrated device model.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .measurement import CountsTable, bitstring_to_index, compile_basis_rotations, index_to_bitstring
from .pauli import WeightedPauliSum
from .statevector import Circuit, GateOp, StateVector, build_ghz_circuit, pauli_expectations, run

_PAULI_KINDS = ("x", "y", "z")


@dataclass(frozen=True)
class NoiseSpec:
    theta: float | None = None
    depol_p: float = 0.0
    readout_eps: float = 0.0

    def __post_init__(self) -> None:
        for name in ("depol_p", "readout_eps"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.theta is not None and not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")

    @property
    def is_noiseless(self) -> bool:
        return self.depol_p == 0.0 and self.readout_eps == 0.0 and (
            self.theta is None or self.theta == math.pi / 4
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> "NoiseSpec":
        d = d or {}
        theta = d.get("theta")
        return cls(
            theta=None if theta is None else float(theta),
            depol_p=float(d.get("depol_p", 0.0)),
            readout_eps=float(d.get("readout_eps", 0.0)),
        )

    @classmethod
    def from_json_file(cls, path: str | Path) -> "NoiseSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


def theta_radius(theta: float) -> float:
    """Radius of (<M_2>, <M'_2>) for the theta-imbalanced 2-qubit state."""
    return 2.0 * math.sqrt(2.0) * math.sin(2.0 * theta)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def apply_readout_flip(counts: CountsTable, eps: float, seed) -> CountsTable:
    """Flip each recorded bit independently with probability ``eps``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    if eps == 0.0:
        return counts
    n = counts.n
    outcomes = np.repeat(
        np.array([bitstring_to_index(b) for b in counts.counts], dtype=np.int64),
        np.array(list(counts.counts.values()), dtype=np.int64),
    )
    flips = _rng(seed).random((outcomes.size, n)) < eps
    masks = flips.astype(np.int64) @ (np.int64(1) << np.arange(n, dtype=np.int64))
    noisy = np.bincount(outcomes ^ masks, minlength=1 << n)
    nz = np.flatnonzero(noisy)
    return CountsTable({index_to_bitstring(int(k), n): int(noisy[k]) for k in nz}, counts.shots)


def readout_attenuation(term: str, eps: float) -> float:
    """Exact shrink factor of a Pauli-term parity under symmetric bit flips."""
    weight = sum(1 for a in term if a != "I")
    return (1.0 - 2.0 * eps) ** weight


def apply_depolarizing_trajectory(circuit: Circuit, p: float, seed) -> Circuit:
    """Sample one Pauli trajectory: after each CNOT, each touched qubit gets a
    random X/Y/Z with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p == 0.0:
        return circuit
    rng = _rng(seed)
    ops: list[GateOp] = []
    for op in circuit.ops:
        ops.append(op)
        if op.g != "cx":
            continue
        for q in op.q:
            if rng.random() < p:
                ops.append(GateOp(_PAULI_KINDS[int(rng.integers(3))], (q,)))
    return Circuit(circuit.n, ops)


def _initial_state(n: int, theta: float | None) -> tuple[StateVector | None, int]:
    """Start state and how many leading circuit ops it replaces."""
    if theta is None or theta == math.pi / 4:
        return None, 0
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = math.sin(theta)
    amps[1] = math.cos(theta)  # qubit 0 in |1>
    return StateVector(n, amps), 1


def prepare_state(n: int, phi: float, noise: NoiseSpec | None = None, seed=0) -> StateVector:
    """One noisy realization of the GHZ-like preparation circuit.

    With ``theta`` set, the leading Hadamard on qubit 0 is replaced by the
    imbalanced single-qubit state, so the noiseless output is
    sin(theta)|0..0> + cos(theta)e^{i phi}|1..1>.
    """
    noise = noise or NoiseSpec()
    circuit = build_ghz_circuit(n, phi)
    start, skip = _initial_state(n, noise.theta)
    body = Circuit(n, circuit.ops[skip:])
    body = apply_depolarizing_trajectory(body, noise.depol_p, seed)
    return run(body, start)


def trajectory_seeds(seed, count: int) -> list[np.random.SeedSequence]:
    base = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    return base.spawn(count)


@dataclass(frozen=True)
class Ensemble:
    """Distinct trajectory states (rows of ``amps``) with their sample weights."""

    n: int
    amps: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.weights.size


def trajectory_ensemble(n: int, phi: float, noise: NoiseSpec, trajectories: int, seed) -> Ensemble:
    """Sample ``trajectories`` noisy circuits; identical ones are merged."""
    noise = noise or NoiseSpec()
    circuit = build_ghz_circuit(n, phi)
    start, skip = _initial_state(n, noise.theta)
    body = Circuit(n, circuit.ops[skip:])
    if noise.depol_p == 0.0:
        variants = {body: 1}
    else:
        variants: dict[Circuit, int] = {}
        for s in trajectory_seeds(seed, trajectories):
            c = apply_depolarizing_trajectory(body, noise.depol_p, s)
            variants[c] = variants.get(c, 0) + 1
    amps = np.stack([run(c, start).amps for c in variants])
    w = np.array(list(variants.values()), dtype=np.float64)
    return Ensemble(n, amps, w / w.sum())


def trajectory_expectation(
    n: int,
    phi: float,
    ops: Sequence[WeightedPauliSum],
    noise: NoiseSpec,
    trajectories: int = 100,
    seed=0,
) -> list[float]:
    """Channel-averaged exact expectations of ``ops`` (no shot noise).

    Readout error enters through its exact per-term attenuation.
    """
    ens = trajectory_ensemble(n, phi, noise, trajectories, seed)
    states = [StateVector(n, row, check=False) for row in ens.amps]
    out = []
    for op in ops:
        strings = list(op.terms)
        coeffs = np.array([op.terms[s] for s in strings])
        att = np.array([readout_attenuation(s, noise.readout_eps) for s in strings])
        vals = np.array([pauli_expectations(st, strings) for st in states])  # (U, terms)
        out.append(float(ens.weights @ vals @ (coeffs * att)))
    return out


def mixture_probabilities(ens: Ensemble, term: str) -> np.ndarray:
    """Outcome distribution of ``term``'s rotated circuit over the ensemble."""
    amps = ens.amps.copy()
    for op in compile_basis_rotations(term):
        _kernels.apply_1q_batch(amps, op.q[0], op.matrix())
    return ens.weights @ (np.abs(amps) ** 2)
