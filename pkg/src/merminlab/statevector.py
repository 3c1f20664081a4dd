"""Dense statevector simulation of the GHZ-like preparation circuits.

Amplitudes are little-endian: qubit ``i`` is bit ``i`` of the basis index, so
for a 3-qubit state ``amps[0b110]`` is the amplitude of qubit0=0, qubit1=1,
qubit2=1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .pauli import WeightedPauliSum, masks

NORM_TOL = 1e-12
IMAG_TOL = 1e-10

_S2 = 1.0 / math.sqrt(2.0)
GATE_MATRICES = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}
SINGLE_QUBIT_GATES = frozenset(GATE_MATRICES) | {"u1"}
GATE_KINDS = SINGLE_QUBIT_GATES | {"cx"}


def u1_matrix(phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


@dataclass(frozen=True)
class GateOp:
    """One gate. ``g`` is a lowercase kind (h, x, y, z, s, sdg, u1, cx)."""

    g: str
    q: tuple[int, ...]
    phi: float | None = None

    def __post_init__(self) -> None:
        g = self.g.lower()
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "q", tuple(int(i) for i in self.q))
        if g not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.g!r}")
        want = 2 if g == "cx" else 1
        if len(self.q) != want:
            raise ValueError(f"{g} takes {want} qubit index(es), got {self.q}")
        if g == "cx" and self.q[0] == self.q[1]:
            raise ValueError("CNOT control and target must differ")
        if g == "u1" and self.phi is None:
            raise ValueError("u1 needs an angle")
        if any(i < 0 for i in self.q):
            raise ValueError("negative qubit index")

    def matrix(self) -> np.ndarray:
        if self.g == "u1":
            return u1_matrix(self.phi)
        return GATE_MATRICES[self.g]

    def to_dict(self) -> dict:
        d: dict = {"g": self.g, "q": list(self.q)}
        if self.phi is not None:
            d["phi"] = self.phi
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GateOp":
        return cls(d["g"], tuple(d["q"]), d.get("phi"))


def H(q: int) -> GateOp:
    return GateOp("h", (q,))


def Sdg(q: int) -> GateOp:
    return GateOp("sdg", (q,))


def U1(q: int, phi: float) -> GateOp:
    return GateOp("u1", (q,), float(phi))


def CNOT(control: int, target: int) -> GateOp:
    return GateOp("cx", (control, target))


@dataclass(frozen=True)
class Circuit:
    n: int
    ops: tuple[GateOp, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        if self.n < 1:
            raise ValueError("circuit needs at least one qubit")
        for op in self.ops:
            if max(op.q) >= self.n:
                raise ValueError(f"gate {op} out of range for n={self.n}")

    def __len__(self) -> int:
        return len(self.ops)

    def then(self, ops: Iterable[GateOp]) -> "Circuit":
        return Circuit(self.n, self.ops + tuple(ops))

    def to_dict(self) -> dict:
        return {"n": self.n, "ops": [op.to_dict() for op in self.ops]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        return cls(int(d["n"]), tuple(GateOp.from_dict(o) for o in d["ops"]))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


class StateVector:
    """Mutable dense state of ``n`` qubits; owned by a single simulation."""

    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps: np.ndarray | None = None, *, check: bool = True):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        if amps is None:
            amps = np.zeros(1 << n, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.array(amps, dtype=np.complex128).reshape(-1)
            if amps.size != 1 << n:
                raise ValueError(f"expected {1 << n} amplitudes, got {amps.size}")
        self.amps = amps
        if check and abs(self.norm() - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (norm^2 = {self.norm()!r})")

    @classmethod
    def zeros(cls, n: int) -> "StateVector":
        return cls(n)

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy(), check=False)

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amps) ** 2
        return p / p.sum()

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)

    def __repr__(self) -> str:
        return f"StateVector(n={self.n})"


def apply(state: StateVector, op: GateOp, *, backend: str | None = None) -> StateVector:
    """Apply ``op`` to ``state`` in place and return it."""
    if max(op.q) >= state.n:
        raise IndexError(f"gate {op.g} on qubits {op.q} out of range for n={state.n}")
    if op.g == "cx":
        _kernels.apply_cnot(state.amps, op.q[0], op.q[1], backend=backend)
    else:
        _kernels.apply_1q(state.amps, op.q[0], op.matrix(), backend=backend)
    return state


def run(circuit: Circuit, state: StateVector | None = None, *, backend: str | None = None) -> StateVector:
    """Run ``circuit`` on a copy of ``state`` (default |0...0>)."""
    st = StateVector(circuit.n) if state is None else state.copy()
    if st.n != circuit.n:
        raise ValueError("state/circuit qubit count mismatch")
    for op in circuit.ops:
        apply(st, op, backend=backend)
    return st


def build_ghz_circuit(n: int, phi: float) -> Circuit:
    """H on qubit 0, CNOT ladder 0->1->...->n-1, then U1(phi) on qubit 0."""
    if n < 2:
        raise ValueError("GHZ-like circuit needs n >= 2")
    ops = [H(0)]
    ops += [CNOT(i, i + 1) for i in range(n - 1)]
    ops.append(U1(0, phi))
    return Circuit(n, ops)


def ghz_like_state(n: int, phi: float) -> StateVector:
    """(|0...0> + e^{i phi}|1...1>)/sqrt(2), built directly."""
    return prepare_theta_state(n, math.pi / 4, phi)


def prepare_theta_state(n: int, theta: float, phi: float) -> StateVector:
    """sin(theta)|0...0> + cos(theta) e^{i phi}|1...1>."""
    if n < 2:
        raise ValueError("n must be >= 2")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = math.sin(theta)
    amps[-1] = math.cos(theta) * np.exp(1j * phi)
    return StateVector(n, amps)


def expectation_complex(state: StateVector, op: WeightedPauliSum, *, backend: str | None = None) -> complex:
    if op.arity != state.n:
        raise ValueError(f"operator arity {op.arity} != state size {state.n}")
    acc = 0j
    for s, c in op.terms.items():
        flip, sign, n_y = masks(s)
        acc += c * _kernels.pauli_expect(state.amps, flip, sign, n_y, backend=backend)
    return acc


def expectation_exact(state: StateVector, op: WeightedPauliSum, *, backend: str | None = None) -> float:
    """<psi|op|psi>; raises if the imaginary part exceeds IMAG_TOL."""
    val = expectation_complex(state, op, backend=backend)
    if abs(val.imag) > IMAG_TOL:
        raise ArithmeticError(f"non-Hermitian expectation: imaginary part {val.imag!r}")
    return float(val.real)


def pauli_expectations(state: StateVector, strings: Sequence[str], *, backend: str | None = None) -> np.ndarray:
    """Real expectation of each Pauli string (no coefficients)."""
    out = np.empty(len(strings))
    for k, s in enumerate(strings):
        flip, sign, n_y = masks(s)
        out[k] = _kernels.pauli_expect(state.amps, flip, sign, n_y, backend=backend).real
    return out
