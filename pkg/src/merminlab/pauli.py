"""Pauli strings and real-weighted sums of them.

A Pauli string is stored as a plain ``str`` over ``"IXYZ"``; position ``i``
acts on qubit ``i`` of a chain. Sums keep their terms in lexicographic order
(which is I < X < Y < Z) so serialization is byte-stable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping


class PauliAxis(str, Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"


_AXES = frozenset("IXYZ")


def check_string(s: str) -> str:
    if not s:
        raise ValueError("Pauli string must be nonempty")
    bad = set(s) - _AXES
    if bad:
        raise ValueError(f"invalid Pauli axes {sorted(bad)} in {s!r}")
    return s


def y_weight(s: str) -> int:
    """Number of Y factors in ``s``."""
    return check_string(s).count("Y")


def masks(s: str) -> tuple[int, int, int]:
    """(flip, sign, n_y) bitmasks for the statevector kernels.

    ``flip`` has bit i set where s[i] is X or Y, ``sign`` where s[i] is Y or Z.
    """
    flip = sign = 0
    for i, a in enumerate(s):
        if a in "XY":
            flip |= 1 << i
        if a in "YZ":
            sign |= 1 << i
    return flip, sign, s.count("Y")


@dataclass(frozen=True)
class WeightedPauliSum:
    """Immutable map PauliString -> real coefficient over a fixed arity."""

    arity: int
    terms: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError("arity must be >= 1")
        clean = {}
        for s, c in sorted(self.terms.items()):
            check_string(s)
            if len(s) != self.arity:
                raise ValueError(f"term {s!r} has length {len(s)}, expected {self.arity}")
            if c != 0:
                clean[s] = float(c)
        object.__setattr__(self, "terms", MappingProxyType(clean))

    @classmethod
    def single(cls, s: str, coeff: float = 1.0) -> "WeightedPauliSum":
        return cls(len(s), {s: coeff})

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedPauliSum):
            return NotImplemented
        return self.arity == other.arity and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.arity, tuple(self.terms.items())))

    def __add__(self, other: "WeightedPauliSum") -> "WeightedPauliSum":
        return add(self, other)

    def __sub__(self, other: "WeightedPauliSum") -> "WeightedPauliSum":
        return add(self, scale(other, -1.0))

    def __mul__(self, k: float) -> "WeightedPauliSum":
        return scale(self, k)

    __rmul__ = __mul__

    def __neg__(self) -> "WeightedPauliSum":
        return scale(self, -1.0)

    def coefficient(self, s: str) -> float:
        return self.terms.get(s, 0.0)

    def to_dict(self) -> dict:
        return {
            "arity": self.arity,
            "terms": [{"axes": s, "coeff": c} for s, c in self.terms.items()],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: Mapping) -> "WeightedPauliSum":
        terms: dict[str, float] = {}
        for t in d["terms"]:
            terms[t["axes"]] = terms.get(t["axes"], 0.0) + float(t["coeff"])
        return cls(int(d["arity"]), terms)

    @classmethod
    def from_json(cls, text: str) -> "WeightedPauliSum":
        return cls.from_dict(json.loads(text))


def append_factor(s: WeightedPauliSum, axis: PauliAxis | str, sign: int) -> WeightedPauliSum:
    """Tensor-extend every term by one trailing factor ``axis`` with coefficient ``sign``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = PauliAxis(axis).value
    return WeightedPauliSum(s.arity + 1, {t + a: sign * c for t, c in s.terms.items()})


def add(a: WeightedPauliSum, b: WeightedPauliSum) -> WeightedPauliSum:
    if a.arity != b.arity:
        raise ValueError(f"arity mismatch in sum: {a.arity} vs {b.arity}")
    out = dict(a.terms)
    for t, c in b.terms.items():
        out[t] = out.get(t, 0.0) + c
    return WeightedPauliSum(a.arity, out)


def scale(a: WeightedPauliSum, k: float) -> WeightedPauliSum:
    return WeightedPauliSum(a.arity, {t: k * c for t, c in a.terms.items()})


def total(sums: Iterable[WeightedPauliSum]) -> WeightedPauliSum:
    it = iter(sums)
    acc = next(it)
    for s in it:
        acc = add(acc, s)
    return acc
