"""Mermin polynomials: recursive and closed-form constructions, analytic
expectations on GHZ-like states, local-realist bounds and a brute-force
local-hidden-variable maximizer.

Two constructions are kept side by side. ``build_recursive`` expands

    M_n  = M_{n-1}(X + Y) + M'_{n-1}(X - Y)
    M'_n = M_{n-1}(Y - X) + M'_{n-1}(X + Y)

literally from M_1 = X, M'_1 = Y. ``canonical_operator`` instead assigns every
X/Y string with j Y-factors the coefficient ``F_TABLE[j % 4][n % 8]``; all the
closed-form expectation values and local-realist bounds refer to this
canonical normalization. The literal recursion equals ``k_n`` times the
canonical operator, with ``k_n = 2**((n - 1) // 2)`` for the sizes checked.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .pauli import WeightedPauliSum, add, append_factor, masks

# F_TABLE[r][s] with s = n mod 8 and r = j mod 4 (j = number of Y factors)
F_TABLE: tuple[tuple[int, ...], ...] = (
    (1, 1, 1, 0, -1, -1, -1, 0),
    (-1, 0, 1, 1, 1, 0, -1, -1),
    (-1, -1, -1, 0, 1, 1, 1, 0),
    (1, 0, -1, -1, -1, 0, 1, 1),
)

LHV_MAX_QUBITS = 6


class TableInconsistencyError(RuntimeError):
    """The literal recursion is not a positive multiple of the f-table expansion."""


def f_coefficient(n: int, j: int, table=F_TABLE) -> int:
    return table[j % 4][n % 8]


@dataclass(frozen=True)
class MerminPair:
    m: WeightedPauliSum
    m_prime: WeightedPauliSum
    n: int
    scale_factor: float = 1.0  # literal recursion / this pair

    def __post_init__(self) -> None:
        if self.m.arity != self.n or self.m_prime.arity != self.n:
            raise ValueError("operator arity does not match n")
        for op in (self.m, self.m_prime):
            for s in op.terms:
                if set(s) - {"X", "Y"}:
                    raise ValueError(f"Mermin term {s!r} contains axes other than X/Y")


@dataclass(frozen=True)
class AnalyticSpec:
    n: int
    phi: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")

    @property
    def parity(self) -> str:
        return "even" if self.n % 2 == 0 else "odd"


def _step(m: WeightedPauliSum, mp: WeightedPauliSum) -> tuple[WeightedPauliSum, WeightedPauliSum]:
    m_next = add(
        add(append_factor(m, "X", 1), append_factor(m, "Y", 1)),
        add(append_factor(mp, "X", 1), append_factor(mp, "Y", -1)),
    )
    mp_next = add(
        add(append_factor(m, "Y", 1), append_factor(m, "X", -1)),
        add(append_factor(mp, "X", 1), append_factor(mp, "Y", 1)),
    )
    return m_next, mp_next


def build_recursive(n: int) -> MerminPair:
    """Literal expansion of the recursion, no rescaling."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = WeightedPauliSum.single("X")
    mp = WeightedPauliSum.single("Y")
    for _ in range(n - 1):
        m, mp = _step(m, mp)
    return MerminPair(m, mp, n)


def f_expansion(n: int, table=F_TABLE) -> WeightedPauliSum:
    """Sum over all X/Y strings of f(n, y-count) times the string."""
    terms = {}
    for axes in itertools.product("XY", repeat=n):
        s = "".join(axes)
        terms[s] = f_coefficient(n, s.count("Y"), table)
    return WeightedPauliSum(n, terms)


def recursion_scale(n: int, table=F_TABLE) -> Fraction:
    """k_n such that build_recursive(n).m == k_n * f_expansion(n).

    Raises TableInconsistencyError when no single positive ratio exists.
    """
    rec = build_recursive(n).m
    ref = f_expansion(n, table)
    if set(rec.terms) != set(ref.terms):
        raise TableInconsistencyError(
            f"n={n}: recursion and f-table disagree on which strings appear"
        )
    ratios = {Fraction(rec.terms[s]) / Fraction(ref.terms[s]) for s in ref.terms}
    if len(ratios) != 1:
        raise TableInconsistencyError(f"n={n}: term ratios not constant: {sorted(ratios)}")
    (k,) = ratios
    if k <= 0:
        raise TableInconsistencyError(f"n={n}: nonpositive scale {k}")
    return k


def canonical_operator(n: int, table=F_TABLE) -> MerminPair:
    """The f-table normalized pair (M_n, M'_n)."""
    if n < 2:
        raise ValueError("canonical operator defined for n >= 2")
    k = recursion_scale(n, table)
    rec = build_recursive(n)
    inv = 1.0 / float(k)
    m = WeightedPauliSum(n, {s: c * inv for s, c in rec.m.terms.items()})
    mp = WeightedPauliSum(n, {s: c * inv for s, c in rec.m_prime.terms.items()})
    return MerminPair(m, mp, n, scale_factor=float(k))


def amplitude(n: int) -> float:
    """Peak of <M_n> on GHZ-like states: 2^(n-1/2) (even n) or 2^(n-1) (odd n)."""
    return 2.0 ** (n - 0.5) if n % 2 == 0 else 2.0 ** (n - 1)


def analytic_expectation(spec: AnalyticSpec) -> tuple[float, float]:
    """(<M_n>, <M'_n>) of the canonical pair on the GHZ-like state at phase phi."""
    arg = spec.phi - (spec.n - 1) * math.pi / 4
    a = amplitude(spec.n)
    return a * math.cos(arg), a * math.sin(arg)


def lr_bound(n: int) -> float:
    if n < 2:
        raise ValueError("n must be >= 2")
    return 2.0 ** (n // 2)


def normalize(value: float, n: int) -> float:
    return value / lr_bound(n)


def phi_max(n: int) -> float:
    if n < 2:
        raise ValueError("n must be >= 2")
    return ((n - 1) * math.pi / 4) % (2 * math.pi)


def quantum_max_normalized(n: int) -> float:
    """2^((n-1)/2): the best normalized value a GHZ-like state reaches."""
    return 2.0 ** ((n - 1) / 2)


def lhv_max_bruteforce(
    pair: MerminPair | WeightedPauliSum,
    *,
    max_qubits: int = LHV_MAX_QUBITS,
    backend: str | None = None,
) -> float:
    """Exact max of M_n over deterministic assignments a_i, a'_i in {-1, +1}.

    X at position i evaluates to a_i and Y to a'_i.
    """
    op = pair.m if isinstance(pair, MerminPair) else pair
    n = op.arity
    if n > max_qubits:
        raise ValueError(f"refusing brute force over 4^{n} assignments (limit n <= {max_qubits})")
    if any(set(s) - {"X", "Y"} for s in op.terms):
        raise ValueError("brute force supports X/Y-only operators")
    if not op.terms:
        return 0.0
    ymasks = np.array([masks(s)[1] for s in op.terms], dtype=np.int64)
    coeffs = np.array(list(op.terms.values()), dtype=np.float64)
    return _kernels.lhv_max(n, ymasks, coeffs, backend=backend)
