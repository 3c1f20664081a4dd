"""Coupling graphs, qubit chains and the shipped reference tables."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

SB_ROW_COUNTS = {2: 58, 3: 75, 4: 38, 5: 52, 6: 55, 7: 29}


class TopologyError(ValueError):
    pass


class CouplingGraph:
    """Simple undirected graph over integer qubit ids."""

    def __init__(self, edges: Iterable[tuple[int, int]], vertices: Iterable[int] = ()):
        self._adj: dict[int, set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            if u == v:
                raise TopologyError(f"self-loop on qubit {u}")
            if v in self._adj.get(u, ()):
                raise TopologyError(f"duplicate edge ({u}, {v})")
            self._adj.setdefault(u, set()).add(v)
            self._adj.setdefault(v, set()).add(u)

    @property
    def vertices(self) -> list[int]:
        return sorted(self._adj)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self._adj for v in self._adj[u] if u < v)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self._adj.get(v, ()))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def is_path(self, qubits: Sequence[int]) -> bool:
        return (
            len(qubits) >= 2
            and len(set(qubits)) == len(qubits)
            and all(self.has_edge(a, b) for a, b in zip(qubits, qubits[1:]))
        )

    def __contains__(self, v: int) -> bool:
        return v in self._adj


@dataclass(frozen=True)
class Chain:
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) < 2:
            raise ValueError("a chain needs at least two qubits")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"repeated qubit in chain {self.qubits}")

    def __len__(self) -> int:
        return len(self.qubits)

    def canonical(self) -> "Chain":
        """Orientation whose first element is the smaller end."""
        q = self.qubits
        return self if q[0] <= q[-1] else Chain(q[::-1])

    def label(self) -> str:
        return "-".join(map(str, self.qubits))

    @classmethod
    def parse(cls, text: str) -> "Chain":
        text = text.strip().strip("[]")
        parts = text.replace(",", "-").replace(" ", "").split("-")
        return cls(tuple(int(p) for p in parts if p))


def parse_edge_list(text: str) -> CouplingGraph:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TopologyError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise TopologyError(f"line {lineno}: non-integer qubit id in {raw!r}") from exc
        edges.append((u, v))
    return CouplingGraph(edges)


def _data_text(name: str) -> str:
    return resources.files("merminlab.data").joinpath(name).read_text()


def load_topology(source: str | Path | None = None) -> CouplingGraph:
    """Load an edge-list file; ``None`` loads the bundled Rochester graph."""
    if source is None:
        return parse_edge_list(_data_text("rochester_edges.txt"))
    return parse_edge_list(Path(source).read_text())


def enumerate_chains(graph: CouplingGraph, length: int) -> list[Chain]:
    """All simple paths with ``length`` vertices, one orientation each."""
    if length < 2:
        raise ValueError("chain length must be >= 2")
    found: list[tuple[int, ...]] = []

    def extend(path: list[int], seen: set[int]) -> None:
        if len(path) == length:
            if path[0] < path[-1]:
                found.append(tuple(path))
            return
        for w in graph.neighbors(path[-1]):
            if w not in seen:
                path.append(w)
                seen.add(w)
                extend(path, seen)
                seen.discard(w)
                path.pop()

    for v in graph.vertices:
        extend([v], {v})
    return [Chain(p) for p in sorted(found)]


def extend_violating_chains(
    prior: Sequence[tuple[Chain | Sequence[int], float]],
    graph: CouplingGraph,
    threshold: float = 1.0,
) -> list[Chain]:
    """Grow every chain whose normalized value exceeds ``threshold`` by one
    neighboring qubit at either end."""
    out: set[tuple[int, ...]] = set()
    for chain, value in prior:
        q = chain.qubits if isinstance(chain, Chain) else tuple(chain)
        if not graph.is_path(q):
            raise TopologyError(f"chain {list(q)} is not a path in the graph")
        if not value > threshold:
            continue
        for w in graph.neighbors(q[-1]):
            if w not in q:
                out.add(Chain(q + (w,)).canonical().qubits)
        for w in graph.neighbors(q[0]):
            if w not in q:
                out.add(Chain((w,) + q).canonical().qubits)
    return [Chain(p) for p in sorted(out)]


@dataclass(frozen=True)
class ReferenceRow:
    no: int
    chain: Chain
    m_mean: float
    m_prime_mean: float
    m_sigma: float
    m_prime_sigma: float

    def __post_init__(self) -> None:
        if self.m_sigma < 0 or self.m_prime_sigma < 0:
            raise ValueError(f"row {self.no}: negative sigma")


REFERENCE_HEADER = ["no", "qubits", "m_mean", "mp_mean", "m_sigma", "mp_sigma"]


def parse_reference_table(text: str) -> list[ReferenceRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != REFERENCE_HEADER:
        raise ValueError(f"bad reference header {reader.fieldnames}")
    rows = []
    for rec in reader:
        try:
            rows.append(
                ReferenceRow(
                    no=int(rec["no"]),
                    chain=Chain.parse(rec["qubits"]),
                    m_mean=float(rec["m_mean"]),
                    m_prime_mean=float(rec["mp_mean"]),
                    m_sigma=float(rec["m_sigma"]),
                    m_prime_sigma=float(rec["mp_sigma"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed reference row {rec}: {exc}") from exc
    return rows


def load_reference_table(source: str | Path | None = None, n: int | None = None) -> list[ReferenceRow]:
    """Load a reference table; with ``source=None`` the bundled one for ``n``.

    Values are raw <M>, <M'> means and population sigmas over five repeats of
    1024 shots on the device; they are not normalized.
    """
    if source is None:
        if n not in SB_ROW_COUNTS:
            raise ValueError(f"no bundled reference table for n={n}")
        text = _data_text(f"sb_{n}qubit.csv")
    else:
        text = Path(source).read_text()
    rows = parse_reference_table(text)
    if n is not None and any(len(r.chain) != n for r in rows):
        raise ValueError(f"reference table contains chains not of length {n}")
    return rows


def check_reference_paths(graph: CouplingGraph, rows: Sequence[ReferenceRow]) -> list[ReferenceRow]:
    """Rows whose qubit list is not a simple path in ``graph``."""
    return [r for r in rows if not graph.is_path(r.chain.qubits)]
