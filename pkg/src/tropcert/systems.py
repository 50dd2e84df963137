"""Power-law dynamical systems with bounded time-varying rates.

A system is a finite sum  dx/dt = sum_ij kappa_ij(t) * x^{s_i} * v_ij  where
the sources ``s_i`` and reaction vectors ``v_ij`` are exact rational plane
vectors, ``x^s = x1^{s1} * x2^{s2}``, and every rate ``kappa_ij(t)`` stays in
the band ``[epsilon, 1/epsilon]``.  Systems can be given directly or be
generated from a directed graph whose nodes carry distinct plane points:
each edge contributes the term with source = source-node label and reaction
vector = target label minus source label.

Documents are JSON with rationals encoded as integers or ``"p/q"`` strings,
so parsing and emission round-trip bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence, Union

from .geometry import RatVec2

Rational = Union[int, Fraction]


class DocumentError(ValueError):
    """Raised for malformed or inconsistent input documents."""


def parse_rational(value: Any) -> Fraction:
    """Exact rational from an int or a 'p/q' string."""
    if isinstance(value, bool):
        raise DocumentError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise DocumentError(f"not a rational: {value!r}") from e
    raise DocumentError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> Union[int, str]:
    """Inverse of :func:`parse_rational`: int when integral, else 'p/q'."""
    q = Fraction(q)
    if q.denominator == 1:
        return int(q)
    return f"{q.numerator}/{q.denominator}"


def _parse_vec(value: Any) -> RatVec2:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise DocumentError(f"not a 2-vector: {value!r}")
    return RatVec2(parse_rational(value[0]), parse_rational(value[1]))


def _format_vec(v: RatVec2) -> list:
    return [format_rational(v.x1), format_rational(v.x2)]


@dataclass(frozen=True)
class EEGraph:
    """Directed graph with distinct plane points as node labels."""

    nodes: tuple[tuple[str, RatVec2], ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        ids = [i for i, _ in self.nodes]
        if len(set(ids)) != len(ids):
            raise DocumentError("duplicate node ids")
        labels = [(v.x1, v.x2) for _, v in self.nodes]
        if len(set(labels)) != len(labels):
            raise DocumentError("node labels must be distinct points")
        by_id = dict(self.nodes)
        for a, b in self.edges:
            if a not in by_id or b not in by_id:
                raise DocumentError(f"edge references unknown node: {(a, b)}")
            if a == b:
                raise DocumentError(f"self-loop has zero reaction vector: {a}")

    def label(self, node_id: str) -> RatVec2:
        return dict(self.nodes)[node_id]

    def reaction_vector(self, edge: tuple[str, str]) -> RatVec2:
        return self.label(edge[1]) - self.label(edge[0])


@dataclass(frozen=True)
class VkSystem:
    """Grouped power-law system: one term per distinct source."""

    terms: tuple[tuple[RatVec2, tuple[RatVec2, ...]], ...]
    epsilon: Fraction

    def __post_init__(self) -> None:
        if not (0 < self.epsilon <= 1):
            raise DocumentError("epsilon must lie in (0, 1]")
        if not self.terms:
            raise DocumentError("system must have at least one term")
        srcs = [(s.x1, s.x2) for s, _ in self.terms]
        if len(set(srcs)) != len(srcs):
            raise DocumentError("sources must be distinct after grouping")
        for s, rs in self.terms:
            if not rs:
                raise DocumentError(f"empty reaction list for source {s}")
            for v in rs:
                if v.is_zero():
                    raise DocumentError(f"zero reaction vector at source {s}")

    @property
    def sources(self) -> list[RatVec2]:
        return [s for s, _ in self.terms]

    @property
    def n_reactions(self) -> int:
        return sum(len(rs) for _, rs in self.terms)

    def reaction_list(self) -> list[tuple[RatVec2, RatVec2]]:
        """Flat (source, reaction vector) pairs in document order."""
        return [(s, v) for s, rs in self.terms for v in rs]


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


def parse_system(document: Union[str, dict]) -> Union[VkSystem, EEGraph]:
    """Parse a system or graph document (JSON text or an already-loaded dict)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise DocumentError(f"invalid JSON: {e}") from e
    if not isinstance(document, dict):
        raise DocumentError("document must be an object")
    kind = document.get("type")
    if kind == "system":
        eps = parse_rational(document.get("epsilon", 1))
        terms_doc = document.get("terms")
        if not isinstance(terms_doc, list) or not terms_doc:
            raise DocumentError("'terms' must be a nonempty list")
        terms = []
        for t in terms_doc:
            if not isinstance(t, dict):
                raise DocumentError("each term must be an object")
            src = _parse_vec(t.get("source"))
            rs = t.get("reactions")
            if not isinstance(rs, list) or not rs:
                raise DocumentError("'reactions' must be a nonempty list")
            terms.append((src, tuple(_parse_vec(r) for r in rs)))
        return VkSystem(tuple(terms), eps)
    if kind == "graph":
        nodes_doc = document.get("nodes")
        edges_doc = document.get("edges")
        if not isinstance(nodes_doc, list) or not isinstance(edges_doc, list):
            raise DocumentError("'nodes' and 'edges' must be lists")
        nodes = []
        for nd in nodes_doc:
            if not isinstance(nd, dict) or "id" not in nd:
                raise DocumentError("each node needs an 'id' and a 'label'")
            nodes.append((str(nd["id"]), _parse_vec(nd.get("label"))))
        edges = []
        for e in edges_doc:
            if not isinstance(e, (list, tuple)) or len(e) != 2:
                raise DocumentError(f"bad edge: {e!r}")
            edges.append((str(e[0]), str(e[1])))
        return EEGraph(tuple(nodes), tuple(edges))
    raise DocumentError("'type' must be 'system' or 'graph'")


def emit_system(obj: Union[VkSystem, EEGraph]) -> dict:
    """Document for a system or graph; bit-exact round-trip with parse."""
    if isinstance(obj, VkSystem):
        return {
            "type": "system",
            "epsilon": format_rational(obj.epsilon),
            "terms": [
                {"source": _format_vec(s), "reactions": [_format_vec(v) for v in rs]}
                for s, rs in obj.terms
            ],
        }
    return {
        "type": "graph",
        "nodes": [{"id": i, "label": _format_vec(v)} for i, v in obj.nodes],
        "edges": [[a, b] for a, b in obj.edges],
    }


def graph_to_system(g: EEGraph, epsilon: Rational) -> VkSystem:
    """Group the graph's edges by source label into a system.

    Parallel edges with identical reaction vectors are deduplicated.
    """
    grouped: dict[tuple, tuple[RatVec2, list[RatVec2]]] = {}
    order: list[tuple] = []
    for e in g.edges:
        s = g.label(e[0])
        v = g.reaction_vector(e)
        key = (s.x1, s.x2)
        if key not in grouped:
            grouped[key] = (s, [])
            order.append(key)
        if all(w != v for w in grouped[key][1]):
            grouped[key][1].append(v)
    terms = tuple((grouped[k][0], tuple(grouped[k][1])) for k in order)
    return VkSystem(terms, Fraction(epsilon))


def weakly_reversible(g: EEGraph) -> bool:
    """True iff every edge's endpoints share a strongly connected component."""
    ids = [i for i, _ in g.nodes]
    index = {i: k for k, i in enumerate(ids)}
    n = len(ids)
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in g.edges:
        adj[index[a]].append(index[b])

    # Tarjan's algorithm, iterative
    comp = [-1] * n
    low = [0] * n
    num = [-1] * n
    counter = 0
    ncomp = 0
    stack: list[int] = []
    on_stack = [False] * n
    for root in range(n):
        if num[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                num[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for i in range(pi, len(adj[v])):
                w = adj[v][i]
                if num[w] == -1:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], num[w])
            if advanced:
                continue
            work.pop()
            if low[v] == num[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])

    return all(comp[index[a]] == comp[index[b]] for a, b in g.edges)


def velocity(
    sys: VkSystem,
    x: tuple[float, float],
    kappas: Sequence[float],
) -> tuple[float, float]:
    """dx/dt at ``x`` for the given per-reaction rates, evaluated in floats.

    ``kappas`` follows the flat document order of :meth:`VkSystem.reaction_list`
    and every value must lie in ``[epsilon, 1/epsilon]``.
    """
    if x[0] <= 0 or x[1] <= 0:
        raise ValueError("x must be strictly positive")
    pairs = sys.reaction_list()
    if len(kappas) != len(pairs):
        raise ValueError(f"need {len(pairs)} rates, got {len(kappas)}")
    lo, hi = float(sys.epsilon), 1.0 / float(sys.epsilon)
    tol = 1e-12
    for k in kappas:
        if not (lo - tol <= k <= hi + tol):
            raise ValueError(f"rate {k} outside [{lo}, {hi}]")
    lx1, lx2 = math.log(x[0]), math.log(x[1])
    out1 = out2 = 0.0
    for (s, v), k in zip(pairs, kappas):
        mono = math.exp(float(s.x1) * lx1 + float(s.x2) * lx2)
        out1 += k * mono * float(v.x1)
        out2 += k * mono * float(v.x2)
    return (out1, out2)


# ---------------------------------------------------------------------------
# Built-in example systems
# ---------------------------------------------------------------------------


def lotka_volterra_variant(eps1: Rational, eps2: Rational, epsilon: Rational) -> VkSystem:
    """The competing-species variant with cross terms eps1, eps2:

        dx/dt = kappa_1 x (1, eps1) + kappa_2 xy (-1, 1) + kappa_3 y (eps2, -1)

    eps1 = eps2 = 0 recovers the classical oscillating predator-prey system.
    """
    e1, e2 = Fraction(eps1), Fraction(eps2)
    terms = (
        (RatVec2(1, 0), (RatVec2(1, e1),)),
        (RatVec2(1, 1), (RatVec2(-1, 1),)),
        (RatVec2(0, 1), (RatVec2(e2, -1),)),
    )
    return VkSystem(terms, Fraction(epsilon))


def five_source_network(epsilon: Rational = Fraction(1, 2)) -> VkSystem:
    """A five-source network whose hull normal fan certifies permanence."""
    data = [
        ((0, 1), [(2, 1)]),
        ((1, 2), [(2, 1)]),
        ((1, 0), [(0, 1)]),
        ((1, 1), [(-1, -1)]),
        ((2, 2), [(-1, -1)]),
    ]
    terms = tuple(
        (RatVec2(*s), tuple(RatVec2(*v) for v in vs)) for s, vs in data
    )
    return VkSystem(terms, Fraction(epsilon))
