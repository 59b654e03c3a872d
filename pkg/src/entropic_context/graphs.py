"""Commutation graphs and product-form joint distributions over them.

Vertices are integers ``0..N-1`` and every vertex is a binary variable
(1 means the projector clicked). Tables are numpy arrays of shape
``(2,) * k`` with axes in the stated vertex order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from .errors import InconsistentMarginalsError, StructureError, ValidationError
from . import quantum

MASS_TOL = 1e-9
CONSISTENCY_TOL = 1e-9

EMPTY = "empty"
TREE = "tree_or_forest"
CLIQUE_TREE = "clique_tree"
CHORDLESS_CYCLE = "contains_chordless_cycle"
GENERAL_CHORDAL = "general_chordal"


def _edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class CommutationGraph:
    vertex_count: int
    edges: frozenset = field(default_factory=frozenset)
    cliques: tuple = ()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValidationError("vertex_count must be non-negative")
        edges = set()
        for i, j in self.edges:
            if i == j:
                raise ValidationError(f"self-loop at vertex {i}")
            for v in (i, j):
                if not 0 <= v < self.vertex_count:
                    raise ValidationError(f"edge ({i}, {j}) references unknown vertex {v}")
            edges.add(_edge(int(i), int(j)))
        object.__setattr__(self, "edges", frozenset(edges))
        cliques = tuple(tuple(int(v) for v in c) for c in self.cliques)
        for c in cliques:
            if len(set(c)) != len(c) or any(not 0 <= v < self.vertex_count for v in c):
                raise ValidationError(f"invalid clique {c}")
            for i, j in itertools.combinations(c, 2):
                if _edge(i, j) not in edges:
                    raise ValidationError(f"clique {c} is missing edge ({i}, {j})")
        object.__setattr__(self, "cliques", cliques)

    @classmethod
    def cycle(cls, n: int) -> "CommutationGraph":
        return cls(n, frozenset(_edge(i, (i + 1) % n) for i in range(n)))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from(self.edges)
        return g

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)


@dataclass(frozen=True)
class GraphClass:
    kind: str
    witness: tuple[int, ...] | None = None

    @property
    def cycle_length(self) -> int | None:
        return len(self.witness) if self.witness is not None else None


def classify_graph(g: CommutationGraph) -> GraphClass:
    """Sort a commutation graph into the structures the constructions handle.

    ``general_chordal`` marks chordal graphs with multi-vertex separators
    (e.g. two triangles glued along an edge), which the single-separator
    clique-tree construction does not cover.
    """
    if not g.edges:
        return GraphClass(EMPTY)
    G = g.to_networkx()
    if nx.is_forest(G):
        return GraphClass(TREE)
    blocks = [b for b in nx.biconnected_components(G)]
    if all(_is_complete(G, b) for b in blocks):
        return GraphClass(CLIQUE_TREE)
    witness = _shortest_chordless_cycle(G)
    if witness is not None:
        return GraphClass(CHORDLESS_CYCLE, witness)
    return GraphClass(GENERAL_CHORDAL)


def _is_complete(G: nx.Graph, nodes) -> bool:
    nodes = list(nodes)
    return all(G.has_edge(u, v) for u, v in itertools.combinations(nodes, 2))


def _shortest_chordless_cycle(G: nx.Graph) -> tuple[int, ...] | None:
    best = None
    for cyc in nx.chordless_cycles(G):
        if len(cyc) >= 4 and (best is None or len(cyc) < len(best)):
            best = cyc
    if best is None:
        return None
    # rotate so the witness starts at its smallest vertex
    k = best.index(min(best))
    return tuple(best[k:] + best[:k])


def _check_table(table, k: int, what: str) -> np.ndarray:
    t = np.array(table, dtype=float)
    if t.shape != (2,) * k:
        raise ValidationError(f"{what}: expected shape {(2,) * k}, got {t.shape}")
    if not np.all(np.isfinite(t)) or t.min() < -1e-12:
        raise ValidationError(f"{what}: entries must be finite and non-negative")
    t = np.clip(t, 0.0, None)
    if abs(t.sum() - 1.0) > MASS_TOL:
        raise ValidationError(f"{what}: total mass {t.sum()!r} differs from 1")
    return t


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability table over binary outcome tuples of ``variables``."""

    variables: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        variables = tuple(int(v) for v in self.variables)
        if len(set(variables)) != len(variables):
            raise ValidationError("duplicate variables")
        t = _check_table(self.table, len(variables), "joint distribution")
        t.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "table", t)

    def probability(self, outcome: Mapping[int, int] | Sequence[int]) -> float:
        if isinstance(outcome, Mapping):
            outcome = [outcome[v] for v in self.variables]
        return float(self.table[tuple(outcome)])

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "table": {
                "".join(map(str, idx)): float(self.table[idx])
                for idx in np.ndindex(*self.table.shape)
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "JointDistribution":
        variables = tuple(data["variables"])
        table = np.zeros((2,) * len(variables))
        for key, p in data["table"].items():
            if len(key) != len(variables) or set(key) - {"0", "1"}:
                raise ValidationError(f"bad outcome key {key!r}")
            table[tuple(int(c) for c in key)] = float(p)
        return cls(variables, table)


def marginalize(jpd: JointDistribution, subset: Sequence[int]) -> JointDistribution:
    """Distribution of ``subset`` (in the given order) obtained by summing out the rest."""
    subset = tuple(subset)
    unknown = [v for v in subset if v not in jpd.variables]
    if unknown:
        raise ValidationError(f"unknown variables {unknown}")
    if len(set(subset)) != len(subset):
        raise ValidationError("duplicate variables in subset")
    keep = [jpd.variables.index(v) for v in subset]
    drop = tuple(i for i in range(len(jpd.variables)) if i not in keep)
    t = jpd.table.sum(axis=drop)
    # remaining axes are in original order; permute to the requested order
    remaining = sorted(keep)
    t = np.transpose(t, [remaining.index(i) for i in keep]) if keep else np.asarray(t)
    return JointDistribution(subset, t)


def sum_out(jpd: JointDistribution, order: Sequence[int]) -> JointDistribution:
    """Eliminate variables one at a time in ``order``."""
    for v in order:
        rest = [u for u in jpd.variables if u != v]
        if len(rest) == len(jpd.variables):
            raise ValidationError(f"unknown variable {v}")
        jpd = marginalize(jpd, rest)
    return jpd


def random_jpd(n: int, seed=None, *, cycle_exclusive: bool = False) -> JointDistribution:
    """Seeded flat-Dirichlet random distribution over ``n`` binary variables.

    With ``cycle_exclusive`` the mass of every tuple with two cyclically
    adjacent ones is removed before renormalizing.
    """
    if not 1 <= n <= 12:
        raise ValidationError("n must be in 1..12")
    rng = np.random.default_rng(seed)
    t = rng.dirichlet(np.ones(2**n)).reshape((2,) * n)
    if cycle_exclusive and n >= 2:
        for idx in np.ndindex(*t.shape):
            if any(idx[i] and idx[(i + 1) % n] for i in range(n)):
                t[idx] = 0.0
        t /= t.sum()
    return JointDistribution(tuple(range(n)), t)


@dataclass(frozen=True, eq=False)
class PairwiseMarginals:
    """Edge tables ``edges[(i, j)][a, b] = p(A_i = a, A_j = b)`` with ``i < j``,
    plus single-vertex tables. Missing vertex tables are derived from edges."""

    edges: Mapping[tuple[int, int], np.ndarray]
    vertices: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        edges = {}
        for (i, j), t in self.edges.items():
            t = _check_table(t, 2, f"edge ({i}, {j})")
            if i > j:
                i, j, t = j, i, t.T
            edges[(int(i), int(j))] = t
        vertices = {int(v): _check_table(t, 1, f"vertex {v}") for v, t in self.vertices.items()}
        for (i, j), t in edges.items():
            for v, m in ((i, t.sum(axis=1)), (j, t.sum(axis=0))):
                if v not in vertices:
                    vertices[v] = m
                elif np.max(np.abs(vertices[v] - m)) > CONSISTENCY_TOL:
                    raise InconsistentMarginalsError(
                        f"vertex {v} marginal from edge ({i}, {j}) disagrees by "
                        f"{np.max(np.abs(vertices[v] - m)):.3e}"
                    )
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "vertices", vertices)

    def edge(self, i: int, j: int) -> np.ndarray:
        """Table with axis 0 for ``i`` and axis 1 for ``j``."""
        if (i, j) in self.edges:
            return self.edges[(i, j)]
        return self.edges[(j, i)].T

    @classmethod
    def from_jpd(cls, jpd: JointDistribution, edges: Iterable[tuple[int, int]]) -> "PairwiseMarginals":
        tables = {_edge(i, j): marginalize(jpd, _edge(i, j)).table for i, j in edges}
        singles = {v: marginalize(jpd, (v,)).table for v in jpd.variables}
        return cls(tables, singles)

    @classmethod
    def from_quantum(cls, state, projectors: Sequence, g: CommutationGraph) -> "PairwiseMarginals":
        """Born-rule tables for every edge; edges must join orthogonal projectors."""
        state = state if isinstance(state, quantum.PureState) else quantum.PureState(state)
        projs = [p if isinstance(p, quantum.Projector) else quantum.Projector(p) for p in projectors]
        tables = {
            (i, j): quantum.pair_joint_distribution(state, projs[i], projs[j]) for i, j in g.edges
        }
        singles = {}
        for v in range(g.vertex_count):
            p = quantum.outcome_probability(state, projs[v])
            singles[v] = np.array([1.0 - p, p])
        return cls(tables, singles)


def _broadcast(table: np.ndarray, axes: Sequence[int], n: int) -> np.ndarray:
    """View ``table`` (axes in ``axes`` order) as broadcastable over n variables."""
    order = np.argsort(axes)
    t = np.transpose(table, order)
    shape = [1] * n
    for a in axes:
        shape[a] = 2
    return t.reshape(shape)


def _vertex_divisor(p: np.ndarray, power: int) -> np.ndarray:
    """p**(-power) with 0 wherever p == 0 (tuples through impossible outcomes get 0)."""
    out = np.zeros_like(p, dtype=float)
    nz = p > 0
    out[nz] = p[nz] ** (-power)
    return out


def build_tree_jpd(g: CommutationGraph, m: PairwiseMarginals) -> JointDistribution:
    """Product of edge tables divided by vertex marginals, p(A_i)^(deg(i) - 1)."""
    n = g.vertex_count
    if g.edges and not nx.is_forest(g.to_networkx()):
        raise StructureError("build_tree_jpd needs a cycle-free graph")
    missing = [e for e in g.edges if e not in m.edges]
    if missing:
        raise ValidationError(f"no table for edges {sorted(missing)}")
    for v in range(n):
        if v not in m.vertices:
            raise ValidationError(f"no marginal for vertex {v}")
    table = np.ones((2,) * n)
    for i, j in sorted(g.edges):
        table = table * _broadcast(m.edge(i, j), (i, j), n)
    for v in range(n):
        power = g.degree(v) - 1
        p = m.vertices[v]
        factor = p if power == -1 else _vertex_divisor(p, power)
        if power != 0:
            table = table * _broadcast(factor, (v,), n)
    return JointDistribution(tuple(range(n)), table)


def build_clique_tree_jpd(
    g: CommutationGraph,
    clique_dists: Mapping[Sequence[int], np.ndarray],
) -> JointDistribution:
    """Product of clique tables divided by shared-vertex marginals.

    The cliques (keys of ``clique_dists``; axes follow the key order) must
    cover every edge and every vertex, and the vertex-clique incidence
    graph must be a forest, so neighbouring cliques meet in one vertex.
    """
    n = g.vertex_count
    cliques = {tuple(int(v) for v in c): _check_table(t, len(c), f"clique {tuple(c)}") for c, t in clique_dists.items()}
    if not cliques:
        raise StructureError("no cliques given")
    for c in cliques:
        if any(not 0 <= v < n for v in c):
            raise ValidationError(f"clique {c} references unknown vertices")
        if not all(_edge(i, j) in g.edges for i, j in itertools.combinations(c, 2)):
            raise StructureError(f"{c} is not a clique of the graph")
    covered = {_edge(i, j) for c in cliques for i, j in itertools.combinations(c, 2)}
    if covered != set(g.edges):
        raise StructureError(f"edges not covered by cliques: {sorted(set(g.edges) - covered)}")
    membership = {v: [c for c in cliques if v in c] for v in range(n)}
    lonely = [v for v, cs in membership.items() if not cs]
    if lonely:
        raise StructureError(f"vertices {lonely} belong to no clique")
    incidence = nx.Graph()
    incidence.add_edges_from((("v", v), ("c", c)) for c in cliques for v in c)
    if not nx.is_forest(incidence):
        raise StructureError("clique hypergraph is not a tree (cliques share more than one vertex or form a cycle)")

    separators = {}
    for v, cs in membership.items():
        margins = [marginalize(JointDistribution(c, cliques[c]), (v,)).table for c in cs]
        for other in margins[1:]:
            if np.max(np.abs(other - margins[0])) > CONSISTENCY_TOL:
                raise InconsistentMarginalsError(f"cliques disagree on the marginal of vertex {v}")
        if len(cs) > 1:
            separators[v] = (margins[0], len(cs) - 1)

    table = np.ones((2,) * n)
    for c, t in cliques.items():
        table = table * _broadcast(t, c, n)
    for v, (p, power) in separators.items():
        table = table * _broadcast(_vertex_divisor(p, power), (v,), n)
    return JointDistribution(tuple(range(n)), table)
