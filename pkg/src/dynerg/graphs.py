"""Exact combinatorics on small labeled graphs and their isomorphism classes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator

# Canonicalization is exhaustive over degree-respecting permutations.
MAX_CANONICAL_VERTICES = 8

Edge = tuple[int, int]


class GraphError(ValueError):
    pass


def _norm_edge(u: int, v: int) -> Edge:
    if u == v:
        raise GraphError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LabeledGraph:
    """A finite simple graph on positive integer labels.

    Isolated vertices are kept: ``LabeledGraph((1, 2, 3), {(1, 2)})`` has three
    vertices and one edge.
    """

    vertices: tuple[int, ...]
    edges: frozenset[Edge]

    def __init__(self, vertices: Iterable[int], edges: Iterable[Edge] = ()):
        norm = frozenset(_norm_edge(int(u), int(v)) for u, v in edges)
        verts = set(int(x) for x in vertices)
        for u, v in norm:
            verts.add(u)
            verts.add(v)
        if any(x < 1 for x in verts):
            raise GraphError("vertex labels must be positive integers")
        object.__setattr__(self, "vertices", tuple(sorted(verts)))
        object.__setattr__(self, "edges", norm)

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> LabeledGraph:
        return cls((), edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def degree(self, x: int) -> int:
        return sum(1 for e in self.edges if x in e)

    def relabel(self, mapping: dict[int, int]) -> LabeledGraph:
        return LabeledGraph(
            (mapping[x] for x in self.vertices),
            ((mapping[u], mapping[v]) for u, v in self.edges),
        )

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj: dict[int, set[int]] = {x: set() for x in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            x = stack.pop()
            for y in adj[x] - seen:
                seen.add(y)
                stack.append(y)
        return len(seen) == len(self.vertices)

    def __repr__(self) -> str:
        return f"LabeledGraph(V={list(self.vertices)}, E={self.sorted_edges()})"


@dataclass(frozen=True, order=True)
class Pattern:
    """Isomorphism class of a graph with at least one edge.

    ``canonical`` is the lexicographically smallest sorted edge list over the
    admissible relabelings onto ``0..n_vertices-1``.
    """

    n_vertices: int
    n_edges: int
    canonical: tuple[Edge, ...]

    def graph(self) -> LabeledGraph:
        """Representative on labels ``1..n_vertices``."""
        return LabeledGraph(
            range(1, self.n_vertices + 1),
            ((u + 1, v + 1) for u, v in self.canonical),
        )

    @property
    def has_isolated_vertices(self) -> bool:
        touched = {x for e in self.canonical for x in e}
        return len(touched) < self.n_vertices

    def edge_list(self) -> list[list[int]]:
        """Canonical edge list with 1-based labels (serialization form)."""
        return [[u + 1, v + 1] for u, v in self.canonical]

    def __str__(self) -> str:
        name = PATTERN_NAMES.get(self)
        if name is not None:
            return name
        return f"V{self.n_vertices}:" + ",".join(f"{u + 1}-{v + 1}" for u, v in self.canonical)


def _as_graph(g: LabeledGraph | Pattern) -> LabeledGraph:
    return g.graph() if isinstance(g, Pattern) else g


@lru_cache(maxsize=200_000)
def _canonicalize(n: int, edges: tuple[Edge, ...]) -> tuple[tuple[Edge, ...], int]:
    # vertices are 0..n-1; returns (canonical edge tuple, number of minimizers)
    if n > MAX_CANONICAL_VERTICES:
        raise GraphError(
            f"canonical form limited to {MAX_CANONICAL_VERTICES} vertices, got {n}"
        )
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    # vertex classes ordered by (degree desc); permutations only act within classes
    classes: dict[int, list[int]] = {}
    for x in range(n):
        classes.setdefault(deg[x], []).append(x)
    ordered = [classes[d] for d in sorted(classes, reverse=True)]
    offsets = []
    pos = 0
    for cls_ in ordered:
        offsets.append(pos)
        pos += len(cls_)

    best: tuple[Edge, ...] | None = None
    hits = 0
    for perms in itertools.product(*(itertools.permutations(c) for c in ordered)):
        label = [0] * n
        for off, perm in zip(offsets, perms):
            for i, x in enumerate(perm):
                label[x] = off + i
        cand = tuple(sorted(
            (label[u], label[v]) if label[u] < label[v] else (label[v], label[u])
            for u, v in edges
        ))
        if best is None or cand < best:
            best = cand
            hits = 1
        elif cand == best:
            hits += 1
    assert best is not None
    return best, hits


def _compact(g: LabeledGraph) -> tuple[int, tuple[Edge, ...]]:
    index = {x: i for i, x in enumerate(g.vertices)}
    return g.n_vertices, tuple(sorted((index[u], index[v]) for u, v in g.edges))


def canonical_form(g: LabeledGraph) -> Pattern:
    if g.n_edges == 0:
        raise GraphError("no pattern for edgeless graph")
    n, edges = _compact(g)
    canon, _ = _canonicalize(n, edges)
    return Pattern(n, len(canon), canon)


def automorphism_count(g: LabeledGraph | Pattern) -> int:
    """Number of vertex permutations preserving the edge set."""
    if isinstance(g, Pattern):
        n, edges = g.n_vertices, g.canonical
    else:
        n, edges = _compact(g)
    if not edges:
        return math.factorial(n)
    _, hits = _canonicalize(n, edges)
    # Degree-class sizes also permute isolated vertices freely; the
    # stabilizer count of the minimizer equals |Aut|.
    return hits


def automorphisms(g: LabeledGraph) -> list[dict[int, int]]:
    """All automorphisms as vertex maps (brute force, small graphs only)."""
    verts = g.vertices
    out = []
    for perm in itertools.permutations(verts):
        m = dict(zip(verts, perm))
        if all(_norm_edge(m[u], m[v]) in g.edges for u, v in g.edges):
            out.append(m)
    return out


def union(g1: LabeledGraph, g2: LabeledGraph) -> LabeledGraph:
    return LabeledGraph(set(g1.vertices) | set(g2.vertices), g1.edges | g2.edges)


def intersection(g1: LabeledGraph, g2: LabeledGraph) -> LabeledGraph:
    return LabeledGraph(set(g1.vertices) & set(g2.vertices), g1.edges & g2.edges)


def edge_supported_subgraphs(H: LabeledGraph) -> Iterator[LabeledGraph]:
    """Every nonempty edge subset of ``H`` on its own endpoint support."""
    edges = H.sorted_edges()
    for k in range(1, len(edges) + 1):
        for sub in itertools.combinations(edges, k):
            yield LabeledGraph.from_edges(sub)


def subgraph_pattern_count(H: LabeledGraph, g: Pattern) -> int:
    """Number of subgraphs ``(V0, E0)`` of ``H`` isomorphic to ``g``.

    Patterns with isolated vertices are counted over every choice of the
    extra vertices among ``V(H)``.
    """
    if g.n_vertices > H.n_vertices or g.n_edges > H.n_edges:
        return 0
    total = 0
    edges = H.sorted_edges()
    for sub in itertools.combinations(edges, g.n_edges):
        support = {x for e in sub for x in e}
        extra = g.n_vertices - len(support)
        if extra < 0:
            continue
        # isolated vertices are interchangeable: test one completion, count all
        free = [x for x in H.vertices if x not in support]
        probe = LabeledGraph(support | set(free[:extra]), sub)
        if canonical_form(probe) == g:
            total += math.comb(len(free), extra)
    return total


def subgraph_patterns(H: LabeledGraph) -> frozenset[Pattern]:
    """Isolated-vertex-free patterns realizable as subgraphs of ``H``."""
    return frozenset(canonical_form(s) for s in edge_supported_subgraphs(H))


def common_subgraph_patterns(H: LabeledGraph, H_star: LabeledGraph) -> frozenset[Pattern]:
    return _cs_cached(H, H_star)


@lru_cache(maxsize=4096)
def _cs_cached(H: LabeledGraph, H_star: LabeledGraph) -> frozenset[Pattern]:
    if H.n_edges == 0 or H_star.n_edges == 0:
        raise GraphError("common subgraph patterns need graphs with at least one edge")
    return _patterns_cached(H) & _patterns_cached(H_star)


@lru_cache(maxsize=4096)
def _patterns_cached(H: LabeledGraph) -> frozenset[Pattern]:
    return subgraph_patterns(H)


def falling_factorial(n: int, k: int) -> int:
    if k < 0 or n < k:
        return 0
    return math.perm(n, k)


def graph_count_in_complete(H: LabeledGraph | Pattern, N: int) -> int:
    """Number of copies of ``H`` in the complete graph on ``N`` labeled vertices."""
    H = _as_graph(H)
    if N < H.n_vertices:
        return 0
    return falling_factorial(N, H.n_vertices) // automorphism_count(H)


def copies_in_complete(H: LabeledGraph, labels: Iterable[int]) -> set[LabeledGraph]:
    """All distinct copies of ``H`` whose vertices lie in ``labels``."""
    labels = list(labels)
    out = set()
    for image in itertools.permutations(labels, H.n_vertices):
        out.add(H.relabel(dict(zip(H.vertices, image))))
    return out


# presets ------------------------------------------------------------------

PRESETS: dict[str, LabeledGraph] = {
    "edge": LabeledGraph.from_edges([(1, 2)]),
    "wedge": LabeledGraph.from_edges([(1, 2), (2, 3)]),
    "triangle": LabeledGraph.from_edges([(1, 2), (2, 3), (1, 3)]),
    "path4": LabeledGraph.from_edges([(1, 2), (2, 3), (3, 4)]),
    "cycle4": LabeledGraph.from_edges([(1, 2), (2, 3), (3, 4), (1, 4)]),
    "K4": LabeledGraph.from_edges(itertools.combinations(range(1, 5), 2)),
}

PATTERN_NAMES: dict[Pattern, str] = {canonical_form(g): name for name, g in PRESETS.items()}


def parse_edge_list(text: str) -> LabeledGraph:
    """Parse ``V <n>`` followed by ``<u> <v>`` lines (1-based labels)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphError("empty edge list")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "V":
        raise GraphError(f"expected header 'V <n>', got {lines[0]!r}")
    n = int(head[1])
    if n < 1:
        raise GraphError("vertex count must be positive")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"edge ({u},{v}) outside 1..{n}")
        edges.append((u, v))
    g = LabeledGraph(range(1, n + 1), edges)
    if g.n_edges != len(edges):
        raise GraphError("duplicate edges in edge list")
    return g


def format_edge_list(g: LabeledGraph) -> str:
    index = {x: i + 1 for i, x in enumerate(g.vertices)}
    lines = [f"V {g.n_vertices}"]
    lines += [f"{index[u]} {index[v]}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def resolve_graph(spec: str | LabeledGraph) -> LabeledGraph:
    """Accept a preset name, edge-list text, or a path to an edge-list file."""
    if isinstance(spec, LabeledGraph):
        return spec
    if spec in PRESETS:
        return PRESETS[spec]
    if "\n" in spec or spec.lstrip().startswith("V "):
        return parse_edge_list(spec)
    path = Path(spec)
    if path.is_file():
        return parse_edge_list(path.read_text())
    raise GraphError(f"unknown graph {spec!r} (presets: {', '.join(PRESETS)})")


def graph_name(g: LabeledGraph) -> str:
    if g.n_edges == 0:
        return format_edge_list(g).replace("\n", ";").rstrip(";")
    p = canonical_form(g)
    if p.n_vertices == g.n_vertices and p in PATTERN_NAMES:
        return PATTERN_NAMES[p]
    return str(p)
