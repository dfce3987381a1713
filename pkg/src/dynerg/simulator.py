"""Event-driven simulation of the dynamic graph with incremental motif counts.

Every flip of a vertex pair ``(u, v)`` changes each motif count by the number
of copies that use ``(u, v)`` and whose other edges are present. Those copies
are found by pinning one motif edge onto ``(u, v)`` (one representative per
automorphism orbit of directed motif edges) and extending the remaining
vertices depth-first against the adjacency matrix.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .edge_process import EdgeDynamics, FlipBatch, sample_flips, stationary_probability
from .graphs import LabeledGraph, automorphisms, graph_count_in_complete, graph_name
from .scaling import check_assumption3, normalizer_exponent
from .theory import expected_count

log = logging.getLogger(__name__)

MAX_MOTIF_VERTICES = 6
INT64_MAX = 2**63 - 1


class SimulationConsistencyError(RuntimeError):
    pass


# -- anchored embedding plans -------------------------------------------------

@dataclass(frozen=True)
class MotifPlan:
    """Extension plan for one motif, packed for the compiled kernel."""

    n_levels: int
    constraints: np.ndarray  # (reps, levels, max_cons) earlier positions
    n_constraints: np.ndarray  # (reps, levels)
    weights: np.ndarray  # (reps,) orbit sizes
    automorphisms: int


def _extension_order(H: LabeledGraph, a: int, b: int) -> list[int]:
    placed = [a, b]
    rest = [x for x in H.vertices if x not in (a, b)]
    order = []
    while rest:
        # prefer a vertex tied to the placed set so candidates are pruned early
        scored = sorted(rest, key=lambda x: -sum(1 for y in placed if (min(x, y), max(x, y)) in H.edges))
        nxt = scored[0]
        order.append(nxt)
        placed.append(nxt)
        rest.remove(nxt)
    return order


def build_plan(H: LabeledGraph) -> MotifPlan:
    if H.n_edges == 0:
        raise ValueError("motif needs at least one edge")
    if H.n_vertices > MAX_MOTIF_VERTICES:
        raise ValueError(f"motifs are limited to {MAX_MOTIF_VERTICES} vertices")
    autos = automorphisms(H)
    directed = sorted({d for u, v in H.edges for d in ((u, v), (v, u))})
    seen: set[tuple[int, int]] = set()
    reps: list[tuple[tuple[int, int], int]] = []
    for d in directed:
        if d in seen:
            continue
        orbit = {(m[d[0]], m[d[1]]) for m in autos}
        seen |= orbit
        reps.append((d, len(orbit)))

    n_levels = H.n_vertices - 2
    width = max(1, H.n_vertices - 1)
    cons = np.zeros((len(reps), max(1, n_levels), width), dtype=np.int64)
    ncons = np.zeros((len(reps), max(1, n_levels)), dtype=np.int64)
    weights = np.zeros(len(reps), dtype=np.int64)
    for r, ((a, b), w) in enumerate(reps):
        weights[r] = w
        positions = [a, b] + _extension_order(H, a, b)
        for level in range(n_levels):
            x = positions[2 + level]
            earlier = [j for j, y in enumerate(positions[: 2 + level])
                       if (min(x, y), max(x, y)) in H.edges]
            ncons[r, level] = len(earlier)
            cons[r, level, : len(earlier)] = earlier
    return MotifPlan(n_levels, cons, ncons, weights, len(autos))


@dataclass(frozen=True)
class PackedPlans:
    rep_start: np.ndarray  # (m + 1,)
    n_levels: np.ndarray  # (m,)
    autos: np.ndarray  # (m,)
    constraints: np.ndarray
    n_constraints: np.ndarray
    weights: np.ndarray


def pack_plans(plans: Sequence[MotifPlan]) -> PackedPlans:
    levels = max(p.constraints.shape[1] for p in plans)
    width = max(p.constraints.shape[2] for p in plans)
    total = sum(p.weights.size for p in plans)
    cons = np.zeros((total, levels, width), dtype=np.int64)
    ncons = np.zeros((total, levels), dtype=np.int64)
    weights = np.zeros(total, dtype=np.int64)
    start = np.zeros(len(plans) + 1, dtype=np.int64)
    k = 0
    for i, p in enumerate(plans):
        r = p.weights.size
        cons[k:k + r, : p.constraints.shape[1], : p.constraints.shape[2]] = p.constraints
        ncons[k:k + r, : p.n_constraints.shape[1]] = p.n_constraints
        weights[k:k + r] = p.weights
        k += r
        start[i + 1] = k
    return PackedPlans(
        start,
        np.array([p.n_levels for p in plans], dtype=np.int64),
        np.array([p.automorphisms for p in plans], dtype=np.int64),
        cons, ncons, weights,
    )


_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@numba.njit(cache=True, nogil=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@numba.njit(cache=True, nogil=True)
def _level_mask(bits, full, assigned, level, r, cons, ncons, mask):
    # candidates for extension vertex ``level``: common neighbours of its
    # already-placed motif neighbours, minus every placed vertex
    W = bits.shape[1]
    nc = ncons[r, level]
    for w in range(W):
        if nc == 0:
            mask[level, w] = full[w]
        else:
            acc = bits[assigned[cons[r, level, 0]], w]
            for q in range(1, nc):
                acc &= bits[assigned[cons[r, level, q]], w]
            mask[level, w] = acc
    one = np.uint64(1)
    for j in range(level + 2):
        x = assigned[j]
        mask[level, x >> 6] &= ~(one << np.uint64(x & 63))


@numba.njit(cache=True, nogil=True)
def _anchored_count(bits, full, u, v, r0, r1, n_levels, cons, ncons, weights,
                    assigned, pos, mask):
    # sum over orbit representatives of weight * (#extensions)
    W = bits.shape[1]
    total = 0
    one = np.uint64(1)
    for r in range(r0, r1):
        if n_levels == 0:
            total += weights[r]
            continue
        assigned[0] = u
        assigned[1] = v
        found = 0
        level = 0
        _level_mask(bits, full, assigned, 0, r, cons, ncons, mask)
        pos[0] = 0
        last = n_levels - 1
        if last == 0:
            for w in range(W):
                found += _popcount(mask[0, w])
            total += weights[r] * found
            continue
        while level >= 0:
            # next candidate at or after pos[level]
            c = -1
            p = pos[level]
            w = p >> 6
            while w < W:
                word = mask[level, w]
                if w == (p >> 6):
                    word &= ~((one << np.uint64(p & 63)) - one)
                if word != 0:
                    b = 0
                    while (word >> np.uint64(b)) & one == 0:
                        b += 1
                    c = w * 64 + b
                    break
                w += 1
            if c < 0:
                level -= 1
                continue
            pos[level] = c + 1
            assigned[level + 2] = c
            nxt = level + 1
            _level_mask(bits, full, assigned, nxt, r, cons, ncons, mask)
            if nxt == last:
                for ww in range(W):
                    found += _popcount(mask[nxt, ww])
            else:
                level = nxt
                pos[level] = 0
        total += weights[r] * found
    return total


@numba.njit(cache=True, nogil=True)
def _run_events(adj, bits, full, counts, us, vs, times, grid, gi, out,
                rep_start, n_levels, autos, cons, ncons, weights):
    # Applies flips in order; snapshots counts at grid times (right-continuous).
    m = counts.shape[0]
    n_grid = grid.shape[0]
    L = cons.shape[1]
    assigned = np.empty(L + 2, np.int64)
    pos = np.empty(L, np.int64)
    mask = np.empty((L, bits.shape[1]), np.uint64)
    one = np.uint64(1)
    for e in range(us.shape[0]):
        while gi < n_grid and times[e] > grid[gi]:
            for i in range(m):
                out[i, gi] = counts[i]
            gi += 1
        u = us[e]
        v = vs[e]
        new = 1 - adj[u, v]
        for i in range(m):
            d = _anchored_count(bits, full, u, v, rep_start[i], rep_start[i + 1],
                                n_levels[i], cons, ncons, weights, assigned, pos, mask)
            d //= autos[i]
            if new == 1:
                counts[i] += d
            else:
                counts[i] -= d
        adj[u, v] = new
        adj[v, u] = new
        bu = one << np.uint64(u & 63)
        bv = one << np.uint64(v & 63)
        if new == 1:
            bits[u, v >> 6] |= bv
            bits[v, u >> 6] |= bu
        else:
            bits[u, v >> 6] &= ~bv
            bits[v, u >> 6] &= ~bu
    return gi


# -- graph state ----------------------------------------------------------------

class GraphState:
    """Adjacency of ``G_N(t)`` together with running motif counts.

    Vertices are ``0..N-1`` internally.
    """

    def __init__(self, N: int, motifs: Sequence[LabeledGraph]):
        self.N = N
        self.motifs = list(motifs)
        for H in self.motifs:
            if graph_count_in_complete(H, N) > INT64_MAX:
                raise OverflowError(f"counts of {graph_name(H)} at N={N} overflow int64")
        self.adjacency = np.zeros((N, N), dtype=np.uint8)
        words = (N + 63) // 64
        # row-wise bitset copy of the adjacency, kept in sync by the kernel
        self._bits = np.zeros((N, words), dtype=np.uint64)
        self._full = np.zeros(words, dtype=np.uint64)
        for x in range(N):
            self._full[x >> 6] |= np.uint64(1) << np.uint64(x & 63)
        self.counts = np.zeros(len(self.motifs), dtype=np.int64)
        self.plans = pack_plans([build_plan(H) for H in self.motifs])

    @classmethod
    def from_edges(cls, N: int, motifs: Sequence[LabeledGraph], edges) -> GraphState:
        state = cls(N, motifs)
        edges = list(edges)
        if edges:
            us = np.array([e[0] for e in edges], dtype=np.int64)
            vs = np.array([e[1] for e in edges], dtype=np.int64)
            state.apply(us, vs)
        return state

    def motif_index(self, motif: LabeledGraph | int) -> int:
        if isinstance(motif, (int, np.integer)):
            return int(motif)
        return self.motifs.index(motif)

    def apply(self, us: np.ndarray, vs: np.ndarray, times: np.ndarray | None = None,
              grid: np.ndarray | None = None, gi: int = 0, out: np.ndarray | None = None) -> int:
        if times is None:
            times = np.zeros(us.size)
        if grid is None:
            grid = np.empty(0)
        if out is None:
            out = np.empty((len(self.motifs), 0), dtype=np.int64)
        p = self.plans
        return _run_events(self.adjacency, self._bits, self._full, self.counts,
                           us, vs, times, grid, gi, out,
                           p.rep_start, p.n_levels, p.autos, p.constraints,
                           p.n_constraints, p.weights)

    def flip(self, u: int, v: int, new_value: int) -> np.ndarray:
        """Set pair ``(u, v)`` to ``new_value`` and return per-motif count deltas."""
        if u == v:
            raise SimulationConsistencyError("self-loop flip")
        if self.adjacency[u, v] != 1 - new_value:
            raise SimulationConsistencyError(
                f"pair ({u},{v}) already has value {int(self.adjacency[u, v])}"
            )
        before = self.counts.copy()
        self.apply(np.array([u], np.int64), np.array([v], np.int64))
        return self.counts - before

    def recount(self) -> np.ndarray:
        return np.array([brute_force_count(self.adjacency, H) for H in self.motifs], dtype=np.int64)


def delta_count_on_flip(state: GraphState, edge: tuple[int, int], motif: LabeledGraph | int,
                        new_value: int) -> int:
    """Flip ``edge`` in ``state`` and return the change of ``motif``'s count.

    All tracked counts and the adjacency are updated.
    """
    i = state.motif_index(motif)
    return int(state.flip(edge[0], edge[1], new_value)[i])


def brute_force_count(adj: np.ndarray, H: LabeledGraph) -> int:
    """Copies of ``H`` in the graph ``adj`` by enumerating all injective maps."""
    N = adj.shape[0]
    verts = H.vertices
    index = {x: i for i, x in enumerate(verts)}
    edges = [(index[u], index[v]) for u, v in H.edges]
    hits = 0
    for image in itertools.permutations(range(N), len(verts)):
        if all(adj[image[a], image[b]] for a, b in edges):
            hits += 1
    return hits // len(automorphisms(H))


# -- simulation -------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    N: int
    motifs: tuple[LabeledGraph, ...]
    grid: tuple[float, ...]
    dynamics: EdgeDynamics
    replications: int = 1
    seed: int = 0
    recount_every: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "motifs", tuple(self.motifs))
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if not self.motifs:
            raise ValueError("at least one motif is required")
        if not self.grid:
            raise ValueError("time grid must not be empty")
        if list(self.grid) != sorted(self.grid):
            raise ValueError("time grid must be sorted")
        if self.grid[0] < 0 or self.grid[-1] > self.dynamics.horizon:
            raise ValueError("time grid must lie in [0, horizon]")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.recount_every is not None and self.recount_every < 1:
            raise ValueError("recount_every must be positive")
        for H in self.motifs:
            if H.n_vertices > MAX_MOTIF_VERTICES:
                raise ValueError(f"motif {graph_name(H)} exceeds {MAX_MOTIF_VERTICES} vertices")
            check_assumption3(H, self.dynamics.regime)


@dataclass
class CountSeries:
    """Counts of each motif (rows) at each grid time (columns) for one replication."""

    replication: int
    grid: np.ndarray
    raw: np.ndarray  # int64 (m, n)
    expected: np.ndarray = field(default=None)  # float (m, n)
    normalized: np.ndarray = field(default=None)


def pair_index(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertex pairs ``u < v`` in lexicographic order."""
    return np.triu_indices(N, k=1)


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, replication]))


def counts_from_flips(N: int, motifs: Sequence[LabeledGraph], batch: FlipBatch,
                      grid: Sequence[float], recount_every: int | None = None,
                      replication: int = 0) -> np.ndarray:
    """Run one flip batch (edges indexed as in :func:`pair_index`) through the counter."""
    iu, iv = pair_index(N)
    state = GraphState(N, motifs)
    on = np.flatnonzero(batch.initial_states)
    state.apply(iu[on].astype(np.int64), iv[on].astype(np.int64))
    ordered = batch.time_ordered()
    us = iu[ordered.edge_index].astype(np.int64)
    vs = iv[ordered.edge_index].astype(np.int64)
    grid_arr = np.asarray(grid, dtype=float)
    out = np.zeros((len(motifs), grid_arr.size), dtype=np.int64)
    step = recount_every or max(1, us.size)
    gi = 0
    for lo in range(0, max(us.size, 1), step):
        hi = min(lo + step, us.size)
        gi = state.apply(us[lo:hi], vs[lo:hi], ordered.times[lo:hi], grid_arr, gi, out)
        if recount_every is not None:
            exact = state.recount()
            if not np.array_equal(exact, state.counts):
                raise SimulationConsistencyError(
                    f"replication {replication}: incremental counts {state.counts.tolist()} "
                    f"!= recount {exact.tolist()} after {hi} flips"
                )
    # grid times at or after the last flip
    out[:, gi:] = state.counts[:, None]
    return out


def simulate_counts(config: SimConfig, replication_index: int) -> CountSeries:
    N = config.N
    rng = replication_rng(config.seed, replication_index)
    batch = sample_flips(config.dynamics, N, N * (N - 1) // 2, rng)
    raw = counts_from_flips(N, config.motifs, batch, config.grid,
                            config.recount_every, replication_index)
    series = CountSeries(replication_index, np.asarray(config.grid), raw)
    return normalize_series(series, config.motifs, config.dynamics.regime, config.dynamics, N)


def normalize_series(series: CountSeries, motifs: Sequence[LabeledGraph], regime,
                     dynamics: EdgeDynamics, N: int) -> CountSeries:
    """Fill ``expected`` and ``normalized = (raw - E) / N**d`` per motif."""
    p = stationary_probability(dynamics, N)
    expected = np.empty(series.raw.shape, dtype=float)
    normalized = np.empty(series.raw.shape, dtype=float)
    for i, H in enumerate(motifs):
        mean = expected_count(H, N, p)
        divisor = float(N) ** float(normalizer_exponent(H, regime))
        expected[i, :] = mean
        normalized[i, :] = (series.raw[i].astype(float) - mean) / divisor
    series.expected = expected
    series.normalized = normalized
    return series


def simulate_many(config: SimConfig, threads: int = 1, start: int = 0,
                  count: int | None = None):
    """Yield :class:`CountSeries` for replications in index order."""
    count = config.replications if count is None else count
    indices = range(start, start + count)
    if threads <= 1:
        for r in indices:
            yield simulate_counts(config, r)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(lambda r: simulate_counts(config, r), indices)
