"""Acceptance suite shared by ``dynerg verify`` and the test-suite.

Every criterion returns a :class:`Verdict` holding named sub-checks; a
criterion passes only if all of its checks pass.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import networkx as nx
import numpy as np

from .edge_process import (
    EdgeDynamics,
    assumption2_constant,
    double_switch_probability,
    sample_flips,
    switch_probability,
)
from .graphs import (
    PRESETS,
    LabeledGraph,
    automorphism_count,
    canonical_form,
    common_subgraph_patterns,
    graph_count_in_complete,
    subgraph_pattern_count,
)
from .scaling import (
    ScalingRegime,
    equioptimal,
    f_exponent,
    normalizer_exponent,
    opt_exponent,
    optimal_common_subgraphs,
    pairing_constant,
)
from .simulator import SimConfig, simulate_many
from .stats import MomentAccumulator, compare_covariance, correlation, mean_z_scores
from .theory import exact_covariance_matrix, limit_coefficient, limiting_covariance

Z_THRESHOLD = 5.0
GRID = (0.0, 0.5, 1.0)
CLT_REPLICATIONS = 5000
CLT_SEED = 20240601
EDGE, WEDGE, TRIANGLE = PRESETS["edge"], PRESETS["wedge"], PRESETS["triangle"]
CLT_MOTIFS = (EDGE, TRIANGLE)
SPARSE_ALPHAS = (Fraction(3, 10), Fraction(7, 10))
SPARSE_SIZES = (100, 200)


@dataclass
class Verdict:
    criterion: int
    title: str
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, ok in self.checks.items() if not ok]
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"criterion {self.criterion} [{status}] {self.title}{tail} [{self.seconds:.1f}s]"

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "title": self.title,
            "passed": self.passed,
            "checks": dict(self.checks),
            "details": self.details,
            "seconds": round(self.seconds, 3),
        }


def _dynamics(alpha) -> EdgeDynamics:
    return EdgeDynamics(1.0, 1.0, ScalingRegime.power_law(alpha), 1.0)


# -- 1: exact combinatorics ---------------------------------------------------

def _from_nx(G: nx.Graph) -> LabeledGraph:
    return LabeledGraph(range(1, G.number_of_nodes() + 1), [(u + 1, v + 1) for u, v in G.edges()])


def _to_nx(vertices, edges) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(vertices)
    G.add_edges_from(edges)
    return G


def _oracle_automorphisms(H: LabeledGraph) -> int:
    verts = H.vertices
    edges = {frozenset(e) for e in H.edges}
    count = 0
    for perm in itertools.permutations(verts):
        m = dict(zip(verts, perm))
        if all(frozenset((m[u], m[v])) in edges for u, v in H.edges):
            count += 1
    return count


def _oracle_subgraph_classes(H: LabeledGraph) -> list[tuple[nx.Graph, int]]:
    """Isomorphism classes of all subgraphs (with at least one edge) and their sizes."""
    classes: list[list] = []
    edges = H.sorted_edges()
    for k in range(1, H.n_vertices + 1):
        for W in itertools.combinations(H.vertices, k):
            inside = [e for e in edges if e[0] in W and e[1] in W]
            for m in range(1, len(inside) + 1):
                for sub in itertools.combinations(inside, m):
                    G = _to_nx(W, sub)
                    for cls in classes:
                        if nx.is_isomorphic(cls[0], G):
                            cls[1] += 1
                            break
                    else:
                        classes.append([G, 1])
    return [(G, n) for G, n in classes]


def _oracle_copies(H: LabeledGraph, N: int) -> int:
    seen = set()
    for image in itertools.permutations(range(N), H.n_vertices):
        m = dict(zip(H.vertices, image))
        seen.add(frozenset(frozenset((m[u], m[v])) for u, v in H.edges))
    return len(seen)


def criterion_1(max_vertices: int = 5, max_N: int = 10, fault: str | None = None) -> Verdict:
    v = Verdict(1, "exact combinatorics vs brute force")
    subjects = [G for G in nx.graph_atlas_g()
                if 1 <= G.number_of_nodes() <= max_vertices and G.number_of_edges() > 0
                and nx.is_connected(G)]
    mismatches = []
    for G in subjects:
        H = _from_nx(G)
        aut = automorphism_count(H)
        if fault == "oracle":
            aut += 1
        if aut != _oracle_automorphisms(H):
            mismatches.append(("automorphisms", str(canonical_form(H))))
        classes = _oracle_subgraph_classes(H)
        isolated_free = set()
        for rep, size in classes:
            g = canonical_form(_from_nx(nx.convert_node_labels_to_integers(rep)))
            if subgraph_pattern_count(H, g) != size:
                mismatches.append(("subgraph count", str(canonical_form(H)), str(g)))
            if min(d for _, d in rep.degree()) > 0:
                isolated_free.add(g)
        n_free = sum(1 for rep, _ in classes if min(d for _, d in rep.degree()) > 0)
        cs = common_subgraph_patterns(H, H)
        if cs != isolated_free or len(cs) != n_free:
            mismatches.append(("common subgraphs", str(canonical_form(H))))
        for N in range(1, max_N + 1):
            if graph_count_in_complete(H, N) != _oracle_copies(H, N):
                mismatches.append(("copies", str(canonical_form(H)), N))
    v.checks["all graphs match"] = not mismatches
    v.details = {"graphs": len(subjects), "max_N": max_N, "mismatches": [list(map(str, m)) for m in mismatches]}
    return v


# -- 2: constant identity -----------------------------------------------------

CONSTANT_CASES = (
    ("edge", "edge", Fraction(1, 2)),
    ("wedge", "wedge", Fraction(3, 10)),
    ("wedge", "wedge", Fraction(1, 2)),
    ("triangle", "triangle", Fraction(3, 10)),
    ("triangle", "triangle", Fraction(1, 2)),
    ("triangle", "triangle", Fraction(7, 10)),
    ("wedge", "triangle", Fraction(3, 10)),
    ("wedge", "triangle", Fraction(1, 2)),
)


def criterion_2(fault: str | None = None) -> Verdict:
    v = Verdict(2, "pairing constant: enumeration equals closed form")
    rows = []
    for a, b, alpha in CONSTANT_CASES:
        H, Hs = PRESETS[a], PRESETS[b]
        regime = ScalingRegime.power_law(alpha)
        if not equioptimal(H, Hs, regime):
            v.checks[f"{a}/{b} equioptimal at {alpha}"] = False
            continue
        for g in sorted(optimal_common_subgraphs(H, Hs, regime)):
            enum = pairing_constant(H, Hs, g, "enumerate")
            closed = pairing_constant(H, Hs, g, "closed-form", regime)
            if fault == "oracle":
                closed += Fraction(1, 1000)
            rows.append({"pair": f"{a}/{b}", "alpha": str(alpha), "pattern": str(g),
                         "enumerate": str(enum), "closed_form": str(closed)})
            v.checks[f"{a}/{b}/{g} at {alpha}"] = enum == closed
    v.details = {"constants": rows}
    return v


# -- 3: worked example --------------------------------------------------------

def criterion_3() -> Verdict:
    v = Verdict(3, "wedge/triangle worked example reproduced exactly")
    sqrt2, half_sqrt2, sixth_sqrt6 = (Fraction(1), 2), (Fraction(1, 2), 2), (Fraction(1, 6), 6)
    expected_ocs = {Fraction(3, 10): {"edge"}, Fraction(1, 2): {"edge", "triangle"},
                    Fraction(7, 10): {"triangle"}}
    coeff_of = {"edge": sqrt2, "wedge": half_sqrt2, "triangle": sixth_sqrt6}
    details = {}
    for a, ocs_names in expected_ocs.items():
        reg = ScalingRegime.power_law(a)
        ok = [
            f_exponent(WEDGE, reg) == 2 * a - 3,
            f_exponent(TRIANGLE, reg) == 3 * a - 3,
            opt_exponent(WEDGE, WEDGE, reg) == a - 2,
            opt_exponent(TRIANGLE, TRIANGLE, reg) == max(a - 2, 3 * a - 3),
            {str(g) for g in optimal_common_subgraphs(TRIANGLE, TRIANGLE, reg)} == ocs_names,
            optimal_common_subgraphs(WEDGE, WEDGE, reg) == {canonical_form(EDGE)},
            normalizer_exponent(WEDGE, reg) == 2 - Fraction(3, 2) * a,
            normalizer_exponent(TRIANGLE, reg) == max(2 - Fraction(5, 2) * a, Fraction(3, 2) - Fraction(3, 2) * a),
        ]
        c = limit_coefficient(WEDGE, canonical_form(EDGE))
        ok.append((c.rational, c.radicand) == coeff_of["edge"])
        for g in optimal_common_subgraphs(TRIANGLE, TRIANGLE, reg):
            c = limit_coefficient(TRIANGLE, g)
            target = {"edge": half_sqrt2, "triangle": sixth_sqrt6}[str(g)]
            ok.append((c.rational, c.radicand) == target)
        v.checks[f"alpha={a}"] = all(ok)
        details[str(a)] = {
            "ocs_triangle": sorted(str(g) for g in optimal_common_subgraphs(TRIANGLE, TRIANGLE, reg)),
            "normalizer_exponents": [str(normalizer_exponent(WEDGE, reg)), str(normalizer_exponent(TRIANGLE, reg))],
        }
    v.details = details
    return v


# -- 4, 5: simulation ---------------------------------------------------------

def simulate_accumulator(N: int, alpha, motifs=CLT_MOTIFS, grid=GRID, replications: int = CLT_REPLICATIONS,
                         seed: int = CLT_SEED, threads: int = 1) -> MomentAccumulator:
    cfg = SimConfig(N, motifs, grid, _dynamics(alpha), replications, seed)
    acc = MomentAccumulator(len(motifs) * len(grid))
    batch = []
    for series in simulate_many(cfg, threads):
        batch.append(series.normalized.ravel())
        if len(batch) == 500:
            acc.accumulate_batch(np.array(batch))
            batch = []
    if batch:
        acc.accumulate_batch(np.array(batch))
    return acc


def criterion_4(replications: int = CLT_REPLICATIONS, threads: int = 1) -> Verdict:
    v = Verdict(4, "static-case CLT at N=100")
    N, n = 100, len(GRID)
    acc = simulate_accumulator(N, 0, replications=replications, threads=threads)
    zmean = mean_z_scores(acc)
    cmp = compare_covariance(acc, exact_covariance_matrix(CLT_MOTIFS, N, _dynamics(0), GRID),
                             threshold=Z_THRESHOLD)
    mid = GRID.index(0.5)
    corr = correlation(acc, 0 * n + mid, 1 * n + mid)
    skew, kurt = acc.skewness(), acc.kurtosis()
    v.checks["mean within 5 SE"] = bool(np.all(np.abs(zmean) < Z_THRESHOLD))
    v.checks["covariance within 5 SE of exact"] = cmp.passed
    v.checks["edge/triangle correlation >= 0.95"] = corr >= 0.95
    v.checks["|skewness| < 0.15"] = bool(np.all(np.abs(skew) < 0.15))
    v.checks["|kurtosis - 3| < 0.3"] = bool(np.all(np.abs(kurt - 3.0) < 0.3))
    v.details = {
        "replications": replications,
        "mean_z": zmean.tolist(),
        "covariance_max_abs_z": cmp.max_abs_z,
        "correlation_t_half": corr,
        "skewness": skew.tolist(),
        "kurtosis": kurt.tolist(),
    }
    return v


def criterion_5(replications: int = CLT_REPLICATIONS, threads: int = 1) -> Verdict:
    v = Verdict(5, "sparse-regime covariance")
    n = len(GRID)
    mid = GRID.index(0.5)
    details = {}
    for alpha in SPARSE_ALPHAS:
        for N in SPARSE_SIZES:
            acc = simulate_accumulator(N, alpha, replications=replications, threads=threads)
            ref = exact_covariance_matrix(CLT_MOTIFS, N, _dynamics(alpha), GRID)
            cmp = compare_covariance(acc, ref, threshold=Z_THRESHOLD)
            corr = correlation(acc, mid, n + mid)
            v.checks[f"covariance within 5 SE (alpha={alpha}, N={N})"] = cmp.passed
            details[f"alpha={alpha},N={N}"] = {"covariance_max_abs_z": cmp.max_abs_z,
                                               "correlation_t_half": corr}
            if alpha == Fraction(7, 10) and N == 200:
                v.checks["|edge/triangle correlation| < 0.1 (alpha=7/10, N=200)"] = abs(corr) < 0.1
    v.details = {"replications": replications, "runs": details}
    return v


# -- 6: convergence -----------------------------------------------------------

def criterion_6(small: int = 50, large: int = 400) -> Verdict:
    v = Verdict(6, "normalized exact covariance approaches the limit")
    details = {}
    for alpha in (Fraction(0), *SPARSE_ALPHAS):
        dyn = _dynamics(alpha)
        limit = limiting_covariance(CLT_MOTIFS, dyn.regime, dyn).matrix(GRID)
        dev_small = np.abs(exact_covariance_matrix(CLT_MOTIFS, small, dyn, GRID) - limit)
        dev_large = np.abs(exact_covariance_matrix(CLT_MOTIFS, large, dyn, GRID) - limit)
        v.checks[f"alpha={alpha}"] = bool(np.all(dev_large < dev_small))
        n = len(GRID)
        worse = [
            {"motifs": [int(k // n), int(l // n)], "times": [GRID[k % n], GRID[l % n]],
             "dev_small": float(dev_small[k, l]), "dev_large": float(dev_large[k, l])}
            for k, l in zip(*np.nonzero(dev_large >= dev_small))
        ]
        details[str(alpha)] = {"max_dev_small": float(dev_small.max()),
                               "max_dev_large": float(dev_large.max()),
                               "not_improving": worse}
    v.details = {"N": [small, large], "deviations": details}
    return v


# -- 7: switching bounds ------------------------------------------------------

def criterion_7(samples: int = 10**6, seed: int = CLT_SEED) -> Verdict:
    v = Verdict(7, "switching-probability bounds of the edge process")
    rng = np.random.default_rng(seed)
    pts = np.linspace(0.0, 1.0, 20)
    triples = ((0.0, 0.5, 1.0), (0.1, 0.3, 0.4), (0.0, 0.05, 0.1))
    details = {}
    for alpha in (Fraction(0), *SPARSE_ALPHAS):
        dyn = _dynamics(alpha)
        C = assumption2_constant(dyn)
        for N in (10, 100, 1000):
            rho = dyn.regime.rho(N)
            worst = max(switch_probability(dyn, N, r, s) - C * rho * (s - r)
                        for r in pts for s in pts if r <= s)
            v.checks[f"single switch alpha={alpha} N={N}"] = worst <= 0.0
            batch = sample_flips(dyn, N, samples, rng)
            worst_z, bound_ok = 0.0, True
            for r, s, t in triples:
                a_r, a_s, a_t = batch.states_at(r), batch.states_at(s), batch.states_at(t)
                freq = float(np.mean((a_s != a_r) & (a_t != a_s)))
                exact = double_switch_probability(dyn, N, r, s, t)
                sigma = math.sqrt(max(exact * (1 - exact), 1e-300) / samples)
                worst_z = max(worst_z, abs(freq - exact) / sigma)
                bound_ok &= freq <= C * rho * (t - r) ** 2 + 4 * sigma
            v.checks[f"double switch alpha={alpha} N={N}"] = bound_ok and worst_z < 4.0
            details[f"alpha={alpha},N={N}"] = {"C": C, "max_single_excess": worst,
                                               "double_switch_max_z": worst_z}
    v.details = details
    return v


CRITERIA: dict[int, Callable[..., Verdict]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7,
}


def run_criteria(selected=None, quick: bool = False, threads: int = 1,
                 fault: str | None = None, on_verdict=None) -> list[Verdict]:
    """Evaluate the selected criteria (all by default) in order.

    ``quick`` shrinks the simulation and sampling sizes so that the suite runs
    in seconds; verdicts from a quick run are indicative only.
    """
    selected = sorted(CRITERIA) if not selected else sorted(set(selected))
    out = []
    for c in selected:
        if c not in CRITERIA:
            raise ValueError(f"unknown criterion {c}")
        kw: dict = {}
        if c in (1, 2) and fault:
            kw["fault"] = fault
        if c in (4, 5):
            kw["threads"] = threads
            if quick:
                kw["replications"] = 400
        if c == 1 and quick:
            kw.update(max_vertices=4, max_N=7)
        if c == 7 and quick:
            kw["samples"] = 10**5
        start = time.perf_counter()
        verdict = CRITERIA[c](**kw)
        verdict.seconds = time.perf_counter() - start
        out.append(verdict)
        if on_verdict is not None:
            on_verdict(verdict)
    return out

