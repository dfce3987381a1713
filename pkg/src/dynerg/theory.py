"""Expectations and covariances of motif counts, exact and in the limit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .edge_process import EdgeDynamics, covariance, limit_functions, stationary_probability
from .graphs import (
    LabeledGraph,
    Pattern,
    automorphism_count,
    canonical_form,
    copies_in_complete,
    falling_factorial,
    graph_count_in_complete,
    intersection,
    subgraph_pattern_count,
    PRESETS,
)
from .scaling import (
    ScalingRegime,
    check_assumption3,
    equioptimal,
    f_exponent,
    format_fraction,
    normalizer_exponent,
    opt_exponent,
    optimal_common_subgraphs,
)


def expected_count(H: LabeledGraph, N: int, p: float) -> float:
    """Mean number of copies of ``H`` when every pair is present with probability ``p``."""
    if N < 1 or not 0.0 <= p <= 1.0:
        raise ValueError("need N >= 1 and p in [0, 1]")
    return graph_count_in_complete(H, N) * p ** H.n_edges


# -- overlap classes ----------------------------------------------------------

@dataclass(frozen=True)
class OverlapClass:
    """Pairs of copies whose intersection has pattern ``pattern``.

    The number of such ordered pairs inside ``K_N`` is
    ``N! / (N - joint_vertex_count)! * pair_constant``.
    """

    pattern: Pattern
    joint_vertex_count: int
    pair_constant: Fraction

    def pair_count(self, N: int) -> int | Fraction:
        return falling_factorial(N, self.joint_vertex_count) * self.pair_constant


@lru_cache(maxsize=1024)
def overlap_classes(H_i: LabeledGraph, H_j: LabeledGraph) -> tuple[OverlapClass, ...]:
    """Every intersection pattern (with at least one edge) of a copy of ``H_i`` and one of ``H_j``.

    A first copy is pinned on labels ``1..V_i``; second copies range over
    ``K_{V_i + V_j}``. A second copy sharing ``s`` vertices uses ``V_j - s``
    of the ``V_j`` outside labels, hence the ``1 / C(V_j, V_j - s)`` weight.
    """
    vi, vj = H_i.n_vertices, H_j.n_vertices
    g1 = H_i.relabel({x: k + 1 for k, x in enumerate(H_i.vertices)})
    per_class: dict[Pattern, Fraction] = {}
    for g2 in copies_in_complete(H_j, range(1, vi + vj + 1)):
        common = intersection(g1, g2)
        if common.n_edges == 0:
            continue
        s = common.n_vertices
        key = canonical_form(common)
        per_class[key] = per_class.get(key, Fraction(0)) + Fraction(1, math.comb(vj, vj - s))
    out = []
    for g, weight in sorted(per_class.items()):
        n_joint = vi + vj - g.n_vertices
        const = weight * graph_count_in_complete(H_i, n_joint) / math.factorial(n_joint)
        out.append(OverlapClass(g, n_joint, const))
    return tuple(out)


def _pair_covariance(e_i: int, e_j: int, k: int, p_s: float, p_t: float, kappa: float) -> float:
    # Cov of two indicator products sharing k edges
    return p_s ** (e_i - k) * p_t ** (e_j - k) * ((kappa + p_s * p_t) ** k - (p_s * p_t) ** k)


def exact_covariance(H_i: LabeledGraph, H_j: LabeledGraph, N: int, dyn: EdgeDynamics,
                     s: float, t: float) -> float:
    """``Cov(X_{N,i}(s), X_{N,j}(t))`` at finite ``N``."""
    if N < max(H_i.n_vertices, H_j.n_vertices):
        return 0.0
    p = stationary_probability(dyn, N)
    kappa = covariance(dyn, N, s, t)
    total = 0.0
    for oc in overlap_classes(H_i, H_j):
        if oc.joint_vertex_count > N:
            continue
        weight = float(oc.pair_count(N))
        total += weight * _pair_covariance(H_i.n_edges, H_j.n_edges, oc.pattern.n_edges, p, p, kappa)
    return total


def normalizer(H: LabeledGraph, N: int, regime: ScalingRegime) -> float:
    return float(N) ** float(normalizer_exponent(H, regime))


def normalized_exact_covariance(H_i: LabeledGraph, H_j: LabeledGraph, N: int,
                                dyn: EdgeDynamics, s: float, t: float) -> float:
    reg = dyn.regime
    return exact_covariance(H_i, H_j, N, dyn, s, t) / (normalizer(H_i, N, reg) * normalizer(H_j, N, reg))


def exact_covariance_matrix(motifs: Sequence[LabeledGraph], N: int, dyn: EdgeDynamics,
                            grid: Sequence[float], normalized: bool = True) -> np.ndarray:
    """Covariance of the stacked vector ``(X_1(t_1..t_n), ..., X_m(t_1..t_n))``."""
    fn = normalized_exact_covariance if normalized else exact_covariance
    n = len(grid)
    d = len(motifs) * n
    out = np.empty((d, d))
    for i, Hi in enumerate(motifs):
        for j, Hj in enumerate(motifs):
            for a, s in enumerate(grid):
                for b, t in enumerate(grid):
                    out[i * n + a, j * n + b] = fn(Hi, Hj, N, dyn, s, t)
    return out


# -- limit --------------------------------------------------------------------

@dataclass(frozen=True)
class RadicalCoefficient:
    """``rational * sqrt(radicand)`` with a squarefree radicand."""

    rational: Fraction
    radicand: int

    @classmethod
    def of(cls, rational: Fraction, radicand: int) -> RadicalCoefficient:
        square, rest = 1, radicand
        f = 2
        while f * f <= rest:
            while rest % (f * f) == 0:
                square *= f
                rest //= f * f
            f += 1
        return cls(Fraction(rational) * square, rest)

    def __float__(self) -> float:
        return float(self.rational) * math.sqrt(self.radicand)

    def as_pair(self) -> list:
        return [format_fraction(self.rational), self.radicand]

    def __str__(self) -> str:
        r = self.rational
        if self.radicand == 1:
            return str(r)
        num = "" if r.numerator == 1 else str(r.numerator)
        text = f"{num}√{self.radicand}"
        return text if r.denominator == 1 else f"{text}/{r.denominator}"


def limit_coefficient(H: LabeledGraph, g: Pattern) -> RadicalCoefficient:
    """``sqrt(A(g)) S(H, g) / A(H)``, the weight of the pattern process ``g`` in ``H``'s limit."""
    return RadicalCoefficient.of(
        Fraction(subgraph_pattern_count(H, g), automorphism_count(H)), automorphism_count(g)
    )


@dataclass(frozen=True)
class KernelTerm:
    constant: Fraction
    pattern_edges: int


@dataclass
class LimitingCovariance:
    """Evaluable kernels ``Sigma_{i,j}(s, t)`` of the Gaussian limit."""

    motifs: tuple[LabeledGraph, ...]
    terms: dict[tuple[int, int], tuple[KernelTerm, ...]]
    p_star: Callable[[float], float]
    kappa_star: Callable[[float, float], float]

    def kernel(self, i: int, j: int, s: float, t: float) -> float:
        ps, pt = self.p_star(s), self.p_star(t)
        ks = self.kappa_star(s, t)
        ei, ej = self.motifs[i].n_edges, self.motifs[j].n_edges
        total = 0.0
        for term in self.terms[(i, j)]:
            k = term.pattern_edges
            total += float(term.constant) * ps ** ei * pt ** ej / (ps * pt) ** k * ks ** k
        return total

    def matrix(self, grid: Sequence[float]) -> np.ndarray:
        n = len(grid)
        m = len(self.motifs)
        out = np.empty((m * n, m * n))
        for i in range(m):
            for j in range(m):
                for a, s in enumerate(grid):
                    for b, t in enumerate(grid):
                        out[i * n + a, j * n + b] = self.kernel(i, j, s, t)
        return out


def limiting_covariance(motifs: Sequence[LabeledGraph], regime: ScalingRegime,
                        dyn: EdgeDynamics) -> LimitingCovariance:
    motifs = tuple(motifs)
    for H in motifs:
        check_assumption3(H, regime)
    p_const, kappa_star = limit_functions(dyn)
    if not p_const > 0:
        raise ValueError("limiting edge density must be positive")
    terms = {}
    for i, Hi in enumerate(motifs):
        for j, Hj in enumerate(motifs):
            if not equioptimal(Hi, Hj, regime):
                terms[(i, j)] = ()
                continue
            row = []
            for g in sorted(optimal_common_subgraphs(Hi, Hj, regime)):
                const = Fraction(
                    automorphism_count(g) * subgraph_pattern_count(Hi, g) * subgraph_pattern_count(Hj, g),
                    automorphism_count(Hi) * automorphism_count(Hj),
                )
                row.append(KernelTerm(const, g.n_edges))
            terms[(i, j)] = tuple(row)
    return LimitingCovariance(motifs, terms, lambda t: p_const, kappa_star)


# -- worked example: wedges and triangles ---------------------------------------

def _pattern_json(g: Pattern) -> dict:
    return {"name": str(g), "vertices": g.n_vertices, "edges": g.edge_list()}


def _fmt_number(x: float) -> str:
    return f"{x:.12g}"


def motif_summary(H: LabeledGraph, regime: ScalingRegime) -> dict:
    ocs = sorted(optimal_common_subgraphs(H, H, regime))
    return {
        "f_exponent": format_fraction(f_exponent(H, regime)),
        "f_opt_exponent": format_fraction(opt_exponent(H, H, regime)),
        "normalizer_exponent": format_fraction(normalizer_exponent(H, regime)),
        "ocs": [_pattern_json(g) for g in ocs],
        "coefficients": [
            {
                "pattern": str(g),
                "coefficient": limit_coefficient(H, g).as_pair(),
                "coefficient_text": str(limit_coefficient(H, g)),
                "p_star_power": H.n_edges - g.n_edges,
            }
            for g in ocs
        ],
    }


def correlation_regime(H1: LabeledGraph, H2: LabeledGraph, regime: ScalingRegime,
                       dyn: EdgeDynamics) -> str:
    """Classify the same-time limiting dependence of two normalized counts."""
    if not equioptimal(H1, H2, regime):
        return "independent"
    lim = limiting_covariance([H1, H2], regime, dyn)
    c12 = lim.kernel(0, 1, 0.0, 0.0)
    corr = c12 / math.sqrt(lim.kernel(0, 0, 0.0, 0.0) * lim.kernel(1, 1, 0.0, 0.0))
    if abs(corr - 1.0) < 1e-12:
        return "perfectly correlated"
    if corr > 0:
        return "positively but not perfectly correlated"
    return "independent" if corr == 0 else "negatively correlated"


def example_report(alpha, lambda_on: float, lambda_off: float, horizon: float = 1.0) -> dict:
    """Limit structure for wedge and triangle counts under ``rho_N = N^-alpha``."""
    regime = ScalingRegime.power_law(alpha)
    if not 0 < regime.alpha < 1:
        raise ValueError("worked example needs alpha in (0, 1)")
    dyn = EdgeDynamics(lambda_on, lambda_off, regime, horizon)
    wedge, triangle = PRESETS["wedge"], PRESETS["triangle"]
    ratio = _fmt_number(lambda_off / lambda_on)
    kernels = {}
    for H in (wedge, triangle):
        for g in optimal_common_subgraphs(H, H, regime):
            k = g.n_edges
            power = "" if k == 1 else f"^{k}"
            rate = _fmt_number(k * lambda_on)
            kernels[str(g)] = f"({ratio}){power} e^(-{rate}|s-t|)"
    return {
        "alpha": format_fraction(regime.alpha),
        "lambda_on": lambda_on,
        "lambda_off": lambda_off,
        "motifs": {"wedge": motif_summary(wedge, regime), "triangle": motif_summary(triangle, regime)},
        "equioptimal": equioptimal(wedge, triangle, regime),
        "pattern_kernels": dict(sorted(kernels.items())),
        "regime": correlation_regime(wedge, triangle, regime, dyn),
    }
