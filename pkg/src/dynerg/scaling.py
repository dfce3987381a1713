"""Control sequence rho_N = N^-alpha and the decay functionals built on it.

All exponents are exact ``Fraction`` values so that ties (for instance
``alpha = 1/2`` for triangles) are decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .graphs import (
    GraphError,
    LabeledGraph,
    Pattern,
    automorphism_count,
    canonical_form,
    common_subgraph_patterns,
    copies_in_complete,
    intersection,
    subgraph_pattern_count,
)

MAX_ENUMERATION_VERTICES = 10


class RegimeError(ValueError):
    """A motif is incompatible with the scaling regime (Assumption 3 fails)."""

    def __init__(self, message: str, offending: Pattern | None = None):
        super().__init__(message)
        self.offending = offending


def parse_alpha(value: str | int | float | Fraction) -> Fraction:
    """``"3/10"``, ``"0.3"``, ``0.3`` and ``Fraction(3, 10)`` all give 3/10."""
    if isinstance(value, Fraction):
        out = value
    elif isinstance(value, bool):
        raise ValueError("alpha must be a number")
    elif isinstance(value, int):
        out = Fraction(value)
    elif isinstance(value, float):
        # via repr so that 0.3 means 3/10, not the nearest binary double
        out = Fraction(repr(value))
    else:
        out = Fraction("".join(value.split()))
    if out < 0:
        raise ValueError(f"alpha must be nonnegative, got {out}")
    return out


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ScalingRegime:
    alpha: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))

    @classmethod
    def constant_one(cls) -> ScalingRegime:
        return cls(Fraction(0))

    @classmethod
    def power_law(cls, alpha) -> ScalingRegime:
        return cls(parse_alpha(alpha))

    @property
    def kind(self) -> str:
        return "constant-one" if self.alpha == 0 else "power-law"

    def rho(self, N: int) -> float:
        return 1.0 if self.alpha == 0 else float(N) ** (-float(self.alpha))


def limit_class(exponent: Fraction) -> str:
    """Limit of ``N**exponent``: ``"0"``, ``"1"`` or ``"inf"``."""
    if exponent < 0:
        return "0"
    if exponent == 0:
        return "1"
    return "inf"


def _vertices_edges(g: LabeledGraph | Pattern) -> tuple[int, int]:
    return g.n_vertices, g.n_edges


def f_exponent(g: LabeledGraph | Pattern, regime: ScalingRegime) -> Fraction:
    """Exponent ``e`` with ``F_N(g) = N**e``, i.e. ``-V(g) + alpha * E(g)``."""
    v, e = _vertices_edges(g)
    if v < 1:
        raise GraphError("decay functional needs at least one vertex")
    return -v + regime.alpha * e


def assumption3_violations(H: LabeledGraph, regime: ScalingRegime) -> list[tuple[Pattern, Fraction]]:
    """Subgraph patterns of ``H`` whose decay functional does not vanish."""
    if H.n_edges == 0:
        raise GraphError("motif must have at least one edge")
    bad = []
    for g in sorted(common_subgraph_patterns(H, H)):
        ex = f_exponent(g, regime)
        if ex >= 0:
            bad.append((g, ex))
    return bad


def assumption3_holds(H: LabeledGraph, regime: ScalingRegime) -> bool:
    return not assumption3_violations(H, regime)


def check_assumption3(H: LabeledGraph, regime: ScalingRegime) -> None:
    bad = assumption3_violations(H, regime)
    if bad:
        g, ex = bad[0]
        kind = "borderline (non-Gaussian limit)" if ex == 0 else "degenerate"
        raise RegimeError(
            f"motif violates the vanishing-decay condition at alpha={format_fraction(regime.alpha)}: "
            f"subgraph {g} has F_N exponent {format_fraction(ex)} ({kind})",
            offending=g,
        )


@lru_cache(maxsize=4096)
def _ocs(H: LabeledGraph, H_star: LabeledGraph, regime: ScalingRegime) -> tuple[frozenset[Pattern], Fraction]:
    check_assumption3(H, regime)
    check_assumption3(H_star, regime)
    cs = common_subgraph_patterns(H, H_star)
    best = max(f_exponent(g, regime) for g in cs)
    return frozenset(g for g in cs if f_exponent(g, regime) == best), best


def optimal_common_subgraphs(H: LabeledGraph, H_star: LabeledGraph, regime: ScalingRegime) -> frozenset[Pattern]:
    return _ocs(H, H_star, regime)[0]


def opt_exponent(H: LabeledGraph, H_star: LabeledGraph, regime: ScalingRegime) -> Fraction:
    """Exponent of ``F_N^opt(H, H*)``."""
    return _ocs(H, H_star, regime)[1]


def equioptimal(H: LabeledGraph, H_star: LabeledGraph, regime: ScalingRegime) -> bool:
    joint = opt_exponent(H, H_star, regime)
    return joint == opt_exponent(H, H, regime) and joint == opt_exponent(H_star, H_star, regime)


def normalizer_exponent(H: LabeledGraph, regime: ScalingRegime) -> Fraction:
    """Exponent ``d`` of the CLT divisor ``sqrt(F_opt(H)) / F_N(H) = N**d``."""
    return opt_exponent(H, H, regime) / 2 - f_exponent(H, regime)


def pairing_constant(
    H: LabeledGraph,
    H_star: LabeledGraph,
    g: Pattern,
    mode: str = "enumerate",
    regime: ScalingRegime | None = None,
    exhaustive: bool = False,
) -> Fraction:
    """Normalized number of embedding pairs whose intersection has pattern ``g``.

    ``mode="enumerate"`` counts pairs in the complete graph on
    ``V(H) + V(H*) - V(g)`` vertices. ``mode="closed-form"`` uses
    ``A(g) S(H,g) S(H*,g) / (A(H) A(H*))`` and requires ``H``, ``H*``
    equioptimal under ``regime`` with ``g`` optimal. ``exhaustive=True``
    walks the full product of copies instead of fixing the first copy.
    """
    if mode == "enumerate":
        return _pairing_enumerate(H, H_star, g, exhaustive)
    if mode == "closed-form":
        if regime is None:
            raise ValueError("closed-form mode needs a scaling regime")
        if not equioptimal(H, H_star, regime):
            raise RegimeError(
                "closed form requires equioptimal graphs; "
                f"{canonical_form(H)} and {canonical_form(H_star)} are not equioptimal "
                f"at alpha={format_fraction(regime.alpha)}"
            )
        if g not in optimal_common_subgraphs(H, H_star, regime):
            raise RegimeError(f"closed form requires an optimal common subgraph; {g} is not optimal")
        return Fraction(
            automorphism_count(g) * subgraph_pattern_count(H, g) * subgraph_pattern_count(H_star, g),
            automorphism_count(H) * automorphism_count(H_star),
        )
    raise ValueError(f"unknown mode {mode!r}")


@lru_cache(maxsize=4096)
def _pairing_enumerate(H: LabeledGraph, H_star: LabeledGraph, g: Pattern, exhaustive: bool) -> Fraction:
    n_joint = H.n_vertices + H_star.n_vertices - g.n_vertices
    if n_joint > MAX_ENUMERATION_VERTICES:
        raise ValueError(
            f"enumeration over {n_joint} joint vertices exceeds the cap of {MAX_ENUMERATION_VERTICES}"
        )
    if n_joint < max(H.n_vertices, H_star.n_vertices):
        return Fraction(0)
    labels = range(1, n_joint + 1)
    first = copies_in_complete(H, labels)
    second = copies_in_complete(H_star, labels)
    # The symmetric group on the labels acts transitively on copies of H and
    # permutes the pair set; one fixed first copy times |copies| is the full sum.
    if exhaustive:
        anchors, weight = list(first), 1
    else:
        anchors = [min(first, key=lambda c: (c.vertices, c.sorted_edges()))]
        weight = len(first)
    hits = 0
    for g1 in anchors:
        for g2 in second:
            common = intersection(g1, g2)
            if (common.n_vertices != g.n_vertices or common.n_edges != g.n_edges
                    or common.n_edges == 0):
                continue
            if canonical_form(common) == g:
                hits += 1
    return Fraction(weight * hits, math.factorial(n_joint))
