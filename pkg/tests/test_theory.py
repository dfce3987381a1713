from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dynerg.edge_process import EdgeDynamics, covariance, limit_functions, stationary_probability
from dynerg.graphs import PRESETS, canonical_form, copies_in_complete
from dynerg.scaling import RegimeError, ScalingRegime, equioptimal
from dynerg.theory import (
    RadicalCoefficient,
    correlation_regime,
    exact_covariance,
    exact_covariance_matrix,
    example_report,
    expected_count,
    limit_coefficient,
    limiting_covariance,
    normalized_exact_covariance,
    overlap_classes,
)

EDGE, WEDGE, TRIANGLE = PRESETS["edge"], PRESETS["wedge"], PRESETS["triangle"]
E, W, T = (canonical_form(g) for g in (EDGE, WEDGE, TRIANGLE))


def dyn(alpha="0", on=1.0, off=1.0):
    return EdgeDynamics(on, off, ScalingRegime.power_law(alpha), 1.0)


def brute_force_covariance(Hi, Hj, N, d, s, t):
    """Double sum over all ordered pairs of copies in K_N."""
    p, kappa = stationary_probability(d, N), covariance(d, N, s, t)
    total = 0.0
    copies_j = copies_in_complete(Hj, range(1, N + 1))
    for a in copies_in_complete(Hi, range(1, N + 1)):
        for b in copies_j:
            k = len(a.edges & b.edges)
            if k:
                total += p ** (Hi.n_edges - k) * p ** (Hj.n_edges - k) * ((kappa + p * p) ** k - p ** (2 * k))
    return total


def test_expected_count():
    assert expected_count(TRIANGLE, 10, 0.5) == pytest.approx(120 / 8)
    assert expected_count(EDGE, 3, 0.2) == pytest.approx(0.6)


def test_overlap_classes_triangle():
    classes = {oc.pattern: oc for oc in overlap_classes(TRIANGLE, TRIANGLE)}
    assert set(classes) == {E, T}
    assert classes[E].joint_vertex_count == 4 and classes[E].pair_constant == Fraction(1, 2)
    assert classes[T].joint_vertex_count == 3 and classes[T].pair_constant == Fraction(1, 6)
    # pairs sharing one edge: choose edge, then the two apexes
    assert classes[E].pair_count(7) == math.comb(7, 2) * 5 * 4


def test_edge_edge_covariance_n6():
    d = dyn("0", 1.5, 0.7)
    for s, t in [(0, 0), (0.1, 0.8)]:
        exact = exact_covariance(EDGE, EDGE, 6, d, s, t)
        assert exact == pytest.approx(math.comb(6, 2) * covariance(d, 6, s, t), rel=1e-12)
        assert exact == pytest.approx(brute_force_covariance(EDGE, EDGE, 6, d, s, t), rel=1e-12)


@pytest.mark.parametrize("alpha", ["0", "1/2"])
def test_triangle_triangle_covariance_n7(alpha):
    d = dyn(alpha)
    for s, t in [(0.0, 0.0), (0.25, 1.0)]:
        assert exact_covariance(TRIANGLE, TRIANGLE, 7, d, s, t) == pytest.approx(
            brute_force_covariance(TRIANGLE, TRIANGLE, 7, d, s, t), rel=1e-12)


@pytest.mark.parametrize("a,b", [("wedge", "triangle"), ("edge", "path4"), ("cycle4", "wedge")])
def test_mixed_pair_covariance_n6(a, b):
    d = dyn("3/10", 2.0, 1.0)
    Hi, Hj = PRESETS[a], PRESETS[b]
    assert exact_covariance(Hi, Hj, 6, d, 0.2, 0.6) == pytest.approx(
        brute_force_covariance(Hi, Hj, 6, d, 0.2, 0.6), rel=1e-12)


def test_covariance_is_symmetric():
    d = dyn("3/10")
    assert exact_covariance(WEDGE, TRIANGLE, 20, d, 0.1, 0.6) == pytest.approx(
        exact_covariance(TRIANGLE, WEDGE, 20, d, 0.6, 0.1))


@given(st.sampled_from(["0", "3/10", "1/2", "7/10"]), st.integers(5, 300))
def test_exact_matrix_is_psd(alpha, N):
    m = exact_covariance_matrix((EDGE, WEDGE, TRIANGLE), N, dyn(alpha), (0.0, 0.4, 1.0))
    assert np.allclose(m, m.T)
    assert np.linalg.eigvalsh(m).min() > -1e-9 * np.abs(m).max()


@pytest.mark.parametrize("alpha", ["0", "3/10", "1/2", "7/10"])
def test_limit_matrix_is_psd(alpha):
    d = dyn(alpha)
    m = limiting_covariance((EDGE, WEDGE, TRIANGLE), d.regime, d).matrix((0.0, 0.3, 0.9))
    assert np.linalg.eigvalsh(m).min() > -1e-12


@pytest.mark.parametrize("alpha", ["3/10", "1/2", "7/10"])
def test_sigma_vanishes_iff_not_equioptimal(alpha):
    d = dyn(alpha)
    motifs = (EDGE, WEDGE, TRIANGLE)
    lim = limiting_covariance(motifs, d.regime, d)
    for i, Hi in enumerate(motifs):
        for j, Hj in enumerate(motifs):
            zero = lim.kernel(i, j, 0.3, 0.5) == 0.0
            assert zero == (not equioptimal(Hi, Hj, d.regime))


def test_limit_kernel_triangle_half():
    # both the edge and the triangle process contribute at alpha = 1/2
    d = dyn("1/2", 1.0, 2.0)
    lim = limiting_covariance((TRIANGLE,), d.regime, d)
    p, kappa = limit_functions(d)
    s, t = 0.2, 0.7
    expected = Fraction(1, 2) * p ** 4 * kappa(s, t) + Fraction(1, 6) * kappa(s, t) ** 3
    assert lim.kernel(0, 0, s, t) == pytest.approx(float(expected))


@pytest.mark.parametrize("alpha", ["0", "3/10", "7/10"])
def test_normalized_covariance_converges(alpha):
    d = dyn(alpha)
    lim = limiting_covariance((EDGE, TRIANGLE), d.regime, d)
    # corrections decay like N^-alpha, so the approach is slow but monotone far out
    devs = [abs(normalized_exact_covariance(TRIANGLE, TRIANGLE, N, d, 0.2, 0.2) - lim.kernel(1, 1, 0.2, 0.2))
            for N in (10**4, 10**6, 10**8, 10**10)]
    assert devs == sorted(devs, reverse=True)
    assert devs[-1] < 0.02 * lim.kernel(1, 1, 0.2, 0.2)
    edge = [abs(normalized_exact_covariance(EDGE, EDGE, N, d, 0, 0.5) - lim.kernel(0, 0, 0, 0.5))
            for N in (50, 400, 3200)]
    assert edge[0] > edge[1] > edge[2]


def test_radical_coefficient():
    c = RadicalCoefficient.of(Fraction(1, 3), 12)
    assert (c.rational, c.radicand) == (Fraction(2, 3), 3)
    assert float(c) == pytest.approx(2 / 3 * math.sqrt(3))
    assert str(RadicalCoefficient.of(Fraction(1, 2), 2)) == "√2/2"
    assert str(RadicalCoefficient.of(Fraction(1), 2)) == "√2"
    assert RadicalCoefficient.of(Fraction(1, 6), 6).as_pair() == ["1/6", 6]


def test_limit_coefficients_of_worked_example():
    assert str(limit_coefficient(WEDGE, E)) == "√2"
    assert str(limit_coefficient(TRIANGLE, E)) == "√2/2"
    assert str(limit_coefficient(TRIANGLE, T)) == "√6/6"


def test_example_report_half():
    rep = example_report("1/2", 1.0, 1.0)
    assert rep["alpha"] == "1/2"
    assert rep["motifs"]["wedge"]["normalizer_exponent"] == "5/4"
    assert rep["motifs"]["triangle"]["normalizer_exponent"] == "3/4"
    assert [c["coefficient_text"] for c in rep["motifs"]["triangle"]["coefficients"]] == ["√2/2", "√6/6"]
    assert rep["regime"] == "positively but not perfectly correlated"
    assert set(rep["pattern_kernels"]) == {"edge", "triangle"}


@pytest.mark.parametrize("alpha,regime", [
    ("3/10", "perfectly correlated"),
    ("1/2", "positively but not perfectly correlated"),
    ("7/10", "independent"),
])
def test_correlation_regimes(alpha, regime):
    d = dyn(alpha)
    assert correlation_regime(WEDGE, TRIANGLE, d.regime, d) == regime


def test_example_report_rejects_alpha_outside_unit_interval():
    with pytest.raises(ValueError):
        example_report("0", 1.0, 1.0)


def test_limit_rejects_violating_motif():
    d = dyn("1")
    with pytest.raises(RegimeError):
        limiting_covariance((TRIANGLE,), d.regime, d)
