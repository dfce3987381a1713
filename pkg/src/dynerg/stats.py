"""Mergeable streaming moments and comparisons against reference covariances.

The accumulator keeps, around the running mean ``mu``,

* ``m2[a, b] = sum (x_a - mu_a) (x_b - mu_b)``
* ``m3[a, b] = sum (x_a - mu_a)**2 (x_b - mu_b)``
* ``m4[a, b] = sum (x_a - mu_a)**2 (x_b - mu_b)**2``

Merging two accumulators shifts each side's sums to the pooled mean
(pairwise update in the style of Chan et al.); a single sample is a
one-element accumulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    pass


def _shifted(n, m2, m3, m4, c):
    # central sums of one part re-centred by offset c (= part mean - pooled mean)
    d2 = np.diag(m2)
    s3 = m3 + c[None, :] * d2[:, None] + 2.0 * c[:, None] * m2 + n * (c ** 2)[:, None] * c[None, :]
    s4 = (m4
          + 2.0 * c[None, :] * m3
          + (c ** 2)[None, :] * d2[:, None]
          + 2.0 * c[:, None] * m3.T
          + 4.0 * np.outer(c, c) * m2
          + (c ** 2)[:, None] * d2[None, :]
          + n * np.outer(c ** 2, c ** 2))
    s2 = m2 + n * np.outer(c, c)
    return s2, s3, s4


class MomentAccumulator:
    def __init__(self, dim: int):
        self.dim = dim
        self.count = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros((dim, dim))
        self.m3 = np.zeros((dim, dim))
        self.m4 = np.zeros((dim, dim))

    def _check(self, x: np.ndarray) -> None:
        if x.shape[-1] != self.dim:
            raise DimensionError(f"expected dimension {self.dim}, got {x.shape[-1]}")

    def accumulate(self, sample) -> MomentAccumulator:
        x = np.asarray(sample, dtype=float).ravel()
        self._check(x)
        one = MomentAccumulator(self.dim)
        one.count = 1
        one.mean = x.copy()
        return self.merge(one)

    def accumulate_batch(self, samples) -> MomentAccumulator:
        X = np.asarray(samples, dtype=float)
        if X.ndim != 2:
            raise DimensionError("batch must be two-dimensional")
        self._check(X)
        if X.shape[0] == 0:
            return self
        part = MomentAccumulator(self.dim)
        part.count = X.shape[0]
        part.mean = X.mean(axis=0)
        d = X - part.mean
        d2 = d ** 2
        part.m2 = d.T @ d
        part.m3 = d2.T @ d
        part.m4 = d2.T @ d2
        return self.merge(part)

    def merge(self, other: MomentAccumulator) -> MomentAccumulator:
        """Fold ``other`` into ``self`` (in place) and return ``self``."""
        if other.dim != self.dim:
            raise DimensionError("cannot merge accumulators of different dimension")
        if other.count == 0:
            return self
        if self.count == 0:
            self.count = other.count
            self.mean = other.mean.copy()
            self.m2, self.m3, self.m4 = other.m2.copy(), other.m3.copy(), other.m4.copy()
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        a2, a3, a4 = _shifted(self.count, self.m2, self.m3, self.m4, -delta * other.count / n)
        b2, b3, b4 = _shifted(other.count, other.m2, other.m3, other.m4, delta * self.count / n)
        self.mean = self.mean + delta * other.count / n
        self.m2, self.m3, self.m4 = a2 + b2, a3 + b3, a4 + b4
        self.count = n
        return self

    def covariance(self) -> np.ndarray:
        """Unbiased sample covariance."""
        if self.count < 2:
            return np.full((self.dim, self.dim), np.nan)
        return self.m2 / (self.count - 1)

    def variance(self) -> np.ndarray:
        return np.diag(self.covariance()).copy()

    def standard_error_of_mean(self) -> np.ndarray:
        return np.sqrt(self.variance() / self.count)

    def skewness(self) -> np.ndarray:
        n = self.count
        d2 = np.diag(self.m2) / n
        d3 = np.diag(self.m3) / n
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(d2 > 0, d3 / d2 ** 1.5, np.nan)

    def kurtosis(self) -> np.ndarray:
        """Non-excess kurtosis (3 for a normal law)."""
        n = self.count
        d2 = np.diag(self.m2) / n
        d4 = np.diag(self.m4) / n
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(d2 > 0, d4 / d2 ** 2, np.nan)

    def covariance_standard_errors(self) -> np.ndarray:
        """Large-sample standard error of every covariance entry.

        ``Var(s_ab) ~ (mu22_ab - sigma_ab**2) / n`` with the cross fourth moment
        ``mu22`` taken from the data.
        """
        n = self.count
        sigma = self.m2 / n
        mu22 = self.m4 / n
        return np.sqrt(np.clip(mu22 - sigma ** 2, 0.0, None) / n)


def correlation(acc: MomentAccumulator, coord_a: int, coord_b: int) -> float:
    c = acc.m2
    denom = c[coord_a, coord_a] * c[coord_b, coord_b]
    if not denom > 0:
        return float("nan")
    r = c[coord_a, coord_b] / math.sqrt(denom)
    return float(min(1.0, max(-1.0, r)))


@dataclass
class CovarianceComparison:
    z: np.ndarray
    max_abs_z: float
    threshold: float
    passed: bool
    singular: bool

    def summary(self) -> dict:
        return {
            "max_abs_z": self.max_abs_z,
            "threshold": self.threshold,
            "passed": self.passed,
            "singular": self.singular,
        }


def compare_covariance(acc: MomentAccumulator, reference, n_reps: int | None = None,
                       threshold: float = 5.0) -> CovarianceComparison:
    """Entry-wise z-scores of the empirical covariance against ``reference``."""
    n = acc.count if n_reps is None else n_reps
    if n < 100:
        raise ValueError("covariance comparison needs at least 100 replications")
    if n != acc.count:
        raise ValueError(f"accumulator holds {acc.count} samples, not {n}")
    ref = np.asarray(reference, dtype=float)
    emp = acc.covariance()
    se = acc.covariance_standard_errors()
    diff = emp - ref
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(np.abs(diff) > 0, np.inf, 0.0))
    max_abs = float(np.max(np.abs(z))) if z.size else 0.0
    try:
        singular = bool(np.linalg.matrix_rank(emp) < acc.dim)
    except np.linalg.LinAlgError:
        singular = True
    return CovarianceComparison(z, max_abs, threshold, max_abs < threshold, singular)


def mean_z_scores(acc: MomentAccumulator, reference=0.0) -> np.ndarray:
    se = acc.standard_error_of_mean()
    diff = acc.mean - np.asarray(reference, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(se > 0, diff / se, np.where(diff != 0, np.inf, 0.0))
