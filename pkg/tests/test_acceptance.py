"""Acceptance criteria at full scale, one test per criterion.

Tolerances live in :mod:`dynerg.acceptance` (5 SE for means and
covariances, correlation >= 0.95 and < 0.1, |skew| < 0.15,
|kurtosis - 3| < 0.3, 4 sigma for switching frequencies). Each test
prints a single PASS/FAIL line, collected again in the terminal summary.
"""

from __future__ import annotations

import pytest

from dynerg import acceptance

VERDICT_LINES: list[str] = []


@pytest.mark.parametrize("criterion", sorted(acceptance.CRITERIA))
def test_criterion(criterion):
    (verdict,) = acceptance.run_criteria([criterion])
    line = verdict.line()
    VERDICT_LINES.append(line)
    print(line)
    failed = {k: v for k, v in verdict.checks.items() if not v}
    assert verdict.passed, f"{line}\nfailed checks: {failed}\ndetails: {verdict.details}"
