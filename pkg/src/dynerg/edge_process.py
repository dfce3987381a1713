"""Stationary two-state exponential on/off edge process and its moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .scaling import ScalingRegime


@dataclass(frozen=True)
class EdgeDynamics:
    """Rates of one vertex pair.

    ``lambda_on`` is the 1 -> 0 switching rate and ``lambda_off`` the 0 -> 1
    rate before scaling; the effective 0 -> 1 rate at size ``N`` is
    ``rho_N * lambda_off``.
    """

    lambda_on: float
    lambda_off: float
    regime: ScalingRegime
    horizon: float = 1.0

    def __post_init__(self):
        if not (self.lambda_on > 0 and self.lambda_off > 0):
            raise ValueError("switching rates must be positive")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")

    def rates(self, N: int) -> tuple[float, float]:
        """Effective ``(on->off, off->on)`` rates at size ``N``."""
        return self.lambda_on, self.regime.rho(N) * self.lambda_off

    def density_bound(self) -> float:
        """Uniform bound on the sojourn densities (exponential case)."""
        return max(self.lambda_on, self.lambda_off)


def stationary_probability(dyn: EdgeDynamics, N: int) -> float:
    if N < 1:
        raise ValueError("N must be positive")
    on, off = dyn.rates(N)
    return off / (on + off)


def covariance(dyn: EdgeDynamics, N: int, s: float, t: float) -> float:
    """``Cov(a_N(s), a_N(t))`` of the stationary chain."""
    on, off = dyn.rates(N)
    p = off / (on + off)
    return p * (1.0 - p) * math.exp(-(on + off) * abs(t - s))


def switch_probability(dyn: EdgeDynamics, N: int, r: float, s: float) -> float:
    """``P(a_N(s) != a_N(r))``."""
    on, off = dyn.rates(N)
    p = off / (on + off)
    return 2.0 * p * (1.0 - p) * -math.expm1(-(on + off) * abs(s - r))


def double_switch_probability(dyn: EdgeDynamics, N: int, r: float, s: float, t: float) -> float:
    """``P(a_N(s) != a_N(r), a_N(t) != a_N(s))`` for ``r <= s <= t``."""
    on, off = dyn.rates(N)
    lam = on + off
    p = off / lam
    return p * (1.0 - p) * -math.expm1(-lam * (s - r)) * -math.expm1(-lam * (t - s))


def limit_functions(dyn: EdgeDynamics) -> tuple[float, Callable[[float, float], float]]:
    """``(p_star, kappa_star)``: limits of ``p_N / rho_N`` and ``kappa_N / rho_N``.

    With ``rho_N = 1`` the edge law does not depend on ``N`` and the exact
    stationary moments are returned.
    """
    on, off = dyn.lambda_on, dyn.lambda_off
    if dyn.regime.alpha == 0:
        p = off / (on + off)
        lam = on + off
        return p, lambda s, t: p * (1.0 - p) * math.exp(-lam * abs(s - t))
    ratio = off / on
    return ratio, lambda s, t: ratio * math.exp(-on * abs(s - t))


def assumption2_constant(dyn: EdgeDynamics) -> float:
    """``(p_star(0) + 2) P exp(P T)`` with ``P`` the sojourn-density bound."""
    p_star, _ = limit_functions(dyn)
    P = dyn.density_bound()
    return (p_star + 2.0) * P * math.exp(P * dyn.horizon)


@dataclass(frozen=True)
class Trajectory:
    initial_state: int
    flip_times: np.ndarray

    def __post_init__(self):
        ft = np.asarray(self.flip_times, dtype=float)
        if ft.size and (np.any(np.diff(ft) <= 0) or ft[0] <= 0):
            raise ValueError("flip times must be strictly increasing and positive")
        object.__setattr__(self, "flip_times", ft)

    def state_at(self, t: float | np.ndarray):
        """Right-continuous state: flips at exactly ``t`` are already applied."""
        n = np.searchsorted(self.flip_times, t, side="right")
        return (self.initial_state + n) % 2


@dataclass
class FlipBatch:
    """Flips of many independent edges, in per-edge sampling order."""

    initial_states: np.ndarray  # uint8, one per edge
    edge_index: np.ndarray  # int64
    times: np.ndarray  # float64

    def time_ordered(self) -> FlipBatch:
        order = np.argsort(self.times, kind="stable")
        return FlipBatch(self.initial_states, self.edge_index[order], self.times[order])

    def states_at(self, t: float) -> np.ndarray:
        flips = np.bincount(self.edge_index[self.times <= t], minlength=self.initial_states.size)
        return (self.initial_states.astype(np.int64) + flips) % 2


def sample_flips(dyn: EdgeDynamics, N: int, n_edges: int, rng: np.random.Generator) -> FlipBatch:
    """Sample ``n_edges`` independent stationary trajectories on ``[0, T]``.

    Holding times are drawn in rounds, one per still-active edge, so the
    draw order is fixed by the stream alone.
    """
    on, off = dyn.rates(N)
    p = off / (on + off)
    state = (rng.random(n_edges) < p).astype(np.uint8)
    initial = state.copy()
    active = np.arange(n_edges, dtype=np.int64)
    clock = np.zeros(n_edges)
    cur = state.copy()
    idx_parts, time_parts = [], []
    T = dyn.horizon
    while active.size:
        rate = np.where(cur == 1, on, off)
        clock = clock + rng.exponential(1.0 / rate)
        keep = clock <= T
        active, clock, cur = active[keep], clock[keep], 1 - cur[keep]
        idx_parts.append(active)
        time_parts.append(clock)
    edge_index = np.concatenate(idx_parts) if idx_parts else np.empty(0, np.int64)
    times = np.concatenate(time_parts) if time_parts else np.empty(0)
    return FlipBatch(initial, edge_index.astype(np.int64), times)


def sample_trajectory(dyn: EdgeDynamics, N: int, rng: np.random.Generator) -> Trajectory:
    batch = sample_flips(dyn, N, 1, rng)
    return Trajectory(int(batch.initial_states[0]), np.sort(batch.times))
