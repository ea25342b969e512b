"""Capacity-region evaluators and inner-bound samplers.

Region evaluators check the defining rate inequalities of a model at a given
auxiliary chain and report the leakage floors; the sampler explores chains
(simplex draws plus the uniform and vertex corner cases, which often attain
the optima) and emits extreme achievable points.  Everything here is
achievable-only: no converse certificates are produced.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._rng import generator
from .errors import DimensionMismatch
from .probability import ChainSpec, Channel, Distribution, mutual_info, mutual_information

MODELS = ("bcc_equivocation", "bcc_leaked", "bcd", "smc")


@dataclass(frozen=True)
class RegionPoint:
    """One achievable point: rates, its equivocation or leakage values, and
    the witnessing auxiliary chain."""

    rates: tuple[float, ...]
    floors: tuple[float, ...]
    chain: ChainSpec
    model: str


def _min_common(chain: ChainSpec) -> float:
    return min(mutual_info(chain, "I(U;Y)"), mutual_info(chain, "I(U;Z)"))


def region_point(
    chain: ChainSpec,
    rates: Sequence[float],
    model: str,
    index_sets: Iterable[Iterable[int]] | None = None,
) -> tuple[bool, tuple[float, ...]]:
    """Evaluate a model's rate inequalities at the given chain.

    Returns (feasible, floors).  For the secrecy models the floors are the
    smallest achievable leakage (or largest equivocation) values at these
    rates; for bcd the floors tuple is empty.
    """
    if model not in MODELS:
        raise DimensionMismatch(f"model must be one of {MODELS}, got {model!r}")
    rates = tuple(float(r) for r in rates)
    i_vy = mutual_info(chain, "I(V;Y|U)")
    i_vz = mutual_info(chain, "I(V;Z|U)")
    common = _min_common(chain)

    if model == "bcd":
        r_c, r_p = rates
        feasible = r_c <= common + 1e-12 and r_c + r_p <= i_vy + common + 1e-12
        return feasible, ()

    if model in ("bcc_equivocation", "bcc_leaked"):
        r_0, r_1 = rates[0], rates[1]
        feasible = r_0 <= common + 1e-12 and r_0 + r_1 <= i_vy + common + 1e-12
        if model == "bcc_equivocation":
            ceiling = min(max(i_vy - i_vz, 0.0), r_1)
            return feasible, (ceiling,)
        floor = max(r_1 - i_vy + i_vz, 0.0)
        return feasible, (floor,)

    # smc: rates are R_0..R_T, one floor per requested index set.
    t = len(rates) - 1
    if index_sets is None:
        index_sets = [
            c for r in range(1, t + 1) for c in itertools.combinations(range(1, t + 1), r)
        ]
    feasible = rates[0] <= common + 1e-12 and sum(rates) <= i_vy + common + 1e-12
    floors = tuple(
        max(sum(rates[i] for i in index) + i_vz - i_vy, 0.0) for index in index_sets
    )
    return feasible, floors


def _sample_simplex(rng: np.random.Generator, size: int) -> np.ndarray:
    """Normalized exponentials of standard normals: smooth interior coverage."""
    w = np.exp(rng.standard_normal(size))
    return w / w.sum()


def _deterministic_rows(count: int, size: int) -> list[np.ndarray]:
    """Uniform plus vertex distributions, cycled to the requested count."""
    rows = [np.full(size, 1.0 / size)]
    for i in range(size):
        row = np.zeros(size)
        row[i] = 1.0
        rows.append(row)
    return [rows[i % len(rows)] for i in range(count)]


def region_sample(
    w_y: Channel,
    w_z: Channel,
    model: str,
    u_size: int,
    v_size: int,
    samples: int,
    seed: int,
) -> list[RegionPoint]:
    """Sample auxiliary chains and emit extreme achievable points.

    P_U, the rows of P_{V|U}, and the rows of Xi are drawn from a smooth
    simplex law; the first few chains deterministically use the uniform
    distribution with an identity-like Xi and vertex rows, since boundary
    chains often attain the optima.
    """
    if model not in MODELS:
        raise DimensionMismatch(f"model must be one of {MODELS}, got {model!r}")
    if w_y.input_size != w_z.input_size:
        raise DimensionMismatch("the broadcast marginals must share the input alphabet")
    x_size = w_y.input_size
    rng = generator(seed)
    points: list[RegionPoint] = []
    for index in range(samples):
        if index == 0:
            # Deterministic corner: uniform layers, identity-like artificial channel.
            p_u = Distribution.uniform(u_size)
            p_v_given_u = Channel(np.vstack(_deterministic_rows(u_size, v_size)[:1] * u_size))
            xi_rows = []
            for v in range(v_size):
                row = np.zeros(x_size)
                row[v % x_size] = 1.0
                xi_rows.append(row)
            xi = Channel(np.vstack(xi_rows))
        elif index == 1:
            p_u = Distribution.uniform(u_size)
            p_v_given_u = Channel(np.vstack(_deterministic_rows(u_size, v_size)))
            xi = Channel(np.vstack(_deterministic_rows(v_size, x_size)))
        else:
            p_u = Distribution(_sample_simplex(rng, u_size))
            p_v_given_u = Channel(
                np.vstack([_sample_simplex(rng, v_size) for _ in range(u_size)])
            )
            xi = Channel(np.vstack([_sample_simplex(rng, x_size) for _ in range(v_size)]))
        chain = ChainSpec(p_u, p_v_given_u, xi, w_y, w_z)
        points.append(_extreme_point(chain, model))
    return points


def _extreme_point(chain: ChainSpec, model: str) -> RegionPoint:
    i_vy = mutual_info(chain, "I(V;Y|U)")
    i_vz = mutual_info(chain, "I(V;Z|U)")
    common = _min_common(chain)
    if model == "bcd":
        return RegionPoint((common, i_vy), (), chain, model)
    if model == "bcc_equivocation":
        r_1 = i_vy
        r_e = min(max(i_vy - i_vz, 0.0), r_1)
        return RegionPoint((common, r_1), (r_e,), chain, model)
    if model == "bcc_leaked":
        r_1 = i_vy
        return RegionPoint((common, r_1), (max(r_1 - i_vy + i_vz, 0.0),), chain, model)
    # smc with a single secret slot: maximal total rate and its leakage floor.
    return RegionPoint((common, i_vy), (max(i_vy + i_vz - i_vy, 0.0),), chain, model)


def max_secrecy_rate(points: Iterable[RegionPoint]) -> float:
    """Largest zero-floor confidential rate among sampled points."""
    best = 0.0
    for point in points:
        r_1 = point.rates[-1]
        floor = point.floors[0] if point.floors else 0.0
        best = max(best, r_1 - floor)
    return best


def secrecy_capacity_degraded(w_b: Channel, w_e: Channel, grid: int = 10_001) -> float:
    """max over a binary-input grid of [I(X;Y) - I(X;Z)]_+, in nats.

    Only binary-input channels take the 1-D grid route; use region_sample
    for general input alphabets.
    """
    if w_b.input_size != 2 or w_e.input_size != 2:
        raise DimensionMismatch("the grid evaluator requires binary-input channels")
    lam = np.linspace(0.0, 1.0, grid)
    best = 0.0
    for val in lam:
        p = Distribution(np.array([val, 1.0 - val]))
        gap = mutual_information(p, w_b) - mutual_information(p, w_e)
        best = max(best, gap)
    return max(best, 0.0)
