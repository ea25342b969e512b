"""Gallager-type exponential-moment functionals over Markov chains.

The two functionals, in nats, are

    phi(rho, P_{Z|V}, P_{V|U}, P_U)
        = ln sum_u P_U(u) sum_z ( sum_v P_{V|U}(v|u) P_{Z|V}(z|v)^{1/(1-rho)} )^{1-rho}

    psi(rho, P_{Z|V}, P_{V|U}, P_U)
        = ln sum_u P_U(u) sum_v P_{V|U}(v|u)
             sum_z P_{Z|V}(z|v)^{1+rho} P_{Z|U}(z|u)^{-rho}

with P_{Z|U} the induced kernel.  phi is essentially Gallager's E_0: it is
defined for rho in [-1, 1) (negative rho drives the error exponents), is
convex in rho with phi(0) = 0, and exp(phi) is concave in the input law.
psi is defined for rho in [0, 1] and satisfies psi <= phi on (0, 1).

phi_max maximizes the single-level exp(phi) over the input distribution by a
multiplicative fixed-point ascent with a projected-gradient fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, RhoOutOfRange
from .probability import Channel, Distribution, compose

PHI_MAX_TOL = 1e-12
PHI_MAX_ITERATIONS = 10_000


def _check_two_level(p_z_given_v: Channel, p_v_given_u: Channel, p_u: Distribution):
    if p_u.alphabet_size != p_v_given_u.input_size:
        raise DimensionMismatch("p_u does not match p_v_given_u input")
    if p_v_given_u.output_size != p_z_given_v.input_size:
        raise DimensionMismatch("p_v_given_u output does not match p_z_given_v input")


def _exp_phi_rows(rho: float, log_rows: np.ndarray, weights: np.ndarray) -> float:
    """sum_z (sum_v weights(v) W(z|v)^{1/(1-rho)})^{1-rho}, computed stably.

    Factoring the per-column maximum keeps the inner power sums in (0, 1]
    even as 1/(1-rho) blows up near rho = 1.
    """
    sup = weights > 0
    lr = log_rows[sup]
    wv = weights[sup]
    m = 1.0 / (1.0 - rho)
    col_max = lr.max(axis=0)  # (Z,)
    usable = np.isfinite(col_max)
    ratio = lr[:, usable] - col_max[usable]  # <= 0; -inf where W = 0
    s = (wv[:, None] * np.exp(m * ratio)).sum(axis=0)
    return float((np.exp(col_max[usable]) * s ** (1.0 - rho)).sum())


def phi_single(rho: float, w: Channel, p: Distribution) -> float:
    """Single-level phi(rho, P_{Z|L}, P_L) in nats."""
    if not -1.0 <= rho < 1.0:
        raise RhoOutOfRange(f"phi requires rho in [-1, 1), got {rho}")
    if p.alphabet_size != w.input_size:
        raise DimensionMismatch("input distribution does not match channel")
    if rho == 0.0:
        return 0.0
    with np.errstate(divide="ignore"):
        log_rows = np.log(w.rows)
    return math.log(_exp_phi_rows(rho, log_rows, p.probs))


def phi(rho: float, p_z_given_v: Channel, p_v_given_u: Channel, p_u: Distribution) -> float:
    """Two-level phi(rho, P_{Z|V}, P_{V|U}, P_U) in nats.

    A trivial |U| = 1 layer reduces this to the single-level functional.
    Negative rho gives the phi(-|rho|, .) values used by the error exponents.
    """
    if not -1.0 <= rho < 1.0:
        raise RhoOutOfRange(f"phi requires rho in [-1, 1), got {rho}")
    _check_two_level(p_z_given_v, p_v_given_u, p_u)
    if rho == 0.0:
        return 0.0
    with np.errstate(divide="ignore"):
        log_rows = np.log(p_z_given_v.rows)
    total = 0.0
    for u, pu in enumerate(p_u.probs):
        if pu == 0.0:
            continue
        total += pu * _exp_phi_rows(rho, log_rows, p_v_given_u.rows[u])
    return math.log(total)


def psi_single(rho: float, w: Channel, p: Distribution) -> float:
    """Single-level psi(rho, P_{Z|L}, P_L) in nats; equals psi(rho | W, P_L)."""
    if not 0.0 <= rho <= 1.0:
        raise RhoOutOfRange(f"psi requires rho in [0, 1], got {rho}")
    if p.alphabet_size != w.input_size:
        raise DimensionMismatch("input distribution does not match channel")
    if rho == 0.0:
        return 0.0
    p_z = p.probs @ w.rows
    total = 0.0
    for ell, pl in enumerate(p.probs):
        if pl == 0.0:
            continue
        row = w.rows[ell]
        mask = row > 0
        if np.any(mask & (p_z == 0)):
            return math.inf
        total += pl * float((row[mask] ** (1.0 + rho) * p_z[mask] ** (-rho)).sum())
    return math.log(total)


def psi(rho: float, p_z_given_v: Channel, p_v_given_u: Channel, p_u: Distribution) -> float:
    """Two-level psi(rho, P_{Z|V}, P_{V|U}, P_U) in nats.

    Returns +inf when some z has a vanishing induced P_{Z|U}(z|u) but a
    positive numerator inside the weighted sum.
    """
    if not 0.0 <= rho <= 1.0:
        raise RhoOutOfRange(f"psi requires rho in [0, 1], got {rho}")
    _check_two_level(p_z_given_v, p_v_given_u, p_u)
    if rho == 0.0:
        return 0.0
    p_z_given_u = compose(p_v_given_u, p_z_given_v)
    total = 0.0
    for u, pu in enumerate(p_u.probs):
        if pu == 0.0:
            continue
        denom = p_z_given_u.rows[u]
        for v, pv in enumerate(p_v_given_u.rows[u]):
            if pv == 0.0:
                continue
            row = p_z_given_v.rows[v]
            mask = row > 0
            if np.any(mask & (denom == 0)):
                return math.inf
            total += pu * pv * float((row[mask] ** (1.0 + rho) * denom[mask] ** (-rho)).sum())
    return math.log(total)


def _exp_phi_objective(weights: np.ndarray, powered: np.ndarray, rho: float) -> float:
    """exp(phi) for input weights against pre-powered channel rows."""
    inner = weights @ powered
    return float((inner ** (1.0 - rho)).sum())


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    cond = u - (css - 1.0) / k > 0
    rho_idx = np.nonzero(cond)[0][-1]
    theta = (css[rho_idx] - 1.0) / (rho_idx + 1.0)
    return np.maximum(v - theta, 0.0)


@dataclass(frozen=True)
class PhiMaxResult:
    value: float
    argmax: Distribution
    iterations: int


def phi_max(rho: float, p_z_given_v: Channel) -> PhiMaxResult:
    """Input-optimized single-level phi: ln max_{P_V} exp(phi(rho, W, P_V)).

    The objective exp(phi) is concave in P_V, so a multiplicative
    fixed-point ascent (each weight rescaled by its per-symbol contribution
    to the objective) converges to the maximum; a simplex-projected gradient
    step covers the rare non-monotone iteration.
    """
    if not 0.0 < rho < 1.0:
        raise RhoOutOfRange(f"phi_max requires rho strictly inside (0, 1), got {rho}")
    powered = p_z_given_v.rows ** (1.0 / (1.0 - rho))  # (V, Z)
    nv = p_z_given_v.input_size
    p = np.full(nv, 1.0 / nv)
    value = _exp_phi_objective(p, powered, rho)
    for iteration in range(1, PHI_MAX_ITERATIONS + 1):
        inner = p @ powered
        mask = inner > 0
        grad = powered[:, mask] @ inner[mask] ** (-rho)  # per-symbol contribution
        total = float(p @ grad)
        if total <= 0:
            break
        candidate = p * grad / total
        cand_value = _exp_phi_objective(candidate, powered, rho)
        if cand_value + 1e-15 < value:
            # Oscillation guard: fall back to a projected-gradient step.
            step = 1.0
            while step > 1e-12:
                candidate = _project_simplex(p + step * grad / total)
                cand_value = _exp_phi_objective(candidate, powered, rho)
                if cand_value >= value:
                    break
                step /= 2.0
            if cand_value < value:
                return PhiMaxResult(math.log(value), Distribution(p), iteration)
        converged = abs(math.log(cand_value) - math.log(value)) < PHI_MAX_TOL
        p, value = candidate, cand_value
        if converged:
            return PhiMaxResult(math.log(value), Distribution(p), iteration)
    raise ConvergenceFailure(
        f"phi_max did not converge within {PHI_MAX_ITERATIONS} iterations"
    )
