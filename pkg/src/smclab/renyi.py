"""Renyi/Shannon entropies, divergence functionals, and finite-size entropy bounds.

The order-(1+rho) entropies used by the leakage bounds are

    H_{1+rho}(A)   = -(1/rho) ln sum_a P(a)^{1+rho}
    H_{1+rho}(A|B) = -(1/rho) ln sum_{a,b} P_B(b) P_{A|B}(a|b)^{1+rho}

with rho = 0 handled exactly as the Shannon (conditional) entropy rather
than as a numeric limit.  The matching divergence functionals are

    psi(rho | Q || P) = ln sum_a Q(a)^{1+rho} P(a)^{-rho}
    psi(rho | W, p)   = ln sum_x p(x) exp(psi(rho | W_x || W_p))

where W_p is the average output distribution.  +infinity is represented by
math.inf, which propagates through comparisons and serializes as "inf".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NegativeRho, RangeViolation
from .probability import Channel, Distribution, _xlogy, push_forward


@dataclass(frozen=True, eq=False)
class JointSource:
    """A joint law over a tuple of finite variables with designated A/B roles.

    probs is a Distribution over the product alphabet in little-endian
    mixed-radix order (coordinate 0 is the least significant digit).
    Coordinates listed in a_axes form the A block, those in b_axes the B
    block; remaining coordinates are marginalized out.
    """

    shape: tuple[int, ...]
    probs: Distribution
    a_axes: tuple[int, ...]
    b_axes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "a_axes", tuple(int(a) for a in self.a_axes))
        object.__setattr__(self, "b_axes", tuple(int(b) for b in self.b_axes))
        if math.prod(shape) != self.probs.alphabet_size:
            raise DimensionMismatch("shape product does not match probs length")
        axes = self.a_axes + self.b_axes
        if len(set(axes)) != len(axes):
            raise DimensionMismatch("a_axes and b_axes must be disjoint")
        if any(ax < 0 or ax >= len(shape) for ax in axes):
            raise DimensionMismatch("variable role out of range")
        if not self.a_axes:
            raise DimensionMismatch("at least one coordinate must form A")

    def table(self) -> np.ndarray:
        """The joint law as an ndarray whose axis i is coordinate i."""
        return self.probs.probs.reshape(self.shape, order="F")

    def ab_table(self) -> np.ndarray:
        """2-D view (|A|, |B|) after marginalizing unassigned coordinates."""
        t = self.table()
        other = [i for i in range(len(self.shape)) if i not in self.a_axes + self.b_axes]
        if other:
            t = t.sum(axis=tuple(other), keepdims=True)
        t = np.transpose(t, self.a_axes + self.b_axes + tuple(other))
        a_size = math.prod(self.shape[i] for i in self.a_axes)
        return t.reshape(a_size, -1)


def dist_renyi_entropy(p: Distribution, rho: float) -> float:
    """Order-(1+rho) Renyi entropy of a plain distribution, in nats."""
    if rho < 0:
        raise NegativeRho(f"rho must be >= 0, got {rho}")
    probs = p.probs[p.probs > 0]
    if rho == 0:
        return -float(_xlogy(probs, probs).sum())
    return -math.log(float((probs ** (1.0 + rho)).sum())) / rho


def renyi_entropy(src: JointSource, rho: float, conditional: bool = False) -> float:
    """H_{1+rho}(A) or H_{1+rho}(A|B) of the joint source, in nats."""
    if rho < 0:
        raise NegativeRho(f"rho must be >= 0, got {rho}")
    ab = src.ab_table()
    if not conditional:
        return dist_renyi_entropy(Distribution(ab.sum(axis=1)), rho)
    p_b = ab.sum(axis=0)
    mask = p_b > 0
    if rho == 0:
        joint = ab[:, mask]
        cond = joint / p_b[mask]
        return -float(_xlogy(joint, np.where(cond > 0, cond, 1.0)).sum())
    inner = (ab[:, mask] ** (1.0 + rho)).sum(axis=0)
    return -math.log(float((p_b[mask] ** (-rho) * inner).sum())) / rho


def psi_divergence(q: Distribution, p: Distribution, rho: float) -> float:
    """psi(rho | Q || P) = ln sum Q^{1+rho} P^{-rho}; +inf on support mismatch."""
    if rho < 0:
        raise NegativeRho(f"rho must be >= 0, got {rho}")
    if q.alphabet_size != p.alphabet_size:
        raise DimensionMismatch("psi divergence requires a common alphabet")
    qa, pa = q.probs, p.probs
    if np.any((qa > 0) & (pa == 0)):
        return math.inf
    mask = qa > 0
    return math.log(float((qa[mask] ** (1.0 + rho) * pa[mask] ** (-rho)).sum()))


def kl_divergence(q: Distribution, p: Distribution) -> float:
    """D(Q || P) in nats; +inf on support mismatch."""
    if q.alphabet_size != p.alphabet_size:
        raise DimensionMismatch("KL divergence requires a common alphabet")
    qa, pa = q.probs, p.probs
    if np.any((qa > 0) & (pa == 0)):
        return math.inf
    mask = qa > 0
    return float((qa[mask] * np.log(qa[mask] / pa[mask])).sum())


def divergence(q: Distribution, p: Distribution, rho: float, kl: bool = False) -> float:
    """psi(rho | Q || P), or D(Q || P) when the kl flag is set."""
    if kl:
        return kl_divergence(q, p)
    return psi_divergence(q, p, rho)


def psi_channel(w: Channel, p: Distribution, rho: float) -> float:
    """psi(rho | W, p) = ln sum_x p(x) exp(psi(rho | W_x || W_p))."""
    if rho < 0:
        raise NegativeRho(f"rho must be >= 0, got {rho}")
    if p.alphabet_size != w.input_size:
        raise DimensionMismatch("input distribution does not match channel")
    w_p = push_forward(p, w).probs
    total = 0.0
    for x, px in enumerate(p.probs):
        if px == 0.0:
            continue
        row = w.rows[x]
        mask = row > 0
        # px > 0 forces supp(W_x) inside supp(W_p), so no division by zero here.
        total += px * float((row[mask] ** (1.0 + rho) * w_p[mask] ** (-rho)).sum())
    return math.log(total)


def lemma11_bounds(eps1: float, eps2: float, m: int, rho: float) -> tuple[float, float]:
    """Finite-size entropy bounds parameterized by the mass eps2 of pairs
    whose conditional probability reaches e^{eps1}/m.

    Returns (upper bound on H(A|B), lower bound on H_{1+rho}(A|B)), both in
    nats:

        upper = ln m - eps2 (e^{-eps1} - 1 + eps1)
        lower = -(1/rho) ln((1 - eps2) e^{rho eps1} / m^rho + eps2)

    The upper bound holds for joints whose concentrated mass is at least
    eps2, the lower bound for mass at most eps2; at mass exactly eps2 both
    apply simultaneously.
    """
    if eps1 <= 0:
        raise RangeViolation(f"eps1 must be > 0, got {eps1}")
    if not 0 < eps2 <= 1:
        raise RangeViolation(f"eps2 must lie in (0, 1], got {eps2}")
    if m < 1 or int(m) != m:
        raise RangeViolation(f"m must be a positive integer, got {m}")
    if not 0 < rho <= 1:
        raise RangeViolation(f"rho must lie in (0, 1], got {rho}")
    upper = math.log(m) - eps2 * (math.exp(-eps1) - 1.0 + eps1)
    lower = -math.log((1.0 - eps2) * math.exp(rho * eps1) / m**rho + eps2) / rho
    return upper, lower


def lemma11_threshold(eps1: float, m: int) -> float:
    """Conditional-probability threshold e^{eps1}/m defining the class event."""
    return math.exp(eps1) / m


def lemma11_event_mass(src: JointSource, eps1: float, m: int) -> float:
    """Mass of {(a, b) : P(a|b) >= e^{eps1}/m} under the joint law."""
    ab = src.ab_table()
    if ab.shape[0] != m:
        raise DimensionMismatch("A alphabet does not match m")
    p_b = ab.sum(axis=0)
    thr = lemma11_threshold(eps1, m)
    mask_b = p_b > 0
    cond = ab[:, mask_b] / p_b[mask_b]
    return float(ab[:, mask_b][cond >= thr].sum())


def sample_lemma11_joint(
    eps1: float,
    eps2: float,
    m: int,
    rng: np.random.Generator,
    b_size: int | None = None,
) -> JointSource:
    """Draw a random joint law on the boundary of the lemma11_bounds class, i.e.
    with high-conditional-probability mass exactly eps2.

    Both entropy bounds are only simultaneously sharp there: the upper bound
    on H(A|B) needs at least eps2 of concentrated mass, the lower bound on
    H_{1+rho}(A|B) at most eps2.  Ordinary conditioning values get rows
    resampled until every entry sits strictly below the class threshold; one
    extra value of weight exactly eps2 carries a row supported entirely on
    above-threshold entries.
    """
    thr = lemma11_threshold(eps1, m)
    nb = int(b_size) if b_size is not None else int(rng.integers(1, 5))
    rows = np.empty((nb, m))
    for b in range(nb):
        while True:
            row = rng.dirichlet(np.ones(m))
            if row.max() < thr * (1.0 - 1e-9):
                rows[b] = row
                break
    p_b = rng.dirichlet(np.ones(nb))
    spike = np.zeros(m)
    if 2.0 * thr <= 1.0 and rng.random() < 0.5:
        # two-point offending row: both support entries at or above threshold
        u = rng.uniform(thr, 1.0 - thr)
        first, second = rng.choice(m, size=2, replace=False)
        spike[first], spike[second] = u, 1.0 - u
    else:
        spike[rng.integers(m)] = 1.0
    rows = np.vstack([rows, spike])
    p_b = np.concatenate([p_b * (1.0 - eps2), [eps2]])
    joint = rows * p_b[:, None]  # (B, A)
    flat = joint.T.reshape(-1, order="F")  # index = a + b*m
    return JointSource(shape=(m, nb + 1), probs=Distribution(flat), a_axes=(0,), b_axes=(1,))
