"""Error and secrecy exponents and the finite-blocklength leakage bounds.

All exponents share the same 1-D maximization over rho in [0, 1]: a coarse
101-point grid (densified geometrically near 0 to catch shallow positive
slopes) followed by golden-section refinement of the bracketing interval
down to |delta rho| < 1e-9.  A nonpositive objective everywhere yields 0.

Where a first-construction bound would need phi at rho = 1 (outside its
domain), the evaluation point is clamped to 1 - 1e-6 and the result is an
inner approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import gallager
from .errors import DimensionMismatch, RhoOutOfRange
from .probability import ChainSpec, Channel, Distribution
from .renyi import JointSource, renyi_entropy

LN2 = math.log(2.0)
RHO_REFINE_TOL = 1e-9
PHI_RHO_CEILING = 1.0 - 1e-6

# Coarse grid: uniform over [0, 1] plus geometric points near 0 so that an
# objective with slope epsilon at 0 still shows a positive sample.
_BASE_GRID = np.unique(np.concatenate([np.linspace(0.0, 1.0, 101), np.logspace(-9, -2, 15)]))

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section_max(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > RHO_REFINE_TOL:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def maximize_over_rho(
    objective: Callable[[float], float], hi: float = 1.0
) -> tuple[float, float]:
    """Maximize over rho in [0, hi]; returns (value clamped at 0, argmax rho)."""
    grid = _BASE_GRID[_BASE_GRID <= hi]
    if grid[-1] < hi:
        grid = np.append(grid, hi)
    values = np.array([objective(r) for r in grid])
    best = int(np.argmax(values))
    lo = grid[best - 1] if best > 0 else grid[0]
    up = grid[best + 1] if best + 1 < grid.size else grid[-1]
    rho_star, val = (grid[best], values[best]) if up <= lo else _golden_section_max(objective, lo, up)
    if values[best] > val:
        rho_star, val = grid[best], values[best]
    if val <= 0.0:
        return 0.0, 0.0
    return float(val), float(rho_star)


@dataclass(frozen=True)
class RateSpec:
    """Rates of the T secret messages plus the working pair (R_p, R_c).

    r lists R_0 ... R_T in nats per channel use.  Membership in the working
    rate set requires R_c + R_p = sum(r), R_c >= R_0, and nonnegativity.
    """

    t: int
    r: tuple[float, ...]
    r_p: float
    r_c: float

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        if len(self.r) != self.t + 1:
            raise DimensionMismatch(f"expected {self.t + 1} rates R_0..R_T, got {len(self.r)}")
        if any(x < 0 for x in self.r) or self.r_p < 0 or self.r_c < 0:
            raise DimensionMismatch("rates must be nonnegative")
        if self.r_c < self.r[0] - 1e-12:
            raise DimensionMismatch("R_c must be at least R_0")
        if abs(self.r_c + self.r_p - sum(self.r)) > 1e-9:
            raise DimensionMismatch("R_c + R_p must equal the total rate")

    def secret_sum(self, index_set: Iterable[int]) -> float:
        return sum(self.r[i] for i in index_set)


class SourceProfile:
    """Per-subset conditional Renyi profiles rho -> H_{1+rho}(S_{I^c} | S_I, S_0).

    Built either exactly from a joint law over (S_0, ..., S_T) or as the
    uniform-independent profile sum_{i in I^c} n R_i (constant in rho).
    """

    def __init__(self, t: int, fn: Callable[[frozenset, float], float]):
        self.t = t
        self._fn = fn

    def value(self, index_set: Iterable[int], rho: float) -> float:
        index = frozenset(int(i) for i in index_set)
        if not index or not index <= set(range(1, self.t + 1)):
            raise DimensionMismatch(f"index set {sorted(index)} not a nonempty subset of 1..{self.t}")
        return self._fn(index, rho)

    @classmethod
    def uniform_independent(cls, rates: Sequence[float], n: int = 1) -> "SourceProfile":
        """Profile of independent uniform messages: value = sum_{i in I^c} n R_i."""
        rates = [float(x) for x in rates]
        t = len(rates)

        def fn(index: frozenset, rho: float) -> float:
            return sum(n * rates[i - 1] for i in range(1, t + 1) if i not in index)

        return cls(t, fn)

    @classmethod
    def from_joint(cls, source: JointSource) -> "SourceProfile":
        """Exact profile of a joint law whose coordinate 0 is the common message."""
        t = len(source.shape) - 1
        if t < 1:
            raise DimensionMismatch("joint source needs at least one secret coordinate")

        def fn(index: frozenset, rho: float) -> float:
            a_axes = tuple(i for i in range(1, t + 1) if i not in index)
            if not a_axes:
                return 0.0
            b_axes = (0,) + tuple(sorted(index))
            src = JointSource(source.shape, source.probs, a_axes, b_axes)
            return renyi_entropy(src, rho, conditional=True)

        return cls(t, fn)


def _joint_input_layer(chain: ChainSpec) -> tuple[np.ndarray, Distribution]:
    """The compound input (u, v) for the joint-decoding phi term.

    Pairs are packed little-endian with u as digit 0; returns the V-component
    of each pair and the joint law P_{UV}.
    """
    nu, nv = chain.u_size, chain.v_size
    weights = np.empty(nu * nv)
    rows_v = np.empty(nu * nv, dtype=int)
    for v in range(nv):
        for u in range(nu):
            idx = u + v * nu
            weights[idx] = chain.p_u.probs[u] * chain.p_v_given_u.rows[u, v]
            rows_v[idx] = v
    return rows_v, Distribution(weights)


def error_exponent_bob(r_p: float, r_c: float, chain: ChainSpec) -> float:
    """Exponent of Bob's decoding error under superposition random coding.

    max over rho in [0,1] of
        min[ -rho R_p - phi(-rho, P_{Y|V}, P_{V|U}, P_U),
             -rho (R_p + R_c) - phi(-rho, P_{Y|UV}, P_{UV}) ].
    """
    w_yv = chain.p_y_given_v
    rows_v, p_uv = _joint_input_layer(chain)
    w_joint = Channel(w_yv.rows[rows_v])

    def objective(rho: float) -> float:
        a = -rho * r_p - gallager.phi(-rho, w_yv, chain.p_v_given_u, chain.p_u)
        b = -rho * (r_p + r_c) - gallager.phi_single(-rho, w_joint, p_uv)
        return min(a, b)

    return maximize_over_rho(objective)[0]


def error_exponent_eve(r_c: float, chain: ChainSpec) -> float:
    """Exponent of Eve's common-message decoding error:
    max over rho of -rho R_c - phi(-rho, P_{Z|U}, P_U)."""
    w_zu = chain.p_z_given_u

    def objective(rho: float) -> float:
        return -rho * r_c - gallager.phi_single(-rho, w_zu, chain.p_u)

    return maximize_over_rho(objective)[0]


def secrecy_exponent(r: float, chain: ChainSpec, kernel: str = "phi") -> float:
    """Exponential decay rate of the leaked information at dummy rate r:
    max over rho of rho r - kernel(rho, P_{Z|V}, P_{V|U}, P_U).

    kernel "phi" gives the generally valid exponent, kernel "psi" the larger
    one available when the rate pair sits in the simplified regime.
    """
    if kernel == "phi":
        fn = lambda rho: gallager.phi(rho, chain.p_z_given_v, chain.p_v_given_u, chain.p_u)
        hi = PHI_RHO_CEILING
    elif kernel == "psi":
        fn = lambda rho: gallager.psi(rho, chain.p_z_given_v, chain.p_v_given_u, chain.p_u)
        hi = 1.0
    else:
        raise DimensionMismatch(f"kernel must be 'phi' or 'psi', got {kernel!r}")

    def objective(rho: float) -> float:
        return rho * r - fn(rho)

    return maximize_over_rho(objective, hi=hi)[0]


def leakage_bound(
    construction: str,
    chain: ChainSpec,
    profile: SourceProfile,
    index_set: Iterable[int],
    rho: float,
    *,
    log_b1: float = 0.0,
    n: int = 1,
    include_overhead: bool = True,
    gallager_value: float | None = None,
) -> float:
    """Finite-blocklength bound on I(S_I : Z | S_0), in nats.

    construction "first" (message splitting through the affine layer):
        [ ln|B_1| + phi(rho, .)/rho - H_{1+rho}(S_{I^c}|S_I,S_0) ]_+ + (T+3) ln2 / rho
    construction "second" (direct satellite codewords, ln|B_1| absent):
        (T+3) ln2 / rho + [ psi(rho, .)/rho - H_{1+rho}(S_{I^c}|S_I,S_0) ]_+

    The blocklength enters as n times the single-letter phi/psi; profiles
    are taken in absolute nats.  include_overhead=False switches to the
    ensemble-average form (1/rho) exp(rho ln|B_1| - rho H + n phi) without
    the additive code-selection overhead.  gallager_value, when given,
    replaces the chain-computed n-letter phi/psi.

    The (T+3) ln 2 overhead constant is the final displayed form of the
    code-selection step; the intermediate per-message inequality carries
    2^{T+2} before its last weakening, a gap kept as documented rather than
    resolved.
    """
    if not 0.0 < rho <= 1.0:
        raise RhoOutOfRange(f"leakage bound requires rho in (0, 1], got {rho}")
    if construction not in ("first", "second"):
        raise DimensionMismatch(f"construction must be 'first' or 'second', got {construction!r}")
    t = profile.t
    rho_eff = rho
    if construction == "first":
        if gallager_value is None and rho > PHI_RHO_CEILING:
            rho_eff = PHI_RHO_CEILING  # inner approximation at the rho = 1 edge
        g = (
            gallager_value
            if gallager_value is not None
            else n * gallager.phi(rho_eff, chain.p_z_given_v, chain.p_v_given_u, chain.p_u)
        )
        shift = log_b1
    else:
        g = (
            gallager_value
            if gallager_value is not None
            else n * gallager.psi(rho, chain.p_z_given_v, chain.p_v_given_u, chain.p_u)
        )
        shift = 0.0
    h = profile.value(index_set, rho_eff)
    if not include_overhead:
        return math.exp(rho_eff * shift - rho_eff * h + g) / rho_eff
    core = max(0.0, shift + g / rho_eff - h)
    return core + (t + 3) * LN2 / rho_eff


def practical_bound(
    rho: float,
    channel_to_eve: Channel,
    n: int,
    renyi_value: float,
    log_b1: float = 0.0,
    has_common: bool = True,
    mode: str = "exp",
) -> float:
    """Computable leakage bound for codes built on a fixed error-correcting code.

    The exponential-moment form is 1 + exp(rho ln|B_1| - rho H + n phi*),
    with phi* = phi_max(rho, W) when a common message rides on the cloud
    layer and phi(rho, W, uniform) otherwise.  mode "info" converts it to a
    bound on the expected leaked information via (1/rho) ln( . ); mode
    "linear" uses the cruder (1/rho)(. - 1), the form the rate-allocation
    procedure scans.
    """
    if not 0.0 < rho < 1.0:
        raise RhoOutOfRange(f"practical bound requires rho in (0, 1), got {rho}")
    if has_common:
        phi_star = gallager.phi_max(rho, channel_to_eve).value
    else:
        phi_star = gallager.phi_single(
            rho, channel_to_eve, Distribution.uniform(channel_to_eve.input_size)
        )
    exponent = rho * log_b1 - rho * renyi_value + n * phi_star
    x = math.exp(exponent)
    if mode == "exp":
        return 1.0 + x
    if mode == "info":
        return math.log1p(x) / rho
    if mode == "linear":
        return x / rho
    raise DimensionMismatch(f"mode must be 'exp', 'info' or 'linear', got {mode!r}")


@dataclass(frozen=True)
class Quadruple:
    """Universally attainable exponents and leakage-rate slope for one index set."""

    e_b: float
    e_e: float
    e_plus: float
    e_minus: float


def universal_quadruple(
    rates: RateSpec, chain: ChainSpec, index_set: Iterable[int]
) -> Quadruple:
    """The universal quadruple (E_b, E_e, E_+, E_-) at the given rate point.

    E_+ is the phi secrecy exponent at r = R_p - sum_{i in I} R_i and E_- the
    leakage-rate slope I(V;Z|U) - R_p + sum_{i in I} R_i (sign not clamped).
    """
    from .probability import mutual_info

    index = frozenset(int(i) for i in index_set)
    if not index or not index <= set(range(1, rates.t + 1)):
        raise DimensionMismatch(f"index set {sorted(index)} not a nonempty subset of 1..{rates.t}")
    rate_i = rates.secret_sum(index)
    e_b = error_exponent_bob(rates.r_p, rates.r_c, chain)
    e_e = error_exponent_eve(rates.r_c, chain)
    e_plus = secrecy_exponent(rates.r_p - rate_i, chain, kernel="phi")
    e_minus = mutual_info(chain, "I(V;Z|U)") - rates.r_p + rate_i
    return Quadruple(e_b, e_e, e_plus, e_minus)
