"""Concrete secure-multiplex codes: superposition codebooks, the two encoder
constructions, maximum-likelihood decoders, Monte Carlo simulation, and the
practical rate-allocation workflow.

A code couples a sampled two-layer codebook (cloud U-strings for the common
message and one hash-space coordinate, satellite V-strings on top) with the
affine mixing layer: secrets are packed into a digit vector, mixed by
a |-> F'a + G', split into (B_1, B_2), and the resulting table entry is
pushed through the artificial channel Xi = P_{X|V}.  The second construction
is the same pipeline with a trivial B_1 and the identity mixer, so satellite
codewords are indexed directly by the secret tuple.

Tuple/string indexing follows the package-wide little-endian convention, so
codebooks, tensor powers, and the exhaustive oracles agree bit-exactly.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import affine
from ._rng import generator
from .errors import (
    CapExceeded,
    DimensionMismatch,
    IndexOutOfRange,
    Infeasible,
)
from .exponents import SourceProfile
from .probability import ChainSpec, Channel, Distribution
from .renyi import JointSource


_WILSON_Z = 1.959963984540054  # 95% two-sided


@dataclass(frozen=True, eq=False)
class BcdCodebook:
    """Superposition codebook tables.

    table_c maps (s_0, b_1) to a U-string of length n, table_p maps
    (s_0, b_1, b_2) to a V-string of length n.
    """

    n: int
    table_c: np.ndarray
    table_p: np.ndarray

    def __post_init__(self):
        tc = np.asarray(self.table_c, dtype=np.int64)
        tp = np.asarray(self.table_p, dtype=np.int64)
        if tc.ndim != 3 or tp.ndim != 4:
            raise DimensionMismatch("table_c must be rank 3 and table_p rank 4")
        if tc.shape[2] != self.n or tp.shape[3] != self.n:
            raise DimensionMismatch("codeword length does not match blocklength")
        if tp.shape[:2] != tc.shape[:2]:
            raise DimensionMismatch("table_p cloud indices do not match table_c")
        tc.setflags(write=False)
        tp.setflags(write=False)
        object.__setattr__(self, "table_c", tc)
        object.__setattr__(self, "table_p", tp)

    @property
    def s0_size(self) -> int:
        return self.table_c.shape[0]

    @property
    def b1_size(self) -> int:
        return self.table_c.shape[1]

    @property
    def b2_size(self) -> int:
        return self.table_p.shape[2]


@dataclass(frozen=True, eq=False)
class SmcCode:
    """A blocklength-n secure multiplex code.

    For the second construction the mixer must be the identity with zero
    offset and the satellite table is indexed directly by the secret tuple.
    v_offset, when present, is a common V-space shift applied after the table
    lookup (the coset variant of the no-common-message construction; needs
    |V| = q).
    """

    layout: affine.MessageLayout
    codebook: BcdCodebook
    mixer: affine.AffineMap
    construction: str
    chain: ChainSpec
    v_offset: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.construction not in ("first", "second"):
            raise DimensionMismatch(f"unknown construction {self.construction!r}")
        if self.mixer.dim != self.layout.secret_dim:
            raise DimensionMismatch("mixer dimension does not match the secret digits")
        if self.codebook.s0_size != self.layout.s0_size:
            raise DimensionMismatch("codebook S_0 axis does not match the layout")
        if self.codebook.b1_size != self.layout.b1_size:
            raise DimensionMismatch("codebook B_1 axis does not match the layout")
        if self.codebook.b2_size != self.layout.b2_size:
            raise DimensionMismatch("codebook B_2 axis does not match the layout")
        if self.construction == "second":
            ident = affine.AffineMap.identity(self.layout.q, self.layout.secret_dim)
            if self.mixer.matrix != ident.matrix or not self.mixer.offset.is_zero():
                raise DimensionMismatch("second construction requires the identity mixer")
        if self.v_offset is not None:
            if self.chain.v_size != self.layout.q:
                raise DimensionMismatch("v_offset requires |V| = q")
            if len(self.v_offset) != self.codebook.n:
                raise DimensionMismatch("v_offset length does not match blocklength")
            object.__setattr__(
                self, "v_offset", tuple(int(x) % self.layout.q for x in self.v_offset)
            )

    @property
    def n(self) -> int:
        return self.codebook.n

    def message_sizes(self) -> tuple[int, ...]:
        return self.layout.message_sizes()

    def v_string(self, s0: int, secrets: Sequence[int]) -> np.ndarray:
        """Deterministic part of the encoder: messages to the satellite codeword."""
        b1, b2 = self.b_indices(secrets)
        v = self.codebook.table_p[s0, b1, b2]
        if self.v_offset is not None:
            v = (v + np.asarray(self.v_offset, dtype=np.int64)) % self.layout.q
        return v

    def b_indices(self, secrets: Sequence[int]) -> tuple[int, int]:
        packed = affine.pack(self.layout, secrets)
        mixed = affine.apply(self.mixer, packed) if self.construction == "first" else packed
        return affine.split_b(self.layout, mixed)

    def secrets_from_b(self, b1: int, b2: int) -> tuple[int, ...]:
        vec = affine.join_b(self.layout, b1, b2)
        if self.construction == "first":
            vec = affine.invert(self.mixer, vec)
        return affine.unpack(self.layout, vec)

    @cached_property
    def _candidates(self):
        """All (s_0, b_1, b_2) candidates with their V-strings and message
        tuples, sorted by message tuple so ML ties resolve to the smallest."""
        rows = []
        for s0 in range(self.layout.s0_size):
            for b1 in range(self.layout.b1_size):
                for b2 in range(self.layout.b2_size):
                    msg = (s0, *self.secrets_from_b(b1, b2))
                    rows.append((msg, s0, b1, b2))
        rows.sort(key=lambda r: r[0])
        v_table = np.stack([self.v_string(s0, msg[1:]) for msg, s0, b1, b2 in rows])
        messages = [r[0] for r in rows]
        s0s = np.array([r[1] for r in rows])
        return messages, s0s, v_table

    def to_dict(self) -> dict:
        data = {
            "layout": self.layout.to_dict(),
            "codebook": {
                "n": self.codebook.n,
                "table_c": self.codebook.table_c.tolist(),
                "table_p": self.codebook.table_p.tolist(),
            },
            "mixer": self.mixer.to_dict(),
            "construction": self.construction,
            "chain": self.chain.to_dict(),
        }
        if self.v_offset is not None:
            data["v_offset"] = list(self.v_offset)
        return data

    @classmethod
    def from_dict(cls, data: dict, chain: ChainSpec | None = None) -> "SmcCode":
        for key in ("layout", "codebook", "mixer", "construction"):
            if key not in data:
                raise DimensionMismatch(f"code bundle missing key {key!r}")
        if chain is None:
            if "chain" not in data:
                raise DimensionMismatch("code bundle missing key 'chain'")
            chain = ChainSpec.from_dict(data["chain"])
        cb = data["codebook"]
        for key in ("n", "table_c", "table_p"):
            if key not in cb:
                raise DimensionMismatch(f"code bundle codebook missing key {key!r}")
        return cls(
            layout=affine.MessageLayout.from_dict(data["layout"]),
            codebook=BcdCodebook(
                int(cb["n"]),
                np.asarray(cb["table_c"], dtype=np.int64),
                np.asarray(cb["table_p"], dtype=np.int64),
            ),
            mixer=affine.AffineMap.from_dict(data["mixer"]),
            construction=str(data["construction"]),
            chain=chain,
            v_offset=tuple(data["v_offset"]) if "v_offset" in data else None,
        )


def sample_codebook(
    chain: ChainSpec,
    layout: affine.MessageLayout,
    n: int,
    seed: int,
    oracle_compatible: bool = False,
    cap: int = 10**7,
) -> BcdCodebook:
    """Draw a superposition codebook i.i.d. per position.

    U-strings are drawn from P_U per (s_0, b_1); V-strings conditionally from
    P_{V|U} given the already-drawn U-string.  Deterministic in the seed.
    """
    s0, b1, b2 = layout.s0_size, layout.b1_size, layout.b2_size
    if oracle_compatible:
        terms = s0 * b1 * b2 * chain.p_z_given_v.output_size**n
        if terms > cap:
            raise CapExceeded(f"{terms} enumeration terms exceed cap {cap}")
    rng = generator(seed)
    u_cdf = np.cumsum(chain.p_u.probs)
    v_cdf = np.cumsum(chain.p_v_given_u.rows, axis=1)
    table_c = np.searchsorted(u_cdf, rng.random((s0, b1, n)), side="right")
    table_c = np.minimum(table_c, chain.u_size - 1)
    draws = rng.random((s0, b1, b2, n))
    cdf_per_pos = v_cdf[table_c]  # (s0, b1, n, |V|)
    table_p = (draws[..., None] >= cdf_per_pos[:, :, None, :, :]).sum(axis=-1)
    table_p = np.minimum(table_p, chain.v_size - 1)
    return BcdCodebook(n, table_c, table_p)


def _sample_symbols(rows: np.ndarray, inputs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Per-element channel sampling: inputs (..., n) ints -> outputs of same shape."""
    cdf = np.cumsum(rows, axis=1)[inputs]  # (..., n, out)
    draws = rng.random(inputs.shape)
    out = (draws[..., None] >= cdf).sum(axis=-1)
    return np.minimum(out, rows.shape[1] - 1)


def encode(
    code: SmcCode, messages: Sequence[int], channel_seed: int
) -> tuple[np.ndarray, dict]:
    """Run the encoder pipeline; returns the X-string and a transcript.

    messages is (s_0, s_1, ..., s_T).  The transcript records the hash-space
    coordinates (b_1, b_2) and the satellite codeword v.
    """
    messages = tuple(int(m) for m in messages)
    if len(messages) != code.layout.t + 1:
        raise IndexOutOfRange(f"expected {code.layout.t + 1} messages, got {len(messages)}")
    s0 = messages[0]
    if not 0 <= s0 < code.layout.s0_size:
        raise IndexOutOfRange(f"common message {s0} outside [0, {code.layout.s0_size})")
    b1, b2 = code.b_indices(messages[1:])
    v = code.v_string(s0, messages[1:])
    rng = generator(channel_seed)
    x = _sample_symbols(code.chain.xi.rows, v, rng)
    return x, {"b1": b1, "b2": b2, "v": v}


def _log_rows(channel: Channel) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(channel.rows)


def decode_bob(code: SmcCode, y_string: Sequence[int]) -> tuple[int, ...]:
    """Maximum-likelihood decoding of all messages from Bob's observation.

    Ties resolve to the smallest message tuple in lexicographic order.
    """
    y = np.asarray(y_string, dtype=np.int64)
    if y.shape != (code.n,):
        raise DimensionMismatch("observation length does not match blocklength")
    messages, _, v_table = code._candidates
    logw = _log_rows(code.chain.p_y_given_v)
    loglik = logw[v_table, y[None, :]].sum(axis=1)
    return messages[int(np.argmax(loglik))]


def decode_eve(code: SmcCode, z_string: Sequence[int]) -> int:
    """Eve's ML decoding of the common message, averaging the likelihood over
    uniform hash-space coordinates.  Ties resolve to the smallest index."""
    z = np.asarray(z_string, dtype=np.int64)
    if z.shape != (code.n,):
        raise DimensionMismatch("observation length does not match blocklength")
    _, s0s, v_table = code._candidates
    logw = _log_rows(code.chain.p_z_given_v)
    loglik = logw[v_table, z[None, :]].sum(axis=1)
    scores = np.full(code.layout.s0_size, -np.inf)
    for s0 in range(code.layout.s0_size):
        scores[s0] = _logsumexp(loglik[s0s == s0])
    return int(np.argmax(scores))


def _logsumexp(values: np.ndarray) -> float:
    m = values.max()
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.exp(values - m).sum()))


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson 95% score interval: returns (center estimate, radius)."""
    if trials < 1:
        raise DimensionMismatch("trials must be >= 1")
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    radius = z * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials)) / denom
    return center, radius


@dataclass(frozen=True)
class SimulationResult:
    trials: int
    p_b_hat: float
    p_e_hat: float
    radius_b: float
    radius_e: float


_CHUNK = 4096


def _message_digits(source: JointSource) -> np.ndarray:
    """Decode flat joint indices into per-coordinate message indices."""
    sizes = source.shape
    table = np.empty((math.prod(sizes), len(sizes)), dtype=np.int64)
    idx = np.arange(math.prod(sizes))
    for coord, size in enumerate(sizes):
        table[:, coord] = idx % size
        idx = idx // size
    return table


def _simulate_chunk(code: SmcCode, source_probs, digits, msg_row_of, seed, stream, count):
    rng = generator(seed, stream=stream)
    messages, s0s, v_table = code._candidates
    draw = rng.choice(len(source_probs), size=count, p=source_probs)
    rows = msg_row_of[draw]
    v = v_table[rows]
    x = _sample_symbols(code.chain.xi.rows, v, rng)
    y = _sample_symbols(code.chain.w_y.rows, x, rng)
    z = _sample_symbols(code.chain.w_z.rows, x, rng)
    logw_y = _log_rows(code.chain.p_y_given_v)
    logw_z = _log_rows(code.chain.p_z_given_v)
    ll_y = logw_y[v_table[:, None, :], y[None, :, :]].sum(axis=2)  # (C, count)
    decoded_rows = np.argmax(ll_y, axis=0)
    bob_errors = int((decoded_rows != rows).sum())
    ll_z = logw_z[v_table[:, None, :], z[None, :, :]].sum(axis=2)
    s0_count = code.layout.s0_size
    scores = np.full((s0_count, count), -np.inf)
    for s0 in range(s0_count):
        block = ll_z[s0s == s0]
        m = block.max(axis=0)
        finite = np.isfinite(m)
        scores[s0, finite] = m[finite] + np.log(np.exp(block[:, finite] - m[finite]).sum(axis=0))
    eve_decoded = np.argmax(scores, axis=0)
    true_s0 = digits[draw, 0]
    eve_errors = int((eve_decoded != true_s0).sum())
    return bob_errors, eve_errors


def simulate(
    code: SmcCode,
    source: JointSource,
    trials: int,
    seed: int,
    threads: int = 1,
) -> SimulationResult:
    """Monte Carlo estimate of both error probabilities with Wilson 95% radii.

    Trials are split into fixed chunks, each drawing from an independently
    keyed substream, so the result is identical for any worker count.
    """
    if trials < 1:
        raise DimensionMismatch("trials must be >= 1")
    if source.shape != (code.layout.s0_size, *code.message_sizes()[1:]):
        raise DimensionMismatch("source shape does not match the code's message spaces")
    digits = _message_digits(source)
    messages, _, _ = code._candidates
    row_index = {msg: i for i, msg in enumerate(messages)}
    msg_row_of = np.array([row_index[tuple(d)] for d in digits], dtype=np.int64)
    source_probs = source.probs.probs
    chunks = [(i, min(_CHUNK, trials - i * _CHUNK)) for i in range((trials + _CHUNK - 1) // _CHUNK)]

    def run(chunk):
        stream, count = chunk
        return _simulate_chunk(code, source_probs, digits, msg_row_of, seed, stream, count)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]
    bob_errors = sum(r[0] for r in results)
    eve_errors = sum(r[1] for r in results)
    _, radius_b = wilson_interval(bob_errors, trials)
    _, radius_e = wilson_interval(eve_errors, trials)
    return SimulationResult(trials, bob_errors / trials, eve_errors / trials, radius_b, radius_e)


@dataclass(frozen=True, eq=False)
class LinearGenerator:
    """A linear code over F_q mapped symbol-wise to V (requires |V| = q):
    message digits m |-> m G with G a k x n generator matrix."""

    q: int
    rows: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.rows, dtype=np.int64) % self.q
        if mat.ndim != 2:
            raise DimensionMismatch("generator must be a 2-D matrix")
        mat.setflags(write=False)
        object.__setattr__(self, "rows", mat)

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def codeword(self, message_vec: np.ndarray) -> np.ndarray:
        return (np.asarray(message_vec, dtype=np.int64) @ self.rows) % self.q

    def to_codebook(self, b1_dim: int = 0) -> BcdCodebook:
        """Expand into an explicit table codebook with trivial cloud layer."""
        b1 = self.q**b1_dim
        b2 = self.q ** (self.k - b1_dim)
        table_c = np.zeros((1, b1, self.n), dtype=np.int64)
        table_p = np.empty((1, b1, b2, self.n), dtype=np.int64)
        for idx in range(self.q**self.k):
            vec = affine.FieldVec.from_index(self.q, self.k, idx)
            i1 = sum(vec.coords[t] * self.q**t for t in range(b1_dim))
            i2 = sum(vec.coords[b1_dim + t] * self.q**t for t in range(self.k - b1_dim))
            table_p[0, i1, i2] = self.codeword(np.array(vec.coords))
        return BcdCodebook(self.n, table_c, table_p)

    @classmethod
    def from_text(cls, q: int, text: str) -> "LinearGenerator":
        """Parse plain-text rows of base-q digits."""
        rows = [[int(ch) for ch in line.strip()] for line in text.splitlines() if line.strip()]
        return cls(q, np.array(rows, dtype=np.int64))


@dataclass(frozen=True)
class ConstructionReport:
    """Outcome of the rate-allocation search."""

    dims: tuple[int, ...]
    pad_dims: int
    base_dim: int
    per_index_bounds: dict
    per_index_targets: dict
    rho_grid: tuple[float, ...]
    has_common: bool
    v_offset: tuple[int, ...] | None = None


def _normalize_targets(targets, t: int) -> dict[frozenset, float]:
    subsets = [frozenset(c) for r in range(1, t + 1) for c in itertools.combinations(range(1, t + 1), r)]
    if isinstance(targets, (int, float)):
        return {s: float(targets) for s in subsets}
    table = {}
    for key, val in targets.items():
        if isinstance(key, str):
            key = tuple(int(x) for x in key.split(",") if x.strip())
        table[frozenset(int(i) for i in (key if isinstance(key, (tuple, list, frozenset, set)) else (key,)))] = float(val)
    for s in subsets:
        if s not in table:
            raise DimensionMismatch(f"missing leakage target for index set {sorted(s)}")
    return {s: table[s] for s in subsets}


def construct_practical(
    base_code,
    chain: ChainSpec,
    t: int,
    targets,
    eps_2: float,
    rho_grid: Sequence[float],
    profile: SourceProfile | None = None,
    has_common: bool = True,
    *,
    seed: int = 0,
) -> tuple[affine.MessageLayout, affine.AffineMap, ConstructionReport]:
    """Allocate secret-message dimensions on top of a fixed error-correcting
    code and sample the mixing layer.

    The search maximizes the total secret dimension subject to, for every
    nonempty index set I, the expected-leakage bound staying below
    eps_2 * eps_I / 2^T across the best rho in the grid.  Unallocated base
    digits become explicit encoder padding (uniform dummy randomness) whose
    log-cardinality adds to the conditional Renyi entropy hiding each I; with
    no profile the messages themselves count as uniform at their allocated
    sizes.  A sampled map then violates some eps_I with probability at most
    eps_2 by Markov's inequality.

    Returns the layout (with a trailing padding slot when pad > 0), the
    sampled mixing map, and a report with per-index-set slack.  Without a
    common message the map's offset is zero and the report instead carries a
    uniform V-space coset shift (apply it as the code's v_offset).
    """
    if isinstance(base_code, LinearGenerator):
        if chain.u_size != 1:
            raise DimensionMismatch("generator base codes require a trivial U layer")
        if chain.v_size != base_code.q:
            raise DimensionMismatch("generator base codes require |V| = q")
        q = base_code.q
        base_dim = base_code.k
        n = base_code.n
        codebook = base_code.to_codebook()
        k0 = 0
    elif isinstance(base_code, BcdCodebook):
        codebook = base_code
        n = base_code.n
        q = _infer_q(codebook)
        k0 = _exact_log(codebook.s0_size, q)
        base_dim = _exact_log(codebook.b1_size, q) + _exact_log(codebook.b2_size, q)
    else:
        raise DimensionMismatch("base_code must be a BcdCodebook or LinearGenerator")
    if not has_common and not isinstance(base_code, LinearGenerator):
        raise DimensionMismatch("the no-common-message variant needs a linear generator")

    rho_grid = tuple(float(r) for r in rho_grid)
    if not rho_grid or not all(0.0 < r < 1.0 for r in rho_grid):
        raise DimensionMismatch("rho grid must lie strictly inside (0, 1)")
    target_table = _normalize_targets(targets, t)
    eve = chain.p_z_given_v

    # Pre-compute the per-rho channel term once; the bound itself is then arithmetic.
    from . import gallager

    phi_star = {}
    for rho in rho_grid:
        if has_common:
            phi_star[rho] = gallager.phi_max(rho, eve).value
        else:
            phi_star[rho] = gallager.phi_single(rho, eve, Distribution.uniform(eve.input_size))

    lnq = math.log(q)

    def bound_for(index: frozenset, k_vec: tuple[int, ...], rho: float) -> float:
        pad = base_dim - sum(k_vec)
        if profile is None:
            h = (base_dim - sum(k_vec[i - 1] for i in index)) * lnq
        else:
            allocated = sum(k_vec[i - 1] for i in range(1, t + 1) if i not in index) * lnq
            h = min(profile.value(index, rho), allocated) + pad * lnq
        return math.exp(-rho * h + n * phi_star[rho]) / rho

    def feasible(k_vec: tuple[int, ...]) -> dict | None:
        bounds = {}
        for index, eps_i in target_table.items():
            if sum(k_vec[i - 1] for i in index) == 0:
                bounds[index] = 0.0  # empty messages leak nothing
                continue
            best = min(bound_for(index, k_vec, rho) for rho in rho_grid)
            if best > eps_2 * eps_i / 2**t:
                return None
            bounds[index] = best
        return bounds

    candidates = sorted(
        (k for k in itertools.product(range(base_dim + 1), repeat=t) if sum(k) <= base_dim),
        key=lambda k: (-sum(k), k),
    )
    chosen = None
    for k_vec in candidates:
        if sum(k_vec) == 0:
            continue
        bounds = feasible(k_vec)
        if bounds is not None:
            chosen = (k_vec, bounds)
            break
    if chosen is None:
        raise Infeasible("no nonzero message layout meets the leakage targets")
    k_vec, bounds = chosen
    pad = base_dim - sum(k_vec)
    dims = (k0, *k_vec) + ((pad,) if pad > 0 else ())
    b1_dim = _exact_log(codebook.b1_size, q)
    layout = affine.MessageLayout(q, dims, b1_dim, base_dim - b1_dim)
    mixer = affine.sample_map(q, base_dim, seed)
    v_offset = None
    if not has_common:
        # coset variant: zero message-space offset, uniform shift in V-space
        mixer = affine.AffineMap(q, mixer.matrix, affine.FieldVec.zero(q, base_dim))
        v_offset = tuple(int(x) for x in generator(seed, stream=1).integers(0, q, size=n))
    report = ConstructionReport(
        dims=dims,
        pad_dims=pad,
        base_dim=base_dim,
        per_index_bounds={tuple(sorted(idx)): v for idx, v in bounds.items()},
        per_index_targets={
            tuple(sorted(idx)): eps_2 * eps_i / 2**t for idx, eps_i in target_table.items()
        },
        rho_grid=rho_grid,
        has_common=has_common,
        v_offset=v_offset,
    )
    return layout, mixer, report


def _infer_q(codebook: BcdCodebook) -> int:
    """Smallest prime power base consistent with the codebook's table sizes."""
    for q in (2, 3, 5, 7, 11, 13):
        try:
            _exact_log(codebook.b1_size, q)
            _exact_log(codebook.b2_size, q)
            _exact_log(codebook.s0_size, q)
            return q
        except DimensionMismatch:
            continue
    raise DimensionMismatch("codebook table sizes are not powers of a small prime")


def _exact_log(size: int, q: int) -> int:
    k = 0
    while size > 1:
        if size % q:
            raise DimensionMismatch(f"{size} is not a power of {q}")
        size //= q
        k += 1
    return k
