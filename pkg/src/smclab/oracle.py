"""Exhaustive ground-truth computations on tiny instances.

Everything here enumerates: exact leaked information of a concrete code,
exact divergence of an induced output law from a reference, exact ensemble
averages over complete map families (verifying the resolvability bounds and
the conditioned codebook bound), and exact decoding error probabilities.
A bound-check returning holds=False on a valid instance is a build-stopping
defect, not a tolerance issue.

Sums over ensembles and output spaces run through math.fsum, so bound checks
at 1e-9 tolerance are not at the mercy of accumulation order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import affine
from .errors import CapExceeded, DimensionMismatch
from .probability import Channel, Distribution
from .renyi import JointSource, dist_renyi_entropy, kl_divergence, psi_channel, psi_divergence
from .smc_codec import SmcCode, _message_digits, decode_bob, decode_eve
from .gallager import psi_single

DEFAULT_ORACLE_CAP = 10**7

BOUND_TOLERANCE = 1e-9


def _string_channel_rows(w: Channel, strings: np.ndarray) -> np.ndarray:
    """Product-channel rows for each input string (little-endian z indexing)."""
    rows = np.ones((strings.shape[0], 1))
    for t in range(strings.shape[1]):
        rows = np.einsum("mz,my->myz", rows, w.rows[strings[:, t]]).reshape(strings.shape[0], -1)
    # einsum above appends the new position as the most significant digit
    return rows


def _digit_table(size: int, base: int, n: int) -> np.ndarray:
    table = np.empty((size, n), dtype=np.int64)
    idx = np.arange(size)
    for t in range(n):
        table[:, t] = idx % base
        idx = idx // base
    return table


def exact_leakage(
    code: SmcCode,
    source: JointSource,
    index_set: Iterable[int],
    cap: int = DEFAULT_ORACLE_CAP,
    dry_run: bool = False,
) -> float:
    """Exact I(S_I : Z^n | S_0) of the code under the given message law, in nats.

    With dry_run set, returns the enumeration term count instead of running.
    """
    index = frozenset(int(i) for i in index_set)
    t = code.layout.t
    if not index or not index <= set(range(1, t + 1)):
        raise DimensionMismatch(f"index set {sorted(index)} not a nonempty subset of 1..{t}")
    if source.shape != code.message_sizes():
        raise DimensionMismatch("source shape does not match the code's message spaces")
    w = code.chain.p_z_given_v
    zn = w.output_size**code.n
    msgs = _message_digits(source)
    if dry_run:
        return zn * msgs.shape[0]
    if zn * msgs.shape[0] > cap:
        raise CapExceeded(f"{zn * msgs.shape[0]} enumeration terms exceed cap {cap}")
    weights = source.probs.probs
    v_strings = np.stack([code.v_string(m[0], m[1:]) for m in msgs])
    rows = _string_channel_rows(w, v_strings)  # (M, Z^n)

    sizes = code.message_sizes()
    i_list = sorted(index)
    group_sizes = [sizes[0]] + [sizes[i] for i in i_list]
    group_index = msgs[:, 0].copy()
    stride = sizes[0]
    for i in i_list:
        group_index += msgs[:, i] * stride
        stride *= sizes[i]
    n_groups = int(np.prod(group_sizes))

    joint = np.zeros((n_groups, zn))
    np.add.at(joint, group_index, weights[:, None] * rows)
    group_w = joint.sum(axis=1)

    s0_of_group = np.arange(n_groups) % sizes[0]
    p_s0_z = np.zeros((sizes[0], zn))
    np.add.at(p_s0_z, s0_of_group, joint)
    p_s0 = p_s0_z.sum(axis=1)

    terms = []
    for g in range(n_groups):
        if group_w[g] == 0:
            continue
        s0 = s0_of_group[g]
        mask = joint[g] > 0
        contrib = joint[g, mask] * (
            np.log(joint[g, mask] / group_w[g]) - np.log(p_s0_z[s0, mask] / p_s0[s0])
        )
        terms.extend(contrib.tolist())
    return math.fsum(terms)


def exact_resolvability(
    assignment: Sequence[int],
    p_a: Distribution,
    w: Channel,
    p_ref: Distribution,
    rho: float,
) -> tuple[float, float]:
    """Exact (D, psi) of the output mixture induced by a fixed encoder A -> X
    against the reference output W_{p_ref}."""
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.shape != (p_a.alphabet_size,):
        raise DimensionMismatch("assignment length does not match the message alphabet")
    if np.any(assignment < 0) or np.any(assignment >= w.input_size):
        raise DimensionMismatch("assignment targets outside the channel input alphabet")
    out = Distribution(_induced_output(assignment, p_a, w))
    ref = Distribution(p_ref.probs @ w.rows)
    return kl_divergence(out, ref), psi_divergence(out, ref, rho)


def _induced_output(assignment: np.ndarray, p_a: Distribution, w: Channel) -> np.ndarray:
    q_x = np.zeros(w.input_size)
    np.add.at(q_x, assignment, p_a.probs)
    return q_x @ w.rows


@dataclass(frozen=True)
class Thm1Instance:
    """Fully random encoder ensemble: each message letter drawn i.i.d. from p."""

    p_a: Distribution
    w: Channel
    p: Distribution


@dataclass(frozen=True)
class Thm2Instance:
    """Affine ensemble over A = X = F_q^dim against the uniform reference."""

    q: int
    dim: int
    p_a: Distribution
    w: Channel


@dataclass(frozen=True)
class Lem4Instance:
    """Fixed superposition codebook, exhaustively mixed affine layer."""

    code: SmcCode
    source: JointSource
    index_set: frozenset


@dataclass(frozen=True)
class BoundCheckResult:
    mode: str
    rho: float
    lhs_d_avg: float
    lhs_psi_avg: float
    rhs: float
    holds: bool


def ensemble_bound_check(
    mode: str,
    instance,
    rho: float,
    cap: int = DEFAULT_ORACLE_CAP,
    dry_run: bool = False,
) -> BoundCheckResult | int:
    """Exact ensemble averages against the matching closed-form bound.

    thm1 averages e^{rho D} and e^{psi} over all |X|^|A| assignments with
    product weights; thm2 over the full invertible family times all offsets;
    lem4 averages e^{rho I(S_I:Z|S_0)} (reported as lhs_d_avg) and the
    per-message divergence average (lhs_psi_avg) over the affine layer with
    the codebook fixed.  holds requires both averages below the bound within
    1e-9.  With dry_run set, returns the ensemble term count instead.
    """
    if dry_run:
        return _term_count(mode, instance)
    if mode == "thm1":
        return _check_thm1(instance, rho, cap)
    if mode == "thm2":
        return _check_thm2(instance, rho, cap)
    if mode == "lem4":
        return _check_lem4(instance, rho, cap)
    raise DimensionMismatch(f"unknown bound-check mode {mode!r}")


def _term_count(mode: str, instance) -> int:
    if mode == "thm1":
        return instance.p.alphabet_size ** instance.p_a.alphabet_size
    if mode == "thm2":
        size = instance.q**instance.dim
        return len(affine.enumerate_family(instance.q, instance.dim)) * size
    if mode == "lem4":
        layout = instance.code.layout
        family = len(affine.enumerate_family(layout.q, layout.secret_dim))
        offsets = layout.q**layout.secret_dim
        return family * offsets * instance.source.probs.alphabet_size
    raise DimensionMismatch(f"unknown bound-check mode {mode!r}")


def _check_thm1(inst: Thm1Instance, rho: float, cap: int) -> BoundCheckResult:
    na, nx = inst.p_a.alphabet_size, inst.p.alphabet_size
    if inst.w.input_size != nx:
        raise DimensionMismatch("sampling distribution does not match the channel")
    if nx**na > cap:
        raise CapExceeded(f"{nx}**{na} assignments exceed cap {cap}")
    ref = Distribution(inst.p.probs @ inst.w.rows)
    terms_d, terms_psi = [], []
    for assignment in itertools.product(range(nx), repeat=na):
        weight = float(np.prod(inst.p.probs[list(assignment)]))
        if weight == 0.0:
            continue
        out = Distribution(_induced_output(np.array(assignment), inst.p_a, inst.w))
        terms_d.append(weight * math.exp(rho * kl_divergence(out, ref)))
        terms_psi.append(weight * math.exp(psi_divergence(out, ref, rho)))
    lhs_d, lhs_psi = math.fsum(terms_d), math.fsum(terms_psi)
    rhs = 1.0 + math.exp(-rho * dist_renyi_entropy(inst.p_a, rho)) * math.exp(
        psi_channel(inst.w, inst.p, rho)
    )
    holds = lhs_d <= rhs + BOUND_TOLERANCE and lhs_psi <= rhs + BOUND_TOLERANCE
    return BoundCheckResult("thm1", rho, lhs_d, lhs_psi, rhs, holds)


def _check_thm2(inst: Thm2Instance, rho: float, cap: int) -> BoundCheckResult:
    size = inst.q**inst.dim
    if inst.p_a.alphabet_size != size or inst.w.input_size != size:
        raise DimensionMismatch("message law and channel must live on F_q^dim")
    family = affine.enumerate_family(inst.q, inst.dim, cap)
    if len(family) * size > cap:
        raise CapExceeded("affine family times offsets exceeds the cap")
    p_mix = Distribution.uniform(size)
    ref = Distribution(p_mix.probs @ inst.w.rows)
    vec_table = _digit_table(size, inst.q, inst.dim)
    terms_d, terms_psi = [], []
    powers = inst.q ** np.arange(inst.dim)
    for mat in family:
        images = (vec_table @ mat.T) % inst.q  # (A, dim): F(a) per message
        for g_index in range(size):
            g = vec_table[g_index]
            x_idx = ((images + g) % inst.q) @ powers
            q_x = np.zeros(size)
            np.add.at(q_x, x_idx, inst.p_a.probs)
            out = Distribution(q_x @ inst.w.rows)
            terms_d.append(math.exp(rho * kl_divergence(out, ref)))
            terms_psi.append(math.exp(psi_divergence(out, ref, rho)))
    count = len(family) * size
    lhs_d = math.fsum(terms_d) / count
    lhs_psi = math.fsum(terms_psi) / count
    rhs = 1.0 + math.exp(-rho * dist_renyi_entropy(inst.p_a, rho)) * math.exp(
        psi_channel(inst.w, p_mix, rho)
    )
    holds = lhs_d <= rhs + BOUND_TOLERANCE and lhs_psi <= rhs + BOUND_TOLERANCE
    return BoundCheckResult("thm2", rho, lhs_d, lhs_psi, rhs, holds)


def _conditional_renyi_given(source: JointSource, comp_axes, given: dict, rho: float) -> float:
    """H_{1+rho}(S_comp | fixed values of the remaining coordinates)."""
    table = source.table()
    sel = [slice(None)] * len(source.shape)
    for axis, value in given.items():
        sel[axis] = value
    block = table[tuple(sel)]
    keep = [a for a in range(len(source.shape)) if a not in given]
    sum_axes = tuple(keep.index(a) for a in keep if a not in comp_axes)
    if sum_axes:
        block = block.sum(axis=sum_axes)
    flat = block.reshape(-1)
    total = flat.sum()
    if total == 0:
        return 0.0
    return dist_renyi_entropy(Distribution(flat / total), rho)


def _check_lem4(inst: Lem4Instance, rho: float, cap: int) -> BoundCheckResult:
    code, source = inst.code, inst.source
    layout = code.layout
    q, dim = layout.q, layout.secret_dim
    family = affine.enumerate_family(q, dim, cap)
    n_offsets = q**dim
    if len(family) * n_offsets * source.probs.alphabet_size > cap:
        raise CapExceeded("affine family enumeration exceeds the cap")
    index = frozenset(inst.index_set)

    w = code.chain.p_z_given_v
    zn = w.output_size**code.n
    sizes = code.message_sizes()
    msgs = _message_digits(source)
    weights = source.probs.probs

    # Reference outputs per s_0: uniform (B_1, B_2) through the fixed codebook.
    b_total = layout.b1_size * layout.b2_size
    ref_rows = {}
    psi_terms = {}
    for s0 in range(sizes[0]):
        flat = code.codebook.table_p[s0].reshape(b_total, code.n)
        if code.v_offset is not None:
            flat = (flat + np.asarray(code.v_offset)) % layout.q
        rows = _string_channel_rows(w, flat)
        ref_rows[s0] = rows.mean(axis=0)
        psi_terms[s0] = math.exp(psi_single(rho, Channel(rows), Distribution.uniform(b_total)))

    # RHS: source-weighted Renyi factors times the per-s0 psi terms.
    i_list = sorted(index)
    comp_axes = [a for a in range(1, layout.t + 1) if a not in index]
    table = source.table()
    rhs_terms = []
    for s0 in range(sizes[0]):
        for values in itertools.product(*[range(sizes[i]) for i in i_list]):
            given = {0: s0, **dict(zip(i_list, values))}
            sel = [slice(None)] * len(sizes)
            for axis, value in given.items():
                sel[axis] = value
            mass = float(np.asarray(table[tuple(sel)]).sum())
            if mass == 0.0:
                continue
            h = _conditional_renyi_given(source, comp_axes, given, rho) if comp_axes else 0.0
            rhs_terms.append(mass * math.exp(-rho * h) * psi_terms[s0])
    rhs = 1.0 + math.fsum(rhs_terms)

    # LHS: exact leakage (and per-message divergence) for every mixer.
    packed = np.stack(
        [np.array(affine.pack(layout, m[1:]).coords, dtype=np.int64) for m in msgs]
    )
    offsets = _digit_table(n_offsets, q, dim)
    pow_b1 = q ** np.arange(layout.b1_dim)
    pow_b2 = q ** np.arange(layout.b2_dim)
    terms_exp_i, terms_mid = [], []
    for mat in family:
        mixed_base = (packed @ mat.T) % q
        for g in offsets:
            mixed = (mixed_base + g) % q
            b1 = mixed[:, : layout.b1_dim] @ pow_b1
            b2 = mixed[:, layout.b1_dim :] @ pow_b2
            v_strings = code.codebook.table_p[msgs[:, 0], b1, b2]
            if code.v_offset is not None:
                v_strings = (v_strings + np.asarray(code.v_offset)) % layout.q
            rows = _string_channel_rows(w, v_strings)
            leak, mid = _leakage_and_divergence(msgs, weights, rows, sizes, i_list, ref_rows, rho)
            terms_exp_i.append(math.exp(rho * leak))
            terms_mid.append(mid)
    count = len(family) * n_offsets
    lhs_i = math.fsum(terms_exp_i) / count
    lhs_mid = math.fsum(terms_mid) / count
    holds = (
        lhs_i <= rhs + BOUND_TOLERANCE
        and lhs_mid <= rhs + BOUND_TOLERANCE
        and lhs_i <= lhs_mid + BOUND_TOLERANCE
    )
    return BoundCheckResult("lem4", rho, lhs_i, lhs_mid, rhs, holds)


def _leakage_and_divergence(msgs, weights, rows, sizes, i_list, ref_rows, rho):
    """(I(S_I:Z|S_0), sum P e^{rho D(P_{Z|s_I,s_0} || ref_{s_0})}) for one mixer."""
    group_sizes = [sizes[0]] + [sizes[i] for i in i_list]
    group_index = msgs[:, 0].copy()
    stride = sizes[0]
    for i in i_list:
        group_index += msgs[:, i] * stride
        stride *= sizes[i]
    n_groups = int(np.prod(group_sizes))
    zn = rows.shape[1]
    joint = np.zeros((n_groups, zn))
    np.add.at(joint, group_index, weights[:, None] * rows)
    group_w = joint.sum(axis=1)
    s0_of_group = np.arange(n_groups) % sizes[0]
    p_s0_z = np.zeros((sizes[0], zn))
    np.add.at(p_s0_z, s0_of_group, joint)
    p_s0 = p_s0_z.sum(axis=1)

    leak_terms, mid_terms = [], []
    for g in range(n_groups):
        if group_w[g] == 0:
            continue
        s0 = s0_of_group[g]
        cond = joint[g] / group_w[g]
        mask = cond > 0
        leak_terms.extend(
            (joint[g, mask] * (np.log(cond[mask]) - np.log(p_s0_z[s0, mask] / p_s0[s0]))).tolist()
        )
        ref = ref_rows[s0]
        if np.any(mask & (ref <= 0)):
            mid_terms.append(math.inf)
        else:
            d = float((cond[mask] * np.log(cond[mask] / ref[mask])).sum())
            mid_terms.append(group_w[g] * math.exp(rho * d))
    return math.fsum(leak_terms), math.fsum(mid_terms)


def exact_error(
    code: SmcCode,
    source: JointSource,
    cap: int = DEFAULT_ORACLE_CAP,
    dry_run: bool = False,
) -> tuple[float, float] | int:
    """Exact decoding error probabilities (Bob, Eve) by summing channel output
    probabilities over the complement of each decoding region.

    With dry_run set, returns the enumeration term count instead of running.
    """
    if source.shape != code.message_sizes():
        raise DimensionMismatch("source shape does not match the code's message spaces")
    yn = code.chain.w_y.output_size**code.n
    zn = code.chain.w_z.output_size**code.n
    msgs = _message_digits(source)
    if dry_run:
        return (yn + zn) * msgs.shape[0]
    if (yn + zn) * msgs.shape[0] > cap:
        raise CapExceeded("decoding-region enumeration exceeds the cap")
    weights = source.probs.probs
    v_strings = np.stack([code.v_string(m[0], m[1:]) for m in msgs])
    rows_y = _string_channel_rows(code.chain.p_y_given_v, v_strings)
    rows_z = _string_channel_rows(code.chain.p_z_given_v, v_strings)

    y_table = _digit_table(yn, code.chain.w_y.output_size, code.n)
    z_table = _digit_table(zn, code.chain.w_z.output_size, code.n)
    bob_of_y = np.array(
        [_msg_index(code, decode_bob(code, y)) for y in y_table], dtype=np.int64
    )
    eve_of_z = np.array([decode_eve(code, z) for z in z_table], dtype=np.int64)

    msg_index = np.array([_msg_index(code, tuple(m)) for m in msgs], dtype=np.int64)
    p_b_terms, p_e_terms = [], []
    for m in range(msgs.shape[0]):
        if weights[m] == 0.0:
            continue
        wrong_y = bob_of_y != msg_index[m]
        p_b_terms.append(weights[m] * float(rows_y[m, wrong_y].sum()))
        wrong_z = eve_of_z != msgs[m, 0]
        p_e_terms.append(weights[m] * float(rows_z[m, wrong_z].sum()))
    return math.fsum(p_b_terms), math.fsum(p_e_terms)


def _msg_index(code: SmcCode, message: tuple[int, ...]) -> int:
    sizes = code.message_sizes()
    idx = 0
    stride = 1
    for value, size in zip(message, sizes):
        idx += value * stride
        stride *= size
    return idx
