"""Finite distributions, stochastic kernels, and Shannon information quantities.

Conventions used throughout the package:

* all logarithms are natural, all entropies and rates are in nats;
* 0 * log 0 := 0;
* tuples over product alphabets are indexed little-endian mixed radix:
  position 0 is the least significant digit, so the tuple (x_0, ..., x_{n-1})
  over a base-B alphabet has index sum_t x_t * B**t.

Input vectors are renormalized when their sum is within 1e-9 of 1 and
rejected otherwise; internally every stored vector sums to 1 within 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EnumerationCapExceeded,
    NegativeEntry,
    RowSumOutOfTolerance,
)

INPUT_TOLERANCE = 1e-9
INTERNAL_TOLERANCE = 1e-12

#: Default cap on the number of cells a tensor power may enumerate.
DEFAULT_ENUMERATION_CAP = 10**7


def _normalize_row(row: np.ndarray, what: str) -> np.ndarray:
    if row.ndim != 1 or row.size == 0:
        raise DimensionMismatch(f"{what} must be a nonempty 1-D vector")
    if np.any(row < 0):
        raise NegativeEntry(f"{what} contains a negative entry")
    total = float(row.sum())
    if abs(total - 1.0) > INPUT_TOLERANCE:
        raise RowSumOutOfTolerance(
            f"{what} sums to {total!r}, deviating from 1 by more than {INPUT_TOLERANCE}"
        )
    return row / total


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over a finite alphabet {0, ..., alphabet_size-1}."""

    probs: np.ndarray

    def __post_init__(self):
        row = _normalize_row(np.asarray(self.probs, dtype=float), "distribution")
        row.setflags(write=False)
        object.__setattr__(self, "probs", row)

    @property
    def alphabet_size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, index: int, size: int) -> "Distribution":
        row = np.zeros(size)
        row[index] = 1.0
        return cls(row)

    def to_list(self) -> list[float]:
        return self.probs.tolist()


@dataclass(frozen=True, eq=False)
class Channel:
    """A row-stochastic kernel P(output | input) between two finite alphabets."""

    rows: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.rows, dtype=float)
        if mat.ndim != 2 or mat.size == 0:
            raise DimensionMismatch("channel must be a nonempty 2-D matrix")
        mat = np.vstack([_normalize_row(r, f"channel row {i}") for i, r in enumerate(mat)])
        mat.setflags(write=False)
        object.__setattr__(self, "rows", mat)

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    def row(self, x: int) -> Distribution:
        return Distribution(self.rows[x])

    @classmethod
    def identity(cls, size: int) -> "Channel":
        return cls(np.eye(size))

    @classmethod
    def bsc(cls, p: float) -> "Channel":
        """Binary symmetric channel with crossover probability p."""
        return cls(np.array([[1.0 - p, p], [p, 1.0 - p]]))

    def to_list(self) -> list[list[float]]:
        return self.rows.tolist()


def validate(obj) -> Distribution | Channel:
    """Validate and renormalize a raw vector or matrix of nonnegative reals.

    1-D input becomes a Distribution, 2-D input a Channel; existing objects
    pass through unchanged.
    """
    if isinstance(obj, (Distribution, Channel)):
        return obj
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 1:
        return Distribution(arr)
    if arr.ndim == 2:
        return Channel(arr)
    raise DimensionMismatch(f"cannot validate an array of rank {arr.ndim}")


def compose(first: Channel, second: Channel) -> Channel:
    """Concatenate kernels: (second o first)(c|a) = sum_b second(c|b) first(b|a)."""
    if first.output_size != second.input_size:
        raise DimensionMismatch(
            f"cannot compose {first.output_size}-ary output with "
            f"{second.input_size}-ary input"
        )
    return Channel(first.rows @ second.rows)


def push_forward(p: Distribution, w: Channel) -> Distribution:
    """Average output distribution W_p(y) = sum_x p(x) W(y|x)."""
    if p.alphabet_size != w.input_size:
        raise DimensionMismatch(
            f"distribution over {p.alphabet_size} symbols fed to "
            f"{w.input_size}-ary channel"
        )
    return Distribution(p.probs @ w.rows)


def tensor_power(obj: Distribution | Channel, n: int, cap: int = DEFAULT_ENUMERATION_CAP):
    """n-th memoryless extension, indexed little-endian over positions.

    Position t of a tuple contributes digit * base**t to its index, i.e. the
    first letter is the least significant digit.
    """
    if n < 1:
        raise DimensionMismatch("tensor power requires n >= 1")
    if isinstance(obj, Distribution):
        size = obj.alphabet_size
        if size**n > cap:
            raise EnumerationCapExceeded(f"{size}**{n} cells exceed cap {cap}")
        out = obj.probs
        for _ in range(n - 1):
            out = np.kron(obj.probs, out)
        return Distribution(out)
    if isinstance(obj, Channel):
        cells = obj.input_size**n * obj.output_size**n
        if cells > cap:
            raise EnumerationCapExceeded(f"{cells} cells exceed cap {cap}")
        out = obj.rows
        for _ in range(n - 1):
            out = np.kron(obj.rows, out)
        return Channel(out)
    raise DimensionMismatch("tensor_power expects a Distribution or Channel")


def pack_tuple(digits: Sequence[int], base: int) -> int:
    """Little-endian mixed-radix index of a tuple over a base-`base` alphabet."""
    index = 0
    for t, d in enumerate(digits):
        index += int(d) * base**t
    return index


def unpack_index(index: int, base: int, n: int) -> tuple[int, ...]:
    """Inverse of pack_tuple."""
    digits = []
    for _ in range(n):
        digits.append(index % base)
        index //= base
    return tuple(digits)


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x * log(y) with the 0 log 0 := 0 convention."""
    out = np.zeros_like(x, dtype=float)
    mask = x > 0
    out[mask] = x[mask] * np.log(y[mask])
    return out


def entropy(p: Distribution) -> float:
    """Shannon entropy in nats."""
    return -float(_xlogy(p.probs, p.probs).sum())


def mutual_information(p_in: Distribution, w: Channel) -> float:
    """I(input; output) of a channel driven by p_in, in nats."""
    if p_in.alphabet_size != w.input_size:
        raise DimensionMismatch("input distribution does not match channel")
    p_out = p_in.probs @ w.rows
    joint = p_in.probs[:, None] * w.rows
    ratio = np.ones_like(joint)
    mask = joint > 0
    ratio[mask] = w.rows[mask] / np.broadcast_to(p_out, joint.shape)[mask]
    return float(_xlogy(joint, ratio).sum())


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """The Markov chain U -> V -> X -> (Y, Z).

    Holds the auxiliary input law P_U, the superposition kernel P_{V|U}, the
    artificial channel Xi = P_{X|V}, and the physical marginals P_{Y|X} and
    P_{Z|X}.
    """

    p_u: Distribution
    p_v_given_u: Channel
    xi: Channel
    w_y: Channel
    w_z: Channel

    def __post_init__(self):
        if self.p_u.alphabet_size != self.p_v_given_u.input_size:
            raise DimensionMismatch("|U| of p_u does not match p_v_given_u")
        if self.p_v_given_u.output_size != self.xi.input_size:
            raise DimensionMismatch("|V| of p_v_given_u does not match xi")
        if self.xi.output_size != self.w_y.input_size:
            raise DimensionMismatch("|X| of xi does not match w_y")
        if self.xi.output_size != self.w_z.input_size:
            raise DimensionMismatch("|X| of xi does not match w_z")

    @property
    def u_size(self) -> int:
        return self.p_u.alphabet_size

    @property
    def v_size(self) -> int:
        return self.p_v_given_u.output_size

    @property
    def x_size(self) -> int:
        return self.xi.output_size

    @cached_property
    def p_y_given_v(self) -> Channel:
        return compose(self.xi, self.w_y)

    @cached_property
    def p_z_given_v(self) -> Channel:
        return compose(self.xi, self.w_z)

    @cached_property
    def p_y_given_u(self) -> Channel:
        return compose(self.p_v_given_u, self.p_y_given_v)

    @cached_property
    def p_z_given_u(self) -> Channel:
        return compose(self.p_v_given_u, self.p_z_given_v)

    @cached_property
    def p_v(self) -> Distribution:
        return push_forward(self.p_u, self.p_v_given_u)

    def tensor_power(self, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> "ChainSpec":
        return ChainSpec(
            p_u=tensor_power(self.p_u, n, cap),
            p_v_given_u=tensor_power(self.p_v_given_u, n, cap),
            xi=tensor_power(self.xi, n, cap),
            w_y=tensor_power(self.w_y, n, cap),
            w_z=tensor_power(self.w_z, n, cap),
        )

    @classmethod
    def from_dict(cls, data: dict) -> "ChainSpec":
        """Build from the JSON chain-spec object (keys p_u, p_v_given_u, xi, w_y, w_z)."""
        missing = [k for k in ("p_u", "p_v_given_u", "xi", "w_y", "w_z") if k not in data]
        if missing:
            raise DimensionMismatch(f"chain spec missing key {missing[0]!r}")
        return cls(
            p_u=Distribution(np.asarray(data["p_u"], dtype=float)),
            p_v_given_u=Channel(np.asarray(data["p_v_given_u"], dtype=float)),
            xi=Channel(np.asarray(data["xi"], dtype=float)),
            w_y=Channel(np.asarray(data["w_y"], dtype=float)),
            w_z=Channel(np.asarray(data["w_z"], dtype=float)),
        )

    def to_dict(self) -> dict:
        return {
            "p_u": self.p_u.to_list(),
            "p_v_given_u": self.p_v_given_u.to_list(),
            "xi": self.xi.to_list(),
            "w_y": self.w_y.to_list(),
            "w_z": self.w_z.to_list(),
        }


_MI_KINDS = {
    "i(u;y)": "uy",
    "i(u;z)": "uz",
    "i(v;y|u)": "vy|u",
    "i(v;z|u)": "vz|u",
}


def mutual_info(chain: ChainSpec, kind: str) -> float:
    """Exact Shannon (conditional) mutual information of the induced joint law.

    kind is one of "I(U;Y)", "I(U;Z)", "I(V;Y|U)", "I(V;Z|U)"; the result is
    in nats.
    """
    key = _MI_KINDS.get(kind.replace(" ", "").lower())
    if key is None:
        raise DimensionMismatch(f"unknown mutual information selector {kind!r}")
    if key == "uy":
        return mutual_information(chain.p_u, chain.p_y_given_u)
    if key == "uz":
        return mutual_information(chain.p_u, chain.p_z_given_u)
    w = chain.p_y_given_v if key == "vy|u" else chain.p_z_given_v
    total = 0.0
    for u, pu in enumerate(chain.p_u.probs):
        if pu == 0.0:
            continue
        total += pu * mutual_information(Distribution(chain.p_v_given_u.rows[u]), w)
    return total
