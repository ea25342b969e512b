"""Prime-field vector spaces and the random affine mixing layer.

The mixing layer applies an invertible matrix F over F_q followed by an
offset G: a |-> F a + G.  Drawn uniformly from the full invertible family
with a uniform offset, the layer maps every fixed nonzero input to every
nonzero output with probability exactly 1/(q^dim - 1), the balancedness the
leakage bounds require.  Message tuples enter and leave the layer as
concatenated base-q digit vectors, little-endian per message, messages in
order 1..T; the (B_1, B_2) split takes the first b1_dim coordinates.

Only prime fields are supported: the constructions need just an F_q-module
structure, and prime q keeps the arithmetic elementary and the exhaustive
oracles tiny.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._rng import generator
from .errors import (
    DimensionMismatch,
    EnumerationCapExceeded,
    IndexOutOfRange,
    NotPrime,
    ZeroVector,
)

DEFAULT_FAMILY_CAP = 10**6


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    for d in range(2, int(math.isqrt(q)) + 1):
        if q % d == 0:
            return False
    return True


def _require_prime(q: int):
    if not is_prime(q):
        raise NotPrime(f"field order {q} is not prime")


def _det_mod(matrix: np.ndarray, q: int) -> int:
    """Determinant of an integer matrix modulo the prime q."""
    m = np.array(matrix, dtype=np.int64) % q
    n = m.shape[0]
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r, col] % q != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[[col, pivot]] = m[[pivot, col]]
            det = -det % q
        det = det * m[col, col] % q
        inv = pow(int(m[col, col]), q - 2, q)
        for r in range(col + 1, n):
            factor = m[r, col] * inv % q
            m[r] = (m[r] - factor * m[col]) % q
    return int(det % q)


def _inverse_mod(matrix: np.ndarray, q: int) -> np.ndarray:
    """Inverse of an invertible matrix over F_q by Gauss-Jordan elimination."""
    n = matrix.shape[0]
    aug = np.concatenate([np.array(matrix, dtype=np.int64) % q, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r, col] % q != 0), None)
        if pivot is None:
            raise ZeroVector("matrix is singular over F_q")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] = aug[col] * pow(int(aug[col, col]), q - 2, q) % q
        for r in range(n):
            if r != col and aug[r, col] % q != 0:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % q
    return aug[:, n:] % q


@dataclass(frozen=True)
class FieldVec:
    """A vector over the prime field F_q."""

    q: int
    coords: tuple[int, ...]

    def __post_init__(self):
        _require_prime(self.q)
        object.__setattr__(self, "coords", tuple(int(c) % self.q for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other: "FieldVec") -> "FieldVec":
        if self.q != other.q or self.dim != other.dim:
            raise DimensionMismatch("field vectors do not match")
        return FieldVec(self.q, tuple((a + b) % self.q for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "FieldVec") -> "FieldVec":
        if self.q != other.q or self.dim != other.dim:
            raise DimensionMismatch("field vectors do not match")
        return FieldVec(self.q, tuple((a - b) % self.q for a, b in zip(self.coords, other.coords)))

    def to_index(self) -> int:
        """Little-endian base-q index of the coordinate tuple."""
        return sum(c * self.q**t for t, c in enumerate(self.coords))

    @classmethod
    def from_index(cls, q: int, dim: int, index: int) -> "FieldVec":
        coords = []
        for _ in range(dim):
            coords.append(index % q)
            index //= q
        return cls(q, tuple(coords))

    @classmethod
    def zero(cls, q: int, dim: int) -> "FieldVec":
        return cls(q, (0,) * dim)


@dataclass(frozen=True)
class AffineMap:
    """An invertible affine map a |-> F a + G over F_q^dim."""

    q: int
    matrix: tuple[tuple[int, ...], ...]
    offset: FieldVec

    def __post_init__(self):
        _require_prime(self.q)
        mat = tuple(tuple(int(x) % self.q for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", mat)
        dim = len(mat)
        if any(len(row) != dim for row in mat):
            raise DimensionMismatch("matrix must be square")
        if self.offset.q != self.q or self.offset.dim != dim:
            raise DimensionMismatch("offset does not match the matrix")
        if dim > 0 and _det_mod(np.array(mat, dtype=np.int64).reshape(dim, dim), self.q) == 0:
            raise ZeroVector("matrix is singular over F_q")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, q: int, dim: int) -> "AffineMap":
        eye = tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))
        return cls(q, eye, FieldVec.zero(q, dim))

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "dim": self.dim,
            "matrix": [list(row) for row in self.matrix],
            "offset": list(self.offset.coords),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AffineMap":
        for key in ("q", "dim", "matrix", "offset"):
            if key not in data:
                raise DimensionMismatch(f"affine map spec missing key {key!r}")
        q, dim = int(data["q"]), int(data["dim"])
        matrix = np.asarray(data["matrix"], dtype=np.int64).reshape(dim, dim)
        return cls(q, tuple(tuple(int(x) for x in row) for row in matrix),
                   FieldVec(q, tuple(int(x) for x in data["offset"])))


def apply(mapping: AffineMap, a: FieldVec) -> FieldVec:
    """Lambda_{F,G}(a) = F a + G."""
    if a.q != mapping.q or a.dim != mapping.dim:
        raise DimensionMismatch("vector does not match the map")
    if mapping.dim == 0:
        return a
    mat = np.array(mapping.matrix, dtype=np.int64)
    out = (mat @ np.array(a.coords, dtype=np.int64)) % mapping.q
    return FieldVec(mapping.q, tuple(int(x) for x in out)) + mapping.offset


def invert(mapping: AffineMap, x: FieldVec) -> FieldVec:
    """The unique a with F a + G = x."""
    if x.q != mapping.q or x.dim != mapping.dim:
        raise DimensionMismatch("vector does not match the map")
    if mapping.dim == 0:
        return x
    inv = _inverse_mod(np.array(mapping.matrix, dtype=np.int64), mapping.q)
    shifted = np.array((x - mapping.offset).coords, dtype=np.int64)
    out = (inv @ shifted) % mapping.q
    return FieldVec(mapping.q, tuple(int(v) for v in out))


def sample_map(q: int, dim: int, seed: int) -> AffineMap:
    """Uniform invertible matrix (rejection sampling on the determinant) plus
    uniform offset, deterministic in the seed."""
    _require_prime(q)
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    rng = generator(seed)
    while True:
        mat = rng.integers(0, q, size=(dim, dim))
        if _det_mod(mat, q) != 0:
            break
    offset = FieldVec(q, tuple(int(x) for x in rng.integers(0, q, size=dim)))
    return AffineMap(q, tuple(tuple(int(x) for x in row) for row in mat), offset)


def enumerate_family(q: int, dim: int, cap: int = DEFAULT_FAMILY_CAP) -> list[np.ndarray]:
    """All invertible dim x dim matrices over F_q, lexicographic by entries."""
    _require_prime(q)
    total = q ** (dim * dim)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} candidate matrices exceed cap {cap}")
    family = []
    for entries in itertools.product(range(q), repeat=dim * dim):
        mat = np.array(entries, dtype=np.int64).reshape(dim, dim)
        if _det_mod(mat, q) != 0:
            family.append(mat)
    return family


def condition2b_probability(family: Sequence[np.ndarray], a: FieldVec, x: FieldVec) -> float:
    """Fraction of family members mapping a to x.

    For the full invertible family this equals 1/(q^dim - 1) exactly for any
    nonzero pair, the balancedness bound the resolvability layer needs.
    """
    if a.is_zero() or x.is_zero():
        raise ZeroVector("condition 2 is stated for nonzero vectors only")
    av = np.array(a.coords, dtype=np.int64)
    xv = np.array(x.coords, dtype=np.int64)
    hits = sum(1 for mat in family if np.array_equal((mat @ av) % a.q, xv))
    return hits / len(family)


@dataclass(frozen=True)
class MessageLayout:
    """Digit layout of the message spaces over F_q.

    dims lists k_0 ... k_T: message i occupies k_i base-q digits, the common
    message k_0 of them.  The secret digits (messages 1..T concatenated)
    split into B_1 (the first b1_dim coordinates) and B_2 (the rest).
    """

    q: int
    dims: tuple[int, ...]
    b1_dim: int
    b2_dim: int

    def __post_init__(self):
        _require_prime(self.q)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.dims) < 2:
            raise DimensionMismatch("layout needs dims k_0..k_T with T >= 1")
        if any(d < 0 for d in self.dims) or self.b1_dim < 0 or self.b2_dim < 0:
            raise DimensionMismatch("all dimensions must be nonnegative")
        if sum(self.dims[1:]) != self.b1_dim + self.b2_dim:
            raise DimensionMismatch("secret digits must split exactly into B_1 and B_2")

    @property
    def t(self) -> int:
        return len(self.dims) - 1

    @property
    def secret_dim(self) -> int:
        return self.b1_dim + self.b2_dim

    @property
    def s0_size(self) -> int:
        return self.q ** self.dims[0]

    @property
    def b1_size(self) -> int:
        return self.q**self.b1_dim

    @property
    def b2_size(self) -> int:
        return self.q**self.b2_dim

    def message_size(self, i: int) -> int:
        return self.q ** self.dims[i]

    def message_sizes(self) -> tuple[int, ...]:
        return tuple(self.q**d for d in self.dims)

    def to_dict(self) -> dict:
        return {"q": self.q, "dims": list(self.dims), "b1_dim": self.b1_dim, "b2_dim": self.b2_dim}

    @classmethod
    def from_dict(cls, data: dict) -> "MessageLayout":
        for key in ("q", "dims", "b1_dim", "b2_dim"):
            if key not in data:
                raise DimensionMismatch(f"layout spec missing key {key!r}")
        return cls(int(data["q"]), tuple(int(d) for d in data["dims"]),
                   int(data["b1_dim"]), int(data["b2_dim"]))


def pack(layout: MessageLayout, messages: Iterable[int]) -> FieldVec:
    """Concatenate the secret messages (s_1, ..., s_T) into one digit vector."""
    messages = tuple(int(m) for m in messages)
    if len(messages) != layout.t:
        raise IndexOutOfRange(f"expected {layout.t} secret messages, got {len(messages)}")
    coords: list[int] = []
    for i, m in enumerate(messages, start=1):
        size = layout.message_size(i)
        if not 0 <= m < size:
            raise IndexOutOfRange(f"message {i} index {m} outside [0, {size})")
        for _ in range(layout.dims[i]):
            coords.append(m % layout.q)
            m //= layout.q
    return FieldVec(layout.q, tuple(coords))


def unpack(layout: MessageLayout, vec: FieldVec) -> tuple[int, ...]:
    """Inverse of pack."""
    if vec.q != layout.q or vec.dim != layout.secret_dim:
        raise DimensionMismatch("vector does not match the layout")
    messages = []
    pos = 0
    for i in range(1, layout.t + 1):
        k = layout.dims[i]
        index = 0
        for t in range(k):
            index += vec.coords[pos + t] * layout.q**t
        messages.append(index)
        pos += k
    return tuple(messages)


def split_b(layout: MessageLayout, vec: FieldVec) -> tuple[int, int]:
    """(b_1, b_2) indices of a packed vector: B_1 takes the leading coordinates."""
    if vec.dim != layout.secret_dim:
        raise DimensionMismatch("vector does not match the layout")
    b1 = sum(vec.coords[t] * layout.q**t for t in range(layout.b1_dim))
    b2 = sum(vec.coords[layout.b1_dim + t] * layout.q**t for t in range(layout.b2_dim))
    return b1, b2


def join_b(layout: MessageLayout, b1: int, b2: int) -> FieldVec:
    """Inverse of split_b."""
    if not 0 <= b1 < layout.b1_size or not 0 <= b2 < layout.b2_size:
        raise IndexOutOfRange("(b_1, b_2) outside the layout")
    coords = list(FieldVec.from_index(layout.q, layout.b1_dim, b1).coords)
    coords += list(FieldVec.from_index(layout.q, layout.b2_dim, b2).coords)
    return FieldVec(layout.q, tuple(coords))
