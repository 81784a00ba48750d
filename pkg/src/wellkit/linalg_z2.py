"""Exact linear algebra over Z/2.

Vectors are Python ints used as bit sets: bit ``i`` is coordinate ``i``.
A :class:`BitMatrix` stores one such int per row.  Subspaces keep a fully
reduced echelon basis (pivot = lowest set bit, pivots strictly increasing),
so two subspaces are equal iff their bases are equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def _low(v: int) -> int:
    return (v & -v).bit_length() - 1


def bits(v: int, n: int) -> list[int]:
    """Coordinates of ``v`` as a 0/1 list of length ``n``."""
    return [(v >> i) & 1 for i in range(n)]


def from_bits(seq: Iterable[int]) -> int:
    v = 0
    for i, b in enumerate(seq):
        if b & 1:
            v |= 1 << i
    return v


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("dimensions must be non-negative")
        if len(self.data) != self.rows:
            raise ValueError("row storage does not match row count")
        limit = 1 << self.cols
        if any(r < 0 or r >= limit for r in self.data):
            raise ValueError("row has bits beyond the column count")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "BitMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(from_bits(r) for r in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[int], rows: int) -> "BitMatrix":
        data = [0] * rows
        for j, c in enumerate(columns):
            if c >> rows:
                raise ValueError("column has bits beyond the row count")
            while c:
                i = _low(c)
                data[i] |= 1 << j
                c &= c - 1
        return cls(rows, len(columns), tuple(data))

    def columns(self) -> list[int]:
        cols = [0] * self.cols
        for i, r in enumerate(self.data):
            while r:
                j = _low(r)
                cols[j] |= 1 << i
                r &= r - 1
        return cols

    def to_lists(self) -> list[list[int]]:
        return [bits(r, self.cols) for r in self.data]

    def apply(self, v: int) -> int:
        """Matrix-vector product ``M v``."""
        if v >> self.cols:
            raise ValueError("vector longer than column count")
        out = 0
        for i, r in enumerate(self.data):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = [self.apply(c) for c in other.columns()]
        return BitMatrix.from_columns(cols, self.rows)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, tuple(self.columns()))


def _echelon(vectors: Iterable[int]) -> list[int]:
    """Fully reduced echelon basis of the span of ``vectors``."""
    basis: dict[int, int] = {}
    for v in vectors:
        for p, b in basis.items():
            if (v >> p) & 1:
                v ^= b
        if v:
            p = _low(v)
            for q in list(basis):
                if (basis[q] >> p) & 1:
                    basis[q] ^= v
            basis[p] = v
    return [basis[p] for p in sorted(basis)]


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: tuple[int, ...]

    def __post_init__(self):
        canon = tuple(_echelon(self.basis))
        if len(canon) > self.ambient_dim or any(v >> self.ambient_dim for v in canon):
            raise ValueError("basis does not fit in the ambient space")
        object.__setattr__(self, "basis", canon)

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[int]) -> "Subspace":
        return cls(ambient_dim, tuple(vectors))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(1 << i for i in range(ambient_dim)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(_low(b) for b in self.basis)

    def reduce(self, v: int) -> int:
        """Residual of ``v`` after eliminating this subspace's pivots."""
        for b in self.basis:
            if (v >> _low(b)) & 1:
                v ^= b
        return v

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def contains(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return all(v in self for v in other.basis)

    def coordinates(self, v: int) -> int:
        """Coordinates of ``v`` in this basis, as a bit set over basis positions."""
        c = 0
        for k, b in enumerate(self.basis):
            if (v >> _low(b)) & 1:
                v ^= b
                c |= 1 << k
        if v:
            raise ValueError("vector is not in the subspace")
        return c

    def combine(self, coords: int) -> int:
        v = 0
        for k, b in enumerate(self.basis):
            if (coords >> k) & 1:
                v ^= b
        return v

    def as_matrix(self) -> BitMatrix:
        """Inclusion map Z/2^rank -> ambient space."""
        return BitMatrix.from_columns(list(self.basis), self.ambient_dim)


def rank(m: BitMatrix) -> int:
    return len(_echelon(m.data))


def image(m: BitMatrix) -> Subspace:
    return Subspace(m.rows, tuple(m.columns()))


def kernel(m: BitMatrix) -> Subspace:
    """Null space of ``m``."""
    n = m.cols
    # column elimination; ``tag`` records which original columns were summed
    pivots: dict[int, tuple[int, int]] = {}
    null = []
    for j, c in enumerate(m.columns()):
        tag = 1 << j
        while c:
            p = _low(c)
            if p not in pivots:
                pivots[p] = (c, tag)
                break
            pc, pt = pivots[p]
            c ^= pc
            tag ^= pt
        if not c:
            null.append(tag)
    return Subspace(n, tuple(null))


def preimage(m: BitMatrix, s: Subspace) -> Subspace:
    """``{v : m v in s}``."""
    if s.ambient_dim != m.rows:
        raise ValueError("subspace does not live in the codomain of the matrix")
    residual = [s.reduce(c) for c in m.columns()]
    return kernel(BitMatrix.from_columns(residual, m.rows))


def push(m: BitMatrix, s: Subspace) -> Subspace:
    """Image of the subspace ``s`` under ``m``."""
    if s.ambient_dim != m.cols:
        raise ValueError("subspace does not live in the domain of the matrix")
    return Subspace(m.rows, tuple(m.apply(v) for v in s.basis))


def intersect(s1: Subspace, s2: Subspace) -> Subspace:
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    inc = s1.as_matrix()
    coords = preimage(inc, s2)
    return Subspace(s1.ambient_dim, tuple(inc.apply(c) for c in coords.basis))


def quotient_basis(big: Subspace, small: Subspace) -> list[int]:
    """Vectors of ``big`` extending a basis of ``small`` to a basis of ``big``."""
    if big.ambient_dim != small.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if not big.contains(small):
        raise ValueError("small subspace is not contained in big")
    acc = small
    reps = []
    for v in big.basis:
        if v not in acc:
            reps.append(v)
            acc = Subspace(acc.ambient_dim, acc.basis + (v,))
    return reps


def solve(m: BitMatrix, y: int) -> int | None:
    """Some ``x`` with ``m x = y``, or ``None`` if ``y`` is not in the image."""
    pivots: dict[int, tuple[int, int]] = {}
    for j, c in enumerate(m.columns()):
        tag = 1 << j
        while c:
            p = _low(c)
            if p not in pivots:
                pivots[p] = (c, tag)
                break
            pc, pt = pivots[p]
            c ^= pc
            tag ^= pt
    x = 0
    while y:
        p = _low(y)
        if p not in pivots:
            return None
        pc, pt = pivots[p]
        y ^= pc
        x ^= pt
    return x
