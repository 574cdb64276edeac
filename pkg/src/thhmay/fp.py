"""Exact linear algebra over the prime field F_p.

Two flavours live here.  Dense :class:`FpMatrix` helpers (``rref``,
``kernel_basis``, ``subquotient_basis``) are used for small blocks and as
the independent oracle in tests.  :class:`Echelon` and :func:`sparse_kernel`
work on ``dict`` vectors and carry the degreewise computations of the
spectral-sequence engine and the comodule primitives, where blocks are
large but very sparse.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

SparseVec = dict  # key -> nonzero coefficient in [1, p)


class InconsistentDifferential(ValueError):
    """Boundaries were found outside the span of the cycles."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p) or self.p < 3:
            raise ValueError(f"an odd prime is required, got {self.p!r}")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return pow(a, self.p - 2, self.p)


@dataclass(frozen=True)
class FpMatrix:
    p: int
    entries: np.ndarray = field(compare=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.int64, ndmin=2) % self.p
        if a.size == 0:
            a = a.reshape(np.array(self.entries, ndmin=2).shape)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __eq__(self, other):
        return (isinstance(other, FpMatrix) and self.p == other.p
                and self.entries.shape == other.entries.shape
                and bool(np.array_equal(self.entries, other.entries)))

    def __hash__(self):
        return hash((self.p, self.entries.shape, self.entries.tobytes()))

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            return FpMatrix(self.p, (self.entries @ other.entries) % self.p)
        return (self.entries @ np.asarray(other, dtype=np.int64)) % self.p

    def tolist(self):
        return self.entries.tolist()


def rref(m: FpMatrix) -> tuple[FpMatrix, list[int]]:
    """Reduced row-echelon form with leftmost-nonzero pivoting."""
    p = m.p
    a = m.entries.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        rows_to_fix = np.nonzero(col)[0]
        if rows_to_fix.size:
            a[rows_to_fix] = (a[rows_to_fix] - np.outer(col[rows_to_fix], a[r])) % p
        pivots.append(c)
        r += 1
    return FpMatrix(p, a), pivots


def rank(m: FpMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m)[1])


def kernel_basis(m: FpMatrix) -> list[np.ndarray]:
    """Basis of {v : m v = 0}, one vector per free column."""
    p = m.p
    red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(m.cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-red.entries[i, f]) % p
        basis.append(v)
    return basis


def subquotient_basis(space_dim: int, cycles: Sequence[Sequence[int]],
                      boundaries: Sequence[Sequence[int]], p: int) -> list[np.ndarray]:
    """Representatives of a basis of span(cycles) / span(boundaries).

    Raises :class:`InconsistentDifferential` if a boundary is not a
    combination of the cycles.
    """
    z = np.array(cycles, dtype=np.int64).reshape(len(cycles), space_dim) % p
    b = np.array(boundaries, dtype=np.int64).reshape(len(boundaries), space_dim) % p
    rz = rank(FpMatrix(p, z)) if len(cycles) else 0
    if len(boundaries):
        rb = rank(FpMatrix(p, b))
        if rank(FpMatrix(p, np.vstack([z, b]))) != rz:
            raise InconsistentDifferential("boundaries are not contained in the cycle span")
    else:
        rb = 0
    reps: list[np.ndarray] = []
    current = b
    cur_rank = rb
    for v in z:
        trial = np.vstack([current, v[None, :]])
        r = rank(FpMatrix(p, trial))
        if r > cur_rank:
            reps.append(v.copy())
            current, cur_rank = trial, r
    assert len(reps) == rz - rb
    return reps


# -- sparse vectors -------------------------------------------------------

def axpy(y: SparseVec, a: int, x: SparseVec, p: int) -> None:
    """y += a*x in place."""
    if a % p == 0:
        return
    for k, c in x.items():
        v = (y.get(k, 0) + a * c) % p
        if v:
            y[k] = v
        else:
            y.pop(k, None)


def scaled(x: SparseVec, a: int, p: int) -> SparseVec:
    a %= p
    if not a:
        return {}
    return {k: (c * a) % p for k, c in x.items()}


class Echelon:
    """Incremental row echelon of sparse vectors with label bookkeeping.

    Every stored row remembers which inserted vectors it is a combination
    of, so :meth:`reduce` can express a vector in terms of the inserted
    ones.  Rows inserted with ``label=None`` are bookkeeping-free (used for
    boundaries that are quotiented out).
    """

    def __init__(self, p: int, order=None, last: bool = False):
        self.p = p
        self.rows: dict[Hashable, tuple[SparseVec, SparseVec]] = {}
        self.order = order  # key function choosing the pivot; default min
        self.last = last  # pivot on max instead

    def _lead(self, v: SparseVec):
        if self.order:
            return min(v, key=self.order)
        return max(v) if self.last else min(v)

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: SparseVec) -> tuple[SparseVec, SparseVec]:
        """Return (remainder, combo) with v = remainder + sum combo[l]*inserted[l]."""
        p = self.p
        rest = dict(v)
        out: SparseVec = {}
        combo: SparseVec = {}
        while rest:
            lead = self._lead(rest)
            row = self.rows.get(lead)
            if row is None:
                out[lead] = rest.pop(lead)
                continue
            vec, lab = row
            f = rest[lead]
            axpy(rest, -f, vec, p)
            axpy(combo, f, lab, p)
        return out, combo

    def add(self, v: SparseVec, label: Hashable | None = None) -> bool:
        """Insert v; return False if it was already in the span."""
        p = self.p
        rem, combo = self.reduce(v)
        if not rem:
            return False
        lab: SparseVec = {}
        if label is not None:
            lab = {label: 1}
            axpy(lab, -1, combo, p)
        lead = self._lead(rem)
        inv = pow(rem[lead], p - 2, p)
        self.rows[lead] = (scaled(rem, inv, p), scaled(lab, inv, p))
        return True

    def contains(self, v: SparseVec) -> bool:
        return not self.reduce(v)[0]


def sparse_kernel(images: Sequence[SparseVec], p: int) -> list[SparseVec]:
    """Kernel of the map sending basis vector j to images[j].

    Kernel vectors are dicts over source indices; each has a distinct top
    index with coefficient 1, so they are independent.
    """
    ech = Echelon(p)
    kernel: list[SparseVec] = []
    for j, img in enumerate(images):
        rem, combo = ech.reduce(img)
        if not rem:
            k = {j: 1}
            axpy(k, -1, combo, p)
            kernel.append(k)
            continue
        lead = min(rem)
        inv = pow(rem[lead], p - 2, p)
        lab = {j: 1}
        axpy(lab, -1, combo, p)
        ech.rows[lead] = (scaled(rem, inv, p), scaled(lab, inv, p))
    return kernel


def sparse_rank(vectors: Iterable[SparseVec], p: int) -> int:
    ech = Echelon(p)
    return sum(1 for v in vectors if ech.add(v))
