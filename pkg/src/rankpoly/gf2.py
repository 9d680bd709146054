"""Bit-packed linear algebra over the two-element field.

Rows are Python ints used as bitmasks (bit j = column j), so row operations
are single XORs regardless of width.  ``F2Matrix`` is an immutable value;
``RankProfile`` is a single-owner mutable elimination state that keeps rank
(and a left-nullspace basis) current under single-entry flips.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import BipartiteGraph, EdgeSubset, Graph


@dataclass(frozen=True)
class F2Matrix:
    rows: int
    cols: int
    data: tuple[int, ...]  # data[i] = bitmask of row i

    def __post_init__(self):
        object.__setattr__(self, "data", tuple(int(r) for r in self.data))
        if len(self.data) != self.rows:
            raise ValueError("row count mismatch")
        mask = (1 << self.cols) - 1
        for r in self.data:
            if r & ~mask:
                raise ValueError("set bit beyond declared column count")

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def flipped(self, i: int, j: int) -> "F2Matrix":
        rows = list(self.data)
        rows[i] ^= 1 << j
        return F2Matrix(self.rows, self.cols, tuple(rows))


def zero_matrix(rows: int, cols: int) -> F2Matrix:
    return F2Matrix(rows, cols, (0,) * rows)


def identity_matrix(n: int) -> F2Matrix:
    return F2Matrix(n, n, tuple(1 << i for i in range(n)))


def rank(m: F2Matrix) -> int:
    """Rank over the two-element field by plain Gaussian elimination.

    Independent of RankProfile on purpose: serves as its correctness oracle.
    """
    return rank_of_rows(list(m.data))


def rank_of_rows(rows: list[int]) -> int:
    pivots: list[int] = []  # reduced rows, one pivot (lowest set bit) each
    r = 0
    for row in rows:
        for p in pivots:
            low = p & -p
            if row & low:
                row ^= p
        if row:
            pivots.append(row)
            r += 1
    return r


def adjacency(g: Graph, subset: EdgeSubset | None = None) -> F2Matrix:
    """n x n symmetric zero-diagonal adjacency matrix of (V, subset)."""
    s = g.full_subset() if subset is None else subset
    rows = [0] * g.n
    for i, (u, v) in enumerate(g.edges):
        if (s >> i) & 1:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
    return F2Matrix(g.n, g.n, tuple(rows))


def bipartite_adjacency(b: BipartiteGraph, subset: EdgeSubset | None = None) -> F2Matrix:
    """|U| x |W| matrix with entry (u, w) = 1 iff {u, w} is in the subset."""
    s = b.graph.full_subset() if subset is None else subset
    rows = [0] * len(b.side_u)
    for eid, (ui, wi) in enumerate(b.oriented_edges()):
        if (s >> eid) & 1:
            rows[ui] |= 1 << wi
    return F2Matrix(len(b.side_u), len(b.side_w), tuple(rows))


class RankProfile:
    """Maintained elimination state of a matrix under single-entry flips.

    Keeps an invertible row transform T with R = T*M where the nonzero rows
    of R have pairwise distinct pivots (lowest set bits), so rank = number of
    nonzero R rows and {T[k] : R[k] = 0} is a left-nullspace basis.  A flip
    of entry (i, j) perturbs exactly the R rows whose T row involves source
    row i; only rows whose pivot is disturbed get re-eliminated.

    With ``paranoid=True`` every flip is cross-checked against a from-scratch
    elimination (debugging aid; tests use it on small matrices).
    """

    def __init__(self, source: F2Matrix, paranoid: bool = False):
        self.nrows = source.rows
        self.ncols = source.cols
        self.rows: list[int] = list(source.data)
        self.paranoid = paranoid
        self.T: list[int] = [1 << k for k in range(self.nrows)]
        self.R: list[int] = list(source.data)
        self.pivot_owner: dict[int, int] = {}
        self.pivot_of: list[int] = [-1] * self.nrows  # -1 = zero row
        self.rank = 0
        for k in range(self.nrows):
            self._insert(k)

    def _insert(self, k: int) -> None:
        v = self.R[k]
        t = self.T[k]
        owner = self.pivot_owner
        R, T = self.R, self.T
        while v:
            p = (v & -v).bit_length() - 1
            o = owner.get(p)
            if o is None:
                owner[p] = k
                self.pivot_of[k] = p
                R[k] = v
                T[k] = t
                self.rank += 1
                return
            v ^= R[o]
            t ^= T[o]
        R[k] = 0
        T[k] = t
        self.pivot_of[k] = -1

    def flip_entry(self, i: int, j: int) -> int:
        """Flip entry (i, j) of the source matrix; returns the new rank."""
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError("entry out of range")
        bit = 1 << j
        self.rows[i] ^= bit
        ibit = 1 << i
        R, T, pivot_of = self.R, self.T, self.pivot_of
        requeue: list[int] = []
        for k in range(self.nrows):
            if T[k] & ibit:
                v = R[k] ^ bit
                R[k] = v
                p = pivot_of[k]
                if v == 0:
                    if p >= 0:
                        del self.pivot_owner[p]
                        pivot_of[k] = -1
                        self.rank -= 1
                elif p < 0 or (v & -v).bit_length() - 1 != p:
                    if p >= 0:
                        del self.pivot_owner[p]
                        pivot_of[k] = -1
                        self.rank -= 1
                    requeue.append(k)
        for k in requeue:
            self._insert(k)
        if self.paranoid:
            fresh = rank_of_rows(list(self.rows))
            if fresh != self.rank:
                raise AssertionError(
                    f"maintained rank {self.rank} != from-scratch rank {fresh}"
                )
        return self.rank

    def matrix(self) -> F2Matrix:
        return F2Matrix(self.nrows, self.ncols, tuple(self.rows))

    def left_nullspace_basis(self) -> list[int]:
        """Bitmask basis (over row indices) of {x : x^T M = 0}."""
        return [self.T[k] for k in range(self.nrows) if self.R[k] == 0]


def left_nullspace(m: F2Matrix) -> list[int]:
    """Basis of the left null space; size = rows - rank."""
    return RankProfile(m).left_nullspace_basis()


def sample_left_nullspace(m: F2Matrix, rng) -> int:
    """Uniform vector from the left null space (bitmask over row indices).

    ``rng`` needs a ``randbits(k)`` method.
    """
    basis = left_nullspace(m)
    v = 0
    if basis:
        picks = rng.randbits(len(basis))
        for idx, b in enumerate(basis):
            if (picks >> idx) & 1:
                v ^= b
    return v


def vector_matrix_product(vec: int, m: F2Matrix) -> int:
    """x^T M over the two-element field: XOR of rows selected by vec."""
    out = 0
    v = vec
    while v:
        k = (v & -v).bit_length() - 1
        out ^= m.data[k]
        v &= v - 1
    return out
