"""Exact simplicial homology over the rationals."""

from __future__ import annotations

from dataclasses import dataclass

from .complex import Cell, SimplicialComplex


@dataclass(frozen=True)
class BoundaryMatrix:
    """Oriented boundary map from k-cells (columns) to (k-1)-cells (rows).

    Orientation follows the sorted vertex order: the face obtained by dropping
    the i-th vertex enters with sign (-1)^i.
    """

    rows: tuple
    cols: tuple
    entries: tuple  # row-major tuple of int tuples

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def column(self, j: int) -> list[int]:
        return [row[j] for row in self.entries]

    def rank(self) -> int:
        return integer_rank([list(r) for r in self.entries])

    def __matmul__(self, other: "BoundaryMatrix") -> list[list[int]]:
        if self.cols != other.rows:
            raise ValueError("incompatible boundary matrices")
        n, m, q = len(self.rows), len(self.cols), len(other.cols)
        return [[sum(self.entries[i][t] * other.entries[t][j] for t in range(m)) for j in range(q)] for i in range(n)]


def integer_rank(matrix: list[list[int]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination.  Mutates ``matrix``."""
    if not matrix or not matrix[0]:
        return 0
    nrows, ncols = len(matrix), len(matrix[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if matrix[r][col]), None)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        prow = matrix[rank]
        p = prow[col]
        for r in range(rank + 1, nrows):
            row = matrix[r]
            a = row[col]
            if a:
                matrix[r] = [(p * x - a * y) // prev for x, y in zip(row, prow)]
            elif p != prev:
                matrix[r] = [(p * x) // prev for x in row]
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def boundary_matrix(X: SimplicialComplex, k: int) -> BoundaryMatrix:
    if k < 1:
        raise ValueError("boundary matrices are defined for k >= 1")
    rows = tuple(X.cells_of_dim(k - 1))
    cols = tuple(X.cells_of_dim(k))
    index = {c: i for i, c in enumerate(rows)}
    entries = [[0] * len(cols) for _ in rows]
    for j, c in enumerate(cols):
        for i in range(len(c)):
            entries[index[c[:i] + c[i + 1:]]][j] = -1 if i % 2 else 1
    return BoundaryMatrix(rows, cols, tuple(tuple(r) for r in entries))


def _boundary_rank(cells_k: list[Cell], cells_below: list[Cell]) -> int:
    if not cells_k or not cells_below:
        return 0
    index = {c: i for i, c in enumerate(cells_below)}
    # transpose: one row per k-cell keeps rows short for elimination
    m = []
    for c in cells_k:
        row = [0] * len(cells_below)
        for i in range(len(c)):
            row[index[c[:i] + c[i + 1:]]] = -1 if i % 2 else 1
        m.append(row)
    return integer_rank(m)


def _components(X: SimplicialComplex) -> int:
    parent = {c[0]: c[0] for c in X.cells if len(c) == 1}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    count = len(parent)
    for c in X.cells:
        if len(c) == 2:
            a, b = find(c[0]), find(c[1])
            if a != b:
                parent[a] = b
                count -= 1
    return count


def betti(X: SimplicialComplex, k: int) -> int:
    """k-th Betti number over Q: dim ker d_k - rank d_{k+1}."""
    if k < 0:
        return 0
    if k == 0:
        # rank d_1 = V - components; union-find gives the same value exactly
        return _components(X)
    ck = X.cells_of_dim(k)
    if not ck:
        return 0
    r_k = _boundary_rank(ck, X.cells_of_dim(k - 1))
    r_k1 = _boundary_rank(X.cells_of_dim(k + 1), ck)
    return len(ck) - r_k - r_k1


def betti_numbers(X: SimplicialComplex) -> list[int]:
    """All Betti numbers b_0 .. b_dim."""
    by_dim = [X.cells_of_dim(k) for k in range(X.dimension + 1)]
    ranks = [0] + [_boundary_rank(by_dim[k], by_dim[k - 1]) for k in range(1, len(by_dim))] + [0]
    return [len(by_dim[k]) - ranks[k] - ranks[k + 1] for k in range(len(by_dim))]


def euler(X: SimplicialComplex) -> int:
    return sum((-1) ** (len(c) - 1) for c in X.cells)
