"""Coefficients c_k of pattern monomials and the rules that short-circuit them.

For a pattern of k-cells, c_k is the alternating sum of b_k over every way of
deleting some of its k-cells.  It is computed three ways here: directly
(:func:`c_direct`), through the level recursion sum_i c_k(level i) = b_k with
memoization on canonical forms (:func:`c_recursive`), and by the zero rules
(spikes, non-intersecting cycle unions) plus the two shrinking moves
(:func:`reduce_pattern`, :func:`erase_cycle_rule`).
"""

from __future__ import annotations

import itertools
import math
import os
import random
import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import numpy as np

from .complex import Cell, facets, make_cell
from .errors import CacheCorruptionError, GuardExceeded
from .homology import integer_rank
from .patterns import CanonicalForm, Pattern, canonical_form

DEFAULT_MAX_CELLS = 20
DEFAULT_RECURSION_LIMIT = 14


# --- cache --------------------------------------------------------------------

class CoefficientCache:
    """Map canonical form -> c_k, optionally persisted as ``<hex> <k> <c>`` lines.

    Reads are lock-free; inserts are serialized.  Inserting a key twice with
    the same value is a no-op, with a different value an error.
    """

    def __init__(self, path: Optional[str | os.PathLike] = None):
        self.path = path
        self._data: dict[bytes, int] = {}
        self._lock = threading.Lock()
        if path is not None and os.path.exists(path):
            self._load()

    def _load(self):
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    hexkey, k, value = line.split()
                    key = bytes.fromhex(hexkey)
                    if len(key) < 2 or key[0] != int(k):
                        raise ValueError("dimension tag mismatch")
                    CanonicalForm(key).to_pattern()
                    self._data[key] = int(value)
                except ValueError as exc:
                    warnings.warn(f"{self.path}:{lineno}: skipping corrupt cache line ({exc})", stacklevel=2)

    def get(self, form: CanonicalForm) -> Optional[int]:
        return self._data.get(form.key)

    def put(self, form: CanonicalForm, value: int) -> None:
        value = int(value)
        with self._lock:
            old = self._data.get(form.key)
            if old is not None:
                if old != value:
                    raise CacheCorruptionError(f"cache entry {form.hex()} holds {old}, recomputed {value}")
                return
            self._data[form.key] = value
            if self.path is not None:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(f"{form.hex()} {form.k} {value}\n")

    def items(self) -> Iterator[tuple[CanonicalForm, int]]:
        for key, value in list(self._data.items()):
            yield CanonicalForm(key), value

    def verify(self, sample: Optional[int] = None, seed: int = 0) -> int:
        """Recompute sampled entries with :func:`c_direct`; returns how many were checked."""
        entries = list(self.items())
        if sample is not None and sample < len(entries):
            entries = random.Random(seed).sample(entries, sample)
        for form, value in entries:
            direct = c_direct(form.to_pattern())
            if direct != value:
                raise CacheCorruptionError(f"cache entry {form.hex()} holds {value}, direct formula gives {direct}")
        return len(entries)

    def __len__(self):
        return len(self._data)

    def __contains__(self, form: CanonicalForm):
        return form.key in self._data


# --- small exact helpers -----------------------------------------------------

def _face_degrees(p: Pattern) -> dict[Cell, int]:
    deg: dict[Cell, int] = {}
    for c in p.cells:
        for f in facets(c):
            deg[f] = deg.get(f, 0) + 1
    return deg


def _graph_rank(edges) -> int:
    """Rank of the graphic matroid: vertices minus components."""
    parent: dict[int, int] = {}

    def find(v):
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    rank = 0
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            rank += 1
    return rank


def _boundary_columns(cells: list[Cell]) -> list[list[int]]:
    """Transposed boundary matrix: one row per k-cell over its facets."""
    faces_ = sorted({f for c in cells for f in facets(c)})
    index = {f: i for i, f in enumerate(faces_)}
    rows = []
    for c in cells:
        row = [0] * len(faces_)
        for i in range(len(c)):
            row[index[c[:i] + c[i + 1:]]] = -1 if i % 2 else 1
        rows.append(row)
    return rows


def pattern_betti(p: Pattern) -> int:
    """b_k of the closure of the pattern (no (k+1)-cells, so b_k = nullity of d_k)."""
    cells = p.sorted_cells()
    if not cells:
        return 0
    if p.k == 1:
        return len(cells) - _graph_rank(cells)
    return len(cells) - integer_rank(_boundary_columns(cells))


def _check_guard(p: Pattern, max_cells: int):
    if len(p) > max_cells:
        raise GuardExceeded(f"pattern has {len(p)} {p.k}-cells; coefficient guard is {max_cells}")


# --- direct formula -------------------------------------------------------------

def _graph_nullities(edges: list[Cell], start: int, stop: int) -> np.ndarray:
    """b_1 of the edge subsets encoded by masks start..stop-1."""
    verts = sorted({v for e in edges for v in e})
    vid = {v: i for i, v in enumerate(verts)}
    masks = np.arange(start, stop, dtype=np.int64)
    labels = np.tile(np.arange(len(verts), dtype=np.int16), (len(masks), 1))
    sizes = np.zeros(len(masks), dtype=np.int64)
    for j, (a, b) in enumerate(edges):
        on = (masks >> j) & 1 == 1
        sizes += on
        rows = np.flatnonzero(on)
        if not len(rows):
            continue
        sub = labels[rows]
        la = sub[:, vid[a]][:, None]
        lb = sub[:, vid[b]][:, None]
        labels[rows] = np.where(sub == lb, la, sub)
    roots = (labels == np.arange(len(verts), dtype=np.int16)).sum(axis=1)
    # rank = V - components over the pattern's own vertex set
    return sizes - (len(verts) - roots)


def c_direct(p: Pattern, max_cells: int = DEFAULT_MAX_CELLS) -> int:
    """sum over deleted k-cell subsets w of (-1)^|w| b_k(pattern minus w); 0 when b_k = 0."""
    _check_guard(p, max_cells)
    if pattern_betti(p) == 0:
        return 0
    cells = p.sorted_cells()
    n = len(cells)
    if p.k == 1:
        total = 0
        step = 1 << 18
        for start in range(0, 1 << n, step):
            stop = min(start + step, 1 << n)
            nullity = _graph_nullities(cells, start, stop)
            masks = np.arange(start, stop, dtype=np.int64)
            removed = n - np.bitwise_count(masks)
            signs = np.where(removed % 2 == 1, -1, 1)
            total += int((signs * nullity).sum())
        return total
    total = 0
    for mask in range(1 << n):
        kept = [cells[i] for i in range(n) if mask >> i & 1]
        if not kept:
            continue
        nullity = len(kept) - integer_rank(_boundary_columns(kept))
        total += -nullity if (n - len(kept)) % 2 else nullity
    return total


# --- zero rules -------------------------------------------------------------------

def has_spike(p: Pattern) -> bool:
    """Some (k-1)-face lies in exactly one k-cell of the pattern."""
    return any(d == 1 for d in _face_degrees(p).values())


def _graph_cycle_classes(edges: list[Cell]):
    """Union edges along every fundamental cycle of a spanning forest."""
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    parent: dict[int, Optional[int]] = {}
    depth: dict[int, int] = {}
    tree = set()
    for root in sorted(adj):
        if root in parent:
            continue
        parent[root], depth[root] = None, 0
        queue = [root]
        for v in queue:
            for w in sorted(adj[v]):
                if w not in parent:
                    parent[w], depth[w] = v, depth[v] + 1
                    tree.add(make_cell((v, w)))
                    queue.append(w)
    uf = {e: e for e in edges}

    def find(e):
        while uf[e] != e:
            uf[e] = uf[uf[e]]
            e = uf[e]
        return e

    circuits = 0
    for e in edges:
        if e in tree:
            continue
        circuits += 1
        u, w = e
        while u != w:
            if depth[u] < depth[w]:
                u, w = w, u
            step = make_cell((u, parent[u]))
            uf[find(step)] = find(e)
            u = parent[u]
    return circuits, len({find(e) for e in edges})


def _rational_rref(rows: list[list[int]]):
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][col]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m, pivots


def _matroid_cycle_classes(cells: list[Cell]):
    """Components of the column matroid of d_k via fundamental circuits."""
    faces_ = sorted({f for c in cells for f in facets(c)})
    index = {f: i for i, f in enumerate(faces_)}
    matrix = [[0] * len(cells) for _ in faces_]
    for j, c in enumerate(cells):
        for i in range(len(c)):
            matrix[index[c[:i] + c[i + 1:]]][j] = -1 if i % 2 else 1
    rref, pivots = _rational_rref(matrix)
    uf = list(range(len(cells)))

    def find(i):
        while uf[i] != i:
            uf[i] = uf[uf[i]]
            i = uf[i]
        return i

    circuits = 0
    pivot_set = set(pivots)
    for j in range(len(cells)):
        if j in pivot_set:
            continue
        circuits += 1
        for row, pc in enumerate(pivots):
            if rref[row][j]:
                uf[find(pc)] = find(j)
    return circuits, len({find(i) for i in range(len(cells))})


def n_intersection_test(p: Pattern) -> bool:
    """True when the pattern's k-cycles cannot be split into k-non-intersecting parts.

    Fundamental cycles are merged whenever they share a k-cell; the pattern
    passes iff it has a cycle and one merged class covers every k-cell.  Cells
    on no cycle (spikes, bridges) and unions of cycles meeting only in lower
    dimensional cells both fail.
    """
    cells = p.sorted_cells()
    if len(cells) < 2:
        return False
    if p.k == 1:
        circuits, classes = _graph_cycle_classes(cells)
    else:
        circuits, classes = _matroid_cycle_classes(cells)
    return circuits > 0 and classes == 1


# --- shrinking moves ------------------------------------------------------------

def _cone_at(p: Pattern, v: int) -> Optional[tuple[list[Cell], Cell]]:
    """If the k-cells at v are the cone over the boundary of a k-simplex, return (cone, base)."""
    star = [c for c in p.cells if v in c]
    if len(star) != p.k + 1:
        return None
    base = sorted({u for c in star for u in c} - {v})
    if len(base) != p.k + 1:
        return None
    return star, tuple(base)


def reduce_pattern(p: Pattern) -> Pattern:
    """Erase cone vertices of covering degree k+1, replacing each cone by its base cell.

    A vertex qualifies when its k+1 cells span exactly k+1 neighbours and the
    base cell on those neighbours is not already in the pattern.  The smallest
    qualifying vertex goes first; repeats to a fixpoint.
    """
    while True:
        for v in p.vertices:
            cone = _cone_at(p, v)
            if cone is not None and cone[1] not in p.cells:
                star, base = cone
                p = p.without(star).with_cells([base])
                break
        else:
            return p


def erase_cycle_rule(p: Pattern) -> Optional[tuple[Pattern, int]]:
    """Erase a cone whose base cell is present; the coefficient flips sign.

    The cone plus its base bound a (k+1)-simplex, i.e. an elementary k-cycle
    through the cone vertex.  Returns ``(erased, -1)`` or ``None`` when no such
    vertex exists, when erasing would leave fewer than two k-cells, or when the
    pattern's coefficient is already forced to zero.
    """
    if has_spike(p) or not n_intersection_test(p):
        return None
    for v in p.vertices:
        cone = _cone_at(p, v)
        if cone is not None and cone[1] in p.cells:
            erased = p.without(cone[0])
            if len(erased) >= 2:
                return erased, -1
    return None


def _as_triangle(t: Pattern) -> None:
    if t.k != 1 or len(t) != 3 or len(t.vertices) != 3:
        raise ValueError("second operand must be a triangle of three edges")


def _shared_edge(a: Pattern, t: Pattern) -> Cell:
    _as_triangle(t)
    if a.k != 1:
        raise ValueError("triangle operations act on 1-dimensional patterns")
    shared = a.cells & t.cells
    if len(shared) != 1:
        raise ValueError(f"operands must share exactly one edge, they share {len(shared)}")
    return next(iter(shared))


def sym_diff_1(a: Pattern, t: Pattern) -> Pattern:
    """Union with the triangle, minus the shared edge (keeps c_1)."""
    e = _shared_edge(a, t)
    return Pattern((a.cells | t.cells) - {e}, 1)


def union_1(a: Pattern, t: Pattern) -> Pattern:
    """Plain union with a triangle glued along one edge (negates c_1)."""
    _shared_edge(a, t)
    return Pattern(a.cells | t.cells, 1)


# --- recursion --------------------------------------------------------------------

@dataclass(frozen=True)
class DeletionLevel:
    """All patterns obtained from ``base`` by deleting exactly ``i`` k-cells."""

    base: Pattern
    i: int

    def __len__(self):
        return math.comb(len(self.base), self.i)

    def members(self) -> Iterator[Pattern]:
        cells = self.base.sorted_cells()
        for removed in itertools.combinations(cells, self.i):
            yield self.base.without(removed)


class _Recursion:
    def __init__(self, cache: CoefficientCache, recursion_limit: int, max_vertices: int):
        self.cache = cache
        self.limit = recursion_limit
        self.max_vertices = max_vertices
        self.memo: dict[frozenset, int] = {}

    def coefficient(self, p: Pattern) -> int:
        got = self.memo.get(p.cells)
        if got is None:
            got = self.memo[p.cells] = self._compute(p)
        return got

    def _compute(self, p: Pattern) -> int:
        if len(p) < 2 or has_spike(p):
            return 0
        b = pattern_betti(p)
        if b == 0 or not n_intersection_test(p):
            return 0
        reduced = reduce_pattern(p)
        if reduced.cells != p.cells:
            return self.coefficient(reduced)
        erased = erase_cycle_rule(p)
        if erased is not None:
            return erased[1] * self.coefficient(erased[0])
        form = canonical_form(p, self.max_vertices)
        cached = self.cache.get(form)
        if cached is not None:
            return cached
        if len(p) > self.limit:
            value = c_direct(p, max_cells=len(p))
        else:
            value = b - self.proper_sum(p)
        self.cache.put(form, value)
        return value

    def proper_sum(self, p: Pattern) -> int:
        cells = p.sorted_cells()
        n = len(cells)
        total = 0
        for mask in range((1 << n) - 1):
            if bin(mask).count("1") < 2:
                continue
            total += self.coefficient(Pattern(frozenset(cells[i] for i in range(n) if mask >> i & 1), p.k))
        return total


def c_recursive(p: Pattern, cache: Optional[CoefficientCache] = None, max_cells: int = DEFAULT_MAX_CELLS,
                verify: bool = False, recursion_limit: int = DEFAULT_RECURSION_LIMIT,
                max_vertices: int = 12) -> int:
    """c_k by the level recursion c(D) = b_k(D) - sum_{i>=1} c(D^i), memoized on canonical forms.

    Zero rules and the shrinking moves run first.  Patterns with more than
    ``recursion_limit`` cells fall back to the direct formula.  With
    ``verify`` the result is checked against :func:`c_direct`.
    """
    _check_guard(p, max_cells)
    run = _Recursion(cache if cache is not None else CoefficientCache(), recursion_limit, max_vertices)
    value = run.coefficient(p)
    if verify:
        direct = c_direct(p, max_cells=max_cells)
        if direct != value:
            raise CacheCorruptionError(f"recursive coefficient {value} != direct {direct} for {p}")
    return value


def deletion_level_sums(p: Pattern, cache: Optional[CoefficientCache] = None,
                        max_cells: int = DEFAULT_MAX_CELLS) -> list[int]:
    """[sum of c_k over level i for i = 0..n]; the entries add up to b_k(p)."""
    _check_guard(p, max_cells)
    run = _Recursion(cache if cache is not None else CoefficientCache(), DEFAULT_RECURSION_LIMIT, 12)
    return [sum(run.coefficient(q) for q in DeletionLevel(p, i).members()) for i in range(len(p) + 1)]


def decomposition_sum(p: Pattern, decomposed, cache: Optional[CoefficientCache] = None,
                      max_cells: int = DEFAULT_MAX_CELLS) -> int:
    """Sum of c_k(p minus A) over every subset A of the ``decomposed`` k-cells."""
    decomposed = [make_cell(c) for c in decomposed]
    missing = [c for c in decomposed if c not in p.cells]
    if missing:
        raise ValueError(f"decomposed cell {missing[0]} is not in the pattern")
    cache = cache if cache is not None else CoefficientCache()
    total = 0
    for r in range(len(decomposed) + 1):
        for removed in itertools.combinations(decomposed, r):
            total += c_recursive(p.without(removed), cache=cache, max_cells=max_cells)
    return total
