"""Cell patterns, canonical forms and automorphism counts.

A :class:`Pattern` is a set of k-cells standing for the monomial whose
maximal cells they are.  Its canonical form is the lexicographically smallest
encoding over every vertex relabeling; the search individualizes one vertex at
a time after colour refinement, which keeps the set of explored labelings
invariant under isomorphism while visiting far fewer than v! of them.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

from .complex import Cell, SimplicialComplex, closure, format_cell, make_cell
from .errors import GuardExceeded

DEFAULT_MAX_VERTICES = 12


@dataclass(frozen=True)
class Pattern:
    """A set of k-cells (k >= 1)."""

    cells: frozenset
    k: int

    def __post_init__(self):
        cells = frozenset(make_cell(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        if self.k < 1:
            raise ValueError("pattern dimension k must be >= 1")
        bad = [c for c in cells if len(c) != self.k + 1]
        if bad:
            raise ValueError(f"pattern cells must all be {self.k}-cells, got {format_cell(bad[0])}")

    @classmethod
    def of(cls, cells: Iterable[Iterable[int]], k: int | None = None) -> "Pattern":
        """Build a pattern, inferring k from the cells when not given."""
        cells = [make_cell(c) for c in cells]
        if k is None:
            if not cells:
                raise ValueError("cannot infer k from an empty pattern")
            k = len(cells[0]) - 1
        return cls(frozenset(cells), k)

    @property
    def vertices(self) -> list[int]:
        return sorted({v for c in self.cells for v in c})

    def sorted_cells(self) -> list[Cell]:
        return sorted(self.cells)

    def complex(self) -> SimplicialComplex:
        return SimplicialComplex(closure(self.cells), check=False)

    def without(self, cells: Iterable[Cell]) -> "Pattern":
        return Pattern(self.cells - frozenset(cells), self.k)

    def with_cells(self, cells: Iterable[Cell]) -> "Pattern":
        return Pattern(self.cells | frozenset(make_cell(c) for c in cells), self.k)

    def relabel(self, mapping) -> "Pattern":
        return Pattern(frozenset(make_cell(mapping[v] for v in c) for c in self.cells), self.k)

    def __len__(self):
        return len(self.cells)

    def __repr__(self):
        return f"Pattern({{{', '.join(format_cell(c) for c in self.sorted_cells())}}}, k={self.k})"


@dataclass(frozen=True)
class CanonicalForm:
    """Relabeling-invariant key of a pattern.

    Layout: ``[k, vertex count, canonical cells...]`` with every cell written
    as its k+1 relabeled vertices, cells in increasing order.  The key decodes
    back to a representative pattern.
    """

    key: bytes

    def hex(self) -> str:
        return self.key.hex()

    @classmethod
    def fromhex(cls, text: str) -> "CanonicalForm":
        return cls(bytes.fromhex(text))

    @property
    def k(self) -> int:
        return self.key[0]

    @property
    def vertex_count(self) -> int:
        return self.key[1]

    def to_pattern(self) -> Pattern:
        k, body = self.key[0], self.key[2:]
        w = k + 1
        if len(body) % w:
            raise ValueError("malformed canonical key")
        return Pattern(frozenset(tuple(body[i:i + w]) for i in range(0, len(body), w)), k)


def covering_degree(p: Pattern, v: int, n: int | None = None) -> int:
    """Number of n-cells of the pattern containing vertex ``v``."""
    n = p.k if n is None else n
    if not any(v in c for c in p.cells):
        raise ValueError(f"vertex {v} does not occur in the pattern")
    return sum(1 for c in p.cells if len(c) == n + 1 and v in c)


# --- canonical labeling ----------------------------------------------------

def _refine(colors: list[int], incidence: list[list[tuple]]) -> list[int]:
    """Equitable refinement; colours are re-indexed canonically each round."""
    while True:
        sigs = []
        for v, col in enumerate(colors):
            around = sorted(tuple(sorted(colors[u] for u in other)) for other in incidence[v])
            sigs.append((col, tuple(around)))
        order = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [order[s] for s in sigs]
        if len(order) == len(set(colors)):
            return new
        colors = new


def _encode(cells: list[tuple], labels: list[int]) -> tuple:
    return tuple(sorted(tuple(sorted(labels[v] for v in c)) for c in cells))


class _SearchState:
    __slots__ = ("code", "labels", "leaves", "generators", "prune")

    def __init__(self, prune):
        self.code = None
        self.labels = None
        self.leaves = 0
        self.generators = []
        self.prune = prune


def _orbit_roots(n, generators, path):
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for g in generators:
        if all(g[u] == u for u in path):
            for u in range(n):
                a, b = find(u), find(g[u])
                if a != b:
                    parent[a] = b
    return find


def _search(cells, incidence, colors, state, path):
    classes = defaultdict(list)
    for v, col in enumerate(colors):
        classes[col].append(v)
    target = next((col for col in sorted(classes) if len(classes[col]) > 1), None)
    if target is None:
        code = _encode(cells, colors)
        if state.code is None or code < state.code:
            state.code, state.labels, state.leaves = code, colors, 1
        elif code == state.code:
            state.leaves += 1
            if state.prune:
                # leaf labelings with equal codes differ by an automorphism
                inverse = {lab: u for u, lab in enumerate(state.labels)}
                state.generators.append([inverse[colors[u]] for u in range(len(colors))])
        return
    explored = []
    for v in classes[target]:
        if state.prune and explored:
            find = _orbit_roots(len(colors), state.generators, path)
            if any(find(v) == find(u) for u in explored):
                continue
        explored.append(v)
        # split v off ahead of the rest of its class
        split = [2 * c + (1 if (c == target and u != v) else 0) for u, c in enumerate(colors)]
        _search(cells, incidence, _refine(split, incidence), state, path + (v,))


def _indexed(p: Pattern):
    verts = p.vertices
    index = {v: i for i, v in enumerate(verts)}
    cells = [tuple(index[v] for v in c) for c in p.sorted_cells()]
    incidence = [[] for _ in verts]
    for c in cells:
        for v in c:
            incidence[v].append(tuple(u for u in c if u != v))
    return verts, cells, incidence


def _canonical_search(p: Pattern, max_vertices: int, prune: bool) -> tuple[int, _SearchState]:
    verts, cells, incidence = _indexed(p)
    if len(verts) > max_vertices:
        raise GuardExceeded(f"pattern has {len(verts)} vertices; canonical form guard is {max_vertices}")
    state = _SearchState(prune)
    _search(cells, incidence, _refine([0] * len(verts), incidence), state, ())
    return len(verts), state


def canonical_form(p: Pattern, max_vertices: int = DEFAULT_MAX_VERTICES) -> CanonicalForm:
    nverts, state = _canonical_search(p, max_vertices, prune=True)
    code = state.code
    if nverts > 255:
        raise GuardExceeded("canonical keys support at most 255 vertices")
    flat = [v for c in (code or ()) for v in c]
    return CanonicalForm(bytes([p.k, nverts, *flat]))


def automorphism_count_search(p: Pattern, max_vertices: int = DEFAULT_MAX_VERTICES) -> int:
    """|Aut(p)| as the number of search leaves attaining the canonical code.

    Runs the search without automorphism pruning, so this is independent of
    :func:`automorphisms` but costs up to |Aut| leaves.
    """
    _, state = _canonical_search(p, max_vertices, prune=False)
    return state.leaves


def automorphisms(p: Pattern) -> list[dict]:
    """Every vertex permutation mapping the cell set onto itself.

    Exhaustive backtracking over permutations; a partial map is abandoned as
    soon as a fully-mapped cell lands outside the pattern or vertex degrees
    disagree.
    """
    verts = p.vertices
    cells = p.cells
    degree = {v: sum(1 for c in cells if v in c) for v in verts}
    cells_at = {v: [c for c in cells if v in c] for v in verts}
    out = []
    image: dict[int, int] = {}
    used = set()

    def consistent(v):
        for c in cells_at[v]:
            if all(u in image for u in c):
                if make_cell(image[u] for u in c) not in cells:
                    return False
        return True

    def extend(i):
        if i == len(verts):
            out.append(dict(image))
            return
        v = verts[i]
        for w in verts:
            if w in used or degree[w] != degree[v]:
                continue
            image[v] = w
            used.add(w)
            if consistent(v):
                extend(i + 1)
            used.discard(w)
            del image[v]

    extend(0)
    return out


def automorphism_count(p: Pattern) -> int:
    return len(automorphisms(p))


def is_isomorphic_bruteforce(a: Pattern, b: Pattern) -> bool:
    """Reference isomorphism test trying all v! bijections."""
    if a.k != b.k or len(a.cells) != len(b.cells):
        return False
    va, vb = a.vertices, b.vertices
    if len(va) != len(vb):
        return False
    for perm in itertools.permutations(vb):
        mapping = dict(zip(va, perm))
        if a.relabel(mapping).cells == b.cells:
            return True
    return False
