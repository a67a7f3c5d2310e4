"""Equal-probability polynomials p_n^E of the maximal complex on m points.

All n-cells get probability x and every lower cell probability 1.  The
higher-order part of b_{n-1}^E then collapses onto isomorphism classes of
n-cell patterns: a class contributes (orbit size) * c_n * x^(#cells).  Classes
are generated breadth-first by adding one n-cell at a time and deduplicated
on canonical forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

from .complex import SimplicialComplex, closure, make_cell
from .errors import GuardExceeded
from .expectation import SymbolicPolynomial
from .patterns import CanonicalForm, Pattern, automorphism_count, canonical_form
from .reduction import CoefficientCache, c_recursive

MAX_POINTS = 8
MAX_ASSEMBLY_POINTS = 6
MAX_PATTERN_CELLS = 21


class UniPoly:
    """Univariate integer polynomial stored as {degree: coefficient}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {int(d): int(c) for d, c in (coeffs or {}).items() if c}

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __getitem__(self, d):
        return self.coeffs.get(d, 0)

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __add__(self, other: "UniPoly") -> "UniPoly":
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, 0) + c
        return UniPoly(out)

    def __call__(self, x):
        return horner_eval(self, x)

    def to_text(self) -> str:
        """``2x^6 - 6x^5 + 3x^4 + 4x^3``: descending degree, integer coefficients."""
        if not self.coeffs:
            return "0"
        parts = []
        for i, d in enumerate(sorted(self.coeffs, reverse=True)):
            c = self.coeffs[d]
            mag = abs(c)
            if d == 0:
                body = str(mag)
            else:
                var = "x" if d == 1 else f"x^{d}"
                body = var if mag == 1 else f"{mag}{var}"
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"UniPoly({self.to_text()})"


def horner_eval(poly: UniPoly, x):
    """Nested evaluation; exact for Fraction and int input."""
    if not poly.coeffs:
        return x * 0
    acc = x * 0
    for d in range(poly.degree, -1, -1):
        acc = acc * x + poly[d]
    return acc


@dataclass(frozen=True)
class OrbitRecord:
    pattern: CanonicalForm
    orbit_order: int
    coefficient: int

    @property
    def cells(self) -> int:
        return len(self.pattern.to_pattern())


def orbit_count(p: Pattern, m: int) -> int:
    """Labeled copies of ``p`` among the cells of the maximal complex on m points."""
    v = len(p.vertices)
    if v > m:
        raise ValueError(f"pattern has {v} vertices, more than m={m}")
    return math.comb(m, v) * math.factorial(v) // automorphism_count(p)


def _extensions(p: Pattern, m: int, n: int) -> Iterator[Pattern]:
    """Add one n-cell, using at most the lowest unused vertex labels."""
    used = len(p.vertices)
    for fresh in range(0, n + 2):
        if used + fresh > m:
            break
        for old in itertools.combinations(range(used), n + 1 - fresh):
            cell = old + tuple(range(used, used + fresh))
            if cell not in p.cells:
                yield p.with_cells([cell])


def pattern_classes(m: int, n: int, max_points: int = MAX_POINTS) -> Iterator[tuple[int, list[Pattern]]]:
    """Yield (cell count, one representative per isomorphism class) for 1.. C(m, n+1) cells."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m > max_points:
        raise GuardExceeded(f"m={m} exceeds the pattern enumeration guard of {max_points}")
    if m < n + 1:
        return
    level = {canonical_form(Pattern.of([tuple(range(n + 1))])): Pattern.of([tuple(range(n + 1))])}
    size = 1
    while level:
        yield size, list(level.values())
        nxt = {}
        for p in level.values():
            for q in _extensions(p, m, n):
                form = canonical_form(q)
                if form not in nxt:
                    nxt[form] = form.to_pattern()
        level = nxt
        size += 1


def orbit_records(m: int, n: int, cache: Optional[CoefficientCache] = None,
                  max_points: int = MAX_POINTS, max_cells: int = MAX_PATTERN_CELLS) -> list[OrbitRecord]:
    """Every pattern class with at least two n-cells, its orbit order and c_n."""
    cache = cache if cache is not None else CoefficientCache()
    if math.comb(m, n + 1) > max_cells:
        raise GuardExceeded(f"{math.comb(m, n + 1)} {n}-cells on {m} points exceeds the coefficient guard of {max_cells}")
    out = []
    for size, reps in pattern_classes(m, n, max_points):
        if size < 2:
            continue
        for p in reps:
            c = c_recursive(p, cache=cache, max_cells=max_cells)
            out.append(OrbitRecord(canonical_form(p), orbit_count(p, m), c))
    return out


def p_n_polynomial(m: int, n: int, cache: Optional[CoefficientCache] = None,
                   max_points: int = MAX_POINTS, max_cells: int = MAX_PATTERN_CELLS) -> UniPoly:
    """p_n^E(x) = sum over classes of orbit order * c_n * x^(#cells)."""
    coeffs: dict[int, int] = {}
    for rec in orbit_records(m, n, cache, max_points, max_cells):
        if rec.coefficient:
            d = rec.cells
            coeffs[d] = coeffs.get(d, 0) + rec.orbit_order * rec.coefficient
    return UniPoly(coeffs)


# --- structural assembly ------------------------------------------------------------

@dataclass
class B0Assembly:
    """b_0^E of the maximal 1-skeleton: +p_i, -p_ij, then cycle-union terms."""

    m: int
    vertex_terms: list = field(default_factory=list)
    edge_terms: list = field(default_factory=list)
    higher: dict = field(default_factory=dict)  # frozenset of edges -> coefficient

    def to_symbolic(self) -> SymbolicPolynomial:
        terms = {frozenset([v]): 1 for v in self.vertex_terms}
        terms.update({closure([e]): -1 for e in self.edge_terms})
        for edges, c in self.higher.items():
            terms[closure(edges)] = c
        return SymbolicPolynomial(terms)

    def __len__(self):
        return len(self.vertex_terms) + len(self.edge_terms) + len(self.higher)


def assemble_b0(m: int, cache: Optional[CoefficientCache] = None,
                max_points: int = MAX_ASSEMBLY_POINTS) -> B0Assembly:
    """Labeled b_0^E of the maximal complex on points 1..m.

    Nonzero pattern classes are expanded into their labeled copies by applying
    every permutation of the m points.
    """
    if m > max_points:
        raise GuardExceeded(f"m={m} exceeds the labeled assembly guard of {max_points}")
    out = B0Assembly(m)
    pts = list(range(1, m + 1))
    out.vertex_terms = [(v,) for v in pts]
    out.edge_terms = list(itertools.combinations(pts, 2))
    for rec in orbit_records(m, 1, cache) if m >= 2 else []:
        if not rec.coefficient:
            continue
        p = rec.pattern.to_pattern()
        copies = set()
        for perm in itertools.permutations(pts):
            copies.add(frozenset(make_cell((perm[a], perm[b])) for a, b in p.cells))
            if len(copies) == rec.orbit_order:
                break
        for cp in copies:
            out.higher[cp] = rec.coefficient
    return out


@dataclass(frozen=True)
class BettiAssembly:
    """Pieces of b_n^E for the maximal (n+1)-skeleton on m points.

    n-cells carry x, (n+1)-cells carry y, lower cells 1.  Then
    b_n^E = nullity part + top_sign * d_{n+1} * y + higher (n+1)-terms, where
    the nullity part is p_n^E(x), d_{n+1} counts (n+1)-cells (its monomial
    also carries the boundary's x factors) and the (n+1)-terms are p_{n+1}^E(y)
    evaluated with all n-cells present.
    """

    m: int
    n: int
    p_n: UniPoly
    d_next: int
    top_sign: int
    p_next: UniPoly

    def at_full_skeleton(self, y):
        """b_n^E at x = 1 as a function of the (n+1)-cell probability."""
        return horner_eval(self.p_n, Fraction(1)) + self.top_sign * self.d_next * y + horner_eval(self.p_next, y)


def betti_assembly(m: int, n: int, cache: Optional[CoefficientCache] = None) -> BettiAssembly:
    cache = cache if cache is not None else CoefficientCache()
    p_n = p_n_polynomial(m, n, cache)
    p_next = p_n_polynomial(m, n + 1, cache) if m >= n + 2 else UniPoly()
    # a single (n+1)-cell kills one n-cycle: coefficient -1 (checked against the oracle in tests)
    return BettiAssembly(m, n, p_n, math.comb(m, n + 2), -1, p_next)
