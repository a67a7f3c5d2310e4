"""Abstract simplicial complexes, random complexes and their realizations.

A cell is a strictly increasing tuple of non-negative vertex ids.  A
:class:`RandomComplex` attaches an exact rational existence probability to
every cell.  A configuration is one independent coin flip per cell; a cell is
realized only when it and every one of its faces came up "on".
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Tuple

from .errors import ComplexFormatError, FaceClosureError

Cell = Tuple[int, ...]
Configuration = Mapping[Cell, bool]


def make_cell(vertices: Iterable[int]) -> Cell:
    vs = tuple(sorted(vertices))
    if not vs:
        raise ValueError("a cell needs at least one vertex")
    for v in vs:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ValueError(f"vertex ids must be non-negative integers, got {v!r}")
    if any(a == b for a, b in zip(vs, vs[1:])):
        raise ValueError(f"repeated vertex in cell {vs}")
    return vs


def dim(cell: Cell) -> int:
    return len(cell) - 1


def cell_key(cell: Cell):
    """Sort key: by dimension, then by vertex tuple."""
    return (len(cell), cell)


def facets(cell: Cell) -> list[Cell]:
    """Codimension-one faces (empty for a vertex)."""
    if len(cell) == 1:
        return []
    return [cell[:i] + cell[i + 1:] for i in range(len(cell))]


def faces(cell: Cell) -> list[Cell]:
    """All non-empty faces of ``cell``, including the cell itself."""
    return [c for r in range(1, len(cell) + 1) for c in itertools.combinations(cell, r)]


def closure(cells: Iterable[Cell]) -> frozenset:
    out = set()
    for c in cells:
        if c not in out:
            out.update(faces(c))
    return frozenset(out)


def format_cell(cell: Cell) -> str:
    if all(v < 10 for v in cell):
        return "".join(str(v) for v in cell)
    return ",".join(str(v) for v in cell)


class SimplicialComplex:
    """Finite face-closed set of cells.  Immutable."""

    __slots__ = ("_cells", "_sorted")

    def __init__(self, cells: Iterable[Cell] = (), check: bool = True):
        cells = frozenset(cells)
        if check:
            for c in cells:
                if make_cell(c) != c:
                    raise ValueError(f"cell {c} is not a strictly increasing tuple")
                for f in facets(c):
                    if f not in cells:
                        raise FaceClosureError(f"cell {format_cell(c)} is missing face {format_cell(f)}")
        self._cells = cells
        self._sorted = None

    @classmethod
    def from_maximal(cls, cells: Iterable[Iterable[int]]) -> "SimplicialComplex":
        """Smallest complex containing the given cells."""
        return cls(closure(make_cell(c) for c in cells), check=False)

    @property
    def cells(self) -> frozenset:
        return self._cells

    @property
    def sorted_cells(self) -> tuple:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._cells, key=cell_key))
        return self._sorted

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(c[0] for c in self._cells if len(c) == 1)

    @property
    def dimension(self) -> int:
        """Largest cell dimension, -1 for the empty complex."""
        return max((dim(c) for c in self._cells), default=-1)

    def cells_of_dim(self, k: int) -> list[Cell]:
        return sorted(c for c in self._cells if len(c) == k + 1)

    def count(self, k: int) -> int:
        return sum(1 for c in self._cells if len(c) == k + 1)

    def maximal_cells(self) -> list[Cell]:
        cofaced = set()
        for c in self._cells:
            cofaced.update(facets(c))
        return sorted((c for c in self._cells if c not in cofaced), key=cell_key)

    def relabel(self, mapping: Mapping[int, int]) -> "SimplicialComplex":
        return SimplicialComplex((make_cell(mapping[v] for v in c) for c in self._cells), check=False)

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(self._cells | other._cells, check=False)

    def intersection(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(self._cells & other._cells, check=False)

    def __len__(self):
        return len(self._cells)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.sorted_cells)

    def __contains__(self, cell):
        return cell in self._cells

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self._cells == other._cells

    def __hash__(self):
        return hash(self._cells)

    def __repr__(self):
        body = ", ".join(format_cell(c) for c in self.sorted_cells)
        return f"SimplicialComplex({{{body}}})"


def as_probability(value) -> Fraction:
    """Exact rational from a Fraction, int, float (binary value) or string."""
    if isinstance(value, Fraction):
        p = value
    elif isinstance(value, str):
        p = Fraction(value.strip())
    else:
        p = Fraction(value)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


class RandomComplex:
    """A simplicial complex with one independent existence probability per cell."""

    __slots__ = ("_complex", "_prob")

    def __init__(self, prob: Mapping[Iterable[int], object] = None):
        table = {}
        for c, p in (prob or {}).items():
            cell = make_cell(c)
            if cell in table:
                raise ValueError(f"duplicate cell {format_cell(cell)}")
            table[cell] = as_probability(p)
        self._complex = SimplicialComplex(table)
        self._prob = MappingProxyType(table)

    @classmethod
    def uniform(cls, complex_: SimplicialComplex, p=1) -> "RandomComplex":
        return cls({c: p for c in complex_.cells})

    @property
    def complex(self) -> SimplicialComplex:
        return self._complex

    @property
    def prob(self) -> Mapping[Cell, Fraction]:
        return self._prob

    @property
    def cells(self) -> tuple:
        return self._complex.sorted_cells

    def __len__(self):
        return len(self._prob)

    def __getitem__(self, cell) -> Fraction:
        return self._prob[cell]

    def __eq__(self, other):
        return isinstance(other, RandomComplex) and dict(self._prob) == dict(other._prob)

    def __hash__(self):
        return hash(frozenset(self._prob.items()))

    def __repr__(self):
        body = ", ".join(f"{format_cell(c)}: {self._prob[c]}" for c in self.cells)
        return f"RandomComplex({{{body}}})"

    def restrict(self, cells: Iterable[Cell]) -> "RandomComplex":
        """Sub-random-complex on a face-closed subset of cells."""
        return RandomComplex({c: self._prob[c] for c in cells})

    def union(self, other: "RandomComplex") -> "RandomComplex":
        merged = dict(self._prob)
        for c, p in other._prob.items():
            if merged.get(c, p) != p:
                raise ValueError(f"cell {format_cell(c)} has conflicting probabilities")
            merged[c] = p
        return RandomComplex(merged)

    def intersection(self, other: "RandomComplex") -> "RandomComplex":
        shared = {}
        for c in self._prob.keys() & other._prob.keys():
            if self._prob[c] != other._prob[c]:
                raise ValueError(f"cell {format_cell(c)} has conflicting probabilities")
            shared[c] = self._prob[c]
        return RandomComplex(shared)


def _check_configuration(rc: RandomComplex, cfg: Configuration):
    if len(cfg) != len(rc) or any(c not in rc.prob for c in cfg):
        raise ValueError("configuration must be keyed by exactly the cells of the random complex")


def realize(rc: RandomComplex, cfg: Configuration) -> SimplicialComplex:
    """Cells whose whole closure is switched on."""
    _check_configuration(rc, cfg)
    present = set()
    for c in rc.cells:  # faces come before cofaces in this order
        if cfg[c] and all(f in present for f in facets(c)):
            present.add(c)
    return SimplicialComplex(present, check=False)


def configuration_probability(rc: RandomComplex, cfg: Configuration) -> Fraction:
    _check_configuration(rc, cfg)
    out = Fraction(1)
    for c, p in rc.prob.items():
        out *= p if cfg[c] else 1 - p
    return out


def iter_configurations(rc: RandomComplex) -> Iterator[dict]:
    """All 2^N configurations, as an N-bit counter over the sorted cells."""
    cells = rc.cells
    for bits in itertools.product((False, True), repeat=len(cells)):
        yield dict(zip(cells, bits))


# --- file format -----------------------------------------------------------

_ARITY = {"v": 1, "e": 2}


def _parse_vertex(token: str, lineno: int) -> int:
    try:
        v = int(token)
    except ValueError:
        raise ComplexFormatError(f"bad vertex id {token!r}", lineno) from None
    if v < 0:
        raise ComplexFormatError(f"negative vertex id {v}", lineno)
    return v


def parse_complex(text: str) -> RandomComplex:
    """Parse the line-based complex format.

    ``c v1 ... vk p`` declares a cell with probability ``p``; ``v i p`` and
    ``e i j p`` are shorthands.  ``p`` is ``a/b`` or a decimal literal and is
    converted to an exact rational.  ``#`` starts a comment.
    """
    table: dict[Cell, Fraction] = {}
    where: dict[Cell, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        if tag not in ("c", "v", "e"):
            raise ComplexFormatError(f"unknown record type {tag!r}", lineno)
        if len(rest) < 2:
            raise ComplexFormatError("expected vertex ids followed by a probability", lineno)
        *vtoks, ptok = rest
        if tag in _ARITY and len(vtoks) != _ARITY[tag]:
            raise ComplexFormatError(f"'{tag}' takes {_ARITY[tag]} vertex id(s), got {len(vtoks)}", lineno)
        vs = [_parse_vertex(t, lineno) for t in vtoks]
        if len(set(vs)) != len(vs):
            raise ComplexFormatError("repeated vertex in cell", lineno)
        cell = tuple(sorted(vs))
        try:
            p = Fraction(ptok)
        except (ValueError, ZeroDivisionError):
            raise ComplexFormatError(f"bad probability {ptok!r}", lineno) from None
        if not 0 <= p <= 1:
            raise ComplexFormatError(f"probability {p} outside [0, 1]", lineno)
        if cell in table:
            raise ComplexFormatError(f"duplicate cell {format_cell(cell)} (first declared on line {where[cell]})", lineno)
        table[cell] = p
        where[cell] = lineno
    for cell in sorted(table, key=lambda c: where[c]):
        missing = [f for f in faces(cell)[:-1] if f not in table]
        if missing:
            names = ",".join("{" + format_cell(f) + "}" for f in sorted(missing, key=cell_key))
            raise FaceClosureError(f"cell {format_cell(cell)} is missing faces {names}", where[cell])
    return RandomComplex(table)


def format_probability(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def serialize_complex(rc: RandomComplex) -> str:
    lines = []
    for c in rc.cells:
        tag = {1: "v", 2: "e"}.get(len(c), "c")
        lines.append(" ".join([tag, *map(str, c), format_probability(rc[c])]))
    return "\n".join(lines) + ("\n" if lines else "")
