"""Expected Betti numbers and Euler characteristics of random complexes.

Everything here is ground truth for the reduction formulas: exact sums over
realizations, the polynomial in per-cell probability variables, and a seeded
Monte Carlo estimator for complexes too large to enumerate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

import numpy as np

from .complex import (
    Cell,
    RandomComplex,
    SimplicialComplex,
    cell_key,
    closure,
    configuration_probability,
    facets,
    faces,
    format_cell,
    iter_configurations,
    make_cell,
    realize,
)
from .errors import GuardExceeded
from .homology import betti

DEFAULT_MAX_CELLS = 24
DEFAULT_MAX_SYMBOLIC_CELLS = 16

Number = Union[Fraction, int, float]


# --- subcomplexes and realization classes ----------------------------------

def iter_subcomplexes(X: SimplicialComplex) -> Iterator[frozenset]:
    """Every face-closed subset of ``X`` (the empty one included)."""
    cells = X.sorted_cells
    chosen: set = set()

    def walk(i):
        if i == len(cells):
            yield frozenset(chosen)
            return
        c = cells[i]
        yield from walk(i + 1)
        if all(f in chosen for f in facets(c)):
            chosen.add(c)
            yield from walk(i + 1)
            chosen.discard(c)

    yield from walk(0)


def _frontier(X: SimplicialComplex, S: frozenset) -> list[Cell]:
    """Cells outside S whose facets all lie in S: they must be off for S to be realized."""
    return [c for c in X.sorted_cells if c not in S and all(f in S for f in facets(c))]


def realization_distribution(rc: RandomComplex) -> Iterator[tuple[frozenset, Fraction]]:
    """(subcomplex, probability of realizing exactly it) for every subcomplex.

    Configurations that realize the same subcomplex are summed in closed form:
    cells of S are on, frontier cells are off, every other cell is free.
    """
    X = rc.complex
    for S in iter_subcomplexes(X):
        p = Fraction(1)
        for c in S:
            p *= rc[c]
        for c in _frontier(X, S):
            p *= 1 - rc[c]
        yield S, p


def _guard(n: int, limit: int, what: str):
    if n > limit:
        raise GuardExceeded(f"{what}: {n} cells exceeds the enumeration guard of {limit}; use mc_estimate instead")


def expected_betti_exact(rc: RandomComplex, k: int, max_cells: int = DEFAULT_MAX_CELLS,
                         method: str = "realizations") -> Fraction:
    """Exact expectation of b_k over all 2^N configurations.

    ``method="configurations"`` literally walks the N-bit counter;
    the default groups configurations by the subcomplex they realize.
    """
    _guard(len(rc), max_cells, "expected_betti_exact")
    total = Fraction(0)
    if method == "configurations":
        memo: dict = {}
        for cfg in iter_configurations(rc):
            X = realize(rc, cfg)
            if X not in memo:
                memo[X] = betti(X, k)
            if memo[X]:
                total += memo[X] * configuration_probability(rc, cfg)
        return total
    if method != "realizations":
        raise ValueError(f"unknown method {method!r}")
    for S, p in realization_distribution(rc):
        if p:
            b = betti(SimplicialComplex(S, check=False), k)
            if b:
                total += b * p
    return total


def expected_cell_count(rc: RandomComplex, k: int) -> Fraction:
    """Expected number of realized k-cells: each cell needs its whole closure on."""
    total = Fraction(0)
    for c in rc.cells:
        if len(c) == k + 1:
            p = Fraction(1)
            for f in faces(c):
                p *= rc[f]
            total += p
    return total


def expected_euler_exact(rc: RandomComplex) -> Fraction:
    top = rc.complex.dimension
    return sum(((-1) ** k * expected_cell_count(rc, k) for k in range(top + 1)), Fraction(0))


# --- symbolic polynomial ----------------------------------------------------

class SymbolicPolynomial:
    """Multilinear polynomial over Q with one indicator variable per cell.

    A monomial is a frozenset of cells.  Coefficients are never zero.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[frozenset, Fraction] = None):
        self.terms = {frozenset(m): Fraction(c) for m, c in (terms or {}).items() if c}

    def coefficient(self, monomial: Iterable[Cell]) -> Fraction:
        return self.terms.get(frozenset(monomial), Fraction(0))

    def evaluate(self, values: Union[Mapping[Cell, Number], Callable[[Cell], Number]]):
        get = values if callable(values) else values.__getitem__
        total = 0
        for mono, coef in self.terms.items():
            term = coef
            for c in mono:
                term = term * get(c)
            total = total + term
        return total

    def __eq__(self, other):
        return isinstance(other, SymbolicPolynomial) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def shorthand(self) -> dict[tuple, Fraction]:
        """Coefficients keyed by each monomial's maximal cells (lower faces implied)."""
        out = {}
        for mono, coef in self.terms.items():
            out[tuple(SimplicialComplex(mono, check=False).maximal_cells())] = coef
        return out

    def render(self) -> str:
        """Shorthand text such as ``p1 + p2 - p12``."""
        items = sorted(self.shorthand().items(),
                       key=lambda kv: (max(len(c) for c in kv[0]), len(kv[0]), [cell_key(c) for c in kv[0]]))
        if not items:
            return "0"
        parts = []
        for i, (cells, coef) in enumerate(items):
            name = "*".join("p" + format_cell(c) for c in cells)
            mag = abs(coef)
            body = name if mag == 1 else f"{mag}*{name}"
            if i == 0:
                parts.append(("-" if coef < 0 else "") + body)
            else:
                parts.append(("- " if coef < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"SymbolicPolynomial({self.render()})"


def symbolic_expected_betti(X: Union[SimplicialComplex, RandomComplex], k: int,
                            max_cells: int = DEFAULT_MAX_SYMBOLIC_CELLS) -> SymbolicPolynomial:
    """E[b_k] as a polynomial in the cell probabilities.

    Each realizable subcomplex S contributes b_k(S) * prod_{S} x * prod_{frontier}(1 - x).
    S and its frontier are disjoint, so the expansion never squares a variable.
    """
    if isinstance(X, RandomComplex):
        X = X.complex
    _guard(len(X), max_cells, "symbolic_expected_betti")
    terms: dict[frozenset, Fraction] = {}
    for S in iter_subcomplexes(X):
        b = betti(SimplicialComplex(S, check=False), k)
        if not b:
            continue
        front = _frontier(X, S)
        for mask in range(1 << len(front)):
            extra = [front[i] for i in range(len(front)) if mask >> i & 1]
            mono = S.union(extra)
            sign = -1 if len(extra) % 2 else 1
            terms[mono] = terms.get(mono, 0) + sign * b
    return SymbolicPolynomial(terms)


def monomial_coefficient(poly: SymbolicPolynomial, maximal_cells: Iterable[Iterable[int]]) -> Fraction:
    """Coefficient of the monomial written in shorthand by its maximal cells."""
    return poly.coefficient(closure(make_cell(c) for c in maximal_cells))


# --- Monte Carlo --------------------------------------------------------------

@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int


_UNIT = 2.0 ** -53


def _mc_chunk(rc: RandomComplex, k: int, seed: int, start: int, stop: int, memo: dict) -> np.ndarray:
    cells = rc.cells
    n = len(cells)
    blocks = max(1, -(-n // 4))
    count = stop - start
    # sample i owns Philox blocks [i*blocks, (i+1)*blocks) under key=seed
    gen = np.random.Philox(key=seed, counter=start * blocks)
    raw = gen.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :n]
    uniform = (raw >> np.uint64(11)).astype(np.float64) * _UNIT
    probs = np.array([float(rc[c]) for c in cells])
    on = uniform < probs
    index = {c: j for j, c in enumerate(cells)}
    present = np.empty_like(on)
    for j, c in enumerate(cells):
        col = on[:, j].copy()
        for f in facets(c):
            col &= present[:, index[f]]
        present[:, j] = col
    packed = np.packbits(present, axis=1)
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        key = packed[i].tobytes()
        b = memo.get(key)
        if b is None:
            X = SimplicialComplex((cells[j] for j in np.flatnonzero(present[i])), check=False)
            b = memo[key] = betti(X, k)
        out[i] = b
    return out


def mc_samples(rc: RandomComplex, k: int, samples: int, seed: int, threads: int = 1,
               chunk: int = 8192) -> np.ndarray:
    """b_k of ``samples`` independent realizations; sample i depends only on (seed, i)."""
    seed = int(seed) % (1 << 64)
    bounds = [(a, min(a + chunk, samples)) for a in range(0, samples, chunk)]
    memo: dict = {}
    if threads <= 1 or len(bounds) == 1:
        parts = [_mc_chunk(rc, k, seed, a, b, memo) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: _mc_chunk(rc, k, seed, ab[0], ab[1], memo), bounds))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def mc_estimate(rc: RandomComplex, k: int, samples: int, seed: int, threads: int = 1) -> McEstimate:
    if samples < 2:
        raise ValueError("mc_estimate needs at least 2 samples")
    values = mc_samples(rc, k, samples, seed, threads=threads).astype(np.float64)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(samples))
    return McEstimate(mean=mean, std_error=stderr, samples=samples, seed=int(seed))


# --- counting -----------------------------------------------------------------

def count_subcomplexes(n: int) -> int:
    """Subcomplexes of the full 1-skeleton on n points: sum_k C(n,k) 2^C(k,2)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return sum(math.comb(n, k) * 2 ** math.comb(k, 2) for k in range(n + 1))


def count_subcomplexes_printed_formula(n: int) -> int:
    """sum_k C(n,k) 2^k = 3^n; the closed form printed next to the count table, which it does not match."""
    return sum(math.comb(n, k) * 2 ** k for k in range(n + 1))


def count_subcomplexes_enumerate(n: int) -> int:
    X = SimplicialComplex.from_maximal([(i, j) for i in range(n) for j in range(i + 1, n)] + [(i,) for i in range(n)])
    return sum(1 for _ in iter_subcomplexes(X))
