"""Seeded random complexes and patterns for property checks."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .complex import RandomComplex, closure
from .patterns import Pattern

_DENOMS = (2, 3, 4, 5, 6)


def random_probability(rng: random.Random) -> Fraction:
    d = rng.choice(_DENOMS)
    return Fraction(rng.randint(0, d), d)


def random_complex(rng: random.Random, max_cells: int = 10, max_vertices: int = 5, max_dim: int = 2) -> RandomComplex:
    """Closure of a few random simplices, trimmed to at most ``max_cells`` cells."""
    nverts = rng.randint(1, max_vertices)
    cells: set = set()
    for _ in range(rng.randint(1, 4)):
        size = rng.randint(1, min(max_dim + 1, nverts))
        top = tuple(sorted(rng.sample(range(nverts), size)))
        grown = cells | closure([top])
        if len(grown) <= max_cells:
            cells = set(grown)
    if not cells:
        cells = {(0,)}
    return RandomComplex({c: random_probability(rng) for c in cells})


def random_pattern(rng: random.Random, k: int = 1, max_cells: int = 7, max_vertices: int = 6,
                   min_cells: int = 1) -> Pattern:
    pool = list(itertools.combinations(range(max_vertices), k + 1))
    size = rng.randint(min_cells, min(max_cells, len(pool)))
    return Pattern(frozenset(rng.sample(pool, size)), k)
