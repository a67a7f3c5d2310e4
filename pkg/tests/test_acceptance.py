"""Acceptance checks, one per criterion; each prints a PASS/FAIL line.

Run ``python3 tests/test_acceptance.py`` for the summary, or through pytest
(``pytest -s tests/test_acceptance.py`` shows the lines).
"""

import itertools
import math
import random
from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest

from stochhom.complex import RandomComplex, SimplicialComplex, closure, parse_complex
from stochhom.expectation import (
    count_subcomplexes,
    count_subcomplexes_enumerate,
    count_subcomplexes_printed_formula,
    expected_betti_exact,
    expected_euler_exact,
    mc_estimate,
    mc_samples,
    monomial_coefficient,
    symbolic_expected_betti,
)
from stochhom.homology import betti
from stochhom.instances import random_complex, random_pattern
from stochhom.patterns import Pattern
from stochhom.polynomial import horner_eval, p_n_polynomial, pattern_classes
from stochhom.reduction import (
    CoefficientCache,
    DeletionLevel,
    c_direct,
    c_recursive,
    decomposition_sum,
    deletion_level_sums,
    has_spike,
    n_intersection_test,
    pattern_betti,
    sym_diff_1,
    union_1,
)

P = Pattern.of
TWO_POINT = "v 1 1/2\nv 2 1/4\ne 1 2 1/3\n"
SUBCOMPLEX_TABLE = {1: 2, 2: 5, 3: 18, 4: 113, 5: 1450, 6: 40069, 7: 2350602, 8: 286192513, 9: 2494306930}


def report(n, what, ok):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {what}")
    assert ok, f"criterion {n} failed: {what}"


def skeleton(m, top=1):
    return SimplicialComplex.from_maximal(itertools.combinations(range(1, m + 1), top + 1))


def shorthand(text):
    """'p12*p13' -> closure of {(1,2),(1,3)}; digits are single-vertex labels."""
    return closure(tuple(int(ch) for ch in tok[1:]) for tok in text.split("*"))


def graph_classes(max_edges):
    for size, reps in pattern_classes(12, 1, max_points=12):
        if size > max_edges:
            return
        yield from reps


# 1 ---------------------------------------------------------------------------------

def test_criterion_01_two_point_example():
    rc = parse_complex(TWO_POINT)
    enum = expected_betti_exact(rc, 0, method="configurations")
    grouped = expected_betti_exact(rc, 0)
    chi = expected_euler_exact(rc)
    report(1, f"two-point E[b0] = {enum} (enumeration), {grouped} (realizations), chi^E = {chi}",
           enum == grouped == chi == Fraction(17, 24))


# 2 ---------------------------------------------------------------------------------

def test_criterion_02_two_and_three_points():
    expected2 = {shorthand("p1"): 1, shorthand("p2"): 1, shorthand("p12"): -1}
    expected3 = {shorthand(t): c for t, c in [
        ("p1", 1), ("p2", 1), ("p3", 1), ("p12", -1), ("p13", -1), ("p23", -1), ("p12*p13*p23", 1)]}
    got2 = symbolic_expected_betti(skeleton(2), 0)
    got3 = symbolic_expected_betti(skeleton(3), 0)
    report(2, f"b0^E(2 points) = {got2.render()}; b0^E(3 points) = {got3.render()}",
           got2.terms == expected2 and got3.terms == expected3)


# 3 ---------------------------------------------------------------------------------

PYRAMID = (
    [("p1", 1), ("p2", 1), ("p3", 1), ("p4", 1)]
    + [(f"p{a}{b}", -1) for a, b in itertools.combinations(range(1, 5), 2)]
    + [("p12*p13*p23", 1), ("p12*p14*p24", 1), ("p13*p14*p34", 1), ("p23*p24*p34", 1)]
    + [("p12*p23*p34*p14", 1), ("p12*p24*p34*p13", 1), ("p13*p23*p24*p14", 1)]
    + [("p12*p13*p14*p23*p24", -1), ("p12*p13*p14*p23*p34", -1), ("p12*p13*p14*p24*p34", -1),
       ("p12*p13*p23*p24*p34", -1), ("p12*p14*p23*p24*p34", -1), ("p13*p14*p23*p24*p34", -1)]
)


def test_criterion_03_tetrahedron():
    poly = symbolic_expected_betti(skeleton(4), 0)
    C = monomial_coefficient(poly, itertools.combinations(range(1, 5), 2))
    expected = {shorthand(t): c for t, c in PYRAMID}
    expected[closure(itertools.combinations(range(1, 5), 2))] = C
    at_one = poly.evaluate(lambda c: 1)
    report(3, f"tetrahedron b0^E has {len(poly)} terms matching the listing, C = {C}, value at all-ones = {at_one}",
           poly.terms == expected and C == 2 and at_one == 1 == 4 - 6 + 4 + 3 - 6 + C)


# 4 ---------------------------------------------------------------------------------

def test_criterion_04_k4_coefficient():
    K4 = P(itertools.combinations(range(1, 5), 2))
    direct = c_direct(K4)
    recursive = c_recursive(K4)
    levels = deletion_level_sums(K4)
    decomposition = pattern_betti(K4) - levels[1] - levels[2] - levels[3]
    symbolic = monomial_coefficient(symbolic_expected_betti(K4.complex(), 0), K4.cells)
    report(4, f"c1(K4): direct {direct}, recursive {recursive} = 3 - ({levels[1]}) - {levels[2]} - {levels[3]}, "
              f"symbolic {symbolic}",
           direct == recursive == decomposition == symbolic == 2 and levels[1:4] == [-6, 3, 4])


# 5 ---------------------------------------------------------------------------------

def test_criterion_05_signs_and_vanishing():
    zero_checked = 0
    zero_ok = True
    for p in graph_classes(6):
        if has_spike(p) or not n_intersection_test(p):
            zero_checked += 1
            zero_ok &= c_direct(p) == 0 and c_recursive(p) == 0
    edge_ok = True
    edges_checked = 0
    for m in range(2, 6):
        poly = symbolic_expected_betti(skeleton(m), 0)
        for e in itertools.combinations(range(1, m + 1), 2):
            edges_checked += 1
            edge_ok &= monomial_coefficient(poly, [e]) == -1
    rng = random.Random(5)
    for _ in range(30):
        rc = random_complex(rng, max_cells=12)
        poly = symbolic_expected_betti(rc, 0)
        for e in rc.complex.cells_of_dim(1):
            edges_checked += 1
            edge_ok &= monomial_coefficient(poly, [e]) == -1
    cycle_ok = True
    for n in range(3, 13):
        cyc = P([(i, (i + 1) % n) for i in range(n)])
        cycle_ok &= c_recursive(cyc) == 1 and (n > 7 or c_direct(cyc) == 1)
        if n <= 6:
            cycle_ok &= monomial_coefficient(symbolic_expected_betti(cyc.complex(), 0), cyc.cells) == 1
    report(5, f"{zero_checked} spike/disjoint classes with <= 6 edges have c = 0; "
              f"{edges_checked} edge monomials have -1; cycles C3..C12 have +1",
           zero_ok and edge_ok and cycle_ok and zero_checked > 50)


# 6 ---------------------------------------------------------------------------------

def test_criterion_06_recursion_identity():
    rng = random.Random(6)
    ok = True
    for trial in range(300):
        k = 1 if trial % 3 else 2
        p = random_pattern(rng, k, max_cells=7 if k == 1 else 4, max_vertices=6 if k == 1 else 5)
        total = sum(c_direct(q) for i in range(len(p) + 1) for q in DeletionLevel(p, i).members())
        ok &= total == betti(p.complex(), k)
    report(6, "sum_i c_k(level i) = b_k on 300 random patterns (k=1 <= 7 edges, k=2 <= 4 faces)", ok)


# 7 ---------------------------------------------------------------------------------

def test_criterion_07_p1_polynomials():
    p4 = p_n_polynomial(4, 1)
    p5 = p_n_polynomial(5, 1)
    lists_ok = (p4.coeffs == {6: 2, 5: -6, 4: 3, 3: 4}
                and p5.coeffs == {10: -6, 9: 40, 8: -105, 7: 130, 6: -60, 5: -18, 4: 15, 3: 10})
    rng = random.Random(7)
    spec_ok = True
    for m in range(2, 6):
        poly = symbolic_expected_betti(skeleton(m), 0)
        p1 = p_n_polynomial(m, 1)
        for _ in range(20):
            x = Fraction(rng.randint(0, 97), 97)
            spec_ok &= poly.evaluate(lambda c: x if len(c) == 2 else 1) == m - math.comb(m, 2) * x + horner_eval(p1, x)
    report(7, f"p1(m=4) = {p4}; p1(m=5) = {p5}; specialized oracle agrees at 20 random x for m <= 5",
           lists_ok and spec_ok)


# 8 ---------------------------------------------------------------------------------

def test_criterion_08_subcomplex_counts_n1_to_8():
    table_ok = all(count_subcomplexes(n) == SUBCOMPLEX_TABLE[n] for n in range(1, 9))
    enum_ok = all(count_subcomplexes_enumerate(n) == count_subcomplexes(n) for n in range(1, 5))
    # the closed form printed beside the table is 3^n and disagrees from n = 2 on
    mismatch = all(count_subcomplexes_printed_formula(n) != SUBCOMPLEX_TABLE[n] for n in range(2, 9))
    report(8, "subcomplex counts n=1..8 match the table; enumeration agrees for n <= 4; printed 3^n form does not",
           table_ok and enum_ok and mismatch)


@pytest.mark.xfail(strict=True, reason="table entry for n=9 is the true count reduced mod 2^32")
def test_criterion_08_subcomplex_count_n9():
    value = count_subcomplexes(9)
    report(8, f"n=9: computed {value}, table {SUBCOMPLEX_TABLE[9]} (= computed mod 2^32: "
              f"{value % 2 ** 32 == SUBCOMPLEX_TABLE[9]})", value == SUBCOMPLEX_TABLE[9])


# 9 ---------------------------------------------------------------------------------

def _chi_from_betti(rc):
    return sum(((-1) ** k * expected_betti_exact(rc, k) for k in range(rc.complex.dimension + 1)), Fraction(0))


def test_criterion_09_expected_euler():
    rng = random.Random(9)
    ok = True
    for _ in range(200):
        rc = random_complex(rng, max_cells=10)
        ok &= _chi_from_betti(rc) == expected_euler_exact(rc)
    glued = 0
    while glued < 50:
        rc = random_complex(rng, max_cells=12, max_vertices=5)
        tops = rc.complex.maximal_cells()
        if len(tops) < 2:
            continue
        rng.shuffle(tops)
        cut = rng.randint(1, len(tops) - 1)
        A = rc.restrict(closure(tops[:cut]))
        B = rc.restrict(closure(tops[cut:]))
        lhs = _chi_from_betti(A.union(B))
        rhs = _chi_from_betti(A) + _chi_from_betti(B) - (_chi_from_betti(A.intersection(B)) if len(A.intersection(B)) else 0)
        ok &= lhs == rhs
        glued += 1
    report(9, "chi^E = sum (-1)^k b_k^E on 200 random complexes; inclusion-exclusion on 50 glued pairs", ok)


# 10 --------------------------------------------------------------------------------

def _random_spike_free(rng):
    while True:
        p = random_pattern(rng, 1, max_cells=6, max_vertices=5, min_cells=3)
        if not has_spike(p):
            return p


def test_criterion_10_triangle_lemmas():
    rng = random.Random(10)
    ok = True
    for _ in range(100):
        d = _random_spike_free(rng)
        a, b = rng.choice(d.sorted_cells())
        t = P([(a, b), (a, 99), (b, 99)])
        base = c_direct(d)
        ok &= c_direct(sym_diff_1(d, t)) == base and c_direct(union_1(d, t)) == -base
    report(10, "c1(D sym-diff t) = c1(D) and c1(D union t) = -c1(D) for 100 random spike-free D", ok)


# 11 --------------------------------------------------------------------------------

CYCLE = [(1, 3), (3, 6), (2, 6), (1, 2)]
KEPT = (3, 6)


def _zero_sum_experiments(edges, rng=None):
    """(pattern, decomposed edges) for the three decomposition experiments on one graph."""
    p = P(edges)
    path = [e for e in CYCLE if e != KEPT]
    at_vertex = [e for e in p.sorted_cells() if 6 in e]
    spare = [e for e in p.sorted_cells() if e not in CYCLE]
    extra_one = spare[:1] if rng is None else rng.sample(spare, 1)
    extra_two = spare[:2] if rng is None else rng.sample(spare, min(2, len(spare)))
    return [(p, path), (p, at_vertex), (p, path + extra_one), (p, path + extra_two)]


def _valid_variant(edges):
    es = set(edges)
    nbrs = [v for v in range(1, 7) if tuple(sorted((v, 6))) in es]
    on_triangle = any(tuple(sorted((u, w))) in es for u, w in itertools.combinations(nbrs, 2))
    return len(es - set(CYCLE)) >= 4 and on_triangle


def test_criterion_11_zero_sum_decompositions():
    cache = CoefficientCache()
    k6 = list(itertools.combinations(range(1, 7), 2))
    sums = [decomposition_sum(p, d, cache) for p, d in _zero_sum_experiments(k6)]
    rng = random.Random(11)
    variants = 0
    variant_ok = True
    others = [e for e in k6 if e not in CYCLE]
    while variants < 50:
        edges = CYCLE + [e for e in others if rng.random() < 0.6]
        if not _valid_variant(edges):
            continue
        variants += 1
        for p, d in _zero_sum_experiments(edges, rng):
            variant_ok &= decomposition_sum(p, d, cache) == 0
    report(11, f"decomposition sums on the 6-vertex configuration {sums}; 50 randomized variants all zero",
           sums == [0, 0, 0, 0] and variant_ok)


# 12 --------------------------------------------------------------------------------

SIX_CELL = "v 0 9/10\nv 1 4/5\nv 2 1\ne 0 1 1/2\ne 1 2 2/3\ne 0 2 3/4\n"


def test_criterion_12_monte_carlo():
    ok = True
    lines = []
    for text, k in ((TWO_POINT, 0), (SIX_CELL, 0), (SIX_CELL, 1)):
        rc = parse_complex(text)
        exact = expected_betti_exact(rc, k)
        est = mc_estimate(rc, k, 100000, seed=12)
        again = mc_estimate(rc, k, 100000, seed=12, threads=4)
        a = mc_samples(rc, k, 100000, seed=12, threads=1)
        b = mc_samples(rc, k, 100000, seed=12, threads=3, chunk=7000)
        z = abs(est.mean - float(exact)) / est.std_error
        ok &= z < 5 and est == again and np.array_equal(a, b)
        lines.append(f"b{k}: exact {float(exact):.6f}, mc {est.mean:.6f} +/- {est.std_error:.6f} (z={z:.2f})")
    report(12, "; ".join(lines) + "; bit-identical across runs and thread counts", ok)


# 13 --------------------------------------------------------------------------------

def _profile(rc):
    if len(rc) == 0:
        return (0, 0)
    return tuple(expected_betti_exact(rc, k) for k in range(2))


def test_criterion_13_mayer_vietoris_witness():
    half = Fraction(1, 2)
    edges = list(itertools.combinations(range(1, 5), 2))
    subsets = [s for r in range(1, len(edges) + 1) for s in itertools.combinations(edges, r)]
    full = RandomComplex({c: (1 if len(c) == 1 else half) for c in skeleton(4).cells})
    seen = defaultdict(dict)
    witness = None
    for a in subsets:
        A = full.restrict(closure(a))
        for b in subsets:
            B = full.restrict(closure(b))
            key = (_profile(A), _profile(B), _profile(A.intersection(B)))
            union = _profile(A.union(B))
            for other, pair in seen[key].items():
                if other != union:
                    witness = (pair, (a, b), other, union)
                    break
            seen[key].setdefault(union, (a, b))
            if witness:
                break
        if witness:
            break
    ok = witness is not None
    if ok:
        (a1, b1), (a2, b2), u1, u2 = witness
        first = RandomComplex({c: full[c] for c in closure(a1 + b1)})
        second = RandomComplex({c: full[c] for c in closure(a2 + b2)})
        ok = _profile(first) == u1 != u2 == _profile(second)
        desc = f"A={a1}, B={b1} vs A={a2}, B={b2}: equal (A, B, A&B) expectations, unions {u1} vs {u2}"
    else:
        desc = "no witness found"
    report(13, "Mayer-Vietoris fails for expectations: " + desc, ok)


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
