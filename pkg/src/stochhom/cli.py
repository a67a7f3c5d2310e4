"""Command-line front end: ``stochhom {expect,coeff,poly,vr,verify}``.

Exit codes: 0 success, 1 verification mismatch, 2 input error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import itertools
import random
import sys
from fractions import Fraction

from .complex import closure, format_probability, make_cell, parse_complex, serialize_complex
from .errors import CacheCorruptionError, ComplexFormatError, GuardExceeded
from .expectation import (
    expected_betti_exact,
    expected_euler_exact,
    mc_estimate,
    monomial_coefficient,
    symbolic_expected_betti,
)
from .geometry import FAMILIES, SCALES, ProbModel, assign_probabilities, load_points, vr_complex
from .instances import random_complex, random_pattern
from .patterns import Pattern
from .polynomial import p_n_polynomial
from .reduction import (
    CoefficientCache,
    c_direct,
    c_recursive,
    decomposition_sum,
    deletion_level_sums,
    pattern_betti,
)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3
DEFAULT_CACHE = "stochhom-coefficients.cache"


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _decimal(x) -> str:
    return f"{float(x):.15g}"


def parse_pattern(text: str, k: int | None = None) -> Pattern:
    """One cell per line as whitespace-separated vertex ids; ``#`` comments."""
    cells = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            cells.append(make_cell(int(t) for t in line.split()))
        except ValueError as exc:
            raise ComplexFormatError(str(exc), lineno) from None
    if not cells:
        raise ComplexFormatError("pattern file has no cells")
    try:
        return Pattern.of(cells, k)
    except ValueError as exc:
        raise ComplexFormatError(str(exc)) from None


def _cache(args) -> CoefficientCache:
    if args.no_cache:
        return CoefficientCache()
    return CoefficientCache(args.cache)


# --- subcommands ----------------------------------------------------------------

def cmd_expect(args) -> int:
    rc = parse_complex(_read(args.complex))
    if args.mode == "mc":
        est = mc_estimate(rc, args.dim, args.samples, args.seed, threads=args.threads)
        print(f"{_decimal(est.mean)} +/- {_decimal(est.std_error)}  (samples={est.samples}, seed={est.seed})")
        return EXIT_OK
    if args.mode == "euler":
        value = expected_euler_exact(rc)
    else:
        value = expected_betti_exact(rc, args.dim, max_cells=args.max_cells)
    print(format_probability(value))
    print(_decimal(value))
    return EXIT_OK


def cmd_coeff(args) -> int:
    p = parse_pattern(_read(args.pattern), args.dim)
    if args.method == "direct":
        value = c_direct(p, max_cells=args.max_cells)
    else:
        value = c_recursive(p, cache=_cache(args), max_cells=args.max_cells)
    if args.verify:
        other = c_recursive(p, max_cells=args.max_cells) if args.method == "direct" else c_direct(p, max_cells=args.max_cells)
        if other != value:
            print(f"mismatch: {args.method} gives {value}, the other method gives {other}", file=sys.stderr)
            return EXIT_MISMATCH
    print(value)
    return EXIT_OK


def cmd_poly(args) -> int:
    print(p_n_polynomial(args.points, args.dim, cache=_cache(args)).to_text())
    return EXIT_OK


def cmd_vr(args) -> int:
    pc = load_points(_read(args.points))
    X = vr_complex(pc, args.radius, args.max_dim)
    rc = assign_probabilities(X, pc, ProbModel(args.prob, args.k, args.scale))
    text = serialize_complex(rc)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    return EXIT_OK


def _symbolic_coefficient(p: Pattern) -> int:
    """Coefficient of the pattern's monomial in b_{k-1}^E, plus the single-cell offset."""
    poly = symbolic_expected_betti(p.complex(), p.k - 1)
    return int(monomial_coefficient(poly, p.cells)) + (1 if len(p) == 1 else 0)


def run_verify(max_cells: int, trials: int, seed: int, out=None) -> int:
    """Seeded cross-method checks; returns the number of mismatches."""
    out = out if out is not None else sys.stdout
    rng = random.Random(seed)
    counts: dict[str, int] = {}
    failures = 0

    def record(name, ok, instance):
        nonlocal failures
        counts[name] = counts.get(name, 0) + 1
        if not ok:
            failures += 1
            print(f"MISMATCH {name}", file=out)
            print(instance, file=out)

    cache = CoefficientCache()
    for _ in range(trials):
        rc = random_complex(rng, max_cells=max_cells)
        k = rng.randint(0, max(0, rc.complex.dimension))
        a = expected_betti_exact(rc, k)
        b = expected_betti_exact(rc, k, method="configurations")
        record("enumeration", a == b, serialize_complex(rc))
        chi = sum(((-1) ** j * expected_betti_exact(rc, j) for j in range(rc.complex.dimension + 1)), Fraction(0))
        record("euler", chi == expected_euler_exact(rc), serialize_complex(rc))

        kp = rng.choice((1, 1, 2))
        p = random_pattern(rng, kp, max_cells=min(max_cells, 7 if kp == 1 else 5), max_vertices=5)
        direct = c_direct(p)
        shown = "\n".join(" ".join(map(str, c)) for c in p.sorted_cells())
        record("recursion", c_recursive(p, cache=cache) == direct, shown)
        record("level-sums", sum(deletion_level_sums(p, cache)) == pattern_betti(p), shown)
        if len(closure(p.cells)) <= 16:
            record("symbolic", _symbolic_coefficient(p) == direct, shown)
        if kp == 1 and len(p) >= 3:
            edge = rng.choice(p.sorted_cells())
            rest = [c for c in p.sorted_cells() if c != edge]
            decomposed = rng.sample(rest, min(len(rest), 2))
            total = decomposition_sum(p, decomposed, cache)
            brute = sum(c_direct(p.without(A)) for r in range(len(decomposed) + 1)
                        for A in itertools.combinations(decomposed, r))
            record("decomposition", total == brute, shown)
    for name in sorted(counts):
        print(f"{name}: {counts[name]} checked", file=out)
    print("FAIL" if failures else "PASS", file=out)
    return failures


def cmd_verify(args) -> int:
    return EXIT_MISMATCH if run_verify(args.max_cells, args.trials, args.seed) else EXIT_OK


# --- parser --------------------------------------------------------------------------

def _add_cache_flags(sp):
    sp.add_argument("--cache", default=DEFAULT_CACHE, help="coefficient cache file (default: %(default)s)")
    sp.add_argument("--no-cache", action="store_true", help="keep the cache in memory only")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stochhom", description="Expected Betti numbers of random simplicial complexes.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("expect", help="expected Betti number or Euler characteristic of a complex file")
    sp.add_argument("complex")
    sp.add_argument("--dim", type=int, default=0)
    sp.add_argument("--mode", choices=("exact", "mc", "euler"), default="exact")
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--max-cells", type=int, default=24, help="exact enumeration guard")
    sp.set_defaults(func=cmd_expect)

    sp = sub.add_parser("coeff", help="coefficient c_k of a pattern monomial")
    sp.add_argument("pattern")
    sp.add_argument("--dim", type=int, default=None, help="k (inferred from the cells when omitted)")
    sp.add_argument("--method", choices=("direct", "recursive"), default="recursive")
    sp.add_argument("--verify", action="store_true", help="cross-check with the other method")
    sp.add_argument("--max-cells", type=int, default=20)
    _add_cache_flags(sp)
    sp.set_defaults(func=cmd_coeff)

    sp = sub.add_parser("poly", help="equal-probability polynomial p_n^E on m points")
    sp.add_argument("--points", type=int, required=True)
    sp.add_argument("--dim", type=int, default=1)
    _add_cache_flags(sp)
    sp.set_defaults(func=cmd_poly)

    sp = sub.add_parser("vr", help="Vietoris-Rips complex with model probabilities from a CSV point cloud")
    sp.add_argument("points")
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--max-dim", type=int, default=2)
    sp.add_argument("--prob", choices=FAMILIES, default="root")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--scale", choices=SCALES, default="max", help="centroid-to-vertex distance used as r_m")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_vr)

    sp = sub.add_parser("verify", help="seeded cross-method consistency checks")
    sp.add_argument("--max-cells", type=int, default=10)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        for name in ("samples", "threads", "trials", "max_cells", "points"):
            value = getattr(args, name, None)
            if isinstance(value, int) and value < 1:
                raise InputError(f"--{name.replace('_', '-')} must be positive")
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GuardExceeded as exc:
        hint = " (try --mode mc)" if args.command == "expect" else ""
        print(f"error: {exc}{hint}", file=sys.stderr)
        return EXIT_GUARD
    except CacheCorruptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
