"""Command-line entry point: ``localeuler {validate,euler,pair,cycle,generate}``.

Exit codes: 0 success, 1 failed checks or library error, 2 unreadable input.
Library errors are reported as ``ClassName: message`` on standard error.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from fractions import Fraction

from . import io
from .bundle import BundleModel, validate_bundle
from .chains import fundamental_class
from .engine import FORMULAS, euler_cochain, pair
from .errors import ComplexError, DocumentError, FormulaUnsupported, LocalEulerError
from .fixtures import BundleFixture, fiber_edges, gen_trivial, hopf_text, subdivide_fiber_edge
from .simplicial import SimplicialComplex, boundary_of_simplex, cycle_graph, simplex


class UsageError(Exception):
    pass


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_bundle(path: str):
    doc = io.load_json(path)
    return io.bundle_from_dict(doc), doc


def parse_complex(name: str) -> SimplicialComplex:
    """``simplexK``, ``boundaryK`` (boundary of the K-simplex) or ``cycleK``."""
    m = re.fullmatch(r"(simplex|boundary|cycle)(\d+)", name)
    if not m:
        raise UsageError(f"unknown complex {name!r}; use simplexK, boundaryK or cycleK")
    kind, k = m.group(1), int(m.group(2))
    if kind == "simplex":
        return simplex(k)
    if kind == "boundary":
        if k < 2:
            raise UsageError("boundaryK needs K >= 2")
        return boundary_of_simplex(k - 1)
    if k < 2:
        raise UsageError("cycleK needs K >= 2")
    return cycle_graph(k)


def cmd_validate(args) -> int:
    b, _ = _load_bundle(args.bundle)
    rep = validate_bundle(b)
    for line in rep.lines():
        print(line)
    return 0 if rep.ok else 1


def cmd_euler(args) -> int:
    b, doc = _load_bundle(args.bundle)
    if args.formula == "necklace" and b.n != 1:
        raise FormulaUnsupported(f"the necklace formula needs n = 1, got n = {b.n}")
    model = BundleModel(b)
    rep = validate_bundle(b, model)
    if not rep.ok:
        for line in rep.lines():
            if line.split(":")[0] in rep.failed():
                print(line, file=sys.stderr)
        return 1
    e = euler_cochain(model, args.formula, jobs=args.jobs)
    _write(io.dumps(io.cochain_to_dict(e, b, io.digest(doc))), args.output)
    return 0


def cmd_pair(args) -> int:
    e, d1 = io.cochain_from_dict(io.load_json(args.cochain))
    cycle, d2 = io.cycle_from_dict(io.load_json(args.cycle))
    io.check_digests(d1, d2)
    verts = [v for s in e.values for v in s] + [v for s in cycle for v in s]
    base = SimplicialComplex(max(verts, default=-1) + 1, list(e.values))
    print(io.format_rational(pair(e, cycle, base)))
    return 0


def cmd_cycle(args) -> int:
    b, _ = _load_bundle(args.bundle)
    chain: dict[tuple[int, ...], Fraction] = {}
    if not args.zero:
        K = b.base.cell_complex()
        if K.top_dim != b.n + 1:
            raise ComplexError(f"base has dimension {K.top_dim}, expected {b.n + 1}")
        fund = fundamental_class(K)
        for c, v in fund:
            chain[K.keys[c]] = v
    _write(io.dumps(io.cycle_to_dict(chain, b)), args.output)
    return 0


def cmd_generate(args) -> int:
    if args.kind == "hopf":
        fx = None
        text = io.dumps(json.loads(hopf_text()))
        if args.subdivide:
            from .fixtures import hopf_fixture

            fx = hopf_fixture()
    else:
        base, fiber = parse_complex(args.base), parse_complex(args.fiber)
        order = list(range(base.num_vertices))
        if args.seed is not None:
            random.Random(args.seed).shuffle(order)
        fx = gen_trivial(base, fiber, base_order=order)
    if fx is not None:
        fx = _subdivide(fx, args.subdivide, args.seed)
        extra = {"provenance": fx.note, "expected": {k: io.format_rational(v) for k, v in sorted(fx.expected.items())}}
        text = io.dumps(io.bundle_to_dict(fx.bundle, extra))
    _write(text, args.output)
    return 0


def _subdivide(fx: BundleFixture, count: int, seed: int | None) -> BundleFixture:
    rng = random.Random(seed)
    for _ in range(count):
        edges = fiber_edges(fx.bundle)
        fx = subdivide_fiber_edge(fx, edges[rng.randrange(len(edges))])
    return fx


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="localeuler", description="Local rational Euler class cochains of sphere bundles.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="structural checks on a bundle document")
    v.add_argument("bundle")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("euler", help="compute the Euler cochain")
    e.add_argument("bundle")
    e.add_argument("--formula", choices=FORMULAS, default="winding")
    e.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_euler)

    pr = sub.add_parser("pair", help="evaluate a cochain on a cycle")
    pr.add_argument("cochain")
    pr.add_argument("cycle")
    pr.set_defaults(func=cmd_pair)

    c = sub.add_parser("cycle", help="write the fundamental cycle of a closed base")
    c.add_argument("bundle")
    c.add_argument("--zero", action="store_true", help="write the zero cycle instead")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_cycle)

    g = sub.add_parser("generate", help="write a fixture bundle")
    g.add_argument("--kind", choices=("trivial", "hopf"), required=True)
    g.add_argument("--base", default="simplex2", help="simplexK, boundaryK or cycleK")
    g.add_argument("--fiber", default="cycle3", help="fiber sphere, e.g. cycle4 or boundary3")
    g.add_argument("--seed", type=int, help="shuffles the base vertex order and picks subdivided edges")
    g.add_argument("--subdivide", type=int, default=0, help="number of fiber edge subdivisions")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (DocumentError, UsageError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except LocalEulerError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
