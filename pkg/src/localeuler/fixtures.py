"""Bundle generators with known Euler numbers."""

from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from typing import Sequence

from .bundle import FiberAnchor, TriangulatedBundle
from .chains import orient
from .errors import InvalidFiber, NotFiberEdge
from .linalg import validate_sphere
from .simplicial import SimplicialComplex


@dataclass
class BundleFixture:
    bundle: TriangulatedBundle
    kind: str
    expected: dict[str, object] = field(default_factory=dict)
    note: str = ""


def _shuffles(p: int, q: int):
    """Monotone lattice paths from (0, 0) to (p, q)."""
    for ups in combinations(range(p + q), q):
        i = j = 0
        path = [(0, 0)]
        ups_set = set(ups)
        for step in range(p + q):
            if step in ups_set:
                j += 1
            else:
                i += 1
            path.append((i, j))
        yield path


def staircase(
    base: SimplicialComplex,
    fiber: SimplicialComplex,
    base_order: Sequence[int] | None = None,
) -> tuple[SimplicialComplex, list[int]]:
    """Staircase triangulation of ``base x fiber``.

    Vertex ``(b, f)`` gets index ``b * fiber.num_vertices + f``.  Simplices are
    chains in the product order, using ``base_order`` (a ranking of base
    vertices, default identity) and the natural fiber order.
    """
    m = fiber.num_vertices
    rank = list(range(base.num_vertices)) if base_order is None else list(base_order)
    facets = []
    for sb in base.facets:
        sb = sorted(sb, key=lambda v: rank[v])
        for sf in fiber.facets:
            for path in _shuffles(len(sb) - 1, len(sf) - 1):
                facets.append([sb[i] * m + sf[j] for i, j in path])
    total = SimplicialComplex(base.num_vertices * m, facets)
    return total, [v // m for v in range(base.num_vertices * m)]


def _components(base: SimplicialComplex) -> list[list[int]]:
    parent = list(range(base.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in base.of_dim(1):
        parent[find(a)] = find(b)
    comps: dict[int, list[int]] = {}
    for v in range(base.num_vertices):
        comps.setdefault(find(v), []).append(v)
    return sorted(comps.values())


def gen_trivial(
    base: SimplicialComplex,
    fiber: SimplicialComplex,
    base_order: Sequence[int] | None = None,
    n: int | None = None,
) -> BundleFixture:
    """Product bundle with the fiber orientation induced from ``fiber``."""
    n = fiber.dim if n is None else n
    rep = validate_sphere(fiber.cell_complex(), n)
    if not rep.ok:
        raise InvalidFiber(f"fiber is not a valid {n}-sphere: {', '.join(rep.failed())}")
    total, vmap = staircase(base, fiber, base_order)
    fsimp = fiber.of_dim(n)
    K = fiber.cell_complex()
    ref = K.index[fsimp[0]]
    sign = orient(K, ref).signs[ref]
    m = fiber.num_vertices
    anchors = [
        FiberAnchor(comp[0], tuple(comp[0] * m + f for f in fsimp[0]), sign) for comp in _components(base)
    ]
    bundle = TriangulatedBundle(
        base,
        total,
        vmap,
        n,
        anchors,
        base_names=[f"b{v}" for v in range(base.num_vertices)],
        total_names=[f"b{v // m}f{v % m}" for v in range(total.num_vertices)],
    )
    return BundleFixture(bundle, "trivial", {"any-cycle": 0}, "staircase product triangulation")


def hopf_text() -> str:
    return resources.files("localeuler.data").joinpath("hopf.json").read_text()


def hopf_fixture() -> BundleFixture:
    """The shipped 12-vertex circle bundle over the boundary of the tetrahedron."""
    from .io import bundle_from_dict

    doc = json.loads(hopf_text())
    return BundleFixture(
        bundle_from_dict(doc),
        "hopf",
        {"fundamental_abs": Fraction(doc.get("expected", {}).get("fundamental_abs", "1/1"))},
        doc.get("provenance", ""),
    )


def subdivide_fiber_edge(fx: BundleFixture, edge: Sequence[int]) -> BundleFixture:
    """Stellar subdivision of a total-space edge lying in a single fiber.

    The new vertex is appended last and maps to the edge's base vertex.
    """
    b = fx.bundle
    a, c = sorted(edge)
    if (a, c) not in b.total.simplices:
        raise NotFiberEdge(f"{[a, c]} is not an edge of the total space")
    if b.vertex_map[a] != b.vertex_map[c]:
        raise NotFiberEdge(f"{[a, c]} joins different fibers")
    x = b.total.num_vertices
    facets = []
    for s in b.total.facets:
        if a in s and c in s:
            facets.append([x if v == c else v for v in s])
            facets.append([x if v == a else v for v in s])
        else:
            facets.append(list(s))
    total = SimplicialComplex(x + 1, facets)
    anchors = []
    for anc in b.fiber_orientation:
        tau = anc.simplex
        if a in tau and c in tau:
            # same geometric orientation after replacing c by x (x sits on the edge)
            seq = [x if v == c else v for v in tau]
            from .chains import permutation_sign

            sign = anc.sign * permutation_sign(seq)
            anchors.append(FiberAnchor(anc.base_vertex, tuple(sorted(seq)), sign))
        else:
            anchors.append(anc)
    names = list(b.total_names) + [f"s{x}"] if b.total_names else None
    bundle = TriangulatedBundle(
        b.base, total, list(b.vertex_map) + [b.vertex_map[a]], b.n, anchors, dict(b.base_orientation), b.base_names, names
    )
    return BundleFixture(bundle, fx.kind, dict(fx.expected), fx.note + f"; subdivided fiber edge {a}-{c}")


def fiber_edges(b: TriangulatedBundle) -> list[tuple[int, int]]:
    return [e for e in b.total.of_dim(1) if b.vertex_map[e[0]] == b.vertex_map[e[1]]]
