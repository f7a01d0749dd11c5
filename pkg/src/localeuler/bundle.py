"""Triangulated spherical bundles and the per-face complexes built from them.

For a face ``F`` of the base (a sorted tuple of base vertices) the tiling
``T_F`` has one cell per total-space simplex whose image is exactly ``F``; a
simplex with ``m`` vertices gives a cell of dimension ``m - len(F)``.  The dual
``Gamma_F`` reverses that poset.  All cells are keyed by their simplex, so the
two complexes share keys.

Everything here is point-free: only the abstract simplicial data is used.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .chains import (
    CellComplex,
    RationalChain,
    ValidationReport,
    assign_incidence_signs,
    boundary,
    orient,
)
from .errors import (
    BundleError,
    ChainMapViolation,
    EmptyTiling,
    InclusionAmbiguous,
    InclusionMissing,
    LemmaViolation,
    LocalEulerError,
    NonOrientableTransport,
)
from .linalg import Eliminator, validate_sphere
from .simplicial import Simplex, SimplicialComplex

Face = tuple[int, ...]


@dataclass(frozen=True)
class FiberAnchor:
    """Orientation of the fiber over ``base_vertex``: ``sign`` relative to the
    sorted vertex order of the fiber n-simplex ``simplex``."""

    base_vertex: int
    simplex: Simplex
    sign: int


@dataclass
class TriangulatedBundle:
    base: SimplicialComplex
    total: SimplicialComplex
    vertex_map: tuple[int, ...]
    n: int
    fiber_orientation: list[FiberAnchor]
    base_orientation: dict[Simplex, int] = field(default_factory=dict)
    base_names: list[str] | None = None
    total_names: list[str] | None = None

    def __post_init__(self):
        self.vertex_map = tuple(int(v) for v in self.vertex_map)

    def image(self, s: Sequence[int]) -> Face:
        return tuple(sorted({self.vertex_map[v] for v in s}))

    def oriented(self, sigma: Simplex) -> tuple[int, ...]:
        """Vertex order of a base simplex that agrees with its stored orientation."""
        sigma = tuple(sorted(sigma))
        if self.base_orientation.get(sigma, 1) == -1:
            return (sigma[1], sigma[0]) + sigma[2:]
        return sigma

    def top_simplices(self) -> list[Simplex]:
        return self.base.of_dim(self.n + 1)

    def with_flipped_orientation(self) -> "TriangulatedBundle":
        return TriangulatedBundle(
            self.base,
            self.total,
            self.vertex_map,
            self.n,
            [FiberAnchor(a.base_vertex, a.simplex, -a.sign) for a in self.fiber_orientation],
            dict(self.base_orientation),
            self.base_names,
            self.total_names,
        )


@dataclass(frozen=True)
class TilingComplex:
    face: Face
    complex: CellComplex

    @property
    def simplices(self) -> tuple[Simplex, ...]:
        return self.complex.keys


@dataclass(frozen=True)
class DualComplex:
    face: Face
    complex: CellComplex
    colors: dict[int, int]  # vertex cell -> base vertex, colored vertices only

    def vertices(self) -> tuple[int, ...]:
        return self.complex.cells(0)

    def top_cells_at(self, vertex: int) -> list[int]:
        """Top-dimensional cells whose closure contains ``vertex``."""
        K = self.complex
        layer = {vertex}
        for _ in range(K.top_dim):
            layer = {u for c in layer for u in K.cofaces[c]}
        return sorted(layer)

    def color_class(self, base_vertex: int) -> list[int]:
        return sorted(v for v, u in self.colors.items() if u == base_vertex)


@dataclass
class RefinementMap:
    source: DualComplex
    target: DualComplex
    images: dict[int, dict[int, int]]

    def apply(self, c: RationalChain) -> RationalChain:
        if c.complex is not self.source.complex:
            raise BundleError("chain does not live on the refinement source")
        out: dict[int, Fraction] = {}
        for cell, v in c.coeffs.items():
            for t, s in self.images[cell].items():
                out[t] = out.get(t, 0) + s * v
        return RationalChain(self.target.complex, c.dim, out)


class BundleModel:
    """Lazily built, cached per-face complexes of a :class:`TriangulatedBundle`.

    Construction of a face's data is deterministic and write-once.
    """

    def __init__(self, bundle: TriangulatedBundle):
        self.bundle = bundle
        self._tiling: dict[Face, TilingComplex] = {}
        self._dual: dict[Face, DualComplex] = {}
        self._refine: dict[tuple[Face, Face], RefinementMap] = {}
        self._fund: dict[Face, RationalChain] = {}
        self._fiber_sign: dict[int, int] | None = None
        self._traces: dict[tuple[Face, Face], dict[Simplex, list[Simplex]]] = {}

    @property
    def n(self) -> int:
        return self.bundle.n

    @cached_property
    def by_image(self) -> dict[Face, list[Simplex]]:
        out: dict[Face, list[Simplex]] = {}
        for s in self.bundle.total.simplices:
            out.setdefault(self.bundle.image(s), []).append(s)
        for v in out.values():
            v.sort(key=lambda s: (len(s), s))
        return out

    def tiling(self, face: Sequence[int]) -> TilingComplex:
        face = tuple(sorted(face))
        if face in self._tiling:
            return self._tiling[face]
        simps = self.by_image.get(face)
        if not simps:
            raise EmptyTiling(f"no simplex has color support {list(face)}")
        idx = {s: i for i, s in enumerate(simps)}
        k = len(face)
        faces = []
        for s in simps:
            fs = []
            if len(s) > k:
                for j in range(len(s)):
                    t = s[:j] + s[j + 1:]
                    if t in idx:
                        fs.append(idx[t])
            faces.append(fs)
        K = assign_incidence_signs([len(s) - k for s in simps], faces, simps)
        out = TilingComplex(face, K)
        self._tiling[face] = out
        return out

    def dual(self, face: Sequence[int]) -> DualComplex:
        face = tuple(sorted(face))
        if face in self._dual:
            return self._dual[face]
        T = self.tiling(face).complex
        n = self.n
        k = len(face)
        simps = sorted(T.keys, key=lambda s: (-len(s), s))
        idx = {s: i for i, s in enumerate(simps)}
        faces = []
        for s in simps:
            faces.append([idx[T.keys[u]] for u in T.cofaces[T.index[s]]])
        K = assign_incidence_signs([n - (len(s) - k) for s in simps], faces, simps)
        colors = {}
        vmap = self.bundle.vertex_map
        for v in K.cells(0):
            s = K.keys[v]
            counts: dict[int, int] = {}
            for w in s:
                counts[vmap[w]] = counts.get(vmap[w], 0) + 1
            for u, m in counts.items():
                if m == n + 1:
                    colors[v] = u
        D = DualComplex(face, K, colors)
        for v in colors:
            m = len(D.top_cells_at(v))
            if m != n + 1:
                raise LemmaViolation(
                    f"colored vertex {list(K.keys[v])} of face {list(face)} has {m} incident top cells, expected {n + 1}"
                )
        self._dual[face] = D
        return D

    def fiber_vertices(self, base_vertex: int) -> list[Simplex]:
        """Vertices of the fiber dual complex: the fiber's n-simplices."""
        D = self.dual((base_vertex,))
        return [D.complex.keys[v] for v in D.vertices()]

    def include_vertex(self, tau: Simplex, face: Sequence[int]) -> int:
        """Cell of ``Gamma_face`` for the fiber n-simplex ``tau``."""
        face = tuple(sorted(face))
        tau = tuple(sorted(tau))
        u = self.bundle.image(tau)
        if len(u) != 1 or u[0] not in face or len(tau) != self.n + 1:
            raise BundleError(f"{list(tau)} is not a fiber n-simplex over a vertex of {list(face)}")
        if face == u:
            return self.dual(face).complex.index[tau]
        return self._single_vertex_image(tau, u, face)

    def _single_vertex_image(self, tau: Simplex, J: Face, I: Face) -> int:
        want = len(tau) + len(I) - len(J)
        hits = [s for s in self._trace_index(J, I).get(tau, []) if len(s) == want]
        if not hits:
            raise InclusionMissing(f"no top simplex over {list(I)} has trace {list(tau)}")
        if len(hits) > 1:
            raise InclusionAmbiguous(f"{len(hits)} top simplices over {list(I)} have trace {list(tau)}")
        return self.dual(I).complex.index[hits[0]]

    def _trace_index(self, J: Face, I: Face) -> dict[Simplex, list[Simplex]]:
        if (J, I) not in self._traces:
            vmap = self.bundle.vertex_map
            Js = set(J)
            out: dict[Simplex, list[Simplex]] = {}
            for s in self.by_image.get(I, []):
                t = tuple(w for w in s if vmap[w] in Js)
                out.setdefault(t, []).append(s)
            self._traces[J, I] = out
        return self._traces[J, I]

    def refinement(self, J: Sequence[int], I: Sequence[int]) -> RefinementMap:
        """Chain map ``Gamma_J -> Gamma_I`` for a face ``J`` of ``I``."""
        J, I = tuple(sorted(J)), tuple(sorted(I))
        if (J, I) in self._refine:
            return self._refine[J, I]
        if not set(J) < set(I):
            raise BundleError(f"{list(J)} is not a proper face of {list(I)}")
        src, tgt = self.dual(J), self.dual(I)
        KJ, KI = src.complex, tgt.complex
        traces = self._trace_index(J, I)
        extra = len(I) - len(J)
        images: dict[int, dict[int, int]] = {}
        for p in range(KJ.top_dim + 1):
            for e in KJ.cells(p):
                s = KJ.keys[e]
                cands = [KI.index[t] for t in traces.get(s, []) if len(t) == len(s) + extra]
                if p == 0:
                    if len(cands) != 1:
                        exc = InclusionMissing if not cands else InclusionAmbiguous
                        raise exc(f"vertex {list(s)} of {list(J)} has {len(cands)} images in {list(I)}")
                    images[e] = {cands[0]: 1}
                    continue
                images[e] = self._solve_signs(KI, cands, e, KJ, images, J, I)
        rho = RefinementMap(src, tgt, images)
        self._refine[J, I] = rho
        return rho

    @staticmethod
    def _solve_signs(KI, cands, e, KJ, images, J, I) -> dict[int, int]:
        target: dict[int, int] = {}
        for f, s in KJ.faces[e].items():
            for t, r in images[f].items():
                target[t] = target.get(t, 0) + s * r
        rows: dict[int, dict[int, int]] = {}
        for j, c in enumerate(cands):
            for g, s in KI.faces[c].items():
                rows.setdefault(g, {})[j] = s
        el = Eliminator()
        for g in sorted(set(rows) | set(target)):
            el.add(rows.get(g, {}), target.get(g, 0))
        where = f"cell {list(KJ.keys[e])} of {list(J)} -> {list(I)}"
        if el.inconsistent or el.rank != len(cands):
            raise ChainMapViolation(
                f"trace rule gives no unique chain-map image for {where}; "
                "either the bundle is not a combinatorial-manifold bundle or the refinement rule does not apply"
            )
        sol = el.particular_solution()
        out = {}
        for j, c in enumerate(cands):
            v = sol.get(j, 0)
            if v not in (1, -1):
                raise ChainMapViolation(f"refinement coefficient {v} is not a sign for {where}")
            out[c] = int(v)
        return out

    # orientation

    def _dual_flag_sign(self, anchor: FiberAnchor) -> tuple[int, int]:
        """Signed coefficient of the dual cell of ``simplex[0]`` in the
        fundamental class determined by the anchor, via the flag
        ``simplex[:1] < simplex[:2] < ... < simplex``."""
        u = anchor.base_vertex
        tau = tuple(sorted(anchor.simplex))
        if self.bundle.image(tau) != (u,) or len(tau) != self.n + 1:
            raise BundleError(f"anchor simplex {list(tau)} is not a fiber n-simplex over {u}")
        K = self.dual((u,)).complex
        prod = 1
        for k in range(self.n):
            prod *= K.incidence(K.index[tau[: k + 1]], K.index[tau[: k + 2]])
        return K.index[tau[:1]], anchor.sign * prod

    def fiber_signs(self) -> dict[int, int]:
        """Sign per base vertex relative to the canonical orientation of its fiber dual.

        Anchored fibers are fixed by their anchors and the rest are transported
        across base edges through the edge complexes.
        """
        if self._fiber_sign is not None:
            return self._fiber_sign
        b = self.bundle
        used = sorted({u for s in b.top_simplices() for u in s}) or list(range(b.base.num_vertices))
        canon = {u: orient(self.dual((u,)).complex).signs for u in used}
        sign: dict[int, int] = {}
        anchors: dict[int, int] = {}
        for a in b.fiber_orientation:
            if a.base_vertex not in canon:
                canon[a.base_vertex] = orient(self.dual((a.base_vertex,)).complex).signs
            cell, coeff = self._dual_flag_sign(a)
            s = coeff * canon[a.base_vertex][cell]
            if anchors.get(a.base_vertex, s) != s:
                raise NonOrientableTransport(f"conflicting anchors on the fiber over {a.base_vertex}")
            anchors[a.base_vertex] = s
        adj: dict[int, list[int]] = {u: [] for u in canon}
        for e in b.base.of_dim(1):
            if e[0] in adj and e[1] in adj:
                adj[e[0]].append(e[1])
                adj[e[1]].append(e[0])

        def degree(u: int, edge: Face) -> int:
            F = self.dual(edge).complex
            image = self.refinement((u,), edge).apply(RationalChain(self.dual((u,)).complex, self.n, canon[u]))
            ref = orient(F).signs
            ratios = {image[c] * ref[c] for c in F.cells(self.n)}
            if len(ratios) != 1 or next(iter(ratios)) not in (1, -1):
                raise ChainMapViolation(f"refinement of the fiber over {u} into {list(edge)} is not of degree 1")
            return int(next(iter(ratios)))

        for root in sorted(canon):
            if root in sign:
                continue
            comp, queue = [root], deque([root])
            seen = {root}
            while queue:
                u = queue.popleft()
                for w in sorted(adj[u]):
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            pinned = [u for u in comp if u in anchors]
            if not pinned:
                raise BundleError(f"no fiber orientation anchor on the base component of vertex {root}")
            start = pinned[0]
            sign[start] = anchors[start]
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for w in sorted(adj[u]):
                    edge = tuple(sorted((u, w)))
                    want = sign[u] * degree(u, edge) * degree(w, edge)
                    if w not in sign:
                        sign[w] = want
                        queue.append(w)
                    elif sign[w] != want:
                        raise NonOrientableTransport(f"fiber orientation flips across base edge {list(edge)}")
            for u in pinned:
                if sign[u] != anchors[u]:
                    raise NonOrientableTransport(f"anchor over {u} disagrees with the transported orientation")
        self._fiber_sign = sign
        return sign

    def fundamental_class(self, face: Sequence[int]) -> RationalChain:
        """Oriented fundamental class of ``Gamma_face``.

        Pinned by refining the oriented fiber over the smallest vertex of the
        face; every other vertex of the face is checked to agree.
        """
        face = tuple(sorted(face))
        if face in self._fund:
            return self._fund[face]
        signs = self.fiber_signs()
        fibers = {}
        for u in face:
            K = self.dual((u,)).complex
            fibers[u] = RationalChain(K, self.n, {c: signs[u] * s for c, s in orient(K).signs.items()})
        if len(face) == 1:
            out = fibers[face[0]]
        else:
            out = self.refinement((face[0],), face).apply(fibers[face[0]])
            for u in face[1:]:
                if self.refinement((u,), face).apply(fibers[u]) != out:
                    raise NonOrientableTransport(f"fibers of face {list(face)} induce different orientations")
        self._fund[face] = out
        return out


def faces_of(s: Sequence[int], min_size: int = 1) -> list[Face]:
    s = tuple(sorted(s))
    return [f for k in range(min_size, len(s) + 1) for f in combinations(s, k)]


def validate_bundle(b: TriangulatedBundle, model: BundleModel | None = None) -> ValidationReport:
    """Structural checks on a bundle; failures are reported, never raised."""
    rep = ValidationReport()
    model = model or BundleModel(b)
    bad = ""
    if len(b.vertex_map) != b.total.num_vertices:
        bad = "vertexMap length differs from the number of total vertices"
    elif any(not 0 <= v < b.base.num_vertices for v in b.vertex_map):
        bad = "vertexMap points outside the base"
    else:
        for s in b.total.facets:
            if b.image(s) not in b.base.simplices:
                bad = f"simplex {list(s)} maps to non-simplex {list(b.image(s))}"
                break
    rep.add("simplicial-map", not bad, bad)
    if bad:
        for name in ("fiber-spheres", "tilings", "dual-complexes", "refinements", "orientation-transport"):
            rep.add(name, None, "needs a simplicial map")
        return rep

    def guarded(name, fn):
        try:
            msg = fn()
        except LocalEulerError as exc:
            msg = f"{type(exc).__name__}: {exc}"
        rep.add(name, not msg, msg or "")
        return not msg

    def fibers():
        for u in range(b.base.num_vertices):
            r = validate_sphere(model.tiling((u,)).complex, b.n)
            if not r.ok:
                return f"fiber over {u}: {', '.join(r.failed())}"
        return ""

    top_faces = sorted({f for s in b.base.simplices if len(s) <= b.n + 2 for f in faces_of(s)}, key=lambda f: (len(f), f))

    def tilings():
        for f in top_faces:
            r = validate_sphere(model.tiling(f).complex, b.n)
            if not r.ok:
                return f"tiling over {list(f)}: {', '.join(r.failed())}"
        return ""

    def duals():
        for f in top_faces:
            r = validate_sphere(model.dual(f).complex, b.n)
            if not r.ok:
                return f"dual over {list(f)}: {', '.join(r.failed())}"
        return ""

    def refinements():
        for f in top_faces:
            for j in range(len(f)):
                if len(f) == 1:
                    continue
                g = f[:j] + f[j + 1:]
                rho = model.refinement(g, f)
                Kg = model.dual(g).complex
                for c in range(len(Kg)):
                    if Kg.dims[c] >= 1:
                        lhs = boundary(rho.apply(Kg.basis(c)))
                        rhs = rho.apply(boundary(Kg.basis(c)))
                        if lhs != rhs:
                            return f"refinement {list(g)} -> {list(f)} is not a chain map"
        return ""

    def transport():
        model.fiber_signs()
        for f in top_faces:
            model.fundamental_class(f)
        return ""

    ok = guarded("fiber-spheres", fibers)
    ok = guarded("tilings", tilings) and ok
    ok = guarded("dual-complexes", duals) and ok
    if ok:
        ok = guarded("refinements", refinements)
    else:
        rep.add("refinements", None, "needs sphere tilings")
    if ok:
        guarded("orientation-transport", transport)
    else:
        rep.add("orientation-transport", None, "needs refinements")
    return rep


@dataclass(frozen=True)
class BaseSimplexContext:
    """An oriented base (n+1)-simplex; position ``i`` in ``vertices`` is color ``i``."""

    model: BundleModel
    vertices: tuple[int, ...]

    def face(self, colors: Sequence[int]) -> Face:
        return tuple(sorted(self.vertices[i] for i in colors))

    def fiber_tiling(self, colors: Sequence[int]) -> TilingComplex:
        if not colors:
            raise EmptyTiling("empty color set")
        return self.model.tiling(self.face(colors))

    def dual_complex(self, colors: Sequence[int]) -> DualComplex:
        return self.model.dual(self.face(colors))

    def include_vertex(self, tau: Simplex, colors: Sequence[int]) -> int:
        return self.model.include_vertex(tau, self.face(colors))

    def refine_chain(self, c: RationalChain, source: Sequence[int], target: Sequence[int]) -> RationalChain:
        J, I = self.face(source), self.face(target)
        if J == I:
            return c
        return self.model.refinement(J, I).apply(c)

    def color_of(self, base_vertex: int) -> int:
        return self.vertices.index(base_vertex)


def orient_family(ctx: BaseSimplexContext) -> dict[Face, RationalChain]:
    """Fundamental classes of ``Gamma_I`` for every nonempty face of the simplex."""
    return {f: ctx.model.fundamental_class(f) for f in faces_of(ctx.vertices)}
