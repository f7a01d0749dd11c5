"""Regular cell complexes as signed graded posets, and exact rational chains.

A :class:`CellComplex` stores, for each cell, its dimension and a map from its
codimension-one faces to incidence numbers in {+1, -1}.  Cells are opaque
integers ``0..len-1``; an optional ``keys`` tuple attaches a hashable label to
every cell (the simplex a cell came from, for instance).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import (
    ComplexError,
    DiamondViolation,
    DimensionTop,
    DimensionZero,
    NotOrientable,
    NotPseudomanifold,
    SignInconsistency,
)


class CellComplex:
    def __init__(
        self,
        dims: Sequence[int],
        faces: Sequence[Mapping[int, int]],
        keys: Sequence[Hashable] | None = None,
    ):
        if len(dims) != len(faces):
            raise ComplexError("dims and faces differ in length")
        self.dims = tuple(int(d) for d in dims)
        self.faces = tuple(dict(f) for f in faces)
        self.keys = tuple(keys) if keys is not None else tuple(range(len(dims)))
        for c, fs in enumerate(self.faces):
            for f, s in fs.items():
                if self.dims[f] != self.dims[c] - 1:
                    raise ComplexError(f"covering pair ({f}, {c}) skips a dimension")
                if s not in (1, -1):
                    raise ComplexError(f"incidence [{c}:{f}] = {s} is not a sign")

    def __len__(self) -> int:
        return len(self.dims)

    def __repr__(self) -> str:
        counts = [len(self.cells(d)) for d in range(self.top_dim + 1)]
        return f"CellComplex(f-vector={counts})"

    @cached_property
    def top_dim(self) -> int:
        return max(self.dims, default=-1)

    @cached_property
    def _by_dim(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for c, d in enumerate(self.dims):
            out.setdefault(d, []).append(c)
        return {d: tuple(cs) for d, cs in out.items()}

    def cells(self, dim: int) -> tuple[int, ...]:
        return self._by_dim.get(dim, ())

    @cached_property
    def cofaces(self) -> tuple[dict[int, int], ...]:
        out: list[dict[int, int]] = [{} for _ in self.dims]
        for c, fs in enumerate(self.faces):
            for f, s in fs.items():
                out[f][c] = s
        return tuple(out)

    @cached_property
    def index(self) -> dict[Hashable, int]:
        return {k: i for i, k in enumerate(self.keys)}

    def incidence(self, upper: int, lower: int) -> int:
        return self.faces[upper].get(lower, 0)

    def chain(self, dim: int, coeffs: Mapping[int, object] | None = None) -> "RationalChain":
        return RationalChain(self, dim, coeffs or {})

    def basis(self, cell: int, coeff=1) -> "RationalChain":
        return RationalChain(self, self.dims[cell], {cell: coeff})


def assign_incidence_signs(
    dims: Sequence[int],
    faces: Sequence[Iterable[int]],
    keys: Sequence[Hashable] | None = None,
) -> CellComplex:
    """Turn an unsigned graded poset into a signed regular cell complex.

    Edges get ``-1`` on their lower-numbered endpoint.  For a cell of dimension
    ``p >= 2`` the first face gets ``+1`` and the rest are forced by walking
    across diamonds, so that every diamond has sign product ``-1``.
    """
    face_sets = [sorted(set(f)) for f in faces]
    signed: list[dict[int, int]] = [{} for _ in dims]
    order = sorted(range(len(dims)), key=lambda c: (dims[c], c))
    for c in order:
        fs = face_sets[c]
        p = dims[c]
        if p == 0:
            if fs:
                raise ComplexError(f"vertex {c} has faces")
            continue
        if p == 1:
            if len(fs) != 2:
                raise DiamondViolation(f"edge {c} has {len(fs)} endpoints")
            signed[c] = {fs[0]: -1, fs[1]: 1}
            continue
        if not fs:
            raise DiamondViolation(f"cell {c} of dimension {p} has no faces")
        # (p-2)-cell -> faces of c containing it
        through: dict[int, list[int]] = {}
        for f in fs:
            for g in face_sets[f]:
                through.setdefault(g, []).append(f)
        for g, mids in through.items():
            if len(mids) != 2:
                raise DiamondViolation(f"interval ({g}, {c}) has {len(mids)} middle cells")
        sign = {fs[0]: 1}
        queue = deque([fs[0]])
        while queue:
            f1 = queue.popleft()
            for g in face_sets[f1]:
                a, b = through[g]
                f2 = b if a == f1 else a
                want = -sign[f1] * signed[f1][g] * signed[f2][g]
                if f2 not in sign:
                    sign[f2] = want
                    queue.append(f2)
                elif sign[f2] != want:
                    raise SignInconsistency(f"no consistent signs on the boundary of cell {c}")
        if len(sign) != len(fs):
            raise SignInconsistency(f"boundary of cell {c} is not connected through diamonds")
        signed[c] = sign
    return CellComplex(dims, signed, keys)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalChain:
    """Sparse chain with exact rational coefficients on cells of one dimension."""

    __slots__ = ("complex", "dim", "coeffs")

    def __init__(self, complex: CellComplex, dim: int, coeffs: Mapping[int, object]):
        self.complex = complex
        self.dim = dim
        clean: dict[int, Fraction] = {}
        for c, v in coeffs.items():
            v = _frac(v)
            if v:
                if complex.dims[c] != dim:
                    raise ComplexError(f"cell {c} has dimension {complex.dims[c]}, not {dim}")
                clean[c] = v
        self.coeffs = clean

    def __repr__(self) -> str:
        body = ", ".join(f"{c}: {v}" for c, v in sorted(self.coeffs.items()))
        return f"RationalChain(dim={self.dim}, {{{body}}})"

    def __getitem__(self, cell: int) -> Fraction:
        return self.coeffs.get(cell, Fraction(0))

    def __iter__(self):
        return iter(sorted(self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _check(self, other: "RationalChain") -> None:
        if other.complex is not self.complex or other.dim != self.dim:
            raise ComplexError("chains live on different complexes or dimensions")

    def __add__(self, other: "RationalChain") -> "RationalChain":
        self._check(other)
        out = dict(self.coeffs)
        for c, v in other.coeffs.items():
            out[c] = out.get(c, 0) + v
        return RationalChain(self.complex, self.dim, out)

    def __sub__(self, other: "RationalChain") -> "RationalChain":
        return self + (-other)

    def __neg__(self) -> "RationalChain":
        return RationalChain(self.complex, self.dim, {c: -v for c, v in self.coeffs.items()})

    def __mul__(self, scalar) -> "RationalChain":
        s = _frac(scalar)
        return RationalChain(self.complex, self.dim, {c: s * v for c, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalChain):
            return NotImplemented
        return (
            other.complex is self.complex and other.dim == self.dim and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((id(self.complex), self.dim, frozenset(self.coeffs.items())))

    def dot(self, other: "RationalChain") -> Fraction:
        self._check(other)
        small, big = sorted((self.coeffs, other.coeffs), key=len)
        return sum((v * big[c] for c, v in small.items() if c in big), Fraction(0))


def chain_sum(chains: Iterable[RationalChain], complex: CellComplex, dim: int) -> RationalChain:
    out: dict[int, Fraction] = {}
    for ch in chains:
        if ch.complex is not complex or ch.dim != dim:
            raise ComplexError("chains live on different complexes or dimensions")
        for c, v in ch.coeffs.items():
            out[c] = out.get(c, 0) + v
    return RationalChain(complex, dim, out)


def boundary(c: RationalChain) -> RationalChain:
    if c.dim == 0:
        raise DimensionZero("boundary of a 0-chain")
    K = c.complex
    out: dict[int, Fraction] = {}
    for cell, v in c.coeffs.items():
        for f, s in K.faces[cell].items():
            out[f] = out.get(f, 0) + s * v
    return RationalChain(K, c.dim - 1, out)


def coboundary(c: RationalChain) -> RationalChain:
    """Adjoint of :func:`boundary` for the cell-orthonormal inner product."""
    K = c.complex
    if c.dim >= K.top_dim:
        raise DimensionTop(f"coboundary of a {c.dim}-chain on a {K.top_dim}-complex")
    out: dict[int, Fraction] = {}
    for cell, v in c.coeffs.items():
        for u, s in K.cofaces[cell].items():
            out[u] = out.get(u, 0) + s * v
    return RationalChain(K, c.dim + 1, out)


@dataclass(frozen=True)
class OrientationClass:
    signs: dict[int, int]
    reference_cell: int

    def flipped(self) -> "OrientationClass":
        return OrientationClass({c: -s for c, s in self.signs.items()}, self.reference_cell)


def _ridge_cofaces(K: CellComplex) -> dict[int, list[int]]:
    top = K.top_dim
    out = {}
    for g in K.cells(top - 1):
        ups = sorted(K.cofaces[g])
        if len(ups) != 2:
            raise NotPseudomanifold(f"cell {g} has {len(ups)} top-dimensional cofaces")
        out[g] = ups
    return out


def orient(
    K: CellComplex, reference_cell: int | None = None, reference_sign: int = 1
) -> OrientationClass:
    """Coherent orientation of a closed connected pseudomanifold.

    The reference cell (default: the first top cell) is pinned to
    ``reference_sign``; everything else is forced.
    """
    top = K.top_dim
    tops = K.cells(top)
    if not tops:
        raise NotPseudomanifold("empty complex")
    ridges = _ridge_cofaces(K)
    ref = tops[0] if reference_cell is None else reference_cell
    if K.dims[ref] != top:
        raise ComplexError(f"reference cell {ref} is not top-dimensional")
    sign = {ref: reference_sign}
    queue = deque([ref])
    while queue:
        a = queue.popleft()
        for g, s_ag in sorted(K.faces[a].items()):
            x, y = ridges[g]
            b = y if x == a else x
            want = -sign[a] * s_ag * K.faces[b][g]
            if b not in sign:
                sign[b] = want
                queue.append(b)
            elif sign[b] != want:
                raise NotOrientable(f"orientation flips around ridge {g}")
    if len(sign) != len(tops):
        raise ComplexError("complex is not connected through ridges")
    return OrientationClass(sign, ref)


def fundamental_class(K: CellComplex, orientation: OrientationClass | None = None) -> RationalChain:
    if orientation is None:
        orientation = orient(K)
    return RationalChain(K, K.top_dim, orientation.signs)


@dataclass
class ValidationReport:
    checks: list[tuple[str, bool | None, str]] = field(default_factory=list)

    def add(self, name: str, passed: bool | None, detail: str = "") -> None:
        self.checks.append((name, passed, detail))

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        for name, passed, detail in other.checks:
            self.add(prefix + name, passed, detail)

    @property
    def ok(self) -> bool:
        return all(p is not False for _, p, _ in self.checks)

    def failed(self) -> list[str]:
        return [name for name, p, _ in self.checks if p is False]

    def get(self, name: str) -> bool | None:
        for n, p, _ in self.checks:
            if n == name:
                return p
        raise KeyError(name)

    def lines(self) -> list[str]:
        out = []
        for name, p, detail in self.checks:
            status = {True: "PASS", False: "FAIL", None: "SKIP"}[p]
            out.append(f"{name}: {status}" + (f" ({detail})" if detail else ""))
        return out


def _is_single_cycle(nodes: set, arcs: list[tuple]) -> bool:
    if not nodes or len(arcs) != len(nodes):
        return False
    adj: dict = {v: [] for v in nodes}
    for a, b in arcs:
        if a == b or a not in adj or b not in adj:
            return False
        adj[a].append(b)
        adj[b].append(a)
    if any(len(v) != 2 for v in adj.values()):
        return False
    start = next(iter(nodes))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(nodes)


def _check_diamonds(K: CellComplex) -> str:
    for c in range(len(K)):
        p = K.dims[c]
        if p == 1 and len(K.faces[c]) != 2:
            return f"edge {c} has {len(K.faces[c])} endpoints"
        if p >= 2:
            count: dict[int, int] = {}
            for f in K.faces[c]:
                for g in K.faces[f]:
                    count[g] = count.get(g, 0) + 1
            for g, m in count.items():
                if m != 2:
                    return f"interval ({g}, {c}) has {m} middle cells"
    return ""


def _check_links(K: CellComplex) -> str:
    top = K.top_dim
    if top == 1:
        for v in K.cells(0):
            if len(K.cofaces[v]) != 2:
                return f"vertex {v} has {len(K.cofaces[v])} edges"
        return ""
    for c in K.cells(2):
        edges = list(K.faces[c])
        verts = {v for e in edges for v in K.faces[e]}
        if not _is_single_cycle(verts, [tuple(K.faces[e]) for e in edges]):
            return f"boundary of 2-cell {c} is not a circle"
    for v in K.cells(0):
        edges = set(K.cofaces[v])
        by_face: dict[int, list[int]] = {}
        for e in edges:
            for c in K.cofaces[e]:
                by_face.setdefault(c, []).append(e)
        if any(len(es) != 2 for es in by_face.values()):
            return f"a 2-cell meets vertex {v} in a non-corner"
        if not _is_single_cycle(edges, [tuple(es) for es in by_face.values()]):
            return f"link of vertex {v} is not a circle"
    return ""


def validate_complex(K: CellComplex) -> ValidationReport:
    """Necessary conditions for a closed combinatorial manifold.

    Link checks are only performed when the top dimension is at most 2 and are
    reported as SKIP otherwise.
    """
    rep = ValidationReport()
    msg = _check_diamonds(K)
    rep.add("diamond", not msg, msg)

    bad = ""
    for c in range(len(K)):
        if K.dims[c] >= 2 and boundary(boundary(K.basis(c))):
            bad = f"boundary(boundary({c})) != 0"
            break
    rep.add("boundary-squared", not bad, bad)

    top = K.top_dim
    pseudo = True
    detail = ""
    try:
        _ridge_cofaces(K)
    except NotPseudomanifold as exc:
        pseudo, detail = False, str(exc)
    if top <= 0:
        pseudo, detail = False, "no ridges"
    rep.add("pseudomanifold", pseudo, detail)

    # connectedness of the 1-skeleton
    verts = K.cells(0)
    connected = bool(verts)
    if verts:
        adj: dict[int, list[int]] = {v: [] for v in verts}
        for e in K.cells(1):
            a, b = list(K.faces[e])[:2] if len(K.faces[e]) == 2 else (None, None)
            if a is not None:
                adj[a].append(b)
                adj[b].append(a)
        seen, stack = {verts[0]}, [verts[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        connected = len(seen) == len(verts)
    rep.add("connected", connected, "" if connected else "1-skeleton has several components")

    if pseudo and connected:
        try:
            orient(K)
            rep.add("orientable", True)
        except (NotOrientable, ComplexError) as exc:
            rep.add("orientable", False, str(exc))
    else:
        rep.add("orientable", None, "needs a connected pseudomanifold")

    if top > 2:
        rep.add("links", None, f"not checked in dimension {top}")
    elif not (pseudo and not msg):
        rep.add("links", None, "needs diamonds and pseudomanifold")
    else:
        link_msg = _check_links(K)
        rep.add("links", not link_msg, link_msg)
    return rep


def permutation_sign(seq: Sequence) -> int:
    """Sign of the permutation that sorts ``seq`` (distinct items)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign
