"""Local cochain formulas for the rational Euler class.

Two per-tuple local values are computed on an oriented base simplex
``sigma = (v_0, ..., v_{n+1})`` for a choice of one fiber n-simplex ``V_i``
over each ``v_i``:

* ``harmonic``: iterate minimum-norm extensions up through every proper face
  and read the closed alternating sum on ``Gamma_sigma`` against its
  fundamental class;
* ``winding``: iterate extensions through faces of size ``<= n`` only, then
  close up on ``Gamma_sigma`` with averaged winding-number patches.

For ``n == 1`` the ``necklace`` closed form counts oriented multicolored bead
triples directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .bundle import BaseSimplexContext, BundleModel, DualComplex, Face
from .chains import RationalChain, boundary, chain_sum, permutation_sign
from .errors import (
    CancellationViolation,
    FormulaUnsupported,
    Inconsistent,
    NotClosedFinal,
    NotCycle,
)
from .linalg import harmonic_extension
from .simplicial import Simplex, SimplicialComplex

FORMULAS = ("harmonic", "winding", "necklace")


@dataclass(frozen=True)
class LocalValue:
    value: Fraction
    sigma: tuple[int, ...]
    tuple: tuple[Simplex, ...]
    formula: str


def dual_tree(
    K, base_cell: int, order: Sequence[int] | None = None, depth_first: bool = False
) -> dict[int, tuple[int, int]]:
    """Spanning tree of the dual graph (top cells adjacent through ridges),
    as ``child -> (parent, ridge)``.

    ``order`` ranks ridges for the neighbour visiting order; ``depth_first``
    switches from a breadth-first to a depth-first walk.
    """
    rank = {c: i for i, c in enumerate(order)} if order is not None else None

    def neighbours(a: int) -> list[tuple[int, int]]:
        out = []
        for g in sorted(K.faces[a], key=(lambda r: rank[r]) if rank else None):
            others = [b for b in K.cofaces[g] if b != a]
            if len(others) != 1:
                raise Inconsistent(f"ridge {g} does not have exactly two top cofaces")
            out.append((others[0], g))
        return out

    tree: dict[int, tuple[int, int]] = {}
    seen = {base_cell}
    if not depth_first:
        todo = deque([base_cell])
        while todo:
            a = todo.popleft()
            for b, g in neighbours(a):
                if b not in seen:
                    seen.add(b)
                    tree[b] = (a, g)
                    todo.append(b)
        return tree
    stack = [(b, base_cell, g) for b, g in reversed(neighbours(base_cell))]
    while stack:
        b, a, g = stack.pop()
        if b in seen:
            continue
        seen.add(b)
        tree[b] = (a, g)
        stack.extend((c, b, r) for c, r in reversed(neighbours(b)) if c not in seen)
    return tree


def winding_patch(
    D: DualComplex,
    sigma_chain: RationalChain,
    base_cell: int,
    order: Sequence[int] | None = None,
    tree: Mapping[int, tuple[int, int]] | None = None,
) -> RationalChain:
    """The unique top chain ``C`` with ``boundary(C) == sigma_chain`` and ``C[base_cell] == 0``.

    Coefficients are accumulated along a spanning tree of the dual graph (by
    default the breadth-first one, see :func:`dual_tree`), then every ridge is
    checked, so a non-closed input raises instead of depending on the tree.
    """
    K = D.complex
    n = K.top_dim
    if sigma_chain.dim != n - 1:
        raise Inconsistent(f"expected an {n - 1}-chain, got dimension {sigma_chain.dim}")
    if tree is None:
        tree = dual_tree(K, base_cell, order)
    children: dict[int, list[tuple[int, int]]] = {}
    for b, (a, g) in tree.items():
        children.setdefault(a, []).append((b, g))
    coeff: dict[int, Fraction] = {base_cell: Fraction(0)}
    todo = [base_cell]
    while todo:
        a = todo.pop()
        for b, g in children.get(a, ()):
            # the ridge g sees a and b: C[a]*[a:g] + C[b]*[b:g] = sigma[g]
            coeff[b] = (sigma_chain[g] - coeff[a] * K.faces[a][g]) / K.faces[b][g]
            todo.append(b)
    if len(coeff) != len(K.cells(n)):
        raise Inconsistent("spanning tree does not reach every top cell")
    for g in K.cells(n - 1):
        if sum((coeff[c] * s for c, s in K.cofaces[g].items()), Fraction(0)) != sigma_chain[g]:
            raise Inconsistent(f"winding numbers disagree across ridge {g}; input is not closed")
    return RationalChain(K, n, coeff)


def _geometric(c: RationalChain, fundamental: RationalChain, cell: int) -> Fraction:
    return c[cell] * fundamental[cell]


def winding_chain(
    D: DualComplex, sigma_chain: RationalChain, vertex: int, fundamental: RationalChain
) -> RationalChain:
    """Patch of ``sigma_chain`` whose winding numbers average to zero over the
    top cells at ``vertex``."""
    tops = D.complex.cells(D.complex.top_dim)
    C = winding_patch(D, sigma_chain, tops[0])
    around = D.top_cells_at(vertex)
    mean = sum((_geometric(C, fundamental, c) for c in around), Fraction(0)) / len(around)
    return C - fundamental * mean


def _coefficient(chain: RationalChain, fundamental: RationalChain) -> Fraction:
    """Ratio of a closed top chain to the fundamental class (checked on every cell)."""
    cells = chain.complex.cells(chain.complex.top_dim)
    ratio = _geometric(chain, fundamental, cells[0])
    for c in cells:
        if _geometric(chain, fundamental, c) != ratio:
            raise NotClosedFinal("closed top chain is not proportional to the fundamental class")
    return ratio


class EulerEngine:
    """Local values for one bundle, with per-face chain caching.

    The cache key of an extension chain is the ordered face together with the
    tuple entries over it, so chains are shared by every simplex containing
    that face.
    """

    def __init__(self, model: BundleModel):
        self.model = model
        self._sigma_cache: dict[tuple[Face, tuple[Simplex, ...]], RationalChain] = {}
        self.cancellation_checks = 0

    @property
    def n(self) -> int:
        return self.model.n

    def context(self, sigma: Sequence[int]) -> BaseSimplexContext:
        return BaseSimplexContext(self.model, tuple(sigma))

    def vertex_tuples(self, sigma: Sequence[int]) -> Iterable[tuple[Simplex, ...]]:
        return product(*(self.model.fiber_vertices(v) for v in sigma))

    def _refine(self, c: RationalChain, src: Sequence[int], dst: Sequence[int]) -> RationalChain:
        J, I = tuple(sorted(src)), tuple(sorted(dst))
        if J == I:
            return c
        return self.model.refinement(J, I).apply(c)

    def extension_chain(self, face: tuple[int, ...], vs: tuple[Simplex, ...]) -> RationalChain:
        """Chain over an ordered face: the chosen vertex for one base vertex,
        otherwise the minimum-norm extension of the alternating sum of the
        chains over its facets, all taken in ``Gamma_face``."""
        key = (face, vs)
        if key in self._sigma_cache:
            return self._sigma_cache[key]
        if len(face) == 1:
            D = self.model.dual(face)
            out = D.complex.basis(D.complex.index[vs[0]])
        else:
            out = harmonic_extension(self.alternating_boundary(face, vs))
        self._sigma_cache[key] = out
        return out

    def alternating_boundary(self, face: tuple[int, ...], vs: tuple[Simplex, ...]) -> RationalChain:
        K = self.model.dual(face).complex
        terms = []
        for m in range(len(face)):
            sub, sub_vs = face[:m] + face[m + 1:], vs[:m] + vs[m + 1:]
            terms.append(self._refine(self.extension_chain(sub, sub_vs), sub, face) * (-1) ** m)
        return chain_sum(terms, K, len(face) - 2)

    def local_value_formula1(self, sigma: Sequence[int], vs: Sequence[Simplex]) -> LocalValue:
        sigma, vs = tuple(sigma), tuple(tuple(sorted(v)) for v in vs)
        if len(sigma) != self.n + 2:
            raise FormulaUnsupported(f"need an {self.n + 1}-simplex")
        final = self.alternating_boundary(sigma, vs)
        if boundary(final):
            raise NotClosedFinal(f"alternating sum over {list(sigma)} is not closed")
        e = _coefficient(final, self.model.fundamental_class(sigma))
        return LocalValue(e, sigma, vs, "harmonic")

    def hat_chains(self, sigma: tuple[int, ...], vs: tuple[Simplex, ...]) -> list[RationalChain]:
        """``(-1)^i`` times the alternating boundary of the i-th facet, refined to ``Gamma_sigma``.

        The extra ``(-1)^i`` makes the plain sum over ``i`` vanish.
        """
        out = []
        for i in range(len(sigma)):
            sub, sub_vs = sigma[:i] + sigma[i + 1:], vs[:i] + vs[i + 1:]
            out.append(self._refine(self.alternating_boundary(sub, sub_vs), sub, sigma) * (-1) ** i)
        return out

    def local_value_formula2(self, sigma: Sequence[int], vs: Sequence[Simplex]) -> LocalValue:
        sigma, vs = tuple(sigma), tuple(tuple(sorted(v)) for v in vs)
        n = self.n
        if len(sigma) != n + 2:
            raise FormulaUnsupported(f"need an {n + 1}-simplex")
        D = self.model.dual(sigma)
        K = D.complex
        fund = self.model.fundamental_class(sigma)
        hats = self.hat_chains(sigma, vs)
        self.cancellation_checks += 1
        if chain_sum(hats, K, n - 1):
            raise CancellationViolation(f"facet chains over {list(sigma)} do not cancel")
        beads = [self.model.include_vertex(v, sigma) for v in vs]
        terms = []
        for i, hat in enumerate(hats):
            for j in range(len(sigma)):
                if j != i:
                    terms.append(winding_chain(D, hat, beads[j], fund))
        total = chain_sum(terms, K, n) * Fraction(1, n + 1)
        if boundary(total):
            raise NotClosedFinal(f"averaged winding chain over {list(sigma)} is not closed")
        return LocalValue(_coefficient(total, fund), sigma, vs, "winding")

    def necklace_value(self, sigma: Sequence[int]) -> Fraction:
        if self.n != 1:
            raise FormulaUnsupported("the necklace formula needs circle fibers")
        sigma = tuple(sigma)
        order, colors = necklace(self.model, sigma)
        return necklace_formula(order, colors)

    def simplex_value(self, sigma: Sequence[int], formula: str) -> Fraction:
        """Average local value over all vertex tuples of the oriented simplex."""
        if formula == "necklace":
            return self.necklace_value(sigma)
        fn = {"harmonic": self.local_value_formula1, "winding": self.local_value_formula2}.get(formula)
        if fn is None:
            raise FormulaUnsupported(f"unknown formula {formula!r}")
        total, count = Fraction(0), 0
        for vs in self.vertex_tuples(sigma):
            total += fn(sigma, vs).value
            count += 1
        return total / count


def necklace(model: BundleModel, sigma: tuple[int, ...]) -> tuple[list[int], dict[int, int]]:
    """Vertices of the circle ``Gamma_sigma`` in positive cyclic order, and
    the color (position in ``sigma``) of each colored vertex."""
    D = model.dual(sigma)
    K = D.complex
    fund = model.fundamental_class(sigma)
    succ = {}
    for e in K.cells(1):
        ends = K.faces[e]
        head = next(v for v, s in ends.items() if s == fund[e])
        tail = next(v for v in ends if v != head)
        succ[tail] = head
    start = min(K.cells(0))
    order, v = [start], succ[start]
    while v != start:
        order.append(v)
        v = succ[v]
    colors = {v: sigma.index(u) for v, u in D.colors.items()}
    return order, colors


def necklace_formula(order: Sequence, colors: Mapping) -> Fraction:
    """``(neg - pos) / (2 * #red * #blue * #green)`` for a cyclic bead sequence.

    A triple is positive when, walking forward from its color-0 bead, its
    color-1 bead comes before its color-2 bead.
    """
    pos = {v: i for i, v in enumerate(order)}
    beads = [[v for v in order if colors.get(v) == c] for c in range(3)]
    if not all(beads):
        raise FormulaUnsupported("necklace lacks a color")
    L = len(order)
    n_pos = n_neg = 0
    for r in beads[0]:
        for b in beads[1]:
            db = (pos[b] - pos[r]) % L
            for g in beads[2]:
                if db < (pos[g] - pos[r]) % L:
                    n_pos += 1
                else:
                    n_neg += 1
    return Fraction(n_neg - n_pos, 2 * len(beads[0]) * len(beads[1]) * len(beads[2]))


@dataclass
class EulerCochain:
    """Values keyed by the sorted base simplex; ``order`` holds the oriented
    vertex order each value refers to."""

    values: dict[Simplex, Fraction]
    order: dict[Simplex, tuple[int, ...]]
    formula: str

    def value(self, oriented: Sequence[int]) -> Fraction:
        """Value on a simplex given with an arbitrary vertex order."""
        key = tuple(sorted(oriented))
        rel = permutation_sign(list(self.order[key])) * permutation_sign(list(oriented))
        return rel * self.values[key]

    def items(self):
        for key in sorted(self.values):
            yield self.order[key], self.values[key]


def _simplex_task(args):
    bundle, sigma, formula = args
    return EulerEngine(BundleModel(bundle)).simplex_value(sigma, formula)


def euler_cochain(
    model: BundleModel, formula: str = "winding", engine: EulerEngine | None = None, jobs: int = 1
) -> EulerCochain:
    """Cochain on every (n+1)-simplex of the base.

    Local values are computed on the sorted vertex order (so face chains are
    shared across simplices) and then signed by the stored orientation.
    """
    if formula not in FORMULAS:
        raise FormulaUnsupported(f"unknown formula {formula!r}")
    if formula == "necklace" and model.n != 1:
        raise FormulaUnsupported("the necklace formula needs circle fibers (n = 1)")
    b = model.bundle
    model.fiber_signs()
    engine = engine or EulerEngine(model)
    simplices = b.top_simplices()
    if jobs > 1 and len(simplices) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_simplex_task, [(b, s, formula) for s in simplices]))
    else:
        raw = [engine.simplex_value(s, formula) for s in simplices]
    values, order = {}, {}
    for s, v in zip(simplices, raw):
        oriented = b.oriented(s)
        order[s] = oriented
        values[s] = v * permutation_sign(list(oriented))
    return EulerCochain(values, order, formula)


def pair(e: EulerCochain, cycle: Mapping[Sequence[int], object], base: SimplicialComplex) -> Fraction:
    """Evaluate the cochain on a rational cycle given as oriented simplex -> coefficient."""
    chain: dict[Simplex, Fraction] = {}
    for s, c in cycle.items():
        key = tuple(sorted(s))
        chain[key] = chain.get(key, 0) + Fraction(c) * permutation_sign(list(s))
    chain = {s: c for s, c in chain.items() if c}
    for s in chain:
        if s not in base.simplices:
            raise NotCycle(f"{list(s)} is not a simplex of the base")
    if base.boundary_of(chain):
        raise NotCycle("chain has nonzero boundary")
    total = Fraction(0)
    for s, c in sorted(chain.items()):
        if s not in e.values:
            raise NotCycle(f"cochain has no value on {list(s)}")
        total += c * e.value(s)
    return total


@dataclass
class CoboundaryReport:
    values: dict[Simplex, Fraction]

    @property
    def ok(self) -> bool:
        return not any(self.values.values())

    def nonzero(self) -> list[Simplex]:
        return sorted(s for s, v in self.values.items() if v)


def coboundary_check(e: EulerCochain, base: SimplicialComplex, n: int) -> CoboundaryReport:
    """Evaluate the coboundary of ``e`` on every (n+2)-simplex of the base."""
    out = {}
    for tau in base.of_dim(n + 2):
        out[tau] = sum((e.value(tau[:m] + tau[m + 1:]) * (-1) ** m for m in range(len(tau))), Fraction(0))
    return CoboundaryReport(out)
