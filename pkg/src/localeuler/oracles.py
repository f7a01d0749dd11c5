"""Independent check of the circle-bundle local value by averaging section degrees.

For ``n == 1`` the complex over a base triangle is a circle (the necklace).  A
tuple picks one bead per color; a section of the boundary of the triangle runs
from bead 0 to bead 1 to bead 2 and back, choosing on each side either the
forward arc or the backward one.  The eight resulting loops are closed 1-chains
whose coefficients against the fundamental class are their degrees.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Sequence

from .bundle import BaseSimplexContext
from .chains import RationalChain, boundary, chain_sum
from .errors import FormulaUnsupported, Inconsistent
from .simplicial import Simplex


def forward_arc(fund: RationalChain, start: int, end: int) -> RationalChain:
    """Edges met walking the circle in the positive direction from ``start`` to ``end``."""
    K = fund.complex
    step = {}
    for e in K.cells(1):
        ends = K.faces[e]
        head = next(v for v, s in ends.items() if s == fund[e])
        tail = next(v for v in ends if v != head)
        step[tail] = (e, head)
    coeffs: dict[int, Fraction] = {}
    v = start
    while True:
        e, v = step[v]
        coeffs[e] = fund[e]
        if v == end:
            return RationalChain(K, 1, coeffs)
        if v == start:
            raise Inconsistent("end bead is not on the circle")


def section_degrees(ctx: BaseSimplexContext, vs: Sequence[Simplex]) -> list[Fraction]:
    """Degrees of the eight section loops, in the order of the arc choices
    (forward/backward per side, sides 01, 12, 20)."""
    if ctx.model.n != 1 or len(ctx.vertices) != 3:
        raise FormulaUnsupported("section oracle needs circle fibers over a triangle")
    colors = (0, 1, 2)
    D = ctx.dual_complex(colors)
    K = D.complex
    fund = ctx.model.fundamental_class(ctx.face(colors))
    beads = [ctx.include_vertex(tuple(sorted(v)), colors) for v in vs]
    sides = [(0, 1), (1, 2), (2, 0)]
    arcs = []
    for i, j in sides:
        fwd = forward_arc(fund, beads[i], beads[j])
        arcs.append((fwd, fwd - fund))
    out = []
    top = K.cells(1)
    for choice in product((0, 1), repeat=3):
        loop = chain_sum([arcs[k][c] for k, c in enumerate(choice)], K, 1)
        if boundary(loop):
            raise Inconsistent("section loop is not closed")
        ratios = {loop[e] / fund[e] for e in top}
        if len(ratios) != 1:
            raise Inconsistent("section loop is not a multiple of the fundamental class")
        out.append(ratios.pop())
    return out


def n1_section_oracle(ctx: BaseSimplexContext, vs: Sequence[Simplex]) -> Fraction:
    """Average degree over the eight sections for one bead per color."""
    degs = section_degrees(ctx, vs)
    return sum(degs, Fraction(0)) / len(degs)
