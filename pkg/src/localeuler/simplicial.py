"""Abstract simplicial complexes given by their facets."""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .chains import CellComplex, assign_incidence_signs
from .errors import ComplexError

Simplex = tuple[int, ...]


class SimplicialComplex:
    """Downward closure of a list of facets on vertices ``0..num_vertices-1``.

    Simplices are sorted vertex tuples.
    """

    def __init__(self, num_vertices: int, facets: Iterable[Sequence[int]]):
        self.num_vertices = num_vertices
        fs = set()
        for f in facets:
            t = tuple(sorted(int(v) for v in f))
            if len(set(t)) != len(t) or not t:
                raise ComplexError(f"bad simplex {list(f)}")
            if t[0] < 0 or t[-1] >= num_vertices:
                raise ComplexError(f"simplex {list(f)} has a vertex out of range")
            fs.add(t)
        self._given = fs

    @cached_property
    def simplices(self) -> frozenset[Simplex]:
        out = set()
        for f in self._given:
            for k in range(1, len(f) + 1):
                out.update(combinations(f, k))
        return frozenset(out)

    @cached_property
    def facets(self) -> tuple[Simplex, ...]:
        maximal = set(self._given)
        for f in self._given:
            for k in range(1, len(f)):
                for g in combinations(f, k):
                    maximal.discard(g)
        return tuple(sorted(maximal, key=lambda s: (len(s), s)))

    @cached_property
    def dim(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    def of_dim(self, d: int) -> list[Simplex]:
        return sorted(s for s in self.simplices if len(s) == d + 1)

    def __contains__(self, s) -> bool:
        return tuple(sorted(s)) in self.simplices

    def full_subcomplex(self, vertices: Iterable[int]) -> "SimplicialComplex":
        vs = set(vertices)
        return SimplicialComplex(self.num_vertices, [s for s in self.simplices if vs.issuperset(s)])

    def cell_complex(self) -> CellComplex:
        """Simplicial chain complex with the alternating-face signs."""
        cells = sorted(self.simplices, key=lambda s: (len(s), s))
        idx = {s: i for i, s in enumerate(cells)}
        faces = []
        for s in cells:
            if len(s) == 1:
                faces.append({})
            else:
                faces.append({idx[s[:k] + s[k + 1:]]: (-1) ** k for k in range(len(s))})
        return CellComplex([len(s) - 1 for s in cells], faces, cells)

    def dual_complex(self) -> CellComplex:
        """Poset-reversed cell complex of a closed pseudomanifold.

        The cell dual to simplex ``s`` has dimension ``dim - dim s`` and key ``s``.
        """
        top = self.dim
        cells = sorted(self.simplices, key=lambda s: (-len(s), s))
        idx = {s: i for i, s in enumerate(cells)}
        cof: dict[Simplex, list[int]] = {s: [] for s in cells}
        for s in cells:
            for k in range(len(s)):
                if len(s) > 1:
                    cof[s[:k] + s[k + 1:]].append(idx[s])
        return assign_incidence_signs([top + 1 - len(s) for s in cells], [cof[s] for s in cells], cells)

    def boundary_of(self, chain: dict[Simplex, object]) -> dict[Simplex, object]:
        out: dict[Simplex, object] = {}
        for s, v in chain.items():
            if len(s) == 1:
                continue
            for k in range(len(s)):
                f = s[:k] + s[k + 1:]
                out[f] = out.get(f, 0) + (-1) ** k * v
        return {f: v for f, v in out.items() if v}


def boundary_of_simplex(n: int) -> SimplicialComplex:
    """Boundary of the ``(n+1)``-simplex, a combinatorial ``n``-sphere."""
    return SimplicialComplex(n + 2, list(combinations(range(n + 2), n + 1)))


def cycle_graph(m: int) -> SimplicialComplex:
    return SimplicialComplex(m, [(i, (i + 1) % m) for i in range(m)])


def simplex(d: int) -> SimplicialComplex:
    return SimplicialComplex(d + 1, [tuple(range(d + 1))])
