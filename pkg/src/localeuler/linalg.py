"""Exact sparse linear algebra over the rationals.

Elimination is fraction-free: rational rows are scaled to integer rows, and
every update ``r <- p*r - q*pivot`` is followed by division by the row content.
Pivots are taken in input-row order, which makes every result reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Sequence

from .chains import CellComplex, RationalChain, ValidationReport, boundary, validate_complex
from .errors import BadDimension, NotClosed, NotExact


@dataclass(frozen=True)
class SparseRationalMatrix:
    rows: int
    cols: int
    entries: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        clean = {k: Fraction(v) for k, v in self.entries.items() if v}
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, rc: tuple[int, int]) -> Fraction:
        return self.entries.get(rc, Fraction(0))

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseRationalMatrix":
        return SparseRationalMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def __matmul__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        right = other.row_dicts()
        out: dict[tuple[int, int], Fraction] = {}
        for (r, k), v in self.entries.items():
            for c, w in right[k].items():
                out[r, c] = out.get((r, c), 0) + v * w
        return SparseRationalMatrix(self.rows, other.cols, out)

    def __add__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return SparseRationalMatrix(self.rows, self.cols, out)

    def is_symmetric(self) -> bool:
        return all(self.entries.get((c, r), 0) == v for (r, c), v in self.entries.items())

    def to_dense(self) -> list[list[Fraction]]:
        m = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            m[r][c] = v
        return m


def _integer_row(row: Mapping[int, Fraction], b: Fraction) -> tuple[dict[int, int], int]:
    den = lcm(*(Fraction(v).denominator for v in row.values()), Fraction(b).denominator)
    return {c: int(v * den) for c, v in row.items() if v}, int(b * den)


def _normalize(row: dict[int, int], b: int) -> tuple[dict[int, int], int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
    g = gcd(g, b)
    if g > 1:
        row = {c: v // g for c, v in row.items()}
        b //= g
    return row, b


def _combine(r: dict[int, int], rb: int, p_row: dict[int, int], pb: int, col: int):
    """Return ``p*r - q*p_row`` with ``p, q`` chosen to clear ``col``."""
    p, q = p_row[col], r[col]
    g = gcd(p, q)
    p, q = p // g, q // g
    out = {c: p * v for c, v in r.items()}
    for c, v in p_row.items():
        w = out.get(c, 0) - q * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return _normalize(out, p * rb - q * pb)


class Eliminator:
    """Incremental Gauss-Jordan reduction of integer rows with right-hand sides."""

    def __init__(self):
        self.pivot_rows: dict[int, tuple[dict[int, int], int]] = {}
        self.inconsistent = False

    def add(self, row: Mapping[int, Fraction], b=0) -> bool:
        r, rb = _integer_row(row, Fraction(b))
        for col in sorted(c for c in r if c in self.pivot_rows):
            if col in r:
                r, rb = _combine(r, rb, *self.pivot_rows[col], col)
        if not r:
            if rb:
                self.inconsistent = True
            return False
        col = min(r)
        if r[col] < 0:
            r, rb = {c: -v for c, v in r.items()}, -rb
        for pc, (prow, pb) in list(self.pivot_rows.items()):
            if col in prow:
                self.pivot_rows[pc] = _combine(prow, pb, r, rb, col)
        self.pivot_rows[col] = (r, rb)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def particular_solution(self) -> dict[int, Fraction]:
        """Solution with every free variable set to zero."""
        return {col: Fraction(b, row[col]) for col, (row, b) in self.pivot_rows.items() if b}


def rank(m: SparseRationalMatrix) -> int:
    el = Eliminator()
    rows = m.row_dicts() if m.rows <= m.cols else m.transpose().row_dicts()
    for r in rows:
        if r:
            el.add(r)
    return el.rank


def solve(m: SparseRationalMatrix, rhs: Sequence[Fraction]) -> dict[int, Fraction] | None:
    """One exact solution of ``m x = rhs`` (free variables zero), or None."""
    el = Eliminator()
    for r, b in zip(m.row_dicts(), rhs):
        el.add(r, b)
        if el.inconsistent:
            return None
    return el.particular_solution()


def boundary_matrix(K: CellComplex, k: int) -> SparseRationalMatrix:
    """Matrix of the boundary from k-cells to (k-1)-cells in local cell order."""
    lower = {c: i for i, c in enumerate(K.cells(k - 1))}
    upper = K.cells(k)
    entries = {}
    for j, c in enumerate(upper):
        for f, s in K.faces[c].items():
            entries[lower[f], j] = Fraction(s)
    return SparseRationalMatrix(len(lower), len(upper), entries)


def _check_dim(K: CellComplex, k: int) -> None:
    if not 0 <= k <= K.top_dim:
        raise BadDimension(f"k={k} outside 0..{K.top_dim}")


def _weight_diag(K: CellComplex, k: int, weights, inverse: bool) -> SparseRationalMatrix:
    cells = K.cells(k)
    vals = {}
    for i, c in enumerate(cells):
        w = Fraction(1) if weights is None else Fraction(weights.get(c, 1))
        if w <= 0:
            raise ValueError(f"cell weight must be positive, got {w} on {c}")
        vals[i, i] = 1 / w if inverse else w
    return SparseRationalMatrix(len(cells), len(cells), vals)


@dataclass(frozen=True)
class LaplacianOperator:
    complex: CellComplex
    dim: int
    matrix: SparseRationalMatrix
    weights: Mapping[int, Fraction] | None = None

    @property
    def cells(self) -> tuple[int, ...]:
        return self.complex.cells(self.dim)

    def kernel_dim(self) -> int:
        return self.matrix.rows - rank(self.matrix)

    def apply(self, c: RationalChain) -> RationalChain:
        out: dict[int, Fraction] = {}
        for (r, col), v in self.matrix.entries.items():
            x = c[self.cells[col]]
            if x:
                out[self.cells[r]] = out.get(self.cells[r], 0) + v * x
        return RationalChain(self.complex, self.dim, out)


def laplacian(K: CellComplex, k: int, weights: Mapping[int, object] | None = None) -> LaplacianOperator:
    """``d*d + dd*`` on k-chains.

    ``weights`` (experimental) gives each cell a positive squared length; the
    adjoint is then taken for that inner product and the matrix is no longer
    symmetric, only self-adjoint.
    """
    _check_dim(K, k)
    n = len(K.cells(k))
    total = SparseRationalMatrix(n, n, {})
    if k >= 1:
        d = boundary_matrix(K, k)
        adj = _weight_diag(K, k, weights, True) @ d.transpose() @ _weight_diag(K, k - 1, weights, False)
        total = total + adj @ d
    if k + 1 <= K.top_dim:
        d = boundary_matrix(K, k + 1)
        adj = _weight_diag(K, k + 1, weights, True) @ d.transpose() @ _weight_diag(K, k, weights, False)
        total = total + d @ adj
    return LaplacianOperator(K, k, total, dict(weights) if weights else None)


def betti(K: CellComplex, k: int) -> int:
    _check_dim(K, k)
    n = len(K.cells(k))
    r_k = rank(boundary_matrix(K, k)) if k >= 1 else 0
    r_up = rank(boundary_matrix(K, k + 1)) if k + 1 <= K.top_dim else 0
    return n - r_k - r_up


def betti_numbers(K: CellComplex) -> list[int]:
    return [betti(K, k) for k in range(K.top_dim + 1)]


def harmonic_extension(a: RationalChain, weights: Mapping[int, object] | None = None) -> RationalChain:
    """Minimum-norm chain ``x`` with ``boundary(x) == a``.

    Solves ``d W^-1 d^T y = a`` and returns ``x = W^-1 d^T y``; ``x`` lies in the
    image of the adjoint, hence is orthogonal to every cycle.  Works in the top
    dimension too, where the Laplacian is singular.
    """
    K = a.complex
    k = a.dim
    if k >= K.top_dim:
        raise BadDimension(f"cannot extend a {k}-chain on a {K.top_dim}-complex")
    if k >= 1 and boundary(a):
        raise NotClosed("chain has nonzero boundary")
    if not a:
        return RationalChain(K, k + 1, {})
    inv_w = {}
    for c in K.cells(k + 1):
        w = Fraction(1) if weights is None else Fraction(weights.get(c, 1))
        inv_w[c] = 1 / w
    # normal equations over k-cells: M[f][g] = sum_c [c:f][c:g] / w_c
    rows: dict[int, dict[int, Fraction]] = {f: {} for f in K.cells(k)}
    for c in K.cells(k + 1):
        fs = K.faces[c]
        for f, s in fs.items():
            row = rows[f]
            for g, t in fs.items():
                row[g] = row.get(g, 0) + s * t * inv_w[c]
    el = Eliminator()
    for f in K.cells(k):
        el.add(rows[f], a[f])
        if el.inconsistent:
            raise NotExact("chain is closed but not a boundary")
    y = el.particular_solution()
    x: dict[int, Fraction] = {}
    for f, v in y.items():
        for c, s in K.cofaces[f].items():
            x[c] = x.get(c, 0) + s * v * inv_w[c]
    out = RationalChain(K, k + 1, x)
    if boundary(out) != a:
        raise NotExact("normal equations solved but boundary does not match")
    return out


def validate_sphere(K: CellComplex, n: int | None = None) -> ValidationReport:
    """:func:`validate_complex` plus the rational homology of a sphere."""
    rep = validate_complex(K)
    top = K.top_dim if n is None else n
    if K.top_dim != top:
        rep.add("sphere-homology", False, f"top dimension {K.top_dim}, expected {top}")
        return rep
    bs = betti_numbers(K)
    want = [1] + [0] * (top - 1) + [1] if top > 0 else [2]
    rep.add("sphere-homology", bs == want, f"betti={bs}")
    return rep
