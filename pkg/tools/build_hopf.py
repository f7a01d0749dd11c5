"""Search for a 12-vertex simplicial circle bundle over the boundary of the
tetrahedron with Euler number +-1, and write it as bundle JSON.

Each base vertex carries a 3-cycle fiber.  Over a base triangle (x, y, z) the
preimage is encoded by a start state (a, b, c) of fiber positions and a cyclic
word in the letters x, y, z; each letter advances one coordinate by one and the
tetrahedron spanned by the old rainbow triangle and the new vertex is added.
Words over neighbouring triangles must induce the same annulus over the shared
edge.  The Euler number is summed from the per-triangle necklace values.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from itertools import permutations

M = 3
BASE_TRIANGLES = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
BOUNDARY_SIGNS = {(1, 2, 3): 1, (0, 2, 3): -1, (0, 1, 3): 1, (0, 1, 2): -1}


def words():
    seen = set()
    for w in permutations("xxxyyyzzz"):
        if w not in seen:
            seen.add(w)
            yield w


def states_distinct(w, letters):
    """True when the cyclic walk of ``w`` restricted to ``letters`` never revisits a state."""
    w = [c for c in w if c in letters]
    L = len(w)
    for start in range(L):
        counts = dict.fromkeys(letters, 0)
        for k in range(1, L):
            counts[w[(start + k - 1) % L]] += 1
            if all(v % M == 0 for v in counts.values()):
                return False
    return True


def configs():
    """Abstract triangle configurations, deduplicated by their tetrahedra."""
    out = {}
    for w in words():
        if not all(states_distinct(w, ls) for ls in ("xyz", "xy", "yz", "xz")):
            continue
        for a in range(M):
            for b in range(M):
                for c in range(M):
                    state = [a, b, c]
                    tets, beads = [], []
                    for letter in w:
                        k = "xyz".index(letter)
                        old = [(i, state[i]) for i in range(3)]
                        state[k] = (state[k] + 1) % M
                        tets.append(frozenset(old + [(k, state[k])]))
                        beads.append(k)
                    key = frozenset(tets)
                    if key not in out:
                        out[key] = (w, (a, b, c), beads)
    return out


def strip(tets, i, j):
    tris = set()
    for t in tets:
        s = frozenset(v for v in t if v[0] in (i, j))
        if len(s) == 3:
            tris.add(frozenset((0 if v[0] == i else 1, v[1]) for v in s))
    return frozenset(tris)


def necklace_value(beads):
    L = len(beads)
    pos = neg = 0
    for r in range(L):
        if beads[r] != 0:
            continue
        for b in range(L):
            if beads[b] != 1:
                continue
            for g in range(L):
                if beads[g] != 2:
                    continue
                if (b - r) % L < (g - r) % L:
                    pos += 1
                else:
                    neg += 1
    return Fraction(neg - pos, 2 * M ** 3)


def main(out_path):
    cfgs = configs()
    info = []
    for tets, (w, start, beads) in cfgs.items():
        info.append((tets, strip(tets, 0, 1), strip(tets, 1, 2), strip(tets, 0, 2), necklace_value(beads)))
    info.sort(key=lambda r: sorted(tuple(sorted(t)) for t in r[0]))
    by_xy = {}
    by_xy_xz = {}
    for r in info:
        by_xy.setdefault(r[1], []).append(r)
        by_xy_xz.setdefault((r[1], r[3]), []).append(r)
    for t012 in info:
        s01, s12, s02 = t012[1], t012[2], t012[3]
        for t013 in by_xy.get(s01, []):
            s13, s03 = t013[2], t013[3]
            for t023 in by_xy_xz.get((s02, s03), []):
                s23 = t023[2]
                for t123 in by_xy_xz.get((s12, s13), []):
                    if t123[2] != s23:
                        continue
                    chosen = {(0, 1, 2): t012, (0, 1, 3): t013, (0, 2, 3): t023, (1, 2, 3): t123}
                    e = sum(BOUNDARY_SIGNS[f] * chosen[f][4] for f in BASE_TRIANGLES)
                    if abs(e) == 1 and is_valid(chosen):
                        return write(out_path, chosen, e)
    raise SystemExit("no configuration found")


def total_facets(chosen):
    facets = set()
    for f, r in chosen.items():
        for t in r[0]:
            facets.add(tuple(sorted(f[i] * M + p for i, p in t)))
    return facets


def document(chosen, e):
    facets = total_facets(chosen)
    return {
        "n": 1,
        "base": {
            "vertices": ["v0", "v1", "v2", "v3"],
            "simplices": [list(t) for t in BASE_TRIANGLES],
        },
        "total": {
            "vertices": [f"v{u}_{a}" for u in range(4) for a in range(M)],
            "simplices": sorted(list(t) for t in facets),
        },
        "projection": {"vertexMap": [u for u in range(4) for _ in range(M)]},
        "fiberOrientation": [{"anchor": 0, "simplex": [0, 1], "sign": 1}],
        "expected": {"fundamental_abs": "1/1", "search_euler_number": f"{e.numerator}/{e.denominator}"},
        "provenance": "generated by tools/build_hopf.py: first configuration (in a fixed enumeration order) "
        "of 3-vertex fiber circles over the four triangles of the tetrahedron boundary whose "
        "necklace Euler number is +-1 and which passes bundle validation",
    }


def is_valid(chosen):
    from localeuler.bundle import validate_bundle
    from localeuler.io import bundle_from_dict
    from localeuler.linalg import betti_numbers

    b = bundle_from_dict(document(chosen, 0))
    return validate_bundle(b).ok and betti_numbers(b.total.cell_complex()) == [1, 0, 0, 1]


def write(out_path, chosen, e):
    doc = document(chosen, e)
    facets = total_facets(chosen)
    from localeuler.io import dumps

    with open(out_path, "w") as fh:
        fh.write(dumps(doc))
    print(f"wrote {out_path}: {len(facets)} tetrahedra, Euler number {e}")


# Run from the repository root: PYTHONPATH=src python3 tools/build_hopf.py
if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/localeuler/data/hopf.json")
