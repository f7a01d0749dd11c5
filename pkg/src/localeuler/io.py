"""JSON documents for bundles, cochains and cycles.

Rationals are written as ``"p/q"`` strings in lowest terms.  Every document is
emitted with sorted keys and a fixed layout so equal inputs give equal bytes.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .bundle import FiberAnchor, TriangulatedBundle
from .engine import EulerCochain
from .errors import DigestMismatch, DocumentError
from .simplicial import SimplicialComplex

TOOL_VERSION = "0.1.0"


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise DocumentError(f"expected a 'p/q' string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad rational {s!r}") from exc


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(doc: Any) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _req(d: Mapping, key: str, kind, where: str):
    if not isinstance(d, dict) or key not in d:
        raise DocumentError(f"{where}: missing {key!r}")
    v = d[key]
    if not isinstance(v, kind) or isinstance(v, bool):
        raise DocumentError(f"{where}.{key}: wrong type")
    return v


def _int_list(v, where: str) -> list[int]:
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise DocumentError(f"{where}: expected a list of integers")
    return v


def _simplices(part: Mapping, where: str) -> tuple[int, list[list[int]]]:
    names = _req(part, "vertices", list, where)
    simplices = _req(part, "simplices", list, where)
    out = []
    for i, s in enumerate(simplices):
        s = _int_list(s, f"{where}.simplices[{i}]")
        if not s or any(a >= b for a, b in zip(s, s[1:])):
            raise DocumentError(f"{where}.simplices[{i}]: not strictly increasing")
        if s[0] < 0 or s[-1] >= len(names):
            raise DocumentError(f"{where}.simplices[{i}]: vertex index out of range")
        out.append(s)
    return len(names), out


def bundle_from_dict(doc: Mapping) -> TriangulatedBundle:
    n = _req(doc, "n", int, "bundle")
    if n < 1:
        raise DocumentError("bundle.n must be at least 1")
    base_part = _req(doc, "base", dict, "bundle")
    total_part = _req(doc, "total", dict, "bundle")
    nb, base_s = _simplices(base_part, "base")
    nt, total_s = _simplices(total_part, "total")
    vmap = _int_list(_req(_req(doc, "projection", dict, "bundle"), "vertexMap", list, "projection"), "vertexMap")
    base = SimplicialComplex(nb, base_s)
    total = SimplicialComplex(nt, total_s)
    orientation = {}
    if "orientations" in base_part:
        signs = _int_list(base_part["orientations"], "base.orientations")
        if len(signs) != len(base_s) or any(s not in (1, -1) for s in signs):
            raise DocumentError("base.orientations must give +1 or -1 per base simplex")
        orientation = {tuple(s): o for s, o in zip(base_s, signs)}
    anchors = []
    raw = _req(doc, "fiberOrientation", list, "bundle")
    for i, a in enumerate(raw):
        where = f"fiberOrientation[{i}]"
        anchor = _req(a, "anchor", int, where)
        simplex = _int_list(_req(a, "simplex", list, where), where + ".simplex")
        sign = _req(a, "sign", int, where)
        if sign not in (1, -1):
            raise DocumentError(f"{where}.sign must be +1 or -1")
        if not 0 <= anchor < nb or len(simplex) != n + 1 or any(not 0 <= v < nt for v in simplex):
            raise DocumentError(f"{where}: indices out of range or wrong simplex size")
        anchors.append(FiberAnchor(anchor, tuple(sorted(simplex)), sign))
    if not anchors:
        raise DocumentError("fiberOrientation is empty")
    return TriangulatedBundle(
        base, total, vmap, n, anchors, orientation,
        [str(x) for x in base_part["vertices"]], [str(x) for x in total_part["vertices"]],
    )


def bundle_to_dict(b: TriangulatedBundle, extra: Mapping | None = None) -> dict:
    base_s = [list(s) for s in sorted(b.base.facets)]
    base: dict[str, Any] = {
        "vertices": list(b.base_names or [f"v{i}" for i in range(b.base.num_vertices)]),
        "simplices": base_s,
    }
    if b.base_orientation:
        base["orientations"] = [b.base_orientation.get(tuple(s), 1) for s in base_s]
    doc = {
        "n": b.n,
        "base": base,
        "total": {
            "vertices": list(b.total_names or [f"w{i}" for i in range(b.total.num_vertices)]),
            "simplices": [list(s) for s in sorted(b.total.facets)],
        },
        "projection": {"vertexMap": list(b.vertex_map)},
        "fiberOrientation": [
            {"anchor": a.base_vertex, "simplex": list(a.simplex), "sign": a.sign} for a in b.fiber_orientation
        ],
    }
    if extra:
        doc.update(extra)
    return doc


def base_digest(b: TriangulatedBundle) -> str:
    return digest({"vertices": b.base.num_vertices, "simplices": sorted(list(s) for s in b.base.facets)})


def cochain_to_dict(e: EulerCochain, b: TriangulatedBundle, input_digest: str) -> dict:
    return {
        "formula": e.formula,
        "version": TOOL_VERSION,
        "input_digest": input_digest,
        "base_digest": base_digest(b),
        "values": [{"simplex": list(s), "value": format_rational(v)} for s, v in e.items()],
    }


def cochain_from_dict(doc: Mapping) -> tuple[EulerCochain, str]:
    values, order = {}, {}
    for i, item in enumerate(_req(doc, "values", list, "cochain")):
        s = tuple(_int_list(_req(item, "simplex", list, f"values[{i}]"), f"values[{i}].simplex"))
        key = tuple(sorted(s))
        if len(set(s)) != len(s) or key in values:
            raise DocumentError(f"values[{i}]: repeated vertex or simplex")
        values[key] = parse_rational(_req(item, "value", str, f"values[{i}]"))
        order[key] = s
    formula = doc.get("formula", "")
    return EulerCochain(values, order, str(formula)), _req(doc, "base_digest", str, "cochain")


def cycle_to_dict(chain: Mapping[Sequence[int], object], b: TriangulatedBundle) -> dict:
    items = sorted((tuple(s), Fraction(c)) for s, c in chain.items() if c)
    return {
        "base_digest": base_digest(b),
        "chain": [{"simplex": list(s), "coefficient": format_rational(c)} for s, c in items],
    }


def cycle_from_dict(doc: Mapping) -> tuple[dict[tuple[int, ...], Fraction], str]:
    out: dict[tuple[int, ...], Fraction] = {}
    for i, item in enumerate(_req(doc, "chain", list, "cycle")):
        s = tuple(_int_list(_req(item, "simplex", list, f"chain[{i}]"), f"chain[{i}].simplex"))
        c = _req(item, "coefficient", (str, int), f"chain[{i}]")
        out[s] = out.get(s, 0) + parse_rational(c)
    return out, _req(doc, "base_digest", str, "cycle")


def check_digests(cochain_digest: str, cycle_digest: str) -> None:
    if cochain_digest != cycle_digest:
        raise DigestMismatch("cochain and cycle refer to different bases")


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
