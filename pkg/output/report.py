"""
Structured run reports
Versioned JSON documents and CSV tables; floats go through format_float so
identical runs give identical bytes
"""
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

sys.path.insert(0, str(Path(__file__).parent.parent))

from config import REPORT_SCHEMA_VERSION
from core.predicates import QuadSurd
from core.utils import format_float, format_rational


def format_exact(x) -> str:
    """Fraction as format_rational, QuadSurd as 'a + b*sqrt(d)'"""
    if isinstance(x, QuadSurd):
        return f"{format_rational(x.a)} + {format_rational(x.b)}*sqrt({format_rational(x.d)})"
    return format_rational(Fraction(x))


def _point(lp, link) -> Dict[str, Any]:
    return {"component": lp.component, "label": link.labels[lp.component], "edge": lp.edge,
            "t": format_exact(lp.t), "t_float": format_float(float(lp.t))}


def quadrisecant_record(q, link) -> Dict[str, Any]:
    trans = q.transversal
    return {
        "anchor": [format_float(float(c)) for c in trans.anchor],
        "direction": [format_float(float(c)) for c in trans.direction],
        "hits": [_point(h.point, link) for h in trans.hits],
        "pattern": q.pattern,
        "containment": list(q.containment),
        "near_degenerate": q.near_degenerate,
        "residual": format_float(q.residual, 6),
    }


def quadrisecant_report(link, quads, degeneracies, stats: Dict[str, int]) -> Dict[str, Any]:
    patterns: Dict[str, int] = {}
    for q in quads:
        patterns[q.pattern] = patterns.get(q.pattern, 0) + 1
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "quadrisecants",
        "components": link.n_components,
        "edges": len(link.edges),
        "count": len(quads),
        "patterns": patterns,
        "quadrisecants": [quadrisecant_record(q, link) for q in quads],
        "degeneracies": [{"edges": [list(e) for e in d.edges], "kind": d.kind, "detail": d.detail}
                         for d in degeneracies],
        "stats": {k: v for k, v in stats.items() if k in ("edges", "candidates", "survivors")},
    }


def atlas_report(atlas, link, apex=None, disk=None) -> Dict[str, Any]:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "obstruction",
        "component": atlas.component,
        "samples_per_edge": atlas.samples_per_edge,
        "arcs": [{
            "endpoint_edges": list(arc.endpoint_edges),
            "middle_edge": list(arc.middle_edge),
            "samples": len(arc.samples),
            "closed": arc.closed,
            "start": [format_float(arc.samples[0].coord.a), format_float(arc.samples[0].coord.b)],
            "end": [format_float(arc.samples[-1].coord.a), format_float(arc.samples[-1].coord.b)],
        } for arc in atlas.arcs],
        "crossings": [{
            "arcs": list(c.arcs),
            "coord": [format_float(x) for x in c.coord.canonical],
            "pattern": c.quadrisecant.pattern,
            "hits": [_point(h.point, link) for h in c.quadrisecant.transversal.hits],
        } for c in atlas.crossings],
        "chains": [{
            "arcs": [[i, rev] for i, rev in chain.arcs],
            "closed": chain.closed,
            "samples": len(chain.samples),
            "winding_class": chain.winding_class,
            "middle_components": list(chain.middle_components),
            "middle_turns": chain.middle_turns,
        } for chain in atlas.chains],
        "degenerate_cells": [[i, j, list(k)] for i, j, k in atlas.degenerate_cells],
        "clear_apex": None if apex is None else _point(apex, link),
        "chord_disk": None if disk is None else {
            "triangles": len(disk.triangles),
            "degenerate": sum(disk.degenerate),
        },
    }


def winding_report(K: int, H: int, frame, families, results, between=None) -> Dict[str, Any]:
    between = between or [None] * len(results)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "winding",
        "K": K,
        "H": H,
        "holonomy": None if frame is None else format_float(frame.holonomy, 9),
        "twist": None if frame is None else frame.twist,
        "families": [{
            "omega1": r.omega1,
            "omega2": r.omega2,
            "samples": r.samples,
            "length": format_float(r.middle_travel, 9),
            "winding_class": f.winding_class,
            "surface": f.surface,
            "defect1": format_float(r.defect1, 3),
            "defect2": format_float(r.defect2, 3),
            "h_between_k": b,
        } for f, r, b in zip(families, results, between)],
    }


def roots_report(poly, lo, hi, distinct, with_multiplicity) -> Dict[str, Any]:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": "roots",
        "polynomial": [format_rational(c) for c in poly.coeffs],
        "degree": poly.degree,
        "interval": [None if lo is None else format_rational(lo),
                     None if hi is None else format_rational(hi)],
        "distinct_roots": distinct,
        "roots_with_multiplicity": with_multiplicity,
    }


def degree8_report(report) -> Dict[str, Any]:
    body = report.to_dict()
    body.update(schema_version=REPORT_SCHEMA_VERSION, kind="degree8")
    return body


def dumps(document: Dict[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_json(document: Dict[str, Any], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(document), encoding="utf-8")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
    return path


def quadrisecant_rows(quads, link) -> List[List[str]]:
    rows = []
    for n, q in enumerate(quads):
        for pos, h in enumerate(q.transversal.hits):
            rows.append([n, pos, q.pattern, link.labels[h.point.component], h.point.component,
                         h.point.edge, format_float(float(h.point.t)), format_float(float(h.param))])
    return rows


QUADRISECANT_HEADER = ["quadrisecant", "hit", "pattern", "label", "component", "edge", "t", "line_param"]
ANGLE_HEADER = ["family", "sample", "middle_param", "line_angle"]


def angle_rows(results) -> List[List[str]]:
    rows = []
    for n, r in enumerate(results):
        for i, (p, a) in enumerate(zip(r.middle_params, r.line_angles)):
            rows.append([n, i, format_float(p), format_float(a)])
    return rows
