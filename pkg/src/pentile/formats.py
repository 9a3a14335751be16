"""Machine readable output formats.

JSON is the source of truth; OBJ and SVG are derived views.  Ordering is
canonical everywhere (faces by index, edges by sorted face pair, vertices
by sorted face triple) so repeated runs are byte identical.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Mapping, Sequence

import numpy as np

from .angles import AngleCase, CornerEnumeration, avc_of
from .classify import CombineResult, TilingClass
from .dodecahedron import DodecGraph
from .edges import EdgeEnumeration, evc
from .realize import RealizedTiling, RealizationError, verify_realization
from .sphere import interior_angle, normalize

FORMAT_VERSION = 1
TOOL_VERSION = "0.1.0"


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def run_manifest(subcommand: str, parameters: Mapping, artifact_text: str, wall_time: float) -> dict:
    return {
        "subcommand": subcommand,
        "parameters": dict(parameters),
        "tool_version": TOOL_VERSION,
        "wall_time_s": round(wall_time, 3),
        "digest": digest(artifact_text),
    }


# ----------------------------------------------------------------------
# labelings


def edge_enumerations_json(g: DodecGraph, combination: str, runs: Sequence[EdgeEnumeration]) -> dict:
    arrangements = []
    for run in runs:
        labelings = []
        for lab in run.labelings:
            counts = evc(g, lab)
            labelings.append(
                {
                    "edges": {g.edge_name(ei): lab[ei] for ei in range(30)},
                    "evc": {"".join(t): n for t, n in sorted(counts.items())},
                }
            )
        arrangements.append(
            {
                "arrangement": list(run.arrangement),
                "count": run.count_full_group,
                "count_rotation_only": run.count_rotation_group,
                "labelings": labelings,
            }
        )
    return {
        "kind": "edge-labelings",
        "version": FORMAT_VERSION,
        "combination": combination,
        "total": sum(r.count_full_group for r in runs),
        "total_rotation_only": sum(r.count_rotation_group for r in runs),
        "arrangements": arrangements,
    }


def corner_enumerations_json(
    g: DodecGraph, case: AngleCase, runs: Sequence[CornerEnumeration], pooled: Sequence
) -> dict:
    profiles = []
    for run in runs:
        labelings = []
        for lab in run.labelings:
            counts = avc_of(g, lab)
            labelings.append(
                {
                    "corners": {g.corner_name(ci): lab[ci] for ci in range(60)},
                    "avc": {".".join(t): n for t, n in sorted(counts.items())},
                }
            )
        profiles.append(
            {
                "profile": list(run.profile),
                "count": run.count_full_group,
                "count_rotation_only": run.count_rotation_group,
                "labelings": labelings,
            }
        )
    return {
        "kind": "corner-labelings",
        "version": FORMAT_VERSION,
        "case": case.index,
        "combination": case.name,
        "relations": case.relation_strings(),
        "free_ranges": {
            v: [str(a), str(b)] for v, (a, b) in sorted(case.free_ranges.items())
        },
        "excluded_points": {
            v: [str(p) for p in pts] for v, pts in sorted(case.excluded_points.items())
        },
        "avcs": [
            {".".join(t): n for t, n in avc} for avc in case.avcs
        ],
        "pooled_count": len(pooled),
        "profiles": profiles,
    }


# ----------------------------------------------------------------------
# classification


def _class_json(g: DodecGraph, c: TilingClass) -> dict:
    rep = c.representative
    faces = {}
    for f in g.faces:
        faces[f"F{f}"] = {
            "edges": {
                g.edge_name(ei): rep.edge_labeling[ei] for ei in g.face_edges[f]
            },
            "corners": {
                g.corner_name(ci): rep.corner_labeling[ci] for ci in g.face_corners[f]
            },
        }
    return {
        "id": c.class_id,
        "schema": {"edges": list(c.schema[0]), "angles": list(c.schema[1])},
        "angle_combination": c.case.name,
        "relations": c.relations,
        "parameter_count": c.parameter_count,
        "vertex_dictionary": {
            "".join(et): {".".join(at): n for at, n in ats}
            for et, ats in sorted(c.vertex_dictionary.items())
        },
        "readings": sorted(
            {
                (r.edge_combination, tuple(r.schema[0]), tuple(r.schema[1]))
                for r in c.readings
            }
        ),
        "degenerate_members": len(c.degenerate_members),
        "faces": faces,
    }


def classification_json(g: DodecGraph, result: CombineResult) -> dict:
    return {
        "kind": "classification",
        "version": FORMAT_VERSION,
        "class_count": len(result.classes),
        "classes": [_class_json(g, c) for c in result.classes],
        "pruned_schemas": [
            {
                "edges": list(s[0]),
                "angles": list(s[1]),
                "apex": v.apex,
                "violated": v.violated,
            }
            for s, v in sorted(result.pruned)
        ],
        "oracle_eliminated": [
            {"edges": list(s[0]), "angles": list(s[1]), "reason": v.reason}
            for s, v in sorted(result.eliminated, key=lambda x: x[0])
        ],
    }


GREEK = {
    "alpha": "α",
    "beta": "β",
    "gamma": "γ",
    "delta": "δ",
    "epsilon": "ε",
    "zeta": "ζ",
}


def _pretty(label: str) -> str:
    return GREEK.get(label, label)


def classification_markdown(g: DodecGraph, result: CombineResult) -> str:
    lines = [
        "# Spherical tilings by 12 congruent pentagons",
        "",
        f"Exactly {len(result.classes)} classes.",
        "",
    ]
    for c in result.classes:
        lines.append(f"## Class {c.class_id}")
        lines.append("")
        edge_row = " ".join(c.schema[0])
        angle_row = " ".join(_pretty(a) for a in c.schema[1])
        lines.append(f"- tile schema: edges ({edge_row}), angles ({angle_row})")
        rels = "; ".join(c.relations)
        lines.append(f"- angle relations: {rels}")
        lines.append(f"- free parameters: {c.parameter_count}")
        vd = ", ".join(
            f"{''.join(et)} -> "
            + " + ".join(f"{n} {'.'.join(_pretty(x) for x in at)}" for at, n in ats)
            for et, ats in sorted(c.vertex_dictionary.items())
        )
        lines.append(f"- vertex dictionary: {vd}")
        readings = sorted({r.edge_combination for r in c.readings})
        lines.append(f"- edge length readings: {', '.join(readings)}")
        lines.append("- face labeling:")
        rep = c.representative
        for f in g.faces:
            es = " ".join(rep.edge_labeling[ei] for ei in g.face_edges[f])
            cs = " ".join(_pretty(rep.corner_labeling[ci]) for ci in g.face_corners[f])
            lines.append(f"    - F{f}: edges [{es}] corners [{cs}]")
        lines.append("")
    return "\n".join(lines)


# ----------------------------------------------------------------------
# realizations


def realization_json(g: DodecGraph, rt: RealizedTiling) -> dict:
    rep = verify_realization(rt, g)
    return {
        "kind": "realization",
        "version": FORMAT_VERSION,
        "class": rt.class_id,
        "parameters": {k: float(v) for k, v in sorted(rt.parameters.items())},
        "schema": {"edges": list(rt.schema[0]), "angles": list(rt.schema[1])},
        "vertices": {
            g.vertex_name(vi): [f"{x:.17g}" for x in rt.positions[vi]]
            for vi in range(20)
        },
        "faces": {
            f"F{f}": [g.vertex_name(vi) for vi in g.face_vertices[f]] for f in g.faces
        },
        "edge_values": {
            g.edge_name(ei): f"{rt.edge_values[ei]:.17g}" for ei in range(30)
        },
        "edge_labels": {g.edge_name(ei): rt.edge_labels[ei] for ei in range(30)},
        "residuals": {
            "placement": rt.placement_residual,
            "vertex_angle": rep.max_vertex_angle_defect,
            "face_area": rep.max_face_area_defect,
            "edge_length": rep.max_edge_length_defect,
        },
    }


def realization_from_json(g: DodecGraph, payload: Mapping) -> RealizedTiling:
    if payload.get("kind") != "realization":
        raise ValueError("not a realization document")
    name_to_vi = {g.vertex_name(vi): vi for vi in range(20)}
    name_to_ei = {g.edge_name(ei): ei for ei in range(30)}
    positions = np.zeros((20, 3))
    for name, coords in payload["vertices"].items():
        positions[name_to_vi[name]] = [float(x) for x in coords]
    edge_values = {
        name_to_ei[name]: float(v) for name, v in payload["edge_values"].items()
    }
    edge_labels = {
        name_to_ei[name]: v for name, v in payload["edge_labels"].items()
    }
    schema = (
        tuple(payload["schema"]["edges"]),
        tuple(payload["schema"]["angles"]),
    )
    return RealizedTiling(
        class_id=payload["class"],
        schema=schema,
        positions=positions,
        edge_values=edge_values,
        edge_labels=edge_labels,
        parameters={k: float(v) for k, v in payload.get("parameters", {}).items()},
        placement_residual=float(payload["residuals"]["placement"]),
        face_alignments=None,
    )


# ----------------------------------------------------------------------
# OBJ and SVG views

ARC_SEGMENTS = 16


def _arc_points(p, q, segments: int = ARC_SEGMENTS) -> list[np.ndarray]:
    out = []
    dot = float(np.dot(p, q))
    ang = math.acos(max(-1.0, min(1.0, dot)))
    if ang < 1e-12:
        return [np.asarray(p)] * (segments + 1)
    for k in range(segments + 1):
        t = k / segments
        w1 = math.sin((1 - t) * ang) / math.sin(ang)
        w2 = math.sin(t * ang) / math.sin(ang)
        out.append(normalize(w1 * np.asarray(p) + w2 * np.asarray(q)))
    return out


def export_obj(g: DodecGraph, rt: RealizedTiling) -> str:
    """Wireframe OBJ: the 20 vertices plus every edge arc subdivided."""
    lines = ["# pentile realization", f"# class {rt.class_id}"]
    index = {}
    counter = 1
    for vi in range(20):
        p = rt.positions[vi]
        lines.append(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
        index[("V", vi)] = counter
        counter += 1
    for ei in range(30):
        v1, v2 = g.edge_vertices[ei]
        pts = _arc_points(rt.positions[v1], rt.positions[v2])
        ids = [index[("V", v1)]]
        for p in pts[1:-1]:
            lines.append(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
            ids.append(counter)
            counter += 1
        ids.append(index[("V", v2)])
        lines.append("l " + " ".join(map(str, ids)))
    return "\n".join(lines) + "\n"


def export_svg_net(
    g: DodecGraph, rt: RealizedTiling, punched_face: int = 12, size: int = 720
) -> str:
    """Stereographic net: project from the punched face's centroid.

    Edge styling by label class: the first label solid, the second thick,
    the third dotted.  Refuses unverified realizations.
    """
    if not (1 <= punched_face <= 12):
        raise ValueError(f"punched face F{punched_face} out of range 1..12")
    rep = verify_realization(rt, g)
    if not rep.passed:
        raise RealizationError("refusing to draw an unverified realization")

    pole = normalize(
        np.mean([rt.positions[vi] for vi in g.face_vertices[punched_face]], axis=0)
    )
    tmp = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(tmp, pole)) > 0.9:
        tmp = np.array([0.0, 1.0, 0.0])
    e1 = normalize(np.cross(pole, tmp))
    e2 = np.cross(pole, e1)

    def project(p) -> tuple[float, float]:
        denom = 1.0 - float(np.dot(p, pole))
        if denom < 1e-12:
            denom = 1e-12
        s = 2.0 / denom
        return s * float(np.dot(p, e1)), s * float(np.dot(p, e2))

    # scale to the drawing: the unpunched net fits within the projection of
    # the punched face's vertices
    verts2d = {vi: project(rt.positions[vi]) for vi in range(20)}
    rmax = max(math.hypot(x, y) for x, y in verts2d.values()) * 1.06
    scale = (size / 2 - 8) / rmax
    cx = cy = size / 2

    def xy(p) -> str:
        x, y = project(p)
        return f"{cx + scale * x:.6f},{cy - scale * y:.6f}"

    # label -> stroke style, by first appearance order in the schema
    label_order = []
    for lab in rt.schema[0]:
        if lab not in label_order:
            label_order.append(lab)
    styles = [
        'stroke="black" stroke-width="1.2"',
        'stroke="black" stroke-width="3.4"',
        'stroke="black" stroke-width="1.2" stroke-dasharray="6 4"',
        'stroke="black" stroke-width="0.6"',
        'stroke="black" stroke-width="0.3"',
    ]
    style_of = {lab: styles[i] for i, lab in enumerate(label_order)}

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<!-- pentile net, class {rt.class_id}, punched face F{punched_face} -->",
        '<g id="faces" fill="#f2f2f2" stroke="none">',
    ]
    for f in g.faces:
        if f == punched_face:
            continue
        pts = []
        cyc = g.face_vertices[f]
        for j in range(5):
            arc = _arc_points(
                rt.positions[cyc[j]], rt.positions[cyc[(j + 1) % 5]], ARC_SEGMENTS
            )
            pts.extend(arc[:-1])
        d = "M " + " L ".join(xy(p) for p in pts) + " Z"
        lines.append(f'<path id="face-F{f}" d="{d}"/>')
    lines.append("</g>")
    lines.append('<g id="edges" fill="none" stroke-linecap="round">')
    for ei in range(30):
        v1, v2 = g.edge_vertices[ei]
        pts = _arc_points(rt.positions[v1], rt.positions[v2])
        poly = " ".join(xy(p) for p in pts)
        lab = rt.edge_labels[ei]
        lines.append(
            f'<polyline id="edge-{g.edge_name(ei)}" points="{poly}" '
            f"{style_of.get(lab, styles[0])}/>"
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
