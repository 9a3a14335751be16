"""Numeric realization of a tiling class on the unit sphere.

realize_tiling places tile 1 at a reference pose and propagates isometric
copies across a spanning tree of the face adjacency graph; every revisit
of an already placed vertex is a closure check.  verify_realization then
re-measures everything from the coordinates alone: per vertex angle sums,
per face areas against pi/3, and per edge lengths against their labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .classify import Schema, TilingClass
from .dodecahedron import DodecGraph, cached_automorphisms
from .sphere import arc_length, interior_angle, normalize

PHI = (1.0 + math.sqrt(5.0)) / 2.0


class RealizationError(ValueError):
    pass


@dataclass
class RealizedTiling:
    class_id: str
    schema: Schema
    positions: np.ndarray            # 20 x 3, indexed by graph vertex index
    edge_values: Mapping[int, float]  # expected length per graph edge index
    edge_labels: Mapping[int, str]    # length label per graph edge index
    parameters: Mapping[str, float]
    placement_residual: float         # worst reseen-vertex mismatch during placement
    face_alignments: tuple | None = None


@dataclass(frozen=True)
class VerificationReport:
    max_vertex_angle_defect: float
    max_face_area_defect: float
    max_edge_length_defect: float
    total_angle_sum: float
    total_area: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.max_vertex_angle_defect < self.tolerance
            and self.max_face_area_defect < self.tolerance
            and self.max_edge_length_defect < self.tolerance
        )


# ----------------------------------------------------------------------
# frames


def _frame_map(p1, p2, q1, q2, mirror: bool) -> np.ndarray:
    """Isometry sending p1 -> q1 and p2 -> q2 with the requested parity."""

    def frame(u, v, flip):
        e1 = u
        e2 = v - np.dot(v, u) * u
        e2 = e2 / np.linalg.norm(e2)
        e3 = np.cross(e1, e2)
        if flip:
            e3 = -e3
        return np.column_stack([e1, e2, e3])

    Fp = frame(p1, p2, False)
    Fq = frame(q1, q2, mirror)
    return Fq @ Fp.T


def _slot_of(alignment: tuple[int, bool], j: int) -> int:
    offset, flip = alignment
    if not flip:
        return (offset + j) % 5
    return (offset - j - 1) % 5


def realize_tiling(
    g: DodecGraph,
    tclass: TilingClass,
    pentagon_vertices: np.ndarray,
    edge_label_values: Mapping[str, float],
    parameters: Mapping[str, float] | None = None,
    tol: float = 1e-9,
) -> RealizedTiling:
    """Place 12 congruent copies of the pentagon per the class labeling.

    pentagon_vertices are listed in schema slot order (vertex j carries the
    schema's angle slot j) counterclockwise from outside.  Raises when a
    revisited vertex lands further than tol from its first placement, or
    when the pentagon area is not pi/3.
    """
    W = np.asarray(pentagon_vertices, float)
    if W.shape != (5, 3):
        raise RealizationError("pentagon must have 5 vertices")
    area = _polygon_area(W)
    if abs(area - math.pi / 3.0) > 1e-7:
        raise RealizationError(
            f"pentagon area {area:.12f} is not pi/3; total area cannot be 4*pi"
        )
    aligns = tclass.representative.face_alignments
    if aligns is None or len(aligns) != 12:
        raise RealizationError("class representative carries no face alignments")

    positions: dict[int, np.ndarray] = {}
    worst = 0.0

    def place(face: int, M: np.ndarray) -> float:
        w = 0.0
        for j, vi in enumerate(g.face_vertices[face]):
            pt = M @ W[_slot_of(aligns[face - 1], j)]
            pt = pt / np.linalg.norm(pt)
            if vi in positions:
                w = max(w, arc_length(positions[vi], pt))
            else:
                positions[vi] = pt
        return w

    # face 1 at the reference pose
    flip1 = aligns[0][1]
    if not flip1:
        M1 = np.eye(3)
    else:
        q1 = W[_slot_of(aligns[0], 0)]
        q2 = W[_slot_of(aligns[0], 1)]
        n = np.cross(q1, q2)
        n = n / np.linalg.norm(n)
        M1 = np.eye(3) - 2.0 * np.outer(n, n)
    worst = max(worst, place(1, M1))
    placed = {1}
    frontier = [1]
    while frontier:
        nxt = []
        for f in frontier:
            for nb in g.faces:
                if nb in placed:
                    continue
                shared = [
                    vi for vi in g.face_vertices[nb] if vi in g.face_vertices[f]
                ]
                if len(shared) != 2:
                    continue
                x, y = shared
                jx = g.face_vertices[nb].index(x)
                jy = g.face_vertices[nb].index(y)
                p1 = W[_slot_of(aligns[nb - 1], jx)]
                p2 = W[_slot_of(aligns[nb - 1], jy)]
                M = _frame_map(p1, p2, positions[x], positions[y], aligns[nb - 1][1])
                worst = max(worst, place(nb, M))
                placed.add(nb)
                nxt.append(nb)
        frontier = nxt
    if len(positions) != 20:
        raise RealizationError("placement did not reach all vertices")
    if worst > tol:
        raise RealizationError(
            f"closure failed: worst vertex mismatch {worst:.3e} exceeds {tol:.1e}"
        )
    edge_values = {}
    edge_labels = {}
    for f in g.faces:
        for j, ei in enumerate(g.face_edges[f]):
            lab = tclass.schema[0][_edge_slot_of(aligns[f - 1], j)]
            edge_values[ei] = float(edge_label_values[lab])
            edge_labels[ei] = lab
    pos = np.array([positions[i] for i in range(20)])
    return RealizedTiling(
        class_id=tclass.class_id,
        schema=tclass.schema,
        positions=pos,
        edge_values=edge_values,
        edge_labels=edge_labels,
        parameters=dict(parameters or {}),
        placement_residual=worst,
        face_alignments=aligns,
    )


def _edge_slot_of(alignment: tuple[int, bool], j: int) -> int:
    offset, flip = alignment
    if not flip:
        return (offset + j) % 5
    return (offset - j) % 5


def _polygon_area(W: np.ndarray) -> float:
    n = len(W)
    total = 0.0
    for i in range(n):
        total += interior_angle(W[i], W[(i - 1) % n], W[(i + 1) % n])
    return total - (n - 2) * math.pi


# ----------------------------------------------------------------------
# verification


def verify_realization(rt: RealizedTiling, g: DodecGraph, tol: float = 1e-9) -> VerificationReport:
    pos = rt.positions
    angle_sums = np.zeros(20)
    area_defect = 0.0
    total_area = 0.0
    for f in g.faces:
        cyc = g.face_vertices[f]
        area = 0.0
        for j, vi in enumerate(cyc):
            ang = interior_angle(
                pos[vi], pos[cyc[(j - 1) % 5]], pos[cyc[(j + 1) % 5]]
            )
            angle_sums[vi] += ang
            area += ang
        area -= 3 * math.pi
        total_area += area
        area_defect = max(area_defect, abs(area - math.pi / 3.0))
    edge_defect = 0.0
    for ei, want in rt.edge_values.items():
        v1, v2 = g.edge_vertices[ei]
        edge_defect = max(edge_defect, abs(arc_length(pos[v1], pos[v2]) - want))
    return VerificationReport(
        max_vertex_angle_defect=float(np.max(np.abs(angle_sums - 2 * math.pi))),
        max_face_area_defect=area_defect,
        max_edge_length_defect=edge_defect,
        total_angle_sum=float(np.sum(angle_sums)),
        total_area=total_area,
        tolerance=tol,
    )


# ----------------------------------------------------------------------
# exact regular dodecahedron oracle


def _regular_points() -> np.ndarray:
    pts = []
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                pts.append((sx, sy, sz))
    inv = 1.0 / PHI
    for s1 in (1, -1):
        for s2 in (1, -1):
            pts.append((0.0, s1 * inv, s2 * PHI))
            pts.append((s1 * inv, s2 * PHI, 0.0))
            pts.append((s1 * PHI, 0.0, s2 * inv))
    return np.array([normalize(p) for p in pts])


def _regular_faces(pts: np.ndarray) -> list[list[int]]:
    """Vertex cycles (counterclockwise from outside) of the 12 faces."""
    dirs = []
    for s1 in (1, -1):
        for s2 in (1, -1):
            dirs.append((0.0, s1 * PHI, s2))
            dirs.append((s2, 0.0, s1 * PHI))
            dirs.append((s1 * PHI, s2, 0.0))
    faces = []
    for d in dirs:
        d = normalize(d)
        dots = pts @ d
        idx = list(np.argsort(-dots)[:5])
        center = normalize(np.mean(pts[idx], axis=0))
        e1 = normalize(pts[idx[0]] - np.dot(pts[idx[0]], center) * center)
        e2 = np.cross(center, e1)
        ang = [
            math.atan2(float(np.dot(pts[i], e2)), float(np.dot(pts[i], e1)))
            for i in idx
        ]
        cyc = [i for _, i in sorted(zip(ang, idx))]
        faces.append(cyc)
    return faces


def _geometric_neighbor_cycles(faces: list[list[int]]) -> dict[int, list[int]]:
    out = {}
    for fi, cyc in enumerate(faces):
        nbrs = []
        for j in range(5):
            a, b = cyc[j], cyc[(j + 1) % 5]
            for gi, other in enumerate(faces):
                if gi != fi and a in other and b in other:
                    nbrs.append(gi)
                    break
        out[fi] = nbrs
    return out


def regular_dodecahedron_realization(g: DodecGraph) -> RealizedTiling:
    """The regular tiling from exact golden ratio coordinates.

    Maps the geometric face graph onto the combinatorial one and returns a
    realization whose positions come straight from the coordinates, with
    every edge expected to have the regular edge arc.
    """
    pts = _regular_points()
    faces = _regular_faces(pts)
    cycles = _geometric_neighbor_cycles(faces)
    from .dodecahedron import NEIGHBOR_CYCLES

    mapping = None  # graph face -> geometric face
    for seed in range(12):
        for rot in range(5):
            for flip in (False, True):
                m = _match_cycles(NEIGHBOR_CYCLES, cycles, seed, rot, flip)
                if m is not None:
                    mapping = m
                    break
            if mapping:
                break
        if mapping:
            break
    if mapping is None:
        raise RealizationError("no isomorphism onto the geometric dodecahedron")

    positions = np.zeros((20, 3))
    for vi, v in enumerate(g.vertices):
        shared = set(faces[mapping[v[0]]]) & set(faces[mapping[v[1]]]) & set(
            faces[mapping[v[2]]]
        )
        if len(shared) != 1:
            raise RealizationError("face triple does not meet in one point")
        positions[vi] = pts[shared.pop()]
    a0 = math.acos(math.sqrt(5.0) / 3.0)
    return RealizedTiling(
        class_id="regular",
        schema=(("a",) * 5, ("alpha",) * 5),
        positions=positions,
        edge_values={ei: a0 for ei in range(30)},
        edge_labels={ei: "a" for ei in range(30)},
        parameters={"a": a0},
        placement_residual=0.0,
        face_alignments=None,
    )


def _match_cycles(src: Mapping[int, Sequence[int]], dst: Mapping[int, Sequence[int]],
                  seed: int, rot: int, flip: bool):
    fmap = {1: seed}
    s0 = src[1]
    d0 = dst[seed]
    for t in range(5):
        u = d0[(rot - t) % 5] if flip else d0[(rot + t) % 5]
        fmap[s0[t]] = u
    frontier = [1]
    done = {1}
    while frontier:
        nxt = []
        for f in frontier:
            for n in src[f]:
                if n in done or n not in fmap:
                    continue
                sc = src[n]
                dc = dst[fmap[n]]
                p = sc.index(f)
                q = list(dc).index(fmap[f])
                for t in range(5):
                    u = dc[(q - t) % 5] if flip else dc[(q + t) % 5]
                    m = sc[(p + t) % 5]
                    if m in fmap:
                        if fmap[m] != u:
                            return None
                    else:
                        fmap[m] = u
                done.add(n)
                nxt.append(n)
        frontier = nxt
    if len(set(fmap.values())) != 12:
        return None
    return fmap


# ----------------------------------------------------------------------
# congruence of two realizations


def congruence_residual(rt1: RealizedTiling, rt2: RealizedTiling, g: DodecGraph) -> float:
    """Best alignment distance between two realizations: minimum over the
    graph symmetries of the worst vertex mismatch after an optimal
    rotation or reflection (orthogonal Procrustes)."""
    best = math.inf
    P = rt1.positions
    for a in cached_automorphisms(g):
        Q = rt2.positions[list(a.vertex_perm)]
        H = Q.T @ P
        U, _, Vt = np.linalg.svd(H)
        R = U @ Vt
        moved = P @ R.T
        worst = max(arc_length(moved[i], Q[i]) for i in range(20))
        best = min(best, worst)
    return best


# ----------------------------------------------------------------------
# matching constructed pentagons onto class schemas


def _schema_transform_with_perm(schema: Schema):
    """Transforms of a schema together with the vertex permutation and the
    mirror flag needed to reindex coordinates accordingly."""
    E, A = schema
    out = []
    for r in range(5):
        fwd = (
            tuple(E[(r + j) % 5] for j in range(5)),
            tuple(A[(r + j) % 5] for j in range(5)),
        )
        out.append((fwd, tuple((r + j) % 5 for j in range(5)), False))
        rev = (
            tuple(E[(r - j) % 5] for j in range(5)),
            tuple(A[(r - j - 1) % 5] for j in range(5)),
        )
        out.append((rev, tuple((r - j - 1) % 5 for j in range(5)), True))
    return out


def reorder_pentagon_to_schema(
    source_schema: Schema,
    source_vertices: np.ndarray,
    target_schema: Schema,
    value_map: Mapping[str, float],
) -> tuple[np.ndarray, dict[str, float]]:
    """Reindex (and mirror if needed) a pentagon built for source_schema so
    its vertices follow target_schema slot order.  Labels are matched by a
    bijection; the returned dict gives the target labels' numeric values.
    """
    for (labels, perm, mirrored) in _schema_transform_with_perm(source_schema):
        emap: dict[str, str] = {}
        amap: dict[str, str] = {}
        ok = True
        for j in range(5):
            if emap.setdefault(labels[0][j], target_schema[0][j]) != target_schema[0][j]:
                ok = False
                break
            if amap.setdefault(labels[1][j], target_schema[1][j]) != target_schema[1][j]:
                ok = False
                break
        if not ok or len(set(emap.values())) != len(emap) or len(set(amap.values())) != len(amap):
            continue
        verts = source_vertices[list(perm)].copy()
        if mirrored:
            verts[:, 1] *= -1.0
        values = {}
        for src, dst in list(emap.items()) + list(amap.items()):
            if src in value_map:
                values[dst] = float(value_map[src])
        return verts, values
    raise RealizationError("pentagon schema does not match the class schema")
