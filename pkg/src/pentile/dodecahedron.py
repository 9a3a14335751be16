"""The fixed combinatorial dodecahedron and its symmetry group.

The face graph is hard coded: face 1 is surrounded counterclockwise by
faces 2..6, faces 7..11 form the lower ring (7 between 2 and 3, 8 between
3 and 4, and so on), and face 12 is antipodal to face 1.  Twelve
pentagonal faces, 30 edges, 20 vertices of degree 3.  All structural
invariants are machine verified by the test suite rather than rederived.

Everything here is immutable after construction and safe to share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Iterable, Mapping, Sequence

# Counterclockwise neighbor cycles, seen from outside the sphere.
NEIGHBOR_CYCLES: dict[int, tuple[int, ...]] = {
    1: (2, 3, 4, 5, 6),
    2: (1, 6, 11, 7, 3),
    3: (1, 2, 7, 8, 4),
    4: (1, 3, 8, 9, 5),
    5: (1, 4, 9, 10, 6),
    6: (1, 5, 10, 11, 2),
    7: (2, 11, 12, 8, 3),
    8: (3, 7, 12, 9, 4),
    9: (4, 8, 12, 10, 5),
    10: (5, 9, 12, 11, 6),
    11: (6, 10, 12, 7, 2),
    12: (7, 11, 10, 9, 8),
}

FACES = tuple(range(1, 13))

Edge = tuple[int, int]        # sorted face pair
Vertex = tuple[int, int, int]  # sorted face triple
Corner = tuple[int, Vertex]    # (face, vertex)


@dataclass(frozen=True)
class DodecGraph:
    """Incidence structure of the combinatorial dodecahedron."""

    faces: tuple[int, ...]
    edges: tuple[Edge, ...]
    vertices: tuple[Vertex, ...]
    edge_index: Mapping[Edge, int]
    vertex_index: Mapping[Vertex, int]
    # per face: 5 boundary slots in cyclic order; slot j carries edge j and
    # the vertex between edge j and edge j+1
    face_edges: Mapping[int, tuple[int, ...]]
    face_vertices: Mapping[int, tuple[int, ...]]
    corners: tuple[Corner, ...]
    corner_index: Mapping[Corner, int]
    face_corners: Mapping[int, tuple[int, ...]]
    vertex_corners: Mapping[int, tuple[int, ...]]
    edge_faces: Mapping[int, tuple[int, int]]
    edge_vertices: Mapping[int, tuple[int, int]]

    def edge_name(self, ei: int) -> str:
        i, j = self.edges[ei]
        return f"E{i}-{j}"

    def vertex_name(self, vi: int) -> str:
        return "V" + "-".join(map(str, self.vertices[vi]))

    def corner_name(self, ci: int) -> str:
        face, vertex = self.corners[ci]
        others = [f for f in vertex if f != face]
        return f"A{face}:{others[0]}-{others[1]}"

    def boundary(self, face: int) -> tuple[tuple[int, int], ...]:
        """(edge index, vertex index) pairs around the face."""
        return tuple(zip(self.face_edges[face], self.face_vertices[face]))


def build_dodecahedron() -> DodecGraph:
    """Build the fixed graph from the hard coded neighbor cycles."""
    edges = sorted({tuple(sorted((f, g))) for f in FACES for g in NEIGHBOR_CYCLES[f]})
    edge_index = {e: i for i, e in enumerate(edges)}
    vertices = set()
    for f in FACES:
        cyc = NEIGHBOR_CYCLES[f]
        for t in range(5):
            vertices.add(tuple(sorted((f, cyc[t], cyc[(t + 1) % 5]))))
    vertices = sorted(vertices)
    vertex_index = {v: i for i, v in enumerate(vertices)}

    face_edges = {}
    face_vertices = {}
    for f in FACES:
        cyc = NEIGHBOR_CYCLES[f]
        es, vs = [], []
        for t in range(5):
            es.append(edge_index[tuple(sorted((f, cyc[t])))])
            vs.append(vertex_index[tuple(sorted((f, cyc[t], cyc[(t + 1) % 5])))])
        face_edges[f] = tuple(es)
        face_vertices[f] = tuple(vs)

    corners: list[Corner] = []
    face_corners = {}
    for f in FACES:
        idxs = []
        for vi in face_vertices[f]:
            idxs.append(len(corners))
            corners.append((f, vertices[vi]))
        face_corners[f] = tuple(idxs)
    corner_index = {c: i for i, c in enumerate(corners)}

    vertex_corners = {vi: [] for vi in range(len(vertices))}
    for ci, (f, v) in enumerate(corners):
        vertex_corners[vertex_index[v]].append(ci)
    vertex_corners = {vi: tuple(cs) for vi, cs in vertex_corners.items()}

    edge_faces = {edge_index[e]: e for e in edges}
    edge_vertices = {}
    for ei, (f, g) in edge_faces.items():
        ends = [vi for vi, v in enumerate(vertices) if f in v and g in v]
        assert len(ends) == 2
        edge_vertices[ei] = tuple(ends)

    return DodecGraph(
        faces=FACES,
        edges=tuple(edges),
        vertices=tuple(vertices),
        edge_index=edge_index,
        vertex_index=vertex_index,
        face_edges=face_edges,
        face_vertices=face_vertices,
        corners=tuple(corners),
        corner_index=corner_index,
        face_corners=face_corners,
        vertex_corners=vertex_corners,
        edge_faces=edge_faces,
        edge_vertices=edge_vertices,
    )


# ----------------------------------------------------------------------
# symmetry group


@dataclass(frozen=True)
class Automorphism:
    """Incidence preserving self map, as induced index permutations."""

    face_map: tuple[int, ...]      # face_map[f] for f in 1..12 (slot 0 unused)
    edge_perm: tuple[int, ...]     # image edge index per edge index
    vertex_perm: tuple[int, ...]
    corner_perm: tuple[int, ...]
    orientation_preserving: bool

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other (apply other first)."""
        fm = tuple(self.face_map[other.face_map[f]] if f else 0 for f in range(13))
        return Automorphism(
            face_map=(0,) + fm[1:],
            edge_perm=tuple(self.edge_perm[i] for i in other.edge_perm),
            vertex_perm=tuple(self.vertex_perm[i] for i in other.vertex_perm),
            corner_perm=tuple(self.corner_perm[i] for i in other.corner_perm),
            orientation_preserving=(
                self.orientation_preserving == other.orientation_preserving
            ),
        )


def _propagate_face_map(seed_face: int, rot: int, flip: bool) -> dict[int, int] | None:
    """Extend face 1 -> seed_face with the given cycle alignment."""
    fmap = {1: seed_face}
    src = NEIGHBOR_CYCLES[1]
    dst = NEIGHBOR_CYCLES[seed_face]
    for t in range(5):
        u = dst[(rot - t) % 5] if flip else dst[(rot + t) % 5]
        if src[t] in fmap and fmap[src[t]] != u:
            return None
        fmap[src[t]] = u
    frontier = [1]
    aligned = {1}
    while frontier:
        nxt = []
        for f in frontier:
            for n in NEIGHBOR_CYCLES[f]:
                if n in aligned or n not in fmap:
                    continue
                # align n's cycle using the known image of f
                src_c = NEIGHBOR_CYCLES[n]
                dst_c = NEIGHBOR_CYCLES[fmap[n]]
                p = src_c.index(f)
                q = dst_c.index(fmap[f])
                for t in range(5):
                    u = dst_c[(q - t) % 5] if flip else dst_c[(q + t) % 5]
                    m = src_c[(p + t) % 5]
                    if m in fmap:
                        if fmap[m] != u:
                            return None
                    else:
                        fmap[m] = u
                aligned.add(n)
                nxt.append(n)
        frontier = nxt
    if len(fmap) != 12 or len(set(fmap.values())) != 12:
        return None
    return fmap


def automorphisms(g: DodecGraph) -> tuple[Automorphism, ...]:
    """The full incidence preserving group, reflections included."""
    out = []
    seen = set()
    for seed in FACES:
        for rot in range(5):
            for flip in (False, True):
                fmap = _propagate_face_map(seed, rot, flip)
                if fmap is None:
                    continue
                key = tuple(fmap[f] for f in FACES)
                if key in seen:
                    continue
                seen.add(key)
                face_map = (0,) + key
                edge_perm = tuple(
                    g.edge_index[tuple(sorted((face_map[i], face_map[j])))]
                    for (i, j) in g.edges
                )
                vertex_perm = tuple(
                    g.vertex_index[tuple(sorted(face_map[f] for f in v))]
                    for v in g.vertices
                )
                corner_perm = tuple(
                    g.corner_index[
                        (face_map[f], tuple(sorted(face_map[x] for x in v)))
                    ]
                    for (f, v) in g.corners
                )
                out.append(
                    Automorphism(
                        face_map=face_map,
                        edge_perm=edge_perm,
                        vertex_perm=vertex_perm,
                        corner_perm=corner_perm,
                        orientation_preserving=not flip,
                    )
                )
    return tuple(out)


_AUT_CACHE: dict[int, tuple[Automorphism, ...]] = {}


def cached_automorphisms(g: DodecGraph) -> tuple[Automorphism, ...]:
    key = id(g)
    if key not in _AUT_CACHE:
        _AUT_CACHE[key] = automorphisms(g)
    return _AUT_CACHE[key]


# ----------------------------------------------------------------------
# canonical forms


def canonicalize(
    values: Sequence,
    domain: str,
    g: DodecGraph,
    label_perms: Sequence[Mapping] | None = None,
    auts: Sequence[Automorphism] | None = None,
    orientation_preserving_only: bool = False,
) -> tuple:
    """Lexicographic minimum of a labeling over the symmetry orbit.

    values is a sequence indexed by edge index (domain="edges") or corner
    index (domain="corners").  label_perms lists the allowed relabelings
    of the abstract labels (the identity is always considered); pass None
    to compare labelings against a fixed figure without relabeling.
    """
    if auts is None:
        auts = cached_automorphisms(g)
    values = tuple(values)
    best = None
    for a in auts:
        if orientation_preserving_only and not a.orientation_preserving:
            continue
        perm = a.edge_perm if domain == "edges" else a.corner_perm
        moved = itemgetter(*perm)(values)
        if label_perms:
            for p in label_perms:
                cand = tuple(p.get(x, x) for x in moved)
                if best is None or cand < best:
                    best = cand
        else:
            if best is None or moved < best:
                best = moved
    return best


def canonical_set(
    raw,
    domain: str,
    g: DodecGraph,
    label_perms: Sequence[Mapping] | None = None,
    auts: Sequence[Automorphism] | None = None,
) -> tuple[set, int]:
    """Canonical forms of a symmetry-closed set of labelings.

    Walks each orbit once (the input must be closed under the group, which
    holds for complete enumeration output) and returns the set of
    lexicographic minima together with the number of orbits under the
    orientation preserving subgroup.
    """
    if auts is None:
        auts = cached_automorphisms(g)
    perms = list(label_perms) if label_perms else [{}]
    raw = set(map(tuple, raw))
    seen: set = set()
    canon: set = set()
    rotation_orbits = 0
    for lab in sorted(raw):
        if lab in seen:
            continue
        images = set()
        images_rot = set()
        for a in auts:
            perm = a.edge_perm if domain == "edges" else a.corner_perm
            moved = itemgetter(*perm)(lab)
            for p in perms:
                img = tuple(p.get(x, x) for x in moved) if p else moved
                images.add(img)
                if a.orientation_preserving:
                    images_rot.add(img)
        if not images <= raw:
            raise ValueError("labeling set is not closed under the symmetry group")
        seen |= images
        canon.add(min(images))
        # the full orbit is one or two orbits of the index-2 subgroup
        rotation_orbits += 1 if images_rot == images else 2
    return canon, rotation_orbits


def orbit_size(
    values: Sequence,
    domain: str,
    g: DodecGraph,
    label_perms: Sequence[Mapping] | None = None,
    auts: Sequence[Automorphism] | None = None,
) -> int:
    """Number of distinct labelings in the symmetry orbit."""
    if auts is None:
        auts = cached_automorphisms(g)
    values = tuple(values)
    images = set()
    for a in auts:
        perm = a.edge_perm if domain == "edges" else a.corner_perm
        moved = itemgetter(*perm)(values)
        if label_perms:
            for p in label_perms:
                images.add(tuple(p.get(x, x) for x in moved))
        else:
            images.add(moved)
    return len(images)


# ----------------------------------------------------------------------
# counting identities


@dataclass(frozen=True)
class CountingReport:
    """Which counting identities hold for given (f, e, v, degree histogram)."""

    euler: bool                 # v - e + f = 2
    edge_face: bool             # 2e = 5f
    vertex_count: bool          # 2v = 3f + 4
    degree_sum: bool            # 2e = sum(d * v_d)
    histogram_total: bool       # v = sum(v_d)
    excess_identity: bool       # v_3 - 20 = sum((3d - 10) * v_d, d >= 4)
    is_minimal: bool            # f = 12
    all_degree_three: bool
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def all_identities(self) -> bool:
        return (
            self.euler
            and self.edge_face
            and self.vertex_count
            and self.degree_sum
            and self.histogram_total
            and self.excess_identity
        )


def check_counting_identities(
    f: int, e: int, v: int, degree_hist: Mapping[int, int]
) -> CountingReport:
    """Verify the pentagon tiling counting identities on raw counts.

    For 12 combinatorially congruent pentagons the identities force 30
    edges, 20 vertices, and all vertex degrees equal to 3; larger tilings
    may carry higher degree vertices, which the report flags via f != 12.
    """
    hist = {d: n for d, n in degree_hist.items() if n}
    v3 = hist.get(3, 0)
    notes = []
    is_minimal = f == 12
    if not is_minimal:
        notes.append("non-minimal tiling: f != 12, higher degree vertices possible")
    all3 = set(hist) <= {3}
    if all3 and v3 != v:
        all3 = False
    return CountingReport(
        euler=(v - e + f == 2),
        edge_face=(2 * e == 5 * f),
        vertex_count=(2 * v == 3 * f + 4),
        degree_sum=(2 * e == sum(d * n for d, n in hist.items())),
        histogram_total=(v == sum(hist.values())),
        excess_identity=(v3 - 20 == sum((3 * d - 10) * n for d, n in hist.items() if d >= 4)),
        is_minimal=is_minimal,
        all_degree_three=all3,
        notes=tuple(notes),
    )


# ----------------------------------------------------------------------
# text dump (versioned golden format)

DUMP_VERSION = "pentile-graph v1"


def graph_dump(g: DodecGraph) -> str:
    """One line per face: F<i>: E... V... in cyclic boundary order."""
    lines = [DUMP_VERSION]
    for f in g.faces:
        parts = []
        for ei, vi in g.boundary(f):
            parts.append(g.edge_name(ei))
            parts.append(g.vertex_name(vi))
        lines.append(f"F{f}: " + " ".join(parts) + " (cyclic)")
    return "\n".join(lines) + "\n"
