"""Joint edge and angle classification of the congruent tile.

A tile schema is the cyclic sequence of (edge label, following corner
label) pairs.  combine overlays every enumerated edge labeling with every
enumerated corner labeling under every graph symmetry, keeps the overlays
in which all 12 faces match a single schema, prunes schemas that a
spherical pentagon cannot carry, applies the numeric area oracles, and
folds the survivors into the final classes.

The pruning rule is geometric: about any apex of a spherical pentagon,
consider the four equalities (adjacent edge pair equal, next edge pair
equal, adjacent angle pair equal, far angle pair equal).  If exactly
three hold by label identity the fourth is forced, contradicting label
distinctness, so the schema is impossible.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Iterable, Mapping, Sequence

from .angles import (
    ALPHA,
    AngleCase,
    avc_of,
    case_label_perms,
    relation_preserving_perms,
    sort_type,
)
from .construct import (
    ALPHA as ALPHA_VALUE,
    ISOLATED_ARRANGEMENTS,
    TILE_AREA,
    construct_walk,
    regular_edge_length,
)
from .dodecahedron import DodecGraph, cached_automorphisms
from .edges import COMBINATIONS, equal_multiplicity_perms, evc
from .sphere import (
    SphereDomainError,
    interior_angle,
    opposite_side,
    sas_area,
    sss_excess,
    triangle_corner_angle,
)

Schema = tuple[tuple[str, ...], tuple[str, ...]]  # (edge labels, angle labels)


def schema_transforms(schema: Schema) -> list[Schema]:
    """The ten rotated and reflected readings of a schema."""
    E, A = schema
    out = []
    for r in range(5):
        out.append(
            (
                tuple(E[(r + j) % 5] for j in range(5)),
                tuple(A[(r + j) % 5] for j in range(5)),
            )
        )
        out.append(
            (
                tuple(E[(r - j) % 5] for j in range(5)),
                tuple(A[(r - j - 1) % 5] for j in range(5)),
            )
        )
    return out


def canonical_schema(schema: Schema, label_perms: Sequence[tuple[Mapping, Mapping]] = ()) -> Schema:
    """Minimum over rotations, reflections and allowed label renamings.

    label_perms holds (edge permutation, angle permutation) pairs; the
    identity is always included.
    """
    best = None
    perms = list(label_perms) or [({}, {})]
    if ({}, {}) not in [(dict(e), dict(a)) for e, a in perms]:
        perms = [({}, {})] + perms
    for ep, ap in perms:
        renamed = (
            tuple(ep.get(x, x) for x in schema[0]),
            tuple(ap.get(x, x) for x in schema[1]),
        )
        for t in schema_transforms(renamed):
            if best is None or t < best:
                best = t
    return best


# ----------------------------------------------------------------------
# apex symmetry prune


@dataclass(frozen=True)
class PruneVerdict:
    allowed: bool
    apex: int | None = None
    violated: str | None = None
    held: tuple[str, ...] = ()


def apex_symmetry_prune(schema: Schema) -> PruneVerdict:
    """Reject schemas needing exactly three of the four apex equalities.

    At apex corner i the four predicates are: edge i equals edge i+1,
    edge i-1 equals edge i+2, corner i-1 equals corner i+1, and corner
    i-2 equals corner i+2, decided by label identity.  Three holding
    forces the fourth geometrically, so exactly three is impossible.
    """
    E, A = schema
    for i in range(5):
        preds = {
            "adjacent edges": E[i] == E[(i + 1) % 5],
            "next edges": E[(i - 1) % 5] == E[(i + 2) % 5],
            "adjacent angles": A[(i - 1) % 5] == A[(i + 1) % 5],
            "far angles": A[(i - 2) % 5] == A[(i + 2) % 5],
        }
        if sum(preds.values()) == 3:
            violated = next(k for k, v in preds.items() if not v)
            held = tuple(k for k, v in preds.items() if v)
            return PruneVerdict(False, apex=i, violated=violated, held=held)
    return PruneVerdict(True)


# ----------------------------------------------------------------------
# geometric oracles


@dataclass(frozen=True)
class OracleVerdict:
    decision: str  # "eliminate", "keep", "inconclusive"
    reason: str = ""
    evidence: Mapping[str, float] = field(default_factory=dict)


def _match_symmetric_equilateral(schema: Schema) -> tuple[str, str] | None:
    """Detect one edge class with angle pattern (x, alpha, y, y, alpha)."""
    E, A = schema
    if len(set(E)) != 1:
        return None
    counts = Counter(A)
    if sorted(counts.values()) != [1, 2, 2] or counts.get(ALPHA) != 2:
        return None
    x = next(l for l, n in counts.items() if n == 1)
    y = next(l for l, n in counts.items() if n == 2 and l != ALPHA)
    if x == ALPHA:
        return None
    i = A.index(x)
    if A[(i - 1) % 5] == ALPHA and A[(i + 1) % 5] == ALPHA:
        return (x, y)
    return None


def _match_four_one_all_alpha(schema: Schema) -> bool:
    E, A = schema
    return sorted(Counter(E).values()) == [1, 4] and set(A) == {ALPHA}


GRID = 10_000


def _monotone_root(fn, lo: float, hi: float, target: float):
    """Root of fn = target checked strictly increasing over a dense grid.

    Returns (root, None) or (None, reason).  Samples that raise domain
    errors shrink the usable interval.
    """
    xs = []
    vals = []
    for k in range(GRID + 1):
        x = lo + (hi - lo) * k / GRID
        try:
            v = fn(x)
        except (SphereDomainError, ValueError):
            if xs:
                break
            continue
        xs.append(x)
        vals.append(v)
    if len(xs) < 10:
        return None, "too few valid samples"
    for i in range(1, len(vals)):
        if vals[i] <= vals[i - 1]:
            return None, f"not strictly increasing near x={xs[i]:.6f}"
    if not (vals[0] < target < vals[-1]):
        return None, "target not bracketed"
    import bisect

    idx = bisect.bisect_left(vals, target)
    a_, b_ = xs[idx - 1], xs[idx]
    for _ in range(200):
        m = 0.5 * (a_ + b_)
        if fn(m) < target:
            a_ = m
        else:
            b_ = m
        if b_ - a_ < 1e-15:
            break
    return 0.5 * (a_ + b_), None


def symmetric_equilateral_pentagon(a: float) -> dict[str, float]:
    """Equilateral pentagon with two 2*pi/3 corners flanking the apex.

    Splitting along the diagonals from the apex gives two congruent side
    triangles and an isosceles middle triangle, all determined by a.
    """
    d = opposite_side(a, ALPHA_VALUE, a)
    side = sas_area(a, ALPHA_VALUE, a)
    middle = sss_excess(d, a, d)
    base_angle = triangle_corner_angle(a, d, a)      # side triangle at apex/base
    mid_apex = triangle_corner_angle(d, d, a)        # middle triangle at the apex
    mid_base = triangle_corner_angle(d, a, d)        # middle triangle at the base
    return {
        "area": 2 * side + middle,
        "apex_angle": 2 * base_angle + mid_apex,
        "pair_angle": base_angle + mid_base,
    }


def _oracle_symmetric_equilateral() -> OracleVerdict:
    root, why = _monotone_root(
        lambda a: symmetric_equilateral_pentagon(a)["area"], 0.02, 1.8, TILE_AREA
    )
    if root is None:
        return OracleVerdict("inconclusive", f"area scan failed: {why}")
    at = symmetric_equilateral_pentagon(root)
    gap = abs(at["apex_angle"] - at["pair_angle"])
    if gap < 1e-9:
        return OracleVerdict(
            "eliminate",
            "unique equilateral pentagon with area pi/3 is the regular one, "
            "forcing the apex angle equal to the pair angle",
            {"a": root, "angle_gap": gap, "regular_a": regular_edge_length()},
        )
    return OracleVerdict("inconclusive", "root found but angles stay distinct", {"a": root})


def four_one_all_alpha_pentagon(a: float) -> dict[str, float]:
    """Four edges a, every prescribed corner 2*pi/3, closing edge derived."""
    walk = construct_walk([a] * 4, [ALPHA_VALUE] * 3)
    pts = walk.vertices
    end = interior_angle(pts[4], pts[3], pts[0])
    start = interior_angle(pts[0], pts[4], pts[1])
    area = 3 * ALPHA_VALUE + end + start - 3 * math.pi
    import numpy as _np

    b = math.atan2(float(_np.linalg.norm(_np.cross(pts[4], pts[0]))), float(pts[4] @ pts[0]))
    return {"area": area, "b": b}


def _oracle_four_one_all_alpha() -> OracleVerdict:
    root, why = _monotone_root(
        lambda a: four_one_all_alpha_pentagon(a)["area"], 0.02, 1.25, TILE_AREA
    )
    if root is None:
        return OracleVerdict("inconclusive", f"area scan failed: {why}")
    b = four_one_all_alpha_pentagon(root)["b"]
    if abs(b - root) < 1e-9:
        return OracleVerdict(
            "eliminate",
            "the only tile with all corners 2*pi/3 and area pi/3 has all five "
            "edges equal, merging the two edge labels",
            {"a": root, "b": b, "regular_a": regular_edge_length()},
        )
    return OracleVerdict("inconclusive", "root found but edges stay distinct", {"a": root, "b": b})


def geometric_oracles(schema: Schema) -> OracleVerdict:
    """Numeric monotone area checks for the two schema families whose
    elimination needs geometry beyond the apex rule."""
    if _match_symmetric_equilateral(schema):
        return _oracle_symmetric_equilateral()
    if _match_four_one_all_alpha(schema):
        return _oracle_four_one_all_alpha()
    return OracleVerdict("keep", "no geometric elimination applies")


# ----------------------------------------------------------------------
# combine


@dataclass
class Candidate:
    schema: Schema
    edge_combination: str
    case_index: int
    avc: tuple
    evc: tuple
    vertex_dictionary: Mapping[tuple, tuple]
    edge_labeling: tuple[str, ...]
    corner_labeling: tuple[str, ...]  # already composed with the witness symmetry
    face_alignments: tuple[tuple[int, bool], ...]  # (offset, flip) per face 1..12
    sources: set = field(default_factory=set)


@dataclass(frozen=True)
class TilingClass:
    class_id: str
    schema: Schema
    case: AngleCase
    parameter_count: int
    vertex_dictionary: Mapping[tuple, tuple]
    representative: Candidate
    readings: tuple[Candidate, ...]
    degenerate_members: tuple[Candidate, ...]

    @property
    def relations(self) -> list[str]:
        return self.case.relation_strings()


@dataclass
class CombineResult:
    classes: tuple[TilingClass, ...]
    candidates: list[Candidate]
    pruned: list[tuple[Schema, PruneVerdict]]
    eliminated: list[tuple[Schema, OracleVerdict]]


def _face_alignment(pairs: Sequence[tuple[str, str]], schema: Schema):
    E, A = schema
    for r in range(5):
        if all(pairs[j] == (E[(r + j) % 5], A[(r + j) % 5]) for j in range(5)):
            return (r, False)
        if all(pairs[j] == (E[(r - j) % 5], A[(r - j - 1) % 5]) for j in range(5)):
            return (r, True)
    return None


def _schema_label_perms(
    edge_combination: str, case: AngleCase
) -> list[tuple[Mapping, Mapping]]:
    edge_counts = Counter(COMBINATIONS[edge_combination])
    eperms = equal_multiplicity_perms(edge_counts, edge_counts)
    aperms = relation_preserving_perms(case)
    return [(e, a) for e in eperms for a in aperms]


def combine(
    g: DodecGraph,
    edge_results: Mapping[str, Iterable[tuple[str, ...]]],
    angle_results: Sequence[tuple[AngleCase, Iterable[tuple[str, ...]]]],
    prune_early: bool = True,
    use_oracles: bool = True,
) -> CombineResult:
    """Cross the two classifications and emit the final tiling classes.

    edge_results maps combination name to edge labelings; angle_results
    pairs each angle case with its pooled corner labelings.  Every overlay
    of an edge labeling with a symmetry image of a corner labeling is
    tested for a single schema matching all 12 faces.
    """
    auts = cached_automorphisms(g)
    face_edge_idx = {f: g.face_edges[f] for f in g.faces}
    face_corner_idx = {f: g.face_corners[f] for f in g.faces}

    candidates: dict[Schema, Candidate] = {}
    pruned: dict[Schema, PruneVerdict] = {}

    for combo, labelings in edge_results.items():
        for EL in labelings:
            face_edge_labels = {
                f: tuple(EL[ei] for ei in face_edge_idx[f]) for f in g.faces
            }
            for case, cls in angle_results:
                perms = _schema_label_perms(combo, case)
                for CL in cls:
                    for a in auts:
                        CLs = itemgetter(*a.corner_perm)(CL)
                        pairs1 = tuple(
                            zip(
                                face_edge_labels[1],
                                (CLs[ci] for ci in face_corner_idx[1]),
                            )
                        )
                        schema1: Schema = (
                            tuple(p[0] for p in pairs1),
                            tuple(p[1] for p in pairs1),
                        )
                        variants = set(schema_transforms(schema1))
                        ok = True
                        for f in g.faces[1:]:
                            pf = (
                                face_edge_labels[f],
                                tuple(CLs[ci] for ci in face_corner_idx[f]),
                            )
                            if pf not in variants:
                                ok = False
                                break
                        if not ok:
                            continue
                        key = canonical_schema(schema1, perms)
                        if key in candidates:
                            candidates[key].sources.add((combo, case.index))
                            continue
                        if key in pruned:
                            continue
                        if prune_early:
                            verdict = apex_symmetry_prune(key)
                            if not verdict.allowed:
                                pruned[key] = verdict
                                continue
                        # the stored schema keeps the labels of the witness
                        # labelings so alignments stay meaningful
                        used_schema = canonical_schema(schema1)
                        aligns = []
                        for f in g.faces:
                            pf = tuple(
                                zip(
                                    face_edge_labels[f],
                                    (CLs[ci] for ci in face_corner_idx[f]),
                                )
                            )
                            al = _face_alignment(pf, used_schema)
                            aligns.append(al)
                        vdict: dict[tuple, Counter] = {}
                        for vi, corner_ids in g.vertex_corners.items():
                            etype = sort_type_edges(
                                EL[ei] for ei in _vertex_edges(g, vi)
                            )
                            atype = sort_type(CLs[ci] for ci in corner_ids)
                            vdict.setdefault(etype, Counter())[atype] += 1
                        cand = Candidate(
                            schema=used_schema,
                            edge_combination=combo,
                            case_index=case.index,
                            avc=tuple(sorted(avc_of(g, CLs).items())),
                            evc=tuple(sorted(evc(g, EL).items())),
                            vertex_dictionary={
                                k: tuple(sorted(v.items())) for k, v in vdict.items()
                            },
                            edge_labeling=tuple(EL),
                            corner_labeling=tuple(CLs),
                            face_alignments=tuple(aligns),
                            sources={(combo, case.index)},
                        )
                        candidates[key] = cand

    result_pruned = list(pruned.items())
    kept: dict[Schema, Candidate] = {}
    if prune_early:
        kept = dict(candidates)
    else:
        for key, cand in candidates.items():
            verdict = apex_symmetry_prune(key)
            if verdict.allowed:
                kept[key] = cand
            else:
                result_pruned.append((key, verdict))

    eliminated: list[tuple[Schema, OracleVerdict]] = []
    survivors: dict[Schema, Candidate] = {}
    for key, cand in kept.items():
        if use_oracles:
            verdict = geometric_oracles(key)
            if verdict.decision == "eliminate":
                eliminated.append((key, verdict))
                continue
        survivors[key] = cand

    classes = _fold_classes(g, survivors, dict(angle_results_by_index(angle_results)))
    return CombineResult(
        classes=classes,
        candidates=list(survivors.values()),
        pruned=result_pruned,
        eliminated=eliminated,
    )


def angle_results_by_index(angle_results) -> dict[int, AngleCase]:
    return {case.index: case for case, _ in angle_results}


def _vertex_edges(g: DodecGraph, vi: int) -> list[int]:
    v = g.vertices[vi]
    out = []
    for ei, (f1, f2) in g.edge_faces.items():
        if f1 in v and f2 in v:
            out.append(ei)
    return out


def sort_type_edges(labels: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(labels))


# ----------------------------------------------------------------------
# folding candidates into classes


def schema_maps_onto(
    general: Schema, special: Schema, general_case: AngleCase, special_case: AngleCase
) -> bool:
    """Can the general schema be coarsened slotwise onto the special one?

    The label maps must be functions, and the general class's angle
    relations, rewritten through the angle map, must hold identically on
    the special case's solution set.  That is exactly the statement that
    the special schema's tiles form a slice of the general family.
    """
    from fractions import Fraction as _F

    for t in schema_transforms(general):
        emap: dict[str, str] = {}
        amap: dict[str, str] = {}
        ok = True
        for j in range(5):
            ge, ga = t[0][j], t[1][j]
            se, sa = special[0][j], special[1][j]
            if emap.setdefault(ge, se) != se or amap.setdefault(ga, sa) != sa:
                ok = False
                break
        if not ok:
            continue
        compatible = True
        for _pivot, (rc, rk) in general_case.system.rows.items():
            mapped: dict[str, _F] = {}
            for v, coef in rc.items():
                w = amap.get(v, v)
                mapped[w] = mapped.get(w, _F(0)) + coef
            if not special_case.system.implies(mapped, rk):
                compatible = False
                break
        if compatible:
            return True
    return False


def _fold_classes(
    g: DodecGraph, survivors: Mapping[Schema, Candidate], cases: Mapping[int, AngleCase]
) -> tuple[TilingClass, ...]:
    cands = list(survivors.values())

    def maps(a: Candidate, b: Candidate) -> bool:
        return schema_maps_onto(a.schema, b.schema, cases[a.case_index], cases[b.case_index])

    maximal = []
    for c in cands:
        if not any(o is not c and maps(o, c) and not maps(c, o) for o in cands):
            maximal.append(c)

    classes = []
    for cand in sorted(maximal, key=lambda c: c.schema):
        k = cand.schema
        case = cases[cand.case_index]
        readings = [
            o
            for o in cands
            if o is cand
            or (maps(cand, o) and len(set(o.schema[1])) == len(set(k[1])))
        ]
        degenerate = [
            o
            for o in cands
            if o is not cand
            and maps(cand, o)
            and len(set(o.schema[1])) != len(set(k[1]))
        ]
        classes.append(
            TilingClass(
                class_id="",
                schema=k,
                case=case,
                parameter_count=2 if case.sizes == (2, 1, 1, 1) else 0,
                vertex_dictionary=cand.vertex_dictionary,
                representative=cand,
                readings=tuple(sorted(readings, key=lambda c: c.schema)),
                degenerate_members=tuple(sorted(degenerate, key=lambda c: c.schema)),
            )
        )

    named = _assign_class_ids(classes)
    return tuple(named)


def _assign_class_ids(classes: list[TilingClass]) -> list[TilingClass]:
    """T5 is the two parameter class; T1 the equilateral-only five angle
    class; T2..T4 match the fixed walk arrangements."""
    from dataclasses import replace

    out = []
    five_angle = [c for c in classes if len(set(c.schema[1])) == 5]
    rest = [c for c in classes if c not in five_angle]
    for c in rest:
        out.append(replace(c, class_id="T5" if c.parameter_count == 2 else "T?"))

    def matches_arrangement(c: TilingClass, arrangement: tuple[str, ...]) -> bool:
        perms = relation_preserving_perms(c.case)
        target = set()
        for p in perms:
            seq = tuple(p.get(x, x) for x in arrangement)
            for r in range(5):
                target.add(seq[r:] + seq[:r])
                rev = seq[::-1]
                target.add(rev[r:] + rev[:r])
        return tuple(c.schema[1]) in target

    for c in five_angle:
        assigned = None
        for cid, (arr, _slot) in ISOLATED_ARRANGEMENTS.items():
            if matches_arrangement(c, arr):
                assigned = cid
                break
        out.append(replace(c, class_id=assigned or "T?"))
    out.sort(key=lambda c: c.class_id)
    return out


# ----------------------------------------------------------------------
# one-call pipeline


def classify(g: DodecGraph, threads: int = 1, prune_early: bool = True,
             use_oracles: bool = True) -> CombineResult:
    """Run both enumerations and combine them."""
    from .angles import enumerate_case, solve_angle_numerics
    from .edges import enumerate_combination

    edge_results = {}
    for name in COMBINATIONS:
        runs = enumerate_combination(g, name, threads=threads)
        labelings = [lab for run in runs for lab in run.labelings]
        if labelings:
            edge_results[name] = labelings

    angle_results = []
    for case in solve_angle_numerics():
        _runs, pooled = enumerate_case(g, case, threads=threads)
        if pooled:
            angle_results.append((case, list(pooled)))

    return combine(
        g, edge_results, angle_results, prune_early=prune_early, use_oracles=use_oracles
    )
