"""Angle labelings of the 60 face corners, with exact feasibility.

The special angle alpha always denotes 2*pi/3; every other label denotes
an angle distinct from alpha and from each other.  Per tile the five
angles sum to 10*pi/3 (there are 20 vertices and 12 tiles, and each
vertex carries total angle 2*pi), and each degree 3 vertex carries an
equation: the three incident labels sum to 2*pi.

solve_angle_numerics enumerates, over all ways to split the five tile
corners into label classes and all candidate vertex type supports, the
exactly feasible combinations: counting systems are solved over the
nonnegative integers and angle relations over the rationals, so a case
is rejected automatically whenever two formally distinct labels would be
forced equal.  No floating point is used anywhere in this module.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .dodecahedron import DodecGraph, cached_automorphisms, canonical_set, canonicalize
from .exact import Inconsistent, LinearSystem, Q, render_expr

ALPHA = "alpha"
LABEL_ORDER = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")
_RANK = {lab: i for i, lab in enumerate(LABEL_ORDER)}
TILE_SUM = Q(10, 3)   # units of pi
VERTEX_SUM = Q(2)     # units of pi
ALPHA_VALUE = Q(2, 3)

VertexType = tuple[str, ...]   # sorted triple of labels
AVC = tuple[tuple[VertexType, int], ...]  # sorted ((type, count), ...)


def _label_sort_key(lab: str) -> int:
    return _RANK[lab]


def sort_type(labels: Iterable[str]) -> VertexType:
    return tuple(sorted(labels, key=_label_sort_key))


def type_equation(t: VertexType) -> dict[str, Fraction]:
    eq: dict[str, Fraction] = {}
    for lab in t:
        eq[lab] = eq.get(lab, Q(0)) + 1
    return eq


def base_system(multiplicity: Mapping[str, int]) -> LinearSystem:
    """alpha = 2*pi/3 plus the tile angle sum for the given combination."""
    variables = [ALPHA] + [v for v in LABEL_ORDER[1:] if v in multiplicity]
    sys = LinearSystem(variables)
    sys.add_equation({ALPHA: Q(1)}, ALPHA_VALUE)
    sys.add_equation({lab: Q(m) for lab, m in multiplicity.items()}, TILE_SUM)
    return sys


def _system_ok(sys: LinearSystem) -> bool:
    return sys.forced_pair(sys.variables) is None and sys.feasible_open_box(0, 2)


def vertex_type_candidates(labels: Sequence[str], relations: LinearSystem) -> list[VertexType]:
    """Degree 3 vertex types consistent with the current relation set.

    A candidate is kept when its 2*pi equation neither contradicts the
    relations nor forces two distinct labels (or a label and alpha) to be
    equal, and leaves the open range (0, 2*pi) reachable.
    """
    out = []
    for t in itertools.combinations_with_replacement(
        sorted(set(labels), key=_label_sort_key), 3
    ):
        sys = relations.copy()
        try:
            sys.add_equation(type_equation(t), VERTEX_SUM)
        except Inconsistent:
            continue
        if _system_ok(sys):
            out.append(t)
    return out


# ----------------------------------------------------------------------
# numeric classification of angle combinations


@dataclass(frozen=True)
class AngleCase:
    """One feasible angle combination with its relations and AVCs."""

    index: int
    sizes: tuple[int, ...]            # multiplicities, descending
    multiplicity: Mapping[str, int]   # label -> multiplicity in the tile
    system: LinearSystem
    avcs: tuple[AVC, ...]
    free_ranges: Mapping[str, tuple[Fraction, Fraction]]
    excluded_points: Mapping[str, tuple[Fraction, ...]]

    @property
    def name(self) -> str:
        parts = []
        for lab in LABEL_ORDER:
            m = self.multiplicity.get(lab)
            if m:
                parts.append(lab if m == 1 else f"{lab}^{m}")
        return " ".join(parts)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l in LABEL_ORDER if l in self.multiplicity)

    def relation_strings(self) -> list[str]:
        return self.system.relation_strings()

    def admissible_types(self) -> list[VertexType]:
        return vertex_type_candidates(self.labels, self.system)


def _integer_counts(
    support: Sequence[VertexType], targets: Mapping[str, int], total: int
) -> list[tuple[int, ...]]:
    """Nonnegative integer solutions with every support count >= 1."""
    types = list(support)
    out: list[tuple[int, ...]] = []

    def rec(i: int, counts: list[int], used: int, got: Counter) -> None:
        if i == len(types):
            if used == total and all(got[l] == targets[l] for l in targets):
                out.append(tuple(counts))
            return
        remaining_types = len(types) - i - 1
        t = types[i]
        mult = Counter(t)
        hi = total - used - remaining_types
        for lab, m in mult.items():
            hi = min(hi, (targets[lab] - got[lab]) // m)
        for n in range(1, hi + 1):
            got2 = got.copy()
            ok = True
            for lab, m in mult.items():
                got2[lab] += n * m
                if got2[lab] > targets[lab]:
                    ok = False
            if not ok:
                continue
            counts.append(n)
            rec(i + 1, counts, used + n, got2)
            counts.pop()

    rec(0, [], 0, Counter())
    return out


def _integer_partitions(n: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()]
    out = []
    def rec(rest: int, cap: int, acc: list[int]) -> None:
        if rest == 0:
            out.append(tuple(acc))
            return
        for k in range(min(rest, cap), 0, -1):
            acc.append(k)
            rec(rest - k, k, acc)
            acc.pop()
    rec(n, n, [])
    return out


def _support_search(
    base: LinearSystem,
    admissible: list[VertexType],
    labels: Sequence[str],
    targets: Mapping[str, int],
) -> list[tuple[tuple[VertexType, ...], tuple[int, ...]]]:
    """All supports (with counts) that are jointly exactly feasible.

    Depth first over admissible types in order; a type whose equation is
    already implied costs nothing, otherwise the extended system must stay
    consistent with no forced equality and a nonempty open angle box.
    """
    results = []
    label_set = list(labels)

    def rec(i: int, sys: LinearSystem, chosen: list[VertexType], covered: set) -> None:
        if i == len(admissible):
            if chosen and covered >= set(label_set):
                for counts in _integer_counts(chosen, targets, 20):
                    results.append((tuple(chosen), counts))
            return
        # coverage pruning: the rest must be able to cover missing labels
        missing = set(label_set) - covered
        if missing:
            reachable = set()
            for t in admissible[i:]:
                reachable.update(t)
            if not missing <= reachable:
                return
        rec(i + 1, sys, chosen, covered)  # skip admissible[i]
        t = admissible[i]
        eq = type_equation(t)
        if sys.implies(eq, VERTEX_SUM):
            chosen.append(t)
            rec(i + 1, sys, chosen, covered | set(t))
            chosen.pop()
            return
        sys2 = sys.copy()
        try:
            sys2.add_equation(eq, VERTEX_SUM)
        except Inconsistent:
            return
        if not _system_ok(sys2):
            return
        chosen.append(t)
        rec(i + 1, sys2, chosen, covered | set(t))
        chosen.pop()

    rec(0, base, [], set())
    return results


def _rename_system(sys: LinearSystem, perm: Mapping[str, str]) -> LinearSystem:
    out = LinearSystem(sys.variables)
    for p, (rc, rk) in sys.rows.items():
        out.add_equation({perm.get(v, v): c for v, c in rc.items()}, rk)
    return out


def _rename_avc(avc: AVC, perm: Mapping[str, str]) -> AVC:
    renamed = [(sort_type(perm.get(l, l) for l in t), n) for t, n in avc]
    return tuple(sorted(renamed))


def case_label_perms(multiplicity: Mapping[str, int]) -> list[dict]:
    """Permutations of the non-alpha labels within equal multiplicity."""
    groups: dict[int, list[str]] = {}
    for lab, m in multiplicity.items():
        if lab != ALPHA:
            groups.setdefault(m, []).append(lab)
    perms = [dict()]
    for _, grp in sorted(groups.items()):
        new = []
        for basep in perms:
            for p in itertools.permutations(grp):
                d = dict(basep)
                d.update(zip(grp, p))
                new.append(d)
        perms = new
    return perms


def relation_preserving_perms(case: AngleCase) -> list[dict]:
    """Label permutations leaving the relation closure invariant."""
    key = case.system.canonical_key()
    out = []
    for p in case_label_perms(case.multiplicity):
        if _rename_system(case.system, p).canonical_key() == key:
            out.append(p)
    return out


def solve_angle_numerics() -> list[AngleCase]:
    """Exhaustively classify the feasible angle combinations.

    Enumerates partitions of the five tile corners into label classes,
    the choice of which class (if any) is the 2*pi/3 angle, all jointly
    feasible vertex type supports, and all nonnegative integer counting
    solutions with 20 vertices and 12 appearances per tile corner slot.
    Feasible combinations are reported with exact relations and every
    admissible anglewise vertex combination, deduplicated under label
    renaming.
    """
    raw: list[tuple[tuple[int, ...], int, Mapping, LinearSystem, AVC]] = []
    for sizes in _integer_partitions(5):
        alpha_options: list[int | None] = [None] + sorted(set(sizes), reverse=True)
        for alpha_size in alpha_options:
            multiplicity: dict[str, int] = {}
            remaining = list(sizes)
            if alpha_size is not None:
                multiplicity[ALPHA] = alpha_size
                remaining.remove(alpha_size)
            for i, m in enumerate(sorted(remaining, reverse=True)):
                multiplicity[LABEL_ORDER[1 + i]] = m
            sys = base_system(multiplicity)
            try:
                ok = _system_ok(sys)
            except Inconsistent:
                ok = False
            if not ok:
                continue
            labels = [l for l in LABEL_ORDER if l in multiplicity]
            admissible = vertex_type_candidates(labels, sys)
            targets = {lab: 12 * m for lab, m in multiplicity.items()}
            for support, counts in _support_search(sys, admissible, labels, targets):
                closed = sys.copy()
                for t in support:
                    closed.add_equation(type_equation(t), VERTEX_SUM)
                avc: AVC = tuple(sorted(zip(support, counts)))
                raw.append((tuple(sizes), alpha_size or 0, multiplicity, closed, avc))

    # group by canonical relation closure, then canonicalize the AVC set
    grouped: dict[tuple, dict] = {}
    for sizes, alpha_size, multiplicity, closed, avc in raw:
        perms = case_label_perms(multiplicity)
        sys_keys = {}
        for i, p in enumerate(perms):
            sys_keys[i] = _rename_system(closed, p).canonical_key()
        best_sys = min(sys_keys.values())
        winners = [perms[i] for i, k in sys_keys.items() if k == best_sys]
        avc_key = min(_rename_avc(avc, p) for p in winners)
        gkey = (sizes, alpha_size, best_sys)
        entry = grouped.setdefault(
            gkey,
            {
                "multiplicity": dict(
                    sorted(multiplicity.items(), key=lambda kv: _label_sort_key(kv[0]))
                ),
                "system_key": best_sys,
                "avcs": set(),
            },
        )
        entry["avcs"].add(avc_key)

    cases: list[AngleCase] = []
    order = sorted(grouped, key=lambda k: (k[0], k[1]), reverse=True)
    for idx, gkey in enumerate(order, start=1):
        entry = grouped[gkey]
        multiplicity = entry["multiplicity"]
        sys = LinearSystem([ALPHA] + [l for l in LABEL_ORDER[1:] if l in multiplicity])
        for _pivot, rc_items, rk in entry["system_key"]:
            sys.add_equation(dict(rc_items), rk)
        free_ranges = {}
        excluded: dict[str, tuple[Fraction, ...]] = {}
        for v in sys.free_variables():
            free_ranges[v] = sys.variable_interval(v, 0, 2)
        if len(sys.free_variables()) == 1:
            v = sys.free_variables()[0]
            pts = set()
            labs = [l for l in sys.variables]
            for x, y in itertools.combinations(labs, 2):
                diff, k = sys._reduce({x: Q(1), y: Q(-1)}, 0)
                c = diff.get(v, Q(0))
                if c != 0:
                    root = k / c
                    lo, hi = free_ranges[v]
                    if (lo is None or root > lo) and (hi is None or root < hi):
                        pts.add(root)
            if pts:
                excluded[v] = tuple(sorted(pts))
        cases.append(
            AngleCase(
                index=idx,
                sizes=gkey[0],
                multiplicity=multiplicity,
                system=sys,
                avcs=tuple(sorted(entry["avcs"])),
                free_ranges=free_ranges,
                excluded_points=excluded,
            )
        )
    return cases


# ----------------------------------------------------------------------
# corner labelings on the graph


def _dihedral_variants(seq: Sequence[str]) -> list[tuple[str, ...]]:
    seq = tuple(seq)
    out = []
    for s in (seq, seq[::-1]):
        for r in range(5):
            out.append(s[r:] + s[:r])
    return out


def case_profiles(case: AngleCase) -> list[tuple[str, ...]]:
    """Arrangements of the case's multiset, up to rotation, reflection and
    relation preserving label renaming."""
    seq = []
    for lab in case.labels:
        seq.extend([lab] * case.multiplicity[lab])
    perms = relation_preserving_perms(case)
    seen = set()
    reps = []
    for perm in sorted(set(itertools.permutations(seq))):
        variants = set()
        for p in perms:
            relabeled = tuple(p.get(x, x) for x in perm)
            variants.update(_dihedral_variants(relabeled))
        key = min(variants)
        if key not in seen:
            seen.add(key)
            reps.append(key)
    return sorted(reps)


def profile_stabilizer_perms(case: AngleCase, profile: Sequence[str]) -> list[dict]:
    variants = set(_dihedral_variants(profile))
    return [
        p
        for p in relation_preserving_perms(case)
        if tuple(p.get(x, x) for x in profile) in variants
    ]


@dataclass(frozen=True)
class CornerEnumeration:
    case_index: int
    profile: tuple[str, ...]
    labelings: tuple[tuple[str, ...], ...]  # canonical, indexed by corner index
    count_full_group: int
    count_rotation_group: int


_FACE_ORDER = (1, 2, 3, 4, 5, 6, 7, 11, 8, 9, 10, 12)


def enumerate_corner_labelings(
    g: DodecGraph,
    case: AngleCase,
    profile: Sequence[str],
    threads: int = 1,
) -> CornerEnumeration:
    """All corner labelings matching the profile whose 20 vertex equations
    are jointly feasible with pairwise distinct angle values."""
    profile = tuple(profile)
    aligns = sorted(set(_dihedral_variants(profile)))
    admissible = set(case.admissible_types())

    # which admissible types pin extra relations beyond the case closure
    pinning: dict[VertexType, LinearSystem] = {}
    for t in admissible:
        if not case.system.implies(type_equation(t), VERTEX_SUM):
            s = case.system.copy()
            s.add_equation(type_equation(t), VERTEX_SUM)
            pinning[t] = s

    # completion table: for a pair of labels, which third labels are viable
    labels = case.labels
    pair_third: dict[tuple[str, str], set[str]] = {}
    for t in admissible:
        for i in range(3):
            pair = tuple(sorted((t[(i + 1) % 3], t[(i + 2) % 3]), key=_label_sort_key))
            pair_third.setdefault(pair, set()).add(t[i])

    face_corners = [g.face_corners[f] for f in _FACE_ORDER]
    vertex_of_corner = [g.vertex_index[v] for (_, v) in g.corners]
    corners_of_vertex = g.vertex_corners

    sort_memo: dict[tuple, tuple] = {}

    def sorted_triple(t: tuple) -> tuple:
        hit = sort_memo.get(t)
        if hit is None:
            hit = tuple(sorted(t, key=_RANK.__getitem__))
            sort_memo[t] = hit
        return hit

    def joint_ok(used_pinning: frozenset) -> bool:
        if not used_pinning:
            return True
        sys = case.system.copy()
        try:
            for t in sorted(used_pinning):
                sys.add_equation(type_equation(t), VERTEX_SUM)
        except Inconsistent:
            return False
        return _system_ok(sys)

    joint_cache: dict[frozenset, bool] = {frozenset(): True}

    def extend(k: int, asg: list, fill: list, used: frozenset, found: list) -> None:
        if k == 12:
            found.append(tuple(asg))
            return
        corners = face_corners[k]
        for align in aligns:
            touched = []
            ok = True
            new_used = used
            for j, ci in enumerate(corners):
                asg[ci] = align[j]
                touched.append(ci)
                vi = vertex_of_corner[ci]
                fill[vi] += 1
                if fill[vi] == 3:
                    t = sorted_triple(tuple(asg[c] for c in corners_of_vertex[vi]))
                    if t not in admissible:
                        ok = False
                        break
                    if t in pinning:
                        new_used = new_used | {t}
                elif fill[vi] == 2:
                    pair = tuple(
                        sorted(
                            (asg[c] for c in corners_of_vertex[vi] if asg[c] is not None),
                            key=_RANK.__getitem__,
                        )
                    )
                    if not pair_third.get(pair):
                        ok = False
                        break
            if ok and new_used != used:
                if new_used not in joint_cache:
                    joint_cache[new_used] = joint_ok(new_used)
                ok = joint_cache[new_used]
            if ok:
                extend(k + 1, asg, fill, new_used, found)
            for ci in touched:
                asg[ci] = None
                fill[vertex_of_corner[ci]] -= 1

    def run_top(align0: tuple[str, ...]) -> list:
        asg: list = [None] * 60
        fill = [0] * 20
        for j, ci in enumerate(face_corners[0]):
            asg[ci] = align0[j]
            fill[vertex_of_corner[ci]] += 1
        found: list = []
        extend(1, asg, fill, frozenset(), found)
        return found

    raw: list = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for chunk in pool.map(run_top, aligns):
                raw.extend(chunk)
    else:
        for align0 in aligns:
            raw.extend(run_top(align0))

    perms = profile_stabilizer_perms(case, profile)
    canon, rotation_orbits = canonical_set(raw, "corners", g, label_perms=perms)
    return CornerEnumeration(
        case_index=case.index,
        profile=profile,
        labelings=tuple(sorted(canon)),
        count_full_group=len(canon),
        count_rotation_group=rotation_orbits,
    )


def enumerate_case(
    g: DodecGraph, case: AngleCase, threads: int = 1
) -> tuple[list[CornerEnumeration], tuple[tuple[str, ...], ...]]:
    """Per profile enumerations plus the pooled canonical labeling set."""
    runs = [enumerate_corner_labelings(g, case, p, threads=threads) for p in case_profiles(case)]
    perms = relation_preserving_perms(case)
    pooled = {
        canonicalize(lab, "corners", g, label_perms=perms)
        for run in runs
        for lab in run.labelings
    }
    return runs, tuple(sorted(pooled))


def avc_of(g: DodecGraph, labeling: Sequence[str]) -> Counter:
    """Multiset of vertex angle types with counts."""
    out = Counter()
    for vi, corners in g.vertex_corners.items():
        out[sort_type(labeling[c] for c in corners)] += 1
    return out


def avc_string(counts: Mapping[VertexType, int]) -> str:
    parts = []
    for typ in sorted(counts, key=lambda t: tuple(map(_label_sort_key, t))):
        body = " ".join(typ)
        parts.append(f"{counts[typ]}({body})")
    return "{" + ", ".join(parts) + "}"


# ----------------------------------------------------------------------
# documented exchange moves


def exchange_sites(
    g: DodecGraph, labeling: Sequence[str], pair: tuple[str, str] = ("beta", "gamma")
) -> list[int]:
    """Edges around which the two labels can be swapped in both adjacent
    tiles while every vertex keeps its type."""
    x, y = pair
    sites = []
    for ei, (f1, f2) in g.edge_faces.items():
        u, v = g.edge_vertices[ei]
        try:
            cf = [g.corner_index[(f1, g.vertices[u])], g.corner_index[(f1, g.vertices[v])]]
            cg = [g.corner_index[(f2, g.vertices[u])], g.corner_index[(f2, g.vertices[v])]]
        except KeyError:
            continue
        a, b = labeling[cf[0]], labeling[cf[1]]
        c, d = labeling[cg[0]], labeling[cg[1]]
        if {a, b} == {x, y} and a == d and b == c:
            sites.append(ei)
    return sites


def apply_exchange(
    g: DodecGraph,
    labeling: Sequence[str],
    ei: int,
    pair: tuple[str, str] = ("beta", "gamma"),
) -> tuple[str, ...]:
    x, y = pair
    swap = {x: y, y: x}
    f1, f2 = g.edge_faces[ei]
    u, v = g.edge_vertices[ei]
    out = list(labeling)
    for f in (f1, f2):
        for w in (u, v):
            ci = g.corner_index[(f, g.vertices[w])]
            out[ci] = swap[out[ci]]
    return tuple(out)


def exchange_closure_families(
    g: DodecGraph,
    labelings: Iterable[tuple[str, ...]],
    canon,
    pair: tuple[str, str] = ("beta", "gamma"),
) -> list[set]:
    """Group labelings into connected components under exchange moves.

    canon maps a labeling to its canonical form; moves landing outside the
    given set are ignored (they cannot, when the set is enumerator output).
    """
    labelings = list(labelings)
    keys = [canon(L) for L in labelings]
    index = {k: i for i, k in enumerate(keys)}
    parent = list(range(len(labelings)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    for i, L in enumerate(labelings):
        for ei in exchange_sites(g, L, pair):
            img = canon(apply_exchange(g, L, ei, pair))
            j = index.get(img)
            if j is not None:
                union(i, j)
    comps: dict[int, set] = {}
    for i, k in enumerate(keys):
        comps.setdefault(find(i), set()).add(k)
    return list(comps.values())


# ----------------------------------------------------------------------
# independent vertex driven enumerator (test oracle)


def enumerate_corner_labelings_by_vertex(
    g: DodecGraph, case: AngleCase, profile: Sequence[str]
) -> set:
    """Slow oracle: assign vertex types vertex by vertex instead of face
    alignments, then keep assignments whose faces all match the profile.
    Canonicalized the same way as the fast enumerator."""
    profile = tuple(profile)
    variants = set(_dihedral_variants(profile))
    admissible = case.admissible_types()
    pinning = {
        t: None for t in admissible if not case.system.implies(type_equation(t), VERTEX_SUM)
    }

    face_corner_pos = {}
    for f in g.faces:
        for j, ci in enumerate(g.face_corners[f]):
            face_corner_pos[ci] = (f, j)

    def face_partial_ok(asg, f) -> bool:
        cyc = [asg[ci] for ci in g.face_corners[f]]
        for var in variants:
            if all(c is None or c == var[j] for j, c in enumerate(cyc)):
                return True
        return False

    results = set()
    order = sorted(range(len(g.vertices)))

    def joint_ok(used: frozenset) -> bool:
        sys = case.system.copy()
        try:
            for t in sorted(used):
                sys.add_equation(type_equation(t), VERTEX_SUM)
        except Inconsistent:
            return False
        return _system_ok(sys)

    def rec(k: int, asg: list, used: frozenset) -> None:
        if k == len(order):
            if all(tuple(asg[ci] for ci in g.face_corners[f]) in variants for f in g.faces):
                results.add(tuple(asg))
            return
        vi = order[k]
        corners = g.vertex_corners[vi]
        for t in admissible:
            for perm in set(itertools.permutations(t)):
                ok = True
                for ci, lab in zip(corners, perm):
                    asg[ci] = lab
                faces = {g.corners[ci][0] for ci in corners}
                for f in faces:
                    if not face_partial_ok(asg, f):
                        ok = False
                        break
                used2 = used | {t} if t in pinning else used
                if ok and used2 != used and not joint_ok(used2):
                    ok = False
                if ok:
                    rec(k + 1, asg, used2)
                for ci in corners:
                    asg[ci] = None
        return

    rec(0, [None] * 60, frozenset())
    perms = profile_stabilizer_perms(case, profile)
    return {canonicalize(lab, "corners", g, label_perms=perms) for lab in results}
