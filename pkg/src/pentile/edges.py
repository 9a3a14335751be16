"""Edge length labelings of the dodecahedral graph.

A tile profile is a cyclic sequence of 5 abstract length labels, distinct
labels meaning distinct lengths, compared up to rotation and reflection.
The enumerator finds every assignment of labels to the 30 edges such that
each face matches the profile, then reduces modulo the symmetry group and
the label permutations fixing the profile.  Exhaustive backtracking, no
heuristic cutoffs: an empty result certifies impossibility.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .dodecahedron import DodecGraph, cached_automorphisms, canonical_set, canonicalize

# The seven multisets of five length labels, in first-use label order.
COMBINATIONS: dict[str, tuple[str, ...]] = {
    "a5": ("a",) * 5,
    "a4b": ("a", "a", "a", "a", "b"),
    "a3b2": ("a", "a", "a", "b", "b"),
    "a3bc": ("a", "a", "a", "b", "c"),
    "a2b2c": ("a", "a", "b", "b", "c"),
    "a2bcd": ("a", "a", "b", "c", "d"),
    "abcde": ("a", "b", "c", "d", "e"),
}

COMBINATION_ORDER = tuple(COMBINATIONS)


def _dihedral_variants(seq: Sequence[str]) -> list[tuple[str, ...]]:
    seq = tuple(seq)
    out = []
    for s in (seq, seq[::-1]):
        for r in range(5):
            out.append(s[r:] + s[:r])
    return out


def _first_use_normal(seq: Sequence[str]) -> tuple[str, ...]:
    order = "abcdefghij"
    mapping: dict[str, str] = {}
    out = []
    for x in seq:
        if x not in mapping:
            mapping[x] = order[len(mapping)]
        out.append(mapping[x])
    return tuple(out)


def equal_multiplicity_perms(labels: Iterable[str], multiset: Mapping[str, int]) -> list[dict]:
    """Label permutations allowed for dedup: only within equal multiplicity."""
    groups: dict[int, list[str]] = {}
    for lab in labels:
        groups.setdefault(multiset[lab], []).append(lab)
    perms = [dict()]
    for _, grp in sorted(groups.items()):
        new = []
        for base in perms:
            for p in itertools.permutations(grp):
                d = dict(base)
                d.update(zip(grp, p))
                new.append(d)
        perms = new
    return perms


def enumerate_edge_profiles() -> dict[str, list[tuple[str, ...]]]:
    """All arrangements of each combination, up to rotation, reflection and
    permutations of labels with equal multiplicity."""
    out: dict[str, list[tuple[str, ...]]] = {}
    for name, multiset_seq in COMBINATIONS.items():
        counts = Counter(multiset_seq)
        perms = equal_multiplicity_perms(counts, counts)
        seen = set()
        reps = []
        for perm in sorted(set(itertools.permutations(multiset_seq))):
            variants = set()
            for p in perms:
                relabeled = tuple(p.get(x, x) for x in perm)
                variants.update(_dihedral_variants(relabeled))
            key = min(variants)
            if key not in seen:
                seen.add(key)
                reps.append(_first_use_normal(key))
        out[name] = sorted(set(reps))
    return out


def profile_stabilizer_perms(arrangement: Sequence[str]) -> list[dict]:
    """Equal-multiplicity label permutations mapping the arrangement to
    itself up to rotation and reflection."""
    counts = Counter(arrangement)
    variants = set(_dihedral_variants(arrangement))
    out = []
    for p in equal_multiplicity_perms(counts, counts):
        if tuple(p.get(x, x) for x in arrangement) in variants:
            out.append(p)
    return out


def _alignments(arrangement: Sequence[str]) -> list[tuple[str, ...]]:
    """Distinct ways the profile can sit on a face boundary."""
    return sorted(set(_dihedral_variants(arrangement)))


# ----------------------------------------------------------------------
# local degree-3 feasibility filter


@dataclass(frozen=True)
class FilterVerdict:
    feasible: bool
    witness: str = ""


def degree3_arrangement_filter(g: DodecGraph, arrangement: Sequence[str]) -> FilterVerdict:
    """Local propagation test around one tile with all degree 3 vertices.

    Places the profile on face 1 and asks whether the five surrounding
    tiles admit profile alignments consistent with every shared edge of
    the closed neighborhood.  Any labeling of the whole graph restricts
    to such an assignment, so infeasibility here certifies that no global
    labeling exists.  Used only as a search accelerator; the enumerator
    remains the source of truth.
    """
    aligns = _alignments(arrangement)
    ring = list(g.faces[1:7])  # faces 2..6 surround face 1
    assignment: dict[int, str] = {}
    for j, ei in enumerate(g.face_edges[1]):
        assignment[ei] = arrangement[j]

    def fits(face: int, align: tuple[str, ...], asg: dict[int, str]) -> dict[int, str] | None:
        upd = {}
        for j, ei in enumerate(g.face_edges[face]):
            want = align[j]
            have = asg.get(ei, upd.get(ei))
            if have is not None and have != want:
                return None
            upd[ei] = want
        return upd

    def search(k: int, asg: dict[int, str]) -> bool:
        if k == len(ring):
            return True
        face = ring[k]
        for align in aligns:
            upd = fits(face, align, asg)
            if upd is not None:
                asg2 = dict(asg)
                asg2.update(upd)
                if search(k + 1, asg2):
                    return True
        return False

    for k in range(len(ring)):
        # find the first neighbor that cannot be labeled at all, for the witness
        face = ring[k]
        if not any(fits(face, a, assignment) for a in aligns):
            return FilterVerdict(
                False,
                f"tile P{face} admits no profile alignment against the center tile",
            )
    if search(0, dict(assignment)):
        return FilterVerdict(True)
    return FilterVerdict(
        False,
        "no joint alignment of the five surrounding tiles is consistent "
        "with the shared edges of the closed neighborhood",
    )


# ----------------------------------------------------------------------
# exhaustive enumeration


@dataclass(frozen=True)
class EdgeEnumeration:
    combination: str
    arrangement: tuple[str, ...]
    labelings: tuple[tuple[str, ...], ...]  # canonical, indexed by edge index
    count_full_group: int
    count_rotation_group: int


_FACE_ORDER = (1, 2, 3, 4, 5, 6, 7, 11, 8, 9, 10, 12)  # breadth first from face 1


def enumerate_edge_labelings(
    g: DodecGraph,
    arrangement: Sequence[str],
    combination: str | None = None,
    use_filter: bool = True,
    threads: int = 1,
) -> EdgeEnumeration:
    """All labelings where every face matches the arrangement, canonical
    modulo graph symmetry and profile-fixing label permutations."""
    arrangement = tuple(arrangement)
    name = combination or _combination_of(arrangement)
    if use_filter and not degree3_arrangement_filter(g, arrangement).feasible:
        return EdgeEnumeration(name, arrangement, (), 0, 0)

    aligns = _alignments(arrangement)
    face_edge = [g.face_edges[f] for f in _FACE_ORDER]

    def extend(k: int, asg: list, found: list) -> None:
        if k == 12:
            found.append(tuple(asg))
            return
        edges = face_edge[k]
        for align in aligns:
            touched = []
            ok = True
            for j, ei in enumerate(edges):
                want = align[j]
                have = asg[ei]
                if have is None:
                    asg[ei] = want
                    touched.append(ei)
                elif have != want:
                    ok = False
                    break
            if ok:
                extend(k + 1, asg, found)
            for ei in touched:
                asg[ei] = None

    def run_top(align0: tuple[str, ...]) -> list:
        asg: list = [None] * 30
        for j, ei in enumerate(face_edge[0]):
            asg[ei] = align0[j]
        found: list = []
        extend(1, asg, found)
        return found

    raw: list = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for chunk in pool.map(run_top, aligns):
                raw.extend(chunk)
    else:
        for align0 in aligns:
            raw.extend(run_top(align0))

    perms = profile_stabilizer_perms(arrangement)
    canon, rotation_orbits = canonical_set(raw, "edges", g, label_perms=perms)
    return EdgeEnumeration(
        combination=name,
        arrangement=arrangement,
        labelings=tuple(sorted(canon)),
        count_full_group=len(canon),
        count_rotation_group=rotation_orbits,
    )


def _combination_of(arrangement: Sequence[str]) -> str:
    sig = tuple(sorted(Counter(arrangement).values(), reverse=True))
    for name, seq in COMBINATIONS.items():
        if tuple(sorted(Counter(seq).values(), reverse=True)) == sig:
            return name
    raise ValueError(f"unrecognized arrangement {arrangement}")


def enumerate_combination(
    g: DodecGraph, name: str, use_filter: bool = True, threads: int = 1
) -> list[EdgeEnumeration]:
    """Run every arrangement of one combination."""
    profiles = enumerate_edge_profiles()[name]
    return [
        enumerate_edge_labelings(g, arr, name, use_filter=use_filter, threads=threads)
        for arr in profiles
    ]


def enumerate_all_edge_labelings(
    g: DodecGraph, use_filter: bool = True, threads: int = 1
) -> dict[str, list[EdgeEnumeration]]:
    return {
        name: enumerate_combination(g, name, use_filter=use_filter, threads=threads)
        for name in COMBINATION_ORDER
    }


# ----------------------------------------------------------------------
# edgewise vertex combinations


def evc(g: DodecGraph, labeling: Sequence[str]) -> Counter:
    """Multiset of vertex edge types: for each vertex the sorted triple of
    labels on its three edges."""
    by_vertex: dict[int, list[str]] = {vi: [] for vi in range(len(g.vertices))}
    for ei, lab in enumerate(labeling):
        v1, v2 = g.edge_vertices[ei]
        by_vertex[v1].append(lab)
        by_vertex[v2].append(lab)
    return Counter(tuple(sorted(labs)) for labs in by_vertex.values())


def evc_string(counts: Counter) -> str:
    parts = []
    for typ in sorted(counts):
        n = counts[typ]
        body = "".join(typ)
        parts.append(f"{n}{body}")
    return "{" + ", ".join(parts) + "}"


def check_evc_identities(g: DodecGraph, labeling: Sequence[str]) -> bool:
    """Total vertices is 20 and each label is double counted correctly."""
    counts = evc(g, labeling)
    if sum(counts.values()) != len(g.vertices):
        return False
    label_totals: Counter = Counter()
    for typ, n in counts.items():
        for lab in typ:
            label_totals[lab] += n
    edge_totals = Counter(labeling)
    return all(label_totals[lab] == 2 * edge_totals[lab] for lab in edge_totals)


def face_congruence_ok(g: DodecGraph, labeling: Sequence[str], arrangement: Sequence[str]) -> bool:
    """Re-check that every face boundary matches the profile."""
    variants = set(_dihedral_variants(arrangement))
    for f in g.faces:
        cyc = tuple(labeling[ei] for ei in g.face_edges[f])
        if cyc not in variants:
            return False
    return True
