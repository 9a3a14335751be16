"""Pentagon constructions and the closure searches.

construct_t5 builds the two parameter pentagon family: edges (c,a,a,b,b)
with angles (beta, alpha, delta, alpha, gamma), alpha = 2*pi/3 exactly at
the a^2 and b^2 corners, and area pi/3.  Given a and b the tile is found
by a monotone one dimensional root search for the middle angle.

construct_walk runs a geodesic polygonal walk and reports its closure
defect.  solve_isolated grid seeds and Newton refines the two closure
equations of the isolated classes T1..T4, whose pentagons have four equal
edges, a derived fifth edge, and angles tied to one free angle parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sphere import (
    ARC_EPS,
    SphereDomainError,
    arc_length,
    interior_angle,
    normalize,
    opposite_side,
    polygon_area,
    polygon_edge_lengths,
    polygon_interior_angles,
    polygon_is_simple,
    rotate_about,
    sas_area,
    sss_excess,
    step_geodesic,
    tangent_toward,
    triangle_corner_angle,
)

ALPHA = 2.0 * math.pi / 3.0
TILE_AREA = math.pi / 3.0


class PentagonError(ValueError):
    pass


@dataclass(frozen=True)
class SphericalPentagon:
    """Five unit vectors, counterclockwise from outside.

    Edge i runs from vertex i-1 to vertex i, and the interior angle i sits
    at vertex i between edges i and i+1, matching the tile schema slot
    convention (edge label, following corner label).
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, float)
        if v.shape != (5, 3):
            raise PentagonError("need 5 points in R^3")
        norms = np.linalg.norm(v, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise PentagonError("vertices must be unit vectors within 1e-12")
        object.__setattr__(self, "vertices", v)

    @property
    def edge_lengths(self) -> np.ndarray:
        return polygon_edge_lengths(self.vertices)

    @property
    def angles(self) -> np.ndarray:
        return polygon_interior_angles(self.vertices)

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def is_simple(self) -> bool:
        return polygon_is_simple(self.vertices)

    def girard_defect(self) -> float:
        """Difference between the angle excess and the fan triangulated
        area; small for a valid simple polygon."""
        v = self.vertices
        tri = 0.0
        for i in range(1, 4):
            tri += sss_excess(
                arc_length(v[0], v[i]),
                arc_length(v[i], v[i + 1]),
                arc_length(v[i + 1], v[0]),
            )
        return abs(self.area - tri)


def _ensure_ccw(vertices: np.ndarray) -> np.ndarray:
    """Mirror the configuration if the cycle reads clockwise."""
    total = float(np.sum(polygon_interior_angles(vertices)))
    if total > 5 * math.pi:  # clockwise reading measures 10*pi - true sum
        flipped = vertices.copy()
        flipped[:, 1] *= -1.0
        return flipped
    return vertices


def triangle_cap_area(t: float) -> float:
    """Area of the isosceles triangle with legs t and apex angle 2*pi/3."""
    return sas_area(t, ALPHA, t)


@dataclass(frozen=True)
class T5Pentagon:
    pentagon: SphericalPentagon
    a: float
    b: float
    c: float
    beta: float
    gamma: float
    delta: float
    middle_angle: float


def construct_t5(a: float, b: float, area_tol: float = 1e-12) -> T5Pentagon:
    """Pentagon with edges (c,a,a,b,b), angles (beta,alpha,delta,alpha,gamma).

    Splits the tile into an a-leg triangle, a b-leg triangle and a middle
    triangle hinged at the delta corner; the hinge angle is found by
    bracketing the first root of area = pi/3, which is monotone on the
    bracket.  Requires cap(a) + cap(b) <= pi/3.
    """
    if not (0 < a < math.pi and 0 < b < math.pi):
        raise PentagonError("edge lengths must lie in (0, pi)")
    area_a = triangle_cap_area(a)
    area_b = triangle_cap_area(b)
    target = TILE_AREA - area_a - area_b
    if target <= 0:
        raise PentagonError(
            "no such pentagon: cap(a) + cap(b) exceeds the tile area pi/3"
        )
    f = opposite_side(a, ALPHA, a)  # diagonal of the a triangle
    g = opposite_side(b, ALPHA, b)  # diagonal of the b triangle

    def middle_area(theta: float) -> float:
        return sas_area(f, theta, g)

    # the middle area rises from 0, peaks, and falls back to a degenerate
    # configuration: take the smallest hinge angle reaching the target, or
    # the peak itself when the target is exactly the peak (the flat corner
    # boundary of the admissible region, e.g. the projected cube)
    theta_peak = _argmax_unimodal(middle_area, lo=1e-7, hi=math.pi - 1e-7)
    peak = middle_area(theta_peak)
    if target > peak + 1e-11:
        raise PentagonError(
            "no such pentagon: remaining area exceeds the largest middle triangle"
        )
    if target >= peak - 1e-13:
        theta = theta_peak
    else:
        theta = _bisect_increasing(middle_area, target, lo=1e-9, hi=theta_peak, tol=area_tol)

    psi_a = triangle_corner_angle(a, f, a)  # angle of the a triangle at the hinge
    psi_b = triangle_corner_angle(b, g, b)
    delta = psi_a + theta + psi_b
    c = opposite_side(f, theta, g)

    # hinge at the north pole; the two triangle fans open by azimuth
    hinge = np.array([0.0, 0.0, 1.0])

    def on_sphere(colat: float, azim: float) -> np.ndarray:
        return np.array(
            [math.sin(colat) * math.cos(azim), math.sin(colat) * math.sin(azim), math.cos(colat)]
        )

    vb = on_sphere(a, 0.0)                    # corner with angle alpha (a side)
    vc = on_sphere(f, psi_a)                  # corner with angle beta
    vd = on_sphere(g, psi_a + theta)          # corner with angle gamma
    ve = on_sphere(b, delta)                  # corner with angle alpha (b side)
    # schema order (beta, alpha, delta, alpha, gamma)
    verts = _ensure_ccw(np.array([vc, vb, hinge, ve, vd]))
    pent = SphericalPentagon(verts)
    ang = pent.angles
    return T5Pentagon(
        pentagon=pent,
        a=a,
        b=b,
        c=c,
        beta=float(ang[0]),
        gamma=float(ang[4]),
        delta=float(ang[2]),
        middle_angle=theta,
    )


def _argmax_unimodal(fn, lo: float, hi: float) -> float:
    """Peak of a smooth unimodal function by bisection on the slope sign."""
    h = 1e-5

    def slope(x: float) -> float:
        return fn(x + h) - fn(x - h)

    a_, b_ = lo + h, hi - h
    sa, sb = slope(a_), slope(b_)
    if sa <= 0:
        return a_
    if sb >= 0:
        return b_
    for _ in range(200):
        m = 0.5 * (a_ + b_)
        if b_ - a_ < 1e-13:
            break
        sm = slope(m)
        if sm > 0:
            a_ = m
        else:
            b_ = m
    return 0.5 * (a_ + b_)


def _bisect_increasing(fn, target: float, lo: float, hi: float, tol: float) -> float:
    """Root of fn(x) = target for fn increasing on [lo, hi]."""
    if fn(lo) - target > 0:
        return lo
    a_, b_ = lo, hi
    for _ in range(200):
        m = 0.5 * (a_ + b_)
        v = fn(m) - target
        if abs(v) <= tol or (b_ - a_) < 1e-16:
            return m
        if v < 0:
            a_ = m
        else:
            b_ = m
    return 0.5 * (a_ + b_)


# ----------------------------------------------------------------------
# geodesic walks


@dataclass(frozen=True)
class WalkResult:
    vertices: np.ndarray          # k+1 points
    final_heading: np.ndarray
    position_gap: float           # arc distance from the last point to the start
    heading_gap: float            # angle between the final heading and the arc toward the start
    final_angle: float            # interior angle implied at the start when the walk closes

    @property
    def closes(self) -> bool:
        return self.position_gap < 1e-9


def construct_walk(edges, turns, start=(0.0, 0.0, 1.0), heading=(1.0, 0.0, 0.0)) -> WalkResult:
    """Walk the given edge lengths, turning by the given interior angles.

    Counterclockwise convention: at a vertex with interior angle t the
    heading rotates by pi - t about the vertex.  turns has one entry less
    than edges.  Zero length edges are allowed and simply merge turns.
    """
    edges = list(edges)
    turns = list(turns)
    if len(turns) != len(edges) - 1:
        raise ValueError("need exactly len(edges) - 1 turn angles")
    p = normalize(start)
    h = np.asarray(heading, float)
    h = h - np.dot(h, p) * p
    n = np.linalg.norm(h)
    if n < ARC_EPS:
        raise SphereDomainError("heading parallel to start point")
    h = h / n
    pts = [p]
    for i, L in enumerate(edges):
        if not (0 <= L < math.pi - ARC_EPS):
            raise SphereDomainError(f"edge length {L} outside [0, pi)")
        p, h = step_geodesic(p, h, float(L))
        pts.append(p)
        if i < len(turns):
            h = rotate_about(p, h, math.pi - float(turns[i]))
    pts = np.array(pts)
    start_pt = pts[0]
    end_pt = pts[-1]
    gap = arc_length(end_pt, start_pt)
    if gap > 1e-9:
        to_start = tangent_toward(end_pt, start_pt)
        heading_gap = math.atan2(
            float(np.dot(np.cross(h, to_start), end_pt)), float(np.dot(h, to_start))
        )
        final_angle = float("nan")
    else:
        heading_gap = 0.0
        # angle at the start between the reversed arrival direction and the
        # original departure direction
        arrive = -h
        depart = tangent_toward(start_pt, pts[1]) if len(pts) > 1 else h
        arrive = arrive - np.dot(arrive, start_pt) * start_pt
        arrive = arrive / np.linalg.norm(arrive)
        ang = math.atan2(
            float(np.dot(np.cross(depart, arrive), start_pt)), float(np.dot(depart, arrive))
        )
        if ang <= 0:
            ang += 2 * math.pi
        final_angle = ang
    return WalkResult(
        vertices=pts,
        final_heading=h,
        position_gap=gap,
        heading_gap=heading_gap,
        final_angle=final_angle,
    )


# ----------------------------------------------------------------------
# isolated classes


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_iter: int = 50
    fd_step: float = 1e-7
    grid: int = 200
    dedup_radius: float = 1e-8


# Tile corner cycles of the four isolated classes, in the canonical labels
# of the five distinct angle case: alpha = 2pi/3 and, writing e for the
# free angle, beta = 2e - alpha, gamma = 2*alpha - e, delta = 3*alpha - 2e.
# b_slot is the derived closing edge (the gamma/epsilon edge where present;
# T1 has no such edge and closes on slot 0 by convention).  Cross checked
# against the joint classifier by the test suite.
ISOLATED_ARRANGEMENTS: dict[str, tuple[tuple[str, ...], int]] = {
    "T1": (("alpha", "beta", "epsilon", "delta", "gamma"), 0),
    "T2": (("alpha", "beta", "delta", "epsilon", "gamma"), 4),
    "T3": (("alpha", "beta", "epsilon", "gamma", "delta"), 3),
    "T4": (("alpha", "beta", "gamma", "epsilon", "delta"), 3),
}

EPS_RANGE = (math.pi / 3.0, math.pi)  # open range of the free angle


def angle_values(eps: float) -> dict[str, float]:
    return {
        "alpha": ALPHA,
        "beta": 2.0 * eps - ALPHA,
        "gamma": 2.0 * ALPHA - eps,
        "delta": 3.0 * ALPHA - 2.0 * eps,
        "epsilon": eps,
    }


@dataclass(frozen=True)
class IsolatedSolution:
    class_id: str
    a: float
    eps: float
    b: float
    residual: float
    equilateral: bool
    regular: bool
    angles: tuple[float, ...]
    vertices: np.ndarray = field(repr=False)


def _turn_values(class_id: str, eps: float):
    cycle, b_slot = ISOLATED_ARRANGEMENTS[class_id]
    vals = angle_values(eps)
    order = [(b_slot + i) % 5 for i in range(5)]
    turns = tuple(vals[cycle[order[i]]] for i in (1, 2, 3))
    end_want = vals[cycle[order[4]]]
    start_want = vals[cycle[order[0]]]
    return order, turns, start_want, end_want


def _fast_closure(a: float, turns, start_want: float, end_want: float):
    """Closure residuals for a four-edge walk, plain float arithmetic.

    Starts at the north pole heading +x, walks four edges of length a with
    the three given interior turns, and measures the interior angles the
    closing edge would make at both ends.
    """
    ca, sa = math.cos(a), math.sin(a)
    px, py, pz = 0.0, 0.0, 1.0
    hx, hy, hz = 1.0, 0.0, 0.0
    pts = [(px, py, pz)]
    for i in range(4):
        qx = px * ca + hx * sa
        qy = py * ca + hy * sa
        qz = pz * ca + hz * sa
        tx = -px * sa + hx * ca
        ty = -py * sa + hy * ca
        tz = -pz * sa + hz * ca
        px, py, pz = qx, qy, qz
        hx, hy, hz = tx, ty, tz
        pts.append((px, py, pz))
        if i < 3:
            ang = math.pi - turns[i]
            c, s = math.cos(ang), math.sin(ang)
            crx = py * hz - pz * hy
            cry = pz * hx - px * hz
            crz = px * hy - py * hx
            dot = px * hx + py * hy + pz * hz
            hx = hx * c + crx * s + px * dot * (1 - c)
            hy = hy * c + cry * s + py * dot * (1 - c)
            hz = hz * c + crz * s + pz * dot * (1 - c)

    def _interior(v, prev_pt, next_pt):
        u_in = _tangent(v, prev_pt)
        u_out = _tangent(v, next_pt)
        cx = u_out[1] * u_in[2] - u_out[2] * u_in[1]
        cy = u_out[2] * u_in[0] - u_out[0] * u_in[2]
        cz = u_out[0] * u_in[1] - u_out[1] * u_in[0]
        s = cx * v[0] + cy * v[1] + cz * v[2]
        c = u_out[0] * u_in[0] + u_out[1] * u_in[1] + u_out[2] * u_in[2]
        ang = math.atan2(s, c)
        return ang + 2 * math.pi if ang <= 0 else ang

    end_angle = _interior(pts[4], pts[3], pts[0])
    start_angle = _interior(pts[0], pts[4], pts[1])
    return (end_angle - end_want, start_angle - start_want), pts


def _tangent(p, q):
    d = p[0] * q[0] + p[1] * q[1] + p[2] * q[2]
    tx, ty, tz = q[0] - d * p[0], q[1] - d * p[1], q[2] - d * p[2]
    n = math.sqrt(tx * tx + ty * ty + tz * tz)
    if n < ARC_EPS:
        raise SphereDomainError("tangent undefined")
    return tx / n, ty / n, tz / n


def isolated_residual(class_id: str, a: float, eps: float) -> np.ndarray:
    order, turns, start_want, end_want = _turn_values(class_id, eps)
    res, _ = _fast_closure(a, turns, start_want, end_want)
    return np.array(res)


def solve_isolated(class_id: str, cfg: NewtonConfig = NewtonConfig()) -> list[IsolatedSolution]:
    """Grid seeded Newton search for the closure system of one class.

    Every converged point is re-verified by building the full pentagon and
    checking the angle relations, simplicity, positivity and the pi/3 area
    independently.  The grid resolution bounds completeness: roots with
    attraction basins smaller than the grid spacing can be missed.
    """
    if class_id not in ISOLATED_ARRANGEMENTS:
        raise ValueError(f"unknown isolated class {class_id!r}")
    lo_e, hi_e = EPS_RANGE
    a_samples = np.linspace(0.05, math.pi - 0.05, cfg.grid)
    e_samples = np.linspace(lo_e + 1e-4, hi_e - 1e-4, cfg.grid)
    norms = np.full((cfg.grid, cfg.grid), np.inf)
    for i, a in enumerate(a_samples):
        for j, e in enumerate(e_samples):
            try:
                r = isolated_residual(class_id, float(a), float(e))
            except SphereDomainError:
                continue
            norms[i, j] = max(abs(r[0]), abs(r[1]))

    seeds = []
    for i in range(cfg.grid):
        for j in range(cfg.grid):
            v = norms[i, j]
            if not np.isfinite(v) or v > 0.6:
                continue
            window = norms[max(0, i - 1) : i + 2, max(0, j - 1) : j + 2]
            if v <= np.min(window):
                seeds.append((float(a_samples[i]), float(e_samples[j])))

    found: list[tuple[float, float]] = []
    for a0, e0 in seeds:
        sol = _newton2(lambda x: isolated_residual(class_id, x[0], x[1]), (a0, e0), cfg)
        if sol is None:
            continue
        a, e = sol
        if not (0 < a < math.pi):
            continue
        if any(abs(a - x) < cfg.dedup_radius and abs(e - y) < cfg.dedup_radius for x, y in found):
            continue
        found.append((a, e))

    out = []
    for a, e in sorted(found):
        order, turns, start_want, end_want = _turn_values(class_id, e)
        res, pts = _fast_closure(a, turns, start_want, end_want)
        residual = float(max(abs(res[0]), abs(res[1])))
        if residual > cfg.tol * 100:
            continue
        cycle, _ = ISOLATED_ARRANGEMENTS[class_id]
        verts = np.empty((5, 3))
        for i, slot in enumerate(order):
            verts[slot] = np.array(pts[i]) / np.linalg.norm(pts[i])
        pent = SphericalPentagon(verts)
        vals = angle_values(e)
        want = np.array([vals[lab] for lab in cycle])
        if np.min(want) < 1e-9 or np.max(want) > 2 * math.pi - 1e-9:
            continue  # a tile angle degenerated to 0 or a full turn
        if np.max(np.abs(pent.angles - want)) > 1e-9:
            continue
        if abs(pent.area - TILE_AREA) > 1e-9:
            continue
        lengths = pent.edge_lengths
        b = float(lengths[order[0]])  # the closing edge slot is order[0]
        if any(not (1e-9 < L < math.pi - 1e-9) for L in lengths):
            continue
        if not pent.is_simple():
            continue
        regular = abs(e - ALPHA) < 1e-7
        out.append(
            IsolatedSolution(
                class_id=class_id,
                a=a,
                eps=e,
                b=b,
                residual=residual,
                equilateral=abs(b - a) < 1e-7,
                regular=regular,
                angles=tuple(float(x) for x in pent.angles),
                vertices=pent.vertices,
            )
        )
    return out


def _newton2(fn, x0, cfg: NewtonConfig):
    x = np.array(x0, float)
    for _ in range(cfg.max_iter):
        try:
            f = fn(x)
        except SphereDomainError:
            return None
        if np.max(np.abs(f)) < cfg.tol:
            return tuple(float(v) for v in x)
        J = np.empty((2, 2))
        h = cfg.fd_step
        try:
            for j in range(2):
                dx = np.zeros(2)
                dx[j] = h
                J[:, j] = (fn(x + dx) - fn(x - dx)) / (2 * h)
        except SphereDomainError:
            return None
        try:
            delta = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            return None
        if np.max(np.abs(delta)) > 0.5:
            delta = delta * (0.5 / np.max(np.abs(delta)))
        x = x + delta
    return None


def regular_edge_length() -> float:
    """Edge arc of the regular dodecahedron, arccos(sqrt(5)/3)."""
    return math.acos(math.sqrt(5.0) / 3.0)
