"""Numeric spherical trigonometry on the unit sphere.

Conventions: points are unit 3-vectors, edges are great arcs with length
in (0, pi), polygons are listed counterclockwise as seen from outside the
sphere, interior angles live in (0, 2*pi) and may be reflex.  Area is
spherical excess (Girard).
"""

from __future__ import annotations

import math

import numpy as np

ARC_EPS = 1e-9  # arcs closer than this to 0 or pi are ill conditioned


class SphereDomainError(ValueError):
    """Degenerate configuration (coincident or antipodal points)."""


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise SphereDomainError("zero vector")
    return v / n


def arc_length(p, q) -> float:
    """Great arc distance between two unit vectors, in [0, pi]."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    return math.atan2(np.linalg.norm(np.cross(p, q)), float(np.dot(p, q)))


def tangent_toward(p, q) -> np.ndarray:
    """Unit tangent at p along the great arc toward q."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    t = q - np.dot(p, q) * p
    n = np.linalg.norm(t)
    if n < ARC_EPS:
        raise SphereDomainError("tangent undefined: points coincident or antipodal")
    return t / n


def angle_at(v, p, q) -> float:
    """Unsigned angle at v between the arcs v->p and v->q, in [0, pi]."""
    u1 = tangent_toward(v, p)
    u2 = tangent_toward(v, q)
    return math.atan2(np.linalg.norm(np.cross(u1, u2)), float(np.dot(u1, u2)))


def interior_angle(v, prev_pt, next_pt) -> float:
    """Interior angle at v of a counterclockwise polygon, in (0, 2*pi).

    Reflex angles come out above pi; the sign is read off the outward
    normal, which on the unit sphere is v itself.
    """
    u_in = tangent_toward(v, prev_pt)
    u_out = tangent_toward(v, next_pt)
    ang = math.atan2(float(np.dot(np.cross(u_out, u_in), v)), float(np.dot(u_out, u_in)))
    if ang <= 0:
        ang += 2 * math.pi
    return ang


def rotate_about(axis, v, ang) -> np.ndarray:
    """Rodrigues rotation of v by ang about a unit axis."""
    axis = np.asarray(axis, float)
    v = np.asarray(v, float)
    c, s = math.cos(ang), math.sin(ang)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1 - c)


def step_geodesic(p, t, length):
    """Move along the geodesic from p with unit tangent t; returns the new
    point and the parallel transported tangent."""
    c, s = math.cos(length), math.sin(length)
    return p * c + t * s, -p * s + t * c


# ----------------------------------------------------------------------
# triangle areas


def sss_excess(a: float, b: float, c: float) -> float:
    """Spherical excess of a triangle from its three sides."""
    s = 0.5 * (a + b + c)
    prod = (
        math.tan(0.5 * s)
        * math.tan(0.5 * (s - a))
        * math.tan(0.5 * (s - b))
        * math.tan(0.5 * (s - c))
    )
    if prod < 0:
        if prod > -1e-14:
            prod = 0.0
        else:
            raise SphereDomainError(f"sides violate the triangle inequality: {a}, {b}, {c}")
    return 4.0 * math.atan(math.sqrt(prod))


def opposite_side(l1: float, included: float, l2: float) -> float:
    """Third side of a triangle from two sides and the included angle."""
    cc = math.cos(l1) * math.cos(l2) + math.sin(l1) * math.sin(l2) * math.cos(included)
    return math.acos(max(-1.0, min(1.0, cc)))


def sas_area(l1: float, included: float, l2: float) -> float:
    """Area (spherical excess) of the SAS triangle.

    Sides in (0, pi), included angle in (0, pi).
    """
    if not (0 < l1 < math.pi and 0 < l2 < math.pi):
        raise SphereDomainError("side out of range (0, pi)")
    if not (0 < included < math.pi):
        raise SphereDomainError("included angle out of range (0, pi)")
    return sss_excess(l1, l2, opposite_side(l1, included, l2))


def triangle_corner_angle(adj1: float, adj2: float, opposite: float) -> float:
    """Corner angle from the three sides (law of cosines), at the vertex
    between sides adj1 and adj2."""
    num = math.cos(opposite) - math.cos(adj1) * math.cos(adj2)
    den = math.sin(adj1) * math.sin(adj2)
    if den < 1e-300:
        raise SphereDomainError("degenerate triangle corner")
    return math.acos(max(-1.0, min(1.0, num / den)))


# ----------------------------------------------------------------------
# polygons


def polygon_interior_angles(vertices: np.ndarray) -> np.ndarray:
    n = len(vertices)
    return np.array(
        [
            interior_angle(vertices[i], vertices[(i - 1) % n], vertices[(i + 1) % n])
            for i in range(n)
        ]
    )


def polygon_edge_lengths(vertices: np.ndarray) -> np.ndarray:
    """Edge i runs from vertex i-1 to vertex i."""
    n = len(vertices)
    return np.array([arc_length(vertices[(i - 1) % n], vertices[i]) for i in range(n)])


def polygon_area(vertices: np.ndarray) -> float:
    """Girard: sum of interior angles minus (n-2)*pi, for a simple
    counterclockwise polygon."""
    n = len(vertices)
    return float(np.sum(polygon_interior_angles(vertices))) - (n - 2) * math.pi


def _arcs_cross(p1, p2, q1, q2) -> bool:
    """Do two great arcs meet at a point interior to both?"""
    n1 = np.cross(p1, p2)
    n2 = np.cross(q1, q2)
    d = np.cross(n1, n2)
    nd = np.linalg.norm(d)
    if nd < 1e-12:
        return False  # same great circle; adjacency handled by caller
    d = d / nd
    for cand in (d, -d):
        if (
            _within_arc(cand, p1, p2)
            and _within_arc(cand, q1, q2)
        ):
            return True
    return False


def _within_arc(x, a, b, tol=1e-9) -> bool:
    return arc_length(a, x) + arc_length(x, b) <= arc_length(a, b) + tol


def polygon_is_simple(vertices: np.ndarray) -> bool:
    """No two nonadjacent edges intersect."""
    n = len(vertices)
    edges = [(vertices[(i - 1) % n], vertices[i]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j - i) % n in (1, n - 1):
                continue
            if _arcs_cross(*edges[i], *edges[j]):
                return False
    return True
