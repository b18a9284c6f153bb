"""Independent brute-force oracles shared by the test suite.

Everything here is deliberately naive: set scans, all-pairs loops, and
exhaustive enumeration, sharing nothing with the production paths except
the exact predicate kernel.
"""

import itertools
import random

from dtrepair.mesh import PointSet, edge_key
from dtrepair.predicates import CCW


def brute_delaunay_triangles(ps, ids=None):
    """All triangles with an empty circumcircle (the perturbed-world DT),
    by testing every triple against every other point: O(n^4)."""
    k = ps.kernel
    ids = sorted(range(len(ps))) if ids is None else sorted(ids)
    out = set()
    for a, b, c in itertools.combinations(ids, 3):
        if k.orient(a, b, c) != CCW:
            a, b, c = a, c, b
        ok = True
        for q in ids:
            if q in (a, b, c):
                continue
            if k.incircle_raw(a, b, c, q) > 0:
                ok = False
                break
        if ok:
            out.add(tuple(sorted((a, b, c))))
    return out


def tri_set(triangulation):
    return {tuple(sorted(t)) for t in triangulation.triangles()}


def brute_delaunay_edges(ps, ids=None):
    edges = set()
    for t in brute_delaunay_triangles(ps, ids):
        a, b, c = t
        edges.update([(a, b), (a, c), (b, c)])
    return sorted(edges)


def naive_crossing_counts(g_edges, dt_edges, kernel):
    """(total crossing pairs, max crossings per g-edge) by the full
    quadratic loop."""
    total = 0
    worst = 0
    for u, v in g_edges:
        c = 0
        for a, b in dt_edges:
            if kernel.segments_cross(u, v, a, b):
                c += 1
        total += c
        worst = max(worst, c)
    return total, worst


def naive_violation_counts(tris, ids, kernel):
    """(total points-in-circumcircle over triangles, max per triangle) by
    the full triangle-times-point loop."""
    total = 0
    worst = 0
    for a, b, c in tris:
        n_in = 0
        for q in ids:
            if q in (a, b, c):
                continue
            if kernel.incircle(a, b, c, q) > 0:
                n_in += 1
        total += n_in
        worst = max(worst, n_in)
    return total, worst


def naive_conflicts(mesh, ids):
    """For every live triangle of an engine mesh, the ids whose perturbed
    circumcircle test is positive; and for every id, its containing
    triangle, both by direct scans."""
    tri_conf = {}
    containing = {}
    for t in mesh.live_triangles():
        lst = []
        for q in ids:
            if q in mesh.tri_verts(t):
                continue
            if mesh._conflict(t, q):
                lst.append(q)
        tri_conf[t] = lst
    for q in ids:
        for t in mesh.live_triangles():
            if q in mesh.tri_verts(t):
                continue
            if mesh.contains(t, q):
                containing[q] = t
                break
    return tri_conf, containing


def random_pointset(rng, n, spread=1.0):
    pts = set()
    while len(pts) < n:
        pts.add((rng.random() * spread, rng.random() * spread))
    return PointSet(sorted(pts))
