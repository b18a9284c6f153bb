"""Closeness measures between a predicted triangulation and the Delaunay
triangulation: wrong-edge count, non-locally-Delaunay count, crossing
counts, circumcircle violation counts, and the legalization flip count
(an upper bound on the true flip distance, which is not computed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .delaunay import delaunay_with_locator, greedy_legalize
from .errors import VertexMismatch
from .predicates import INSIDE, _scaled_ints

# Production-path thresholds: the quadratic loops are kept for small
# instances (they are also the test oracles); grid bucketing takes over
# beyond them.
CROSS_BRUTE_MAX_VERTICES = 1200
VIO_BRUTE_MAX_VERTICES = 1500


@dataclass
class ClosenessReport:
    n: int
    D: int
    D_local: int
    D_cross: int
    d_cross: int
    D_vio: int
    d_vio: int
    flip_upper: int
    seed: int

    def csv_row(self):
        return (
            f"{self.n},{self.D},{self.D_local},{self.D_cross},{self.d_cross},"
            f"{self.D_vio},{self.d_vio},{self.flip_upper},{self.seed}"
        )

    CSV_HEADER = "n,D,D_local,D_cross,d_cross,D_vio,d_vio,flip_upper,seed"


def _check_same_vertices(g, dt):
    if g.ps is not dt.ps or g.vertex_ids != dt.vertex_ids:
        raise VertexMismatch("triangulations cover different vertex sets")


def metric_D(g, dt):
    """Edges of g absent from dt.  Triangulations of one point set have
    equally many edges, so the reverse difference has the same size
    (asserted)."""
    _check_same_vertices(g, dt)
    ge = g.edge_set
    de = dt.edge_set
    forward = len(ge - de)
    backward = len(de - ge)
    assert forward == backward, "edge-count bookkeeping broken"
    return forward


def metric_D_local(g):
    """Number of interior edges of g whose edge quadrilateral fails the
    empty-circle test."""
    return sum(1 for e in g.interior_edges() if not g.is_locally_delaunay(e))


def metric_crossings(g, dt, dt_mesh=None):
    """(total proper crossings between g and dt edges, max crossings of dt
    edges by one g edge).

    With an engine mesh for dt, each g edge is walked straight through the
    mesh and the crossings are read off the traversal; otherwise the small
    instances use the quadratic loop and larger ones grid bucketing.  All
    three paths agree exactly.
    """
    _check_same_vertices(g, dt)
    shared = g.edge_set & dt.edge_set
    todo = [e for e in g.edge_set if e not in shared]
    if dt_mesh is not None:
        return _crossings_walk(todo, dt_mesh)
    if len(g.vertex_ids) <= CROSS_BRUTE_MAX_VERTICES:
        return crossings_naive(todo, dt.edge_set - shared, g.kernel)
    return _crossings_bucketed(todo, sorted(dt.edge_set - shared), g.ps)


def crossings_naive(g_edges, dt_edges, kernel):
    """The quadratic oracle: test every pair of candidate edges."""
    total = 0
    worst = 0
    dt_list = sorted(dt_edges)
    for u, v in sorted(g_edges):
        c = 0
        for a, b in dt_list:
            if kernel.segments_cross(u, v, a, b):
                c += 1
        total += c
        if c > worst:
            worst = c
    return total, worst


def _crossings_walk(g_edges, dt_mesh):
    # an edge of g shares its endpoints with dt vertices, so the straight
    # walk across dt counts exactly the dt edges the open segment crosses
    total = 0
    worst = 0
    for u, v in sorted(g_edges):
        _t, c, _ab = dt_mesh.walk_from_vertex(u, v)
        total += c
        if c > worst:
            worst = c
    return total, worst


def _grid_cells(xs, ys, u, v, x0, y0, inv_sx, inv_sy, gmax):
    ax0 = min(xs[u], xs[v])
    ax1 = max(xs[u], xs[v])
    ay0 = min(ys[u], ys[v])
    ay1 = max(ys[u], ys[v])
    ix0 = min(int((ax0 - x0) * inv_sx), gmax)
    ix1 = min(int((ax1 - x0) * inv_sx), gmax)
    iy0 = min(int((ay0 - y0) * inv_sy), gmax)
    iy1 = min(int((ay1 - y0) * inv_sy), gmax)
    return ix0, ix1, iy0, iy1


def _crossings_bucketed(g_edges, dt_edges, ps):
    xs = ps.xs
    ys = ps.ys
    kernel = ps.kernel
    x0, y0, x1, y1 = ps.bbox()
    g = max(2, int(math.sqrt(max(len(dt_edges), 1))))
    inv_sx = g / ((x1 - x0) or 1.0)
    inv_sy = g / ((y1 - y0) or 1.0)
    grid = {}
    for idx, (a, b) in enumerate(dt_edges):
        ix0, ix1, iy0, iy1 = _grid_cells(xs, ys, a, b, x0, y0, inv_sx, inv_sy, g - 1)
        for cx in range(ix0, ix1 + 1):
            for cy in range(iy0, iy1 + 1):
                grid.setdefault((cx, cy), []).append(idx)
    total = 0
    worst = 0
    seen = [-1] * len(dt_edges)
    for mark, (u, v) in enumerate(sorted(g_edges)):
        c = 0
        ix0, ix1, iy0, iy1 = _grid_cells(xs, ys, u, v, x0, y0, inv_sx, inv_sy, g - 1)
        for cx in range(ix0, ix1 + 1):
            for cy in range(iy0, iy1 + 1):
                for idx in grid.get((cx, cy), ()):
                    if seen[idx] == mark:
                        continue
                    seen[idx] = mark
                    a, b = dt_edges[idx]
                    if kernel.segments_cross(u, v, a, b):
                        c += 1
        total += c
        if c > worst:
            worst = c
    return total, worst


def metric_violations(g, ps, over="G", dt=None):
    """(total points strictly inside triangle circumcircles, max per
    triangle).

    ``over`` selects whose triangles are tallied: the prediction's ("G",
    the default, matching the per-triangle maximum's definition) or the
    Delaunay triangulation's ("DT", in which case ``dt`` must be given).
    "Strictly inside" is the perturbed-world in-circle test, so the report
    is exactly (0, 0) iff the tallied triangulation is Delaunay.
    """
    if over == "G":
        tris = g.triangles()
    elif over == "DT":
        tris = dt.triangles()
    else:
        raise ValueError("over must be 'G' or 'DT'")
    ids = sorted(g.vertex_ids)
    if len(ids) <= VIO_BRUTE_MAX_VERTICES:
        return violations_naive(tris, ids, ps.kernel)
    return _violations_bucketed(tris, ids, ps)


def violations_naive(tris, ids, kernel):
    """The quadratic oracle: every triangle against every point."""
    total = 0
    worst = 0
    for a, b, c in tris:
        n_in = 0
        for q in ids:
            if q == a or q == b or q == c:
                continue
            if kernel.incircle(a, b, c, q) == INSIDE:
                n_in += 1
        total += n_in
        if n_in > worst:
            worst = n_in
    return total, worst


def _violations_bucketed(tris, ids, ps):
    xs = ps.xs
    ys = ps.ys
    kernel = ps.kernel
    x0, y0, x1, y1 = ps.bbox()
    g = max(2, int(math.sqrt(len(ids))))
    inv_sx = g / ((x1 - x0) or 1.0)
    inv_sy = g / ((y1 - y0) or 1.0)
    grid = {}
    for q in ids:
        cell = (
            min(int((xs[q] - x0) * inv_sx), g - 1),
            min(int((ys[q] - y0) * inv_sy), g - 1),
        )
        grid.setdefault(cell, []).append(q)
    total = 0
    worst = 0
    for a, b, c in tris:
        box = _circumcircle_bbox(xs, ys, a, b, c)
        if box is None:
            cand = ids  # degenerate sliver: circumcircle unbounded
        else:
            bx0, by0, bx1, by1 = box
            ix0 = max(0, min(int((bx0 - x0) * inv_sx), g - 1))
            ix1 = max(0, min(int((bx1 - x0) * inv_sx), g - 1))
            iy0 = max(0, min(int((by0 - y0) * inv_sy), g - 1))
            iy1 = max(0, min(int((by1 - y0) * inv_sy), g - 1))
            cand = []
            for cx in range(ix0, ix1 + 1):
                for cy in range(iy0, iy1 + 1):
                    cand.extend(grid.get((cx, cy), ()))
        n_in = 0
        for q in cand:
            if q == a or q == b or q == c:
                continue
            if kernel.incircle(a, b, c, q) == INSIDE:
                n_in += 1
        total += n_in
        if n_in > worst:
            worst = n_in
    return total, worst


def _circumcircle_bbox(xs, ys, a, b, c):
    """A conservative float bounding box of the exact circumcircle, or None
    when the triangle is exactly collinear (unbounded circle)."""
    vals = (xs[a], ys[a], xs[b], ys[b], xs[c], ys[c])
    fracs = [v.as_integer_ratio() for v in vals]
    den = max(f[1] for f in fracs)
    ax, ay, bx, by, cx, cy = (n * (den // dd) for n, dd in fracs)
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0:
        return None
    la = ax * ax + ay * ay
    lb = bx * bx + by * by
    lc = cx * cx + cy * cy
    ux = la * (by - cy) + lb * (cy - ay) + lc * (ay - by)
    uy = la * (cx - bx) + lb * (ax - cx) + lc * (bx - ax)
    # center (ux/d, uy/d) in scaled units; radius from the distance to a
    dscale = d * den
    cxf = ux / dscale
    cyf = uy / dscale
    rnum = (ax * d - ux) ** 2 + (ay * d - uy) ** 2
    rf = (math.isqrt(rnum) + 1) / abs(dscale)
    pad = 1e-9 * (abs(cxf) + abs(cyf) + rf + 1.0)
    rf += pad
    return (cxf - rf, cyf - rf, cxf + rf, cyf + rf)


def flip_upper_bound(g):
    """Lawson legalization flip count on a copy of g: an upper bound on the
    minimum number of flips to reach the Delaunay triangulation."""
    _dt, flips = greedy_legalize(g)
    return flips


def full_report(g, ps, seed=0, vio_over="G", dt=None, dt_mesh=None):
    """All closeness measures of g against delaunay(ps) in one report."""
    if dt is None:
        dt, dt_mesh = delaunay_with_locator(ps, seed)
    D = metric_D(g, dt)
    D_local = metric_D_local(g)
    D_cross, d_cross = metric_crossings(g, dt, dt_mesh=dt_mesh)
    D_vio, d_vio = metric_violations(g, ps, over=vio_over, dt=dt)
    flip_upper = flip_upper_bound(g)
    return ClosenessReport(
        n=len(g.vertex_ids),
        D=D,
        D_local=D_local,
        D_cross=D_cross,
        d_cross=d_cross,
        D_vio=D_vio,
        d_vio=d_vio,
        flip_upper=flip_upper,
        seed=seed,
    )
