"""Point sets and planar straight-line graphs over them.

Graphs are stored as a rotation system: one counterclockwise-sorted
neighbor ring per vertex.  Twin/next/origin half-edge navigation is
derived from the rings (``next(u -> v)`` is ``v -> w`` where ``w``
precedes ``u`` in ``v``'s ring), which keeps flips cheap and face
tracing allocation-free.  Rotation order is always recomputed from
geometry, never trusted from input order.
"""

from __future__ import annotations

import functools
import math

from .errors import (
    DuplicateEdge,
    DuplicatePoint,
    NotFlippable,
    NotPlanar,
    TooFewPoints,
)
from .predicates import CCW, CW, INSIDE, Kernel, Point


def edge_key(a, b):
    """Canonical unordered edge identity: (min, max) of the vertex ids."""
    return (a, b) if a < b else (b, a)


class PointSet:
    """Immutable ordered set of distinct points with exact-comparable
    coordinates.  Owns the predicate kernel (and its operation counters)
    used by every structure built over it."""

    def __init__(self, coords):
        xs = []
        ys = []
        seen = {}
        for i, c in enumerate(coords):
            x = float(c[0])
            y = float(c[1])
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"non-finite coordinate at index {i}")
            if (x, y) in seen:
                raise DuplicatePoint(
                    f"points {seen[(x, y)]} and {i} have identical coordinates"
                )
            seen[(x, y)] = i
            xs.append(x)
            ys.append(y)
        self.kernel = Kernel(xs, ys)
        # alias the kernel's arrays so points appended by the engine (e.g.
        # seeded insertion of a fresh point) stay visible everywhere
        self.xs = self.kernel.xs
        self.ys = self.kernel.ys

    def __len__(self):
        return len(self.xs)

    def point(self, i):
        return Point(self.xs[i], self.ys[i], i)

    def bbox(self):
        return (min(self.xs), min(self.ys), max(self.xs), max(self.ys))

    def coords(self):
        return list(zip(self.xs, self.ys))


# ---------------------------------------------------------------------------
# angular order


def _below_cmp(kernel, i, j):
    """Perturbed comparison by (y, then the symbolic displacement)."""
    yi = kernel.ys[i]
    yj = kernel.ys[j]
    if yi < yj:
        return -1
    if yi > yj:
        return 1
    # the smaller id carries the larger (positive) y-displacement: above
    return 1 if i < j else -1


def bottom_vertex(kernel, ids):
    """The perturbed-world bottom-most vertex among ids."""
    best = None
    for v in ids:
        if best is None or _below_cmp(kernel, v, best) < 0:
            best = v
    return best


def sort_ring(kernel, v, nbrs):
    """Neighbors of v in CCW angular order starting just above direction
    (1, 0), under the perturbed predicates (no two directions ever tie)."""

    def half(u):
        dy = kernel.ys[u] - kernel.ys[v]  # float compare is exact
        if dy > 0:
            return 0
        if dy < 0:
            return 1
        return 0 if u < v else 1  # exact tie: displacement sign decides

    def cmp(u1, u2):
        h1 = half(u1)
        h2 = half(u2)
        if h1 != h2:
            return h1 - h2
        s = kernel.orient(v, u1, u2)
        return -1 if s == CCW else 1

    return sorted(nbrs, key=functools.cmp_to_key(cmp))


def convex_hull(kernel, ids):
    """CCW convex hull cycle of the given vertex ids in the perturbed
    world (strict turns only, so exactly the Delaunay hull)."""
    pts = sorted(ids, key=lambda i: (kernel.xs[i], -i))
    if len(pts) == 1:
        return list(pts)
    if len(pts) == 2:
        return list(pts)
    lower = []
    for p in pts:
        while len(lower) >= 2 and kernel.orient(lower[-2], lower[-1], p) != CCW:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and kernel.orient(upper[-2], upper[-1], p) != CCW:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# planar subdivision faces


class FaceRegion:
    """One face of the planar subdivision: a primary boundary walk plus the
    outer walks of components nested inside it and any isolated vertices."""

    __slots__ = ("orbit", "inner_orbits", "isolated", "outer")

    def __init__(self, orbit, outer=False):
        self.orbit = orbit  # list of directed edges (u, v)
        self.inner_orbits = []
        self.isolated = []
        self.outer = outer

    def vertices(self):
        vs = set()
        for u, _v in self.orbit:
            vs.add(u)
        for orb in self.inner_orbits:
            for u, _v in orb:
                vs.add(u)
        vs.update(self.isolated)
        return vs

    def boundary_edge_count(self):
        return len(self.orbit)

    def is_triangle(self):
        if self.inner_orbits or self.isolated:
            return False
        if len(self.orbit) != 3:
            return False
        return len({u for u, _ in self.orbit}) == 3


class Pslg:
    """Straight-line planar embedding of a graph over a PointSet.

    Faces may be non-triangular and vertices may be isolated.  Built via
    :func:`build_from_edges`, which recomputes rotation order from the
    geometry and rejects edge sets with proper crossings.
    """

    is_triangulation = False

    def __init__(self, ps, rings, vertex_ids=None, _validated=False):
        self.ps = ps
        self.kernel = ps.kernel
        self.rings = rings
        self.vertex_ids = (
            frozenset(range(len(ps))) if vertex_ids is None else frozenset(vertex_ids)
        )
        self.edge_set = {
            edge_key(u, v) for u in range(len(rings)) for v in rings[u] if u < v
        }
        self.m = len(self.edge_set)
        self._faces = None
        self._version = 0

    # -- basics -------------------------------------------------------------

    def has_edge(self, u, v):
        return edge_key(u, v) in self.edge_set

    def degree(self, v):
        return len(self.rings[v])

    def canonical_edge_set(self):
        return sorted(self.edge_set)

    def vertex_ring(self, v):
        """Neighbors of v in CCW order from the canonical east-most start;
        empty for an isolated vertex."""
        return sort_ring(self.kernel, v, self.rings[v])

    # -- face machinery -------------------------------------------------------

    def _next_dart(self, u, v):
        ring = self.rings[v]
        i = ring.index(u)
        return (v, ring[i - 1])

    def _trace_orbit(self, u0, v0):
        orbit = [(u0, v0)]
        u, v = self._next_dart(u0, v0)
        while (u, v) != (u0, v0):
            orbit.append((u, v))
            u, v = self._next_dart(u, v)
        return orbit

    def faces(self):
        """Face regions of the subdivision (cached until the next flip)."""
        if self._faces is not None:
            return self._faces
        self._faces = self._build_faces()
        return self._faces

    def _build_faces(self):
        kernel = self.kernel
        rings = self.rings
        # connected components over vertices with edges
        comp = {}
        comps = []
        for s in self.vertex_ids:
            if rings[s] and s not in comp:
                cid = len(comps)
                stack = [s]
                comp[s] = cid
                members = [s]
                while stack:
                    u = stack.pop()
                    for w in rings[u]:
                        if w not in comp:
                            comp[w] = cid
                            members.append(w)
                            stack.append(w)
                comps.append(members)
        isolated = [v for v in self.vertex_ids if not rings[v]]

        # orbits per component, and each component's outer orbit
        orbit_of = {}
        orbits = []
        outer_orbit_of_comp = []
        for members in comps:
            vstar = bottom_vertex(kernel, members)
            ring = sort_ring(kernel, vstar, rings[vstar])
            outer_dart = (vstar, ring[-1])
            for u in members:
                for v in rings[u]:
                    if (u, v) not in orbit_of:
                        oid = len(orbits)
                        orb = self._trace_orbit(u, v)
                        for d in orb:
                            orbit_of[d] = oid
                        orbits.append(orb)
            outer_orbit_of_comp.append(orbit_of[outer_dart])

        outer_set = set(outer_orbit_of_comp)
        regions = [FaceRegion(None, outer=True)]  # global outer face
        regions[0].orbit = []
        region_of_orbit = {}
        for oid, orb in enumerate(orbits):
            if oid not in outer_set:
                region_of_orbit[oid] = len(regions)
                regions.append(FaceRegion(orb))

        bounded = [
            (rid, reg) for rid, reg in enumerate(regions) if not reg.outer
        ]
        areas = {}
        for rid, reg in bounded:
            areas[rid] = _orbit_double_area(kernel, reg.orbit)

        def containing_region(q):
            best = None
            for rid, reg in bounded:
                if q in {u for u, _ in reg.orbit}:
                    continue
                if _orbit_contains(kernel, reg.orbit, q, self.ps):
                    if best is None or areas[rid] < areas[best]:
                        best = rid
            return 0 if best is None else best

        # nest each component's outer orbit, and each isolated vertex, into
        # the smallest bounded face containing it
        for ci, members in enumerate(comps):
            oid = outer_orbit_of_comp[ci]
            rid = containing_region(bottom_vertex(kernel, members))
            regions[rid].inner_orbits.append(orbits[oid])
            region_of_orbit[oid] = rid
        for v in isolated:
            rid = containing_region(v)
            regions[rid].isolated.append(v)

        return _Faces(orbits, orbit_of, region_of_orbit, regions)

    # -- validation -----------------------------------------------------------

    def check_no_crossings(self, full=False):
        """Raise NotPlanar if any two edges properly cross.  ``full`` forces
        the quadratic all-pairs scan (test mode); the default uses grid
        bucketing over edge bounding boxes, which cannot miss a crossing."""
        edges = sorted(self.edge_set)
        m = len(edges)
        kernel = self.kernel
        if m < 2:
            return
        if full or m <= 64:
            for i in range(m):
                u1, v1 = edges[i]
                for j in range(i + 1, m):
                    u2, v2 = edges[j]
                    if kernel.segments_cross(u1, v1, u2, v2):
                        raise NotPlanar(f"edges {edges[i]} and {edges[j]} cross")
            return
        xs = self.ps.xs
        ys = self.ps.ys
        x0, y0, x1, y1 = self.ps.bbox()
        g = max(1, int(math.sqrt(m)))
        sx = (x1 - x0) / g or 1.0
        sy = (y1 - y0) / g or 1.0
        grid = {}
        big = []
        for idx, (u, v) in enumerate(edges):
            ax0 = min(xs[u], xs[v])
            ax1 = max(xs[u], xs[v])
            ay0 = min(ys[u], ys[v])
            ay1 = max(ys[u], ys[v])
            ix0 = min(int((ax0 - x0) / sx), g - 1)
            ix1 = min(int((ax1 - x0) / sx), g - 1)
            iy0 = min(int((ay0 - y0) / sy), g - 1)
            iy1 = min(int((ay1 - y0) / sy), g - 1)
            ncells = (ix1 - ix0 + 1) * (iy1 - iy0 + 1)
            if ncells > 8 * g:
                big.append(idx)
                continue
            for cx in range(ix0, ix1 + 1):
                for cy in range(iy0, iy1 + 1):
                    grid.setdefault((cx, cy), []).append(idx)
        for cell in grid.values():
            for a in range(len(cell)):
                u1, v1 = edges[cell[a]]
                for b in range(a + 1, len(cell)):
                    u2, v2 = edges[cell[b]]
                    if kernel.segments_cross(u1, v1, u2, v2):
                        raise NotPlanar(
                            f"edges {edges[cell[a]]} and {edges[cell[b]]} cross"
                        )
        for idx in big:
            u1, v1 = edges[idx]
            for jdx in range(m):
                if jdx == idx:
                    continue
                u2, v2 = edges[jdx]
                if kernel.segments_cross(u1, v1, u2, v2):
                    raise NotPlanar(f"edges {edges[idx]} and {edges[jdx]} cross")


class _Faces:
    __slots__ = ("orbits", "orbit_of", "region_of_orbit", "regions")

    def __init__(self, orbits, orbit_of, region_of_orbit, regions):
        self.orbits = orbits
        self.orbit_of = orbit_of
        self.region_of_orbit = region_of_orbit
        self.regions = regions

    def region_of_dart(self, u, v):
        return self.region_of_orbit[self.orbit_of[(u, v)]]

    def edge_regions(self, u, v):
        """The two face regions on the two sides of edge (u, v)."""
        return (self.region_of_dart(u, v), self.region_of_dart(v, u))


def _orbit_double_area(kernel, orbit):
    # exact twice-area over scaled integer coordinates
    from .predicates import _scaled_ints

    vals = []
    for u, v in orbit:
        vals.extend((kernel.xs[u], kernel.ys[u], kernel.xs[v], kernel.ys[v]))
    ints = _scaled_ints(vals)
    area2 = 0
    for i in range(0, len(ints), 4):
        area2 += ints[i] * ints[i + 3] - ints[i + 1] * ints[i + 2]
    return abs(area2)


def _orbit_contains(kernel, orbit, q, ps):
    """Crossing-parity membership of vertex q in the region bounded by the
    orbit.  Bridge edges appear twice in the orbit and cancel out."""
    x0, y0, x1, y1 = ps.bbox()
    span = max(x1 - x0, y1 - y0, 1.0)
    k2 = Kernel(
        kernel.xs + [x1 + span + 1.0],
        kernel.ys + [y1 + 2.0 * span + 1.0],
    )
    z = len(k2.xs) - 1
    crossings = 0
    for u, v in orbit:
        if u == q or v == q:
            return False
        if k2.segments_cross(q, z, u, v):
            crossings += 1
    return crossings % 2 == 1


# ---------------------------------------------------------------------------
# triangulations


class Triangulation(Pslg):
    """A triangulation of (a subset of) a PointSet: every bounded face is a
    triangle and the outer face is the convex hull."""

    is_triangulation = True

    def __init__(self, ps, rings, vertex_ids=None, validate=True):
        super().__init__(ps, rings, vertex_ids)
        self._tri_cache = None
        self.hull = self._find_hull()
        h = len(self.hull)
        self.hull_edges = {
            edge_key(self.hull[i], self.hull[(i + 1) % h]) for i in range(h)
        }
        # darts whose face-left is the outer face (hull traversed clockwise)
        self._outer_darts = {
            (self.hull[(i + 1) % h], self.hull[i]) for i in range(h)
        }
        if validate:
            self._validate()

    # -- structure ------------------------------------------------------------

    def _find_hull(self):
        nv = [v for v in self.vertex_ids if self.rings[v]]
        if len(nv) < 3:
            raise TooFewPoints("triangulation needs at least 3 vertices")
        vstar = bottom_vertex(self.kernel, nv)
        ring = sort_ring(self.kernel, vstar, self.rings[vstar])
        orbit = self._trace_orbit(vstar, ring[-1])
        hull = [u for u, _v in orbit]
        hull.reverse()  # outer orbit runs clockwise
        return hull

    def _validate(self):
        n = len(self.vertex_ids)
        for v in self.vertex_ids:
            if not self.rings[v]:
                raise NotPlanar(f"vertex {v} is isolated; not a triangulation")
        h = len(self.hull)
        if len(set(self.hull)) != h:
            raise NotPlanar("outer face is not a simple cycle")
        if self.m != 3 * n - 3 - h:
            raise NotPlanar(
                f"edge count {self.m} != 3n-3-h = {3 * n - 3 - h}; not a triangulation"
            )
        k = self.kernel
        for i in range(h):
            a = self.hull[i]
            b = self.hull[(i + 1) % h]
            c = self.hull[(i + 2) % h]
            if k.orient(a, b, c) != CCW:
                raise NotPlanar("outer face is not convex")
        tris, _tri_of, _adj = self._tri_structure()
        if len(tris) != 2 * n - 2 - h:
            raise NotPlanar("face count violates the Euler relation")

    def _tri_structure(self):
        """(triangles, dart -> triangle index, adjacency) for the bounded
        faces; adjacency entry is -1 across hull edges."""
        if self._tri_cache is not None:
            return self._tri_cache
        outer_darts = set()
        hull = self.hull
        h = len(hull)
        for i in range(h):
            outer_darts.add((hull[(i + 1) % h], hull[i]))
        tris = []
        tri_of = {}
        for u in self.vertex_ids:
            for v in self.rings[u]:
                if (u, v) in tri_of or (u, v) in outer_darts:
                    continue
                orb = self._trace_orbit(u, v)
                if len(orb) != 3:
                    raise NotPlanar(f"bounded face {orb} is not a triangle")
                t = len(tris)
                for d in orb:
                    tri_of[d] = t
                tris.append((orb[0][0], orb[1][0], orb[2][0]))
        adj = []
        for t, (a, b, c) in enumerate(tris):
            adj.append(
                (
                    tri_of.get((c, b), -1),  # across edge (b, c), opposite a
                    tri_of.get((a, c), -1),
                    tri_of.get((b, a), -1),
                )
            )
        self._tri_cache = (tris, tri_of, adj)
        return self._tri_cache

    def triangles(self):
        return self._tri_structure()[0]

    def triangle_adjacency(self):
        return self._tri_structure()[2]

    def _invalidate(self):
        self._tri_cache = None
        self._faces = None
        self._version += 1

    # -- local structure around an edge ----------------------------------------

    def edge_apexes(self, u, v):
        """Vertices opposite edge (u, v): (apex left of u->v, apex left of
        v->u).  The outer side of a hull edge is None."""
        left = None if (u, v) in self._outer_darts else self._apex(u, v)
        right = None if (v, u) in self._outer_darts else self._apex(v, u)
        return (left, right)

    def _apex(self, u, v):
        ring = self.rings[v]
        return ring[ring.index(u) - 1]

    # -- operations -------------------------------------------------------------

    def is_locally_delaunay(self, ekey):
        """True iff the apexes of the two triangles on this interior edge lie
        outside each other's circumcircles (hull edges by convention)."""
        u, v = ekey
        if not self.has_edge(u, v):
            raise KeyError(f"no edge {ekey}")
        if edge_key(u, v) in self.hull_edges:
            return True
        w1 = self._apex(u, v)
        w2 = self._apex(v, u)
        return self.kernel.incircle(u, v, w1, w2) != INSIDE

    def flip(self, ekey):
        """Replace interior edge (u, v) by the opposite diagonal of its
        convex quadrilateral, in place."""
        u, v = ekey
        if not self.has_edge(u, v):
            raise KeyError(f"no edge {ekey}")
        if edge_key(u, v) in self.hull_edges:
            raise NotFlippable(f"{ekey} is a hull edge")
        w1 = self._apex(u, v)  # left of u->v
        w2 = self._apex(v, u)  # right of u->v
        k = self.kernel
        # strict convexity of the CCW quadrilateral (u, w2, v, w1)
        for a, b, c in ((u, w2, v), (w2, v, w1), (v, w1, u), (w1, u, w2)):
            if k.orient(a, b, c) != CCW:
                raise NotFlippable(f"quadrilateral around {ekey} is not convex")
        ru = self.rings[u]
        rv = self.rings[v]
        ru.remove(v)
        rv.remove(u)
        # new edge (w1, w2): at w1 the CCW ring runs ... u, v ... and the
        # merged quadrilateral wedge puts w2 between them; symmetric at w2.
        r1 = self.rings[w1]
        r1.insert(r1.index(v), w2)
        r2 = self.rings[w2]
        r2.insert(r2.index(u), w1)
        self.edge_set.discard(edge_key(u, v))
        self.edge_set.add(edge_key(w1, w2))
        k.flip_count += 1
        self._invalidate()
        return edge_key(w1, w2)

    def interior_edges(self):
        return sorted(e for e in self.edge_set if e not in self.hull_edges)

    def copy(self):
        t = Triangulation.__new__(Triangulation)
        Pslg.__init__(t, self.ps, [list(r) for r in self.rings], self.vertex_ids)
        t._tri_cache = None
        t.hull = list(self.hull)
        t.hull_edges = set(self.hull_edges)
        t._outer_darts = set(self._outer_darts)
        return t


def dt_equal(a, b):
    """Exact equality of two triangulations as canonical edge sets."""
    return a.canonical_edge_set() == b.canonical_edge_set()


def build_from_edges(ps, edges, validate_crossings=True):
    """Embed the edge list over ps with geometry-derived rotation order.

    Returns a Triangulation when the edge set triangulates the full point
    set, otherwise a Pslg.  Raises NotPlanar on proper crossings and
    DuplicateEdge on repeated edges.
    """
    n = len(ps)
    nbrs = [[] for _ in range(n)]
    seen = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise IndexError(f"edge ({u}, {v}) references a missing point")
        if u == v:
            raise DuplicateEdge(f"self-loop at {u}")
        ek = edge_key(u, v)
        if ek in seen:
            raise DuplicateEdge(f"edge {ek} given twice")
        seen.add(ek)
        nbrs[u].append(v)
        nbrs[v].append(u)
    rings = [sort_ring(ps.kernel, v, nbrs[v]) if nbrs[v] else [] for v in range(n)]
    g = Pslg(ps, rings)
    if validate_crossings:
        g.check_no_crossings()
    if n >= 3 and all(rings[v] for v in range(n)):
        try:
            return Triangulation(ps, rings)
        except (NotPlanar, TooFewPoints):
            pass
    return g
