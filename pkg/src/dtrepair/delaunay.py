"""Delaunay construction, point location, and the building blocks the
repair algorithms call.

The engine mesh (:class:`TriMesh`) closes the plane into a topological
sphere with the three symbolic far points, so insertion never meets a
boundary.  Construction is randomized incremental with a conflict DAG:
every triangle ever created stays in the structure, and a dead triangle
links to the triangles created when it died plus those created over its
edges while it lived.  A conflict-guided search from the root frame
triangle enumerates all live triangles whose circumcircle contains a
query point in expected O(log n) in-circle tests; that search is both the
point locator and the insertion cavity.  Seeded insertion skips the
search, which is what makes the repair algorithms cheap in in-circle
counts.
"""

from __future__ import annotations

import random

from .errors import IdCollision, TooFewPoints
from .mesh import Triangulation, edge_key
from .predicates import (
    CCW,
    FAR1,
    FAR2,
    FAR3,
    INSIDE,
    _ICCERRBOUND_A,
    _incircle_exact,
    _TINY,
)


class TriMesh:
    """Triangle mesh over a PointSet, plus the construction history DAG.

    Triangle t has corners ``tv[3t .. 3t+2]`` (positively oriented;
    negative ids are far points).  Edge j of t is the edge opposite corner
    j, directed ``(tv[3t+j+1], tv[3t+j+2])`` (indices mod 3); ``adj[3t+j]``
    holds the matching edge code ``3s+k`` of the neighbor.  A rooted mesh
    starts from the frame triangle (index 0) and its sphere-closing mirror
    (index 1) and supports conflict search from the root.
    """

    def __init__(self, ps, rooted=True):
        self.ps = ps
        self.kern = ps.kernel
        self.tv = []
        self.adj = []
        self.alive = bytearray()
        self.kids = []
        self.vert_tri = {}
        self._stamp = 0
        self._stamps = []
        self.rooted = rooted
        if rooted:
            self._add_tri(FAR1, FAR2, FAR3)
            self._add_tri(FAR1, FAR3, FAR2)
            self.adj[0:3] = [3, 5, 4]
            self.adj[3:6] = [0, 2, 1]

    # -- raw structure ------------------------------------------------------

    def _add_tri(self, a, b, c):
        t = len(self.alive)
        self.tv.extend((a, b, c))
        self.adj.extend((-1, -1, -1))
        self.alive.append(1)
        self.kids.append(None)
        self._stamps.append(0)
        vt = self.vert_tri
        vt[a] = t
        vt[b] = t
        vt[c] = t
        return t

    def tri_verts(self, t):
        i = 3 * t
        return (self.tv[i], self.tv[i + 1], self.tv[i + 2])

    def live_triangles(self, finite_only=False):
        tv = self.tv
        out = []
        for t in range(len(self.alive)):
            if self.alive[t]:
                if finite_only:
                    i = 3 * t
                    if tv[i] < 0 or tv[i + 1] < 0 or tv[i + 2] < 0:
                        continue
                out.append(t)
        return out

    def finite_vertices(self):
        verts = set()
        tv = self.tv
        for t in self.live_triangles():
            i = 3 * t
            for a in (tv[i], tv[i + 1], tv[i + 2]):
                if a >= 0:
                    verts.add(a)
        return verts

    def _conflict(self, t, q):
        """Is point index q strictly inside the circumcircle of triangle t?

        Inlined filter on the hot path; the error bound uses
        (ab + bc + ca) over the three lifts, which dominates Shewchuk's
        permanent by AM-GM, so certainty claims stay sound.
        """
        k = self.kern
        k.incircle_count += 1
        tv = self.tv
        i = 3 * t
        a = tv[i]
        b = tv[i + 1]
        c = tv[i + 2]
        if a >= 0 and b >= 0 and c >= 0:
            xs = k.xs
            ys = k.ys
            qx = xs[q]
            qy = ys[q]
            adx = xs[a] - qx
            ady = ys[a] - qy
            bdx = xs[b] - qx
            bdy = ys[b] - qy
            cdx = xs[c] - qx
            cdy = ys[c] - qy
            alift = adx * adx + ady * ady
            blift = bdx * bdx + bdy * bdy
            clift = cdx * cdx + cdy * cdy
            det = (
                alift * (bdx * cdy - cdx * bdy)
                + blift * (cdx * ady - adx * cdy)
                + clift * (adx * bdy - bdx * ady)
            )
            bound = (
                _ICCERRBOUND_A * (alift * blift + blift * clift + clift * alift)
                + _TINY
            )
            if det > bound:
                return True
            if det < -bound:
                return False
            ids = k.ids
            if ids is None:
                key = (a, b, c, q)
            else:
                key = (ids[a], ids[b], ids[c], ids[q])
            return (
                _incircle_exact(
                    key, xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], qx, qy
                )
                > 0
            )
        return k._incircle_far(a, b, c, q) > 0

    def contains(self, t, q):
        i = 3 * t
        tv = self.tv
        k = self.kern
        a, b, c = tv[i], tv[i + 1], tv[i + 2]
        return (
            k.orient(a, b, q) == CCW
            and k.orient(b, c, q) == CCW
            and k.orient(c, a, q) == CCW
        )

    # -- conflict search / point location -------------------------------------

    def conflict_leaves(self, q):
        """All live triangles whose circumcircle contains point index q.

        The in-circle filter is fused into the search loop; this is the
        single hottest loop in the package.
        """
        if not self.rooted:
            raise ValueError("conflict search needs a rooted mesh")
        self._stamp += 1
        s = self._stamp
        stamps = self._stamps
        alive = self.alive
        kids = self.kids
        tv = self.tv
        k = self.kern
        xs = k.xs
        ys = k.ys
        qx = xs[q]
        qy = ys[q]
        errk = _ICCERRBOUND_A
        tiny = _TINY
        tested = 0
        out = []
        stack = [0]
        while stack:
            t = stack.pop()
            if stamps[t] == s:
                continue
            stamps[t] = s
            tested += 1
            i = 3 * t
            a = tv[i]
            b = tv[i + 1]
            c = tv[i + 2]
            if a >= 0 and b >= 0 and c >= 0:
                adx = xs[a] - qx
                ady = ys[a] - qy
                bdx = xs[b] - qx
                bdy = ys[b] - qy
                cdx = xs[c] - qx
                cdy = ys[c] - qy
                alift = adx * adx + ady * ady
                blift = bdx * bdx + bdy * bdy
                clift = cdx * cdx + cdy * cdy
                det = (
                    alift * (bdx * cdy - cdx * bdy)
                    + blift * (cdx * ady - adx * cdy)
                    + clift * (adx * bdy - bdx * ady)
                )
                bound = (
                    errk * (alift * blift + blift * clift + clift * alift)
                    + tiny
                )
                if det <= bound:
                    if det >= -bound:
                        ids = k.ids
                        key = (
                            (a, b, c, q)
                            if ids is None
                            else (ids[a], ids[b], ids[c], ids[q])
                        )
                        if (
                            _incircle_exact(
                                key,
                                xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], qx, qy,
                            )
                            <= 0
                        ):
                            continue
                    else:
                        continue
            elif k._incircle_far(a, b, c, q) <= 0:
                continue
            if alive[t]:
                out.append(t)
            if kids[t]:
                # live triangles also carry links to triangles built over
                # their edges by neighboring insertions; follow those too
                stack.extend(kids[t])
        k.incircle_count += tested
        return out

    def locate(self, q):
        """The live triangle containing point index q (a far triangle when q
        is beyond the current hull)."""
        if self.rooted:
            for t in self.conflict_leaves(q):
                if self.contains(t, q):
                    return t
            raise AssertionError("point location failed; mesh inconsistent")
        anchor = next(iter(self.finite_vertices()))
        return self.walk_from_vertex(anchor, q)[0]

    # -- insertion --------------------------------------------------------------

    def insert(self, v):
        """Insert point index v, finding its cavity from the root."""
        cavity = self.conflict_leaves(v)
        if not cavity:
            raise AssertionError(f"no conflicting triangle for point {v}")
        return self._dig(v, cavity)

    def insert_seeded(self, v, seed_tri):
        """Insert v given a seed triangle that conflicts with it (or once
        did); the cavity grows over live neighbors with no root search.  A
        stale seed is replaced by a short walk from one of its surviving
        corner vertices."""
        alive = self.alive
        t = seed_tri
        if not alive[t]:
            tv = self.tv
            i = 3 * t
            anchor = -1
            for x in (tv[i], tv[i + 1], tv[i + 2]):
                if x >= 0:
                    anchor = x
                    break
            if anchor < 0:
                t = self.locate(v)
            else:
                t = self.walk_from_vertex(anchor, v)[0]
        if not self._conflict(t, v):
            t = self.walk_from_tri(t, v)[0]
        self._stamp += 1
        s = self._stamp
        stamps = self._stamps
        adj = self.adj
        stamps[t] = s
        cavity = [t]
        stack = [t]
        while stack:
            u = stack.pop()
            i = 3 * u
            for o in (adj[i], adj[i + 1], adj[i + 2]):
                w = o // 3
                if stamps[w] != s:
                    stamps[w] = s
                    if self._conflict(w, v):
                        cavity.append(w)
                        stack.append(w)
        return self._dig(v, cavity)

    def _dig(self, v, cavity):
        tv = self.tv
        adj = self.adj
        alive = self.alive
        kids = self.kids
        cav = set(cavity)
        boundary = []
        for t in cavity:
            i = 3 * t
            for j in (0, 1, 2):
                o = adj[i + j]
                if o // 3 not in cav:
                    boundary.append((t, j, o))
        for t in cavity:
            alive[t] = 0
            if kids[t] is None:
                kids[t] = []
        by_first = {}
        created = []
        for t, j, o in boundary:
            i = 3 * t
            a = tv[i + (j + 1) % 3]
            b = tv[i + (j + 2) % 3]
            nt = self._add_tri(v, a, b)
            created.append(nt)
            ni = 3 * nt
            adj[ni] = o
            adj[o] = ni
            kids[t].append(nt)
            ot = o // 3
            if alive[ot] and not (self.rooted and ot == 1):
                if kids[ot] is None:
                    kids[ot] = []
                kids[ot].append(nt)
            by_first[a] = nt
        for nt in created:
            ni = 3 * nt
            b = tv[ni + 2]
            nxt = by_first[b]  # the star triangle (v, b, *): its edge 2 is (v, b)
            adj[ni + 1] = 3 * nxt + 2
            adj[3 * nxt + 2] = ni + 1
        return created

    # -- walking ------------------------------------------------------------------

    def wedge_triangle(self, p, q):
        """The live triangle incident to p whose angular wedge at p contains
        the ray toward q; if pq is a mesh edge, the triangle with corner q."""
        tv = self.tv
        k = self.kern
        t = self.vert_tri[p]
        t0 = t
        while True:
            i = 3 * t
            j = 0 if tv[i] == p else (1 if tv[i + 1] == p else 2)
            a = tv[i + (j + 1) % 3]
            b = tv[i + (j + 2) % 3]
            if a == q or b == q:
                return t
            if k.orient(p, a, q) == CCW and k.orient(p, b, q) != CCW:
                return t
            t = self.adj[i + (j + 1) % 3] // 3
            if t == t0:
                raise AssertionError("wedge search wrapped; mesh inconsistent")

    def walk_from_vertex(self, p, q, cap=None):
        """Straight walk from mesh vertex p along the segment toward point
        index q.  Returns (triangle, edge crossings, aborted): the triangle
        contains q or has it as a corner, or None when the cap is exceeded.
        Crossings feed the kernel's walk_steps counter."""
        tv = self.tv
        t = self.wedge_triangle(p, q)
        i = 3 * t
        j = 0 if tv[i] == p else (1 if tv[i + 1] == p else 2)
        if tv[i + (j + 1) % 3] == q or tv[i + (j + 2) % 3] == q:
            return (t, 0, False)
        return self._walk(t, j, p, q, cap)

    def walk_from_tri(self, t, q, cap=None):
        """Straight walk toward q starting inside live triangle t (the
        segment is anchored at t's first finite corner)."""
        i = 3 * t
        tv = self.tv
        j = 0 if tv[i] >= 0 else (1 if tv[i + 1] >= 0 else 2)
        p = tv[i + j]
        if p == q or tv[i + (j + 1) % 3] == q or tv[i + (j + 2) % 3] == q:
            return (t, 0, False)
        return self.walk_from_vertex(p, q, cap)

    def _walk(self, t, eidx, p, q, cap):
        """March along segment pq; (t, eidx) is the current triangle and the
        index of the edge the segment exits through, unless q is inside."""
        k = self.kern
        tv = self.tv
        adj = self.adj
        crossings = 0
        while True:
            i = 3 * t
            ea = tv[i + (eidx + 1) % 3]
            eb = tv[i + (eidx + 2) % 3]
            if k.orient(ea, eb, q) == CCW:
                k.walk_steps += crossings
                return (t, crossings, False)
            crossings += 1
            if cap is not None and crossings > cap:
                k.walk_steps += crossings
                return (None, crossings, True)
            o = adj[i + eidx]
            t = o // 3
            i = 3 * t
            jj = o - i
            w = tv[i + jj]
            if w == q:
                k.walk_steps += crossings
                return (t, crossings, False)
            # entering through edge jj: corner jj+1 is left of pq, jj+2 right
            if k.orient(p, q, w) == CCW:
                eidx = (jj + 1) % 3  # w joins the left bank; exit over (r, w)
            else:
                eidx = (jj + 2) % 3

    # -- conversion -----------------------------------------------------------------

    def strip(self, validate=False):
        """The finite part as a public Triangulation."""
        tv = self.tv
        verts = self.finite_vertices()
        if len(verts) < 3:
            raise TooFewPoints("fewer than 3 finite vertices")
        rings = [[] for _ in range(len(self.kern.xs))]
        for v in verts:
            ring = []
            t0 = self.vert_tri[v]
            t = t0
            while True:
                i = 3 * t
                j = 0 if tv[i] == v else (1 if tv[i + 1] == v else 2)
                a = tv[i + (j + 1) % 3]
                if a >= 0:
                    ring.append(a)
                t = self.adj[i + (j + 1) % 3] // 3
                if t == t0:
                    break
            rings[v] = ring
        return Triangulation(self.ps, rings, vertex_ids=verts, validate=validate)

    def check_consistent(self):
        """Structural audit (test mode): adjacency is involutive, live
        triangles are positively oriented, and every live pair across an
        edge is locally Delaunay under the far-aware predicates."""
        tv = self.tv
        adj = self.adj
        k = self.kern
        for t in self.live_triangles():
            i = 3 * t
            if tv[i] < 0 and tv[i + 1] < 0 and tv[i + 2] < 0:
                continue  # the sphere-closing mirror is reversed on purpose
            assert k.orient(tv[i], tv[i + 1], tv[i + 2]) == CCW, (
                f"triangle {t} is inverted"
            )
            for j in (0, 1, 2):
                o = adj[i + j]
                assert o >= 0 and adj[o] == i + j, f"adjacency broken at {t}:{j}"
                assert self.alive[o // 3], f"live triangle {t} borders a dead one"
                w = tv[o]  # corner of the neighbor opposite the shared edge
                if w >= 0:
                    assert (
                        k.incircle_raw(tv[i], tv[i + 1], tv[i + 2], w) <= 0
                    ), f"edge {t}:{j} is not locally Delaunay"


# ---------------------------------------------------------------------------
# construction entry points


def build_mesh(ps, seed=0, ids=None):
    """Randomized incremental Delaunay of ps (or a subset of ids) as an
    engine mesh with its history DAG."""
    mesh = TriMesh(ps)
    order = sorted(range(len(ps))) if ids is None else sorted(ids)
    random.Random(seed).shuffle(order)
    for v in order:
        mesh.insert(v)
    return mesh


def delaunay(ps, seed=0, ids=None, validate=False):
    """The unique (perturbed-world) Delaunay triangulation of ps.

    Expected O(n log n): randomized insertion order drawn from seed, point
    location through the conflict DAG.  Two different seeds give the same
    triangulation, only the history differs.
    """
    count = len(ps) if ids is None else len(ids)
    if count < 3:
        raise TooFewPoints(f"need at least 3 points, got {count}")
    return build_mesh(ps, seed, ids).strip(validate=validate)


def delaunay_with_locator(ps, seed=0, ids=None):
    mesh = build_mesh(ps, seed, ids)
    return mesh.strip(), mesh


def locate(mesh, p):
    """Triangle handle of the live triangle containing p (a Point or an
    (x, y) pair).  An exact coordinate match with an existing vertex
    returns its lexicographically smallest incident triangle."""
    kern = mesh.kern
    x = float(p[0])
    y = float(p[1])
    for i, (xi, yi) in enumerate(zip(kern.xs, kern.ys)):
        if xi == x and yi == y:
            best = None
            t0 = mesh.vert_tri[i]
            t = t0
            tv = mesh.tv
            while True:
                key = tuple(sorted(mesh.tri_verts(t)))
                if best is None or key < best[0]:
                    best = (key, t)
                ii = 3 * t
                j = 0 if tv[ii] == i else (1 if tv[ii + 1] == i else 2)
                t = mesh.adj[ii + (j + 1) % 3] // 3
                if t == t0:
                    break
            return best[1]
    kern.xs.append(x)
    kern.ys.append(y)
    if kern.ids is not None:
        kern.ids.append(len(kern.xs) - 1)
    try:
        return mesh.locate(len(kern.xs) - 1)
    finally:
        kern.xs.pop()
        kern.ys.pop()
        if kern.ids is not None:
            kern.ids.pop()


def insert_seeded(target, p, hint=None):
    """Insert a new point into a mesh, seeding the cavity search at hint.

    ``target`` may be a TriMesh (mutated in place; returns the new vertex
    id) or a Triangulation (returns a new Triangulation).  The point's
    coordinates must be distinct from every existing vertex.
    """
    if isinstance(target, Triangulation):
        mesh = engine_from_triangulation(target)
        insert_seeded(mesh, p, None)  # handles refer to engine meshes only
        return mesh.strip()
    kern = target.kern
    x = float(p[0])
    y = float(p[1])
    for xi, yi in zip(kern.xs, kern.ys):
        if xi == x and yi == y:
            from .errors import DuplicatePoint

            raise DuplicatePoint(f"point ({x}, {y}) already present")
    v = kern.append(x, y)
    if hint is None:
        if target.rooted:
            target.insert(v)
        else:
            anchor = next(iter(target.finite_vertices()))
            t, _, _ = target.walk_from_vertex(anchor, v)
            target.insert_seeded(v, t)
    else:
        target.insert_seeded(v, hint)
    return v


# ---------------------------------------------------------------------------
# wrapping an existing triangulation back into an engine mesh


def engine_from_triangulation(tri, seed=0):
    """Engine mesh whose finite part is exactly ``tri``.

    The far annulus is produced by running the incremental engine on the
    hull vertices alone (the far structure depends only on them), then the
    finite interior is replaced wholesale by ``tri``'s triangles.  No
    history DAG: the result supports walks and seeded insertion.
    """
    ps = tri.ps
    hull = tri.hull
    helper = TriMesh(ps)
    order = sorted(hull)
    random.Random(seed ^ 0x5EED).shuffle(order)
    for v in order:
        helper.insert(v)
    soup = []
    for t in helper.live_triangles():
        a, b, c = helper.tri_verts(t)
        if a < 0 or b < 0 or c < 0:
            soup.append((a, b, c))
    for a, b, c in tri.triangles():
        soup.append((a, b, c))
    return _mesh_from_soup(ps, soup)


def _mesh_from_soup(ps, soup):
    mesh = TriMesh(ps, rooted=False)
    dart = {}
    for a, b, c in soup:
        t = mesh._add_tri(a, b, c)
        i = 3 * t
        dart[(b, c)] = i
        dart[(c, a)] = i + 1
        dart[(a, b)] = i + 2
    adj = mesh.adj
    for (u, v), code in dart.items():
        o = dart.get((v, u))
        if o is None:
            raise AssertionError(f"unmatched dart {(u, v)}; soup is not closed")
        adj[code] = o
    return mesh


# ---------------------------------------------------------------------------
# merge, legalization, MST


def _morton_order(ps, ids):
    x0, y0, x1, y1 = ps.bbox()
    sx = (x1 - x0) or 1.0
    sy = (y1 - y0) or 1.0
    out = []
    for v in sorted(ids):
        qx = int((ps.xs[v] - x0) / sx * 0xFFFF)
        qy = int((ps.ys[v] - y0) / sy * 0xFFFF)
        code = 0
        for bit in range(16):
            code |= ((qx >> bit) & 1) << (2 * bit)
            code |= ((qy >> bit) & 1) << (2 * bit + 1)
        out.append((code, v))
    out.sort()
    return [v for _c, v in out]


def insert_batch(mesh, ids):
    """Insert existing point ids into a (possibly unrooted) mesh, walking
    to each cavity from the previously inserted vertex."""
    order = _morton_order(mesh.ps, ids)
    anchor = None
    for v in order:
        if anchor is None:
            anchor = next(iter(mesh.finite_vertices()))
        t, _cr, _ab = mesh.walk_from_vertex(anchor, v)
        mesh.insert_seeded(v, t)
        anchor = v
    return mesh


def merge_dt(a, b):
    """Delaunay triangulation of the union of two vertex-disjoint
    triangulations over the same PointSet: the smaller one's vertices are
    inserted incrementally into the larger one."""
    if a.ps is not b.ps:
        raise IdCollision("triangulations must share one PointSet universe")
    if a.vertex_ids & b.vertex_ids:
        raise IdCollision("vertex id sets overlap")
    big, small = (a, b) if len(a.vertex_ids) >= len(b.vertex_ids) else (b, a)
    mesh = engine_from_triangulation(big)
    insert_batch(mesh, small.vertex_ids)
    return mesh.strip()


def greedy_legalize(g):
    """Lawson's procedure: flip non-locally-Delaunay edges until none
    remain.  Returns (Delaunay triangulation, number of flips); the count
    is an upper bound on the minimum flip distance."""
    g = g.copy()
    from collections import deque

    queue = deque(g.interior_edges())
    queued = set(queue)
    flips = 0
    while queue:
        e = queue.popleft()
        queued.discard(e)
        if e not in g.edge_set or e in g.hull_edges:
            continue
        if g.is_locally_delaunay(e):
            continue
        u, v = e
        w1 = g._apex(u, v)
        w2 = g._apex(v, u)
        g.flip(e)
        flips += 1
        for x, y in ((u, w1), (w1, v), (v, w2), (w2, u)):
            ek = edge_key(x, y)
            if ek not in queued:
                queued.add(ek)
                queue.append(ek)
    return g, flips


class _UnionFind:
    def __init__(self, ids):
        self.parent = {v: v for v in ids}

    def find(self, v):
        p = self.parent
        root = v
        while p[root] != root:
            root = p[root]
        while p[v] != root:
            p[v], v = root, p[v]
        return root

    def union(self, u, v):
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        self.parent[ru] = rv
        return True


def mst_edges(ps, edges):
    """Kruskal over the given edges with exact squared-length comparisons,
    ties broken by the canonical edge key."""
    from .predicates import _scaled_ints

    vals = []
    index = {}
    for u, v in edges:
        for w in (u, v):
            if w not in index:
                index[w] = len(vals)
                vals.append(ps.xs[w])
                vals.append(ps.ys[w])
    ints = _scaled_ints(vals)

    def weight(u, v):
        iu = index[u]
        iv = index[v]
        dx = ints[iu] - ints[iv]
        dy = ints[iu + 1] - ints[iv + 1]
        return dx * dx + dy * dy

    ranked = sorted(edges, key=lambda e: (weight(*e), e))
    uf = _UnionFind(index.keys())
    out = []
    for u, v in ranked:
        if uf.union(u, v):
            out.append(edge_key(u, v))
    return out


def planar_mst(dt):
    """Euclidean minimum spanning tree of a Delaunay triangulation, as a
    SpanningTree (EMST(P) is always a subgraph of DT(P)).  Comparison-based
    O(m log m); ties broken by edge key make it unique."""
    from .sampling import SpanningTree

    tree_edges = mst_edges(dt.ps, dt.canonical_edge_set())
    return SpanningTree(dt.ps, tree_edges)
