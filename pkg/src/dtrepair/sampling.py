"""Randomized repair: spanning trees, degree-weighted sample ladders, and
tree-guided conflict location with capped walks.

The level-by-level refinement realizes the lifted lower-envelope rounds in
the plane: each round inserts the new sample points into the previous
Delaunay triangulation, seeded by the triangle the tree walk found for
them, so no point location from scratch is ever paid for points the walk
reached cheaply.
"""

from __future__ import annotations

import math
import random

from .delaunay import TriMesh, build_mesh, mst_edges
from .errors import TooFewPoints, VertexMismatch
from .mesh import PointSet, Triangulation, edge_key, sort_ring


class SpanningTree:
    """A spanning tree of a PointSet with angularly sorted neighbor rings.

    Purely combinatorial plus the rings: the edges need not be crossing-free
    (self-crossing trees are allowed; every consumer re-sorts rings
    geometrically, which this constructor already does)."""

    def __init__(self, ps, edges):
        n = len(ps)
        nbrs = [[] for _ in range(n)]
        eset = set()
        for u, v in edges:
            ek = edge_key(u, v)
            if ek in eset or u == v:
                raise ValueError(f"bad tree edge {ek}")
            eset.add(ek)
            nbrs[u].append(v)
            nbrs[v].append(u)
        if len(eset) != n - 1:
            raise ValueError(f"{len(eset)} edges cannot span {n} points")
        seen = bytearray(n)
        stack = [0]
        seen[0] = 1
        count = 1
        while stack:
            u = stack.pop()
            for w in nbrs[u]:
                if not seen[w]:
                    seen[w] = 1
                    count += 1
                    stack.append(w)
        if count != n:
            raise ValueError("tree edges do not connect all points")
        self.ps = ps
        self.edges = sorted(eset)
        self.rings = [sort_ring(ps.kernel, v, nbrs[v]) for v in range(n)]
        self.deg = [len(r) for r in self.rings]

    def __len__(self):
        return len(self.ps)

    def rooted_order(self, root):
        """(parent array, preorder list) for a DFS from root following the
        sorted rings."""
        n = len(self.ps)
        parent = [-1] * n
        order = []
        stack = [root]
        visited = bytearray(n)
        visited[root] = 1
        while stack:
            u = stack.pop()
            order.append(u)
            for w in reversed(self.rings[u]):
                if not visited[w]:
                    visited[w] = 1
                    parent[w] = u
                    stack.append(w)
        return parent, order


def spanning_tree_of(g):
    """BFS spanning tree of a triangulation (or any connected graph object
    exposing ``rings`` and ``ps``); ring order is inherited from the host
    graph and re-sorted geometrically by the SpanningTree constructor."""
    n = len(g.ps)
    from collections import deque

    edges = []
    seen = bytearray(n)
    start = min(g.vertex_ids) if getattr(g, "vertex_ids", None) else 0
    seen[start] = 1
    dq = deque([start])
    while dq:
        u = dq.popleft()
        for w in g.rings[u]:
            if not seen[w]:
                seen[w] = 1
                edges.append((u, w))
                dq.append(w)
    if len(edges) != n - 1:
        raise VertexMismatch("graph does not connect the full point set")
    return SpanningTree(g.ps, edges)


class WeightedSampleLadder:
    """Nested degree-weighted samples drawn as prefixes of one shuffled
    copy of the multiset in which every vertex appears once per incident
    tree edge.  Prefix-taking makes the nesting exact and runs
    reproducible from the single seed."""

    def __init__(self, tree, seed=0):
        multiset = []
        for v in range(len(tree)):
            multiset.extend([v] * tree.deg[v])
        rng = random.Random(seed)
        rng.shuffle(multiset)
        n = len(tree)
        schedule = [n]
        while schedule[-1] > 1:
            schedule.append(max(1, int(math.log2(schedule[-1]))))
        total = len(multiset)  # 2(n-1)
        sizes = [min(total, -(-total // s)) for s in schedule]
        self.seed = seed
        self.schedule = schedule
        self.sizes = sizes
        self.perm = multiset

    def __len__(self):
        return len(self.schedule)

    def level_prefix(self, i):
        """The i-th multiset sample (0-based level index)."""
        return self.perm[: self.sizes[i]]

    def level_ids(self, i):
        """The i-th sample with duplicates removed, in prefix order."""
        seen = set()
        out = []
        for v in self.level_prefix(i):
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out


def build_ladder(tree, seed=0):
    return WeightedSampleLadder(tree, seed)


class ConflictAssignment:
    """Per-point containing triangle in DT(R) and per-triangle conflict
    lists (point ids strictly inside the triangle's circumcircle)."""

    def __init__(self, point_tri, tri_conflicts):
        self.point_tri = point_tri
        self.tri_conflicts = tri_conflicts


def _walk_pass(mesh, tree, root, cap, delta, stats=None):
    """Recompute the containing triangle of every point by walking the
    tree over the frozen mesh; walks that cross more than ``cap`` edges
    fall back to a point-location query."""
    parent, order = tree.rooted_order(root)
    vt = mesh.vert_tri
    fallbacks = 0
    for q in order[1:]:
        p = parent[q]
        if q in vt and mesh.alive[vt[q]]:
            delta[q] = -1  # a mesh vertex locates itself
            continue
        if p in vt and mesh.alive[vt[p]]:
            t, _cr, aborted = mesh.walk_from_vertex(p, q, cap=cap)
        else:
            t, _cr, aborted = _walk_from_inside(mesh, delta[p], p, q, cap)
        if aborted:
            t = mesh.locate(q)
            fallbacks += 1
        delta[q] = t
    if stats is not None:
        stats["walk_fallbacks"] = stats.get("walk_fallbacks", 0) + fallbacks
    return delta


def _walk_from_inside(mesh, t, p, q, cap):
    """Straight walk along segment pq starting inside triangle t (p is a
    point index lying in t, not a mesh vertex)."""
    tv = mesh.tv
    k = mesh.kern
    i = 3 * t
    if q in (tv[i], tv[i + 1], tv[i + 2]):
        return (t, 0, False)
    from .predicates import CCW

    for j in (0, 1, 2):
        ea = tv[i + (j + 1) % 3]
        eb = tv[i + (j + 2) % 3]
        if k.orient(p, q, ea) != CCW and k.orient(p, q, eb) == CCW:
            return mesh._walk(t, j, p, q, cap)
    # q's direction leaves through no edge: q is inside t as well
    return (t, 0, False)


def conflict_lists(mesh, tree, ps, cap=None):
    """Realize the capped-walk conflict computation against a frozen
    DT(R) mesh: every point's containing triangle via the tree traversal,
    then its full conflict set by a search over in-circle-conflicting
    triangles.  Points that are vertices of R get the triangle their first
    outgoing tree edge opens into, and empty conflict sets."""
    n = len(tree)
    if cap is None:
        cap = max(1, math.ceil(math.log2(n)))
    vt = mesh.vert_tri
    root = None
    for v in range(n):
        if v in vt and mesh.alive[vt[v]]:
            root = v
            break
    if root is None:
        raise ValueError("mesh shares no vertex with the tree")
    delta = [None] * n
    _walk_pass(mesh, tree, root, cap, delta)
    point_tri = {}
    tri_conflicts = {t: [] for t in mesh.live_triangles()}
    adj = mesh.adj
    for p in range(n):
        if delta[p] == -1 or p == root:
            point_tri[p] = mesh.wedge_triangle(p, tree.rings[p][0])
            continue
        point_tri[p] = delta[p]
        # search the edge-connected conflict region around the seed
        mesh._stamp += 1
        s = mesh._stamp
        stamps = mesh._stamps
        stamps[delta[p]] = s
        stack = [delta[p]]
        mine = []
        while stack:
            u = stack.pop()
            if not mesh._conflict(u, p):
                continue
            mine.append(u)
            i = 3 * u
            for o in (adj[i], adj[i + 1], adj[i + 2]):
                w = o // 3
                if stamps[w] != s:
                    stamps[w] = s
                    stack.append(w)
        for u in mine:
            tri_conflicts[u].append(p)
    return ConflictAssignment(point_tri, tri_conflicts)


def refine(mesh, new_ids, delta=None):
    """Insert the next sample level into the running mesh, each point
    seeded by its recorded triangle (stale seeds are revived through the
    history links; points already present are skipped)."""
    vt = mesh.vert_tri
    for v in new_ids:
        if v in vt:
            continue  # already a vertex of the current level
        seed = None if delta is None else delta[v]
        if seed is None or seed == -1:
            mesh.insert(v)
        else:
            mesh.insert_seeded(v, seed)
    return mesh


def repair_from_tree(tree, ps, seed=0, stats=None, validate=False):
    """Delaunay triangulation of ps guided by a spanning tree: build the
    sample ladder, then refine level by level, locating each new point by
    the capped tree walks of the previous level."""
    if stats is None:
        stats = {}
    n = len(ps)
    if n < 3:
        raise TooFewPoints("need at least 3 points")
    ladder = WeightedSampleLadder(tree, seed)
    cap = max(1, math.ceil(math.log2(n)))
    stats["levels"] = len(ladder)
    stats["schedule"] = list(ladder.schedule)

    mesh = TriMesh(ps)
    first = ladder.level_ids(0)
    for v in first:
        mesh.insert(v)
    root = first[0]
    delta = [None] * n
    for lvl in range(1, len(ladder)):
        new_ids = [v for v in ladder.level_ids(lvl) if v not in mesh.vert_tri]
        if not new_ids:
            continue
        _walk_pass(mesh, tree, root, cap, delta, stats)
        refine(mesh, new_ids, delta)
        if validate:
            mesh.check_consistent()
    return mesh.strip(validate=validate)


def repair(g, seed=0, stats=None, validate=False):
    """Randomized repair of a prediction: take any spanning tree of it and
    rebuild the Delaunay triangulation along the sample ladder."""
    tree = spanning_tree_of(g)
    return repair_from_tree(tree, g.ps, seed=seed, stats=stats, validate=validate)


def emst_repair(t, ps, seed=0, stats=None):
    """Euclidean minimum spanning tree from a predicted spanning tree:
    repair to DT(P) along the prediction, then take the exact-weight
    minimum spanning tree of the result."""
    if stats is None:
        stats = {}
    stats["ring_sort_excess"] = sum(max(d - 6, 0) for d in t.deg)
    dt = repair_from_tree(t, ps, seed=seed, stats=stats)
    from .delaunay import planar_mst

    return planar_mst(dt)
