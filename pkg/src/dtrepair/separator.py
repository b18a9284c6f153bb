"""Deterministic repair via planar divisions of the prediction's dual.

Pipeline: divide the dual graph of the prediction into regions of ~t
triangles with ~sqrt(t)-sized triangle boundaries, Delaunay-triangulate
the boundary vertices, classify each region (its boundary triangles
appear in that Delaunay triangulation and its neighborhood is locally
Delaunay), patch good regions' triangles into the boundary triangulation
wholesale, rebuild only the bad regions' vertices from scratch, and merge.
The number of bad regions is bounded by the number of wrong edges, which
is what makes the whole repair cheap for near-correct predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .delaunay import delaunay, engine_from_triangulation, insert_batch, merge_dt
from .mesh import Triangulation, edge_key, sort_ring
from .verify import is_delaunay


@dataclass
class RDivision:
    regions: list  # triangle-index lists, a partition of the dual nodes
    region_of: list  # triangle index -> region index
    region_vertices: list  # per region: vertex ids of its triangles
    region_boundary: list  # per region: surrounding (outside) triangle ids
    boundary_tris: set  # union of the per-region boundary sets
    boundary_vertices: set  # V_B: vertices of all boundary triangles
    t: int = 0
    stats: dict = field(default_factory=dict)


def _components(nodes, adjacency, member):
    comps = []
    seen = set()
    for s in nodes:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adjacency[u]:
                if w >= 0 and member(w) and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(comp)
    return comps


def _split(comp, adjacency, weight=None):
    """Split a connected dual-node set by a balanced BFS-level separator.
    Returns a list of strictly smaller connected parts."""
    inset = set(comp)
    # two-sweep start: BFS from the first node, then from a farthest node
    def bfs_levels(root):
        levels = [[root]]
        seen = {root}
        while True:
            nxt = []
            for u in levels[-1]:
                for w in adjacency[u]:
                    if w >= 0 and w in inset and w not in seen:
                        seen.add(w)
                        nxt.append(w)
            if not nxt:
                return levels
            levels.append(nxt)

    lv0 = bfs_levels(min(comp))
    levels = bfs_levels(min(lv0[-1]))
    if weight is None:
        wts = [len(l) for l in levels]
    else:
        wts = [sum(weight(u) for u in l) for l in levels]
    total = sum(wts)
    cum = 0
    best = None
    for i, l in enumerate(levels):
        below = cum
        cum += wts[i]
        above = total - cum
        if below >= total / 4 and above >= total / 4:
            if best is None or len(l) < len(levels[best]):
                best = i
    if best is None:
        # no balanced level: cut at the weight median
        cum = 0
        for i in range(len(levels)):
            cum += wts[i]
            if cum * 2 >= total:
                best = i
                break
    sep = set(levels[best])
    below = [u for l in levels[:best] for u in l]
    above = [u for l in levels[best + 1 :] for u in l]
    if not above and not below:
        # the component is a single BFS level; peel it apart
        half = len(comp) // 2
        a, b = comp[:half], comp[half:]
        return _components(a, adjacency, set(a).__contains__) + _components(
            b, adjacency, set(b).__contains__
        )
    if not above:
        a = below
        b = levels[best]
    else:
        a = below + levels[best]
        b = above
    aset = set(a)
    bset = set(b)
    return _components(a, adjacency, aset.__contains__) + _components(
        b, adjacency, bset.__contains__
    )


def t_division(g, t):
    """A t-division of the dual graph of triangulation g: connected regions
    of at most ~t triangles whose surrounding-triangle sets stay ~sqrt(t)."""
    if t < 4:
        raise ValueError("t must be at least 4")
    tris = g.triangles()
    adjacency = g.triangle_adjacency()
    nt = len(tris)
    queue = [list(range(nt))]
    regions = []
    while queue:
        comp = queue.pop()
        if len(comp) <= t:
            regions.append(sorted(comp))
            continue
        queue.extend(_split(comp, adjacency, None))

    # boundary repair: re-split regions whose surrounding set is too large,
    # biasing the balance toward boundary-adjacent triangles
    bcap = 4 * math.isqrt(t)
    region_of = [-1] * nt
    for r, comp in enumerate(regions):
        for u in comp:
            region_of[u] = r

    def boundary_of(comp, rid):
        out = set()
        for u in comp:
            for w in adjacency[u]:
                if w >= 0 and region_of[w] != rid:
                    out.add(w)
        return out

    changed = True
    while changed:
        changed = False
        for rid in range(len(regions)):
            comp = regions[rid]
            if len(comp) <= 1:
                continue
            bset = boundary_of(comp, rid)
            if len(bset) <= 8 * math.isqrt(t) or len(comp) <= max(4, t // 16):
                continue
            if len(bset) <= bcap:
                continue
            inset = set(comp)

            def wt(u):
                return 1 + 2 * sum(
                    1 for w in adjacency[u] if w >= 0 and w not in inset
                )

            parts = _split(comp, adjacency, wt)
            if len(parts) <= 1:
                continue
            regions[rid] = sorted(parts[0])
            for u in parts[0]:
                region_of[u] = rid
            for extra in parts[1:]:
                nrid = len(regions)
                regions.append(sorted(extra))
                for u in extra:
                    region_of[u] = nrid
            changed = True

    region_vertices = []
    region_boundary = []
    for rid, comp in enumerate(regions):
        vs = set()
        bs = set()
        for u in comp:
            vs.update(tris[u])
            for w in adjacency[u]:
                if w >= 0 and region_of[w] != rid:
                    bs.add(w)
        region_vertices.append(vs)
        region_boundary.append(bs)
    boundary_tris = set()
    for bs in region_boundary:
        boundary_tris |= bs
    vb = set()
    for u in boundary_tris:
        vb.update(tris[u])
    return RDivision(
        regions=regions,
        region_of=region_of,
        region_vertices=region_vertices,
        region_boundary=region_boundary,
        boundary_tris=boundary_tris,
        boundary_vertices=vb,
        t=t,
    )


def classify_regions(g, rd, dt_B):
    """Good/bad flags per region: (i) every surrounding triangle appears as
    a triangle of DT(V_B), and (ii) every interior edge with a side inside
    the region (or with both sides surrounding it) is locally Delaunay."""
    tris = g.triangles()
    dtb_keys = (
        {tuple(sorted(t)) for t in dt_B.triangles()} if dt_B is not None else set()
    )
    ld = {}

    def locally_ok(u, v):
        e = edge_key(u, v)
        r = ld.get(e)
        if r is None:
            r = g.is_locally_delaunay(e)
            ld[e] = r
        return r

    flags = []
    for rid, comp in enumerate(rd.regions):
        good = True
        for bt in rd.region_boundary[rid]:
            if dt_B is None or tuple(sorted(tris[bt])) not in dtb_keys:
                good = False
                break
        if good:
            for u in comp:
                a, b, c = tris[u]
                if not (
                    locally_ok(a, b) and locally_ok(b, c) and locally_ok(c, a)
                ):
                    good = False
                    break
        if good:
            # pairs with both triangles surrounding the region
            bset = rd.region_boundary[rid]
            adjacency = g.triangle_adjacency()
            for bt in bset:
                for w in adjacency[bt]:
                    if w in bset and w > bt:
                        shared = set(tris[bt]) & set(tris[w])
                        if len(shared) == 2:
                            u, v = sorted(shared)
                            if not locally_ok(u, v):
                                good = False
                                break
                if not good:
                    break
        flags.append(good)
    return flags


def _patch_good_regions(g, rd, flags, dt_B):
    """Triangle soup of DT(V_B | V_good): DT(V_B) with, per good region,
    everything inside its interface ring replaced by the region's own
    triangles."""
    tris = g.triangles()
    dart_to_tri = {}
    dtb_tris = dt_B.triangles()
    for ti, (a, b, c) in enumerate(dtb_tris):
        dart_to_tri[(a, b)] = ti
        dart_to_tri[(b, c)] = ti
        dart_to_tri[(c, a)] = ti
    adjacency = g.triangle_adjacency()
    dtb_adj = dt_B.triangle_adjacency()
    blocked = set()
    seeds = []
    hull_edges = g.hull_edges
    for rid, comp in enumerate(rd.regions):
        if not flags[rid]:
            continue
        inset = set(comp)
        for u in comp:
            a, b, c = tris[u]
            for (x, y), w in (((b, c), 0), ((c, a), 1), ((a, b), 2)):
                nb = adjacency[u][w]
                if nb >= 0 and nb in inset:
                    continue
                ek = edge_key(x, y)
                if ek in hull_edges:
                    continue  # the pocket side ends at the hull
                blocked.add(ek)
                # the region lies left of dart (x, y); so does the pocket
                seed = dart_to_tri.get((x, y))
                if seed is None:
                    raise AssertionError(
                        "interface edge missing from DT(V_B); classification broken"
                    )
                seeds.append(seed)
    carved = set()
    stack = []
    for s in seeds:
        if s not in carved:
            carved.add(s)
            stack.append(s)
    while stack:
        u = stack.pop()
        a, b, c = dtb_tris[u]
        for (x, y), w in (((b, c), 0), ((c, a), 1), ((a, b), 2)):
            if edge_key(x, y) in blocked:
                continue
            nb = dtb_adj[u][w]
            if nb >= 0 and nb not in carved:
                carved.add(nb)
                stack.append(nb)
    soup = [t for ti, t in enumerate(dtb_tris) if ti not in carved]
    for rid, comp in enumerate(rd.regions):
        if flags[rid]:
            soup.extend(tris[u] for u in comp)
    return soup


def _triangulation_from_soup(ps, soup, validate=False):
    nbrs = {}
    for a, b, c in soup:
        nbrs.setdefault(a, set()).update((b, c))
        nbrs.setdefault(b, set()).update((a, c))
        nbrs.setdefault(c, set()).update((a, b))
    rings = [[] for _ in range(len(ps))]
    for v, ns in nbrs.items():
        rings[v] = sort_ring(ps.kernel, v, sorted(ns))
    return Triangulation(ps, rings, vertex_ids=set(nbrs), validate=validate)


def repair(g, seed=0, stats=None, validate=False):
    """Restore the Delaunay triangulation from prediction g (the division
    pipeline; output always equals delaunay(P))."""
    if stats is None:
        stats = {}
    ps = g.ps
    kern = ps.kernel
    n = len(g.vertex_ids)
    t = max(4, math.ceil(math.log2(n)) ** 2)
    rd = t_division(g, t)
    stats["t"] = t
    stats["regions"] = len(rd.regions)
    stats["V_B"] = len(rd.boundary_vertices)

    vb = sorted(rd.boundary_vertices)
    before = kern.incircle_count
    dt_B = delaunay(ps, seed=seed, ids=vb) if len(vb) >= 3 else None
    stats["incircle_step2"] = kern.incircle_count - before

    flags = classify_regions(g, rd, dt_B)
    stats["bad_regions"] = sum(1 for f in flags if not f)

    bad_vertices = set()
    for rid, comp in enumerate(rd.regions):
        if not flags[rid]:
            bad_vertices |= rd.region_vertices[rid]
    bad_vertices -= rd.boundary_vertices
    if dt_B is None:
        bad_vertices |= rd.boundary_vertices
    stats["V_bad"] = len(bad_vertices)

    if dt_B is not None and any(flags):
        soup = _patch_good_regions(g, rd, flags, dt_B)
        patched = _triangulation_from_soup(ps, soup, validate=validate)
        if validate:
            assert is_delaunay(patched), "patched complex is not locally Delaunay"
    elif dt_B is None and flags and all(flags):
        # one region, no boundary, everything locally Delaunay: g is done
        patched = g
    else:
        patched = dt_B  # nothing good to graft

    before = kern.incircle_count
    dt_bad = (
        delaunay(ps, seed=seed + 1, ids=sorted(bad_vertices))
        if len(bad_vertices) >= 3
        else None
    )
    stats["incircle_step5"] = kern.incircle_count - before

    if patched is None and dt_bad is None:
        raise AssertionError("nothing to repair from")
    if patched is None:
        result = dt_bad
        leftovers = set()
    elif dt_bad is None:
        result = patched
        leftovers = bad_vertices
    else:
        result = merge_dt(patched, dt_bad)
        leftovers = set()
    missing = (set(g.vertex_ids) - set(result.vertex_ids)) | leftovers
    if missing:
        mesh = engine_from_triangulation(result)
        insert_batch(mesh, missing)
        result = mesh.strip(validate=validate)
    return result
