"""Prediction-instance generators: random flips on the Delaunay
triangulation, independent edge sampling with a completion policy, and
position-perturbation predictions that may self-cross when re-embedded.
"""

from __future__ import annotations

import math
import random

from .delaunay import delaunay
from .errors import NotFlippable, NotPlanar
from .mesh import PointSet, Triangulation, build_from_edges, edge_key
from .predicates import _scaled_ints


def gen_points(n, distribution="uniform-square", seed=0, jitter=0.4):
    """Reproducible point sets; exact duplicate draws are rejected and
    redrawn.  ``jitter`` only affects the grid distribution (0 is allowed:
    the symbolic perturbation copes with the degenerate grid)."""
    if n < 3:
        raise ValueError("need n >= 3")
    rng = random.Random(seed)
    pts = []
    seen = set()

    def push(x, y):
        if (x, y) in seen:
            return False
        seen.add((x, y))
        pts.append((x, y))
        return True

    if distribution == "uniform-square":
        while len(pts) < n:
            push(rng.random(), rng.random())
    elif distribution == "gaussian-clusters":
        nc = max(1, round(math.sqrt(n) / 3))
        centers = [(rng.random(), rng.random()) for _ in range(nc)]
        while len(pts) < n:
            cx, cy = centers[rng.randrange(nc)]
            push(cx + rng.gauss(0, 0.06), cy + rng.gauss(0, 0.06))
    elif distribution == "grid-jitter":
        side = math.ceil(math.sqrt(n))
        cells = [(i, j) for j in range(side) for i in range(side)][:n]
        for i, j in cells:
            while True:
                x = (i + 0.5 + jitter * (rng.random() - 0.5)) / side
                y = (j + 0.5 + jitter * (rng.random() - 0.5)) / side
                if push(x, y):
                    break
    else:
        raise ValueError(f"unknown distribution {distribution!r}")
    return PointSet(pts)


class _EdgeRegistry:
    """Labelled current edges of a triangulation: flips preserve labels
    (the replacing diagonal inherits the flipped edge's label)."""

    def __init__(self, g):
        self.labels = sorted(g.edge_set)
        self.label_of = {e: i for i, e in enumerate(self.labels)}

    def replace(self, old, new):
        i = self.label_of.pop(old)
        self.labels[i] = new
        self.label_of[new] = i


def flip_model(dt, steps, seed=0, validate=True):
    """Run the random-flip process for exactly ``steps`` iterations: pick a
    uniform edge label, flip it if its quadrilateral is strictly convex."""
    if validate:
        from .verify import is_delaunay

        if not is_delaunay(dt):
            raise ValueError("flip_model must start from the Delaunay triangulation")
    g = dt.copy()
    reg = _EdgeRegistry(g)
    rng = random.Random(seed)
    m = len(reg.labels)
    for _ in range(steps):
        e = reg.labels[rng.randrange(m)]
        try:
            new = g.flip(e)
        except NotFlippable:
            continue
        reg.replace(e, new)
    return g


def edge_sample_model(dt, rho, completion="random", seed=0):
    """Keep each Delaunay edge independently with probability rho, then
    complete the kept set R to a full triangulation under the given policy.

    The returned triangulation contains R (``.kept_edges``).  Completion
    rearranges the non-kept diagonals by flips, which reaches every
    triangulation containing R; "longest-first" greedily flips to strictly
    longer diagonals (a hostile completion: long edges cross many Delaunay
    edges), "random" applies a long random flip walk.
    """
    if not (0 < rho <= 1):
        raise ValueError("rho must be in (0, 1]")
    rng = random.Random(seed)
    g = dt.copy()
    kept = {e for e in sorted(g.edge_set) if rng.random() < rho}
    reg = _EdgeRegistry(g)
    m = len(reg.labels)
    if completion == "random":
        for _ in range(3 * m):
            e = reg.labels[rng.randrange(m)]
            if e in kept:
                continue
            try:
                new = g.flip(e)
            except NotFlippable:
                continue
            reg.replace(e, new)
    elif completion == "longest-first":
        w = _edge_weigher(g.ps)
        for _pass in range(16):
            changed = False
            for e in sorted(set(g.edge_set) - kept - g.hull_edges):
                if e not in g.edge_set:
                    continue  # a flip this pass already removed it
                u, v = e
                w1 = g._apex(u, v)
                w2 = g._apex(v, u)
                if w(edge_key(w1, w2)) <= w(e):
                    continue
                try:
                    g.flip(e)
                except NotFlippable:
                    continue
                changed = True
            if not changed:
                break
    else:
        raise ValueError(f"unknown completion {completion!r}")
    g.kept_edges = kept
    assert kept <= g.edge_set
    return g


def _edge_weigher(ps):
    ints = _scaled_ints([c for xy in zip(ps.xs, ps.ys) for c in xy])

    def weight(e):
        u, v = e
        dx = ints[2 * u] - ints[2 * v]
        dy = ints[2 * u + 1] - ints[2 * v + 1]
        return dx * dx + dy * dy

    return weight


class CombinatorialTriangulation:
    """A triangulation combinatorially, re-embedded on other coordinates:
    edges may properly cross.  Only the spanning-tree-based repair accepts
    this type (through its spanning tree)."""

    may_self_cross = True
    is_triangulation = False

    def __init__(self, ps, edges, rings):
        self.ps = ps
        self.kernel = ps.kernel
        self.edge_set = {edge_key(u, v) for u, v in edges}
        self.rings = rings
        self.vertex_ids = frozenset(range(len(ps)))
        self.m = len(self.edge_set)

    def canonical_edge_set(self):
        return sorted(self.edge_set)


def perturb_model(ps, eps, seed=0):
    """Delaunay triangulation of an eps-perturbed copy of the points,
    re-embedded on the true coordinates.

    Returns a Triangulation when the re-embedding happens to stay planar
    and triangulates ps; otherwise a CombinatorialTriangulation flagged as
    possibly self-crossing.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    rng = random.Random(seed)
    coords = []
    seen = set()
    for x, y in zip(ps.xs, ps.ys):
        while True:
            px = x + eps * (2 * rng.random() - 1)
            py = y + eps * (2 * rng.random() - 1)
            if (px, py) not in seen:
                break
        seen.add((px, py))
        coords.append((px, py))
    pert = PointSet(coords)
    dtp = delaunay(pert, seed=seed)
    edges = dtp.canonical_edge_set()
    try:
        g = build_from_edges(ps, edges)
        if isinstance(g, Triangulation):
            return g
    except NotPlanar:
        pass
    return CombinatorialTriangulation(ps, edges, [list(r) for r in dtp.rings])
