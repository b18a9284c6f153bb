"""Verification: is a triangulation exactly Delaunay, and which PSLG edges
are certified Delaunay edges.

The certifier needs only local circle tests (each triangle against the
vertices of its neighbor faces, isolated vertices included), yet a
positive answer guarantees globally that every edge belongs to the
Delaunay triangulation.  The converse direction is not claimed: an
uncertified graph may still be all-Delaunay.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mesh import Triangulation, build_from_edges, convex_hull, dt_equal, edge_key
from .predicates import INSIDE

__all__ = ["is_delaunay", "certify_subgraph", "CertResult", "dt_equal", "cascade_removal"]


def is_delaunay(g):
    """True iff every interior edge of the triangulation is locally
    Delaunay, which for a full triangulation certifies g = DT(P)."""
    return all(g.is_locally_delaunay(e) for e in g.interior_edges())


@dataclass
class CertResult:
    certified: bool
    reason: str = ""
    witness_edge: tuple | None = None
    witness: tuple | None = None  # (triangle vertices, violating point)


def certify_subgraph(g):
    """Certify that every edge of the PSLG g is a Delaunay edge of its
    point set.

    Hypothesis (checked): each edge lies on the convex hull boundary or
    borders a triangular face.  Test: for every triangular face, all
    vertices of its neighbor faces (isolated vertices inside them
    included) are outside its circumcircle.  The first violation found in
    face-scan order is reported as the witness.
    """
    kernel = g.kernel
    faces = g.faces()
    hull = convex_hull(kernel, sorted(g.vertex_ids))
    hull_edges = {
        edge_key(hull[i], hull[(i + 1) % len(hull)]) for i in range(len(hull))
    }
    triangle_regions = {
        rid for rid, reg in enumerate(faces.regions) if not reg.outer and reg.is_triangle()
    }
    for u, v in g.canonical_edge_set():
        if edge_key(u, v) in hull_edges:
            continue
        r1, r2 = faces.edge_regions(u, v)
        if r1 not in triangle_regions and r2 not in triangle_regions:
            return CertResult(
                False,
                reason="edge not on the hull and not next to a triangular face",
                witness_edge=(u, v),
            )
    for rid in sorted(triangle_regions):
        reg = faces.regions[rid]
        tri = sorted({u for u, _ in reg.orbit})
        a, b, c = tri
        neighbor_ids = set()
        for u, v in reg.orbit:
            neighbor_ids.add(faces.region_of_dart(v, u))
        neighbor_ids.discard(rid)
        pts = set()
        for nid in neighbor_ids:
            pts |= faces.regions[nid].vertices()
        for w in sorted(pts - {a, b, c}):
            if kernel.incircle(a, b, c, w) == INSIDE:
                return CertResult(False, reason="circumcircle violation", witness=((a, b, c), w))
    return CertResult(True)


def cascade_removal(g, removed_edges):
    """Remove the given edges from a triangulation, then repeatedly remove
    every edge whose two sides are bounded non-triangular faces.  Returns
    the total number of edges removed (seed set included)."""
    edges = set(g.canonical_edge_set())
    for e in removed_edges:
        edges.discard(edge_key(*e))
    total = len(g.canonical_edge_set()) - len(edges)
    while True:
        pslg = build_from_edges(g.ps, sorted(edges), validate_crossings=False)
        faces = pslg.faces()
        triangle_regions = {
            rid
            for rid, reg in enumerate(faces.regions)
            if not reg.outer and reg.is_triangle()
        }
        drop = []
        for u, v in pslg.canonical_edge_set():
            r1, r2 = faces.edge_regions(u, v)
            # both sides bounded and non-triangular (the two sides may be
            # the same face: such bridge edges go too)
            if (
                r1 not in triangle_regions
                and r2 not in triangle_regions
                and not faces.regions[r1].outer
                and not faces.regions[r2].outer
            ):
                drop.append((u, v))
        if not drop:
            break
        for e in drop:
            edges.discard(edge_key(*e))
        total += len(drop)
    return total
