"""Exact 2D geometric predicates with deterministic symbolic tie-breaking.

Every predicate runs a cheap floating-point filter first (Shewchuk-style
static error bounds) and falls back to exact integer arithmetic when the
filter cannot certify the sign.  Exact zeros are then resolved by a
symbolic perturbation ordered by point id, so orientation and in-circle
queries never report a degenerate answer and every point set has one
well-defined Delaunay triangulation.

Perturbation scheme
-------------------
Point with id ``i`` is displaced by ``(d**(3**(2*i+1)), d**(3**(2*i)))``
for an infinitesimal ``d > 0``.  Smaller ids receive (infinitely) larger
displacements, and within one point the y-displacement dominates the
x-displacement.  A product of displacement variables has magnitude
``d**w`` where ``w`` is the sum of the per-variable weights ``3**v``
(each variable appears at most squared, so weights written in base 3
never carry and distinct monomials get distinct weights).  The sign of a
perturbed determinant is the sign of its smallest-weight non-vanishing
coefficient.  Because these are limits of honest point configurations,
all determinant symmetries survive the tie-breaking.

Symbolic far points
-------------------
Ids -1, -2, -3 denote three far points F1, F2, F3 in directions
(0,1), (-1,-1), (1,-1) at magnitudes r1 >> r2 >> r3 >> any finite value
(iterated limits, innermost first).  They close the plane into a
topological sphere for the incremental construction.  Signs of
determinants involving far rows are the signs of the lexicographically
leading (r1-degree, r2-degree, r3-degree) coefficient; each case below
reduces to a finite predicate or a constant.
"""

from __future__ import annotations

import math

from .errors import DuplicatePoint
from typing import NamedTuple


class Point(NamedTuple):
    x: float
    y: float
    id: int


# Orientation values (never a third "collinear" value at the API surface).
CCW = 1
CW = -1

# In-circle values.
INSIDE = 1
OUTSIDE = -1

# Far-point ids and directions.
FAR1, FAR2, FAR3 = -1, -2, -3
_FAR_UX = {FAR1: 0, FAR2: -1, FAR3: 1}
_FAR_UY = {FAR1: 1, FAR2: -1, FAR3: -1}

# ---------------------------------------------------------------------------
# Static filter constants, computed the same way triangle.c does.

_every_other = True
_epsilon = 1.0
_splitter = 1.0
_check = 1.0
while True:
    _lastcheck = _check
    _epsilon *= 0.5
    if _every_other:
        _splitter *= 2.0
    _every_other = not _every_other
    _check = 1.0 + _epsilon
    if _check == 1.0 or _check == _lastcheck:
        break
_splitter += 1.0

_CCWERRBOUND_A = (3.0 + 16.0 * _epsilon) * _epsilon
_ICCERRBOUND_A = (10.0 + 96.0 * _epsilon) * _epsilon
# Additive cushion so products deep in the subnormal range never silently
# pass the relative-error test; anything this small goes to the exact stage.
_TINY = 1e-292


def _scaled_ints(vals):
    """Map floats to integers on a common power-of-two denominator.

    Uniform positive scaling preserves the sign of every predicate
    (including the perturbed expansions), so a per-call scale is sound.
    """
    fracs = [v.as_integer_ratio() for v in vals]
    den = max(f[1] for f in fracs)
    return [n * (den // d) for n, d in fracs]


def _sign(v):
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


# ---------------------------------------------------------------------------
# Exact + perturbed cores (integer coordinates).


def _orient_exact(ia, ax, ay, ib, bx, by, ic, cx, cy):
    """Sign of the perturbed orientation determinant, integer coords."""
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    if det:
        return 1 if det > 0 else -1
    # Symbolic expansion.  Sort rows by id; the determinant is alternating,
    # so track the permutation sign.
    rows = [(ia, ax, ay), (ib, bx, by), (ic, cx, cy)]
    par = 1
    if rows[0][0] > rows[1][0]:
        rows[0], rows[1] = rows[1], rows[0]
        par = -par
    if rows[1][0] > rows[2][0]:
        rows[1], rows[2] = rows[2], rows[1]
        par = -par
        if rows[0][0] > rows[1][0]:
            rows[0], rows[1] = rows[1], rows[0]
            par = -par
    (_, x1, _y1), (_, x2, y2), (_, x3, y3) = rows
    # Terms of the expansion in decreasing magnitude; the last one is the
    # constant +1 coefficient of e1*f2, so the chain always terminates.
    for term in (x3 - x2, y2 - y3, x1 - x3):
        if term:
            return par if term > 0 else -par
    return par


def _cross_origin_perturbed(ib, bx, by, ic, cx, cy):
    """Sign of perturbed det [[bx,by],[cx,cy]] (exactly zero unperturbed)."""
    if ib > ic:
        s = -_cross_origin_perturbed(ic, cx, cy, ib, bx, by)
        return s
    # ids sorted: b has the dominant variables.
    for term in (-cx, cy, bx):
        if term:
            return 1 if term > 0 else -1
    return 1  # coefficient of e_b * f_c


_PERM4 = []


def _init_perm4():
    import itertools

    for perm in itertools.permutations(range(4)):
        inv = sum(
            1
            for a in range(4)
            for b in range(a + 1, 4)
            if perm[a] > perm[b]
        )
        _PERM4.append((perm, -1 if inv & 1 else 1))


_init_perm4()


def _incircle_sos(ids, xs, ys):
    """Sign of the perturbed 4x4 in-circle determinant (exact zero case).

    Rows are (x, y, x^2 + y^2, 1) for the four points in the given order.
    Entries become polynomials in the displacement variables; monomials are
    keyed by their base-3 weight and the smallest-weight non-vanishing
    coefficient decides.
    """
    rows = []
    for pid, x, y in zip(ids, xs, ys):
        we = 3 ** (2 * pid + 1)
        wf = 3 ** (2 * pid)
        xpoly = {0: x, we: 1}
        ypoly = {0: y, wf: 1}
        lift = {0: x * x + y * y, we: 2 * x, 2 * we: 1, wf: 2 * y, 2 * wf: 1}
        rows.append((xpoly, ypoly, lift, {0: 1}))
    acc = {}
    for perm, psign in _PERM4:
        prod = {0: psign}
        for r in range(4):
            poly = rows[r][perm[r]]
            nxt = {}
            for w1, c1 in prod.items():
                for w2, c2 in poly.items():
                    w = w1 + w2
                    c = nxt.get(w)
                    nxt[w] = c1 * c2 if c is None else c + c1 * c2
            prod = nxt
        for w, c in prod.items():
            a = acc.get(w)
            acc[w] = c if a is None else a + c
    for w in sorted(acc):
        c = acc[w]
        if c:
            return 1 if c > 0 else -1
    raise AssertionError("perturbed in-circle determinant cannot vanish")


def _incircle_exact(ids, axf, ayf, bxf, byf, cxf, cyf, qxf, qyf):
    ax, ay, bx, by, cx, cy, qx, qy = _scaled_ints(
        (axf, ayf, bxf, byf, cxf, cyf, qxf, qyf)
    )
    adx = ax - qx
    ady = ay - qy
    bdx = bx - qx
    bdy = by - qy
    cdx = cx - qx
    cdy = cy - qy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    if det:
        return 1 if det > 0 else -1
    return _incircle_sos(ids, (ax, bx, cx, qx), (ay, by, cy, qy))


class Kernel:
    """Predicates bound to coordinate arrays, with operation counters.

    Vertex indices double as symbolic-perturbation ids, so results are
    reproducible across runs and across independently built structures
    over the same point set.  Negative indices are the far points.
    """

    __slots__ = ("xs", "ys", "ids", "orient_count", "incircle_count", "walk_steps", "flip_count")

    def __init__(self, xs, ys, ids=None):
        self.xs = list(xs)
        self.ys = list(ys)
        self.ids = ids
        self.orient_count = 0
        self.incircle_count = 0
        self.walk_steps = 0
        self.flip_count = 0

    def append(self, x, y):
        self.xs.append(x)
        self.ys.append(y)
        if self.ids is not None:
            self.ids.append(len(self.xs) - 1)
        return len(self.xs) - 1

    def _id(self, i):
        return i if self.ids is None else self.ids[i]

    def reset_counters(self):
        self.orient_count = 0
        self.incircle_count = 0
        self.walk_steps = 0
        self.flip_count = 0

    def counters(self):
        return {
            "incircle_count": self.incircle_count,
            "orient_count": self.orient_count,
            "walk_steps": self.walk_steps,
            "flips": self.flip_count,
        }

    # -- orientation ------------------------------------------------------

    def orient(self, i, j, k):
        """Sign of the (perturbed) signed area of triangle (i, j, k)."""
        self.orient_count += 1
        if i >= 0 and j >= 0 and k >= 0:
            return self._orient_fin(i, j, k)
        return self._orient_far(i, j, k)

    def _orient_fin(self, i, j, k):
        xs = self.xs
        ys = self.ys
        ax = xs[i]
        ay = ys[i]
        bx = xs[j]
        by = ys[j]
        cx = xs[k]
        cy = ys[k]
        detleft = (ax - cx) * (by - cy)
        detright = (ay - cy) * (bx - cx)
        det = detleft - detright
        bound = _CCWERRBOUND_A * (abs(detleft) + abs(detright)) + _TINY
        if det > bound:
            return 1
        if det < -bound:
            return -1
        iax, iay, ibx, iby, icx, icy = _scaled_ints((ax, ay, bx, by, cx, cy))
        return _orient_exact(
            self._id(i), iax, iay, self._id(j), ibx, iby, self._id(k), icx, icy
        )

    def _orient_far(self, i, j, k):
        # Rotate far points to the front (cyclic rotations keep the sign).
        t = (i, j, k)
        nfar = (i < 0) + (j < 0) + (k < 0)
        if nfar == 3:
            # parity of (i, j, k) as a permutation of (-1, -2, -3)
            return 1 if _perm3_parity(-i, -j, -k) else -1
        if nfar == 2:
            while t[2] < 0:
                t = (t[1], t[2], t[0])
            f1, f2, _c = t
            # leading monomial is r_{f1} * r_{f2} * (u_{f1} x u_{f2}), which
            # never vanishes for the three fixed directions
            cr = _FAR_UX[f1] * _FAR_UY[f2] - _FAR_UY[f1] * _FAR_UX[f2]
            return 1 if cr > 0 else -1
        # one far point
        while t[0] >= 0:
            t = (t[1], t[2], t[0])
        f, b, c = t
        return self._orient_one_far(f, b, c)

    def _orient_one_far(self, f, b, c):
        """orient(F, b, c) with one far row: leading term is u x (b - c)."""
        ux = _FAR_UX[f]
        uy = _FAR_UY[f]
        xs = self.xs
        ys = self.ys
        bx = xs[b]
        by = ys[b]
        cx = xs[c]
        cy = ys[c]
        t1 = by - cy
        t2 = bx - cx
        val = ux * t1 - uy * t2
        bound = 4.0 * _epsilon * (abs(bx) + abs(by) + abs(cx) + abs(cy)) + _TINY
        if val > bound:
            return 1
        if val < -bound:
            return -1
        ibx, iby, icx, icy = _scaled_ints((bx, by, cx, cy))
        ival = ux * (iby - icy) - uy * (ibx - icx)
        if ival:
            return 1 if ival > 0 else -1
        # b - c parallel to u: the displacement of the smaller id decides.
        sm = 1 if self._id(b) < self._id(c) else -1
        if ux:
            return sm if ux > 0 else -sm
        return sm if -uy > 0 else -sm

    # -- in-circle ---------------------------------------------------------

    def incircle_raw(self, i, j, k, q):
        """Sign of the 4x4 in-circle determinant with rows (i, j, k, q).

        Positive means q is strictly inside the circumcircle when (i, j, k)
        is counterclockwise.  q must be finite; i, j, k may be far points.
        """
        self.incircle_count += 1
        if i >= 0 and j >= 0 and k >= 0:
            xs = self.xs
            ys = self.ys
            ax = xs[i]
            ay = ys[i]
            bx = xs[j]
            by = ys[j]
            cx = xs[k]
            cy = ys[k]
            qx = xs[q]
            qy = ys[q]
            adx = ax - qx
            ady = ay - qy
            bdx = bx - qx
            bdy = by - qy
            cdx = cx - qx
            cdy = cy - qy
            bdxcdy = bdx * cdy
            cdxbdy = cdx * bdy
            alift = adx * adx + ady * ady
            cdxady = cdx * ady
            adxcdy = adx * cdy
            blift = bdx * bdx + bdy * bdy
            adxbdy = adx * bdy
            bdxady = bdx * ady
            clift = cdx * cdx + cdy * cdy
            det = (
                alift * (bdxcdy - cdxbdy)
                + blift * (cdxady - adxcdy)
                + clift * (adxbdy - bdxady)
            )
            permanent = (
                (abs(bdxcdy) + abs(cdxbdy)) * alift
                + (abs(cdxady) + abs(adxcdy)) * blift
                + (abs(adxbdy) + abs(bdxady)) * clift
            )
            bound = _ICCERRBOUND_A * permanent + _TINY
            if det > bound:
                return 1
            if det < -bound:
                return -1
            return _incircle_exact(
                (self._id(i), self._id(j), self._id(k), self._id(q)),
                ax, ay, bx, by, cx, cy, qx, qy,
            )
        return self._incircle_far(i, j, k, q)

    def _incircle_far(self, i, j, k, q):
        t = (i, j, k)
        nfar = (i < 0) + (j < 0) + (k < 0)
        if nfar == 1:
            while t[0] >= 0:
                t = (t[1], t[2], t[0])
            _f, a, b = t
            # Leading term r^2*|u|^2 * det3(a, b, q): the limit circle is the
            # halfplane beyond line ab.
            return self._orient_fin(a, b, q)
        if nfar == 3:
            # Front frame triangle conflicts with everything, the reversed
            # back triangle with nothing.
            return 1 if _perm3_parity(-i, -j, -k) else -1
        # two far rows: rotate the finite point to the back
        while t[2] < 0:
            t = (t[1], t[2], t[0])
        f1, f2, p = t
        if -f1 < -f2:
            # f1 dominates; cofactor keeps row order (f2, p, q)
            return self._orient_one_far(f2, p, q)
        return -self._orient_one_far(f1, p, q)

    # -- convenience -------------------------------------------------------

    def incircle(self, i, j, k, q):
        """Orientation-normalized in-circle: +1 iff q strictly inside the
        circle through i, j, k (regardless of their orientation)."""
        return self.incircle_raw(i, j, k, q) * self.orient(i, j, k)

    def segments_cross(self, p, q, r, s):
        """True iff open segments pq and rs properly cross."""
        if p == r or p == s or q == r or q == s:
            return False
        if self.orient(p, q, r) == self.orient(p, q, s):
            return False
        return self.orient(r, s, p) != self.orient(r, s, q)

    def compare_linear(self, a, b, i, j):
        """Perturbed comparison of the linear form a*x + b*y at points i, j.

        Returns -1/+1 as the value at i is smaller/larger (never 0).
        """
        vi = _scaled_ints((self.xs[i], self.ys[i], self.xs[j], self.ys[j]))
        d = a * vi[0] + b * vi[1] - a * vi[2] - b * vi[3]
        if d:
            return 1 if d > 0 else -1
        sm = 1 if self._id(i) < self._id(j) else -1
        if b:
            return sm if b > 0 else -sm
        return sm if a > 0 else -sm


def _perm3_parity(a, b, c):
    """True iff (a, b, c) is an even permutation of (1, 2, 3)."""
    return (a, b, c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2))


# ---------------------------------------------------------------------------
# Point-based public API.


def _check_points(pts):
    seen = set()
    for p in pts:
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise ValueError(f"non-finite coordinate in {p}")
        if p.id < 0:
            raise ValueError("point ids must be non-negative")
        if p.id in seen:
            raise DuplicatePoint(f"duplicate point id {p.id}")
        seen.add(p.id)


def _kernel_for(pts):
    return Kernel([p.x for p in pts], [p.y for p in pts], ids=[p.id for p in pts])


def orient2d(a: Point, b: Point, c: Point) -> int:
    """CCW or CW: the sign of the signed area of abc, exactly, with symbolic
    perturbation by point id resolving collinear inputs."""
    _check_points((a, b, c))
    return _kernel_for((a, b, c)).orient(0, 1, 2)


def incircle(a: Point, b: Point, c: Point, d: Point) -> int:
    """INSIDE iff d lies strictly inside the circle through a, b, c in the
    perturbed world; independent of the orientation of (a, b, c)."""
    _check_points((a, b, c, d))
    k = _kernel_for((a, b, c, d))
    return k.incircle_raw(0, 1, 2, 3) * k.orient(0, 1, 2)


def segments_properly_cross(p: Point, q: Point, r: Point, s: Point) -> bool:
    """True iff the open segments pq and rs cross in a single interior
    point.  Segments sharing an endpoint (by id) never properly cross."""
    if p.id == q.id or r.id == s.id:
        raise DuplicatePoint("degenerate segment")
    if p.id in (r.id, s.id) or q.id in (r.id, s.id):
        return False
    k = _kernel_for((p, q, r, s))
    return k.segments_cross(0, 1, 2, 3)
