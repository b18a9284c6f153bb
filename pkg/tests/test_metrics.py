import random

import pytest

from dtrepair.delaunay import delaunay, delaunay_with_locator
from dtrepair.errors import VertexMismatch
from dtrepair.metrics import (
    crossings_naive,
    full_report,
    metric_crossings,
    metric_D,
    metric_D_local,
    metric_violations,
    violations_naive,
    _crossings_bucketed,
    _violations_bucketed,
)
from dtrepair.models import flip_model, gen_points
from dtrepair.mesh import PointSet

from oracles import random_pointset


def _instance(rng, n, k):
    ps = random_pointset(rng, n)
    dt, mesh = delaunay_with_locator(ps, seed=rng.randrange(1 << 30))
    g = flip_model(dt, k, seed=rng.randrange(1 << 30))
    return ps, dt, mesh, g


def test_metrics_zero_on_identity():
    rng = random.Random(2)
    ps, dt, mesh, _ = _instance(rng, 60, 0)
    assert metric_D(dt, dt) == 0
    assert metric_D_local(dt) == 0
    assert metric_crossings(dt, dt, dt_mesh=mesh) == (0, 0)
    assert metric_violations(dt, ps) == (0, 0)
    rep = full_report(dt, ps, seed=1)
    assert (rep.D, rep.D_local, rep.D_cross, rep.d_cross) == (0, 0, 0, 0)
    assert (rep.D_vio, rep.d_vio, rep.flip_upper) == (0, 0, 0)


def test_single_flip_metrics():
    ps = PointSet([(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (0.0, 2.0)])
    dt, mesh = delaunay_with_locator(ps)
    g = dt.copy()
    g.flip((0, 2))
    assert metric_D(g, dt) == 1
    assert metric_crossings(g, dt, dt_mesh=mesh) == (1, 1)
    assert 1 <= metric_D_local(g)
    _tot, worst = metric_violations(g, ps)
    assert worst >= 1


def test_vertex_mismatch():
    rng = random.Random(3)
    ps = random_pointset(rng, 20)
    dt = delaunay(ps)
    sub = delaunay(ps, ids=range(10))
    with pytest.raises(VertexMismatch):
        metric_D(sub, dt)


def test_crossing_paths_agree():
    rng = random.Random(5)
    for trial in range(12):
        n = rng.randint(10, 120)
        ps, dt, mesh, g = _instance(rng, n, rng.randint(1, 30))
        shared = g.edge_set & dt.edge_set
        want = crossings_naive(g.edge_set - shared, dt.edge_set - shared, ps.kernel)
        assert metric_crossings(g, dt, dt_mesh=mesh) == want
        assert metric_crossings(g, dt) == want
        assert _crossings_bucketed(
            sorted(g.edge_set - shared), sorted(dt.edge_set - shared), ps
        ) == want


def test_violation_paths_agree():
    rng = random.Random(7)
    for trial in range(10):
        n = rng.randint(10, 100)
        ps, dt, mesh, g = _instance(rng, n, rng.randint(1, 25))
        ids = sorted(g.vertex_ids)
        want = violations_naive(g.triangles(), ids, ps.kernel)
        assert metric_violations(g, ps) == want
        assert _violations_bucketed(g.triangles(), ids, ps) == want
        # the DT tally option is exposed and zero for g = DT
        assert metric_violations(dt, ps, over="DT", dt=dt) == (0, 0)


def test_violations_on_degenerate_grid():
    ps = gen_points(25, "grid-jitter", seed=1, jitter=0.0)
    dt = delaunay(ps)
    g = flip_model(dt, 10, seed=3)
    ids = sorted(g.vertex_ids)
    assert _violations_bucketed(g.triangles(), ids, ps) == violations_naive(
        g.triangles(), ids, ps.kernel
    )


def test_metric_chain_on_fuzz():
    rng = random.Random(11)
    for trial in range(25):
        n = rng.randint(8, 80)
        ps, dt, mesh, g = _instance(rng, n, rng.randint(0, 40))
        rep = full_report(g, ps, seed=trial, dt=dt, dt_mesh=mesh)
        assert rep.D_local <= rep.D <= rep.flip_upper
        assert rep.D <= rep.D_cross
        # two-path equality for D: forward and backward set differences
        assert rep.D == len(set(dt.canonical_edge_set()) - set(g.canonical_edge_set()))


def test_flip_model_D_bounded_by_steps():
    rng = random.Random(13)
    ps, dt, mesh, _ = _instance(rng, 200, 0)
    for k in (0, 5, 20):
        g = flip_model(dt, k, seed=9)
        assert metric_D(g, dt) <= k


def test_csv_row_shape():
    rng = random.Random(17)
    ps, dt, mesh, g = _instance(rng, 30, 5)
    rep = full_report(g, ps, seed=4, dt=dt, dt_mesh=mesh)
    row = rep.csv_row()
    assert len(row.split(",")) == 9
    assert row.endswith(",4")
