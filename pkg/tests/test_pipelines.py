import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dagph.dagmodel import FiltrationError, ParseError, validate
from dagph.gmodule import homology_module
from dagph.linalg import PrimeField, QQ, Subspace
from dagph.pipelines import (PointCloud, RadiusSchedule, RipsComplex, build_comparison_graph,
                             build_parallel_graph, compare_shapes, comparison_window_ranks,
                             rips_complex, rips_filtrations, sample_circle, sample_split,
                             subsample_persistence, window_selector)
from dagph.simplicial import betti, close_under_faces
from dagph.ssss import all_pairs_rank

F = PrimeField(46337)


def regular_polygon(n, radius=1.0):
    return PointCloud(tuple((round(radius * math.cos(2 * math.pi * i / n), 9),
                             round(radius * math.sin(2 * math.pi * i / n), 9)) for i in range(n)))


def test_point_cloud_csv():
    pc = PointCloud.from_csv("x,y\n0.5,1\n# comment\n\n-2,3.25\n")
    assert pc.points == ((Fraction(1, 2), 1), (-2, Fraction(13, 4)))
    assert PointCloud.from_csv(pc.to_csv()) == pc


@pytest.mark.parametrize("text, row", [("0,1\n1,x\n", "row 2"), ("0,1\n1,2,3\n", "row 2")])
def test_point_cloud_csv_errors(text, row):
    with pytest.raises(ParseError) as exc:
        PointCloud.from_csv(text)
    assert row in str(exc.value)


def test_radius_schedule():
    assert RadiusSchedule.parse("0.1, 0.2,0.5").radii == (Fraction(1, 10), Fraction(1, 5), Fraction(1, 2))
    with pytest.raises(ValueError):
        RadiusSchedule((0.2, 0.2))
    with pytest.raises(ValueError):
        RadiusSchedule((-1, 0))
    assert len(RadiusSchedule.linear("0", "1", 5)) == 5


def test_rips_radius_zero_is_vertices_only():
    m = rips_complex(regular_polygon(5), 0)
    assert len(m.members) == 5


def test_rips_triangle():
    pc = PointCloud(((0, 0), (1, 0), (0, 1)))
    m = rips_complex(pc, Fraction(3, 4))  # diameter sqrt(2) <= 1.5
    assert len(m.members) == 7


def test_rips_circle_has_one_loop():
    pc = regular_polygon(20)
    # adjacent chord 0.313 <= 2r < next chord 0.618
    m = rips_complex(pc, 0.2)
    assert betti(m, 1, F) == 1 and betti(m, 0, F) == 1


@given(st.integers(0, 1000), st.integers(1, 8), st.integers(1, 8))
@settings(max_examples=30, deadline=None)
def test_rips_monotone(seed, a, b):
    pc = sample_circle(12, seed, noise=0.1)
    rc = RipsComplex(pc, 1, 2)
    r1, r2 = sorted((Fraction(a, 8), Fraction(b, 8)))
    sub = list(range(0, 12, 2))
    assert rc.members(range(12), r1) <= rc.members(range(12), r2)
    assert rc.members(sub, r1) <= rc.members(range(12), r1)


def test_parallel_graph_shape():
    base = sample_circle(20, 1)
    xi, yi = sample_split(20, 8, 0)
    sched = RadiusSchedule((0.1, 0.3, 0.5))
    g = build_parallel_graph(base.subset(xi), base.subset(yi), sched)
    validate(g)
    assert len(g.vertices) == 9
    assert ("X1", "U1") in g.edges and ("Y2", "U2") in g.edges and ("U0", "U1") in g.edges
    single = build_parallel_graph(base.subset(xi), base.subset(yi), RadiusSchedule((0.3,)))
    assert sorted(single.edges) == [("X0", "U0"), ("Y0", "U0")]
    empty_y = build_parallel_graph(base.subset(xi), PointCloud(()), sched)
    assert {v[0] for v in empty_y.vertices} == {"X", "U"}
    assert all(empty_y.members(f"X{i}") == empty_y.members(f"U{i}") for i in range(3))


def test_schedule_must_increase():
    base = sample_circle(6, 0)
    with pytest.raises(ValueError):
        build_parallel_graph(base, base, (0.3, 0.1))


def window_oracle(g, i, j, k, field):
    """Image in H(U_j) of im H(X_i) & im H(Y_i) inside H(U_i)."""
    m = homology_module(g, None, k, field)
    d = m.dims[f"U{i}"]
    ix = Subspace.span(field, m.maps[(f"X{i}", f"U{i}")].columns(), d)
    iy = Subspace.span(field, m.maps[(f"Y{i}", f"U{i}")].columns(), d)
    both = ix & iy
    to_j = m.composites(f"U{i}")[f"U{j}"]
    return Subspace.span(field, [to_j.apply(v) for v in both.basis], m.dims[f"U{j}"]).dim


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_window_ranks_match_closed_form(seed):
    base = sample_circle(24, seed, noise=0.05)
    xi, yi = sample_split(24, 10, seed)
    sched = RadiusSchedule.linear("0.15", "0.6", 5)
    g = build_parallel_graph(base.subset(xi), base.subset(yi), sched)
    res = subsample_persistence(g, 1, F, sched)
    for (i, j), r in res.ranks.items():
        assert r == window_oracle(g, i, j, 1, F)
    # larger windows never have larger rank
    for (i, j), r in res.ranks.items():
        if j + 1 < len(sched):
            assert res.ranks[(i, j + 1)] <= r
        if i > 0:
            assert res.ranks[(i - 1, j)] <= r


def test_identical_subsamples_give_standard_rank_invariant():
    base = sample_circle(16, 3, noise=0.05)
    sched = RadiusSchedule.linear("0.1", "0.5", 4)
    g = build_parallel_graph(base, base, sched)
    res = subsample_persistence(g, 1, F, sched)
    t = all_pairs_rank(g, 1, F)
    for (i, j), r in res.ranks.items():
        assert r == t.get(f"U{i}", f"U{j}", 1)


def test_window_selector_covers_all_chains():
    base = sample_circle(10, 0)
    g = build_parallel_graph(base.subset(range(5)), base.subset(range(5, 10)),
                             RadiusSchedule((0.1, 0.2, 0.3)))
    sel = window_selector(g, 1, 2)
    assert sel.vertices == {"X1", "X2", "Y1", "Y2", "U1", "U2"}


def test_comparison_graph_identical_inputs():
    base = sample_circle(12, 0, noise=0.05)
    sched = RadiusSchedule.linear("0.1", "0.6", 4)
    xf, yf = rips_filtrations(base, base, sched)
    g = build_comparison_graph(xf, yf)
    validate(g)
    assert all(g.members(f"I{i}") == g.members(f"U{i}") for i in range(4))
    res = compare_shapes(xf, yf, 1, F)
    assert res.bottleneck_x == 0.0 and res.bottleneck_y == 0.0
    assert res.diagram_x == res.diagram_g


def test_comparison_graph_disjoint_inputs():
    pc = sample_circle(12, 0)
    xf, yf = rips_filtrations(pc.subset(range(6)), pc.subset(range(6, 12)),
                              RadiusSchedule((0.1, 0.2)))
    g = build_comparison_graph(xf, yf)
    assert all(len(g.members(f"I{i}")) == 0 for i in range(2))


def test_comparison_graph_rejects_non_filtration():
    cx = close_under_faces([(0, 1)])
    a, b = cx.full_mask(), cx.mask({0, 1})
    with pytest.raises(FiltrationError):
        build_comparison_graph([a, b], [a, a])


def test_late_simplex_moves_diagram_by_one_level():
    cx = close_under_faces([(0, 1, 2)])
    e = cx.id_of
    hollow = set(range(6))
    levels_x = [hollow, hollow | {e((0, 1, 2))}, set(range(7))]
    levels_y = [hollow, hollow, set(range(7))]
    xf = [cx.mask(m) for m in levels_x]
    yf = [cx.mask(m) for m in levels_y]
    res = compare_shapes(xf, yf, 1, QQ)
    assert res.bottleneck_x <= 1 and res.bottleneck_y <= 1


@pytest.mark.parametrize("seed", [0, 1])
def test_comparison_shortcut_matches_general_engine(seed):
    base = sample_circle(14, seed, noise=0.1)
    idx = list(range(14))
    random.Random(seed).shuffle(idx)
    x, y = base.subset(sorted(idx[:10])), base.subset(sorted(idx[4:]))
    xf, yf = rips_filtrations(x, y, RadiusSchedule.linear("0.1", "0.7", 4))
    g = build_comparison_graph(xf, yf)
    assert comparison_window_ranks(g, 1, F) == comparison_window_ranks(g, 1, F, exact=True)


def test_subsample_metadata():
    base = sample_circle(20, 0)
    sched = RadiusSchedule((0.2, 0.4))
    xi, yi = sample_split(20, 8, 1)
    res = subsample_persistence(build_parallel_graph(base.subset(xi), base.subset(yi), sched),
                                1, F, sched)
    assert res.metadata["field"] == "fp:46337"
    assert res.metadata["schedule"] == ["0.2", "0.4"]
    assert res.rank_table().to_csv().startswith("source,target,k,rank")
