import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from dagph.dagmodel import (CycleFound, DisconnectedSelector, FiltrationError, GraphFiltration,
                            InclusionViolated, ParseError, SubgraphSelector, from_document,
                            is_valid, parse, path_filtration, refine_to_simplexwise, serialize,
                            to_document, validate)
from dagph.fixtures import genus_two, random_simplexwise_dag, triangle_path
from dagph.simplicial import close_under_faces


def _two_vertex(members_a, members_b, edges):
    cx = close_under_faces([(0, 1, 2)])
    return GraphFiltration(cx, {"A": cx.mask(members_a), "B": cx.mask(members_b)}, edges)


def test_triangle_path_shape():
    g = triangle_path()
    assert list(g.vertices) == [f"X{i}" for i in range(7)]
    assert all(len(g.added(e)) == 1 for e in g.edges)
    validate(g)


def test_cycle_detected():
    g = _two_vertex({0}, {0}, [("A", "B"), ("B", "A")])
    with pytest.raises(CycleFound):
        validate(g)
    with pytest.raises(CycleFound):
        validate(_two_vertex({0}, {0}, [("A", "A")]))


def test_inclusion_violation_names_simplex():
    g = _two_vertex({0, 1}, {0}, [("A", "B")])
    with pytest.raises(InclusionViolated) as exc:
        validate(g)
    assert exc.value.simplex == (1,)
    assert not is_valid(g)


def test_refinement_adds_one_simplex_per_edge():
    cx = close_under_faces([(0, 1, 2)])
    g = GraphFiltration(cx, {"A": cx.mask({0}), "B": cx.full_mask()}, [("A", "B")])
    r = refine_to_simplexwise(g)
    validate(r)
    assert len(r.vertices) == 7
    assert all(len(r.added(e)) == 1 for e in r.edges)
    assert r.original_vertices() == ["A", "B"]
    sel = r.expand_selector(["A", "B"])
    assert len(sel.vertices) == 7


def test_selector_connectivity():
    g = triangle_path()
    assert SubgraphSelector.induced(g, ["X1", "X2"]).edges == (("X1", "X2"),)
    with pytest.raises(DisconnectedSelector):
        SubgraphSelector.induced(g, ["X1", "X3"])
    with pytest.raises(FiltrationError):
        SubgraphSelector.induced(g, ["nope"])


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_round_trip(seed):
    g = random_simplexwise_dag(random.Random(seed))
    text = serialize(g)
    assert parse(text) == g
    assert serialize(parse(text)) == text


def test_round_trip_genus_two():
    g = genus_two()
    assert from_document(json.loads(serialize(g))) == g


def test_empty_document():
    g = parse('{"simplices": [], "vertices": [], "edges": []}')
    assert len(g.vertices) == 0
    validate(g)


@pytest.mark.parametrize("text, fragment", [
    ('{"simplices": [[0]], "vertices": []}', "missing field 'edges'"),
    ('{"simplices": [[1, 0]], "vertices": [], "edges": []}', "simplices[0]"),
    ('{"simplices": [[0], [0, 1]], "vertices": [], "edges": []}', "simplices:"),
    ('{"simplices": [[0]], "vertices": [{"id": "A", "members": [3]}], "edges": []}',
     "vertices[0].members[0]"),
    ('{"simplices": [[0]], "vertices": [{"id": "A", "members": [0]}], "edges": [["A", "Q"]]}',
     "edges[0]: unknown vertex id 'Q'"),
    ('{"simplices": [[0]], "vertices": [{"id": "A", "members": [0]}, {"id": "A", "members": []}],'
     ' "edges": []}', "duplicate vertex id"),
    ('{"simplices": [[0]],\n "vertices": [,\n}', "line 2"),
])
def test_parse_diagnostics(text, fragment):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert fragment in str(exc.value)


def test_path_filtration_start_empty():
    cx = close_under_faces([(0, 1)])
    p = path_filtration(cx, start_empty=True)
    assert len(p.vertices) == 4
    assert len(p.members("X0")) == 0
    assert to_document(p)["edges"][0] == ["X0", "X1"]
