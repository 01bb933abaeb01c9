import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncpoly.corpus import exhaustive
from ncpoly.ribbon import (
    Ext,
    GraphFormatError,
    GraphValidationError,
    LineEnd,
    RibbonGraph,
    difference,
    dual,
    graph,
    quotient,
    subgraph,
    topology,
    validate,
)

L, E = "L", "E"
SMALL = exhaustive(3)


def test_bubble_valid_and_topology(bubble):
    assert validate(bubble).ok
    assert topology(bubble).as_dict() == {"n": 2, "L": 2, "F": 2, "g": 0, "B": 1, "N": 4}


def test_sunshine_topology(sunshine):
    t = topology(sunshine)
    assert (t.n, t.L, t.F, t.g, t.B, t.N) == (2, 3, 3, 0, 1, 2)


def test_same_sign_line_is_non_orientable():
    g = graph([[(L, 1), (L, 2), (E, 1), (E, 2)], [(L, 1), (L, 2), (E, 3), (E, 4)]])
    rep = validate(g)
    assert not rep.ok and any("non-orientable" in e for e in rep.errors)
    with pytest.raises(GraphValidationError):
        rep.raise_if_invalid()


def test_double_tadpoles():
    # corners (1,2),(3,4): planar vacuum graph
    planar = graph([[(L, 1), (L, 1), (L, 2), (L, 2)]])
    assert validate(planar).ok
    t = topology(planar)
    assert (t.n, t.L, t.N, t.g, t.F) == (1, 2, 0, 0, 3)
    # pairing corners (1,3) and (2,4) joins equal signs: not orientable
    rep = validate(graph([[(L, 1), (L, 2), (L, 1), (L, 2)]]))
    assert not rep.ok and any("non-orientable" in e for e in rep.errors)


def test_genus_one_graph():
    g = graph([[(L, 1), (L, 2), (L, 3), (E, 1)], [(E, 2), (L, 1), (L, 2), (L, 3)]])
    assert validate(g).ok
    t = topology(g)
    assert (t.g, t.F, t.B) == (1, 1, 1)


def test_disconnected_and_reused_corner():
    g = graph([[(L, 1), (L, 1), (E, 1), (E, 2)], [(L, 2), (L, 2), (E, 3), (E, 4)]])
    assert "graph is disconnected" in validate(g).errors
    with pytest.raises(GraphFormatError, match="already referenced"):
        RibbonGraph.loads(
            json.dumps({"vertices": [[{"ext": 1}, {"ext": 1}, {"ext": 2}, {"ext": 3}]], "root": 0})
        )


@pytest.mark.parametrize(
    "text,match",
    [
        ("not json", "invalid JSON"),
        ("[]", "top level"),
        ('{"vertices": []}', "non-empty"),
        ('{"vertices": [[{"line": 1}]]}', "expected"),
        ('{"vertices": [[{"foo": 1}]]}', "needs 'line' or 'ext'"),
        ('{"vertices": [[{"ext": 1}]], "root": 3}', "root"),
    ],
)
def test_schema_errors(text, match):
    with pytest.raises(GraphFormatError, match=match):
        RibbonGraph.loads(text)


@pytest.mark.parametrize("g", SMALL, ids=range(len(SMALL)))
def test_round_trip_and_euler(g):
    assert RibbonGraph.loads(g.dumps()) == g
    t = topology(g)
    assert 4 * t.n == 2 * t.L + t.N
    assert 2 - 2 * t.g == t.n - t.L + t.F
    if t.N:
        assert 1 <= t.B <= t.F


def test_faces_partition_darts():
    for g in SMALL:
        darts = [d for f in g.faces() for d in f]
        assert len(darts) == len(set(darts)) == sum(len(v) for v in g.vertices)


def test_subgraph_examples(hyper):
    s = subgraph(hyper, [4, 5, 6])
    assert s.N == 2 and s.connected
    full = subgraph(hyper, hyper.line_ids)
    assert topology(full.graph).as_dict() == topology(hyper).as_dict()
    one = subgraph(hyper, [1])
    assert one.N == 6
    with pytest.raises(ValueError):
        subgraph(hyper, [])
    with pytest.raises(ValueError):
        subgraph(hyper, [9])


def test_quotient_examples(hyper, three_line, bubble):
    q = quotient(hyper, subgraph(hyper, [4, 5, 6]))
    assert q == three_line
    assert topology(q).g == topology(hyper).g and topology(q).B == topology(hyper).B
    assert q.L == hyper.L - 3
    whole = quotient(bubble, subgraph(bubble, bubble.line_ids))
    assert whole.n == 1 and whole.L == 0 and whole.N == 4
    with pytest.raises(GraphValidationError):
        quotient(hyper, subgraph(hyper, [1]))


def test_quotient_bubble_in_tadpole():
    from ncpoly.corpus import insert_at_vertex

    tadpole = graph([[(L, 1), (L, 1), (E, 1), (E, 2)]])
    g, lines = insert_at_vertex(tadpole, 0, graph([[(L, 1), (L, 2), (E, 1), (E, 2)], [(L, 2), (L, 1), (E, 3), (E, 4)]]))
    q = quotient(g, subgraph(g, lines))
    assert (q.n, q.L, q.N) == (1, 1, 2)
    assert 4 * q.n == 2 * q.L + q.N
    assert topology(q) == topology(tadpole)


def test_difference_examples(hyper):
    rest, connected = difference(hyper, subgraph(hyper, [4, 5, 6]))
    assert connected and rest.n == 2 and rest.line_ids == (1,)
    assert rest.N == 4 + 2
    empty, _ = difference(hyper, subgraph(hyper, hyper.line_ids))
    assert empty.n == 0
    one, _ = difference(hyper, subgraph(hyper, [1]))
    assert one.n == 2 and 1 not in one.line_ids


def test_dual_examples(bubble):
    d = dual(bubble)
    assert (d.n, d.L) == (2, 2)
    tad = graph([[(L, 1), (L, 1), (E, 1), (E, 2)]])
    dt = dual(tad)
    assert (dt.n, dt.L) == (2, 1)
    for g in SMALL:
        d = dual(g)
        assert (d.n, d.L) == (topology(g).F, g.L)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 3))
def test_root_choice_does_not_change_topology(g, r):
    assert topology(g.with_root(r % g.n)) == topology(g)


def test_ext_and_line_end_types():
    g = graph([[(L, 1), (L, 1), (E, 7), (E, 8)]])
    assert g.vertices[0][0] == LineEnd(1, "tgt") and g.vertices[0][2] == Ext(7)
