from collections import Counter

import pytest

from ncpoly.corpus import canonical_code, exhaustive, insert_at_vertex, insert_on_line, random_corpus
from ncpoly.parametric import check_factorization, check_inverse_block
from ncpoly.ribbon import RibbonGraph, subgraph, topology, validate


def test_exhaustive_two_lines_contents(bubble):
    graphs = exhaustive(2)
    codes = {canonical_code(g) for g in graphs}
    assert len(codes) == len(graphs)
    assert canonical_code(bubble) in codes
    # the crossed one-vertex pairing joins equal signs, so both double
    # tadpoles that exist are planar
    double_tadpoles = [g for g in graphs if g.n == 1 and g.L == 2]
    assert len(double_tadpoles) == 2 and all(topology(g).g == 0 for g in double_tadpoles)
    # the bridge and the tadpoles on corners (1,2) and (1,4)
    assert Counter(g.L for g in graphs)[1] == 3


def test_exhaustive_counts_are_stable(corpus):
    assert len(corpus) == 361
    assert Counter(g.L for g in corpus) == Counter({1: 3, 2: 14, 3: 51, 4: 293})


def test_every_generated_graph_is_valid(corpus):
    for g in corpus + random_corpus(30, 6, seed=5):
        assert validate(g).ok
        assert RibbonGraph.loads(g.dumps()) == g


def test_random_corpus_is_deterministic():
    a = random_corpus(20, 6, seed=42)
    b = random_corpus(20, 6, seed=42)
    c = random_corpus(20, 6, seed=43)
    assert a == b and a != c
    assert all(1 <= g.L <= 6 for g in a)


def test_canonical_code_ignores_labels(hyper):
    relabelled = RibbonGraph(
        tuple(tuple(a._replace(line=7 - a.line) if hasattr(a, "line") else a for a in v) for v in hyper.vertices),
        hyper.root,
    )
    assert canonical_code(relabelled) == canonical_code(hyper)


def test_insertions(bubble, sunshine):
    host = exhaustive(1)[0]
    g, lines = insert_at_vertex(host, 0, bubble)
    assert validate(g).ok and g.L == host.L + 2 and subgraph(g, lines).topology().N == 4
    assert check_factorization(g, lines).holds
    line = host.line_ids[0]
    g, lines = insert_on_line(host, line, sunshine)
    assert validate(g).ok and g.L == host.L + 4
    assert check_factorization(g, lines).holds and check_inverse_block(g, lines).holds
    with pytest.raises(ValueError):
        insert_on_line(host, line, bubble)
    with pytest.raises(ValueError):
        insert_at_vertex(host, 0, sunshine)
