import pytest

from ncpoly.leading import admissible_terms, pseudo_admissible_terms
from ncpoly.parametric import hu_det, tvar
from ncpoly.ribbon import graph

L, E = "L", "E"


def test_bubble_admissible_terms(bubble):
    terms = admissible_terms(bubble)
    assert {frozenset(t.J) for t in terms} == {frozenset({1}), frozenset({2})}
    for t in terms:
        assert t.n2 == 1 and t.s_power == 0 and t.degree(bubble.line_ids) == 1


def test_admissible_terms_appear_in_hu(corpus):
    # each admissible term is a monomial of HU with at least its coefficient
    for g in corpus[:80]:
        h = hu_det(g)
        for t in admissible_terms(g):
            powers = {tvar(l): 0 for l in g.line_ids}
            for l in t.J:
                powers[tvar(l)] += 1
            assert h.coeff_of(**{k: v for k, v in powers.items() if v}, s=t.s_power) >= t.n2


def test_sunshine_pseudo_terms(sunshine):
    terms = pseudo_admissible_terms(sunshine, [1, 3], 2)
    assert terms
    for t in terms:
        assert not t.genus_line and t.expected == 16 and t.holds
        assert t.term.I == frozenset({1, 3}) and t.term.J == frozenset({2})
        assert t.term.s_power == 2


def test_pseudo_terms_require_two_broken_faces(sunshine):
    with pytest.raises(ValueError):
        pseudo_admissible_terms(sunshine, [1, 2, 3], 2)


def test_genus_one_host():
    g = graph([[(L, 1), (L, 2), (L, 3), (E, 1)], [(E, 2), (L, 1), (L, 2), (L, 3)]])
    terms = pseudo_admissible_terms(g, [1, 2], 3)
    assert terms and all(t.genus_line and t.term.n2 == 4 for t in terms)
