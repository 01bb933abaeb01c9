import math
from fractions import Fraction

import pytest

from ncpoly.corpus import exhaustive
from ncpoly.numeric import (
    ConvergenceError,
    QuadratureSettings,
    ToleranceError,
    convergence_bound,
    fit_residue,
    integrate_graph,
    integrate_renormalized,
)
from ncpoly.parametric import hu_det
from ncpoly.power_counting import analyticity_strip, classify

# frozen from scipy dblquad on 5 (t1 + t2)(1 + t1 t2), the bubble HU at s = 1
BUBBLE_DBLQUAD = {"3": 0.1683342634164603, "3.5": 0.22428414706017172, "1.5": 0.4121684823773484}
# -(2/25)(ln 2 - 5/8): the subtracted bubble integrand at D = 4 in closed form
BUBBLE_RENORMALIZED_D4 = -(2 / 25) * (math.log(2) - 5 / 8)


def two_line_nonprimitive():
    return next(g for g in exhaustive(2) if g.L == 2 and g.n == 2 and not classify(g).primitive)


@pytest.mark.parametrize("D", sorted(BUBBLE_DBLQUAD))
def test_bubble_matches_dblquad(bubble, D):
    res = integrate_graph(bubble, D)
    assert res.value == pytest.approx(BUBBLE_DBLQUAD[D], rel=1e-6)
    assert res.abs_err < 1e-6 * res.value


def test_tighter_tolerance_at_half_integer_dimension(bubble):
    res = integrate_graph(bubble, 3, rel_tol=1e-11)
    assert res.value == pytest.approx(BUBBLE_DBLQUAD["3"], rel=1e-11)


def test_divergent_dimensions_are_rejected(bubble, sunshine):
    with pytest.raises(ConvergenceError):
        integrate_graph(bubble, "4.2")
    with pytest.raises(ConvergenceError):
        integrate_graph(bubble, 4)
    with pytest.raises(ConvergenceError):
        integrate_graph(sunshine, "3.1")
    with pytest.raises(ConvergenceError):
        integrate_graph(bubble, 0)


def test_sunshine_below_its_mass_pole(sunshine):
    res = integrate_graph(sunshine, "2.9")
    assert res.value > 0 and res.abs_err < 1e-6 * res.value
    assert res.settings["sectors"] == 6


def test_unreachable_tolerance_raises(bubble):
    with pytest.raises(ToleranceError):
        integrate_graph(bubble, "3.5", rel_tol=1e-14, settings=QuadratureSettings(order=4, max_order=6))


def test_repeat_runs_are_bit_identical(bubble):
    a = integrate_graph(bubble, "3.7")
    b = integrate_graph(bubble, "3.7")
    assert a.value == b.value and a.abs_err == b.abs_err and a.cells == b.cells


def test_values_grow_toward_the_pole(bubble):
    vals = [integrate_graph(bubble, D).value for D in ("3.5", "3.8", "3.9", "3.95")]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # near t = 0, HU ~ 5 (t1 + t2), so the residue at D = 4 is 2/25
    assert vals[-1] * 0.05 == pytest.approx(2 / 25, rel=0.05)


def test_renormalized_bubble_closed_form(bubble):
    res = integrate_renormalized(bubble, 4)
    assert res.value == pytest.approx(BUBBLE_RENORMALIZED_D4, rel=1e-9)
    assert res.settings["active_counterterms"] == [[1, 2]]


def test_renormalized_equals_plain_without_active_counterterms(bubble):
    g = two_line_nonprimitive()
    assert integrate_renormalized(g, 3).value == integrate_graph(g, 3).value
    res = integrate_renormalized(bubble, 3)
    assert res.settings["active_counterterms"] == []
    assert res.value == integrate_graph(bubble, 3).value


def test_renormalized_nested_case_is_not_supported(bubble):
    from ncpoly.corpus import insert_at_vertex

    g, _ = insert_at_vertex(bubble, 1, bubble)
    with pytest.raises(NotImplementedError):
        integrate_renormalized(g, 4)


def test_fit_residue_guards(bubble):
    with pytest.raises(ValueError, match="no pole"):
        fit_residue(bubble, 3, ["2.9", "2.95"])
    with pytest.raises(ValueError, match="below the pole"):
        fit_residue(bubble, 4, ["3.9", "4.1"])


def test_fit_residue_bubble(bubble):
    fit = fit_residue(bubble, 4, ["3.9", "3.95", "3.98"])
    assert fit.pole == Fraction(4) and len(fit.values) == 3
    assert fit.drift < 0.05


def test_convergence_bound_matches_strip(corpus):
    for g in corpus:
        h = hu_det(g)
        assert convergence_bound(h, g.line_ids) == analyticity_strip(classify(g, h)).extended


def test_residue_drift_shrinks_toward_the_pole(bubble):
    ladder = ["3.5", "3.8", "3.9", "3.95"]
    drifts = [fit_residue(bubble, 4, ladder[k : k + 2]).drift for k in range(len(ladder) - 1)]
    assert all(b < a for a, b in zip(drifts, drifts[1:]))


def test_gate_on_small_graphs():
    # the full gate over every corpus graph is covered by the bound/strip test;
    # actually integrating each L <= 2 graph on both sides keeps this cheap
    for g in exhaustive(2):
        bound = convergence_bound(hu_det(g), g.line_ids)
        if bound is None:
            assert integrate_graph(g, "3.9").value > 0
            continue
        assert integrate_graph(g, bound - Fraction(1, 10)).value > 0
        with pytest.raises(ConvergenceError):
            integrate_graph(g, bound + Fraction(1, 10))
