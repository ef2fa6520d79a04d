import pytest
from hypothesis import given, settings

from gkdeform.brackets import (courant_bracket, derived_bracket, dorfman, extract, in_lbar_power,
                               integrability_witness, lbar_products, lie_algebroid_d, lie_bracket,
                               maurer_cartan_residual, mc_projection, schouten, schouten_operator,
                               split_vector_form)
from gkdeform.clifford import CliffordElement, FormField
from gkdeform.errors import NotIntegrable
from gkdeform.poisson import PoissonBivector, bivector_to_clifford, chart_structure, z
from gkdeform.rings import AffinePoly, I, Q, TrigPoly
from gkdeform.structures import complex_lift, holomorphic_volume, symplectic_spinor, two_form
from strategies import degree_one

m = 2
g = lambda a, c=1: CliffordElement.gen(m, a, c)  # noqa: E731
e1 = TrigPoly.exp_i(m, 0)


def test_derived_bracket_examples():
    assert not derived_bracket(g(0), g(1))
    # frozen value: [d_1, e^{ix_1} d_2] = i e^{ix_1} d_2
    assert derived_bracket(g(0), g(1).scale(e1)) == g(1).scale(e1.scale(I))
    assert not derived_bracket(g(2), g(3))


def test_courant_bracket_examples():
    E, F = g(0), g(1).scale(e1)
    val = courant_bracket(E, F)
    assert val == g(1).scale(e1.scale(I))
    v, _ = split_vector_form(E)
    w, _ = split_vector_form(F)
    assert val.coords()[:m] == lie_bracket(v, w)
    assert not courant_bracket(g(0) + g(3, Q(2)), g(1) - g(2))
    G = g(0).scale(e1) + g(3).scale(TrigPoly.exp_i(m, 1, -1))
    assert not courant_bracket(G, G)


@settings(max_examples=25, deadline=None)
@given(degree_one(2), degree_one(2))
def test_derived_bracket_matches_closed_form(E, F):
    assert derived_bracket(E, F) == dorfman(E, F)


def test_schouten_examples():
    J = complex_lift(4)
    prods = [p for _, p in lbar_products(J, 2)]
    beta = prods[0] + prods[3].scale(Q(3, 1))
    assert not schouten(beta, beta, J)
    f = z(2, 0) * z(2, 0) * z(2, 1) - z(2, 1)
    eps = bivector_to_clifford(PoissonBivector.single(2, 0, 1, f))
    assert not schouten(eps, eps, chart_structure(2))


def test_schouten_operator_is_tensorial():
    J = complex_lift(4)
    (_, p), (_, q) = lbar_products(J, 2)[:2]
    eps = p.scale(TrigPoly.exp_i(4, 0)) + q.scale(TrigPoly.exp_i(4, 2, -1))
    from gkdeform.brackets import D, Act, comm
    extract(comm(comm(D, Act(eps)), Act(eps)), 4, TrigPoly, check=True)  # NotTensorial otherwise
    assert schouten_operator(eps, eps) == schouten(eps, eps, J)


def test_lie_algebroid_d_examples():
    J = complex_lift(4)
    phi = J.canonical_spinor
    (_, p), = lbar_products(J, 2)[:1]
    assert not lie_algebroid_d(p, phi, J)
    X = J.Lbar_basis()
    eps = X[0].mul(X[1]).scale(TrigPoly.exp_i(4, 0))
    out = lie_algebroid_d(eps, phi, J)
    assert out and in_lbar_power(out, J, 3) and out.max_mode() == 1


def test_mc_residual_examples():
    J = complex_lift(4)
    phi = J.canonical_spinor
    (_, p), = lbar_products(J, 2)[:1]
    assert not maurer_cartan_residual(p, J, phi)
    beta = PoissonBivector.from_commuting(3, [[1, 0, 2], [0, 1, Q(0, 1)]], {(0, 1): Q("1/2")})
    J3 = chart_structure(3)
    assert not maurer_cartan_residual(bivector_to_clifford(beta), J3, holomorphic_volume(6, AffinePoly))


def test_mc_projection_cross_check():
    J = complex_lift(4)
    phi = J.canonical_spinor
    X = J.Lbar_basis()
    eps = X[0].mul(X[2]).scale(TrigPoly.exp_i(4, 3)) + X[1].mul(X[3]).scale(TrigPoly.exp_i(4, 0, -1, Q(2)))
    res = maurer_cartan_residual(eps, J, phi)
    assert res and mc_projection(eps, phi, J) == res.act(phi)


def test_integrability_examples():
    phi = symplectic_spinor(two_form(2, [[0, 1], [-1, 0]]))
    assert not integrability_witness(phi)
    f = z(2, 0) * z(2, 1) + AffinePoly.const(4, 1)
    chart = holomorphic_volume(4, AffinePoly) + FormField.const(4, 1, AffinePoly).scale(f)
    E = integrability_witness(chart, points=[(Q(1), Q(0), Q(2), Q(0))])
    assert not (E.act(chart) + chart.d())
    sin3 = TrigPoly.exp_i(4, 2, 1, Q(0, "-1/4")) + TrigPoly.exp_i(4, 2, -1, Q(0, "1/4"))
    om = FormField.basis_form(4, (0, 1)).scale(TrigPoly.const(4, 1) + sin3) + FormField.basis_form(4, (2, 3))
    with pytest.raises(NotIntegrable):
        integrability_witness(symplectic_spinor(om))
