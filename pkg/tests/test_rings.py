import pytest
from hypothesis import given, settings

from gkdeform.errors import MixedRing
from gkdeform.rings import AffinePoly, I, Q, TrigPoly, eval_at_zero, ring_ops
from strategies import affine_polys, scalars, trig_polys


def test_gaussian_norm():
    assert Q(1, 1) * Q(1, -1) == Q(2)


def test_inverse_modes_cancel():
    assert TrigPoly.exp_i(2, 0) * TrigPoly.exp_i(2, 0, -1) == TrigPoly.const(2, 1)


def test_conj_negates_mode():
    assert TrigPoly.exp_i(2, 0).conj() == TrigPoly.exp_i(2, 0, -1)


def test_eval_at_zero_examples():
    assert eval_at_zero(TrigPoly.exp_i(2, 0) + TrigPoly.exp_i(2, 0, -1)) == Q(2)
    assert eval_at_zero(TrigPoly.const(2, 3)) == Q(3)
    x1 = AffinePoly.var(2, 0)
    assert eval_at_zero(x1 * x1 * x1) == Q(0)


def test_mixed_ring_rejected():
    with pytest.raises(MixedRing):
        ring_ops(TrigPoly.const(2, 1), AffinePoly.const(2, 1), "add")
    with pytest.raises(MixedRing):
        ring_ops(TrigPoly.const(2, 1), TrigPoly.const(3, 1), "mul")


def test_canonical_form_drops_zeros():
    p = TrigPoly.exp_i(2, 1) - TrigPoly.exp_i(2, 1)
    assert p.terms == {} and not p


def test_json_round_trip():
    p = TrigPoly.mode(3, (1, -2, 0), Q("1/3", "-2/5")) + TrigPoly.const(3, I)
    assert TrigPoly.from_json(3, p.to_json()) == p
    a = AffinePoly.monomial(2, (2, 1), Q("7/2"))
    assert AffinePoly.from_json(2, a.to_json()) == a


@given(scalars, scalars)
def test_scalar_exactness(x, y):
    assert (x + y) - y == x
    assert x.conj().conj() == x
    assert (x * y).conj() == x.conj() * y.conj()
    if y:
        assert (x / y) * y == x


@settings(max_examples=60)
@given(trig_polys(2), trig_polys(2), trig_polys(2))
def test_trig_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b).conj() == a.conj() * b.conj()


@settings(max_examples=60)
@given(affine_polys(2), affine_polys(2), affine_polys(2))
def test_affine_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60)
@given(trig_polys(2), trig_polys(2))
def test_product_support_in_minkowski_sum(a, b):
    sums = {tuple(x + y for x, y in zip(k, l)) for k in a.terms for l in b.terms}
    assert set((a * b).terms) <= sums


@settings(max_examples=60)
@given(trig_polys(2), trig_polys(2))
def test_real_valued_closed_under_product(a, b):
    ra, rb = a + a.conj(), b + b.conj()
    assert ra.is_real_valued() and rb.is_real_valued()
    assert (ra * rb).is_real_valued()
