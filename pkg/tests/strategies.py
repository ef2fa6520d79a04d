"""Hypothesis strategies for exact objects."""
from fractions import Fraction

from hypothesis import strategies as st

from gkdeform.clifford import CliffordElement, FormField, form_basis
from gkdeform.rings import AffinePoly, Q, TrigPoly

fractions = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 6))
scalars = st.builds(Q, fractions, fractions)
real_scalars = st.builds(Q, fractions)


def trig_polys(m, max_mode=2, max_terms=3):
    term = st.tuples(st.tuples(*[st.integers(-max_mode, max_mode)] * m), scalars)
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((TrigPoly.mode(m, k, c) for k, c in ts), TrigPoly.zero(m)))


def affine_polys(m, max_exp=2, max_terms=3):
    term = st.tuples(st.tuples(*[st.integers(0, max_exp)] * m), scalars)
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((AffinePoly.monomial(m, k, c) for k, c in ts), AffinePoly.zero(m)))


def forms(m, ring=TrigPoly, max_terms=3):
    coeff = trig_polys(m) if ring is TrigPoly else affine_polys(m)
    basis = form_basis(m)
    term = st.tuples(st.sampled_from(basis), coeff)
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((FormField.basis_form(m, S, 1, ring).scale(c) for S, c in ts), FormField.zero(m, ring)))


def degree_one(m, ring=TrigPoly, max_terms=3):
    coeff = trig_polys(m) if ring is TrigPoly else affine_polys(m)
    term = st.tuples(st.integers(0, 2 * m - 1), coeff)
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum((CliffordElement.gen(m, a, 1, ring).scale(c) for a, c in ts), CliffordElement.zero(m, ring)))


def clifford(m, ring=TrigPoly, max_len=3, max_terms=3):
    coeff = trig_polys(m, max_mode=1) if ring is TrigPoly else affine_polys(m, max_exp=1)
    word = st.lists(st.integers(0, 2 * m - 1), max_size=max_len)

    def build(ts):
        out = CliffordElement.zero(m, ring)
        for w, c in ts:
            e = CliffordElement.scalar(m, 1, ring)
            for a in w:
                e = e.mul(CliffordElement.gen(m, a, 1, ring))
            out = out + e.scale(c)
        return out
    return st.lists(st.tuples(word, coeff), max_size=max_terms).map(build)
