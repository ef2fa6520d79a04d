"""Seeded random exact objects for property suites."""
from __future__ import annotations

import random
from fractions import Fraction

from .clifford import CliffordElement, FormField, form_basis
from .rings import AffinePoly, Q, TrigPoly


def rand_q(rng: random.Random, span: int = 3, den: int = 4, complex_: bool = True) -> Q:
    re = Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))
    im = Fraction(rng.randint(-span * den, span * den), rng.randint(1, den)) if complex_ else 0
    return Q(re, im)


def rand_nonzero_q(rng: random.Random, **kw) -> Q:
    while True:
        q = rand_q(rng, **kw)
        if q:
            return q


def rand_trig(rng: random.Random, m: int, max_mode: int = 2, terms: int = 2) -> TrigPoly:
    out = TrigPoly.zero(m)
    for _ in range(terms):
        k = [rng.randint(-max_mode, max_mode) for _ in range(m)]
        out = out + TrigPoly.mode(m, k, rand_q(rng))
    return out


def rand_affine(rng: random.Random, m: int, degree: int = 2, terms: int = 2) -> AffinePoly:
    out = AffinePoly.zero(m)
    for _ in range(terms):
        e = [0] * m
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(m)] += 1
        out = out + AffinePoly.monomial(m, e, rand_q(rng))
    return out


def rand_coeff(rng, m, ring, max_mode=2):
    if ring is TrigPoly:
        return rand_trig(rng, m, max_mode)
    return rand_affine(rng, m)


def rand_form(rng: random.Random, m: int, ring=TrigPoly, terms: int = 3, max_mode: int = 2,
              degree: int | None = None) -> FormField:
    basis = [S for S in form_basis(m) if degree is None or len(S) == degree]
    out = FormField.zero(m, ring)
    for _ in range(terms):
        S = rng.choice(basis)
        out = out + FormField.basis_form(m, S, 1, ring).scale(rand_coeff(rng, m, ring, max_mode))
    return out


def rand_degree_one(rng: random.Random, m: int, ring=TrigPoly, max_mode: int = 2, terms: int = 2) -> CliffordElement:
    out = CliffordElement.zero(m, ring)
    for _ in range(terms):
        a = rng.randrange(2 * m)
        out = out + CliffordElement.gen(m, a, 1, ring).scale(rand_coeff(rng, m, ring, max_mode))
    return out


def rand_clifford(rng: random.Random, m: int, ring=TrigPoly, max_len: int = 3, terms: int = 2,
                  max_mode: int = 2) -> CliffordElement:
    out = CliffordElement.zero(m, ring)
    for _ in range(terms):
        w = CliffordElement.scalar(m, 1, ring)
        for _ in range(rng.randint(0, max_len)):
            w = w.mul(CliffordElement.gen(m, rng.randrange(2 * m), 1, ring))
        out = out + w.scale(rand_coeff(rng, m, ring, max_mode))
    return out


def rand_lbar2(rng: random.Random, J, ring=TrigPoly, max_mode: int = 1, terms: int = 2) -> CliffordElement:
    """Random section of the second wedge of L-bar with trigonometric coefficients."""
    from .brackets import lbar_products
    prods = lbar_products(J, 2, ring)
    m = J.dim
    out = CliffordElement.zero(m, ring)
    for _ in range(terms):
        _, p = rng.choice(prods)
        out = out + p.scale(rand_coeff(rng, m, ring, max_mode))
    return out
