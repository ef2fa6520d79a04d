from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkdeform.poisson import (PoissonBivector, dz_deriv, is_poisson, mc_residual, poisson_check, poisson_spinor,
                              type_stratify, z)
from gkdeform.rings import AffinePoly, Q
from gkdeform.structures import holomorphic_volume


def bracket(beta, f, g):
    """Poisson bracket {f, g} = sum_{j,k} beta^{jk} d_j f d_k g of holomorphic functions."""
    out = AffinePoly.zero(beta.m)
    for j in range(beta.n):
        for k in range(beta.n):
            e = beta.entry(j, k)
            if e:
                out = out + e * dz_deriv(f, j) * dz_deriv(g, k)
    return out


def jacobiator(beta, j, k, l):
    zs = [z(beta.n, i) for i in range(beta.n)]
    return (bracket(beta, zs[j], bracket(beta, zs[k], zs[l])) + bracket(beta, zs[k], bracket(beta, zs[l], zs[j]))
            + bracket(beta, zs[l], bracket(beta, zs[j], zs[k])))


def test_single_component_is_poisson():
    f = z(2, 0) * z(2, 0) * z(2, 1) - z(2, 1)
    assert is_poisson(PoissonBivector.single(2, 0, 1, f))
    assert not mc_residual(PoissonBivector.single(2, 0, 1, f))


def test_commuting_vectors_are_poisson():
    beta = PoissonBivector.from_commuting(3, [[1, 0, 2], [0, 1, "1/3"]], {(0, 1): Q(0, 1)})
    assert is_poisson(beta)


def test_non_poisson_residual():
    beta = PoissonBivector(3, {(0, 1): z(3, 0), (1, 2): z(3, 1)})
    res = poisson_check(beta)  # also cross-checks the operator bracket
    assert res[(0, 1, 2)] == -z(3, 0) == -jacobiator(beta, 0, 1, 2)
    assert not is_poisson(beta)
    assert mc_residual(beta)


monos = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(-3, 3))


@settings(max_examples=8, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([(0, 1), (0, 2), (1, 2)]), monos), min_size=1, max_size=3))
def test_residual_is_minus_jacobiator(parts):
    comps = {}
    for key, (a, b, c, coeff) in parts:
        f = AffinePoly.const(6, coeff)
        for j, e in enumerate((a, b, c)):
            for _ in range(e):
                f = f * z(3, j)
        comps[key] = comps.get(key, AffinePoly.zero(6)) + f
    beta = PoissonBivector(3, comps)
    res = poisson_check(beta)
    assert res[(0, 1, 2)] == -jacobiator(beta, 0, 1, 2)


def test_zero_bivector():
    series = poisson_spinor(PoissonBivector.zero(2))
    omega = holomorphic_volume(4, AffinePoly)
    assert series[0] == omega and all(not c for c in series.coeffs[1:])
    types = type_stratify(PoissonBivector.zero(2), [(0, 0, 0, 0), (1, 2, 0, 1)])
    assert set(types.values()) == {2}


def test_rank_two_in_dimension_three_contracts_once():
    beta = PoissonBivector.from_commuting(3, [[1, 0, 0], [0, 1, 0]], {(0, 1): 1})
    series = poisson_spinor(beta, order=2)
    assert series[1] and not series[2]
    assert {len(S) for S in series[1].terms} == {1}


def test_stratification_of_cubic():
    f = z(2, 0) * z(2, 1)
    beta = PoissonBivector.single(2, 0, 1, f)
    grid = [(0, 0, 0, 0), (1, 0, 1, 0), (0, 0, Fraction(1, 2), 1), (1.5, 0.25, 0.0, 0.0), (0.3, 0.1, 2.0, 1.0)]
    types = type_stratify(beta, grid)
    assert [types[tuple(p)] for p in grid] == [2, 0, 2, 2, 0]


def test_non_holomorphic_rejected():
    with pytest.raises(ValueError):
        PoissonBivector.single(2, 0, 1, AffinePoly.var(4, 1))


def test_grid_length_checked():
    with pytest.raises(ValueError):
        type_stratify(PoissonBivector.zero(2), [(0, 0)])
