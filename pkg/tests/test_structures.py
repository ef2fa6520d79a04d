import pytest
from hypothesis import given, settings

from gkdeform.clifford import CliffordElement, FormField
from gkdeform.errors import NotNondegenerate
from gkdeform.rings import AffinePoly, I, Q, TrigPoly
from gkdeform.stability import flat_gk_torus
from gkdeform.structures import (GCStructure, annihilator, bigrade, complex_lift, d_split, gk_check,
                                 holomorphic_volume, induced_structure, so_to_spin, symplectic_spinor,
                                 symplectic_structure, two_form, type_at, u_decompose, validate)
from strategies import forms


def omega2(sign=1):
    return two_form(2, [[0, sign], [-sign, 0]])


def span_equal(A, B, m):
    from gkdeform import linalg as la
    rows_a = [E.coords() for E in A]
    rows_a = [[c.constant_term() for c in r] for r in rows_a]
    rows_b = [[c.constant_term() for c in E.coords()] for E in B]
    return la.rank(rows_a, 2 * m) == la.rank(rows_b, 2 * m) == la.rank(rows_a + rows_b, 2 * m)


def test_validate_examples():
    assert validate(complex_lift(4))["ok"]
    assert validate(symplectic_structure(omega2()))["ok"]
    ident = [[Q(int(i == j)) for j in range(4)] for i in range(4)]
    rep = validate(GCStructure(2, ident))
    assert not rep["ok"] and not rep["checks"]["square_is_minus_identity"]


def test_annihilator_of_holomorphic_volume():
    m = 4
    data = annihilator(holomorphic_volume(m))
    g = lambda a: CliffordElement.gen(m, a)  # noqa: E731
    expected = [g(0) + g(1).scale(I), g(2) + g(3).scale(I),  # d/dzbar up to a factor 2
                g(4) + g(5).scale(I), g(6) + g(7).scale(I)]  # dz_1, dz_2
    assert span_equal(data.annihilator_basis, expected, m)


def test_annihilator_of_symplectic_spinor():
    # L spanned by d_x - i dy and d_y + i dx (brute-force 4-unknown solve)
    data = annihilator(symplectic_spinor(omega2()))
    g = lambda a: CliffordElement.gen(2, a)  # noqa: E731
    assert span_equal(data.annihilator_basis, [g(0) - g(3).scale(I), g(1) + g(2).scale(I)], 2)


def test_degenerate_spinor():
    with pytest.raises(NotNondegenerate):
        annihilator(FormField.basis_form(2, (0,)))


def test_induced_structure_examples():
    J = induced_structure(symplectic_spinor(omega2()))
    dx, dy = CliffordElement.gen(2, 0), CliffordElement.gen(2, 3)
    assert J.apply(dx) == -dy
    assert J.apply(dy) == dx
    assert induced_structure(holomorphic_volume(4)) == complex_lift(4)
    phi = symplectic_spinor(omega2())
    assert induced_structure(phi.scale(Q(2))) == induced_structure(phi)


def test_spin_lift():
    zero = GCStructure(2, [[Q(0)] * 4 for _ in range(4)])
    assert not so_to_spin(zero)
    J = symplectic_structure(omega2())
    dx, dy = CliffordElement.gen(2, 0), CliffordElement.gen(2, 3)
    assert so_to_spin(J).commutator(dx) == -dy


def test_u_decomposition_of_canonical_spinor():
    J = complex_lift(4)
    parts = u_decompose(J.canonical_spinor, J)
    assert list(parts) == [-2] and parts[-2] == J.canonical_spinor


@settings(max_examples=25, deadline=None)
@given(forms(4))
def test_u_decomposition_resolves_identity(alpha):
    J = complex_lift(4)
    total = FormField.zero(4)
    for v in u_decompose(alpha, J).values():
        total = total + v
    assert total == alpha


def test_d_split_of_constant_is_zero():
    gk = flat_gk_torus()
    J0, J1 = gk.J, gk.J_psi
    alpha = gk.K1_basis[0]
    alpha = FormField.from_blocks(4, TrigPoly, {(0, 0, 0, 0): alpha})
    (pq,) = bigrade(alpha, J0, J1).keys()
    assert all(not v for v in d_split(alpha, pq, J0, J1).values())


def test_type_examples():
    z1 = AffinePoly.var(4, 0) + AffinePoly.var(4, 1, I)
    phi = holomorphic_volume(4, AffinePoly) + FormField.const(4, 1, AffinePoly).scale(z1)
    assert type_at(phi, (Q(1), Q(0), Q(0), Q(0))) == 0
    assert type_at(phi, (Q(0), Q(0), Q(5), Q(0))) == 2
    phi_w = symplectic_spinor(omega2())
    assert type_at(phi_w) == 0
    assert type_at(phi_w, (0.3, 2.0), allow_float=True) == 0


def test_gk_examples():
    gk = flat_gk_torus()
    assert gk_check(gk.J, gk.J_psi)["ok"]
    Jw = symplectic_structure(omega2())
    same = gk_check(Jw, Jw)
    assert same["ghat_is_identity"]
    # G = (-J^2)^T P is the split pairing here, so it is indefinite.
    assert not same["checks"]["positive_definite"]
    flipped = gk_check(Jw, symplectic_structure(omega2(-1)))
    assert not flipped["ok"] and flipped["min_eigenvalue"] < 0
