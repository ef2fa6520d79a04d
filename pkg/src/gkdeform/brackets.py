"""Derived, Courant and Schouten brackets as operators on forms.

Operators are small composition trees over ``d`` and spin actions.  A
bracket is turned back into a Clifford element by evaluating it on the
constant basis forms and inverting the (faithful) spin representation;
f-linearity is checked separately with a few test functions.
"""
from __future__ import annotations

from itertools import combinations

from . import linalg as la
from .clifford import (CliffordElement, FormField, element_from_action, form_basis, form_index,
                       word_basis, HALF)
from .errors import DegreeError, LinearAlgebraError, NotIntegrable, NotTensorial, PathMismatch
from .rings import Q, ZERO, ONE, TrigPoly, AffinePoly


# -- operator trees -----------------------------------------------------------

class Op:
    """Linear operator on FormFields."""

    def __call__(self, alpha: FormField) -> FormField:
        raise NotImplementedError

    def __matmul__(self, o: "Op") -> "Op":
        return Comp(self, o)

    def __add__(self, o: "Op") -> "Op":
        return Sum([(ONE, self), (ONE, o)])

    def __sub__(self, o: "Op") -> "Op":
        return Sum([(ONE, self), (-ONE, o)])

    def scale(self, c) -> "Op":
        return Sum([(Q.coerce(c), self)])


class DOp(Op):
    def __call__(self, alpha):
        return alpha.d()

    def __repr__(self):
        return "d"


class Act(Op):
    def __init__(self, a: CliffordElement):
        self.a = a

    def __call__(self, alpha):
        return self.a.act(alpha)

    def __repr__(self):
        return f"Act({self.a!r})"


class Comp(Op):
    """Composition; the right operand is applied first."""

    def __init__(self, left: Op, right: Op):
        self.left, self.right = left, right

    def __call__(self, alpha):
        return self.left(self.right(alpha))


class Sum(Op):
    def __init__(self, terms):
        self.terms = terms

    def __call__(self, alpha):
        out = FormField.zero(alpha.dim, alpha.ring)
        for c, op in self.terms:
            v = op(alpha)
            out = out + (v if c == ONE else v.scale(c))
        return out


D = DOp()


def comm(A: Op, B: Op) -> Op:
    return A @ B - B @ A


def anticomm(A: Op, B: Op) -> Op:
    return A @ B + B @ A


def _as_op(x) -> Op:
    return x if isinstance(x, Op) else Act(x)


def _test_functions(m: int, ring):
    if ring is TrigPoly:
        return [TrigPoly.exp_i(m, j) for j in range(m)]
    return [AffinePoly.var(m, j) for j in range(m)]


def is_tensorial(op: Op, m: int, ring) -> bool:
    for S in form_basis(m):
        base = FormField.basis_form(m, S, 1, ring)
        img = op(base)
        for g in _test_functions(m, ring):
            if op(base.scale(g)) != img.scale(g):
                return False
    return True


def extract(op: Op, m: int, ring=TrigPoly, *, check=True) -> CliffordElement:
    """The Clifford element whose spin action agrees with a zeroth-order operator."""
    if check and not is_tensorial(op, m, ring):
        raise NotTensorial("operator is not linear over functions")
    cols = {S: op(FormField.basis_form(m, S, 1, ring)) for S in form_basis(m)}
    return element_from_action(m, ring, cols)


def _degree_one(c: CliffordElement) -> CliffordElement:
    if not c.is_degree_one():
        raise DegreeError("bracket did not extract to a degree-one element")
    return c


# -- derived and Courant brackets -----------------------------------------------

def derived_bracket_op(E: CliffordElement, F: CliffordElement) -> Op:
    """[{d, E}, F] as an operator."""
    return comm(anticomm(D, Act(E)), Act(F))


def derived_bracket(E: CliffordElement, F: CliffordElement, *, check=True) -> CliffordElement:
    if not (E.is_degree_one() and F.is_degree_one()):
        raise DegreeError("derived bracket takes degree-one arguments")
    return _degree_one(extract(derived_bracket_op(E, F), E.dim, E.ring, check=check))


def courant_bracket_op(E: CliffordElement, F: CliffordElement) -> Op:
    return (derived_bracket_op(E, F) - derived_bracket_op(F, E)).scale(HALF)


def courant_bracket(E: CliffordElement, F: CliffordElement, *, check=True) -> CliffordElement:
    """Skew-symmetrized derived bracket, without any d<E,F> correction term."""
    if not (E.is_degree_one() and F.is_degree_one()):
        raise DegreeError("Courant bracket takes degree-one arguments")
    return _degree_one(extract(courant_bracket_op(E, F), E.dim, E.ring, check=check))


def split_vector_form(E: CliffordElement):
    """(vector coefficients, one-form) of a degree-one element."""
    m = E.dim
    coords = E.coords()
    v = coords[:m]
    theta = FormField(m, E.ring, {(i,): coords[m + i] for i in range(m) if coords[m + i]})
    return v, theta


def _from_vector_form(m, ring, v, theta: FormField) -> CliffordElement:
    t = {}
    for i, f in enumerate(v):
        if f:
            t[(i,)] = f
    for S, f in theta.terms.items():
        if len(S) != 1:
            raise DegreeError("expected a one-form")
        t[(m + S[0],)] = f
    return CliffordElement(m, ring, t)


def lie_bracket(v, w):
    """Components of [v, w] for vector fields given by coefficient lists."""
    m = len(v)
    out = []
    for j in range(m):
        acc = v[j].zero(v[j].dim)
        for i in range(m):
            if v[i] and w[j]:
                acc = acc + v[i] * w[j].deriv(i)
            if w[i] and v[j]:
                acc = acc - w[i] * v[j].deriv(i)
        out.append(acc)
    return out


def _interior(m, ring, v, alpha: FormField) -> FormField:
    out = FormField.zero(m, ring)
    for i, f in enumerate(v):
        if f:
            out = out + CliffordElement.gen(m, i, 1, ring).act(alpha).scale(f)
    return out


def dorfman(E: CliffordElement, F: CliffordElement) -> CliffordElement:
    """Closed form of the derived bracket: [v,w] + L_v eta - i_w d theta."""
    m, ring = E.dim, E.ring
    v, theta = split_vector_form(E)
    w, eta = split_vector_form(F)
    vw = lie_bracket(v, w)
    lie_eta = _interior(m, ring, v, eta.d()) + _interior(m, ring, v, eta).d()
    one_form = lie_eta - _interior(m, ring, w, theta.d())
    return _from_vector_form(m, ring, vw, one_form)


# -- L-bar bookkeeping ----------------------------------------------------------

def lbar_products(J, k: int, ring=None) -> list:
    """[(index tuple, X_{i1} ... X_{ik})] for the constant basis X of L-bar."""
    ring = ring or J.ring
    X = J.Lbar_basis(ring)
    out = []
    for idx in combinations(range(len(X)), k):
        p = CliffordElement.scalar(J.dim, 1, ring)
        for i in idx:
            p = p.mul(X[i])
        out.append((idx, p))
    return out


def lbar_decompose(a: CliffordElement, J, k: int) -> dict:
    """Coefficients (functions) of ``a`` on the products of k L-bar basis vectors.

    Raises LinearAlgebraError if ``a`` is not in the k-th wedge of L-bar.
    """
    prods = lbar_products(J, k, a.ring)
    words = sorted({w for _, p in prods for w in p.terms} | set(a.terms))
    widx = {w: i for i, w in enumerate(words)}
    cols = []
    for _, p in prods:
        cols.append({widx[w]: c.constant_term() for w, c in p.terms.items()})
    rows = la.columns_to_rows(cols, len(words))
    target_blocks = a.blocks()
    inv = word_basis(a.dim)
    out: dict = {idx: a.ring.zero(a.dim) for idx, _ in prods}
    for key, vec in target_blocks.items():
        rhs = [ZERO] * len(words)
        for i, c in enumerate(vec):
            if c:
                rhs[widx[inv[i]]] = c
        sol = la.solve(rows, rhs, len(prods))
        for u, (idx, _) in enumerate(prods):
            if sol[u]:
                out[idx] = out[idx] + a.ring._raw(a.dim, {key: sol[u]})
    return {idx: f for idx, f in out.items() if f}


def lbar_compose(J, coeffs: dict, ring=None) -> CliffordElement:
    ring = ring or J.ring
    X = J.Lbar_basis(ring)
    m = J.dim
    out = CliffordElement.zero(m, ring)
    for idx, f in coeffs.items():
        p = CliffordElement.scalar(m, 1, ring)
        for i in idx:
            p = p.mul(X[i])
        out = out + p.scale(f)
    return out


def in_lbar_power(a: CliffordElement, J, k: int) -> bool:
    try:
        return lbar_compose(J, lbar_decompose(a, J, k), a.ring) == a
    except LinearAlgebraError:
        return False


# -- Schouten bracket -----------------------------------------------------------

def schouten_operator(eps1: CliffordElement, eps2: CliffordElement) -> CliffordElement:
    """[[d, eps1], eps2] extracted as a Clifford element."""
    op = comm(comm(D, Act(eps1)), Act(eps2))
    return extract(op, eps1.dim, eps1.ring)


def _decomposables(a: CliffordElement, J, k: int) -> list:
    """a as a list of factor lists [f X_i1, X_i2, ...] (function put on the first factor)."""
    X = J.Lbar_basis(a.ring)
    out = []
    for idx, f in sorted(lbar_decompose(a, J, k).items()):
        factors = [X[idx[0]].scale(f)] + [X[i] for i in idx[1:]]
        out.append(factors)
    return out


def _product(m, ring, factors):
    p = CliffordElement.scalar(m, 1, ring)
    for x in factors:
        p = p.mul(x)
    return p


def schouten_expansion(Es: list, Fs: list) -> CliffordElement:
    """sum (-1)^{i+j} E_1..^E_i..E_n [E_i, F_j]_d F_1..^F_j..F_m on decomposables."""
    m, ring = Es[0].dim, Es[0].ring
    out = CliffordElement.zero(m, ring)
    for i, E in enumerate(Es):
        for j, F in enumerate(Fs):
            br = dorfman(E, F)
            if not br:
                continue
            term = _product(m, ring, Es[:i] + Es[i + 1:] + [br] + Fs[:j] + Fs[j + 1:])
            out = out + (term if (i + j) % 2 == 0 else -term)
    return out


def schouten(eps1: CliffordElement, eps2: CliffordElement, J, *, check_paths=True) -> CliffordElement:
    """N(eps1, eps2) = [[d, eps1], eps2] for eps_i in the second wedge of L-bar.

    Path (a) extracts the operator; path (b) expands over decomposables with
    derived brackets of the factors.  PathMismatch if they disagree.
    """
    a = schouten_operator(eps1, eps2)
    if check_paths:
        m, ring = eps1.dim, eps1.ring
        b = CliffordElement.zero(m, ring)
        for Es in _decomposables(eps1, J, 2):
            for Fs in _decomposables(eps2, J, 2):
                b = b + schouten_expansion(Es, Fs)
        if a != b:
            raise PathMismatch("operator and expansion paths disagree")
    return a


# -- Lie algebroid differential and Maurer-Cartan ---------------------------------

def _require_constant(phi: FormField):
    if not phi.is_constant():
        raise ValueError("canonical spinor must have constant coefficients")


def solve_on_spinor(target: FormField, phi: FormField, prods: list) -> dict:
    """Functions c_u with sum c_u (P_u . phi) = target, mode by mode (phi constant)."""
    _require_constant(phi)
    idx = form_index(phi.dim)
    cols = []
    for _, p in prods:
        img = p.act(phi)
        cols.append({idx[S]: c.constant_term() for S, c in img.terms.items()})
    rows = la.columns_to_rows(cols, len(idx))
    out = {}
    for key, vec in target.blocks().items():
        sol = la.solve(rows, vec, len(prods))
        for u, (pidx, _) in enumerate(prods):
            if sol[u]:
                out.setdefault(pidx, {})[key] = sol[u]
    return {k: target.ring._raw(target.dim, v) for k, v in out.items()}


def lie_algebroid_d(eps: CliffordElement, phi: FormField, J) -> CliffordElement:
    """d_L eps from the U^{-n+3} part of [d, eps] phi."""
    from .structures import u_component
    n = J.dim // 2
    comp = u_component(comm(D, Act(eps))(phi), J, -n + 3)
    if not comp:
        return CliffordElement.zero(eps.dim, eps.ring)
    prods = lbar_products(J, 3, eps.ring)
    try:
        coeffs = solve_on_spinor(comp, phi, prods)
    except LinearAlgebraError as exc:
        raise NotIntegrable("U^{-n+3} component is not of the form (wedge^3 L-bar) . phi") from exc
    return lbar_compose(J, coeffs, eps.ring)


def maurer_cartan_residual(eps: CliffordElement, J, phi: FormField, *, check_paths=True) -> CliffordElement:
    """d_L eps + (1/2) [eps, eps]_L."""
    return lie_algebroid_d(eps, phi, J) + schouten(eps, eps, J, check_paths=check_paths).scale(HALF)


def mc_projection(eps: CliffordElement, phi: FormField, J) -> FormField:
    """U^{-n+3} component of e^{-eps} d e^{eps} phi, computed with finite exponentials."""
    from .clifford import exp_nilpotent
    from .structures import u_component
    n = J.dim // 2
    val = exp_nilpotent(-eps).act(exp_nilpotent(eps).act(phi).d())
    return u_component(val, J, -n + 3)


# -- integrability ----------------------------------------------------------------

def _key_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _key_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _candidate_keys(phi: FormField, dphi: FormField):
    ring = phi.ring
    pk = {k for f in phi.terms.values() for k in f.terms}
    dk = {k for f in dphi.terms.values() for k in f.terms}
    if ring is TrigPoly:
        return sorted({_key_sub(a, b) for a in dk for b in pk})
    top = max((sum(k) for k in dk), default=0)
    m = phi.dim
    keys = [k for k in _exponents(m, top)]
    return keys


def _exponents(m, top):
    if m == 0:
        yield ()
        return
    for e in range(top + 1):
        for rest in _exponents(m - 1, top - e):
            yield (e,) + rest


def integrability_witness(phi: FormField, points=None) -> CliffordElement:
    """A degree-one E with d phi + E . phi = 0.

    Raises NotIntegrable when d phi has a component outside U^{-n+1} at a test
    point (origin, plus ``points`` for chart models) or when no witness exists
    with coefficients in the natural finite search space.
    """
    from .structures import induced_structure, u_decompose
    m, ring = phi.dim, phi.ring
    dphi = phi.d()
    if not dphi:
        return CliffordElement.zero(m, ring)
    n = m // 2
    for pt in [None] + list(points or []):
        Jx = induced_structure(phi, pt)
        vals = dphi.eval_at_zero() if pt is None else {S: v for S, v in dphi.eval_at(pt).items() if v}
        dconst = FormField(m, TrigPoly, vals)
        bad = [k for k in u_decompose(dconst, Jx.with_ring(TrigPoly)) if k != -n + 1]
        if bad:
            raise NotIntegrable(f"d(phi) has components at levels {sorted(bad)} at point {pt}")
    keys = _candidate_keys(phi, dphi)
    # unknowns: (generator a, key) ; equations: (form S, key)
    unknowns = [(a, k) for a in range(2 * m) for k in keys]
    cols = []
    eq_index: dict = {}
    for a, k in unknowns:
        img = CliffordElement.gen(m, a, ring._raw(m, {k: ONE}), ring).act(phi)
        col = {}
        for S, f in img.terms.items():
            for kk, c in f.terms.items():
                r = eq_index.setdefault((S, kk), len(eq_index))
                col[r] = c
        cols.append(col)
    rhs_map = {}
    for S, f in dphi.terms.items():
        for kk, c in f.terms.items():
            r = eq_index.setdefault((S, kk), len(eq_index))
            rhs_map[r] = -c
    rows = la.columns_to_rows(cols, len(eq_index))
    rhs = [rhs_map.get(r, ZERO) for r in range(len(eq_index))]
    try:
        sol = la.solve(rows, rhs, len(unknowns))
    except LinearAlgebraError as exc:
        raise NotIntegrable("no witness E in the search space") from exc
    t: dict = {}
    for u, (a, k) in enumerate(unknowns):
        if sol[u]:
            t.setdefault((a,), {})[k] = sol[u]
    E = CliffordElement._raw(m, ring, {w: ring._raw(m, v) for w, v in t.items()})
    if E.act(phi) + dphi:
        raise NotIntegrable("witness check failed")
    return E


def transport(g: CliffordElement, ginv: CliffordElement, basis: list) -> list:
    """Ad_g applied to a list of elements: g E g^{-1}."""
    return [g.mul(E).mul(ginv) for E in basis]


def courant_closed(basis: list, phi: FormField) -> bool:
    """Every basis element annihilates phi, and so do all their Courant brackets."""
    for E in basis:
        if E.act(phi):
            return False
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if courant_bracket(basis[i], basis[j], check=False).act(phi):
                return False
    return True
