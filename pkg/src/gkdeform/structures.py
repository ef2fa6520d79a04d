"""Generalized complex structures on flat models.

A structure is a constant 2m x 2m matrix over Gaussian rationals acting on
coordinate vectors in the ordered basis (del_1..del_m, dx^1..dx^m); column
``c`` holds the image of generator ``c``.  Spin-action projectors are built
once per structure and applied Fourier mode by Fourier mode (the spin action
of a constant Clifford element commutes with multiplication by functions).
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property

import numpy as np

from . import linalg as la
from .clifford import (CliffordElement, FormField, action_matrix, form_basis, pairing_matrix,
                       HALF)
from .errors import (EvaluationError, LinearAlgebraError, NonCommuting, NotNondegenerate, NotPure,
                     Unsolvable)
from .rings import Q, ZERO, ONE, I, TrigPoly, _is_exact_point

POS_TOL = 1e-9


def _coerce_matrix(M):
    return [[Q.coerce(v) for v in row] for row in M]


def _neg(A):
    return [[-v for v in row] for row in A]


def _scalar_mat(n, c):
    return [[c if i == j else ZERO for j in range(n)] for i in range(n)]


def _add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


class GCStructure:
    """Constant-coefficient endomorphism of (T+T*)(x)C with optional canonical spinor."""

    def __init__(self, dim: int, matrix, canonical_spinor: FormField | None = None, ring=TrigPoly):
        self.dim = dim
        self.matrix = _coerce_matrix(matrix)
        if len(self.matrix) != 2 * dim or any(len(r) != 2 * dim for r in self.matrix):
            raise ValueError(f"structure matrix must be {2 * dim}x{2 * dim}")
        self.ring = ring
        self.canonical_spinor = canonical_spinor

    def __eq__(self, o):
        return isinstance(o, GCStructure) and self.dim == o.dim and la.mat_eq(self.matrix, o.matrix)

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.matrix))

    def apply(self, E: CliffordElement) -> CliffordElement:
        """J acting on a degree-one element (coefficients may be functions)."""
        coords = E.coords()
        out = {}
        for r in range(2 * self.dim):
            acc = None
            for c, f in enumerate(coords):
                v = self.matrix[r][c]
                if v and f:
                    term = f.scale(v)
                    acc = term if acc is None else acc + term
            if acc:
                out[(r,)] = acc
        return CliffordElement(self.dim, E.ring, out)

    def compose(self, o: "GCStructure"):
        return la.matmul(self.matrix, o.matrix)

    def commutes_with(self, o: "GCStructure") -> bool:
        return la.mat_eq(self.compose(o), o.compose(self))

    def with_ring(self, ring) -> "GCStructure":
        return GCStructure(self.dim, self.matrix, self.canonical_spinor, ring)

    @cached_property
    def L_vectors(self) -> list:
        """Coordinate vectors spanning the -i eigenspace."""
        n2 = 2 * self.dim
        return la.nullspace(_add(self.matrix, _scalar_mat(n2, I)), n2)

    def L_basis(self, ring=None) -> list:
        ring = ring or self.ring
        return [CliffordElement.from_vector(self.dim, v, ring) for v in self.L_vectors]

    def Lbar_basis(self, ring=None) -> list:
        return [E.conj() for E in self.L_basis(ring)]

    @cached_property
    def sigma(self) -> CliffordElement:
        return so_to_spin(self)

    @cached_property
    def spin_matrix(self):
        return action_matrix(self.sigma)

    @cached_property
    def projectors(self) -> dict:
        """Exact eigenprojectors of the spin action: level k -> matrix for eigenvalue k*i."""
        n = self.dim // 2
        A = self.spin_matrix
        N = len(A)
        levels = range(-n, n + 1)
        out = {}
        for k in levels:
            P = la.identity(N)
            for j in levels:
                if j == k:
                    continue
                denom = (Q(0, k) - Q(0, j)).inverse()
                factor = [[(A[r][c] - (Q(0, j) if r == c else ZERO)) * denom for c in range(N)] for r in range(N)]
                P = la.matmul(P, factor)
            if not la.is_zero_matrix(P):
                out[k] = P
        return out

    def __repr__(self):
        return f"GCStructure(dim={self.dim})"


# -- constructors ----------------------------------------------------------

def complex_matrix(m: int):
    """Standard complex structure on R^m with z_j = x_{2j} + i x_{2j+1}: J del_{2j} = del_{2j+1}."""
    if m % 2:
        raise ValueError("complex structure needs even dimension")
    Jc = [[ZERO] * m for _ in range(m)]
    for j in range(m // 2):
        a, b = 2 * j, 2 * j + 1
        Jc[b][a] = ONE
        Jc[a][b] = -ONE
    return Jc


def complex_lift(m: int, ring=TrigPoly, spinor: FormField | None = None) -> GCStructure:
    """diag(J, -J^T) together with the canonical spinor dz_1 ^ ... ^ dz_n."""
    Jc = complex_matrix(m)
    M = [[ZERO] * (2 * m) for _ in range(2 * m)]
    for r in range(m):
        for c in range(m):
            M[r][c] = Jc[r][c]
            M[m + r][m + c] = -Jc[c][r]
    if spinor is None:
        spinor = holomorphic_volume(m, ring)
    return GCStructure(m, M, spinor, ring)


def holomorphic_volume(m: int, ring=TrigPoly) -> FormField:
    """dz_1 ^ ... ^ dz_n with dz_j = dx_{2j} + i dx_{2j+1}."""
    out = FormField.const(m, 1, ring)
    for j in range(m // 2):
        dz = FormField(m, ring, {(2 * j,): 1, (2 * j + 1,): Q(0, 1)})
        out = out.wedge(dz)
    return out


def two_form(m: int, entries, ring=TrigPoly) -> FormField:
    """Two-form from an antisymmetric matrix (constant or ring entries), w = sum_{i<j} w_ij dx^i dx^j."""
    t = {}
    for i in range(m):
        for j in range(i + 1, m):
            v = entries[i][j]
            if v:
                t[(i, j)] = v
    return FormField(m, ring, t)


def exp_form(alpha: FormField) -> FormField:
    """exp of an even form in the exterior algebra (finite sum)."""
    if any(len(S) % 2 for S in alpha.terms) or () in alpha.terms:
        raise ValueError("exp_form needs an even form without constant term")
    out = FormField.const(alpha.dim, 1, alpha.ring)
    power = FormField.const(alpha.dim, 1, alpha.ring)
    k = 1
    while True:
        power = power.wedge(alpha).scale(Q(Fraction(1, k)))
        if not power:
            return out
        out = out + power
        k += 1


def symplectic_spinor(omega: FormField) -> FormField:
    """e^{i omega}."""
    return exp_form(omega.scale(I))


def symplectic_structure(omega: FormField) -> GCStructure:
    return induced_structure(symplectic_spinor(omega))


# -- validation --------------------------------------------------------------

def validate(J: GCStructure) -> dict:
    m = J.dim
    n2 = 2 * m
    M = J.matrix
    P = pairing_matrix(m)
    checks = {}
    checks["square_is_minus_identity"] = la.mat_eq(la.matmul(M, M), _scalar_mat(n2, -ONE))
    MT = [[M[c][r] for c in range(n2)] for r in range(n2)]
    checks["orthogonal"] = la.mat_eq(la.matmul(la.matmul(MT, P), M), P)
    L = J.L_vectors if checks["square_is_minus_identity"] else []
    checks["L_rank_m"] = len(L) == m
    checks["L_isotropic"] = checks["L_rank_m"] and all(
        not _bilinear(P, u, v) for u in L for v in L)
    Lbar = [[x.conj() for x in v] for v in L]
    checks["L_plus_Lbar_spans"] = checks["L_rank_m"] and la.rank(la.columns_to_rows(L + Lbar, n2), n2) == n2
    checks["real"] = all(v == v.conj() for row in M for v in row)
    return {"ok": all(checks.values()), "checks": checks}


def _bilinear(P, u, v):
    s = ZERO
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b and P[i][j]:
                    s = s + a * P[i][j] * b
    return s


# -- pure spinors --------------------------------------------------------------

class PureSpinorData:
    def __init__(self, spinor: FormField, annihilator_basis: list, vectors: list):
        self.spinor = spinor
        self.annihilator_basis = annihilator_basis
        self.vectors = vectors

    def __repr__(self):
        return f"PureSpinorData(rank={len(self.vectors)})"


def _point_values(phi: FormField, point) -> dict:
    if point is None:
        return {S: v for S, v in phi.eval_at_zero().items()}
    if phi.ring is TrigPoly and any(p != 0 for p in point):
        raise EvaluationError("exact evaluation of a Fourier polynomial is only available at the origin")
    if not _is_exact_point(point):
        raise EvaluationError("exact evaluation needs a rational point")
    return {S: v for S, v in phi.eval_at(point).items() if v}


def annihilator(phi: FormField, point=None) -> PureSpinorData:
    """Degree-one annihilator of phi (pointwise at ``point``, default the origin)."""
    m = phi.dim
    vals = _point_values(phi, point)
    if not vals:
        raise NotPure("spinor vanishes at the evaluation point")
    const = FormField(m, TrigPoly, {S: v for S, v in vals.items()})
    idx = {S: i for i, S in enumerate(form_basis(m))}
    cols = []
    for a in range(2 * m):
        img = CliffordElement.gen(m, a).act(const)
        col = {}
        for S, c in img.terms.items():
            col[idx[S]] = c.constant_term()
        cols.append(col)
    rows = la.columns_to_rows(cols, len(idx))
    ker = la.nullspace(rows, 2 * m)
    if len(ker) != m:
        raise NotPure(f"annihilator has rank {len(ker)}, expected {m}")
    conj = [[x.conj() for x in v] for v in ker]
    if la.rank(la.columns_to_rows(ker + conj, 2 * m), 2 * m) < 2 * m:
        raise NotNondegenerate("annihilator meets its conjugate")
    basis = [CliffordElement.from_vector(m, v, phi.ring) for v in ker]
    return PureSpinorData(phi, basis, ker)


def induced_structure(phi: FormField, point=None) -> GCStructure:
    """J with -i eigenspace the annihilator of phi and +i eigenspace its conjugate."""
    data = annihilator(phi, point)
    m = phi.dim
    L = data.vectors
    Lbar = [[x.conj() for x in v] for v in L]
    B = la.columns_to_rows(L + Lbar, 2 * m)
    B = [[row.get(j, ZERO) for j in range(2 * m)] for row in B]
    D = [[ZERO] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        D[i][i] = Q(0, -1)
        D[m + i][m + i] = Q(0, 1)
    M = la.matmul(la.matmul(B, D), la.inverse(B))
    if any(v != v.conj() for row in M for v in row):
        raise NotNondegenerate("induced structure is not real")
    return GCStructure(m, M, phi, phi.ring)


# -- spin lift --------------------------------------------------------------

def _skew_pairs(m):
    return [(a, b) for a in range(2 * m) for b in range(a + 1, 2 * m)]


def skew_element(m: int, a: int, b: int, ring=TrigPoly) -> CliffordElement:
    """(e_a e_b - e_b e_a)/2."""
    ea, eb = CliffordElement.gen(m, a, 1, ring), CliffordElement.gen(m, b, 1, ring)
    return (ea.mul(eb) - eb.mul(ea)).scale(HALF)


def so_to_spin(J: GCStructure) -> CliffordElement:
    """The element sigma of CL^[2] with [sigma, E] = J E for every degree-one E."""
    m = J.dim
    pairs = _skew_pairs(m)
    gens = [CliffordElement.gen(m, c) for c in range(2 * m)]
    images = []
    for a, b in pairs:
        S = skew_element(m, a, b)
        images.append([S.commutator(g) for g in gens])
    rows, rhs = [], []
    for c in range(2 * m):
        for r in range(2 * m):
            row = {}
            for u, (a, b) in enumerate(pairs):
                v = images[u][c].terms.get((r,))
                if v:
                    row[u] = v.constant_term()
            rows.append(row)
            rhs.append(J.matrix[r][c])
    try:
        sol = la.solve(rows, rhs, len(pairs))
    except LinearAlgebraError as exc:
        raise Unsolvable("structure is not skew for the pairing") from exc
    out = CliffordElement.zero(m, J.ring)
    for u, (a, b) in enumerate(pairs):
        if sol[u]:
            out = out + skew_element(m, a, b, J.ring).scale(sol[u])
    return out


# -- gradings ---------------------------------------------------------------

def _apply_matrix(P, alpha: FormField) -> FormField:
    blocks = alpha.blocks()
    out = {}
    for key, vec in blocks.items():
        w = la.matvec(P, vec)
        if any(w):
            out[key] = w
    return FormField.from_blocks(alpha.dim, alpha.ring, out)


def u_decompose(alpha: FormField, J: GCStructure) -> dict:
    """Level k -> component in the k*i eigenspace of the spin action of sigma(J)."""
    out = {}
    for k, P in J.projectors.items():
        c = _apply_matrix(P, alpha)
        if c:
            out[k] = c
    return out


def u_component(alpha: FormField, J: GCStructure, k: int) -> FormField:
    P = J.projectors.get(k)
    if P is None:
        return FormField.zero(alpha.dim, alpha.ring)
    return _apply_matrix(P, alpha)


_BIPROJ_CACHE: dict = {}


def bigrade_projectors(J0: GCStructure, J1: GCStructure) -> dict:
    key = (hash(J0), hash(J1))
    hit = _BIPROJ_CACHE.get(key)
    if hit is not None and hit[0] == J0 and hit[1] == J1:
        return hit[2]
    if not J0.commutes_with(J1):
        raise NonCommuting("the two structures do not commute")
    out = {}
    for p, P in J0.projectors.items():
        for q, R in J1.projectors.items():
            PR = la.matmul(P, R)
            if not la.is_zero_matrix(PR):
                out[(p, q)] = PR
    _BIPROJ_CACHE[key] = (J0, J1, out)
    return out


def bigrade(alpha: FormField, J0: GCStructure, J1: GCStructure) -> dict:
    """(p, q) -> component in U^p of J0 intersected with U^q of J1."""
    out = {}
    for pq, P in bigrade_projectors(J0, J1).items():
        c = _apply_matrix(P, alpha)
        if c:
            out[pq] = c
    return out


def bigrade_component(alpha, J0, J1, pq) -> FormField:
    P = bigrade_projectors(J0, J1).get(tuple(pq))
    if P is None:
        return FormField.zero(alpha.dim, alpha.ring)
    return _apply_matrix(P, alpha)


D_CORNERS = {"dbar_plus": (1, 1), "dbar_minus": (1, -1), "delta_plus": (-1, -1), "delta_minus": (-1, 1)}


def d_split(alpha: FormField, bidegree, J0: GCStructure, J1: GCStructure) -> dict:
    """The four corner components of d(alpha) for alpha in U^{p,q}."""
    p, q = bidegree
    da = alpha.d()
    out = {}
    for name, (dp, dq) in D_CORNERS.items():
        out[name] = bigrade_component(da, J0, J1, (p + dp, q + dq))
    total = FormField.zero(alpha.dim, alpha.ring)
    for v in out.values():
        total = total + v
    if total != da:
        raise LinearAlgebraError("d has components outside the four corners; structures not integrable")
    return out


# -- type and positivity ----------------------------------------------------

def type_at(phi: FormField, point=None, *, allow_float=False, tol=POS_TOL) -> int:
    """Minimal degree present in phi at the point (origin by default)."""
    if point is None or _is_exact_point(point) and (phi.ring is not TrigPoly or all(p == 0 for p in point)):
        vals = _point_values(phi, point)
        degs = [len(S) for S, v in vals.items() if v]
    else:
        if not allow_float:
            raise EvaluationError("non-exact point; pass allow_float=True for a float evaluation")
        degs = [len(S) for S, f in phi.terms.items() if abs(f.eval_at(point, exact_ok=False)) > tol]
    if not degs:
        raise EvaluationError("spinor vanishes at the point")
    return min(degs)


def metric_matrix(J0: GCStructure, J1: GCStructure):
    """Gram matrix of G(E, F) = <-J0 J1 E, F> on the generators."""
    m = J0.dim
    Ghat = _neg(la.matmul(J0.matrix, J1.matrix))
    P = pairing_matrix(m)
    GhT = [[Ghat[c][r] for c in range(2 * m)] for r in range(2 * m)]
    return Ghat, la.matmul(GhT, P)


def gk_check(J0: GCStructure, J1: GCStructure, samples=None, tol=POS_TOL) -> dict:
    """Commutation, symmetry of G and positive-definiteness of G (floats)."""
    checks = {}
    checks["commute"] = J0.commutes_with(J1)
    Ghat, G = metric_matrix(J0, J1)
    n2 = len(G)
    checks["symmetric"] = all(G[i][j] == G[j][i] for i in range(n2) for j in range(n2))
    checks["real"] = all(v == v.conj() for row in G for v in row)
    samples = samples or [None]
    min_eigs = []
    for _ in samples:
        # constant-coefficient structures: the metric is the same at every sample point
        arr = np.array([[float(complex(v).real) for v in row] for row in G])
        min_eigs.append(float(np.linalg.eigvalsh((arr + arr.T) / 2).min()))
    checks["positive_definite"] = all(e > tol for e in min_eigs)
    return {"ok": all(checks.values()), "checks": checks, "min_eigenvalue": min(min_eigs),
            "ghat_is_identity": la.mat_eq(Ghat, la.identity(n2)), "tolerance": tol}
