"""Holomorphic Poisson bivectors on an affine chart: Schouten checks, e^{t beta} spinors, type maps.

Chart coordinates are z_j = x_{2j} + i x_{2j+1} (0-based, j < n) and the real
dimension is m = 2n.  Bivector components are AffinePoly in the real
coordinates; a bivector v ^ w corresponds to the Clifford product w . v, so
that its spin action is the contraction iota_w iota_v.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from . import linalg as la
from .clifford import CliffordElement, FormField
from .errors import EvaluationError, PathMismatch
from .rings import AffinePoly, Q, _is_exact_point, holomorphic_coordinate
from .series import TruncSeries, exp_action
from .structures import POS_TOL, complex_lift, holomorphic_volume, type_at

HALF = Q("1/2")
_MINUS_HALF_I = Q(0, "-1/2")
_HALF_I = Q(0, "1/2")


def dz_deriv(f: AffinePoly, h: int) -> AffinePoly:
    """d f / d z_h = (1/2)(d/dx_{2h} - i d/dx_{2h+1}) f."""
    return f.deriv(2 * h).scale(HALF) + f.deriv(2 * h + 1).scale(_MINUS_HALF_I)


def dzbar_deriv(f: AffinePoly, h: int) -> AffinePoly:
    """d f / d zbar_h = (1/2)(d/dx_{2h} + i d/dx_{2h+1}) f."""
    return f.deriv(2 * h).scale(HALF) + f.deriv(2 * h + 1).scale(_HALF_I)


def is_holomorphic(f: AffinePoly, n: int) -> bool:
    return all(not dzbar_deriv(f, h) for h in range(n))


def z(n: int, j: int) -> AffinePoly:
    return holomorphic_coordinate(AffinePoly, 2 * n, j)


class PoissonBivector:
    """beta = sum_{j<k} beta^{jk} d/dz_j ^ d/dz_k with holomorphic AffinePoly components."""

    def __init__(self, n: int, components: dict):
        self.n = n
        self.m = 2 * n
        comps = {}
        for (j, k), f in components.items():
            if not (0 <= j < n and 0 <= k < n) or j == k:
                raise ValueError(f"bad bivector index ({j}, {k}) for n = {n}")
            f = f if isinstance(f, AffinePoly) else AffinePoly.const(self.m, Q.coerce(f))
            if f.dim != self.m:
                raise ValueError(f"component ({j}, {k}) lives in dimension {f.dim}, expected {self.m}")
            if j > k:
                j, k, f = k, j, -f
            comps[(j, k)] = comps.get((j, k), AffinePoly.zero(self.m)) + f
        self.components = {key: f for key, f in comps.items() if f}
        for key, f in self.components.items():
            if not is_holomorphic(f, n):
                raise ValueError(f"component {key} is not holomorphic")

    @classmethod
    def zero(cls, n: int) -> "PoissonBivector":
        return cls(n, {})

    @classmethod
    def single(cls, n: int, j: int, k: int, f) -> "PoissonBivector":
        """f d/dz_j ^ d/dz_k."""
        return cls(n, {(j, k): f})

    @classmethod
    def from_commuting(cls, n: int, vectors: list, lam: dict) -> "PoissonBivector":
        """sum lam_{ab} V_a ^ V_b for constant vectors V_a given by their d/dz coefficients."""
        comps = {}
        for (a, b), c in lam.items():
            c = Q.coerce(c)
            for j in range(n):
                for k in range(j + 1, n):
                    val = c * (Q.coerce(vectors[a][j]) * Q.coerce(vectors[b][k])
                               - Q.coerce(vectors[a][k]) * Q.coerce(vectors[b][j]))
                    if val:
                        comps[(j, k)] = comps.get((j, k), Q(0)) + val
        return cls(n, {key: AffinePoly.const(2 * n, v) for key, v in comps.items()})

    def entry(self, j: int, k: int) -> AffinePoly:
        if j == k:
            return AffinePoly.zero(self.m)
        if j < k:
            return self.components.get((j, k), AffinePoly.zero(self.m))
        return -self.components.get((k, j), AffinePoly.zero(self.m))

    def matrix_at(self, point):
        """n x n antisymmetric matrix of values; exact at rational points, complex floats otherwise."""
        exact = _is_exact_point(point)
        rows = []
        for j in range(self.n):
            row = []
            for k in range(self.n):
                f = self.entry(j, k)
                row.append(f.eval_at(point, exact_ok=exact) if f else (Q(0) if exact else 0j))
            rows.append(row)
        return rows

    def rank_at(self, point, tol: float = POS_TOL) -> int:
        """Bivector rank: half the rank of the antisymmetric matrix."""
        M = self.matrix_at(point)
        if _is_exact_point(point):
            r = la.rank(M)
        else:
            A = np.array(M, dtype=complex)
            r = int(np.sum(np.linalg.svd(A, compute_uv=False) > tol)) if A.size else 0
        return r // 2

    def __eq__(self, o):
        return isinstance(o, PoissonBivector) and self.n == o.n and self.components == o.components

    def __repr__(self):
        return f"PoissonBivector(n={self.n}, {len(self.components)} components)"


def schouten_components(beta: PoissonBivector) -> dict:
    """Classical [beta, beta]/2 components R^{jkl}, j<k<l: the cyclic sum of beta^{hj} d_h beta^{kl}."""
    n = beta.n
    out = {}
    for j, k, l in combinations(range(n), 3):
        acc = AffinePoly.zero(beta.m)
        for a, b, c in ((j, k, l), (k, l, j), (l, j, k)):
            for h in range(n):
                bh = beta.entry(h, a)
                if bh:
                    acc = acc + bh * dz_deriv(beta.entry(b, c), h)
        out[(j, k, l)] = acc
    return out


def dz_vector(n: int, j: int) -> CliffordElement:
    """d/dz_j = (1/2)(d/dx_{2j} - i d/dx_{2j+1}) as a Clifford generator combination."""
    m = 2 * n
    return CliffordElement.gen(m, 2 * j, 1, AffinePoly).scale(HALF) + \
        CliffordElement.gen(m, 2 * j + 1, 1, AffinePoly).scale(_MINUS_HALF_I)


def bivector_to_clifford(beta: PoissonBivector) -> CliffordElement:
    """v ^ w -> w . v, so the spin action is contraction by the bivector."""
    out = CliffordElement.zero(beta.m, AffinePoly)
    for (j, k), f in beta.components.items():
        out = out + dz_vector(beta.n, k).mul(dz_vector(beta.n, j)).scale(f)
    return out


def trivector_to_clifford(n: int, comps: dict) -> CliffordElement:
    """u ^ v ^ w -> w . v . u."""
    out = CliffordElement.zero(2 * n, AffinePoly)
    for (j, k, l), f in comps.items():
        if f:
            word = dz_vector(n, l).mul(dz_vector(n, k)).mul(dz_vector(n, j))
            out = out + word.scale(f)
    return out


def chart_structure(n: int):
    return complex_lift(2 * n, AffinePoly)


# Operator Schouten bracket of the Clifford images equals this multiple of the
# classical residual's Clifford image (fixed by the dictionary conventions).
SCHOUTEN_FACTOR = Q(-2)


def poisson_check(beta: PoissonBivector, *, cross_check: bool = True) -> dict:
    """Classical residual components (all j<k<l); zero iff beta is Poisson.

    With ``cross_check`` the operator bracket of the Clifford image is compared
    with the residual through the dictionary; PathMismatch on disagreement.
    """
    res = schouten_components(beta)
    if cross_check and beta.n >= 1:
        from .brackets import schouten
        eps = bivector_to_clifford(beta)
        op = schouten(eps, eps, chart_structure(beta.n), check_paths=False)
        expect = trivector_to_clifford(beta.n, res).scale(SCHOUTEN_FACTOR)
        if op != expect:
            raise PathMismatch("classical Schouten residual disagrees with the operator bracket")
    return res


def is_poisson(beta: PoissonBivector, **kw) -> bool:
    return all(not f for f in poisson_check(beta, **kw).values())


def poisson_spinor(beta: PoissonBivector, omega: FormField | None = None, order: int | None = None) -> TruncSeries:
    """e^{t beta} omega as a series in t; terminates after n//2 contractions."""
    n = beta.n
    if omega is None:
        omega = holomorphic_volume(2 * n, AffinePoly)
    N = n // 2 if order is None else order
    N = max(N, 1)
    eps = TruncSeries([CliffordElement.zero(2 * n, AffinePoly), bivector_to_clifford(beta)], N)
    return exp_action(eps, omega)


def evaluate_at_t(series: TruncSeries, t) -> FormField:
    t = Q.coerce(t)
    out = FormField.zero(series.dim, series.ring)
    power = Q(1)
    for c in series.coeffs:
        out = out + c.scale(power)
        power = power * t
    return out


def mc_residual(beta: PoissonBivector) -> CliffordElement:
    """Maurer-Cartan residual of the Clifford image on the chart's complex structure."""
    from .brackets import maurer_cartan_residual
    n = beta.n
    J = chart_structure(n)
    return maurer_cartan_residual(bivector_to_clifford(beta), J, holomorphic_volume(2 * n, AffinePoly))


def type_stratify(beta: PoissonBivector, grid, omega: FormField | None = None, *, t=1,
                  tol: float = POS_TOL, check_spinor: bool = True) -> dict:
    """point -> n - 2 rank(beta at point).

    At exact points the type of the spinor e^{t beta} omega is computed
    independently and compared; a mismatch raises EvaluationError.
    """
    n = beta.n
    spinor = None
    if check_spinor:
        spinor = evaluate_at_t(poisson_spinor(beta, omega), t)
    out = {}
    for p in grid:
        p = tuple(p)
        if len(p) != beta.m:
            raise ValueError(f"grid point {p} has length {len(p)}, expected {beta.m}")
        ty = n - 2 * beta.rank_at(p, tol)
        if spinor is not None and _is_exact_point(p):
            other = type_at(spinor, p)
            if other != ty:
                raise EvaluationError(f"type mismatch at {p}: rank gives {ty}, spinor gives {other}")
        out[p] = ty
    return out
