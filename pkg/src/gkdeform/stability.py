"""Order-by-order solver for deformations of generalized Kahler structures
with one pure spinor on the flat torus.

Everything here is constant-coefficient in the structures, so d and the
spin action of the structures preserve Fourier modes.  Hodge theory of the
complex (K, d) is done mode by mode with exact minimal-norm solves in the
flat Hermitian inner product (conjugate transpose).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from . import linalg as la
from .clifford import CliffordElement, FormField, form_index, word_basis, word_matrix, HALF
from .errors import KerSolveFailure, LinearAlgebraError, NotExact, NotInK2, SupportError
from .rings import Q, ZERO, ONE, TrigPoly
from .series import TruncSeries, cbh_log, exp_action, exp_series
from .structures import GCStructure, bigrade_projectors, gk_check, induced_structure


def _proj_sum(projs: dict, keys) -> list:
    mats = [projs[k] for k in keys if k in projs]
    N = len(next(iter(projs.values())))
    out = [[ZERO] * N for _ in range(N)]
    for P in mats:
        out = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(out, P)]
    return out


def _image_basis(P) -> list:
    """Basis vectors of the image of a projector P (= kernel of I - P)."""
    N = len(P)
    IminusP = [[(ONE if i == j else ZERO) - P[i][j] for j in range(N)] for i in range(N)]
    return la.nullspace(IminusP, N)


@lru_cache(maxsize=None)
def _wedge_matrix(m: int, j: int) -> tuple:
    return word_matrix(m, (m + j,))


def d_matrix(m: int, k) -> list:
    """Matrix of d on e^{i<k,x>} (constant form) in form_basis order: i * sum_j k_j dx^j ^."""
    N = 2 ** m
    M = [[ZERO] * N for _ in range(N)]
    for j, kj in enumerate(k):
        if kj:
            c = Q(0, kj)
            for r, col, s in _wedge_matrix(m, j):
                M[r][col] = M[r][col] + (c if s == 1 else -c)
    return M


class GKOneSpinor:
    """(J, psi) with J constant, psi a constant d-closed non-degenerate pure spinor."""

    def __init__(self, J: GCStructure, psi: FormField):
        if J.canonical_spinor is None:
            raise ValueError("J needs a canonical spinor")
        if not psi.is_constant() or not J.canonical_spinor.is_constant():
            raise ValueError("the torus solver needs constant-coefficient spinors")
        self.J = J
        self.psi = psi
        self.phi = J.canonical_spinor
        self.m = J.dim
        self.n = J.dim // 2
        self.ring = psi.ring
        self.J_psi = induced_structure(psi)

    def validate(self) -> dict:
        rep = gk_check(self.J, self.J_psi)
        rep["checks"]["psi_closed"] = not self.psi.d()
        rep["ok"] = all(rep["checks"].values())
        return rep

    @property
    def projectors(self):
        return bigrade_projectors(self.J, self.J_psi)

    @property
    def K1_keys(self):
        return [(0, -self.n + 2)]

    @property
    def K2_keys(self):
        n = self.n
        return [(1, -n + 1), (-1, -n + 1), (1, -n + 3), (-1, -n + 3)]

    @property
    def P1(self):
        return self._cached("_P1", lambda: _proj_sum(self.projectors, self.K1_keys))

    @property
    def P2(self):
        return self._cached("_P2", lambda: _proj_sum(self.projectors, self.K2_keys))

    @property
    def K1_basis(self) -> list:
        return self._cached("_B1", lambda: _image_basis(self.P1))

    @property
    def K2_basis(self) -> list:
        return self._cached("_B2", lambda: _image_basis(self.P2))

    def _cached(self, name, fn):
        v = self.__dict__.get(name)
        if v is None:
            v = fn()
            self.__dict__[name] = v
        return v

    def _project(self, P, alpha: FormField) -> FormField:
        out = {}
        for key, vec in alpha.blocks().items():
            w = la.matvec(P, vec)
            if any(w):
                out[key] = w
        return FormField.from_blocks(alpha.dim, alpha.ring, out)

    def in_K1(self, alpha: FormField) -> bool:
        return self._project(self.P1, alpha) == alpha

    def in_K2(self, alpha: FormField) -> bool:
        return self._project(self.P2, alpha) == alpha

    def K1_element(self, mode_coeffs: dict) -> FormField:
        """sum over modes of sum_i c_i B_i e^{i<k,x>} from {mode: [c_i]}."""
        B = self.K1_basis
        blocks = {}
        for key, cs in mode_coeffs.items():
            vec = [ZERO] * (2 ** self.m)
            for c, b in zip(cs, B):
                c = Q.coerce(c)
                if c:
                    vec = [x + c * y for x, y in zip(vec, b)]
            blocks[tuple(key)] = vec
        return FormField.from_blocks(self.m, self.ring, blocks)


def flat_gk_torus(m: int = 4, ring=TrigPoly) -> GKOneSpinor:
    """(J_cx, e^{i omega}) on the flat m-torus with the Kahler form that makes G positive."""
    from .structures import complex_lift, symplectic_spinor, two_form
    O = [[0] * m for _ in range(m)]
    for j in range(m // 2):
        O[2 * j][2 * j + 1] = -1
        O[2 * j + 1][2 * j] = 1
    return GKOneSpinor(complex_lift(m, ring), symplectic_spinor(two_form(m, O, ring)))


# -- per-mode Hodge theory --------------------------------------------------------

class ModeHodge:
    """Per-mode matrices of d on K^1 and K^2 (modes with |k|_inf <= mode_cap)."""

    def __init__(self, gk: GKOneSpinor, mode_cap: int):
        self.gk = gk
        self.mode_cap = mode_cap
        self._cache: dict = {}

    def _check_mode(self, k):
        if max((abs(x) for x in k), default=0) > self.mode_cap:
            raise SupportError(f"mode {k} exceeds the mode cap {self.mode_cap}")

    def D(self, k) -> list:
        return self._get(("D", tuple(k)), lambda: d_matrix(self.gk.m, k))

    def D_on_K1(self, k) -> list:
        """Columns d(B_i) for the K^1 basis at mode k (as a dense 2^m x dim K1 matrix)."""
        def build():
            D = self.D(k)
            cols = [la.matvec(D, b) for b in self.gk.K1_basis]
            return [[cols[j][i] for j in range(len(cols))] for i in range(2 ** self.gk.m)]
        return self._get(("DK1", tuple(k)), build)

    def D_on_K2(self, k) -> list:
        def build():
            D = self.D(k)
            cols = [la.matvec(D, b) for b in self.gk.K2_basis]
            return [[cols[j][i] for j in range(len(cols))] for i in range(2 ** self.gk.m)]
        return self._get(("DK2", tuple(k)), build)

    def gram1(self) -> list:
        B = self.gk.K1_basis
        return self._get(("G1",), lambda: [[la.hdot(u, v) for v in B] for u in B])

    def adjoint_K1(self, k) -> list:
        """d*: forms -> K^1 coordinates, adjoint of d|K^1 for the flat inner product."""
        def build():
            A = self.D_on_K1(k)
            G = self.gram1()
            AH = la.conj_transpose(A)
            return la.matmul(la.inverse(G), AH)
        return self._get(("Dstar", tuple(k)), build)

    def laplacian_K1(self, k) -> list:
        """d* d on K^1 in basis coordinates (K^0 = 0)."""
        return self._get(("Lap1", tuple(k)), lambda: la.matmul(self.adjoint_K1(k), self.D_on_K1(k)))

    def _get(self, key, fn):
        v = self._cache.get(key)
        if v is None:
            v = fn()
            self._cache[key] = v
        return v

    def modes(self):
        m = self.gk.m
        M = self.mode_cap
        from itertools import product
        return [k for k in product(range(-M, M + 1), repeat=m)]


def k_complex(gk: GKOneSpinor, mode_cap: int) -> ModeHodge:
    return ModeHodge(gk, mode_cap)


def hodge_solve(gamma: FormField, hodge: ModeHodge) -> FormField:
    """Minimal-norm beta in K^1 with d beta = gamma, one Fourier mode at a time."""
    gk = hodge.gk
    B = gk.K1_basis
    out = {}
    G = hodge.gram1()
    for key, vec in gamma.blocks().items():
        hodge._check_mode(key)
        if not any(vec):
            continue
        A = hodge.D_on_K1(key)
        try:
            c = la.min_norm_solve(A, vec, len(B), G)
        except LinearAlgebraError as exc:
            raise NotExact(f"right-hand side is not d-exact on mode {key}") from exc
        beta = [ZERO] * len(vec)
        for ci, b in zip(c, B):
            if ci:
                beta = [x + ci * y for x, y in zip(beta, b)]
        out[key] = beta
    return FormField.from_blocks(gamma.dim, gamma.ring, out)


def harmonic_H1(hodge: ModeHodge, modes=None) -> dict:
    """mode -> list of K^1 forms spanning the kernel of d on K^1 at that mode."""
    gk = hodge.gk
    out = {}
    for k in (modes if modes is not None else hodge.modes()):
        k = tuple(k)
        A = hodge.D_on_K1(k)
        ker = la.nullspace(A, len(gk.K1_basis))
        forms = []
        for c in ker:
            vec = [ZERO] * (2 ** gk.m)
            for ci, b in zip(c, gk.K1_basis):
                if ci:
                    vec = [x + ci * y for x, y in zip(vec, b)]
            forms.append(FormField.from_blocks(gk.m, gk.ring, {k: vec}))
        out[k] = forms
    return out


def laplacians(gk: GKOneSpinor, k) -> dict:
    """Per-mode Laplacians of d, dbar_psi = dbar_plus + delta_minus, and the four corner operators."""
    from .structures import D_CORNERS
    D = d_matrix(gk.m, k)
    projs = gk.projectors
    N = len(D)
    corners = {}
    for name, (dp, dq) in D_CORNERS.items():
        M = [[ZERO] * N for _ in range(N)]
        for (p, q), P in projs.items():
            target = projs.get((p + dp, q + dq))
            if target is None:
                continue
            part = la.matmul(la.matmul(target, D), P)
            M = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(M, part)]
        corners[name] = M

    def lap(A):
        AH = la.conj_transpose(A)
        return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(la.matmul(A, AH), la.matmul(AH, A))]

    dbar_psi = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(corners["dbar_plus"], corners["delta_minus"])]
    out = {"d": lap(D), "dbar_psi": lap(dbar_psi)}
    for name, A in corners.items():
        out[name] = lap(A)
    return out


def laplacian_identities(gk: GKOneSpinor, k) -> dict:
    """Checks Lap_d = 2 Lap_dbar_psi = 4 Lap_corner for every corner, exactly."""
    L = laplacians(gk, k)
    two = Q(2)
    four = Q(4)
    res = {"d_eq_2_dbar_psi": la.mat_eq(L["d"], [[two * v for v in r] for r in L["dbar_psi"]])}
    for name in ("dbar_plus", "dbar_minus", "delta_plus", "delta_minus"):
        res[f"d_eq_4_{name}"] = la.mat_eq(L["d"], [[four * v for v in r] for r in L[name]])
    return res


# -- recovering b from b . psi ----------------------------------------------------

@lru_cache(maxsize=None)
def _cl2_words(m: int) -> tuple:
    return word_basis(m, 2)


class KerSolver:
    """Per-mode solver for real b in CL^2 with b.phi = 0 and b.psi = beta."""

    def __init__(self, gk: GKOneSpinor):
        self.gk = gk
        m = gk.m
        words = _cl2_words(m)
        idx = form_index(m)
        N = len(idx)
        spinors = [gk.phi, gk.phi.conj(), gk.psi, gk.psi.conj()]
        vecs = [s.vector() for s in spinors]
        cols = []
        for w in words:
            col = {}
            for block, v in enumerate(vecs):
                for r, c, s in word_matrix(m, w):
                    if v[c]:
                        val = v[c] if s == 1 else -v[c]
                        col[block * N + r] = col.get(block * N + r, ZERO) + val
            cols.append({k: v for k, v in col.items() if v})
        self.words = words
        self.N = N
        self.rows = la.columns_to_rows(cols, 4 * N)

    def solve(self, beta: FormField) -> CliffordElement:
        gk = self.gk
        m, N = gk.m, self.N
        blocks = beta.blocks()
        zero = [ZERO] * N
        done = set()
        out: dict = {}
        keys = set(blocks) | {tuple(-x for x in k) for k in blocks}
        for k in sorted(keys):
            if k in done:
                continue
            neg = tuple(-x for x in k)
            done.update({k, neg})
            bk = blocks.get(k, zero)
            bneg = blocks.get(neg, zero)
            rhs = zero + zero + list(bk) + [x.conj() for x in bneg]
            try:
                sol = la.min_norm_solve(self.rows, rhs, len(self.words))
            except LinearAlgebraError as exc:
                raise KerSolveFailure(f"no real b in ker^1 reproduces beta on mode {k}") from exc
            if k == neg:
                sol = [(x + x.conj()) * HALF for x in sol]
            for w, c in zip(self.words, sol):
                if c:
                    out.setdefault(w, {})[k] = c
                    if k != neg:
                        out[w][neg] = c.conj()
        b = CliffordElement._raw(m, gk.ring, {w: gk.ring._raw(m, v) for w, v in out.items()})
        if b.act(gk.phi) or b.act(gk.psi) != beta or not b.is_real():
            raise KerSolveFailure("recovered b fails its defining equations")
        return b



# -- the order-by-order recursion -------------------------------------------------

def obstruction_term(a: TruncSeries, b: TruncSeries, psi: FormField, k: int) -> FormField:
    """((e^{-z} d e^{z}) psi)_[k] with z = log(e^a e^b) and the order-k term of b set to 0."""
    b = b.truncate(k).with_coeff(k, CliffordElement.zero(b.dim, b.ring))
    z = cbh_log(a.truncate(k), b, k)
    return exp_action(-z, exp_action(z, psi).d())[k]


def support_budget(a: TruncSeries, order: int, mode_cap: int) -> int:
    """Input mode M0 (order-k coefficients may reach k * M0); SupportError unless order * M0 <= mode_cap."""
    M0 = max((-(-c.max_mode() // k) for k, c in enumerate(a.coeffs) if k and c), default=0)
    if order * M0 > mode_cap:
        raise SupportError(f"order {order} x input mode {M0} exceeds mode cap {mode_cap}")
    return M0


class DeformationReport:
    def __init__(self, a, b, z, psi_t, betas, obstructions, residual, ker_residual):
        self.a = a
        self.b = b
        self.z = z
        self.psi_t = psi_t
        self.betas = betas
        self.obstructions = obstructions
        self.residual = residual
        self.ker_residual = ker_residual

    @property
    def closed(self) -> bool:
        return self.residual.is_zero()

    @property
    def b_kills_phi(self) -> bool:
        return self.ker_residual.is_zero()


def solve_stability(gk: GKOneSpinor, a: TruncSeries, s: FormField | None = None, order: int | None = None,
                    mode_cap: int = 4, *, hodge: ModeHodge | None = None,
                    ker_solver: KerSolver | None = None) -> DeformationReport:
    """b(t) in ker^1 with d(e^{a} e^{b} psi) = 0 mod t^{N+1}; ``s`` shifts the order-1 solution."""
    N = a.order if order is None else order
    a = a.truncate(N)
    support_budget(a, N, mode_cap)
    hodge = hodge or ModeHodge(gk, mode_cap)
    ker_solver = ker_solver or KerSolver(gk)
    if s is not None and s:
        if not gk.in_K1(s) or s.d():
            raise ValueError("s must be a d-closed element of K^1")
    psi = gk.psi
    b = TruncSeries.zero(CliffordElement, gk.m, gk.ring, N)
    betas = [FormField.zero(gk.m, gk.ring)]
    obs = [FormField.zero(gk.m, gk.ring)]
    for k in range(1, N + 1):
        ob = obstruction_term(a, b, psi, k)
        if not gk.in_K2(ob):
            raise NotInK2(f"order-{k} obstruction term is not in K^2")
        beta = hodge_solve(-ob, hodge)
        if k == 1 and s is not None:
            beta = beta + s
        b = b.with_coeff(k, ker_solver.solve(beta))
        betas.append(beta)
        obs.append(ob)
    z = cbh_log(a, b)
    psi_t = exp_action(z, psi)
    residual = psi_t.d()
    ker_residual = exp_action(b, gk.phi) - TruncSeries.constant(gk.phi, N)
    return DeformationReport(a, b, z, psi_t, betas, obs, residual, ker_residual)


def naive_closedness(a: TruncSeries, b: TruncSeries, psi: FormField) -> TruncSeries:
    """d(e^{a} (e^{b} psi)) with both exponentials expanded separately (no log)."""
    return exp_action(a, exp_action(b, psi)).d()


def de_rham_class(psi_t: TruncSeries) -> list:
    """Per order, the mode-0 part of each coefficient (the de Rham class on the torus)."""
    zero = tuple([0] * psi_t.dim)
    out = []
    for c in psi_t.coeffs:
        out.append(FormField._raw(c.dim, c.ring, {S: c.ring._raw(c.dim, {zero: f.terms[zero]})
                                                  for S, f in c.terms.items() if zero in f.terms}))
    return out


# -- verification of the family ---------------------------------------------------

def _ad_matrix(a: CliffordElement, point) -> np.ndarray:
    """Float matrix of E -> [a, E] on degree-one elements, coefficients evaluated at ``point``."""
    m = a.dim
    M = np.zeros((2 * m, 2 * m), dtype=complex)
    for c in range(2 * m):
        img = a.commutator(CliffordElement.gen(m, c, 1, a.ring))
        for w, f in img.terms.items():
            if len(w) != 1:
                if f.eval_at(point, exact_ok=False) != 0:
                    raise ValueError("adjoint action left degree one")
                continue
            M[w[0], c] += complex(f.eval_at(point, exact_ok=False))
    return M


def _eval_series(s: TruncSeries, t0) -> CliffordElement:
    out = CliffordElement.zero(s.dim, s.ring)
    p = Q(1)
    t0 = Q.coerce(t0)
    for c in s.coeffs:
        if c:
            out = out + c.scale(p)
        p = p * t0
    return out


def verify_family(report: DeformationReport, gk: GKOneSpinor, samples=None, t_values=("1/10", "1/100"),
                  tol: float = 1e-6) -> dict:
    """(i) closedness; (ii) transported J_psi line annihilates psi_t; (iii) float GK checks."""
    from .rings import Q as _Q
    N = report.z.order
    checks = {"closed": report.closed, "b_kills_phi": report.b_kills_phi}
    ez = exp_series(report.z)
    emz = exp_series(-report.z)
    ok = True
    for E in gk.J_psi.L_basis(gk.ring):
        ES = TruncSeries.constant(E, N)
        transported = ez.mul(ES).mul(emz)
        if not transported.act(report.psi_t).is_zero():
            ok = False
    checks["annihilator_transported"] = ok
    samples = samples or [[0.0] * gk.m, [0.3, 1.1, 2.0, 5.0][: gk.m], [4.0, 0.7, 3.3, 1.9][: gk.m]]
    Jm = np.array([[complex(v) for v in r] for r in gk.J.matrix])
    Jpm = np.array([[complex(v) for v in r] for r in gk.J_psi.matrix])
    m = gk.m
    P = np.zeros((2 * m, 2 * m))
    for i in range(m):
        P[i, m + i] = P[m + i, i] = 0.5
    worst_comm = 0.0
    worst_eig = np.inf
    for t0 in t_values:
        at = _eval_series(report.a, _Q.from_json(t0) if isinstance(t0, str) else t0)
        bt = _eval_series(report.b, _Q.from_json(t0) if isinstance(t0, str) else t0)
        for x in samples:
            Aa = expm(_ad_matrix(at, x))
            Ab = expm(_ad_matrix(bt, x))
            Jt = Aa @ Jm @ np.linalg.inv(Aa)
            Jpt = Aa @ Ab @ Jpm @ np.linalg.inv(Aa @ Ab)
            worst_comm = max(worst_comm, float(np.abs(Jt @ Jpt - Jpt @ Jt).max()))
            Ghat = -Jt @ Jpt
            G = Ghat.T @ P
            Gs = (G + G.T).real / 2
            worst_eig = min(worst_eig, float(np.linalg.eigvalsh(Gs).min()))
    checks["commute_float"] = worst_comm <= tol
    checks["positive_float"] = worst_eig > -tol and worst_eig > 0
    return {"ok": all(checks.values()), "checks": checks, "max_commutator": worst_comm,
            "min_metric_eigenvalue": worst_eig, "tolerance": tol}
