"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; the
conftest prints the collected lines in the terminal summary.
"""
from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from functools import lru_cache
from itertools import product

from gkdeform.brackets import (courant_closed, integrability_witness, lie_algebroid_d, maurer_cartan_residual,
                               mc_projection, schouten, transport)
from gkdeform.clifford import CliffordElement, FormField, exp_nilpotent
from gkdeform.errors import NotIntegrable, NotNondegenerate, NotPure
from gkdeform.majorant import check_exp_bound, check_square_bound, majorant_certificate
from gkdeform.poisson import PoissonBivector, poisson_spinor, type_stratify, z
from gkdeform.randgen import rand_lbar2, rand_q, rand_trig
from gkdeform.rings import AffinePoly, Q, TrigPoly
from gkdeform.series import (TruncSeries, cbh_closed_form, cbh_log, exp_action, in_canonical_line,
                             lift_residuals, mc_lift)
from gkdeform.stability import (KerSolver, ModeHodge, de_rham_class, flat_gk_torus, harmonic_H1, hodge_solve,
                                laplacian_identities, naive_closedness, solve_stability)
from gkdeform.structures import (annihilator, complex_lift, holomorphic_volume, symplectic_spinor, two_form)
from gkdeform.suites import algebra_suite, cbh_reexponentiation

RESULTS: dict = {}


def _run(n: int, title: str, limit: float | None, body):
    t0 = time.perf_counter()
    detail, ok = "", True
    try:
        detail = body() or ""
    except AssertionError as exc:
        ok, detail = False, f"assertion: {exc}"
    dt = time.perf_counter() - t0
    if ok and limit is not None and dt >= limit:
        ok, detail = False, f"runtime {dt:.1f}s exceeds {limit:.0f}s"
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title} [{dt:.1f}s] {detail}".rstrip()
    RESULTS[n] = line
    print(line)
    assert ok, line


# -- 1 ---------------------------------------------------------------------------

def test_criterion_01_algebra_suite():
    def body():
        res = algebra_suite(seed=2024, cases=1000, dims=(2, 4), max_mode=2)
        bad = {k: len(v["failures"]) for k, v in res.items() if v["failures"]}
        assert not bad, bad
        assert all(v["cases"] == 1000 for v in res.values())
        return f"{len(res)} suites x 1000 cases, 0 failures"
    _run(1, "Clifford relation, spin-module axiom, d^2 = 0", 60, body)


# -- 2 ---------------------------------------------------------------------------

def _closed_bfield(rng, m):
    theta = FormField.zero(m)
    for _ in range(2):
        theta = theta + FormField.basis_form(m, (rng.randrange(m),)).scale(rand_trig(rng, m, 1, 1))
    theta = theta + theta.conj()
    B = theta.d()
    i, j = sorted(rng.sample(range(m), 2))
    B = B + FormField.basis_form(m, (i, j)).scale(rand_q(rng, complex_=False))
    Bc = CliffordElement.zero(m)
    for (a, b), f in B.terms.items():
        Bc = Bc + CliffordElement.gen(m, m + a).mul(CliffordElement.gen(m, m + b)).scale(f)
    return B, Bc


def _random_integrable(rng, m=4):
    """(phi, annihilator basis): prefactor * e^B e^beta phi0 with phi0 = e^{i omega} or dz1 ^ dz2."""
    while True:
        if rng.random() < 0.5:
            phi0 = holomorphic_volume(m)
        else:
            O = [[Q(0)] * m for _ in range(m)]
            for i in range(m):
                for j in range(i + 1, m):
                    v = Q(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
                    O[i][j], O[j][i] = v, -v
            phi0 = symplectic_spinor(two_form(m, O))
        beta = CliffordElement.zero(m)
        for _ in range(rng.randint(0, 2)):
            i, j = rng.sample(range(m), 2)
            beta = beta + CliffordElement.gen(m, j).mul(CliffordElement.gen(m, i)).scale(rand_q(rng, complex_=False))
        _, Bc = _closed_bfield(rng, m)
        phi1 = exp_nilpotent(beta).act(phi0)
        try:
            data = annihilator(phi1)
        except (NotNondegenerate, NotPure):
            continue
        pref = TrigPoly.mode(m, [rng.randint(-1, 1) for _ in range(m)], 1)
        phi = exp_nilpotent(Bc).act(phi1).scale(pref)
        return phi, transport(exp_nilpotent(Bc), exp_nilpotent(-Bc), data.annihilator_basis)


def test_criterion_02_integrability_both_directions():
    def body():
        rng = random.Random(7)
        m = 4
        for i in range(50):
            phi, basis = _random_integrable(rng, m)
            E = integrability_witness(phi)
            assert not (E.act(phi) + phi.d()), f"witness fails on sample {i}"
            assert courant_closed(basis, phi), f"annihilator not Courant-closed on sample {i}"
        sin3 = TrigPoly.exp_i(m, 2, 1, Q(0, "-1/4")) + TrigPoly.exp_i(m, 2, -1, Q(0, "1/4"))
        omega_f = FormField.basis_form(m, (0, 1)).scale(TrigPoly.const(m, 1) + sin3) + FormField.basis_form(m, (2, 3))
        try:
            integrability_witness(symplectic_spinor(omega_f))
        except NotIntegrable:
            return "50 integrable samples witnessed and Courant-closed; e^{i omega_f} rejected"
        raise AssertionError("non-integrable spinor was accepted")
    _run(2, "integrability witness both directions", 120, body)


# -- 3 ---------------------------------------------------------------------------

def test_criterion_03_mc_two_paths():
    def body():
        J = complex_lift(4)
        phi = J.canonical_spinor
        rng = random.Random(3)
        nonzero = 0
        for i in range(25):
            eps = rand_lbar2(rng, J, max_mode=1, terms=3)
            res = maurer_cartan_residual(eps, J, phi, check_paths=True)  # PathMismatch if Schouten paths differ
            assert mc_projection(eps, phi, J) == res.act(phi), f"projection mismatch on sample {i}"
            schouten(eps, eps, J, check_paths=True)
            nonzero += bool(res)
        return f"25 samples agree ({nonzero} with nonzero residual)"
    _run(3, "MC projection equals (d_L eps + [eps,eps]/2) phi; Schouten paths agree", 300, body)


# -- 4 ---------------------------------------------------------------------------

def test_criterion_04_lift():
    def body():
        J = complex_lift(4)
        phi = J.canonical_spinor
        rng = random.Random(4)
        zero = CliffordElement.zero(4)
        for mm in (0, 1):
            beta = rand_lbar2(rng, J, max_mode=mm, terms=3)
            e2 = rand_lbar2(rng, J, max_mode=mm, terms=2)
            eps = TruncSeries([zero, beta, e2, zero, zero], 4)
            a = mc_lift(eps, J, phi, 4)
            assert all(in_canonical_line(r, J) for r in lift_residuals(eps, a, phi)), "congruence fails"
            assert a[1] == beta + beta.conj(), "a_1 != eps_1 + conj(eps_1)"
            assert a.conj() == a, "lift is not real"
        return "orders 1..4, constant and mode-1 inputs"
    _run(4, "lift congruence, a_1 = eps_1 + conj(eps_1), reality", None, body)


# -- 5 ---------------------------------------------------------------------------

def test_criterion_05_cbh():
    def body():
        res = cbh_reexponentiation(random.Random(5), 4, 100, order=4)
        assert not res["failures"], res["failures"][:1]
        rng = random.Random(55)
        from gkdeform.randgen import rand_clifford
        zero = CliffordElement.zero(4)
        for _ in range(20):
            a1 = rand_clifford(rng, 4, max_len=2, max_mode=0)
            b1 = rand_clifford(rng, 4, max_len=2, max_mode=0)
            zs = cbh_log(TruncSeries([zero, a1], 4), TruncSeries([zero, b1], 4))
            closed = cbh_closed_form(a1, b1, 3)
            assert zs[1] == closed[0] and zs[2] == closed[1] and zs[3] == closed[2], "closed form mismatch"
            ab = a1.commutator(b1)
            assert zs[2] == ab.scale(Q("1/2"))
            assert zs[3] == a1.commutator(ab).scale(Q("1/12")) - b1.commutator(ab).scale(Q("1/12"))
        return "100 pairs re-exponentiate to order 4; orders 2, 3 match nested commutators"
    _run(5, "CBH re-exponentiation and low-order expansion", None, body)


# -- 6 and 7 ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _stability_runs():
    t0 = time.perf_counter()
    gk = flat_gk_torus()
    J, m = gk.J, gk.m
    X = J.Lbar_basis()
    eps1 = (X[0].mul(X[3]).scale(TrigPoly.exp_i(m, 2, 1, Q("1/10")))
            + X[2].mul(X[3]).scale(TrigPoly.exp_i(m, 0, -1, Q("1/5"))))
    assert not lie_algebroid_d(eps1, gk.phi, J) and not schouten(eps1, eps1, J), "input is not Maurer-Cartan"
    eps = TruncSeries([CliffordElement.zero(m), eps1], 3)
    a = mc_lift(eps, J, gk.phi, 3)
    hodge = ModeHodge(gk, 4)
    ks = KerSolver(gk)
    h = harmonic_H1(hodge, [(0, 0, 0, 0)])[(0, 0, 0, 0)]
    s1 = h[0].scale(Q("1/2"))
    s2 = h[1].scale(Q(2)) - h[2]
    reps = [solve_stability(gk, a, s, 3, 4, hodge=hodge, ker_solver=ks) for s in (None, s1, s2)]
    return gk, a, hodge, (s1, s2), reps, time.perf_counter() - t0


def test_criterion_06_stability_end_to_end():
    def body():
        gk, a, _, (s1, s2), reps, _ = _stability_runs()
        assert max(c.max_mode() for c in a.coeffs) == 1
        for r in reps:
            assert r.closed, "d(psi_t) != 0 mod t^4"
            assert all(not bk.act(gk.phi) for bk in r.b.coeffs), "b_k . phi != 0"
            oracle = exp_action(a, exp_action(r.b, gk.psi))
            assert all(x == y for x, y in zip(oracle.coeffs, r.psi_t.coeffs)), "no-log oracle disagrees"
            assert naive_closedness(a, r.b, gk.psi).is_zero()
        diff = de_rham_class(reps[1].psi_t)[1] - de_rham_class(reps[2].psi_t)[1]
        assert s1 != s2 and diff == s1 - s2, "order-1 classes do not differ by s1 - s2"
        return "3 runs closed mod t^4, b kills phi, oracle agrees, class shift = s1 - s2"
    _run(6, "stability recursion on the flat T^4 model", 600, body)


def test_criterion_07_obstruction_shadow():
    def body():
        gk, _, hodge, _, reps, _ = _stability_runs()
        count = 0
        for r in reps:
            for k, ob in enumerate(r.obstructions[1:], start=1):
                assert gk.in_K2(ob), f"order-{k} obstruction not in K^2"
                beta = hodge_solve(-ob, hodge)  # raises NotExact on failure
                assert gk.in_K1(beta)
                count += 1
        return f"{count} obstruction terms in K^2 and exact"
    _run(7, "obstruction terms lie in K^2 and are exact per mode", None, body)


# -- 8 ---------------------------------------------------------------------------

def test_criterion_08_majorant():
    def body():
        for c in ("1/4", "1", "4"):
            assert check_square_bound(c, 200)["ok"], f"square bound fails for c = {c}"
            assert check_exp_bound(c, 1 / Fraction(c), 200)["ok"], f"exp bound fails for c = {c}"
        gk = flat_gk_torus()
        J, m = gk.J, gk.m
        zero = CliffordElement.zero(m)
        trivial = solve_stability(gk, TruncSeries.zero(CliffordElement, m, gk.ring, 3), None, 3, 4)
        X = J.Lbar_basis()
        beta = X[0].mul(X[1]).scale(Q("1/1000")) + X[2].mul(X[3]).scale(Q("1/1000"))
        a = mc_lift(TruncSeries([zero, beta], 3), J, gk.phi, 3)
        const = solve_stability(gk, a, None, 3, 4)
        out = []
        for name, rep in (("trivial", trivial), ("constant-beta", const)):
            cert = majorant_certificate(1, 1, "1/2", "1/2", 3, rep, square_order=50)
            tr = cert["tracking"]
            assert cert["ok"] and tr["K1_plus_K2_lt_1"] and tr["z_bounded"], (name, tr)
            out.append(f"{name}: K1={tr['K1_min']} K2={tr['K2_min']}")
        return "; ".join(out)
    _run(8, "majorant certificates", 60, body)


# -- 9 ---------------------------------------------------------------------------

def _random_cubic(rng, n=2):
    """(f, r): f = (z1 - r) q + ... with a rational root r of the first factor, so f vanishes on z1 = r."""
    r = Q(Fraction(rng.randint(-4, 4), 2))
    q = AffinePoly.zero(2 * n)
    for e in ((2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0)):
        c = rand_q(rng, span=2, den=3)
        term = AffinePoly.const(2 * n, c)
        for j, k in enumerate(e):
            for _ in range(k):
                term = term * z(n, j)
        q = q + term
    lead = z(n, 0) * z(n, 0) * z(n, 1)  # keep a genuine cubic term
    f = (z(n, 0) - AffinePoly.const(2 * n, r)) * (q + lead)
    return f, r


def test_criterion_09_chart_example():
    def body():
        rng = random.Random(9)
        n, m = 2, 4
        omega = holomorphic_volume(m, AffinePoly)
        zero_pts = total = 0
        for _ in range(10):
            f, r = _random_cubic(rng, n)
            beta = PoissonBivector.single(n, 0, 1, f)
            ps = poisson_spinor(beta, omega)
            assert ps.coeffs[0] == omega and ps.coeffs[1] == FormField.const(m, 1, AffinePoly).scale(f)
            assert all(not c for c in ps.coeffs[2:])
            rx = Fraction(int(r.re.numerator), int(r.re.denominator))
            on, off = set(), set()
            while len(on) < 500:
                on.add((rx, Fraction(0), Fraction(rng.randint(-9, 9), rng.randint(1, 4)),
                        Fraction(rng.randint(-9, 9), rng.randint(1, 4))))
            while len(off - on) < 500:
                off.add(tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(m)))
            grid = sorted(on) + sorted(off - on)
            types = type_stratify(beta, grid, omega)  # compares with the spinor type at every exact point
            for p, ty in types.items():
                expect = 2 if not f.eval_at(p) else 0
                assert ty == expect, f"type {ty} at {p}, expected {expect}"
                zero_pts += expect == 2
            total += len(types)
            floats = type_stratify(beta, [(0.31, 0.17, -0.42, 0.9)], omega)
            assert list(floats.values()) == [n - 2 * beta.rank_at((0.31, 0.17, -0.42, 0.9))]
        assert zero_pts and zero_pts < total
        return f"{total} grid points, {zero_pts} on the zero locus"
    _run(9, "e^{t beta} chart spinor and type stratification", 120, body)


# -- 10 -------------------------------------------------------------------------------

def test_criterion_10_laplacians():
    def body():
        gk = flat_gk_torus()
        bad = []
        for k in product(range(-2, 3), repeat=4):
            if not all(laplacian_identities(gk, k).values()):
                bad.append(k)
        assert not bad, f"flat-adjoint discrepancy at modes {bad[:5]}"
        return "625 modes, all exact"
    _run(10, "Laplacian identities on the flat T^4 model", None, body)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
