"""Majorant series M(t) = sum c^{v-1} t^v / (16 v^2) and exact coefficientwise checks.

Norms of solver output use the surrogate |x| = sum over words and modes of
|re| + |im|; certificates are statements about that surrogate only.
"""
from __future__ import annotations

from fractions import Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def majorant_coeffs(c, N: int) -> list:
    """[M_0, ..., M_N] with M_0 = 0."""
    c = _frac(c)
    return [Fraction(0)] + [c ** (v - 1) / (16 * v * v) for v in range(1, N + 1)]


def series_square(M: list) -> list:
    N = len(M) - 1
    return [sum((M[i] * M[v - i] for i in range(v + 1)), Fraction(0)) for v in range(N + 1)]


def series_exp(M: list) -> list:
    """Coefficients of e^{M(t)} for a scalar series with M_0 = 0 (v E_v = sum j M_j E_{v-j})."""
    N = len(M) - 1
    E = [Fraction(1)] + [Fraction(0)] * N
    for v in range(1, N + 1):
        E[v] = sum((j * M[j] * E[v - j] for j in range(1, v + 1)), Fraction(0)) / v
    return E


def exp_upper_bound(lam, terms: int = 30) -> Fraction:
    """Rational upper bound for e^lam (lam >= 0): truncated series plus a geometric tail bound."""
    lam = _frac(lam)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    K = max(terms, int(2 * lam) + 2)
    s = Fraction(0)
    term = Fraction(1)
    for j in range(K + 1):
        s += term
        term = term * lam / (j + 1)
    # term is now lam^{K+1}/(K+1)!; the tail is at most term / (1 - lam/(K+2))
    return s + term / (1 - lam / (K + 2))


def exp_lower_bound(lam, terms: int = 30) -> Fraction:
    lam = _frac(lam)
    s = Fraction(0)
    term = Fraction(1)
    for j in range(terms + 1):
        s += term
        term = term * lam / (j + 1)
    return s


def check_square_bound(c, N: int) -> dict:
    """M^2 << (1/c) M coefficientwise up to order N (exact)."""
    c = _frac(c)
    M = majorant_coeffs(c, N)
    M2 = series_square(M)
    failures = [v for v in range(1, N + 1) if M2[v] > M[v] / c]
    return {"ok": not failures, "order": N, "c": str(c), "failures": failures}


def check_exp_bound(c, lam, N: int) -> dict:
    """(e^M - 1)_v <= ((e^lam_ub - 1)/lam) M_v for 1 <= v <= N (exact)."""
    c, lam = _frac(c), _frac(lam)
    M = majorant_coeffs(c, N)
    E = series_exp(M)
    eub = exp_upper_bound(lam)
    factor = (eub - 1) / lam
    failures = [v for v in range(1, N + 1) if E[v] > factor * M[v]]
    return {"ok": not failures, "order": N, "c": str(c), "lambda": str(lam), "exp_upper_bound": str(eub),
            "failures": failures}


def _l1(x) -> Fraction:
    v = x.l1()
    return Fraction(int(v.numerator), int(v.denominator)) if hasattr(v, "numerator") else Fraction(v)


def surrogate_norms(series) -> list:
    """Surrogate norm of each plain coefficient (equal to |x_k| / k! in factorial normalization)."""
    return [_l1(cf) for cf in series.coeffs]


def minimal_constant(norms: list, M: list) -> Fraction:
    return max((norms[k] / M[k] for k in range(1, len(norms))), default=Fraction(0))


def majorant_certificate(c, lam, K1, K2, N: int, report=None, *, square_order: int | None = None) -> dict:
    """Exact majorant checks and surrogate-norm tracking of a solver report."""
    c, lam, K1, K2 = _frac(c), _frac(lam), _frac(K1), _frac(K2)
    cert = {
        "norm": "surrogate-l1",
        "square_bound": check_square_bound(c, square_order or N),
        "exp_bound": check_exp_bound(c, lam, square_order or N),
    }
    if report is not None:
        M = majorant_coeffs(c, N)
        na = surrogate_norms(report.a.truncate(N))
        nb = surrogate_norms(report.b.truncate(N))
        nz = surrogate_norms(report.z.truncate(N))
        K1_min = minimal_constant(na, M)
        K2_min = minimal_constant(nb, M)
        z_ok = all(nz[k] <= M[k] for k in range(1, N + 1))
        cert["tracking"] = {
            "K1_min": str(K1_min),
            "K2_min": str(K2_min),
            "a_bounded": K1_min <= K1,
            "b_bounded": K2_min <= K2,
            "z_bounded": z_ok,
            "K1_plus_K2_lt_1": K1_min + K2_min < 1,
            "given_K1_plus_K2_lt_1": K1 + K2 < 1,
            "norms": {"a": [str(x) for x in na], "b": [str(x) for x in nb], "z": [str(x) for x in nz]},
        }
        tr = cert["tracking"]
        tracking_ok = tr["a_bounded"] and tr["b_bounded"] and tr["z_bounded"] and tr["K1_plus_K2_lt_1"]
    else:
        tracking_ok = True
    cert["ok"] = cert["square_bound"]["ok"] and cert["exp_bound"]["ok"] and tracking_ok
    return cert
