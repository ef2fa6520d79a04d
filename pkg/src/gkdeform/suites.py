"""Randomized exact identity suites shared by the CLI and the tests.

Each suite returns {"cases": int, "failures": [counterexample, ...]}.
"""
from __future__ import annotations

import random

from .clifford import CliffordElement, pairing
from .randgen import rand_clifford, rand_degree_one, rand_form
from .rings import TrigPoly
from .series import TruncSeries, cbh_log, exp_series


def _result(cases, failures):
    return {"cases": cases, "failures": failures}


def clifford_relation(rng: random.Random, m: int, cases: int, max_mode: int = 2, ring=TrigPoly) -> dict:
    """u v + v u = 2 <u, v> for degree-one u, v with function coefficients."""
    fails = []
    for i in range(cases):
        u = rand_degree_one(rng, m, ring, max_mode)
        v = rand_degree_one(rng, m, ring, max_mode)
        lhs = u.anticommutator(v)
        rhs = CliffordElement.scalar(m, 1, ring).scale(pairing(u, v).scale(2))
        if lhs != rhs:
            fails.append({"case": i, "u": u.to_json(), "v": v.to_json()})
    return _result(cases, fails)


def spin_module(rng: random.Random, m: int, cases: int, max_mode: int = 2, ring=TrigPoly) -> dict:
    """(a b) . phi = a . (b . phi) and u . (u . phi) = <u, u> phi."""
    fails = []
    for i in range(cases):
        a = rand_clifford(rng, m, ring, max_mode=max_mode)
        b = rand_clifford(rng, m, ring, max_mode=max_mode)
        u = rand_degree_one(rng, m, ring, max_mode)
        phi = rand_form(rng, m, ring, max_mode=max_mode)
        ok = a.mul(b).act(phi) == a.act(b.act(phi))
        ok = ok and u.act(u.act(phi)) == phi.scale(pairing(u, u))
        if not ok:
            fails.append({"case": i, "a": a.to_json(), "b": b.to_json(), "phi": phi.to_json()})
    return _result(cases, fails)


def d_squared(rng: random.Random, m: int, cases: int, max_mode: int = 2, ring=TrigPoly) -> dict:
    fails = []
    for i in range(cases):
        phi = rand_form(rng, m, ring, max_mode=max_mode)
        if phi.d().d():
            fails.append({"case": i, "phi": phi.to_json()})
    return _result(cases, fails)


def cbh_reexponentiation(rng: random.Random, m: int, cases: int, order: int = 4) -> dict:
    """exp(log(e^a e^b)) = e^a e^b mod t^{N+1} for random constant-coefficient series."""
    fails = []
    for i in range(cases):
        zero = CliffordElement.zero(m)
        a = TruncSeries([zero] + [rand_clifford(rng, m, max_len=2, terms=1, max_mode=0) for _ in range(2)], order)
        b = TruncSeries([zero] + [rand_clifford(rng, m, max_len=2, terms=1, max_mode=0) for _ in range(2)], order)
        z = cbh_log(a, b)
        if exp_series(z) != exp_series(a).mul(exp_series(b)):
            fails.append({"case": i})
    return _result(cases, fails)


def algebra_suite(seed: int, cases: int, dims=(2, 4), max_mode: int = 2) -> dict:
    """All three algebra identities at each dimension, in a stable order."""
    out = {}
    for m in dims:
        for name, fn in (("clifford_relation", clifford_relation), ("spin_module", spin_module),
                         ("d_squared", d_squared)):
            rng = random.Random(f"{seed}:{name}:{m}")
            out[f"{name}[m={m}]"] = fn(rng, m, cases, max_mode)
    return out
