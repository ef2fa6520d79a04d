"""JSON scene files: parsing literals and validating them into solver inputs.

Rationals are "p/q" strings (or ints), Gaussian rationals {"re": .., "im": ..};
ring coefficients are scalars or lists of {"mode"|"exp": [...], "coeff": ..}.
Forms are lists of {"word": "dx1^dx3", "coeff": ..} and Clifford elements
lists of {"word": "del1*dx2", "coeff": ..} (the word is a left-to-right product).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .clifford import CliffordElement, FormField, parse_gen
from .errors import GKError, SupportError
from .rings import AffinePoly, Q, TrigPoly
from .series import TruncSeries


class SceneError(GKError):
    """Diagnostic naming the offending field."""

    exit_code = 1

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


class ParseError(SceneError):
    exit_code = 2


class ValidationError(SceneError):
    exit_code = 3


DEFAULT_TOLERANCES = {"float": 1e-6, "rank": 1e-9}


# -- literals -----------------------------------------------------------------------

def parse_scalar(obj, where: str) -> Q:
    try:
        return Q.from_json(obj)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(where, f"bad scalar literal {obj!r}") from exc


def _holomorphic_poly(n: int, terms, where: str) -> AffinePoly:
    from .poisson import z
    out = AffinePoly.zero(2 * n)
    if isinstance(terms, dict):
        terms = [terms]
    for i, rec in enumerate(terms):
        exps = rec.get("exp") if isinstance(rec, dict) else None
        if not isinstance(exps, list) or len(exps) != n:
            raise ParseError(f"{where}[{i}].exp", f"expected a list of {n} exponents")
        term = AffinePoly.const(2 * n, parse_scalar(rec.get("coeff", "1"), f"{where}[{i}].coeff"))
        for j, e in enumerate(exps):
            if not isinstance(e, int) or e < 0:
                raise ParseError(f"{where}[{i}].exp", f"bad exponent {e!r}")
            for _ in range(e):
                term = term * z(n, j)
        out = out + term
    return out


def parse_coeff(obj, m: int, ring, where: str):
    """A ring element; {"z": [...]} gives a holomorphic polynomial on a chart."""
    if isinstance(obj, dict) and "z" in obj:
        if ring is not AffinePoly:
            raise ValidationError(where, "holomorphic polynomials need a chart model")
        return _holomorphic_poly(m // 2, obj["z"], where + ".z")
    try:
        return ring.from_json(m, obj)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(where, f"bad coefficient literal: {exc}") from exc


def _word_tokens(word, sep: str, where: str) -> list:
    if isinstance(word, str):
        word = word.strip()
        return [] if word in ("", "1") else [w for w in word.split(sep)]
    if isinstance(word, list) and all(isinstance(w, str) for w in word):
        return word
    raise ParseError(where, f"bad word {word!r}")


def parse_form(obj, m: int, ring, where: str) -> FormField:
    if not isinstance(obj, list):
        raise ParseError(where, "a form literal is a list of {word, coeff} records")
    out = FormField.zero(m, ring)
    for i, rec in enumerate(obj):
        w = f"{where}[{i}]"
        if not isinstance(rec, dict) or "word" not in rec:
            raise ParseError(w, "expected {word, coeff}")
        term = FormField.const(m, 1, ring)
        for tok in _word_tokens(rec["word"], "^", w + ".word"):
            try:
                a = parse_gen(m, tok)
            except (ValueError, IndexError) as exc:
                raise ParseError(w + ".word", f"bad generator {tok!r}") from exc
            if a < m:
                raise ParseError(w + ".word", f"{tok!r} is not a one-form")
            term = term.wedge(FormField.basis_form(m, (a - m,), 1, ring))
        out = out + term.scale(parse_coeff(rec.get("coeff", "1"), m, ring, w + ".coeff"))
    return out


def parse_clifford(obj, m: int, ring, where: str) -> CliffordElement:
    if not isinstance(obj, list):
        raise ParseError(where, "a Clifford literal is a list of {word, coeff} records")
    out = CliffordElement.zero(m, ring)
    for i, rec in enumerate(obj):
        w = f"{where}[{i}]"
        if not isinstance(rec, dict) or "word" not in rec:
            raise ParseError(w, "expected {word, coeff}")
        term = CliffordElement.scalar(m, 1, ring)
        for tok in _word_tokens(rec["word"], "*", w + ".word"):
            try:
                a = parse_gen(m, tok)
            except (ValueError, IndexError) as exc:
                raise ParseError(w + ".word", f"bad generator {tok!r}") from exc
            term = term.mul(CliffordElement.gen(m, a, 1, ring))
        out = out + term.scale(parse_coeff(rec.get("coeff", "1"), m, ring, w + ".coeff"))
    return out


def parse_matrix(obj, m: int, ring, where: str) -> list:
    if not isinstance(obj, list) or len(obj) != m or any(not isinstance(r, list) or len(r) != m for r in obj):
        raise ParseError(where, f"expected an {m}x{m} matrix")
    return [[parse_coeff(v, m, ring, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(obj)]


def _two_form(M, m: int, ring, where: str) -> FormField:
    from .structures import two_form
    for i in range(m):
        for j in range(m):
            if M[i][j] != -M[j][i]:
                raise ValidationError(where, f"matrix is not antisymmetric at ({i}, {j})")
    return two_form(m, M, ring)


# -- scene ---------------------------------------------------------------------------

@dataclass
class Scene:
    model: str
    m: int
    ring: type
    mode_cap: int | None
    J: object = None
    psi: FormField | None = None
    deformation: str = "none"
    a: TruncSeries | None = None
    beta: object = None
    order: int = 3
    s: list = field(default_factory=list)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    grid: list = field(default_factory=list)
    cbh: dict = field(default_factory=dict)
    majorant: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    sha256: str = ""

    @property
    def n(self) -> int:
        return self.m // 2


def _req(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(where, f"missing field {key!r}")
    return d[key]


def _int(obj, where: str, lo: int = 0) -> int:
    if not isinstance(obj, int) or isinstance(obj, bool) or obj < lo:
        raise ParseError(where, f"expected an integer >= {lo}, got {obj!r}")
    return obj


def _parse_model(raw):
    model = _req(raw, "model", "scene")
    kind = _req(model, "kind", "model")
    if kind == "torus":
        m = _int(_req(model, "m", "model"), "model.m", 1)
        cap = _int(model.get("mode_cap", 4), "model.mode_cap", 0)
        return "torus", m, TrigPoly, cap
    if kind == "chart":
        n = _int(_req(model, "n", "model"), "model.n", 1)
        return "chart", 2 * n, AffinePoly, None
    raise ParseError("model.kind", f"unknown model {kind!r}")


def _parse_structure(raw, m, ring):
    from .structures import complex_lift, induced_structure, symplectic_structure
    st = raw.get("structure", {"kind": "complex"})
    kind = _req(st, "kind", "structure")
    try:
        if kind == "complex":
            if m % 2:
                raise ValidationError("structure", "complex structure needs even dimension")
            return complex_lift(m, ring)
        if kind == "symplectic":
            omega = _two_form(parse_matrix(_req(st, "omega", "structure"), m, ring, "structure.omega"),
                              m, ring, "structure.omega")
            if omega.d():
                raise ValidationError("structure.omega", "omega is not closed")
            if not omega.is_constant():
                raise ValidationError("structure.omega", "only constant symplectic forms are supported")
            return symplectic_structure(omega)
        if kind == "pure_spinor":
            phi = parse_form(_req(st, "form", "structure"), m, ring, "structure.form")
            if not phi.is_constant():
                raise ValidationError("structure.form", "only constant pure spinors define a constant structure")
            return induced_structure(phi)
    except SceneError:
        raise
    except GKError as exc:
        raise ValidationError("structure", str(exc)) from exc
    raise ParseError("structure.kind", f"unknown structure {kind!r}")


def _parse_spinor(raw, m, ring):
    from .structures import symplectic_spinor
    sp = raw.get("spinor")
    if sp is None:
        return None
    if isinstance(sp, dict) and "omega" in sp:
        omega = _two_form(parse_matrix(sp["omega"], m, ring, "spinor.omega"), m, ring, "spinor.omega")
        if omega.d():
            raise ValidationError("spinor.omega", "omega is not closed")
        return symplectic_spinor(omega)
    psi = parse_form(sp, m, ring, "spinor")
    if psi.d():
        raise ValidationError("spinor", "psi is not closed")
    return psi


def _parse_deformation(raw, sc: Scene):
    from .brackets import in_lbar_power
    from .series import mc_lift
    de = raw.get("deformation", {"kind": "none"})
    kind = _req(de, "kind", "deformation")
    m, ring, N = sc.m, sc.ring, sc.order
    sc.deformation = kind
    zero = CliffordElement.zero(m, ring)
    if kind == "none":
        sc.a = TruncSeries.zero(CliffordElement, m, ring, N)
    elif kind == "bfield":
        B = parse_form(_req(de, "form", "deformation"), m, ring, "deformation.form")
        if any(len(S) != 2 for S in B.terms):
            raise ValidationError("deformation.form", "a B-field is a 2-form")
        if B.d():
            raise ValidationError("deformation.form", "B is not closed")
        if not B.is_real():
            raise ValidationError("deformation.form", "B is not real")
        Bc = CliffordElement.zero(m, ring)
        for (i, j), f in B.terms.items():
            Bc = Bc + CliffordElement.gen(m, m + i, 1, ring).mul(CliffordElement.gen(m, m + j, 1, ring)).scale(f)
        sc.a = TruncSeries([zero, Bc], N)
    elif kind == "epsilon_series":
        terms = _req(de, "terms", "deformation")
        if not isinstance(terms, list) or not terms:
            raise ParseError("deformation.terms", "expected a non-empty list of Clifford literals")
        eps = [zero] + [parse_clifford(t, m, ring, f"deformation.terms[{i}]") for i, t in enumerate(terms)]
        for i, e in enumerate(eps[1:]):
            if not in_lbar_power(e, sc.J, 2):
                raise ValidationError(f"deformation.terms[{i}]", "term is not in the second wedge of L-bar")
        try:
            sc.a = mc_lift(TruncSeries(eps, N), sc.J, sc.J.canonical_spinor, N)
        except GKError as exc:
            raise ValidationError("deformation", f"lift failed: {exc}") from exc
    elif kind == "beta":
        from .poisson import PoissonBivector
        if sc.model != "chart":
            raise ValidationError("deformation", "bivector deformations need a chart model")
        comps = {}
        for i, rec in enumerate(_req(de, "components", "deformation")):
            w = f"deformation.components[{i}]"
            j, k = _int(_req(rec, "j", w), w + ".j"), _int(_req(rec, "k", w), w + ".k")
            comps[(j, k)] = parse_coeff(rec.get("coeff", "1"), m, ring, w + ".coeff")
        try:
            sc.beta = PoissonBivector(sc.n, comps)
        except ValueError as exc:
            raise ValidationError("deformation.components", str(exc)) from exc
    else:
        raise ParseError("deformation.kind", f"unknown deformation {kind!r}")
    if sc.a is not None and sc.model == "torus":
        from .stability import support_budget
        try:
            support_budget(sc.a, N, sc.mode_cap)
        except SupportError as exc:
            raise ValidationError("deformation", str(exc)) from exc


def _parse_grid(raw, sc: Scene):
    g = raw.get("grid")
    if g is None:
        return []
    if "points" in g:
        pts = []
        for i, p in enumerate(g["points"]):
            if not isinstance(p, list) or len(p) != sc.m:
                raise ParseError(f"grid.points[{i}]", f"expected {sc.m} coordinates")
            pts.append(tuple(Fraction(str(x)) for x in p))
        return pts
    lat = _req(g, "lattice", "grid")
    lo, hi = Fraction(str(_req(lat, "lo", "grid.lattice"))), Fraction(str(_req(lat, "hi", "grid.lattice")))
    steps = _int(_req(lat, "steps", "grid.lattice"), "grid.lattice.steps", 2)
    axis = [lo + (hi - lo) * Fraction(i, steps - 1) for i in range(steps)]
    pts = [()]
    for _ in range(sc.m):
        pts = [p + (x,) for p in pts for x in axis]
    return pts


def load_scene(raw: dict, sha256: str = "") -> Scene:
    if not isinstance(raw, dict):
        raise ParseError("scene", "top level must be a JSON object")
    model, m, ring, cap = _parse_model(raw)
    sc = Scene(model=model, m=m, ring=ring, mode_cap=cap, raw=raw, sha256=sha256)
    sc.order = _int(raw.get("order", 3), "order", 1)
    sc.seed = _int(raw.get("seed", 0), "seed")
    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ParseError("tolerances", "expected an object")
    for k, v in tol.items():
        if not isinstance(v, (int, float)) or v <= 0:
            raise ParseError(f"tolerances.{k}", f"expected a positive number, got {v!r}")
        sc.tolerances[k] = float(v)
    sc.J = _parse_structure(raw, m, ring)
    sc.psi = _parse_spinor(raw, m, ring)
    sc.s = [parse_scalar(c, f"s[{i}]") for i, c in enumerate(raw.get("s", []))]
    _parse_deformation(raw, sc)
    sc.grid = _parse_grid(raw, sc)
    sc.cbh = raw.get("cbh", {})
    sc.majorant = raw.get("majorant", {})
    return sc


def read_scene(path) -> tuple:
    """(raw JSON object, sha256 of the file bytes)."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ParseError(str(path), f"cannot read scene: {exc.strerror}") from exc
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(str(path), f"invalid JSON: {exc}") from exc
    return raw, hashlib.sha256(data).hexdigest()


def parse_scene(path) -> Scene:
    raw, sha = read_scene(path)
    return load_scene(raw, sha)
