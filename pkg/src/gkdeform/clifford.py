"""Clifford algebra of T+T* and its spin representation on forms.

Generators are numbered ``0..m-1`` for the coordinate vector fields
``del_1..del_m`` and ``m..2m-1`` for the coordinate one-forms
``dx^1..dx^m``.  The pairing is ``<v+a, w+b> = (a(w) + b(v))/2``, so the
only non-zero relations are ``del_i dx^i + dx^i del_i = 1``; every generator
squares to zero.

A ``CliffordElement`` is stored in the normal-ordered monomial basis: a word
is a strictly increasing tuple of generator indices, and products are
straightened on the fly (results cached per word pair).  A ``FormField`` is a
map from increasing index tuples ``S`` (meaning ``dx^S``) to coefficients.
Both carry a coefficient ring class (TrigPoly or AffinePoly) and the real
dimension ``m``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .errors import DegreeError, MixedRing
from .rings import Q, ZERO, TrigPoly, _Poly

HALF = Q(Fraction(1, 2))


def gen_name(m: int, a: int) -> str:
    return f"del{a + 1}" if a < m else f"dx{a - m + 1}"


def parse_gen(m: int, name: str) -> int:
    name = name.strip()
    if name.startswith("del"):
        i = int(name[3:]) - 1
        off = 0
    elif name.startswith("dx"):
        i = int(name[2:]) - 1
        off = m
    else:
        raise ValueError(f"unknown generator {name!r}")
    if not 0 <= i < m:
        raise ValueError(f"generator {name!r} out of range for dim {m}")
    return off + i


def _paired(m: int, a: int, b: int) -> bool:
    return abs(a - b) == m


@lru_cache(maxsize=None)
def _word_times_gen(m: int, w: tuple, g: int) -> tuple:
    r = len(w)
    p = 0
    while p < r and w[p] <= g:
        p += 1
    out = []
    for j in range(p, r):
        if _paired(m, w[j], g):
            out.append((w[:j] + w[j + 1:], -1 if (r - 1 - j) % 2 else 1))
    if not (p > 0 and w[p - 1] == g):
        out.append((w[:p] + (g,) + w[p:], -1 if (r - p) % 2 else 1))
    return tuple(out)


@lru_cache(maxsize=None)
def word_mul(m: int, w1: tuple, w2: tuple) -> tuple:
    """Normal-ordered expansion of the product of two words."""
    cur = {w1: 1}
    for g in w2:
        nxt: dict = {}
        for w, s in cur.items():
            for w2_, s2 in _word_times_gen(m, w, g):
                nxt[w2_] = nxt.get(w2_, 0) + s * s2
        cur = {w: s for w, s in nxt.items() if s}
    return tuple(cur.items())


@lru_cache(maxsize=None)
def _gen_on_subset(m: int, a: int, S: tuple):
    if a < m:
        if a not in S:
            return None
        pos = S.index(a)
        return S[:pos] + S[pos + 1:], (-1 if pos % 2 else 1)
    i = a - m
    if i in S:
        return None
    pos = 0
    while pos < len(S) and S[pos] < i:
        pos += 1
    return S[:pos] + (i,) + S[pos:], (-1 if pos % 2 else 1)


@lru_cache(maxsize=None)
def word_on_subset(m: int, w: tuple, S: tuple):
    """Spin action of a word on dx^S: (S', sign) or None."""
    sign = 1
    for a in reversed(w):
        r = _gen_on_subset(m, a, S)
        if r is None:
            return None
        S, s = r
        sign *= s
    return S, sign


@lru_cache(maxsize=None)
def form_basis(m: int) -> tuple:
    return tuple(S for k in range(m + 1) for S in combinations(range(m), k))


@lru_cache(maxsize=None)
def form_index(m: int) -> dict:
    return {S: i for i, S in enumerate(form_basis(m))}


@lru_cache(maxsize=None)
def word_basis(m: int, max_len: int | None = None) -> tuple:
    top = 2 * m if max_len is None else max_len
    return tuple(w for k in range(top + 1) for w in combinations(range(2 * m), k))


def _acc(d: dict, k, v):
    w = d.get(k)
    d[k] = v if w is None else w + v


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


def _signed(c, s: int):
    if s == 1:
        return c
    if s == -1:
        return -c
    return c.scale(s)


class _Field:
    __slots__ = ("dim", "ring", "terms")

    def __init__(self, dim: int, ring=TrigPoly, terms=None):
        self.dim = dim
        self.ring = ring
        self.terms = {}
        if terms:
            for k, v in terms.items():
                v = self._coerce(v)
                if v:
                    self.terms[tuple(k)] = v

    @classmethod
    def _raw(cls, dim, ring, terms):
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.ring = ring
        obj.terms = terms
        return obj

    def _coerce(self, v):
        if isinstance(v, _Poly):
            if type(v) is not self.ring or v.dim != self.dim:
                raise MixedRing(f"coefficient ring {v.kind}({v.dim}) does not match {self.ring.kind}({self.dim})")
            return v
        return self.ring.const(self.dim, v)

    def _check(self, o):
        if type(o) is not type(self) or o.dim != self.dim or o.ring is not self.ring:
            raise MixedRing("operands live over different rings or dimensions")

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, o):
        self._check(o)
        t = dict(self.terms)
        for k, v in o.terms.items():
            _acc(t, k, v)
        return type(self)._raw(self.dim, self.ring, _clean(t))

    def __neg__(self):
        return type(self)._raw(self.dim, self.ring, {k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        """Multiply by a scalar or by a coefficient-ring function."""
        if isinstance(c, _Poly):
            c = self._coerce(c)
            return type(self)._raw(self.dim, self.ring, _clean({k: c * v for k, v in self.terms.items()}))
        c = Q.coerce(c)
        if not c:
            return type(self)._raw(self.dim, self.ring, {})
        return type(self)._raw(self.dim, self.ring, {k: v.scale(c) for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def conj(self):
        return type(self)._raw(self.dim, self.ring, {k: v.conj() for k, v in self.terms.items()})

    def real_part(self):
        return (self + self.conj()).scale(HALF)

    def is_real(self) -> bool:
        return self == self.conj()

    def __eq__(self, o):
        if type(o) is not type(self):
            return NotImplemented
        return self.dim == o.dim and self.ring is o.ring and self.terms == o.terms

    def __hash__(self):
        return hash((type(self).__name__, self.dim, frozenset(self.terms.items())))

    def map_coeffs(self, f):
        return type(self)._raw(self.dim, self.ring, _clean({k: f(v) for k, v in self.terms.items()}))

    def is_constant(self) -> bool:
        return all(v.is_constant() for v in self.terms.values())

    def eval_at_zero(self) -> dict:
        return {k: v.eval_at_zero() for k, v in self.terms.items() if v.eval_at_zero()}

    def eval_at(self, point) -> dict:
        return {k: v.eval_at(point) for k, v in self.terms.items()}

    def constant_part(self):
        """Keep only the constant (mode 0 / degree 0) term of every coefficient."""
        return type(self)._raw(self.dim, self.ring, _clean({k: self.ring.const(self.dim, v.constant_term())
                                                            for k, v in self.terms.items()}))

    def blocks(self, basis_index: dict) -> dict:
        """Split by ring key (mode or exponent) into dense vectors over ``basis_index``."""
        n = len(basis_index)
        out: dict = {}
        for k, v in self.terms.items():
            i = basis_index[k]
            for key, c in v.terms.items():
                vec = out.get(key)
                if vec is None:
                    vec = out[key] = [ZERO] * n
                vec[i] = c
        return out

    @classmethod
    def _from_blocks(cls, dim, ring, basis, blocks: dict):
        t: dict = {}
        for key, vec in blocks.items():
            for i, c in enumerate(vec):
                if c:
                    t.setdefault(basis[i], {})[key] = c
        return cls._raw(dim, ring, {k: ring._raw(dim, v) for k, v in t.items()})

    def l1(self):
        """Surrogate norm: sum over words/forms and modes of |re| + |im|."""
        s = 0
        for v in self.terms.values():
            s += v.l1()
        return s

    def max_mode(self) -> int:
        return max((v.max_mode() for v in self.terms.values()), default=0)

    def keys(self):
        return sorted(self.terms)


class FormField(_Field):
    """Element of the complexified exterior algebra with ring coefficients."""

    __slots__ = ()

    @classmethod
    def zero(cls, dim, ring=TrigPoly):
        return cls._raw(dim, ring, {})

    @classmethod
    def const(cls, dim, c=1, ring=TrigPoly):
        return cls(dim, ring, {(): c})

    @classmethod
    def basis_form(cls, dim, S, c=1, ring=TrigPoly):
        return cls(dim, ring, {tuple(sorted(S)): c})

    def degree_part(self, p: int) -> "FormField":
        return FormField._raw(self.dim, self.ring, {k: v for k, v in self.terms.items() if len(k) == p})

    def degrees(self) -> list:
        return sorted({len(k) for k in self.terms})

    def __mul__(self, o):
        if isinstance(o, FormField):
            return self.wedge(o)
        return self.scale(o)

    def wedge(self, o: "FormField") -> "FormField":
        self._check(o)
        m = self.dim
        t: dict = {}
        for S, c in self.terms.items():
            w = tuple(m + i for i in S)
            for T, f in o.terms.items():
                r = word_on_subset(m, w, T)
                if r is not None:
                    _acc(t, r[0], _signed(c * f, r[1]))
        return FormField._raw(m, self.ring, _clean(t))

    def d(self) -> "FormField":
        """Exterior derivative."""
        m = self.dim
        t: dict = {}
        for S, c in self.terms.items():
            for j in range(m):
                if j in S:
                    continue
                dc = c.deriv(j)
                if not dc:
                    continue
                pos = sum(1 for i in S if i < j)
                T = tuple(sorted(S + (j,)))
                _acc(t, T, -dc if pos % 2 else dc)
        return FormField._raw(m, self.ring, _clean(t))

    def vector(self) -> list:
        """Dense vector over form_basis(m); requires constant coefficients."""
        idx = form_index(self.dim)
        v = [ZERO] * len(idx)
        for k, c in self.terms.items():
            if not c.is_constant():
                raise ValueError("vector() needs constant coefficients; use blocks()")
            v[idx[k]] = c.constant_term()
        return v

    @classmethod
    def from_vector(cls, dim, vec, ring=TrigPoly):
        basis = form_basis(dim)
        return cls._raw(dim, ring, {basis[i]: ring.const(dim, c) for i, c in enumerate(vec) if c})

    def blocks(self) -> dict:  # type: ignore[override]
        return _Field.blocks(self, form_index(self.dim))

    @classmethod
    def from_blocks(cls, dim, ring, blocks):
        return cls._from_blocks(dim, ring, form_basis(dim), blocks)

    def min_degree(self):
        return min((len(k) for k in self.terms), default=None)

    def __repr__(self):
        if not self.terms:
            return "FormField(0)"
        parts = []
        for S, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            name = "^".join(f"dx{i + 1}" for i in S) or "1"
            parts.append(f"({c})*{name}")
        return " + ".join(parts)

    def to_json(self):
        return [{"word": [f"dx{i + 1}" for i in S], "coeff": c.to_json()} for S, c in sorted(self.terms.items())]


class CliffordElement(_Field):
    """Element of the complexified Clifford algebra of T+T* with ring coefficients."""

    __slots__ = ()

    @classmethod
    def zero(cls, dim, ring=TrigPoly):
        return cls._raw(dim, ring, {})

    @classmethod
    def scalar(cls, dim, c=1, ring=TrigPoly):
        return cls(dim, ring, {(): c})

    @classmethod
    def gen(cls, dim, a: int, c=1, ring=TrigPoly):
        return cls(dim, ring, {(a,): c})

    @classmethod
    def vector_field(cls, dim, i: int, c=1, ring=TrigPoly):
        """c * del_{i+1}"""
        return cls.gen(dim, i, c, ring)

    @classmethod
    def one_form(cls, dim, i: int, c=1, ring=TrigPoly):
        """c * dx^{i+1}"""
        return cls.gen(dim, dim + i, c, ring)

    @classmethod
    def from_vector(cls, dim, vec, ring=TrigPoly):
        """Degree-one element from its 2m coordinates on (del_1..del_m, dx^1..dx^m)."""
        return cls._raw(dim, ring, {(a,): (c if isinstance(c, _Poly) else ring.const(dim, c))
                                    for a, c in enumerate(vec) if c})

    def filtration_degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def is_degree_one(self) -> bool:
        return all(len(w) == 1 for w in self.terms)

    def coords(self) -> list:
        """Coefficients of a degree-one element on the generators."""
        if not self.is_degree_one():
            raise DegreeError("element is not of degree 1")
        out = [self.ring.zero(self.dim) for _ in range(2 * self.dim)]
        for (a,), c in self.terms.items():
            out[a] = c
        return out

    def __mul__(self, o):
        if isinstance(o, CliffordElement):
            return self.mul(o)
        if isinstance(o, FormField):
            return self.act(o)
        return self.scale(o)

    def mul(self, o: "CliffordElement") -> "CliffordElement":
        self._check(o)
        m = self.dim
        t: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in o.terms.items():
                c = c1 * c2
                if not c:
                    continue
                for w, s in word_mul(m, w1, w2):
                    _acc(t, w, _signed(c, s))
        return CliffordElement._raw(m, self.ring, _clean(t))

    def commutator(self, o: "CliffordElement") -> "CliffordElement":
        return self.mul(o) - o.mul(self)

    def anticommutator(self, o: "CliffordElement") -> "CliffordElement":
        return self.mul(o) + o.mul(self)

    def act(self, alpha: FormField) -> FormField:
        """Spin action on forms: del_i -> interior product, dx^i -> wedge."""
        if alpha.dim != self.dim or alpha.ring is not self.ring:
            raise MixedRing("Clifford element and form live over different rings")
        m = self.dim
        t: dict = {}
        for w, c in self.terms.items():
            for S, f in alpha.terms.items():
                r = word_on_subset(m, w, S)
                if r is not None:
                    _acc(t, r[0], _signed(c * f, r[1]))
        return FormField._raw(m, self.ring, _clean(t))

    def grade_parts(self) -> dict:
        """Decomposition into antisymmetrized (Chevalley) grades: degree -> element."""
        m = self.dim
        remaining = dict(self.terms)
        parts: dict = {}
        for L in range(2 * m, -1, -1):
            for w in [w for w in remaining if len(w) == L]:
                c = remaining.pop(w, None)
                if c is None or not c:
                    continue
                parts.setdefault(L, {})[w] = c
                for w2, s in _wedge_lower(m, w):
                    _acc(remaining, w2, c.scale(s))
                remaining = _clean(remaining)
        out = {}
        for L, wedge_terms in parts.items():
            acc = CliffordElement.zero(m, self.ring)
            for w, c in wedge_terms.items():
                acc = acc + wedge_element(m, w, self.ring).scale(c)
            if acc:
                out[L] = acc
        return out

    def grade(self, p: int) -> "CliffordElement":
        return self.grade_parts().get(p, CliffordElement.zero(self.dim, self.ring))

    def scalar_part(self):
        return self.terms.get((), self.ring.zero(self.dim))

    def blocks(self) -> dict:  # type: ignore[override]
        return _Field.blocks(self, _word_index(self.dim))

    @classmethod
    def from_blocks(cls, dim, ring, blocks):
        return cls._from_blocks(dim, ring, word_basis(dim), blocks)

    def __repr__(self):
        if not self.terms:
            return "CliffordElement(0)"
        m = self.dim
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            name = "*".join(gen_name(m, a) for a in w) or "1"
            parts.append(f"({c})*{name}")
        return " + ".join(parts)

    def to_json(self):
        m = self.dim
        return [{"word": [gen_name(m, a) for a in w], "coeff": c.to_json()} for w, c in sorted(self.terms.items())]


@lru_cache(maxsize=None)
def _word_index(m: int) -> dict:
    return {w: i for i, w in enumerate(word_basis(m))}


@lru_cache(maxsize=None)
def _wedge_words(m: int, w: tuple) -> tuple:
    """Antisymmetrized product of the generators in ``w`` in the monomial basis."""
    if not w:
        return (((), Q(1)),)
    a, rest = w[0], w[1:]
    inner = dict(_wedge_words(m, rest))
    k = len(rest)
    out: dict = {}
    for u, c in inner.items():
        for v, s in word_mul(m, (a,), u):
            _acc(out, v, c * Q(Fraction(s, 2)))
        for v, s in word_mul(m, u, (a,)):
            _acc(out, v, c * Q(Fraction(s * (-1) ** k, 2)))
    return tuple((u, c) for u, c in out.items() if c)


@lru_cache(maxsize=None)
def _wedge_lower(m: int, w: tuple) -> tuple:
    """-(wedge(w) - w): subtract these (times coeff) when peeling off wedge(w)."""
    return tuple((u, -c) for u, c in _wedge_words(m, w) if u != w)


def wedge_element(m: int, w: tuple, ring=TrigPoly) -> CliffordElement:
    return CliffordElement(m, ring, dict(_wedge_words(m, tuple(w))))


def pairing(E: CliffordElement, F: CliffordElement):
    """<v+a, w+b> = (a(w) + b(v))/2 for degree-one elements; returns a ring value."""
    if not (E.is_degree_one() and F.is_degree_one()):
        raise DegreeError("pairing is defined on degree-one elements only")
    E._check(F)
    m = E.dim
    s = E.ring.zero(m)
    for (a,), c in E.terms.items():
        b = a + m if a < m else a - m
        f = F.terms.get((b,))
        if f:
            s = s + (c * f).scale(HALF)
    return s


def pairing_matrix(m: int):
    """Gram matrix of the split pairing on the ordered generators."""
    P = [[ZERO] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        P[i][m + i] = HALF
        P[m + i][i] = HALF
    return P


def spin_action(a: CliffordElement, alpha: FormField) -> FormField:
    return a.act(alpha)


def d(alpha: FormField) -> FormField:
    return alpha.d()


def clifford_mul(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    return a.mul(b)


def grade_parts(a: CliffordElement) -> dict:
    return a.grade_parts()


@lru_cache(maxsize=None)
def word_matrix(m: int, w: tuple) -> tuple:
    """Matrix of a word's spin action on form_basis(m), as a tuple of (row, col, sign)."""
    idx = form_index(m)
    out = []
    for S in form_basis(m):
        r = word_on_subset(m, w, S)
        if r is not None:
            out.append((idx[r[0]], idx[S], r[1]))
    return tuple(out)


def action_matrix(a: CliffordElement) -> list:
    """Dense Q matrix of the spin action of a constant-coefficient element."""
    m = a.dim
    n = 2 ** m
    M = [[ZERO] * n for _ in range(n)]
    for w, c in a.terms.items():
        if not c.is_constant():
            raise ValueError("action_matrix needs constant coefficients")
        cv = c.constant_term()
        for i, j, s in word_matrix(m, w):
            M[i][j] = M[i][j] + (cv if s == 1 else -cv if s == -1 else cv * s)
    return M


@lru_cache(maxsize=None)
def matrix_unit(m: int, S_out: tuple, S_in: tuple) -> tuple:
    """Clifford element (as word terms) acting as the unit dx^S_in -> dx^S_out."""
    proj = {(): 1}
    for i in range(m):
        nxt: dict = {}
        for u, c in proj.items():
            for v, s in word_mul(m, u, (i, m + i)):
                nxt[v] = nxt.get(v, 0) + c * s
        proj = {u: c for u, c in nxt.items() if c}
    left = tuple(m + i for i in S_out)
    right = tuple(reversed(S_in))
    acc: dict = {}
    for u, c in proj.items():
        for v, s in word_mul(m, left, u):
            for x, s2 in _mul_gens_right(m, v, right):
                acc[x] = acc.get(x, 0) + c * s * s2
    return tuple((u, c) for u, c in acc.items() if c)


def _mul_gens_right(m, w, gens):
    cur = {w: 1}
    for g in gens:
        nxt: dict = {}
        for u, s in cur.items():
            for v, s2 in _word_times_gen(m, u, g):
                nxt[v] = nxt.get(v, 0) + s * s2
        cur = {u: s for u, s in nxt.items() if s}
    return cur.items()


def element_from_action(m: int, ring, columns: dict) -> CliffordElement:
    """The unique Clifford element whose spin action sends dx^S to columns[S].

    The spin representation is faithful on the full complexified algebra, so
    the element is determined by the images of the constant basis forms.
    """
    t: dict = {}
    for S_in, img in columns.items():
        for S_out, f in img.terms.items():
            for w, c in matrix_unit(m, S_out, tuple(S_in)):
                _acc(t, w, f if c == 1 else f.scale(c))
    return CliffordElement._raw(m, ring, _clean(t))


def exp_nilpotent(a: CliffordElement, max_terms: int | None = None) -> CliffordElement:
    """sum a^k/k! for an element with a^K = 0 (e.g. a 2-form, a bivector, or an element of a wedge of L-bar)."""
    m = a.dim
    limit = max_terms if max_terms is not None else 2 * m + 2
    out = CliffordElement.scalar(m, 1, a.ring)
    power = CliffordElement.scalar(m, 1, a.ring)
    for k in range(1, limit + 1):
        power = power.mul(a).scale(Q(Fraction(1, k)))
        if not power:
            return out
        out = out + power
    raise DegreeError("element is not nilpotent within the allowed number of terms")
