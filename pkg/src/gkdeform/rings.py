"""Exact scalars and the two flat-model coefficient rings.

``Q`` is a Gaussian rational ``re + im*i`` backed by ``gmpy2.mpq``.
``TrigPoly`` holds finite Fourier sums ``sum_k c_k exp(i<k,x>)`` on the flat
torus ``R^m / 2piZ^m``; ``AffinePoly`` holds polynomials in real chart
coordinates ``x_1..x_m``.  Both keep a canonical form with no stored zeros
and share the same small ring interface, so the multilinear kernel never
needs to know which one it is handling.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpq

from .errors import EvaluationError, MixedRing

_ZERO = mpq(0)
_ONE = mpq(1)


def _to_mpq(x):
    if isinstance(x, type(_ZERO)):
        return x
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, Rational):
        return mpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class Q:
    """Gaussian rational number."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    @staticmethod
    def coerce(x) -> "Q":
        if isinstance(x, Q):
            return x
        if isinstance(x, complex):
            raise TypeError("floating point complex values are not exact")
        return Q(x)

    def __add__(self, o):
        if not isinstance(o, Q):
            o = Q.coerce(o)
        return Q(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, Q):
            o = Q.coerce(o)
        return Q(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return Q.coerce(o) - self

    def __neg__(self):
        return Q(-self.re, -self.im)

    def __mul__(self, o):
        if not isinstance(o, Q):
            if isinstance(o, (TrigPoly, AffinePoly)):
                return NotImplemented
            o = Q.coerce(o)
        a, b, c, d = self.re, self.im, o.re, o.im
        return Q(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Q":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of 0")
        return Q(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * Q.coerce(o).inverse()

    def __rtruediv__(self, o):
        return Q.coerce(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        r = Q(1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def conj(self) -> "Q":
        return Q(self.re, -self.im)

    def norm2(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def l1(self):
        """|re| + |im|, the surrogate absolute value."""
        return abs(self.re) + abs(self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self):
        return not (self.re or self.im)

    def __eq__(self, o):
        if isinstance(o, Q):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return f"Q({self.re})"
        return f"Q({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def to_json(self):
        return {"re": str(self.re), "im": str(self.im)}

    @staticmethod
    def from_json(obj) -> "Q":
        if isinstance(obj, dict):
            return Q(obj.get("re", "0"), obj.get("im", "0"))
        if isinstance(obj, (int, str)):
            return Q(obj)
        raise TypeError(f"bad scalar literal {obj!r}")


I = Q(0, 1)
ZERO = Q(0)
ONE = Q(1)


def _is_exact_point(point) -> bool:
    return all(isinstance(p, (int, Fraction, Q)) or isinstance(p, type(_ZERO)) for p in point)


class _Poly:
    """Shared dict-of-terms machinery; subclasses fix key semantics."""

    __slots__ = ("dim", "terms")
    kind = ""

    def __init__(self, dim: int, terms=None):
        self.dim = dim
        self.terms = {}
        if terms:
            for k, v in terms.items():
                v = Q.coerce(v)
                if v:
                    self.terms[tuple(k)] = v

    @classmethod
    def _raw(cls, dim, terms):
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, dim, c=1):
        c = Q.coerce(c)
        return cls._raw(dim, {(0,) * dim: c} if c else {})

    @classmethod
    def zero(cls, dim):
        return cls._raw(dim, {})

    def _check(self, o):
        if type(o) is not type(self) or o.dim != self.dim:
            raise MixedRing(f"cannot combine {self.kind}({self.dim}) with {getattr(o, 'kind', type(o).__name__)}"
                            f"({getattr(o, 'dim', '?')})")

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and (0,) * self.dim in self.terms)

    def constant_term(self) -> Q:
        return self.terms.get((0,) * self.dim, ZERO)

    def __add__(self, o):
        if isinstance(o, (int, Fraction, Q)):
            o = type(self).const(self.dim, o)
        self._check(o)
        t = dict(self.terms)
        for k, v in o.terms.items():
            w = t.get(k)
            if w is None:
                t[k] = v
            else:
                s = w + v
                if s:
                    t[k] = s
                else:
                    del t[k]
        return type(self)._raw(self.dim, t)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, o):
        if isinstance(o, (int, Fraction, Q)):
            o = type(self).const(self.dim, o)
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def scale(self, c) -> "_Poly":
        c = Q.coerce(c)
        if not c:
            return type(self)._raw(self.dim, {})
        return type(self)._raw(self.dim, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, o):
        if isinstance(o, (int, Fraction, Q)):
            return self.scale(o)
        self._check(o)
        if len(o.terms) == 1:
            (k2, v2), = o.terms.items()
            if not any(k2):
                return self.scale(v2)
        if len(self.terms) == 1:
            (k1, v1), = self.terms.items()
            if not any(k1):
                return o.scale(v1)
        t = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                p = v1 * v2
                w = t.get(k)
                t[k] = p if w is None else w + p
        return type(self)._raw(self.dim, {k: v for k, v in t.items() if v})

    __rmul__ = __mul__

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, Q)):
            o = type(self).const(self.dim, o)
        if type(o) is not type(self):
            return NotImplemented
        return self.dim == o.dim and self.terms == o.terms

    def __hash__(self):
        return hash((self.kind, self.dim, frozenset(self.terms.items())))

    def eval_at_zero(self) -> Q:
        raise NotImplementedError

    def l1(self):
        """Sum of |re| + |im| over all stored coefficients."""
        return sum((v.l1() for v in self.terms.values()), _ZERO)

    def support(self):
        return sorted(self.terms)

    def to_json(self):
        key = "mode" if self.kind == "trig" else "exp"
        return [{key: list(k), "coeff": v.to_json()} for k, v in sorted(self.terms.items())]

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*{self._keystr(k)}" for k, v in sorted(self.terms.items()))


class TrigPoly(_Poly):
    """Finite Fourier sum on the flat m-torus."""

    __slots__ = ()
    kind = "trig"

    @classmethod
    def mode(cls, dim, k, c=1):
        c = Q.coerce(c)
        return cls._raw(dim, {tuple(k): c} if c else {})

    @classmethod
    def exp_i(cls, dim, j, sign=1, c=1):
        """c * exp(sign * i * x_j) with j 0-based."""
        k = [0] * dim
        k[j] = sign
        return cls.mode(dim, k, c)

    def _keystr(self, k):
        return "e^{i<" + ",".join(map(str, k)) + ",x>}"

    def conj(self) -> "TrigPoly":
        return TrigPoly._raw(self.dim, {tuple(-a for a in k): v.conj() for k, v in self.terms.items()})

    def deriv(self, j: int) -> "TrigPoly":
        t = {}
        for k, v in self.terms.items():
            if k[j]:
                t[k] = v * Q(0, k[j])
        return TrigPoly._raw(self.dim, t)

    def eval_at_zero(self) -> Q:
        s = ZERO
        for v in self.terms.values():
            s = s + v
        return s

    def eval_at(self, point, exact_ok=True):
        """Exact only at the origin; elsewhere a complex float."""
        if exact_ok and all((p == 0) for p in point):
            return self.eval_at_zero()
        pt = [float(p) for p in point]
        return sum(complex(v) * cmath.exp(1j * sum(a * x for a, x in zip(k, pt))) for k, v in self.terms.items())

    def is_real_valued(self) -> bool:
        return self == self.conj()

    def max_mode(self) -> int:
        return max((max(map(abs, k)) for k in self.terms), default=0)

    def mode_coeff(self, k) -> Q:
        return self.terms.get(tuple(k), ZERO)

    @staticmethod
    def from_json(dim, obj) -> "TrigPoly":
        return _poly_from_json(TrigPoly, dim, obj, "mode")


class AffinePoly(_Poly):
    """Polynomial in real chart coordinates x_1..x_m."""

    __slots__ = ()
    kind = "affine"

    @classmethod
    def var(cls, dim, j, c=1):
        e = [0] * dim
        e[j] = 1
        return cls._raw(dim, {tuple(e): Q.coerce(c)})

    @classmethod
    def monomial(cls, dim, exps, c=1):
        c = Q.coerce(c)
        return cls._raw(dim, {tuple(exps): c} if c else {})

    def _keystr(self, k):
        return "x^(" + ",".join(map(str, k)) + ")"

    def conj(self) -> "AffinePoly":
        return AffinePoly._raw(self.dim, {k: v.conj() for k, v in self.terms.items()})

    def deriv(self, j: int) -> "AffinePoly":
        t = {}
        for k, v in self.terms.items():
            e = k[j]
            if e:
                k2 = k[:j] + (e - 1,) + k[j + 1:]
                t[k2] = v * e
        return AffinePoly._raw(self.dim, t)

    def eval_at_zero(self) -> Q:
        return self.constant_term()

    def eval_at(self, point, exact_ok=True):
        """Exact Gaussian rational at rational points, complex float otherwise."""
        if exact_ok and _is_exact_point(point):
            pt = [Q.coerce(p) for p in point]
            s = ZERO
            for k, v in self.terms.items():
                term = v
                for x, e in zip(pt, k):
                    if e:
                        term = term * x ** e
                s = s + term
            return s
        pt = [complex(p) for p in point]
        s = 0j
        for k, v in self.terms.items():
            term = complex(v)
            for x, e in zip(pt, k):
                term *= x ** e
            s += term
        return s

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    @staticmethod
    def from_json(dim, obj) -> "AffinePoly":
        return _poly_from_json(AffinePoly, dim, obj, "exp")


def _poly_from_json(cls, dim, obj, key):
    if isinstance(obj, (str, int, dict)) and not (isinstance(obj, dict) and key in obj):
        return cls.const(dim, Q.from_json(obj))
    if isinstance(obj, dict):
        obj = [obj]
    p = cls.zero(dim)
    for rec in obj:
        k = rec[key]
        if len(k) != dim:
            raise ValueError(f"{key} {k} has length {len(k)}, expected {dim}")
        p = p + cls._raw(dim, {tuple(int(a) for a in k): Q.from_json(rec.get("coeff", "1"))})
    return p


def ring_of(x):
    """(class, dim) tag of a coefficient."""
    return type(x), x.dim


def ring_ops(a, b, op: str):
    """Exact binary ring operation; raises MixedRing on mismatched rings."""
    if isinstance(a, _Poly) and isinstance(b, _Poly):
        a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(op)


def eval_at_zero(f) -> Q:
    if isinstance(f, Q):
        return f
    return f.eval_at_zero()


def holomorphic_coordinate(ring_cls, dim, j):
    """z_j = x_{2j} + i x_{2j+1} (0-based) as an element of ``ring_cls``.

    Only meaningful for AffinePoly; on the torus use ``exp_i`` modes instead.
    """
    return ring_cls.var(dim, 2 * j) + ring_cls.var(dim, 2 * j + 1, I)


__all__ = ["Q", "I", "ZERO", "ONE", "TrigPoly", "AffinePoly", "ring_ops", "eval_at_zero",
           "ring_of", "holomorphic_coordinate", "gmpy2", "EvaluationError"]
