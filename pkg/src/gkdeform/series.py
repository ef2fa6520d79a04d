"""Truncated power series in t with Clifford or form coefficients.

Coefficients are stored plainly: ``s[k]`` is the coefficient of t^k.  The
factorial convention a(t) = sum a_k t^k / k! only appears when reading
formulas off in that normalization, via ``from_factorial``/``factorial_coeff``.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

from .clifford import CliffordElement, FormField
from .errors import LiftFailure, LinearAlgebraError, NonzeroConstantTerm
from .rings import Q


class TruncSeries:
    """c_0 + c_1 t + ... + c_N t^N, arithmetic mod t^{N+1}."""

    __slots__ = ("order", "coeffs", "kind", "dim", "ring")

    def __init__(self, coeffs, order: int | None = None, *, kind=None, dim=None, ring=None):
        coeffs = list(coeffs)
        self.order = len(coeffs) - 1 if order is None else order
        sample = coeffs[0] if coeffs else None
        self.kind = kind or type(sample)
        self.dim = dim if dim is not None else sample.dim
        self.ring = ring or sample.ring
        z = self.kind.zero(self.dim, self.ring)
        self.coeffs = (coeffs + [z] * (self.order + 1))[: self.order + 1]

    @classmethod
    def zero(cls, kind, dim, ring, order):
        return cls([kind.zero(dim, ring)] * (order + 1), order, kind=kind, dim=dim, ring=ring)

    @classmethod
    def constant(cls, c, order):
        return cls([c], order)

    @classmethod
    def from_factorial(cls, coeffs, order=None):
        """Series from coefficients in the sum c_k t^k / k! normalization."""
        return cls([c.scale(Q(Fraction(1, factorial(k)))) for k, c in enumerate(coeffs)], order)

    def factorial_coeff(self, k):
        return self.coeffs[k].scale(factorial(k))

    def _like(self, coeffs, kind=None):
        return TruncSeries(coeffs, self.order, kind=kind or self.kind, dim=self.dim, ring=self.ring)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return self.order + 1

    def __add__(self, o):
        return self._like([a + b for a, b in zip(self.coeffs, o.coeffs)])

    def __neg__(self):
        return self._like([-a for a in self.coeffs])

    def __sub__(self, o):
        return self + (-o)

    def __eq__(self, o):
        return isinstance(o, TruncSeries) and self.order == o.order and self.coeffs == o.coeffs

    def scale(self, c):
        return self._like([a.scale(c) for a in self.coeffs])

    def truncate(self, order):
        return TruncSeries(self.coeffs[: order + 1], order, kind=self.kind, dim=self.dim, ring=self.ring)

    def map(self, f, kind=None):
        return self._like([f(a) for a in self.coeffs], kind)

    def conj(self):
        return self.map(lambda a: a.conj())

    def with_coeff(self, k, c):
        cs = list(self.coeffs)
        cs[k] = c
        return self._like(cs)

    def mul(self, o: "TruncSeries") -> "TruncSeries":
        """Clifford product of two Clifford series, truncated."""
        N = min(self.order, o.order)
        out = []
        for k in range(N + 1):
            acc = CliffordElement.zero(self.dim, self.ring)
            for i in range(k + 1):
                a, b = self.coeffs[i], o.coeffs[k - i]
                if a and b:
                    acc = acc + a.mul(b)
            out.append(acc)
        return TruncSeries(out, N, kind=CliffordElement, dim=self.dim, ring=self.ring)

    def act(self, o: "TruncSeries") -> "TruncSeries":
        """Spin action of a Clifford series on a form series."""
        N = min(self.order, o.order)
        out = []
        for k in range(N + 1):
            acc = FormField.zero(self.dim, self.ring)
            for i in range(k + 1):
                a, b = self.coeffs[i], o.coeffs[k - i]
                if a and b:
                    acc = acc + a.act(b)
            out.append(acc)
        return TruncSeries(out, N, kind=FormField, dim=self.dim, ring=self.ring)

    def d(self) -> "TruncSeries":
        return self.map(lambda a: a.d())

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def lowest_order(self):
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def __repr__(self):
        return f"TruncSeries(order={self.order}, {self.kind.__name__})"


def _check_no_constant(a: TruncSeries):
    if a.coeffs[0]:
        raise NonzeroConstantTerm("series must vanish at t = 0")


def exp_series(a: TruncSeries, order: int | None = None) -> TruncSeries:
    """e^{a(t)} mod t^{N+1}."""
    _check_no_constant(a)
    if order is not None:
        a = a.truncate(order)
    N = a.order
    one = CliffordElement.scalar(a.dim, 1, a.ring)
    out = TruncSeries.constant(one, N)
    power = TruncSeries.constant(one, N)
    for k in range(1, N + 1):
        power = power.mul(a).scale(Q(Fraction(1, k)))
        out = out + power
    return out


def exp_action(a: TruncSeries, psi, order: int | None = None) -> TruncSeries:
    """e^{a(t)} psi mod t^{N+1}; ``psi`` is a FormField or a form series."""
    _check_no_constant(a)
    if order is not None:
        a = a.truncate(order)
    N = a.order
    if isinstance(psi, FormField):
        psi = TruncSeries.constant(psi, N)
    out = psi
    term = psi
    for k in range(1, N + 1):
        term = a.act(term).scale(Q(Fraction(1, k)))
        out = out + term
    return out


def series_inverse_exp(a: TruncSeries) -> TruncSeries:
    return exp_series(-a)


def cbh_log(a: TruncSeries, b: TruncSeries, order: int | None = None) -> TruncSeries:
    """z with e^z = e^a e^b mod t^{N+1}, solved one order at a time."""
    _check_no_constant(a)
    _check_no_constant(b)
    N = min(a.order, b.order) if order is None else order
    a, b = a.truncate(N), b.truncate(N)
    target = exp_series(a).mul(exp_series(b))
    z = TruncSeries.zero(CliffordElement, a.dim, a.ring, N)
    for k in range(1, N + 1):
        partial = exp_series(z.truncate(k))
        z = z.with_coeff(k, target[k] - partial[k])
    return z


def cbh_closed_form(a1: CliffordElement, b1: CliffordElement, order: int = 3) -> list:
    """Low-order nested-commutator terms for a = a1 t, b = b1 t: [z_1, z_2, z_3]."""
    c = a1.commutator(b1)
    z = [a1 + b1, c.scale(Q(Fraction(1, 2)))]
    if order >= 3:
        t3 = a1.commutator(c).scale(Q(Fraction(1, 12))) + b1.commutator(b1.commutator(a1)).scale(Q(Fraction(1, 12)))
        z.append(t3)
    return z[:order]


# -- lift of a Maurer-Cartan family to a(t) ----------------------------------

def _lift_step(target: FormField, J, phi: FormField, ring):
    """Solve Hhat . phi = target for Hhat in the second wedge of L-bar."""
    from .brackets import lbar_products, lbar_compose, solve_on_spinor
    prods = lbar_products(J, 2, ring)
    try:
        coeffs = solve_on_spinor(target, phi, prods)
    except LinearAlgebraError as exc:
        raise LiftFailure("no L-bar bivector reproduces the U^{-n+2} part") from exc
    return lbar_compose(J, coeffs, ring)


def in_canonical_line(alpha: FormField, J) -> bool:
    from .structures import u_component
    n = J.dim // 2
    return u_component(alpha, J, -n) == alpha


def mc_lift(eps: TruncSeries, J, phi: FormField, order: int | None = None, *, method="direct") -> TruncSeries:
    """Real a(t) in (wedge^2 L-bar + wedge^2 L) with (e^{-eps} e^{a})_[k] phi in K_J for all k.

    ``method="direct"`` reads the order-k residual of e^{-eps} e^{a} phi;
    ``method="log"`` reads it from z = log(e^{-eps} e^{a}) instead.  Both give
    the same series (the lift is unique).
    """
    from .structures import u_component, u_decompose
    _check_no_constant(eps)
    N = eps.order if order is None else order
    eps = eps.truncate(N)
    n = J.dim // 2
    ring = eps.ring
    a = TruncSeries.zero(CliffordElement, eps.dim, ring, N)
    neg = exp_series(-eps)
    for k in range(1, N + 1):
        if method == "direct":
            R = neg.mul(exp_series(a)).truncate(k)[k].act(phi)
        elif method == "log":
            R = cbh_log(-eps, a, k)[k].act(phi)
        else:
            raise ValueError(method)
        parts = u_decompose(R, J)
        stray = [lvl for lvl in parts if lvl not in (-n, -n + 2)]
        if stray:
            raise LiftFailure(f"order-{k} residual has components at levels {stray}")
        target = -u_component(R, J, -n + 2)
        H = _lift_step(target, J, phi, ring)
        a = a.with_coeff(k, H + H.conj())
        check = neg.mul(exp_series(a)).truncate(k)[k].act(phi)
        if not in_canonical_line(check, J):
            raise LiftFailure(f"order-{k} congruence fails after the solve")
    return a


def lift_residuals(eps: TruncSeries, a: TruncSeries, phi: FormField) -> list:
    """[(e^{-eps} e^{a})_[k] phi for k = 0..N]."""
    prod = exp_series(-eps).mul(exp_series(a))
    return [prod[k].act(phi) for k in range(prod.order + 1)]
