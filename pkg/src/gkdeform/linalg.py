"""Exact linear algebra over Gaussian rationals.

Rows are kept sparse (``dict`` column -> Q) and reduced incrementally to
reduced row-echelon form, which is what almost every system in this package
looks like: a few hundred unknowns, mostly empty rows.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import LinearAlgebraError
from .rings import Q, ZERO, ONE


def _sparse(row) -> dict:
    if isinstance(row, dict):
        return {c: Q.coerce(v) for c, v in row.items() if v}
    return {c: Q.coerce(v) for c, v in enumerate(row) if v}


class RowReducer:
    """Incremental Gauss-Jordan elimination.

    Columns ``0..ncols-1`` are unknowns; any larger column index is treated as
    a right-hand side and never chosen as a pivot.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: dict[int, dict] = {}
        self.inconsistent = False

    def _reduce(self, row: dict) -> dict:
        row = dict(row)
        for c in [c for c in row if c in self.rows]:
            f = row.get(c)
            if not f:
                continue
            for cc, vv in self.rows[c].items():
                w = row.get(cc, ZERO) - f * vv
                if w:
                    row[cc] = w
                else:
                    row.pop(cc, None)
        return row

    def add(self, row) -> bool:
        """Add an equation; returns True if it raised the rank."""
        row = self._reduce(_sparse(row))
        cand = [c for c in row if c < self.ncols]
        if not cand:
            if row:
                self.inconsistent = True
            return False
        p = min(cand)
        inv = row[p].inverse()
        row = {c: v * inv for c, v in row.items()}
        for r in self.rows.values():
            f = r.get(p)
            if f:
                for cc, vv in row.items():
                    w = r.get(cc, ZERO) - f * vv
                    if w:
                        r[cc] = w
                    else:
                        r.pop(cc, None)
        self.rows[p] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)

    def nullspace(self) -> list[dict]:
        free = [c for c in range(self.ncols) if c not in self.rows]
        basis = []
        for f in free:
            v = {f: ONE}
            for p, r in self.rows.items():
                x = r.get(f)
                if x:
                    v[p] = -x
            basis.append(v)
        return basis

    def particular(self, rhs_col: int) -> dict:
        if self.inconsistent:
            raise LinearAlgebraError("inconsistent linear system")
        return {p: r[rhs_col] for p, r in self.rows.items() if rhs_col in r}


def to_dense(v: dict, n: int) -> list:
    return [v.get(i, ZERO) for i in range(n)]


def rank(rows: Iterable, ncols: int | None = None) -> int:
    rows = [_sparse(r) for r in rows]
    if ncols is None:
        ncols = 1 + max((max(r) for r in rows if r), default=-1)
    rr = RowReducer(ncols)
    for r in rows:
        rr.add(r)
    return rr.rank


def nullspace(rows: Sequence, ncols: int) -> list[list]:
    rr = RowReducer(ncols)
    for r in rows:
        rr.add(r)
    return [to_dense(v, ncols) for v in rr.nullspace()]


def solve(rows: Sequence, rhs: Sequence, ncols: int, *, with_kernel=False):
    """One solution of ``A x = b`` (free variables set to 0).

    Raises LinearAlgebraError when the system is inconsistent.
    """
    rr = RowReducer(ncols)
    for r, b in zip(rows, rhs):
        r = _sparse(r)
        b = Q.coerce(b)
        if b:
            r[ncols] = b
        rr.add(r)
    x = to_dense(rr.particular(ncols), ncols)
    if with_kernel:
        return x, [to_dense(v, ncols) for v in rr.nullspace()]
    return x


def columns_to_rows(cols: Sequence[Sequence], nrows: int) -> list[dict]:
    """Transpose a list of (dense or sparse) column vectors into sparse rows."""
    rows = [dict() for _ in range(nrows)]
    for j, col in enumerate(cols):
        items = col.items() if isinstance(col, dict) else enumerate(col)
        for i, v in items:
            if v:
                rows[i][j] = Q.coerce(v)
    return rows


def hdot(u: Sequence, v: Sequence, gram=None) -> Q:
    """Hermitian product u^H G v (G = identity by default)."""
    if gram is None:
        s = ZERO
        for a, b in zip(u, v):
            if a and b:
                s = s + a.conj() * b
        return s
    s = ZERO
    for i, a in enumerate(u):
        if not a:
            continue
        ac = a.conj()
        gi = gram[i]
        for j, b in enumerate(v):
            if b and gi[j]:
                s = s + ac * gi[j] * b
    return s


def min_norm_solve(rows: Sequence, rhs: Sequence, ncols: int, gram=None) -> list:
    """The solution of ``A x = b`` orthogonal to ker A in the metric ``gram``."""
    x0, ker = solve(rows, rhs, ncols, with_kernel=True)
    return project_out(x0, ker, gram)


def project_out(x: list, ker: list[list], gram=None) -> list:
    """Remove from x its gram-orthogonal projection onto span(ker)."""
    if not ker:
        return x
    k = len(ker)
    G = [[hdot(ker[i], ker[j], gram) for j in range(k)] for i in range(k)]
    rhs = [hdot(ker[i], x, gram) for i in range(k)]
    y = solve(G, rhs, k)
    out = list(x)
    for j in range(k):
        if y[j]:
            for i, v in enumerate(ker[j]):
                if v:
                    out[i] = out[i] - y[j] * v
    return out


def matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = [[ZERO] * p for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        oi = out[i]
        for k in range(m):
            a = Ai[k]
            if not a:
                continue
            Bk = B[k]
            for j in range(p):
                if Bk[j]:
                    oi[j] = oi[j] + a * Bk[j]
    return out


def matvec(A, v):
    return [sum((a * b for a, b in zip(row, v) if a and b), ZERO) for row in A]


def identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def inverse(A):
    n = len(A)
    rr = RowReducer(n)
    for i, row in enumerate(A):
        r = _sparse(row)
        r[n + i] = ONE
        rr.add(r)
    if rr.rank != n:
        raise LinearAlgebraError("singular matrix")
    return [[rr.rows[i].get(n + j, ZERO) for j in range(n)] for i in range(n)]


def conj_transpose(A):
    return [[A[i][j].conj() for i in range(len(A))] for j in range(len(A[0]))]


def is_zero_matrix(A) -> bool:
    return all(not v for row in A for v in row)


def mat_eq(A, B) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def in_span(vectors: Sequence[Sequence], target: Sequence, dim: int) -> bool:
    rows = columns_to_rows(vectors, dim)
    try:
        solve(rows, target, len(vectors))
        return True
    except LinearAlgebraError:
        return False
