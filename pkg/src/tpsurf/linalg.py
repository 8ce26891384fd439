"""Dense exact linear algebra over the scalar backends.

Rational matrices are routed through fraction-free integer elimination
(Bareiss for echelon/determinants, one-step fraction-free Gauss-Jordan for
reduced forms) to control coefficient blow-up; prime-field matrices use plain
field elimination.  Pivots are always the first nonzero entry scanning
top-to-bottom, so reduced forms and kernel bases are deterministic.
"""

from __future__ import annotations

from math import gcd, lcm

from .errors import InternalContract, NonSquare
from .fields import QQ, RAT, ModP


class ScalarMatrix:
    """Rectangular dense matrix of field elements; row-major, immutable."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows, ncols=None):
        rows = [list(r) for r in rows]
        self.nrows = len(rows)
        if rows:
            widths = {len(r) for r in rows}
            if len(widths) != 1:
                raise ValueError("ragged rows")
            self.ncols = widths.pop()
        else:
            self.ncols = 0 if ncols is None else ncols
        self.rows = rows

    @classmethod
    def identity(cls, n, field=QQ):
        one, zero = field.one, field.zero
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, m, n, field=QQ):
        z = field.zero
        return cls([[z] * n for _ in range(m)], ncols=n)

    @classmethod
    def from_columns(cls, cols, nrows=None):
        if not cols:
            return cls([], ncols=0) if nrows is None else cls([[] for _ in range(nrows)], ncols=0)
        m = len(cols[0])
        return cls([[col[i] for col in cols] for i in range(m)])

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self):
        return ScalarMatrix([[self.rows[i][j] for i in range(self.nrows)]
                             for j in range(self.ncols)], ncols=self.nrows)

    def matvec(self, v):
        return [sum((r[j] * v[j] for j in range(self.ncols) if v[j]), 0) for r in self.rows]

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        ot = other.rows
        return ScalarMatrix(
            [[sum((a[k] * ot[k][j] for k in range(self.ncols) if a[k]), 0)
              for j in range(other.ncols)] for a in self.rows],
            ncols=other.ncols,
        )

    def __eq__(self, other):
        return (isinstance(other, ScalarMatrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)

    def __repr__(self):
        return f"ScalarMatrix({self.nrows}x{self.ncols})"


def _is_modp(M: ScalarMatrix):
    for r in M.rows:
        for x in r:
            if isinstance(x, ModP):
                return x.p
    return None


def _exact_div(x: int, d: int) -> int:
    q, r = divmod(x, d)
    if r:
        raise InternalContract("fraction-free division was not exact",
                               module="exact_linalg", op="elimination")
    return q


def _int_rows(M: ScalarMatrix) -> list[list[int]]:
    """Row-scaled integer copy (row scaling preserves rank/RREF/kernel)."""
    out = []
    for r in M.rows:
        den = 1
        for x in r:
            den = lcm(den, int(x.denominator)) if not isinstance(x, int) else den
        row = [int(x) if isinstance(x, int) else int(x.numerator) * (den // int(x.denominator))
               for x in r]
        g = 0
        for x in row:
            g = gcd(g, x)
        if g > 1:
            row = [x // g for x in row]
        out.append(row)
    return out


def int_echelon(rows: list[list[int]], ncols: int) -> tuple[list[int], int]:
    """In-place fraction-free forward elimination (Bareiss).

    Returns (pivot column indices, sign of the accumulated row permutation).
    After the call, rows[k][pivots[k]] is the k-th leading principal minor of
    the permuted matrix; for square full-rank input the determinant is
    sign * rows[-1][pivots[-1]].
    """
    m = len(rows)
    pivots: list[int] = []
    sign = 1
    prev = 1
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, m):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
            sign = -sign
        piv = rows[r][c]
        rowr = rows[r]
        for i in range(r + 1, m):
            rowi = rows[i]
            f = rowi[c]
            if f:
                for j in range(c, ncols):
                    rowi[j] = _exact_div(piv * rowi[j] - f * rowr[j], prev)
            elif prev != 1 or piv != 1:
                for j in range(c, ncols):
                    if rowi[j]:
                        rowi[j] = _exact_div(piv * rowi[j], prev)
        prev = piv
        pivots.append(c)
        r += 1
        if r == m:
            break
    return pivots, sign


def int_gauss_jordan(rows: list[list[int]], ncols: int) -> tuple[list[int], int]:
    """In-place one-step fraction-free Gauss-Jordan.

    Returns (pivots, d) where d is the final pivot value: the rational RREF
    equals the resulting integer matrix divided by d.  All pivot entries end
    equal to d and pivot columns are zero elsewhere.
    """
    m = len(rows)
    pivots: list[int] = []
    prev = 1
    r = 0
    active = list(range(ncols))
    for c in range(ncols):
        pr = None
        for i in range(r, m):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        rowr = rows[r]
        active.remove(c)
        for i in range(m):
            if i == r:
                continue
            rowi = rows[i]
            f = rowi[c]
            if f:
                for j in active:
                    rowi[j] = _exact_div(piv * rowi[j] - f * rowr[j], prev)
                rowi[c] = 0
            elif prev != piv:
                for j in active:
                    if rowi[j]:
                        rowi[j] = _exact_div(piv * rowi[j], prev)
        prev = piv
        pivots.append(c)
        r += 1
        if r == m:
            break
    # pivot rows carry stale values in pivot columns from before later steps;
    # the invariant values are prev at own pivot, 0 at other pivots
    for k, c in enumerate(pivots):
        for k2 in range(len(pivots)):
            rows[k2][c] = prev if k2 == k else 0
    return pivots, prev


def int_kernel(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Primitive integer basis of the right kernel, one vector per free
    column in ascending column order; entry at the free column is positive."""
    work = [list(r) for r in rows]
    pivots, d = int_gauss_jordan(work, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = d
        for k, c in enumerate(pivots):
            v[c] = -work[k][f]
        g = 0
        for x in v:
            g = gcd(g, x)
        if g > 1:
            v = [x // g for x in v]
        if v[f] < 0:
            v = [-x for x in v]
        basis.append(v)
    return basis


def _field_rref(M: ScalarMatrix):
    rows = [list(r) for r in M.rows]
    m, n = M.nrows, M.ncols
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return ScalarMatrix(rows, ncols=n), tuple(pivots)


def rref(M: ScalarMatrix):
    """Reduced row echelon form over the entry field; returns (R, pivots)."""
    if _is_modp(M):
        return _field_rref(M)
    work = _int_rows(M)
    pivots, d = int_gauss_jordan(work, M.ncols)
    dq = RAT(d)
    rows = [[x / dq for x in r] for r in work]
    return ScalarMatrix(rows, ncols=M.ncols), tuple(pivots)


def rank(M: ScalarMatrix) -> int:
    if M.nrows == 0 or M.ncols == 0:
        return 0
    if _is_modp(M):
        return len(_field_rref(M)[1])
    work = _int_rows(M)
    pivots, _ = int_echelon(work, M.ncols)
    return len(pivots)


def kernel_basis(M: ScalarMatrix, field=None) -> list[list]:
    """Exact basis of the right null space as column vectors.

    Over the rationals the vectors are primitive integer vectors (as exact
    rationals); over F_p they come from the reduced echelon form.  Empty list
    iff M is injective.
    """
    p = _is_modp(M)
    if p:
        R, pivots = _field_rref(M)
        pivset = set(pivots)
        out = []
        zero, one = ModP(0, p), ModP(1, p)
        for f in range(M.ncols):
            if f in pivset:
                continue
            v = [zero] * M.ncols
            v[f] = one
            for k, c in enumerate(pivots):
                v[c] = -R.rows[k][f]
            out.append(v)
        nullity = len(out)
        if len(pivots) + nullity != M.ncols:
            raise InternalContract("rank-nullity violated", module="exact_linalg",
                                   op="kernel_basis")
        return out
    work = _int_rows(M)
    ker = int_kernel(work, M.ncols)
    if field is None:
        field = QQ
    return [[field.of(x) for x in v] for v in ker]


def det_scalar(M: ScalarMatrix):
    """Exact determinant via fraction-free elimination."""
    if M.nrows != M.ncols:
        raise NonSquare(f"{M.nrows}x{M.ncols} matrix", module="exact_linalg",
                        op="det_scalar")
    n = M.nrows
    if n == 0:
        return 1
    p = _is_modp(M)
    if p:
        rows = [list(r) for r in M.rows]
        sign = 1
        det = ModP(1, p)
        for c in range(n):
            pr = None
            for i in range(c, n):
                if rows[i][c]:
                    pr = i
                    break
            if pr is None:
                return ModP(0, p)
            if pr != c:
                rows[c], rows[pr] = rows[pr], rows[c]
                sign = -sign
            piv = rows[c][c]
            det = det * piv
            inv = 1 / piv
            for i in range(c + 1, n):
                if rows[i][c]:
                    f = rows[i][c] * inv
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
        return det * sign
    # rational path: scale rows to integers, Bareiss, undo the scaling
    scale = RAT(1)
    work = []
    for r in M.rows:
        den = 1
        for x in r:
            if not isinstance(x, int):
                den = lcm(den, int(x.denominator))
        work.append([int(x) if isinstance(x, int)
                     else int(x.numerator) * (den // int(x.denominator)) for x in r])
        scale = scale * den
    pivots, sign = int_echelon(work, n)
    if len(pivots) < n:
        return RAT(0)
    return RAT(sign * work[n - 1][pivots[-1]]) / scale
