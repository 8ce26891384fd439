"""Detection of the quadratic syzygy and the dim-V case analysis.

A syzygy of bidegree (0,2) groups into f_0*u^2 + f_1*u*v + f_2*v^2 = 0 with
f_j a scalar combination of the generators; the rank of the 4x3 coefficient
matrix phi (= dim of V, the span of the f_j) decides which syzygy set can be
constructed.  This module normalizes the generating set accordingly and
records the change of basis back to the input generators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bipoly import BiDegree, BiPoly, _div, monomial_basis
from .errors import (DegreeTooSmall, HasLinearSyzygy, InternalContract,
                     NoQuadraticSyzygy, NonvanishingViolated,
                     NotCertifiedBasepointFree)
from .linalg import ScalarMatrix, kernel_basis, rank
from .strands import (BasepointCertificate, SurfaceInput, SyzygyVector,
                      syzygy_strand)

_U = BiPoly.monomial((0, 0, 1, 0))
_V = BiPoly.monomial((0, 0, 0, 1))

_MOD = "quad_analyzer"


@dataclass(frozen=True)
class QuadSyzygy:
    """Outcome of the hypothesis gate: the working surface (swapped when the
    quadratic syzygy lives in bidegree (2,0)) and the chosen syzygy Q."""

    surface: SurfaceInput
    q: SyzygyVector
    swapped: bool


@dataclass(frozen=True)
class FVector:
    f: tuple
    phi: ScalarMatrix  # 4x3; [f0,f1,f2] = [p0..p3] . phi


@dataclass(frozen=True)
class CaseReport:
    dim_v: int
    subcase: str | None          # 'i' | 'ii' for dim 2, None for dim 3
    d: tuple | None              # (d0, d1) scalars, dim 2 only
    g: tuple | None              # (g0, g1) quadratic forms, dim 2 only
    h: BiPoly | None             # cofactor of bidegree (a, b-2), dim 2 only
    alpha: BiPoly | None         # bidegree (a, b-1), dim 3 only
    beta: BiPoly | None          # bidegree (a, b-1), dim 3 only
    reindex: ScalarMatrix        # 4x4, columns = normalized gens in input basis
    kept: tuple                  # indices of retained input generators
    generators: tuple            # normalized generating 4-tuple

    def to_json_dict(self):
        return {
            "dim_v": self.dim_v,
            "subcase": self.subcase,
            "d": [str(x) for x in self.d] if self.d else None,
            "g": [str(x) for x in self.g] if self.g else None,
            "h": str(self.h) if self.h else None,
            "alpha": str(self.alpha) if self.alpha else None,
            "beta": str(self.beta) if self.beta else None,
            "kept": list(self.kept),
            "generators": [str(g) for g in self.generators],
            "reindex": [[str(x) for x in row] for row in self.reindex.rows],
        }


def swap_symmetry(U: SurfaceInput) -> SurfaceInput:
    """Exchange s<->u, t<->v in every generator; (a,b) becomes (b,a)."""
    return SurfaceInput(U.b, U.a, [g.swap_st_uv() for g in U.p], U.field)


def require_hypotheses(U: SurfaceInput,
                       certificate: BasepointCertificate) -> QuadSyzygy:
    """Check the structural hypotheses and pick the quadratic syzygy Q.

    Requires a basepoint-freeness certificate, no linear syzygy, and a
    nonempty (0,2) strand with b >= 3.  A (2,0) syzygy with a >= 3 is handled
    by swapping the two P1 factors and proceeding on the swapped input.
    """
    if not certificate.certified:
        raise NotCertifiedBasepointFree(
            f"no certificate up to cap {certificate.cap}; cannot proceed",
            module=_MOD, op="require_hypotheses")
    if syzygy_strand(U, (0, 1)) or syzygy_strand(U, (1, 0)):
        raise HasLinearSyzygy(
            "a linear syzygy exists; use the linear-syzygy method instead",
            module=_MOD, op="require_hypotheses")
    s02 = syzygy_strand(U, (0, 2))
    if s02 and U.b >= 3:
        return QuadSyzygy(U, s02[0], False)
    s20 = syzygy_strand(U, (2, 0))
    if s20 and U.a >= 3:
        swapped = swap_symmetry(U)
        s02s = syzygy_strand(swapped, (0, 2))
        if not s02s:
            raise InternalContract("(2,0) strand did not survive the swap",
                                   module=_MOD, op="require_hypotheses")
        return QuadSyzygy(swapped, s02s[0], True)
    if s02 or s20:
        raise DegreeTooSmall(
            f"quadratic syzygy present but (a,b)=({U.a},{U.b}) is below the "
            "degree bound (need b >= 3, or a >= 3 for the swapped case)",
            module=_MOD, op="require_hypotheses")
    raise NoQuadraticSyzygy("no syzygy of bidegree (0,2) or (2,0)",
                            module=_MOD, op="require_hypotheses")


def build_fvector(U: SurfaceInput, q: SyzygyVector) -> FVector:
    """Extract phi from Q's entries and form f_j = sum_i phi[i][j] p_i."""
    if q.bidegree != (0, 2):
        raise InternalContract(f"Q has bidegree {q.bidegree}, expected (0,2)",
                               module=_MOD, op="build_fvector")
    quad_monos = ((0, 0, 2, 0), (0, 0, 1, 1), (0, 0, 0, 2))
    zero = U.field.zero
    phi_rows = []
    for e in q.entries:
        phi_rows.append([e.coefficient(m) if e.coefficient(m) else zero
                         for m in quad_monos])
    phi = ScalarMatrix(phi_rows)
    fs = []
    for j in range(3):
        f = BiPoly.zero()
        for i in range(4):
            c = phi.rows[i][j]
            if c:
                f = f + U.p[i].scale(c)
        fs.append(f)
    f0, f1, f2 = fs
    u2 = BiPoly.monomial((0, 0, 2, 0))
    uv = BiPoly.monomial((0, 0, 1, 1))
    v2 = BiPoly.monomial((0, 0, 0, 2))
    if f0 * u2 + f1 * uv + f2 * v2:
        raise InternalContract("[f0,f1,f2] is not a syzygy on [u^2,uv,v^2]",
                               module=_MOD, op="build_fvector")
    if f0.is_zero() or f2.is_zero():
        raise InternalContract(
            "f0 or f2 vanished despite the no-linear-syzygy hypothesis",
            module=_MOD, op="build_fvector")
    return FVector(tuple(fs), phi)


def _unit_column(i: int, field) -> list:
    return [field.one if j == i else field.zero for j in range(4)]


def _first_completion(columns: list[list], need: int, field) -> tuple:
    """Lexicographically first index set of unit vectors completing the given
    columns to a basis of k^4."""
    from itertools import combinations

    for combo in combinations(range(4), need):
        cols = columns + [_unit_column(i, field) for i in combo]
        if rank(ScalarMatrix.from_columns(cols, nrows=4)) == 4:
            return combo
    raise InternalContract("no generator completion exists", module=_MOD,
                           op="classify")


def classify(U: SurfaceInput, fv: FVector) -> CaseReport:
    """Branch on dim V = rank(phi) and produce the normalized generators.

    dim 2 splits into subcase i (the kernel's last coordinate is nonzero)
    and subcase ii; each recovers (d0, d1), the quadratic forms (g0, g1) and
    the common cofactor h with f0 = h*g0 up to the sign normalization of h.
    dim 3 peels alpha = f0/v and beta = -f2/u.
    """
    f0, f1, f2 = fv.f
    phi = fv.phi
    dim_v = rank(phi)
    if dim_v == 3:
        alpha = f0.exact_divide(_V)
        beta = (-f2).exact_divide(_U)
        if f1 != beta * _V - alpha * _U:
            raise InternalContract("f1 != beta*v - alpha*u", module=_MOD,
                                   op="classify")
        kept = _first_completion(phi.columns(), 1, U.field)
        reindex = ScalarMatrix.from_columns(
            phi.columns() + [_unit_column(kept[0], U.field)], nrows=4)
        gens = (f0, f1, f2, U.p[kept[0]])
        return CaseReport(3, None, None, None, None, alpha, beta,
                          reindex, kept, gens)
    if dim_v != 2:
        raise InternalContract(f"dim V = {dim_v} is impossible", module=_MOD,
                               op="classify")
    ker = kernel_basis(phi, field=U.field)
    if len(ker) != 1:
        raise InternalContract("phi of rank 2 must have a 1-dim kernel",
                               module=_MOD, op="classify")
    k0, k1, k2 = ker[0]
    if k2:
        subcase = "i"
        e0, e1 = _div(-k0, k2), _div(-k1, k2)   # f2 = e0*f0 + e1*f1
        d0, d1 = e1, e0
        g0 = uv_form(d0, case="i", which=0)
        g1 = uv_form(d1, case="i", which=1)
        nonvanishing = d0 * d0 + d1
        partner, partner_sign = f1, -1
        sel = (0, 1)
    elif k1:
        subcase = "ii"
        e0, e2 = _div(-k0, k1), _div(-k2, k1)   # f1 = e0*f0 + e2*f2
        d0, d1 = e2, e0
        g0 = uv_form(d0, case="ii", which=0)
        g1 = uv_form(d1, case="ii", which=1)
        nonvanishing = d0 * d1 - 1
        partner, partner_sign = f2, -1
        sel = (0, 2)
    else:
        raise InternalContract("kernel vector (k0,0,0) would force f0 = 0",
                               module=_MOD, op="classify")
    if not nonvanishing:
        raise NonvanishingViolated(
            f"subcase {subcase} requires "
            f"{'d0^2+d1' if subcase == 'i' else 'd0*d1-1'} != 0; got 0. "
            "This contradicts the structural hypotheses; please report it.",
            module=_MOD, op="classify")
    h_exact = f0.exact_divide(g0)
    if partner != (h_exact * g1).scale(partner_sign):
        raise InternalContract("Koszul pairing of f's failed", module=_MOD,
                               op="classify")
    h = h_exact.sign_normalized()
    eps = _div(h.leading_coefficient(), h_exact.leading_coefficient())
    n0 = h * g0
    n1 = h * g1
    col0 = [x * eps for x in phi.column(sel[0])]
    col1 = [x * (-eps) for x in phi.column(sel[1])]
    kept = _first_completion([col0, col1], 2, U.field)
    reindex = ScalarMatrix.from_columns(
        [col0, col1] + [_unit_column(i, U.field) for i in kept], nrows=4)
    gens = (n0, n1, U.p[kept[0]], U.p[kept[1]])
    return CaseReport(2, subcase, (d0, d1), (g0, g1), h, None, None,
                      reindex, kept, gens)


def uv_form(dcoef, case: str, which: int) -> BiPoly:
    """The paper-normalized quadratic forms: case i has g0 = uv + d0*v^2 and
    g1 = u^2 + d1*v^2; case ii has g0 = v^2 + d0*uv and g1 = u^2 + d1*uv."""
    u2, uv, v2 = (0, 0, 2, 0), (0, 0, 1, 1), (0, 0, 0, 2)
    if case == "i":
        base, extra = (uv, v2) if which == 0 else (u2, v2)
    else:
        base, extra = (v2, uv) if which == 0 else (u2, uv)
    terms = {base: 1}
    if dcoef:
        terms[extra] = dcoef
    return BiPoly(terms)


def generalized_V(U: SurfaceInput, sy: SyzygyVector) -> tuple[int, list[BiPoly]]:
    """For a syzygy of arbitrary bidegree (c,d): group on the monomials of
    R_(c,d) and return (dim V, the combinations f_i).  No case analysis."""
    monos = monomial_basis(BiDegree(*sy.bidegree))
    zero = U.field.zero
    a_rows = []
    for e in sy.entries:
        a_rows.append([e.coefficient(m) if e.coefficient(m) else zero
                       for m in monos])
    A = ScalarMatrix(a_rows)  # 4 x (n+1)
    fs = []
    for i in range(len(monos)):
        f = BiPoly.zero()
        for j in range(4):
            c = a_rows[j][i]
            if c:
                f = f + U.p[j].scale(c)
        fs.append(f)
    return rank(A), fs
