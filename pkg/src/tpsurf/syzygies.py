"""Explicit syzygy construction from the normalized generators.

dim V = 2: decompose the two retained generators against (g0, g1) through the
cubic-monomial identities, yielding S1, S2 of bidegree (a, b-2) next to the
reduced Koszul syzygy Q = [g1, -g0, 0, 0].

dim V = 3: split alpha, beta and the retained generator along (u, v^2),
(u^2, v) and (u^2, v^2); the presentation of the height-2 subideal supplies
S1, and the last generator supplies S2, S3 of bidegree (a, b-1).  The kernel
vector N of the 4x4 syzygy matrix is verified as part of construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analyze import CaseReport
from .bipoly import BiPoly, _div
from .errors import DegreeTooSmall, DenominatorZero, InternalContract
from .strands import SyzygyVector

_MOD = "syzygy_builder"

_U = BiPoly.monomial((0, 0, 1, 0))
_V = BiPoly.monomial((0, 0, 0, 1))


@dataclass(frozen=True)
class Dim2Data:
    q: tuple  # (q0, q1) with n2 = q0*g0 + q1*g1
    r: tuple  # (r0, r1) with n3 = r0*g0 + r1*g1


@dataclass(frozen=True)
class Dim3Data:
    q: tuple  # (q0, q1) with alpha = q0*u + q1*v^2
    r: tuple  # (r0, r1) with beta = r0*u^2 + r1*v
    m: tuple  # (m0, m1) with p3 = m0*u^2 + m1*v^2


def cubic_decompose(case: str, d: tuple, w: tuple) -> tuple[BiPoly, BiPoly]:
    """Write the cubic monomial u^e*v^f (e+f = 3) as c0*g0 + c1*g1.

    The coefficients are the closed forms attached to the two families of
    quadratic generators; the case-i denominator is d0^2+d1, the case-ii
    denominator d0*d1-1 (both nonzero after classification).
    """
    d0, d1 = d
    e, f = w
    if e + f != 3 or e < 0 or f < 0:
        raise ValueError(f"({e},{f}) is not a cubic monomial")
    if case == "i":
        den = d0 * d0 + d1
        if not den:
            raise DenominatorZero("d0^2 + d1 = 0", module=_MOD, op="cubic_decompose")
        table = {
            (3, 0): ((_div(-d0 * d1, den), _div(-d1 * d1, den)), (1, _div(d0 * d1, den))),
            (2, 1): ((_div(d1, den), _div(-d0 * d1, den)), (0, _div(d0 * d0, den))),
            (1, 2): ((_div(d0, den), _div(d1, den)), (0, _div(-d0, den))),
            (0, 3): ((_div(-1, den), _div(d0, den)), (0, _div(1, den))),
        }
    elif case == "ii":
        den = d0 * d1 - 1
        if not den:
            raise DenominatorZero("d0*d1 - 1 = 0", module=_MOD, op="cubic_decompose")
        table = {
            (3, 0): ((_div(-d1 * d1, den), 0), (1, _div(d1, den))),
            (2, 1): ((_div(d1, den), 0), (0, _div(-1, den))),
            (1, 2): ((_div(-1, den), 0), (0, _div(d0, den))),
            (0, 3): ((_div(d0, den), 1), (0, _div(-d0 * d0, den))),
        }
    else:
        raise ValueError(f"unknown case {case!r}")
    (cu0, cv0), (cu1, cv1) = table[(e, f)]
    c0 = BiPoly({(0, 0, 1, 0): cu0, (0, 0, 0, 1): cv0})
    c1 = BiPoly({(0, 0, 1, 0): cu1, (0, 0, 0, 1): cv1})
    return c0, c1


_CHUNKS = ((3, 0), (2, 1), (1, 2), (0, 3))


def decompose_in_g(p: BiPoly, case: str, d: tuple) -> tuple[BiPoly, BiPoly]:
    """Write p (bidegree (a,b), b >= 3) as q0*g0 + q1*g1.

    Deterministic: each monomial surrenders its canonical cubic chunk (the
    highest u-power at most 3), the chunk goes through cubic_decompose and
    the cofactor multiplies back.
    """
    deg = p.bidegree()
    if deg is not None and deg.d < 3:
        raise DegreeTooSmall(f"bidegree {deg} has d < 3", module=_MOD,
                             op="decompose_in_g")
    cache: dict = {}
    q0 = BiPoly.zero()
    q1 = BiPoly.zero()
    for (es, et, eu, ev), coeff in p.terms.items():
        ce, cf = (3, 0) if eu >= 3 else (eu, 3 - eu)
        if cf > ev:
            raise DegreeTooSmall("monomial too short in u,v for a cubic chunk",
                                 module=_MOD, op="decompose_in_g")
        if (ce, cf) not in cache:
            cache[(ce, cf)] = cubic_decompose(case, d, (ce, cf))
        c0, c1 = cache[(ce, cf)]
        cof = (es, et, eu - ce, ev - cf)
        q0 = q0 + c0.shift(cof).scale(coeff)
        q1 = q1 + c1.shift(cof).scale(coeff)
    return q0, q1


def decompose_dim2(report: CaseReport) -> Dim2Data:
    """Decompositions of the two retained generators against (g0, g1)."""
    n2, n3 = report.generators[2], report.generators[3]
    return Dim2Data(q=decompose_in_g(n2, report.subcase, report.d),
                    r=decompose_in_g(n3, report.subcase, report.d))


def build_dim2_syzygies(report: CaseReport, data: Dim2Data):
    """The syzygy set {Q, S1, S2} on the generators (h*g0, h*g1, n2, n3)."""
    g0, g1 = report.g
    h = report.h
    gens = report.generators
    zero = BiPoly.zero()
    q0, q1 = data.q
    r0, r1 = data.r
    Q = SyzygyVector.checked((g1, -g0, zero, zero), (0, 2), gens,
                             module=_MOD, op="build_dim2_syzygies")
    a, b = gens[0].bidegree()
    S1 = SyzygyVector.checked((q0, q1, -h, zero), (a, b - 2), gens,
                              module=_MOD, op="build_dim2_syzygies")
    S2 = SyzygyVector.checked((r0, r1, zero, -h), (a, b - 2), gens,
                              module=_MOD, op="build_dim2_syzygies")
    return Q, S1, S2


def decompose_dim3(report: CaseReport, p3: BiPoly) -> Dim3Data:
    """Canonical monomial splits for alpha, beta and the last generator.

    alpha: monomials with u-exponent >= 1 route to q0*u, the rest to q1*v^2;
    beta: v-exponent >= 1 routes to r1*v, the rest to r0*u^2;
    p3: u-exponent >= 2 routes to m0*u^2, the rest to m1*v^2.
    """
    deg = p3.bidegree()
    if deg is None or deg.d < 3:
        raise DegreeTooSmall("need b >= 3", module=_MOD, op="decompose_dim3")

    def split(poly, rule):
        lo = {}
        hi = {}
        for mono, c in poly.terms.items():
            which, shift = rule(mono)
            tgt = hi if which else lo
            mm = (mono[0], mono[1], mono[2] - shift[0], mono[3] - shift[1])
            if min(mm[2], mm[3]) < 0:
                raise InternalContract("split shift went negative", module=_MOD,
                                       op="decompose_dim3")
            tgt[mm] = c
        return BiPoly(hi), BiPoly(lo)

    q0, q1 = split(report.alpha,
                   lambda m: (True, (1, 0)) if m[2] >= 1 else (False, (0, 2)))
    r1, r0 = split(report.beta,
                   lambda m: (True, (0, 1)) if m[3] >= 1 else (False, (2, 0)))
    m0, m1 = split(p3,
                   lambda m: (True, (2, 0)) if m[2] >= 2 else (False, (0, 2)))
    return Dim3Data(q=(q0, q1), r=(r0, r1), m=(m0, m1))


def kernel_vector_N(report: CaseReport, data: Dim3Data) -> tuple:
    """The kernel vector of the 4x4 syzygy matrix in the dim-3 case."""
    q0, q1 = data.q
    r0, r1 = data.r
    m0, m1 = data.m
    p3 = report.generators[3]
    first = m0 * (q1 * _U - r1) + m1 * (r0 * _V - q0)
    return (first, p3, report.beta, report.alpha)


def build_dim3_syzygies(report: CaseReport, data: Dim3Data):
    """The syzygy set {Q, S1, S2, S3} on (alpha*v, beta*v - alpha*u, -beta*u, p3);
    also verifies M*N = 0 for the kernel vector N."""
    gens = report.generators
    a, b = gens[0].bidegree()
    zero = BiPoly.zero()
    q0, q1 = data.q
    r0, r1 = data.r
    m0, m1 = data.m
    alpha, beta = report.alpha, report.beta
    Q = SyzygyVector.checked(
        (BiPoly.monomial((0, 0, 2, 0)), BiPoly.monomial((0, 0, 1, 1)),
         BiPoly.monomial((0, 0, 0, 2)), zero), (0, 2), gens,
        module=_MOD, op="build_dim3_syzygies")
    S1 = SyzygyVector.checked(
        (-q1 * _U + r1, -r0 * _U - q1 * _V, q0 - r0 * _V, zero),
        (a, b - 2), gens, module=_MOD, op="build_dim3_syzygies")
    S2 = SyzygyVector.checked(
        (-m1 * _V, m0 * _U, m0 * _V, alpha), (a, b - 1), gens,
        module=_MOD, op="build_dim3_syzygies")
    S3 = SyzygyVector.checked(
        (m1 * _U, m1 * _V, -m0 * _U, -beta), (a, b - 1), gens,
        module=_MOD, op="build_dim3_syzygies")
    N = kernel_vector_N(report, data)
    for row in range(4):
        acc = BiPoly.zero()
        for col, sy in enumerate((Q, S1, S2, S3)):
            acc = acc + sy.entries[row] * N[col]
        if acc:
            raise InternalContract("M*N != 0 for the displayed kernel vector",
                                   module=_MOD, op="build_dim3_syzygies")
    return Q, S1, S2, S3
