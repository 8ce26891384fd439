"""Strand matrix assembly, exact determinants, and root extraction.

The syzygy set is contracted against the monomials of bidegree (2a-1, b-1),
giving a square matrix of linear forms in T0..T3 of size 2ab.  Its exact
determinant is a power of the implicit equation; the power is recovered by a
multiplicity scan on a line restriction followed by a certified truncated
power-series root.

Determinant backends:

* "ff": fraction-free elimination directly over k[T0..T3].
* "interp": evaluation-interpolation.  Over Q the matrix is cleared to
  integer coefficient matrices, evaluated on a simplex grid modulo enough
  ~29-bit primes to cover a Hadamard-style coefficient bound, interpolated
  per prime by triangular Newton divided differences, and CRT-lifted; the
  result is exact, not heuristic.  Over F_p a single pass in that field.
* "both": run both and cross-check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd, prod

import numpy as np

from . import modp
from .bipoly import BiDegree, BiPoly, RSPoly, TPoly, _div, monomial_basis, t_key
from .errors import InternalContract, NonSquare, NotSquare, ZeroDeterminant
from .fields import QQ, RAT, ModP, PrimeField, primes_from
from .strands import SurfaceInput, SyzygyVector

_MOD = "implicit_engine"

_DET_PRIMES_START = (1 << 29) + 1


def strand_bidegree(a: int, b: int) -> BiDegree:
    return BiDegree(2 * a - 1, b - 1)


class StrandMatrix:
    """Square matrix of T-linear forms: rows indexed by the monomials of
    bidegree (2a-1, b-1), columns by (syzygy, cofactor monomial) pairs.

    Entries are stored as length-4 coefficient lists [c0..c3] meaning
    c0*T0 + ... + c3*T3.
    """

    def __init__(self, entries, row_monomials, col_index, contributions, a, b):
        self.entries = entries
        self.row_monomials = row_monomials
        self.col_index = col_index
        self.contributions = contributions
        self.a = a
        self.b = b

    @property
    def nrows(self) -> int:
        return len(self.row_monomials)

    @property
    def ncols(self) -> int:
        return len(self.col_index)

    def tpoly(self, i: int, j: int) -> TPoly:
        cs = self.entries[i][j]
        return TPoly({tuple(1 if k == w else 0 for k in range(4)): cs[w]
                      for w in range(4) if cs[w]})

    def tpoly_rows(self) -> list[list[TPoly]]:
        return [[self.tpoly(i, j) for j in range(self.ncols)]
                for i in range(self.nrows)]

    def evaluate(self, tvals) -> list[list]:
        """Scalar matrix at a T-point; entries follow the coefficient field."""
        out = []
        for row in self.entries:
            out.append([sum((cs[k] * tvals[k] for k in range(4) if cs[k]), 0)
                        for cs in row])
        return out

    def int_coefficient_matrices(self) -> tuple[list, list]:
        """Clear column denominators; returns (four integer matrices C_i with
        M = sum C_i T_i after scaling, list of per-column scale factors)."""
        from math import lcm

        n, m = self.nrows, self.ncols
        scales = []
        for j in range(m):
            den = 1
            for i in range(n):
                for c in self.entries[i][j]:
                    if c and not isinstance(c, int):
                        den = lcm(den, int(c.denominator))
            scales.append(den)
        mats = [[[0] * m for _ in range(n)] for _ in range(4)]
        for i in range(n):
            for j in range(m):
                cs = self.entries[i][j]
                for k in range(4):
                    c = cs[k]
                    if c:
                        mats[k][i][j] = (c * scales[j] if isinstance(c, int)
                                         else int(c.numerator) * (scales[j] // int(c.denominator)))
        return mats, scales


def assemble_d1(syzygies, a: int, b: int) -> StrandMatrix:
    """Contract each syzygy against its cofactor monomials in bidegree
    (2a-1, b-1); raises NotSquare unless exactly 2ab columns result."""
    nu = strand_bidegree(a, b)
    rows = monomial_basis(nu)
    index = {m: i for i, m in enumerate(rows)}
    entries: list[list] = [[] for _ in rows]
    col_index = []
    contributions = []
    for si, sy in enumerate(syzygies):
        shift = nu.minus(sy.bidegree)
        if shift is None:
            raise NotSquare(
                f"syzygy bidegree {tuple(sy.bidegree)} exceeds {tuple(nu)}",
                module=_MOD, op="assemble_d1")
        ell = RSPoly.d1_image(sy.entries)
        cof = monomial_basis(shift)
        contributions.append(len(cof))
        for m in cof:
            col = [[0, 0, 0, 0] for _ in rows]
            for mono, c in ell.terms.items():
                r = index[(mono[0] + m[0], mono[1] + m[1],
                           mono[2] + m[2], mono[3] + m[3])]
                t = mono[4:].index(1)
                col[r][t] = col[r][t] + c
            col_index.append((si, m))
            for r in range(len(rows)):
                entries[r].append(col[r])
    if len(col_index) != 2 * a * b or len(rows) != 2 * a * b:
        raise NotSquare(
            f"strand is {len(rows)}x{len(col_index)}, expected {2*a*b} square; "
            "the syzygy set does not determine the strand",
            module=_MOD, op="assemble_d1")
    return StrandMatrix(entries, rows, tuple(col_index), tuple(contributions), a, b)


# -- determinant backends ------------------------------------------------------


def _det_ff(rows: list[list[TPoly]]) -> TPoly:
    """Fraction-free Bareiss over the polynomial ring."""
    n = len(rows)
    if n == 0:
        return TPoly({(0, 0, 0, 0): 1})
    M = [list(r) for r in rows]
    sign = 1
    prev: TPoly | None = None
    for k in range(n - 1):
        pr = None
        for i in range(k, n):
            if not M[i][k].is_zero():
                pr = i
                break
        if pr is None:
            return TPoly.zero()
        if pr != k:
            M[k], M[pr] = M[pr], M[k]
            sign = -sign
        piv = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = piv * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = num.exact_divide(prev) if prev is not None else num
        prev = piv
    det = M[n - 1][n - 1]
    return det.scale(-1) if sign < 0 else det


def _simplex_points(D: int):
    return [(i, j, k) for i in range(D + 1) for j in range(D + 1 - i)
            for k in range(D + 1 - i - j)]


def _interp_simplex_modp(vals: dict, D: int, p: int) -> dict:
    """Monomial coefficients of the trivariate polynomial of total degree <= D
    taking the given values on the triangular grid with nodes 0..D."""
    inv = [0] + [pow(o, p - 2, p) for o in range(1, D + 1)]
    work = dict(vals)
    for axis in range(3):
        others = [ax for ax in range(3) if ax != axis]
        for f0 in range(D + 1):
            for f1 in range(D + 1 - f0):
                L = D - f0 - f1
                key = [0, 0, 0]
                key[others[0]], key[others[1]] = f0, f1

                def at(i):
                    key[axis] = i
                    return tuple(key)

                seq = [work[at(i)] for i in range(L + 1)]
                # divided differences on consecutive integer nodes
                for o in range(1, L + 1):
                    for i in range(L, o - 1, -1):
                        seq[i] = (seq[i] - seq[i - 1]) * inv[o] % p
                # Newton-to-monomial (Horner through prod_{l<i}(x - l))
                out = [0] * (L + 1)
                out[0] = seq[L]
                deg = 0
                for i in range(L - 1, -1, -1):
                    node = i
                    for t in range(deg, -1, -1):
                        out[t + 1] = (out[t + 1] + out[t]) % p
                        out[t] = (out[t] * (-node) + (seq[i] if t == 0 else 0)) % p
                    deg += 1
                for i in range(L + 1):
                    work[at(i)] = out[i]
    return {m: c for m, c in work.items() if c}


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    return (r1 + (r2 - r1) * pow(m1, -1, m2) % m2 * m1) % (m1 * m2)


def _det_interp_rational(strand: StrandMatrix) -> TPoly:
    n = strand.nrows
    D = n
    mats, scales = strand.int_coefficient_matrices()
    bound = 1
    for i in range(n):
        rs = sum(sum(abs(mats[k][i][j]) for k in range(4)) for j in range(n))
        bound *= rs
        if rs == 0:
            return TPoly.zero()
    primes = []
    p = _DET_PRIMES_START
    need = 2 * bound
    have = 1
    while have <= need:
        p = next_prime(p)
        primes.append(p)
        have *= p
    pts = _simplex_points(D)
    residues: dict | None = None
    modulus = 1
    for p in primes:
        Cp = np.array([[[v % p for v in row] for row in mats[k]]
                       for k in range(4)], dtype=np.int64)
        tv = np.array([[i, j, k, 1] for (i, j, k) in pts], dtype=np.int64) % p
        mats_eval = np.tensordot(tv, Cp, axes=([1], [0])) % p
        dets = modp.batch_det_modp(mats_eval, p)
        vals = {pt: int(d) for pt, d in zip(pts, dets)}
        coeffs = _interp_simplex_modp(vals, D, p)
        if residues is None:
            residues = {m: c for m, c in coeffs.items()}
            modulus = p
        else:
            merged = {}
            for m in set(residues) | set(coeffs):
                merged[m] = _crt_pair(residues.get(m, 0), modulus,
                                      coeffs.get(m, 0), p)
            residues = merged
            modulus *= p
    if not residues:
        return TPoly.zero()
    scale = prod(scales)
    terms = {}
    for (i, j, k), c in residues.items():
        if c > modulus // 2:
            c -= modulus
        if c:
            terms[(i, j, k, D - i - j - k)] = RAT(c, scale)
    return TPoly(terms)


def _det_interp_modp(strand: StrandMatrix, p: int) -> TPoly:
    n = strand.nrows
    D = n
    if p <= D or p >= (1 << 30):
        return _det_ff(strand.tpoly_rows())
    Cp = np.zeros((4, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            cs = strand.entries[i][j]
            for k in range(4):
                if cs[k]:
                    Cp[k, i, j] = cs[k].n if isinstance(cs[k], ModP) else cs[k] % p
    pts = _simplex_points(D)
    tv = np.array([[i, j, k, 1] for (i, j, k) in pts], dtype=np.int64) % p
    mats_eval = np.tensordot(tv, Cp, axes=([1], [0])) % p
    dets = modp.batch_det_modp(mats_eval, p)
    vals = {pt: int(d) for pt, d in zip(pts, dets)}
    coeffs = _interp_simplex_modp(vals, D, p)
    return TPoly({(i, j, k, D - i - j - k): ModP(c, p)
                  for (i, j, k), c in coeffs.items()})


def det_tpoly(strand: StrandMatrix, backend: str = "interp") -> TPoly:
    """Exact determinant of the strand matrix, homogeneous of degree 2ab."""
    if strand.nrows != strand.ncols:
        raise NonSquare(f"{strand.nrows}x{strand.ncols}", module=_MOD,
                        op="det_tpoly")
    field_p = None
    for row in strand.entries:
        for cs in row:
            for c in cs:
                if isinstance(c, ModP):
                    field_p = c.p
                    break
    if backend == "ff":
        return _det_ff(strand.tpoly_rows())
    if backend == "interp":
        if field_p:
            return _det_interp_modp(strand, field_p)
        return _det_interp_rational(strand)
    if backend == "both":
        ff = _det_ff(strand.tpoly_rows())
        interp = det_tpoly(strand, "interp")
        if ff != interp:
            raise InternalContract("determinant backends disagree",
                                   module=_MOD, op="det_tpoly")
        return ff
    raise ValueError(f"unknown backend {backend!r}")


# -- root extraction -----------------------------------------------------------


def _poly_trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return _poly_trim(out)


def _poly_monic(a: list) -> list:
    lc = a[-1]
    return [_div(x, lc) for x in a]


def _poly_rem(a: list, b: list) -> list:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        f = _div(a[-1], lb)
        sh = len(a) - 1 - db
        for i, y in enumerate(b):
            a[sh + i] = a[sh + i] - f * y
        a.pop()
        _poly_trim(a)
    return a


def _poly_gcd(a: list, b: list) -> list:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        a, b = b, _poly_rem(a, b)
        _poly_trim(b)
    return _poly_monic(a) if a else a


def _poly_derivative(a: list) -> list:
    return _poly_trim([a[i] * i for i in range(1, len(a))])


def _poly_sub(a: list, b: list) -> list:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, y in enumerate(b):
        out[i] = out[i] - y
    return _poly_trim(out)


def _squarefree_multiplicities(q: list) -> set[int]:
    """Multiplicities occurring in the squarefree decomposition (Yun)."""
    out: set[int] = set()
    a = _poly_monic(_poly_trim(list(q)))
    if len(a) <= 1:
        return out
    d = _poly_derivative(a)
    g = _poly_gcd(a, d)
    if len(g) <= 1:
        return {1}
    c = _poly_quo(a, g)
    w = _poly_quo(d, g)
    i = 1
    while len(c) > 1:
        w2 = _poly_sub(w, _poly_derivative(c))
        y = _poly_gcd(c, w2)
        if len(y) > 1:
            out.add(i)
        c = _poly_quo(c, y)
        w = _poly_quo(w2, y)
        i += 1
    return out


def _poly_quo(a: list, b: list) -> list:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    out = [0] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        f = _div(a[-1], lb)
        sh = len(a) - 1 - db
        out[sh] = f
        for i, y in enumerate(b):
            a[sh + i] = a[sh + i] - f * y
        a.pop()
        _poly_trim(a)
    return _poly_trim(out)


def _line_multiplicity_gcd(delta: TPoly, one, rng: random.Random) -> int:
    """gcd of the root multiplicities of delta restricted to a random line
    (including the multiplicity lost at infinity)."""
    D = delta.total_degree()
    for _ in range(8):
        w = [one * rng.randint(-5, 5) for _ in range(4)]
        r = [one * rng.randint(-5, 5) for _ in range(4)]
        q: list = [0] * (D + 1)
        for mono, c in delta.terms.items():
            term = [c]
            for w_i, r_i, e in zip(w, r, mono):
                if e:
                    term = _poly_mul(term, _poly_pow([w_i, r_i], e))
            for i, x in enumerate(term):
                q[i] = q[i] + x
        q = _poly_trim(q)
        if not q:
            continue
        mults = _squarefree_multiplicities(q)
        defect = D - (len(q) - 1)
        if defect > 0:
            mults.add(defect)
        g = 0
        for m in mults:
            g = gcd(g, m)
        if g >= 1:
            return g
    return 1


def _poly_pow(base: list, e: int) -> list:
    out = [1]
    for _ in range(e):
        out = _poly_mul(out, base)
    return out


def _dict3_mul_trunc(a: dict, b: dict, cap: int) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        s1 = m1[0] + m1[1] + m1[2]
        for m2, c2 in b.items():
            if s1 + m2[0] + m2[1] + m2[2] > cap:
                continue
            m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _shift3(poly: dict, w: tuple, one) -> dict:
    """Compose with (x + w1, y + w2, z + w3)."""
    cache: dict = {}

    def shifted_pow(vi, e):
        if (vi, e) not in cache:
            out = [one * 0] * (e + 1)
            wv = w[vi]
            c = one
            # binomial expansion of (x + w)^e
            from math import comb

            for l in range(e + 1):
                out[l] = one * comb(e, l) * wv ** (e - l)
            cache[(vi, e)] = out
        return cache[(vi, e)]

    out: dict = {}
    for (e1, e2, e3), c in poly.items():
        p1 = shifted_pow(0, e1)
        p2 = shifted_pow(1, e2)
        p3 = shifted_pow(2, e3)
        for i1, a1 in enumerate(p1):
            if not a1:
                continue
            for i2, a2 in enumerate(p2):
                if not a2:
                    continue
                ca = c * a1 * a2
                for i3, a3 in enumerate(p3):
                    if not a3:
                        continue
                    m = (i1, i2, i3)
                    v = out.get(m, 0) + ca * a3
                    if v:
                        out[m] = v
                    else:
                        out.pop(m, None)
    return out


def _eth_root(delta: TPoly, e: int, one) -> TPoly | None:
    """Certified truncated-series e-th root, or None if delta is not an
    exact e-th power (up to scalar)."""
    D = delta.total_degree()
    if D % e:
        return None
    dstar = D // e
    deh = {(m[1], m[2], m[3]): c for m, c in delta.terms.items()}

    def eval_aff(w):
        tot = 0
        for (e1, e2, e3), c in deh.items():
            tot = tot + c * w[0] ** e1 * w[1] ** e2 * w[2] ** e3
        return tot

    w = None
    for cand in _shift_candidates():
        wc = tuple(one * x for x in cand)
        if eval_aff(wc):
            w = wc
            break
    if w is None:
        return None
    g = _shift3(deh, w, one)
    g0 = g[(0, 0, 0)]
    h = {m: _div(c, g0) for m, c in g.items()
         if m != (0, 0, 0) and m[0] + m[1] + m[2] <= dstar}
    inv_e = _div(one, one * e)
    res = {(0, 0, 0): one}
    pw = {(0, 0, 0): one}
    bc = one
    for k in range(1, dstar + 1):
        pw = _dict3_mul_trunc(pw, h, dstar)
        if not pw:
            break
        bc = bc * _div(inv_e - (k - 1), one * k)
        for m, c in pw.items():
            v = res.get(m, 0) + bc * c
            if v:
                res[m] = v
            else:
                res.pop(m, None)
    back = _shift3(res, tuple(-x for x in w), one)
    f_terms = {}
    for (i, j, k), c in back.items():
        if i + j + k > dstar:
            return None
        f_terms[(dstar - i - j - k, i, j, k)] = c
    f_cand = TPoly(f_terms).primitive_normalized()
    if f_cand.is_zero():
        return None
    power = f_cand**e
    lead = delta.leading_monomial()
    pc = power.coefficient(lead)
    if not pc:
        return None
    lam = _div(delta.leading_coefficient(), pc)
    if power.scale(lam) != delta:
        return None
    return f_cand


def _shift_candidates():
    yield (0, 0, 0)
    for a in range(1, 4):
        yield (a, 0, 0)
        yield (0, a, 0)
        yield (0, 0, a)
        yield (a, a, 1)
        yield (1, a, a)
        yield (-a, 1, a)


def _divisors_desc(n: int) -> list[int]:
    ds = [d for d in range(1, n + 1) if n % d == 0]
    return sorted(ds, reverse=True)


def extract_root(delta: TPoly) -> tuple[TPoly, int]:
    """Largest e with delta an exact e-th power, and the certified root F.

    Candidate exponents come from the gcd of root multiplicities on a random
    line restriction; each candidate is certified by exact re-powering, so a
    wrong pre-filter can only cost time, never correctness.  Falls back to
    e = 1 with F = delta normalized.
    """
    if delta.is_zero():
        raise ZeroDeterminant("strand determinant vanished", module=_MOD,
                              op="extract_root")
    if not delta.is_homogeneous():
        raise InternalContract("determinant is not homogeneous", module=_MOD,
                               op="extract_root")
    some = next(iter(delta.terms.values()))
    one = ModP(1, some.p) if isinstance(some, ModP) else RAT(1)
    D = delta.total_degree()
    rng = random.Random(0x5eed)
    m = _line_multiplicity_gcd(delta, one, rng)
    for e in _divisors_desc(gcd(m, D)):
        if e == 1:
            break
        root = _eth_root(delta, e, one)
        if root is not None:
            return root, e
    return delta.primitive_normalized(), 1


def verify_implicit(F: TPoly, U: SurfaceInput) -> bool:
    """Exact check that F(p0, p1, p2, p3) is identically zero."""
    pows: list[dict] = [{0: BiPoly({(0, 0, 0, 0): U.field.one})} for _ in range(4)]

    def power(i, k):
        tab = pows[i]
        if k not in tab:
            tab[k] = power(i, k - 1) * U.p[i]
        return tab[k]

    acc = BiPoly.zero()
    for mono, c in F.terms.items():
        term = BiPoly({(0, 0, 0, 0): c})
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        acc = acc + term
    return acc.is_zero()


@dataclass(frozen=True)
class ImplicitResult:
    delta: TPoly
    F: TPoly
    e: int
    deg_f: int

    def __post_init__(self):
        if self.e * self.deg_f != self.delta.total_degree():
            raise InternalContract("e * deg(F) != deg(Delta)", module=_MOD,
                                   op="ImplicitResult")

    def to_json_dict(self, include_delta: bool = False):
        out = {"F": str(self.F), "degF": self.deg_f, "e": self.e,
               "Delta_degree": self.delta.total_degree()}
        if include_delta:
            out["Delta"] = str(self.delta)
        return out
