"""Bihomogeneous polynomials in k[s,t,u,v], polynomials in k[T0..T3], and
their tensor product.

Monomial orders are fixed globally so that every matrix built from monomial
bases is reproducible bit-for-bit:

* k[s,t,u,v]: exponent tuples (es, et, eu, ev).  The basis of the bidegree
  (c,d) component is enumerated with the s-exponent descending, then the
  u-exponent descending, e.g. (1,1) -> [su, sv, tu, tv].  The order key is
  (es+et, eu+ev, es, eu); the leading monomial of a polynomial is the maximal
  one, and printed terms run from leading downwards.
* k[T0..T3]: exponent tuples (e0, e1, e2, e3), graded reverse lexicographic
  with T0 > T1 > T2 > T3; printed terms run from the grevlex-leading monomial
  downwards.

All polynomial values are immutable after construction and safe to share.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, NamedTuple

from .errors import DivisionByZero, NotDivisible
from .fields import QQ, RAT, ModP


class BiDegree(NamedTuple):
    c: int
    d: int

    def __add__(self, other):
        return BiDegree(self.c + other[0], self.d + other[1])

    def minus(self, other) -> "BiDegree | None":
        """Componentwise difference, or None if any component goes negative."""
        c, d = self.c - other[0], self.d - other[1]
        if c < 0 or d < 0:
            return None
        return BiDegree(c, d)

    def leq(self, other) -> bool:
        return self.c <= other[0] and self.d <= other[1]


def r_key(m: tuple) -> tuple:
    """Order key for k[s,t,u,v] monomials; leading = max."""
    return (m[0] + m[1], m[2] + m[3], m[0], m[2])


def t_key(m: tuple) -> tuple:
    """Grevlex order key for k[T0..T3] monomials; leading = max."""
    return (m[0] + m[1] + m[2] + m[3], (-m[3], -m[2], -m[1], -m[0]))


@lru_cache(maxsize=None)
def monomial_basis(deg: BiDegree | tuple) -> tuple:
    """Exponent tuples of the monomial basis of R_(c,d), in the global order.

    The component has (c+1)(d+1) elements.
    """
    c, d = deg
    return tuple(
        (es, c - es, eu, d - eu)
        for es in range(c, -1, -1)
        for eu in range(d, -1, -1)
    )


def _add_exps(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _div(a, b):
    """Exact coefficient division; int/int promotes to a rational."""
    if isinstance(a, int) and isinstance(b, int):
        return RAT(a, b)
    return a / b


def _terms_add(p: dict, q: dict) -> dict:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v = v + c
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def _terms_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _add_exps(m1, m2)
            c = c1 * c2
            v = out.get(m)
            if v is None:
                if c:
                    out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
    return out


def _terms_scale(c, p: dict) -> dict:
    if not c:
        return {}
    return {m: c * v for m, v in p.items()}


def _terms_exact_divide(p: dict, q: dict, keyfn) -> dict:
    """Exact quotient of term dicts under the given monomial order.

    Peels the leading term of the running remainder against the leading term
    of q; exactness forces this greedy choice, so any mismatch proves
    non-divisibility.
    """
    if not q:
        raise DivisionByZero("division by the zero polynomial")
    qlead = max(q, key=keyfn)
    qc = q[qlead]
    rem = dict(p)
    quot: dict = {}
    while rem:
        rlead = max(rem, key=keyfn)
        diff = tuple(a - b for a, b in zip(rlead, qlead))
        if any(e < 0 for e in diff):
            raise NotDivisible("no exact quotient exists")
        c = _div(rem[rlead], qc)
        quot[diff] = c
        for m, v in q.items():
            mm = _add_exps(diff, m)
            nv = rem.get(mm, 0) - c * v
            if nv:
                rem[mm] = nv
            else:
                rem.pop(mm, None)
    return quot


class _SparsePoly:
    """Shared behaviour of BiPoly and TPoly (sparse exponent-dict polys)."""

    __slots__ = ("terms",)
    _keyfn = None  # monomial order key, set by subclasses
    _nvars = 0

    def __init__(self, terms: dict | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def monomial(cls, exps: tuple, coeff=1):
        if len(exps) != cls._nvars:
            raise ValueError(f"expected {cls._nvars} exponents")
        return cls({tuple(exps): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, _SparsePoly):
            return NotImplemented
        return type(self) is type(other) and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self.terms.items())))

    def __add__(self, other):
        self._check(other)
        return type(self)(_terms_add(self.terms, other.terms))

    def __sub__(self, other):
        self._check(other)
        return type(self)(_terms_add(self.terms, _terms_scale(-1, other.terms)))

    def __neg__(self):
        return type(self)(_terms_scale(-1, self.terms))

    def __mul__(self, other):
        self._check(other)
        return type(self)(_terms_mul(self.terms, other.terms))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = type(self)({(0,) * self._nvars: 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def scale(self, c):
        return type(self)(_terms_scale(c, self.terms))

    def coefficient(self, exps: tuple):
        """Coefficient of the given monomial, or 0 if absent."""
        return self.terms.get(tuple(exps), 0)

    def leading_monomial(self) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=self._keyfn)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def exact_divide(self, q):
        """Return r with self = q*r, raising NotDivisible otherwise."""
        self._check(q)
        return type(self)(_terms_exact_divide(self.terms, q.terms, type(self)._keyfn))

    def evaluate(self, vals):
        """Evaluate at a point; vals are field elements or ints."""
        total = 0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(vals, m):
                if e:
                    v = v * x**e
            total = total + v
        return total

    def sign_normalized(self):
        """Scale by a unit so the leading coefficient is positive (over Q)
        or exactly 1 (over F_p).  The zero polynomial is returned as is."""
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        if isinstance(lc, ModP):
            return self.scale(ModP(1, lc.p) / lc)
        return self.scale(-1) if lc < 0 else self

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self._keyfn(kv[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(
                f"{name}^{e}" if e > 1 else name
                for name, e in zip(self._varnames, m)
                if e
            )
            if isinstance(c, ModP):
                cs, neg = str(c.n), False
            else:
                neg = c < 0
                cs = str(-c if neg else c)
            if mono and cs == "1":
                body = mono
            elif mono:
                body = f"{cs}*{mono}"
            else:
                body = cs
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class BiPoly(_SparsePoly):
    """Sparse polynomial in s,t,u,v; bidegree = (deg in s,t, deg in u,v)."""

    __slots__ = ()
    _keyfn = staticmethod(r_key)
    _nvars = 4
    _varnames = ("s", "t", "u", "v")

    def bidegree(self) -> BiDegree | None:
        """BiDegree of a bihomogeneous polynomial, None for 0.

        Raises ValueError if the polynomial is not bihomogeneous.
        """
        deg = None
        for m in self.terms:
            bd = (m[0] + m[1], m[2] + m[3])
            if deg is None:
                deg = bd
            elif deg != bd:
                raise ValueError(f"not bihomogeneous: {self}")
        return BiDegree(*deg) if deg is not None else None

    def is_bihomogeneous(self) -> bool:
        try:
            self.bidegree()
            return True
        except ValueError:
            return False

    def shift(self, mono: tuple) -> "BiPoly":
        """Multiply by a single monomial (an exponent shift)."""
        return BiPoly({_add_exps(m, mono): c for m, c in self.terms.items()})

    def swap_st_uv(self) -> "BiPoly":
        """Exchange s<->u and t<->v; an involution sending (a,b) to (b,a)."""
        return BiPoly({(m[2], m[3], m[0], m[1]): c for m, c in self.terms.items()})

    def coeff_vector(self, deg: BiDegree | tuple, field) -> list:
        """Coefficients on monomial_basis(deg); raises if a term is outside."""
        basis = monomial_basis(BiDegree(*deg))
        index = {m: i for i, m in enumerate(basis)}
        vec = [field.zero] * len(basis)
        for m, c in self.terms.items():
            vec[index[m]] = c
        return vec

    @classmethod
    def from_coeff_vector(cls, vec, deg: BiDegree | tuple) -> "BiPoly":
        basis = monomial_basis(BiDegree(*deg))
        return cls({m: c for m, c in zip(basis, vec) if c})

    @classmethod
    def parse(cls, text: str, field=QQ) -> "BiPoly":
        return cls(_parse(text, _R_VARS, 4, field))


class TPoly(_SparsePoly):
    """Sparse polynomial in T0,T1,T2,T3, graded by total degree."""

    __slots__ = ()
    _keyfn = staticmethod(t_key)
    _nvars = 4
    _varnames = ("T0", "T1", "T2", "T3")

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(m) for m in self.terms}
        return len(degs) <= 1

    def primitive_normalized(self) -> "TPoly":
        """Canonical scalar normalization: over Q, integer coefficients with
        content 1 and positive leading coefficient; over F_p, monic."""
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        if isinstance(lc, ModP):
            return self.scale(ModP(1, lc.p) / lc)
        from math import gcd, lcm

        den = 1
        for c in self.terms.values():
            den = lcm(den, int(c.denominator))
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c.numerator) * (den // int(c.denominator)))
        scalar = RAT(den, g)
        if lc < 0:
            scalar = -scalar
        return self.scale(scalar)

    def substitute_linear(self, rows) -> "TPoly":
        """Substitute T_i -> sum_j rows[i][j] * T_j."""
        forms = [TPoly({(0, 0, 0, 0)[:j] + (1,) + (0, 0, 0)[j:]: c
                        for j, c in enumerate(row) if c}) for row in rows]
        out = TPoly.zero()
        for m, c in self.terms.items():
            term = TPoly({(0, 0, 0, 0): c})
            for f, e in zip(forms, m):
                if e:
                    term = term * f**e
            out = out + term
        return out

    @classmethod
    def parse(cls, text: str, field=QQ) -> "TPoly":
        return cls(_parse(text, _T_VARS, 4, field))


class RSPoly(_SparsePoly):
    """Sparse polynomial in all eight variables s,t,u,v,T0..T3.

    Exponent tuples are (es,et,eu,ev,e0,e1,e2,e3).  Used to carry the image
    of a syzygy under the first differential, a0*T0 + ... + a3*T3.
    """

    __slots__ = ()
    _nvars = 8
    _varnames = ("s", "t", "u", "v", "T0", "T1", "T2", "T3")

    @staticmethod
    def _keyfn(m):
        return (r_key(m[:4]), t_key(m[4:]))

    @classmethod
    def from_parts(cls, bp: BiPoly, t_exps: tuple = (0, 0, 0, 0)) -> "RSPoly":
        te = tuple(t_exps)
        return cls({m + te: c for m, c in bp.terms.items()})

    @classmethod
    def d1_image(cls, entries) -> "RSPoly":
        """sum_i entries[i] * T_i for a 4-tuple of BiPoly."""
        out = cls.zero()
        for i, bp in enumerate(entries):
            te = tuple(1 if j == i else 0 for j in range(4))
            out = out + cls.from_parts(bp, te)
        return out

    def tridegree(self):
        """Set of (st-degree, uv-degree, T-degree) triples present."""
        return {(m[0] + m[1], m[2] + m[3], sum(m[4:])) for m in self.terms}

    def t_coefficients_at(self, r_mono: tuple) -> list:
        """For a linear-in-T element: the vector [c0..c3] with coefficient
        c_i on r_mono * T_i; entries default to integer 0."""
        out = [0, 0, 0, 0]
        rm = tuple(r_mono)
        for m, c in self.terms.items():
            if m[:4] != rm:
                continue
            te = m[4:]
            if sum(te) != 1:
                raise ValueError("entry is not linear in T")
            out[te.index(1)] = c
        return out


# -- parsing ------------------------------------------------------------------

_R_VARS = {"s": 0, "t": 1, "u": 2, "v": 3}
_T_VARS = {"T0": 0, "T1": 1, "T2": 2, "T3": 3}


def _parse(text: str, var_lookup: dict, nvars: int, field) -> dict:
    """Parse `±c*x^i*y^j` terms; '*' and '^1' optional, coefficients are
    integers or num/den rationals.  Round-trips the str() format exactly."""
    s = text.replace("−", "-").replace("·", "*")
    terms: dict = {}
    i, n = 0, len(s)

    def skip_ws(i):
        while i < n and s[i].isspace():
            i += 1
        return i

    i = skip_ws(i)
    if i == n:
        raise ValueError("empty polynomial text")
    first = True
    while i < n:
        sign = 1
        i = skip_ws(i)
        if i < n and s[i] in "+-":
            if s[i] == "-":
                sign = -1
            i += 1
        elif not first:
            raise ValueError(f"expected '+' or '-' at position {i} in {text!r}")
        first = False
        i = skip_ws(i)
        # optional coefficient
        num_str = ""
        j = i
        while j < n and s[j].isdigit():
            j += 1
        coeff = None
        if j > i:
            num_str = s[i:j]
            i = j
            if i < n and s[i] == "/":
                i += 1
                j = i
                while j < n and s[j].isdigit():
                    j += 1
                if j == i:
                    raise ValueError(f"bad rational at position {i} in {text!r}")
                coeff = field.parse(f"{num_str}/{s[i:j]}")
                i = j
            else:
                coeff = field.parse(num_str)
        exps = [0] * nvars
        saw_var = False
        while True:
            i = skip_ws(i)
            if i < n and s[i] == "*":
                i += 1
                i = skip_ws(i)
            if i >= n or s[i] in "+-":
                break
            # variable name: single letter, or letter+digit (T0..T3)
            name = s[i]
            if name + (s[i + 1] if i + 1 < n else "") in var_lookup:
                name = s[i : i + 2]
            if name not in var_lookup:
                raise ValueError(f"unknown variable at position {i} in {text!r}")
            i += len(name)
            e = 1
            if i < n and s[i] == "^":
                i += 1
                j = i
                while j < n and s[j].isdigit():
                    j += 1
                if j == i:
                    raise ValueError(f"bad exponent at position {i} in {text!r}")
                e = int(s[i:j])
                i = j
            exps[var_lookup[name]] += e
            saw_var = True
        if coeff is None:
            if not saw_var:
                raise ValueError(f"empty term in {text!r}")
            coeff = field.one
        if sign < 0:
            coeff = -coeff
        m = tuple(exps)
        v = terms.get(m)
        v = coeff if v is None else v + coeff
        if v:
            terms[m] = v
        else:
            terms.pop(m, None)
        i = skip_ws(i)
    return terms
