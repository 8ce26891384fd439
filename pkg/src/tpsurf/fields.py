"""Exact coefficient fields.

Two backends: arbitrary-precision rationals (gmpy2.mpq when available,
fractions.Fraction otherwise) and a prime field F_p for a user-chosen prime.
Every computation in the package is exact; there is no floating point in any
arithmetic path.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as _RAT
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    from fractions import Fraction as _RAT

RAT = _RAT

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    n += 1
    if n <= 2:
        return 2
    if n % 2 == 0:
        n += 1
    while not is_prime(n):
        n += 2
    return n


def primes_from(start: int, count: int) -> list[int]:
    """`count` consecutive primes, the first one > start."""
    out = []
    p = start
    for _ in range(count):
        p = next_prime(p)
        out.append(p)
    return out


class ModP:
    """Element of F_p with operator arithmetic; ints coerce on the fly."""

    __slots__ = ("n", "p")

    def __init__(self, n: int, p: int):
        self.n = n % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other.n
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return NotImplemented
        return ModP(self.n + m, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return NotImplemented
        return ModP(self.n - m, self.p)

    def __rsub__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return NotImplemented
        return ModP(m - self.n, self.p)

    def __mul__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return NotImplemented
        return ModP(self.n * m, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return NotImplemented
        if m == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return ModP(self.n * pow(m, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        m = self._coerce(other)
        if m is NotImplemented:
            return NotImplemented
        if self.n == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return ModP(m * pow(self.n, self.p - 2, self.p), self.p)

    def __pow__(self, e: int):
        if e < 0:
            return (ModP(1, self.p) / self) ** (-e)
        return ModP(pow(self.n, e, self.p), self.p)

    def __neg__(self):
        return ModP(-self.n, self.p)

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.n == other.n
        if isinstance(other, int):
            return self.n == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.p))

    def __bool__(self):
        return self.n != 0

    def __repr__(self):
        return str(self.n)


class RationalField:
    """The rationals Q; elements are gmpy2.mpq (or Fraction) instances."""

    name = "QQ"
    characteristic = 0

    def of(self, x):
        if isinstance(x, float):
            raise TypeError("floats are not exact; pass int, str or rational")
        return RAT(x)

    @property
    def zero(self):
        return RAT(0)

    @property
    def one(self):
        return RAT(1)

    def parse(self, text: str):
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            return RAT(int(num), int(den))
        return RAT(int(text))

    def fmt(self, x) -> str:
        return str(x)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField:
    """F_p for a prime p; elements are ModP instances."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"F_{p}"

    @property
    def characteristic(self):
        return self.p

    def of(self, x):
        if isinstance(x, ModP):
            if x.p != self.p:
                raise ValueError("element of a different prime field")
            return x
        if isinstance(x, int):
            return ModP(x, self.p)
        if isinstance(x, float):
            raise TypeError("floats are not exact")
        # rationals reduce when the denominator is a unit mod p
        num = int(x.numerator)
        den = int(x.denominator)
        if den % self.p == 0:
            raise ZeroDivisionError(f"denominator divisible by {self.p}")
        return ModP(num * pow(den, self.p - 2, self.p), self.p)

    @property
    def zero(self):
        return ModP(0, self.p)

    @property
    def one(self):
        return ModP(1, self.p)

    def parse(self, text: str):
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            return self.of(ModP(int(num), self.p) / int(den))
        return ModP(int(text), self.p)

    def fmt(self, x) -> str:
        return str(x.n if isinstance(x, ModP) else x)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))


QQ = RationalField()


def field_from_spec(spec: str):
    """Parse a field spec string: 'qq' or 'fp:<prime>'."""
    spec = spec.strip().lower()
    if spec in ("qq", "q", "rational", "rationals"):
        return QQ
    if spec.startswith("fp:"):
        return PrimeField(int(spec[3:]))
    raise ValueError(f"unknown field spec {spec!r} (expected 'qq' or 'fp:<p>')")
