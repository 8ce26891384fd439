"""Bidegree-strand computations on the ideal of a tensor product surface.

Everything here is plain linear algebra on one bigraded component at a time:
Hilbert-function values, syzygy strands, a sound basepoint-freeness
certificate, and the table of minimal first syzygies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import modp
from .bipoly import BiDegree, BiPoly, _div, monomial_basis
from .errors import InternalContract
from .fields import QQ, PrimeField, primes_from
from .linalg import ScalarMatrix, _field_rref, int_echelon, kernel_basis, rank

# fixed verification primes for rank lower bounds over Q (full rank mod p
# proves full rank over Q); chosen once so runs are reproducible
_CERT_PRIMES = tuple(primes_from(1 << 20, 2))


class SurfaceInput:
    """Four k-linearly independent bihomogeneous forms of bidegree (a,b)."""

    __slots__ = ("a", "b", "p", "field")

    def __init__(self, a: int, b: int, gens: Sequence[BiPoly], field=QQ):
        if a < 1 or b < 1:
            raise ValueError("need a >= 1 and b >= 1")
        gens = tuple(gens)
        if len(gens) != 4:
            raise ValueError("exactly four generators required")
        for g in gens:
            if g.is_zero():
                raise ValueError("zero generator")
            if g.bidegree() != (a, b):
                raise ValueError(f"generator {g} does not have bidegree ({a},{b})")
        self.a = a
        self.b = b
        self.p = gens
        self.field = field
        M = ScalarMatrix([g.coeff_vector((a, b), field) for g in gens])
        if rank(M) != 4:
            raise ValueError("generators are k-linearly dependent")

    @property
    def bidegree(self) -> BiDegree:
        return BiDegree(self.a, self.b)

    def __repr__(self):
        return f"SurfaceInput(a={self.a}, b={self.b}, field={self.field})"


@dataclass(frozen=True)
class SyzygyVector:
    """4-tuple of forms of a common bidegree annihilating the generators."""

    entries: tuple
    bidegree: BiDegree

    @classmethod
    def checked(cls, entries, deg, gens, *, module="strand_toolkit",
                op="syzygy_strand") -> "SyzygyVector":
        deg = BiDegree(*deg)
        acc = BiPoly.zero()
        for e, g in zip(entries, gens):
            if e and e.bidegree() != deg:
                raise InternalContract(f"entry bidegree {e.bidegree()} != {deg}",
                                       module=module, op=op)
            acc = acc + e * g
        if not acc.is_zero():
            raise InternalContract("tuple does not annihilate the generators",
                                   module=module, op=op)
        return cls(tuple(entries), deg)

    def scale(self, c) -> "SyzygyVector":
        return SyzygyVector(tuple(e.scale(c) for e in self.entries), self.bidegree)

    def shift(self, mono) -> "SyzygyVector":
        return SyzygyVector(tuple(e.shift(mono) for e in self.entries),
                            BiDegree(self.bidegree.c + mono[0] + mono[1],
                                     self.bidegree.d + mono[2] + mono[3]))

    def sign_normalized(self) -> "SyzygyVector":
        for e in self.entries:
            if e:
                lead = e.leading_coefficient()
                norm = e.sign_normalized().leading_coefficient()
                if lead == norm:
                    return self
                return self.scale(_div(norm, lead))
        return self

    def flatten(self, deg, field) -> list:
        """Concatenate the four coefficient vectors on monomial_basis(deg)."""
        out: list = []
        for e in self.entries:
            out.extend(e.coeff_vector(deg, field))
        return out

    def __str__(self):
        return "[" + ", ".join(str(e) for e in self.entries) + "]"


def multiplication_matrix(U: SurfaceInput, deg: BiDegree) -> ScalarMatrix:
    """Matrix of (R_deg)^4 -> R_{deg+(a,b)}, (h_i) -> sum h_i p_i, columns in
    generator-major order over monomial_basis(deg)."""
    deg = BiDegree(*deg)
    tgt = deg + U.bidegree
    tgt_basis = monomial_basis(tgt)
    index = {m: i for i, m in enumerate(tgt_basis)}
    cols = []
    for g in U.p:
        for m in monomial_basis(deg):
            col = [U.field.zero] * len(tgt_basis)
            for mono, c in g.shift(m).terms.items():
                col[index[mono]] = c
            cols.append(col)
    return ScalarMatrix.from_columns(cols, nrows=len(tgt_basis))


def ideal_component_dim(U: SurfaceInput, deg) -> int:
    """dim_k of the bidegree-`deg` component of the ideal (p_0..p_3)."""
    deg = BiDegree(*deg)
    low = deg.minus(U.bidegree)
    if low is None:
        return 0
    return rank(multiplication_matrix(U, low))


@dataclass(frozen=True)
class BasepointCertificate:
    certified: bool
    level: int | None
    cap: int

    def to_json_dict(self):
        return {"certified": self.certified, "level": self.level, "cap": self.cap}


def _int_coeff(c, p: int) -> int:
    """Reduce a coefficient (int, rational, or ModP) mod p."""
    if isinstance(c, int):
        return c % p
    if hasattr(c, "n"):
        return c.n % p
    den = int(c.denominator) % p
    if den == 0:
        raise ZeroDivisionError("denominator divisible by verification prime")
    return int(c.numerator) % p * pow(den, p - 2, p) % p


def multiplication_matrix_modp(U: SurfaceInput, deg: BiDegree, p: int) -> np.ndarray:
    """Reduction of the stacked multiplication matrix modulo p."""
    deg = BiDegree(*deg)
    tgt_basis = monomial_basis(deg + U.bidegree)
    index = {m: i for i, m in enumerate(tgt_basis)}
    cols = []
    for g in U.p:
        red = [(mono, _int_coeff(c, p)) for mono, c in g.terms.items()]
        for m in monomial_basis(deg):
            col = np.zeros(len(tgt_basis), dtype=np.int64)
            for mono, c in red:
                col[index[(mono[0] + m[0], mono[1] + m[1],
                           mono[2] + m[2], mono[3] + m[3])]] = c
            cols.append(col)
    return np.stack(cols, axis=1)


def _component_full_rank_modp(U: SurfaceInput, low: BiDegree, full: int) -> bool:
    """Rank lower bound mod the fixed verification primes.

    A full-rank reduction proves full rank over the exact field; this is the
    sound direction the certificate relies on.
    """
    if isinstance(U.field, PrimeField):
        if U.field.p >= (1 << 30):
            return rank(multiplication_matrix(U, low)) == full
        primes = (U.field.p,)
    else:
        primes = _CERT_PRIMES
    for p in primes:
        try:
            A = multiplication_matrix_modp(U, low, p)
        except ZeroDivisionError:
            continue
        if modp.rank_modp(A, p) == full:
            return True
    return False


def basepoint_free_certificate(U: SurfaceInput, cap: int | None = None) -> BasepointCertificate:
    """Search N = max(a,b)..cap for I_{(N,N)} = R_{(N,N)}.

    Containing the full (N,N) component forces the ideal to contain the N-th
    power of the irrelevant ideal, hence an empty vanishing locus on P1xP1.
    The rank is certified by a full-rank reduction modulo fixed primes, which
    is sound for the exact field; Inconclusive aborts downstream stages.
    """
    if cap is None:
        cap = 2 * (U.a + U.b)
    if cap < max(U.a, U.b):
        raise ValueError("cap below max(a, b)")
    for N in range(max(U.a, U.b), cap + 1):
        low = BiDegree(N - U.a, N - U.b)
        if _component_full_rank_modp(U, low, (N + 1) ** 2):
            return BasepointCertificate(True, N, cap)
    return BasepointCertificate(False, None, cap)


def syzygy_strand(U: SurfaceInput, deg) -> list[SyzygyVector]:
    """Exact basis of the syzygies of bidegree `deg`, reassembled from the
    kernel of the stacked multiplication map."""
    deg = BiDegree(*deg)
    M = multiplication_matrix(U, deg)
    vectors = kernel_basis(M, field=U.field)
    basis = monomial_basis(deg)
    block = len(basis)
    out = []
    for v in vectors:
        entries = []
        for i in range(4):
            entries.append(BiPoly.from_coeff_vector(v[i * block : (i + 1) * block], deg))
        out.append(SyzygyVector.checked(entries, deg, U.p))
    return out


@dataclass(frozen=True)
class TableEntry:
    c: int
    d: int
    multiplicity: int

    def to_json_dict(self):
        return {"c": self.c, "d": self.d, "multiplicity": self.multiplicity}


def minimal_syzygy_table(U: SurfaceInput, box, strand_fn: Callable | None = None
                          ) -> list[TableEntry]:
    """Multiset of bidegrees of minimal first syzygies within `box`.

    Bidegrees are swept in increasing total degree (ties by c ascending); at
    each (c,d) the new-minimal count is dim of the strand minus the dimension
    spanned by monomial multiples of previously found minimal syzygies, and
    representatives completing that span are kept for later cells.
    """
    box = BiDegree(*box)
    strand_fn = strand_fn or syzygy_strand
    found: list[SyzygyVector] = []
    entries: list[TableEntry] = []
    sweep = sorted(((c, d) for c in range(box.c + 1) for d in range(box.d + 1)),
                   key=lambda cd: (cd[0] + cd[1], cd[0]))
    for c, d in sweep:
        deg = BiDegree(c, d)
        strand = strand_fn(U, deg)
        if not strand:
            continue
        cols: list[list] = []
        for sy in found:
            shift_deg = deg.minus(sy.bidegree)
            if shift_deg is None:
                continue
            for m in monomial_basis(shift_deg):
                cols.append(sy.shift(m).flatten(deg, U.field))
        nprod = len(cols)
        for sy in strand:
            cols.append(sy.flatten(deg, U.field))
        pivots = _column_pivots(cols, U.field)
        new = [j - nprod for j in pivots if j >= nprod]
        if not new:
            continue
        entries.append(TableEntry(c, d, len(new)))
        found.extend(strand[j] for j in new)
    return entries


def _column_pivots(cols: list[list], field) -> list[int]:
    """Indices of a greedy left-to-right independent subset of the columns."""
    if not cols:
        return []
    nrows = len(cols[0])
    if isinstance(field, PrimeField):
        M = ScalarMatrix([[col[i] for col in cols] for i in range(nrows)],
                         ncols=len(cols))
        return list(_field_rref(M)[1])
    from math import lcm

    ints = []
    for col in cols:
        den = 1
        for x in col:
            if not isinstance(x, int):
                den = lcm(den, int(x.denominator))
        ints.append([int(x) if isinstance(x, int)
                     else int(x.numerator) * (den // int(x.denominator)) for x in col])
    rows = [[ints[j][i] for j in range(len(cols))] for i in range(nrows)]
    pivots, _ = int_echelon(rows, len(cols))
    return pivots


def table_to_json(entries: list[TableEntry]) -> list[dict]:
    return [e.to_json_dict() for e in entries]
