"""Exact truncated Laurent series in q on a 1/24-integral exponent grid.

Exponents are stored as integers in units of 1/24, so eta-type prefactors
q^(delta/24) are exact.  Coefficients are exact rationals (Python int or
Fraction; integral values are normalised to int).  Every series carries
trunc24, the first unknown exponent: asking for a coefficient at or beyond
trunc24 is a hard error, never a silent zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Union

from .errors import ExactnessError, SeriesError, TruncationError

Scalar = Union[int, Fraction]


def _norm(value) -> Scalar:
    """Normalise to int/Fraction; reject inexact types outright."""
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    raise ExactnessError(
        f"coefficients must be exact (int or Fraction), got {type(value).__name__}"
    )


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _check_prime(ell: int) -> None:
    if not is_prime(ell):
        raise SeriesError(f"{ell} is not prime")


class QSeries:
    """Sparse exact q-series: known coefficients live at exponents < trunc24.

    The canonical zero series has no stored entries.  Instances are treated
    as immutable; all arithmetic returns new objects.
    """

    __slots__ = ("_c", "trunc24")

    def __init__(self, entries: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]],
                 trunc24: int):
        items = entries.items() if isinstance(entries, Mapping) else entries
        t = int(trunc24)
        c: dict[int, Scalar] = {}
        for e, v in items:
            if e >= t:
                continue
            v = _norm(v)
            if v:
                c[int(e)] = v
        self._c = c
        self.trunc24 = t

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, trunc24: int) -> "QSeries":
        return cls({}, trunc24)

    @classmethod
    def constant(cls, value: Scalar, trunc24: int) -> "QSeries":
        return cls({0: value}, trunc24)

    @classmethod
    def monomial(cls, exponent24: int, trunc24: int, coeff: Scalar = 1) -> "QSeries":
        return cls({exponent24: coeff}, trunc24)

    @classmethod
    def from_q_coeffs(cls, coeffs: Iterable[Scalar], trunc24: int,
                      start: int = 0) -> "QSeries":
        """Build from integer-exponent coefficients a(start), a(start+1), ..."""
        return cls({24 * (start + i): v for i, v in enumerate(coeffs)}, trunc24)

    # -- structure ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._c

    @property
    def offset24(self) -> int:
        """Lowest stored exponent; for the zero series, the truncation bound
        (everything below it is known to vanish)."""
        return min(self._c) if self._c else self.trunc24

    @property
    def is_integer_grid(self) -> bool:
        return all(e % 24 == 0 for e in self._c)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._c))

    def terms(self) -> list[tuple[int, Scalar]]:
        return sorted(self._c.items())

    def leading(self) -> tuple[int, Scalar]:
        if not self._c:
            raise SeriesError("zero series has no leading term")
        e = min(self._c)
        return e, self._c[e]

    def coeff24(self, exponent24: int) -> Scalar:
        if exponent24 >= self.trunc24:
            raise TruncationError(
                f"coefficient at q^({exponent24}/24) is beyond truncation "
                f"q^({self.trunc24}/24)"
            )
        return self._c.get(exponent24, 0)

    def coeff_q(self, n: int) -> Scalar:
        """Coefficient of q^n (integer exponent)."""
        return self.coeff24(24 * n)

    def agrees_with(self, other: "QSeries") -> bool:
        """Exact equality on the overlap of the two known ranges."""
        t = min(self.trunc24, other.trunc24)
        keys = {e for e in self._c if e < t} | {e for e in other._c if e < t}
        return all(self._c.get(e, 0) == other._c.get(e, 0) for e in keys)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.trunc24 == other.trunc24 and self._c == other._c

    def __bool__(self) -> bool:
        return bool(self._c)

    # -- ring operations -------------------------------------------------

    def _binop_add(self, other: "QSeries", sign: int) -> "QSeries":
        t = min(self.trunc24, other.trunc24)
        out = dict(self._c)
        for e, v in other._c.items():
            out[e] = out.get(e, 0) + sign * v
        return QSeries(out, t)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other, self.trunc24)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._binop_add(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other, self.trunc24)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._binop_add(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self) -> "QSeries":
        return QSeries({e: -v for e, v in self._c.items()}, self.trunc24)

    def scaled(self, factor: Scalar) -> "QSeries":
        factor = _norm(factor)
        if factor == 0:
            return QSeries.zero(self.trunc24)
        return QSeries({e: v * factor for e, v in self._c.items()}, self.trunc24)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        # product coefficient at e is known iff every split of e lands in
        # both known ranges
        t = min(self.trunc24 + other.offset24, other.trunc24 + self.offset24)
        small, big = (self._c, other._c) if len(self._c) <= len(other._c) \
            else (other._c, self._c)
        big_keys = sorted(big)
        out: dict[int, Scalar] = {}
        for ea, ca in small.items():
            for eb in big_keys:
                e = ea + eb
                if e >= t:
                    break
                cb = big[eb]
                prev = out.get(e)
                out[e] = ca * cb if prev is None else prev + ca * cb
        return QSeries(out, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _norm(other)
            if other == 0:
                raise SeriesError("division by zero scalar")
            return self.scaled(Fraction(1, 1) / other)
        if not isinstance(other, QSeries):
            return NotImplemented
        return _divide(self, other)

    def invert(self) -> "QSeries":
        if self.is_zero:
            raise SeriesError("non-invertible: zero series")
        one = QSeries.constant(1, self.trunc24 - self.offset24)
        return _divide(one, self)

    def __pow__(self, k: int) -> "QSeries":
        if not isinstance(k, int):
            raise SeriesError("series powers must be integers")
        if k == 0:
            return QSeries.constant(1, self.trunc24 - self.offset24)
        if k < 0:
            return self.invert() ** (-k)
        result = None
        base = self
        n = k
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- reindexing -------------------------------------------------------

    def shift(self, delta24: int) -> "QSeries":
        """Multiply by the exact monomial q^(delta24/24)."""
        return QSeries({e + delta24: v for e, v in self._c.items()},
                       self.trunc24 + delta24)

    def rescale(self, k: int) -> "QSeries":
        """Substitute q -> q^k (k >= 1)."""
        if k < 1:
            raise SeriesError("rescale factor must be >= 1")
        return QSeries({e * k: v for e, v in self._c.items()}, self.trunc24 * k)

    def truncate(self, trunc24: int) -> "QSeries":
        if trunc24 > self.trunc24:
            raise TruncationError(
                f"cannot extend truncation from {self.trunc24} to {trunc24}"
            )
        return QSeries(self._c, trunc24)

    # -- operators from the congruence toolkit ----------------------------

    def u_operator(self, ell: int) -> "QSeries":
        """Atkin-Lehner style U_ell: sum a(n) q^n  ->  sum a(ell*n) q^n.

        Requires integer exponents throughout; truncation drops to
        floor(trunc/ell) in integer-q units.
        """
        _check_prime(ell)
        if not self.is_integer_grid:
            raise SeriesError(
                "U_ell undefined on fractional-exponent series; "
                "absorb prefactor first"
            )
        if self.trunc24 % 24 != 0:
            raise SeriesError("U_ell requires truncation on the integer grid")
        out = {}
        for e, v in self._c.items():
            n = e // 24
            if n % ell == 0:
                out[24 * (n // ell)] = v
        return QSeries(out, 24 * ((self.trunc24 // 24) // ell))

    def progression_slice(self, lam: int, ell: int, alpha: int,
                          target: int = 1) -> "QSeries":
        """Extract coefficients on the class lam*n = target (mod ell^alpha)
        and compress exponents: output coefficient of q^m is a(ell^alpha*m + r)
        with r the unique residue solving the congruence.
        """
        _check_prime(ell)
        if alpha < 1:
            raise SeriesError("slice depth alpha must be >= 1")
        if gcd(lam, ell) != 1:
            raise SeriesError(
                f"gcd({lam}, {ell}) != 1: residue class is ill-defined"
            )
        if not self.is_integer_grid:
            raise SeriesError("slicing requires integer exponents")
        mod = ell ** alpha
        r = (pow(lam, -1, mod) * target) % mod
        out = {}
        for e, v in self._c.items():
            n = e // 24
            if n % mod == r:
                out[24 * ((n - r) // mod)] = v
        # first unknown integer exponent, then first unknown output index
        n_unknown = -((-self.trunc24) // 24)
        m_unknown = -(-(n_unknown - r) // mod)
        return QSeries(out, 24 * m_unknown)

    def padic_valuation(self, ell: int) -> "ValuationReport":
        """Minimum ell-adic valuation over stored coefficients.

        Every inspected coefficient must be an integer; min is None (read:
        +infinity) when the series is zero.
        """
        _check_prime(ell)
        best: int | None = None
        witness: int | None = None
        checked = 0
        for e in sorted(self._c):
            v = self._c[e]
            if not isinstance(v, int):
                raise ExactnessError(
                    f"non-integer coefficient {v} at q^({e}/24)"
                )
            checked += 1
            val = 0
            while v % ell == 0:
                v //= ell
                val += 1
            if best is None or val < best:
                best, witness = val, e
        return ValuationReport(prime=ell, min_valuation=best,
                               witness_exponent24=witness, terms_checked=checked)

    # -- rendering / serialisation ----------------------------------------

    def __repr__(self) -> str:
        return f"QSeries({self.format(max_terms=6)})"

    def format(self, max_terms: int = 12) -> str:
        if not self._c:
            return f"0 + O({_expstr(self.trunc24)})"
        parts = []
        for e, v in self.terms()[:max_terms]:
            parts.append(_termstr(e, v, first=not parts))
        if len(self._c) > max_terms:
            parts.append("+ ...")
        parts.append(f"+ O({_expstr(self.trunc24)})")
        return " ".join(parts)

    def to_json_obj(self) -> dict:
        return {
            "terms": [[e, str(Fraction(v).numerator), str(Fraction(v).denominator)]
                      for e, v in self.terms()],
            "trunc24": self.trunc24,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "QSeries":
        entries = {int(e): Fraction(int(num), int(den))
                   for e, num, den in obj["terms"]}
        return cls(entries, int(obj["trunc24"]))


def _divide(a: QSeries, b: QSeries) -> QSeries:
    """Exact division a/b by forward substitution against b's sparse support."""
    if b.is_zero:
        raise SeriesError("non-invertible: zero series")
    eb0 = b.offset24
    b0 = b._c[eb0]
    ea0 = a.offset24
    rel_out = min(a.trunc24 - ea0, b.trunc24 - eb0)
    trunc = ea0 - eb0 + rel_out
    if a.is_zero:
        return QSeries.zero(trunc)
    sa = [e - ea0 for e in a._c]
    sb = sorted(e - eb0 for e in b._c)
    stride = 0
    for s in sa + sb:
        stride = gcd(stride, s)
    if stride == 0:
        stride = max(rel_out, 1)
    out: dict[int, Scalar] = {}
    bs = sb[1:]
    for k in range(0, rel_out, stride):
        acc = a._c.get(ea0 + k, 0)
        for s in bs:
            if s > k:
                break
            prev = out.get(k - s)
            if prev is not None:
                acc = acc - b._c[eb0 + s] * prev
        if acc:
            if b0 == 1:
                out[k] = acc
            elif b0 == -1:
                out[k] = -acc
            else:
                out[k] = Fraction(acc) / b0
    shifted = {ea0 - eb0 + k: v for k, v in out.items()}
    return QSeries(shifted, trunc)


@dataclass(frozen=True)
class ValuationReport:
    """Outcome of an ell-adic minimum-valuation scan over a series."""

    prime: int
    min_valuation: int | None  # None encodes +infinity (all terms vanish)
    witness_exponent24: int | None
    terms_checked: int

    def to_json_obj(self) -> dict:
        return {
            "prime": self.prime,
            "min_valuation": self.min_valuation,
            "witness_exponent24": self.witness_exponent24,
            "terms_checked": self.terms_checked,
        }


def pochhammer_expansion(delta: int, trunc24: int) -> QSeries:
    """(q^delta; q^delta)_infinity via the pentagonal number theorem."""
    if delta < 1:
        raise SeriesError("delta must be a positive integer")
    entries = {}
    k = 0
    while True:
        hit = False
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            e = 24 * delta * g
            if e < trunc24:
                entries[e] = (-1) ** k
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return QSeries(entries, trunc24)


def eta_expansion(delta: int, trunc24: int) -> QSeries:
    """q^(delta/24) * (q^delta; q^delta)_infinity; leading exponent24 = delta."""
    return pochhammer_expansion(delta, trunc24 - delta).shift(delta)


def _expstr(e24: int) -> str:
    if e24 % 24 == 0:
        n = e24 // 24
        return "1" if n == 0 else ("q" if n == 1 else f"q^{n}")
    f = Fraction(e24, 24)
    return f"q^({f.numerator}/{f.denominator})"

def _termstr(e24: int, v: Scalar, first: bool) -> str:
    sign = "-" if (v < 0) else ("" if first else "+")
    mag = -v if v < 0 else v
    base = _expstr(e24)
    if base == "1":
        body = str(mag)
    elif mag == 1:
        body = base
    else:
        body = f"{mag}*{base}"
    if first:
        return f"{sign}{body}"
    return f"{sign} {body}"
