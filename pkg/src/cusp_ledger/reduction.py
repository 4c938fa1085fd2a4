"""Greedy principal-part elimination over a rank-(v+1) C[x] module basis.

Functions are handled through their chart expansions at the zero cusp.  A
basis consists of x (pole order d >= 1), companions y_0 = 1, y_1, ..., y_v,
and optionally a localizer z.  Order-completeness (the pole orders of the
monomials y_k x^m hit every large enough positive integer exactly once)
makes the greedy elimination deterministic; the finitely many unreachable
pole orders form the gap set, whose size equals the genus of the curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .errors import (
    BasisError,
    ExactnessError,
    GapError,
    InternalInconsistencyError,
    ReductionError,
    TruncationError,
)
from .eta import CuspOrderVector
from .series import QSeries, Scalar

DEFAULT_GUARD = 10  # residual must be verifiably zero this many terms past q^0


def _pole_order(series: QSeries, what: str) -> int:
    if series.is_zero:
        raise BasisError(f"{what} must be a nonzero series")
    e = series.offset24
    if e % 24 != 0:
        raise BasisError(f"{what} must live on the integer exponent grid")
    return -(e // 24)


@dataclass
class ModuleBasis:
    """Reference functions spanning the space with poles only at the zero cusp.

    ys[0] must be the constant 1; x must have a genuine pole.  The basis is
    order-complete iff the companion pole orders hit each residue class mod
    the pole order of x exactly once, which is validated on construction.
    """

    x: QSeries
    ys: list[QSeries]
    level: int | None = None
    z: QSeries | None = None
    z_orders: CuspOrderVector | None = None
    label: str = ""

    def __post_init__(self):
        self.x_order = _pole_order(self.x, "x")
        if self.x_order < 1:
            raise BasisError("x must have a pole at the zero cusp")
        if not self.ys:
            raise BasisError("ys must start with the constant 1")
        y0 = self.ys[0]
        if y0.support() != (0,) or y0.coeff24(0) != 1:
            raise BasisError("ys[0] must be the constant series 1")
        self.y_orders = [0]
        for k, y in enumerate(self.ys[1:], start=1):
            p = _pole_order(y, f"ys[{k}]")
            if p < 1:
                raise BasisError(f"ys[{k}] must have a pole at the zero cusp")
            self.y_orders.append(p)
        d = self.x_order
        residues = [p % d for p in self.y_orders]
        if len(set(residues)) != len(residues):
            raise BasisError(
                "basis not order-complete: companion pole orders collide mod "
                f"{d} (orders {self.y_orders})"
            )
        if len(residues) != d:
            raise BasisError(
                "basis not order-complete: companion pole orders cover "
                f"{len(set(residues))} of {d} residue classes mod {d}"
            )
        self._power_cache: dict[int, QSeries] = {1: self.x}
        self._monomial_cache: dict[tuple[int, int], QSeries] = {}

    def gap_set(self) -> tuple[int, ...]:
        """Pole orders no monomial y_k x^m attains (always finite here)."""
        attainable = set()
        top = max(self.y_orders) + self.x_order
        for p in self.y_orders:
            attainable.update(range(p, top + 1, self.x_order))
        return tuple(n for n in range(1, top + 1) if n not in attainable)

    def monomial_for_pole_order(self, order: int) -> tuple[int, int] | None:
        """Unique (k, m) with pole order of y_k x^m equal to `order`, if any."""
        hits = []
        for k, p in enumerate(self.y_orders):
            m, rem = divmod(order - p, self.x_order)
            if rem == 0 and m >= 0:
                hits.append((k, m))
        if not hits:
            return None
        if len(hits) > 1:
            raise InternalInconsistencyError(
                f"order-completeness violated: pole order {order} reached by "
                f"{hits}"
            )
        return hits[0]

    def x_power(self, m: int) -> QSeries:
        if m not in self._power_cache:
            self._power_cache[m] = self.x_power(m - 1) * self.x
        return self._power_cache[m]

    def monomial(self, k: int, m: int) -> QSeries:
        key = (k, m)
        if key not in self._monomial_cache:
            if m == 0:
                s = self.ys[k] if k else QSeries.constant(1, self.x.trunc24)
            elif k == 0:
                s = self.x_power(m)
            else:
                s = self.ys[k] * self.x_power(m)
            self._monomial_cache[key] = s
        return self._monomial_cache[key]


@dataclass(frozen=True)
class Representation:
    """f = z^(-n) * sum s_(k,m) y_k x^m, exact to the recorded truncation."""

    localizer_exponent: int
    coeffs: dict[tuple[int, int], Scalar]
    residual: QSeries

    def polynomial(self) -> dict[int, Scalar]:
        """Degree -> coefficient view; only valid when every k is 0."""
        if any(k for k, _ in self.coeffs):
            raise ReductionError("representation is not a plain polynomial in x")
        return {m: c for (_, m), c in self.coeffs.items()}

    def to_json_obj(self) -> dict:
        quads = [[k, m, str(Fraction(c).numerator), str(Fraction(c).denominator)]
                 for (k, m), c in sorted(self.coeffs.items())]
        return {"localizer_exponent": self.localizer_exponent,
                "coeffs": quads,
                "residual_is_zero": self.residual.is_zero}


def _check_window(series: QSeries, guard: int, what: str) -> None:
    if series.trunc24 < 24 * guard:
        raise TruncationError(
            f"{what} known only to q^({series.trunc24}/24); the residual check "
            f"needs at least q^{guard} (guard={guard})"
        )


def reduce_module(f: QSeries, basis: ModuleBasis,
                  guard: int = DEFAULT_GUARD) -> Representation:
    """Express f (chart series at the zero cusp) over the basis.

    Greedy elimination of the current most negative exponent; the matching
    monomial is unique by order-completeness.  A pole order in the gap set
    raises GapError; a nonzero residual after constant elimination raises
    ReductionError.  Both checks are exact.
    """
    if not f.is_integer_grid:
        raise ReductionError("reduction target must have integer exponents")
    _check_window(f, guard, "reduction target")
    original = f
    coeffs: dict[tuple[int, int], Scalar] = {}
    while not f.is_zero:
        lead_e, lead_c = f.leading()
        if lead_e >= 0:
            break
        order = -(lead_e // 24)
        km = basis.monomial_for_pole_order(order)
        if km is None:
            raise GapError(order)
        mon = basis.monomial(*km)
        _check_window(mon, guard, f"basis monomial y_{km[0]} * x^{km[1]}")
        mlead = mon.leading()[1]
        if mlead == 1:
            c = lead_c
        elif mlead == -1:
            c = -lead_c
        else:
            c = Fraction(lead_c) / mlead
        if isinstance(c, Fraction) and c.denominator == 1:
            c = int(c)
        f = f - mon.scaled(c)
        coeffs[km] = coeffs.get(km, 0) + c
    # constant elimination; anything left below truncation must vanish
    const = f.coeff24(0) if f.trunc24 > 0 else 0
    if const:
        coeffs[(0, 0)] = coeffs.get((0, 0), 0) + const
        f = f - QSeries.constant(const, f.trunc24)
    if not f.is_zero:
        bad_e, bad_c = f.leading()
        raise ReductionError(
            f"target is not in the module at this truncation: residual "
            f"coefficient {bad_c} at q^({bad_e}/24)"
        )
    rep = Representation(localizer_exponent=0, coeffs=coeffs, residual=f)
    _assert_round_trip(original, basis, rep)
    return rep


def _assert_round_trip(original: QSeries, basis: ModuleBasis,
                       rep: Representation) -> None:
    recon = QSeries.zero(original.trunc24)
    for (k, m), c in rep.coeffs.items():
        if (k, m) == (0, 0):
            recon = recon + QSeries.constant(c, original.trunc24)
        else:
            recon = recon + basis.monomial(k, m).scaled(c)
    if not recon.agrees_with(original):
        raise InternalInconsistencyError(
            "re-expansion of the representation does not reproduce the input"
        )


def reduce_genus0(f: QSeries, x: QSeries,
                  guard: int = DEFAULT_GUARD) -> Representation:
    """Genus-0 special case: x has pole order exactly 1, f becomes a
    polynomial in x."""
    if _pole_order(x, "x") != 1:
        raise BasisError("genus-0 reduction needs x with pole order exactly 1")
    basis = ModuleBasis(x=x, ys=[QSeries.constant(1, x.trunc24)])
    return reduce_module(f, basis, guard=guard)


def localize_reduce(f: QSeries, basis: ModuleBasis,
                    f_orders: CuspOrderVector,
                    guard: int = DEFAULT_GUARD) -> Representation:
    """Multiply f by the least power of the localizer that clears its poles
    away from the zero cusp, then reduce.

    The power n comes from exact cusp-order arithmetic, never from trial
    expansion: n >= -ord_f(c) / ord_z(c) at every class c != 1.
    """
    if basis.z is None or basis.z_orders is None:
        raise BasisError("basis has no localizer")
    n = 0
    for c, z_ord in basis.z_orders.orders:
        if c == 1:
            if z_ord >= 0:
                raise BasisError("invalid localizer: no pole at the zero cusp")
            continue
        f_ord = f_orders.order(c)
        if f_ord >= 0:
            continue
        if z_ord < 1:
            raise BasisError(
                f"invalid localizer: cannot cancel the pole at cusp class {c}"
            )
        n = max(n, ceil(Fraction(-f_ord) / z_ord))
    target = f if n == 0 else f * basis.z ** n
    rep = reduce_module(target, basis, guard=guard)
    return Representation(localizer_exponent=n, coeffs=rep.coeffs,
                          residual=rep.residual)


@dataclass(frozen=True)
class ValuationTable:
    """ell-adic valuations of a representation's coefficients."""

    prime: int
    entries: dict[tuple[int, int], int | None]  # None encodes +infinity

    def min_valuation(self) -> int | None:
        vals = [v for v in self.entries.values() if v is not None]
        return min(vals) if vals else None

    def to_json_obj(self) -> dict:
        return {"prime": self.prime,
                "entries": [[k, m, v] for (k, m), v in sorted(self.entries.items())],
                "min_valuation": self.min_valuation()}


def valuation_table(rep: Representation, ell: int) -> ValuationTable:
    entries: dict[tuple[int, int], int | None] = {}
    for (k, m), c in rep.coeffs.items():
        if not isinstance(c, int):
            raise ExactnessError(
                f"coefficient at (k={k}, m={m}) is not an integer: {c}"
            )
        if c == 0:
            entries[(k, m)] = None
            continue
        v = 0
        while c % ell == 0:
            c //= ell
            v += 1
        entries[(k, m)] = v
    return ValuationTable(prime=ell, entries=entries)


@dataclass(frozen=True)
class GainReport:
    """Minimum-valuation growth between consecutive valuation tables."""

    prime: int
    min_before: int | None
    min_after: int | None
    gain: int | None
    meets_gain: bool
    violations: tuple[tuple[int, int, int], ...]  # (k, m, valuation) below target

    def to_json_obj(self) -> dict:
        return {"prime": self.prime, "min_before": self.min_before,
                "min_after": self.min_after, "gain": self.gain,
                "meets_gain": self.meets_gain,
                "violations": [list(v) for v in self.violations]}


def valuation_gain(before: ValuationTable, after: ValuationTable) -> GainReport:
    """Did the minimum valuation grow by at least one?  Failures are report
    content, not errors."""
    if before.prime != after.prime:
        raise ReductionError("valuation tables use different primes")
    b, a = before.min_valuation(), after.min_valuation()
    if b is None or a is None:
        # an all-zero table puts no obstruction in the way
        return GainReport(before.prime, b, a, None, True, ())
    violations = tuple(sorted(
        (k, m, v) for (k, m), v in after.entries.items()
        if v is not None and v < b + 1
    ))
    gain = a - b
    return GainReport(before.prime, b, a, gain, gain >= 1, violations)
