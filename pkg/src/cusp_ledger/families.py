"""Congruence families as data: towers, verification, classification, catalog.

A family asserts ell^beta | a(n) whenever lam*n = target (mod ell^m), where
the coefficients a(n) come from an eta-quotient generating function.  The
verification schedule maps a depth index alpha to an explicit
(modulus exponent, divisibility exponent) pair, so conventions like pairing
modulus 5^(2a+1) with divisor 5^a need no special casing.

The tower series L_j (one per slicing depth j) can be built two independent
ways: directly, by slicing the generating function and applying a recorded
prefactor, or recursively, by U_ell steps with recorded multipliers.  The two
constructions cross-validate each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from pathlib import Path

from .curves import curve_profile
from .errors import (
    CatalogError,
    ExactnessError,
    FamilyError,
    InternalInconsistencyError,
)
from .eta import (
    CuspOrderVector,
    EtaQuotient,
    cusp_order_vector,
    expand_at_infinity,
    expand_at_zero,
)
from .reduction import ModuleBasis
from .series import QSeries, is_prime, pochhammer_expansion


@dataclass(frozen=True)
class PochhammerProduct:
    """q^qpow * prod (q^d; q^d)^e_d: an integer series with leading coefficient 1.

    This is the shape of tower prefactors and U-step multipliers; unlike an
    eta quotient proper it carries no fractional q-power.
    """

    qpow: int
    exponents: tuple[tuple[int, int], ...]

    def __init__(self, qpow: int, exponents):
        items = dict(exponents)
        object.__setattr__(self, "qpow", int(qpow))
        object.__setattr__(
            self, "exponents",
            tuple(sorted((int(d), int(r)) for d, r in items.items() if r != 0)))

    def is_one(self) -> bool:
        return self.qpow == 0 and not self.exponents

    def expand(self, trunc24: int) -> QSeries:
        rel = trunc24 - 24 * self.qpow
        series = QSeries.constant(1, rel)
        for d, r in self.exponents:
            if r > 0:
                series = series * pochhammer_expansion(d, rel) ** r
        for d, r in self.exponents:
            for _ in range(-r if r < 0 else 0):
                series = series / pochhammer_expansion(d, rel)
        return series.shift(24 * self.qpow)

    def to_json_obj(self) -> dict:
        return {"qpow": self.qpow, "r": {str(d): r for d, r in self.exponents}}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PochhammerProduct":
        return cls(obj.get("qpow", 0),
                   {int(d): int(r) for d, r in obj.get("r", {}).items()})


@dataclass(frozen=True)
class ScheduleStep:
    """One verification depth: slice modulo ell^modulus_exponent, demand
    divisibility by ell^beta."""

    modulus_exponent: int
    beta: int


@dataclass(frozen=True)
class EtaTerm:
    """scale * (eta quotient): one summand of a recorded tower identity."""

    scale: Fraction
    quotient: EtaQuotient


@dataclass
class FamilySpec:
    """All data defining one congruence family."""

    name: str
    generator: EtaQuotient
    prime: int
    lam: int
    level: int
    target_residue: int = 1
    schedule: dict[int, ScheduleStep] = field(default_factory=dict)
    prefactors: dict[int, PochhammerProduct] = field(default_factory=dict)
    multipliers: dict[int, PochhammerProduct] = field(default_factory=dict)
    tower_identities: dict[int, tuple[EtaTerm, ...]] = field(default_factory=dict)
    basis_name: str | None = None
    notes: str = ""

    def validate(self) -> None:
        if not is_prime(self.prime):
            raise FamilyError(f"family {self.name}: {self.prime} is not prime")
        if self.level % self.prime != 0:
            raise FamilyError(
                f"family {self.name}: prime {self.prime} does not divide "
                f"level {self.level}")
        if gcd(self.lam, self.prime) != 1:
            raise FamilyError(
                f"family {self.name}: lam {self.lam} shares a factor with "
                f"the prime {self.prime}")
        if self.level % self.generator.level != 0:
            raise FamilyError(
                f"family {self.name}: generator level {self.generator.level} "
                f"does not divide curve level {self.level}")
        for a, step in self.schedule.items():
            if a < 1 or step.modulus_exponent < 1 or step.beta < 0:
                raise FamilyError(
                    f"family {self.name}: bad schedule entry at depth {a}")


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

CLASSICAL = "Classical"
LOCALIZATION = "Localization"
NO_SYSTEMATIC = "NoSystematicMethods"
SPORADIC = "Unclassified-Sporadic"


@dataclass(frozen=True)
class ClassificationReport:
    level: int
    prime: int | None
    cusp_count: int
    genus: int
    difficulty_class: str
    tedium_score: int
    sporadic_flags: tuple[str, ...]

    def to_json_obj(self) -> dict:
        return {
            "level": self.level,
            "prime": self.prime,
            "cusp_count": self.cusp_count,
            "genus": self.genus,
            "difficulty_class": self.difficulty_class,
            "tedium_score": self.tedium_score,
            "sporadic_flags": list(self.sporadic_flags),
        }


def classify(N: int, prime: int | None = None) -> ClassificationReport:
    """Difficulty from the cusp count, tedium from the genus.

    Cusp count 2 -> classical methods; 4 -> localization; 6 or more -> no
    systematic methods.  Odd cusp counts (N = 1, 4) and prime 2 fall outside
    the table and are reported as sporadic.
    """
    profile = curve_profile(N)
    eps = profile.cusp_count
    flags = []
    if eps % 2 == 1:
        flags.append("odd-cusp-count")
    if N in (4, 8):
        flags.append("level-power-of-two")
    if prime == 2:
        flags.append("prime-two")
    if eps % 2 == 1 or prime == 2:
        cls = SPORADIC
    elif eps == 2:
        cls = CLASSICAL
    elif eps == 4:
        cls = LOCALIZATION
    else:
        cls = NO_SYSTEMATIC
    return ClassificationReport(
        level=N, prime=prime, cusp_count=eps, genus=profile.genus,
        difficulty_class=cls, tedium_score=profile.genus,
        sporadic_flags=tuple(flags))


# ---------------------------------------------------------------------------
# tower construction
# ---------------------------------------------------------------------------

def coefficient_series(spec: FamilySpec, n_max: int) -> QSeries:
    """The generating sequence a(0..n_max) on the integer exponent grid.

    Expands the generator at infinity and strips its fractional leading
    power, so exponent n carries a(n) exactly as the congruence reads them.
    """
    shift = spec.generator.degree24
    raw = expand_at_infinity(spec.generator, shift + 24 * (n_max + 1))
    series = raw.shift(-shift)
    if not series.is_integer_grid:
        raise FamilyError(
            f"family {spec.name}: generator exponents are not on a single "
            f"residue class mod 1 (fractional-exponent mismatch)")
    return series


def tower_series_direct(spec: FamilySpec, depth: int, terms: int,
                        series: QSeries | None = None) -> QSeries:
    """L_depth by the ground-truth route: slice the coefficients on
    lam*n = target (mod ell^depth), then multiply by the recorded prefactor.
    """
    if depth < 1:
        raise FamilyError("tower depth must be >= 1")
    phi = spec.prefactors.get(depth)
    if phi is None:
        raise FamilyError(
            f"family {spec.name}: no prefactor recorded for depth {depth}; "
            f"direct construction unavailable")
    mod = spec.prime ** depth
    r = (pow(spec.lam, -1, mod) * spec.target_residue) % mod
    if series is None:
        series = coefficient_series(spec, mod * (terms + 1) + r)
    sliced = series.progression_slice(spec.lam, spec.prime, depth,
                                      target=spec.target_residue)
    out = phi.expand(24 * (terms + 1)) * sliced
    if out.trunc24 < 24 * terms:
        raise FamilyError(
            f"family {spec.name}: depth-{depth} tower series known only to "
            f"{out.trunc24 // 24} of the requested {terms} terms")
    return out.truncate(24 * terms)


def tower_series_recursive(spec: FamilySpec, depth: int, terms: int,
                           series: QSeries | None = None) -> QSeries:
    """L_depth by the operator route: L_1 directly, then repeated
    multiplier-then-U_ell steps.  Truncation shrinks by a factor of ell per
    step, so the depth-1 start is built proportionally longer.
    """
    if depth < 1:
        raise FamilyError("tower depth must be >= 1")
    needed = [terms]
    for j in range(depth - 1, 0, -1):
        mult = spec.multipliers.get(j)
        if mult is None:
            raise FamilyError(
                f"family {spec.name}: no multiplier recorded for step "
                f"{j} -> {j + 1}; recursive construction unavailable")
        needed.append(needed[-1] * spec.prime + mult.qpow + 1)
    needed.reverse()  # needed[j-1] = terms required of L_j
    if needed[0] < 1:
        raise FamilyError("truncation exhausted before depth 1")
    level = tower_series_direct(spec, 1, needed[0], series=series)
    for j in range(1, depth):
        mult = spec.multipliers[j]
        if not mult.is_one():
            level = mult.expand(level.trunc24 + 24 * mult.qpow) * level
        level = level.u_operator(spec.prime)
    if level.trunc24 < 24 * terms:
        raise FamilyError(
            f"family {spec.name}: recursive tower at depth {depth} ran out "
            f"of truncation")
    return level.truncate(24 * terms)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    family: str
    alpha: int
    modulus_exponent: int
    beta: int
    n_max: int
    qualifying_count: int
    min_valuation: int | None
    passed: bool
    counterexample: tuple[int, int, int] | None  # (n, coefficient, valuation)

    def to_json_obj(self) -> dict:
        ce = None
        if self.counterexample is not None:
            n, c, v = self.counterexample
            ce = {"n": n, "coefficient": str(c), "valuation": v}
        return {
            "family": self.family,
            "alpha": self.alpha,
            "modulus_exponent": self.modulus_exponent,
            "beta": self.beta,
            "n_max": self.n_max,
            "qualifying_count": self.qualifying_count,
            "min_valuation": self.min_valuation,
            "passed": self.passed,
            "counterexample": ce,
        }


def verify_congruence(spec: FamilySpec, alpha: int, n_max: int,
                      beta_override: int | None = None,
                      series: QSeries | None = None) -> VerificationReport:
    """Check ell^beta | a(n) for every qualifying n <= n_max, straight off the
    generating function's coefficients (independent of the tower machinery).
    """
    step = spec.schedule.get(alpha)
    if step is None:
        raise FamilyError(
            f"family {spec.name}: no schedule entry for depth {alpha}")
    beta = step.beta if beta_override is None else beta_override
    mod = spec.prime ** step.modulus_exponent
    r = (pow(spec.lam, -1, mod) * spec.target_residue) % mod
    if series is None:
        series = coefficient_series(spec, n_max)
    count = 0
    min_val: int | None = None
    counterexample = None
    for n in range(r, n_max + 1, mod):
        c = series.coeff_q(n)
        if not isinstance(c, int):
            raise ExactnessError(
                f"family {spec.name}: coefficient a({n}) is not an integer")
        count += 1
        if c == 0:
            continue
        v = 0
        while c % spec.prime == 0:
            c //= spec.prime
            v += 1
        if min_val is None or v < min_val:
            min_val = v
            if v < beta and counterexample is None:
                counterexample = (n, series.coeff_q(n), v)
    passed = min_val is None or min_val >= beta
    return VerificationReport(
        family=spec.name, alpha=alpha, modulus_exponent=step.modulus_exponent,
        beta=beta, n_max=n_max, qualifying_count=count, min_valuation=min_val,
        passed=passed, counterexample=counterexample)


# ---------------------------------------------------------------------------
# recorded tower identities (eta combinations) and their chart expansions
# ---------------------------------------------------------------------------

def identity_series_at_infinity(spec: FamilySpec, depth: int,
                                trunc24: int) -> QSeries:
    terms = spec.tower_identities.get(depth)
    if not terms:
        raise FamilyError(
            f"family {spec.name}: no recorded identity for depth {depth}")
    acc = QSeries.zero(trunc24)
    for term in terms:
        acc = acc + expand_at_infinity(term.quotient, trunc24).scaled(term.scale)
    return acc


def identity_chart_at_zero(spec: FamilySpec, depth: int,
                           trunc24: int) -> tuple[QSeries, CuspOrderVector]:
    """Cusp-zero chart of the recorded identity plus per-class order bounds
    (exact for one term; lower bounds when terms could cancel)."""
    terms = spec.tower_identities.get(depth)
    if not terms:
        raise FamilyError(
            f"family {spec.name}: no recorded identity for depth {depth}")
    acc = QSeries.zero(trunc24)
    bounds: dict[int, Fraction] = {}
    for term in terms:
        scale, chart = expand_at_zero(term.quotient, spec.level, trunc24)
        acc = acc + chart.scaled(scale * term.scale)
        for c, o in cusp_order_vector(term.quotient, spec.level).orders:
            bounds[c] = o if c not in bounds else min(bounds[c], o)
    orders = CuspOrderVector(spec.level, tuple(sorted(bounds.items())))
    return acc, orders


def certified_identity_chart(spec: FamilySpec, depth: int, terms: int,
                             check_terms: int = 0
                             ) -> tuple[QSeries, CuspOrderVector]:
    """Cross-check the recorded identity against the direct tower series,
    then hand back its cusp-zero chart.

    A mismatch means the shipped catalog is wrong, which is an internal
    inconsistency, not a user error.
    """
    check = max(check_terms, 8)
    direct = tower_series_direct(spec, depth, check)
    recorded = identity_series_at_infinity(spec, depth, 24 * check)
    if not direct.agrees_with(recorded):
        raise InternalInconsistencyError(
            f"family {spec.name}: recorded depth-{depth} identity disagrees "
            f"with the sliced construction")
    return identity_chart_at_zero(spec, depth, 24 * terms)


# ---------------------------------------------------------------------------
# catalog bases
# ---------------------------------------------------------------------------

@dataclass
class BasisEntry:
    """Catalog description of a module basis; series are built on demand."""

    name: str
    level: int | None
    x_eta: EtaQuotient | None = None
    x_series: QSeries | None = None
    ys_eta: list[EtaQuotient] = field(default_factory=list)
    ys_series: list[QSeries] = field(default_factory=list)
    z_eta: EtaQuotient | None = None
    notes: str = ""

    def build(self, trunc24: int) -> ModuleBasis:
        def chart(quotient: EtaQuotient) -> QSeries:
            scale, series = expand_at_zero(quotient, self.level, trunc24)
            return series.scaled(scale)

        if self.x_eta is not None:
            x = chart(self.x_eta)
        elif self.x_series is not None:
            # raw entries are exact Laurent polynomials: any truncation is valid
            x = QSeries(dict(self.x_series.terms()), trunc24)
        else:
            raise CatalogError(f"basis {self.name}: no x recorded")
        ys = [QSeries.constant(1, trunc24)]
        ys.extend(chart(yq) for yq in self.ys_eta)
        ys.extend(QSeries(dict(y.terms()), trunc24) for y in self.ys_series)
        z = z_orders = None
        if self.z_eta is not None:
            z = chart(self.z_eta)
            z_orders = cusp_order_vector(self.z_eta, self.level)
        return ModuleBasis(x=x, ys=ys, level=self.level, z=z,
                           z_orders=z_orders, label=self.name)


# ---------------------------------------------------------------------------
# catalog IO
# ---------------------------------------------------------------------------

@dataclass
class Catalog:
    families: list[FamilySpec]
    bases: list[BasisEntry]

    def family(self, name: str) -> FamilySpec:
        for f in self.families:
            if f.name == name:
                return f
        raise CatalogError(f"no family named {name!r} in catalog")

    def basis(self, name: str) -> BasisEntry:
        for b in self.bases:
            if b.name == name:
                return b
        raise CatalogError(f"no basis named {name!r} in catalog")


def _int_keyed(obj: dict, path: str) -> dict[int, dict]:
    out = {}
    for k, v in obj.items():
        try:
            out[int(k)] = v
        except ValueError:
            raise CatalogError(f"{path}: key {k!r} is not an integer") from None
    return out


def _family_from_json(obj: dict, path: str) -> FamilySpec:
    try:
        schedule = {
            a: ScheduleStep(int(s["modulus"]), int(s["beta"]))
            for a, s in _int_keyed(obj.get("schedule", {}), f"{path}.schedule").items()
        }
        prefactors = {
            a: PochhammerProduct.from_json_obj(s)
            for a, s in _int_keyed(obj.get("prefactors", {}),
                                   f"{path}.prefactors").items()
        }
        multipliers = {
            a: PochhammerProduct.from_json_obj(s)
            for a, s in _int_keyed(obj.get("multipliers", {}),
                                   f"{path}.multipliers").items()
        }
        identities = {}
        for a, terms in _int_keyed(obj.get("tower_identities", {}),
                                   f"{path}.tower_identities").items():
            identities[a] = tuple(
                EtaTerm(Fraction(t["scale"]),
                        EtaQuotient.from_json_obj(t["eta"]))
                for t in terms)
        spec = FamilySpec(
            name=obj["name"],
            generator=EtaQuotient.from_json_obj(obj["generator"]),
            prime=int(obj["prime"]),
            lam=int(obj["lam"]),
            level=int(obj["level"]),
            target_residue=int(obj.get("target_residue", 1)),
            schedule=schedule,
            prefactors=prefactors,
            multipliers=multipliers,
            tower_identities=identities,
            basis_name=obj.get("basis"),
            notes=obj.get("notes", ""),
        )
    except KeyError as exc:
        raise CatalogError(f"{path}: missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise CatalogError(f"{path}: {exc}") from None
    try:
        spec.validate()
    except FamilyError as exc:
        raise CatalogError(f"{path}: {exc}") from None
    return spec


def _family_to_json(spec: FamilySpec) -> dict:
    obj = {
        "name": spec.name,
        "generator": spec.generator.to_json_obj(),
        "prime": spec.prime,
        "lam": spec.lam,
        "target_residue": spec.target_residue,
        "level": spec.level,
        "schedule": {str(a): {"modulus": s.modulus_exponent, "beta": s.beta}
                     for a, s in sorted(spec.schedule.items())},
        "prefactors": {str(a): p.to_json_obj()
                       for a, p in sorted(spec.prefactors.items())},
        "multipliers": {str(a): p.to_json_obj()
                        for a, p in sorted(spec.multipliers.items())},
        "tower_identities": {
            str(a): [{"scale": str(t.scale), "eta": t.quotient.to_json_obj()}
                     for t in terms]
            for a, terms in sorted(spec.tower_identities.items())},
        "notes": spec.notes,
    }
    if spec.basis_name:
        obj["basis"] = spec.basis_name
    return obj


def _basis_from_json(obj: dict, path: str) -> BasisEntry:
    def series_or_eta(spec_obj, what):
        if spec_obj is None:
            return None, None
        if "eta" in spec_obj:
            return EtaQuotient.from_json_obj(spec_obj["eta"]), None
        if "series" in spec_obj:
            return None, QSeries.from_json_obj(spec_obj["series"])
        raise CatalogError(f"{path}.{what}: need an 'eta' or 'series' entry")

    try:
        x_eta, x_series = series_or_eta(obj.get("x"), "x")
        ys_eta, ys_series = [], []
        for i, y in enumerate(obj.get("ys", [])):
            ye, ys_ = series_or_eta(y, f"ys[{i}]")
            if ye is not None:
                ys_eta.append(ye)
            else:
                ys_series.append(ys_)
        z_eta, z_series = series_or_eta(obj.get("z"), "z")
        if z_series is not None:
            raise CatalogError(f"{path}.z: localizers must be eta quotients "
                               f"(orders must be computable)")
        return BasisEntry(
            name=obj["name"],
            level=obj.get("level"),
            x_eta=x_eta, x_series=x_series,
            ys_eta=ys_eta, ys_series=ys_series,
            z_eta=z_eta,
            notes=obj.get("notes", ""),
        )
    except KeyError as exc:
        raise CatalogError(f"{path}: missing field {exc}") from None


def _basis_to_json(entry: BasisEntry) -> dict:
    def pack_eta(q):
        return {"eta": q.to_json_obj()}

    obj: dict = {"name": entry.name}
    if entry.level is not None:
        obj["level"] = entry.level
    if entry.x_eta is not None:
        obj["x"] = pack_eta(entry.x_eta)
    elif entry.x_series is not None:
        obj["x"] = {"series": entry.x_series.to_json_obj()}
    ys = [pack_eta(y) for y in entry.ys_eta]
    ys += [{"series": y.to_json_obj()} for y in entry.ys_series]
    if ys:
        obj["ys"] = ys
    if entry.z_eta is not None:
        obj["z"] = pack_eta(entry.z_eta)
    if entry.notes:
        obj["notes"] = entry.notes
    return obj


def catalog_loads(text: str, source: str = "<catalog>") -> Catalog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{source}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "families" not in doc:
        raise CatalogError(f"{source}: top level must contain 'families'")
    families = [
        _family_from_json(obj, f"{source}:families[{i}]")
        for i, obj in enumerate(doc["families"])
    ]
    names = [f.name for f in families]
    if len(set(names)) != len(names):
        raise CatalogError(f"{source}: duplicate family names")
    bases = [
        _basis_from_json(obj, f"{source}:bases[{i}]")
        for i, obj in enumerate(doc.get("bases", []))
    ]
    for f in families:
        if f.basis_name and f.basis_name not in {b.name for b in bases}:
            raise CatalogError(
                f"{source}: family {f.name} references unknown basis "
                f"{f.basis_name!r}")
    return Catalog(families=families, bases=bases)


def catalog_load(path: str | Path) -> Catalog:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CatalogError(f"cannot read catalog {path}: {exc}") from None
    return catalog_loads(text, source=str(path))


def catalog_save(catalog: Catalog, path: str | Path) -> None:
    doc = {
        "schema_version": 1,
        "families": [_family_to_json(f) for f in catalog.families],
        "bases": [_basis_to_json(b) for b in catalog.bases],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def shipped_catalog_path() -> Path:
    return Path(__file__).parent / "data" / "catalog.json"
