"""Metric specifications: profile F, conformal-factor model C, z-domain.

A metric is  g = F·dz² (up to the fixed coframe convention) described by a
profile F(z) and a conformal factor C(z); this module holds the closed-form
carriers for both and provides exact 4-jet evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

from .exppoly import ExpPoly, ExpPolyError
from .numerics import jet_to_series, series_div, series_pow, series_to_jet

__all__ = [
    "Domain",
    "Canonical",
    "Squared",
    "Profile",
    "ExpFactor",
    "EinsteinFactor",
    "RatioFactor",
    "ConformalModel",
    "MetricSpec",
    "Jet4",
    "OutOfDomainError",
    "SingularConformalFactorError",
    "profile_poly",
    "factor_ratio",
    "jet_F",
    "jet_C",
    "conformal_value",
    "canonical_coefficients",
    "normalize_canonical",
    "STRUCTURE_TAGS",
]

STRUCTURE_TAGS = ("Jplus", "Jminus", "Iminus", "Iplus")


class OutOfDomainError(ValueError):
    """Evaluation point outside the metric's z-domain."""


class SingularConformalFactorError(ArithmeticError):
    """Conformal factor non-positive where a positive value is required."""


def _num(x):
    """Accept int/Fraction/float; keep rationals exact."""
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise TypeError(f"unsupported numeric type {type(x).__name__}")


@dataclass(frozen=True)
class Jet4:
    """Value and derivatives of orders 1..4 at a point."""

    value: float
    d1: float
    d2: float
    d3: float
    d4: float

    def as_tuple(self) -> tuple:
        return (self.value, self.d1, self.d2, self.d3, self.d4)

    @staticmethod
    def from_tuple(t) -> "Jet4":
        return Jet4(*(float(v) for v in t))


@dataclass(frozen=True)
class Domain:
    """z-interval with openness flags; endpoints may be ±inf."""

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty domain [{self.lo}, {self.hi}]")
        if self.lo_closed and not math.isfinite(self.lo):
            raise ValueError("closed endpoint must be finite")
        if self.hi_closed and not math.isfinite(self.hi):
            raise ValueError("closed endpoint must be finite")

    def contains(self, z: float, tol: float = 1e-12) -> bool:
        """True if z is interior or at a closed endpoint (within tol)."""
        if self.lo < z < self.hi:
            return True
        if self.lo_closed and abs(z - self.lo) <= tol:
            return True
        if self.hi_closed and abs(z - self.hi) <= tol:
            return True
        return False

    def finite_window(self, span: float = 8.0, both_infinite_halfspan: float = 4.0) -> tuple:
        """A finite sub-interval used for sampling on unbounded domains."""
        lo, hi = self.lo, self.hi
        if math.isinf(lo) and math.isinf(hi):
            return (-both_infinite_halfspan, both_infinite_halfspan)
        if math.isinf(lo):
            return (hi - span, hi)
        if math.isinf(hi):
            return (lo, lo + span)
        return (lo, hi)


# --------------------------------------------------------------------- F side
@dataclass(frozen=True)
class Canonical:
    """F = 1 + ½C1·e^{-2z} + C2·e^{-z} + C3·e^{z} + ½C4·e^{2z}."""

    c1: Union[Fraction, float]
    c2: Union[Fraction, float]
    c3: Union[Fraction, float]
    c4: Union[Fraction, float]

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "c4"):
            object.__setattr__(self, name, _num(getattr(self, name)))

    def expand(self) -> ExpPoly:
        half = Fraction(1, 2)
        return ExpPoly(
            [(0, 1), (-2, half * self.c1), (-1, self.c2), (1, self.c3), (2, half * self.c4)]
        )

    def coefficients(self) -> tuple:
        return (self.c1, self.c2, self.c3, self.c4)


@dataclass(frozen=True)
class Squared:
    """F = base², expanded exactly."""

    base: ExpPoly

    def expand(self) -> ExpPoly:
        return self.base * self.base


Profile = Union[ExpPoly, Canonical, Squared]


def profile_poly(profile: Profile) -> ExpPoly:
    if isinstance(profile, ExpPoly):
        return profile
    if isinstance(profile, (Canonical, Squared)):
        return profile.expand()
    raise TypeError(f"not a profile: {type(profile).__name__}")


def canonical_coefficients(poly: ExpPoly) -> Optional[tuple]:
    """(C1, C2, C3, C4) if poly lies in the canonical family, else None.

    Requires exponents within {-2,-1,0,1,2} and constant term exactly 1.
    """
    allowed = {Fraction(-2), Fraction(-1), Fraction(0), Fraction(1), Fraction(2)}
    if any(k not in allowed for k in poly.exponents()):
        return None
    if poly.coefficient(0) != 1:
        return None
    return (
        2 * poly.coefficient(-2),
        poly.coefficient(-1),
        poly.coefficient(1),
        2 * poly.coefficient(2),
    )


def normalize_canonical(c: Canonical) -> tuple:
    """Translate z ↦ z + a so that |C1| becomes 1 (when C1 ≠ 0).

    Returns (a, translated Canonical).  Under z ↦ z + a the coefficients map
    to (C1·e^{-2a}, C2·e^{-a}, C3·e^{a}, C4·e^{2a}).
    """
    if c.c1 == 0:
        return (0.0, c)
    a = 0.5 * math.log(abs(float(c.c1)))
    e = math.exp(a)
    return (a, Canonical(float(c.c1) / e**2, float(c.c2) / e, float(c.c3) * e, float(c.c4) * e**2))


# --------------------------------------------------------------------- C side
@dataclass(frozen=True)
class ExpFactor:
    """C = C0·e^{ε·z} with C0 > 0 and ε = ±1."""

    c0: Union[Fraction, float]
    eps: int

    def __post_init__(self):
        object.__setattr__(self, "c0", _num(self.c0))
        if self.eps not in (-1, 1):
            raise ValueError("eps must be -1 or +1")
        if not self.c0 > 0:
            raise ValueError("C0 must be positive")


@dataclass(frozen=True)
class EinsteinFactor:
    """C = e^{-z} / (C5 + C6·e^{-z})²."""

    c5: Union[Fraction, float]
    c6: Union[Fraction, float]

    def __post_init__(self):
        object.__setattr__(self, "c5", _num(self.c5))
        object.__setattr__(self, "c6", _num(self.c6))
        if self.c5 == 0 and self.c6 == 0:
            raise ValueError("(C5, C6) must not both vanish")


@dataclass(frozen=True)
class RatioFactor:
    """C = num/den with den nonzero on the domain interior."""

    num: ExpPoly
    den: ExpPoly

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("denominator must be nonzero")


ConformalModel = Union[ExpFactor, EinsteinFactor, RatioFactor]


def factor_ratio(model: ConformalModel) -> tuple:
    """(num, den) ExpPoly pair representing C = num/den."""
    if isinstance(model, ExpFactor):
        return (ExpPoly.exp_term(model.eps, model.c0), ExpPoly.constant(1))
    if isinstance(model, EinsteinFactor):
        lin = ExpPoly([(0, model.c5), (-1, model.c6)])
        return (ExpPoly.exp_term(-1), lin * lin)
    if isinstance(model, RatioFactor):
        return (model.num, model.den)
    raise TypeError(f"not a conformal model: {type(model).__name__}")


# ------------------------------------------------------------------ MetricSpec
@dataclass(frozen=True)
class MetricSpec:
    """A U(2)-invariant metric: profile F, conformal factor C, z-domain."""

    name: str
    F: Profile
    C: ConformalModel
    domain: Domain
    tag: Optional[str] = None

    def __post_init__(self):
        if self.tag is not None:
            if self.tag not in STRUCTURE_TAGS:
                raise ValueError(f"unknown structure tag {self.tag!r}")
            if self.tag == "Jplus":
                if not (isinstance(self.C, ExpFactor) and self.C.eps == -1):
                    raise ValueError("tag Jplus requires C = C0·e^{-z}")
            if self.tag == "Jminus":
                if not (isinstance(self.C, ExpFactor) and self.C.eps == +1):
                    raise ValueError("tag Jminus requires C = C0·e^{+z}")

    def f_poly(self) -> ExpPoly:
        return profile_poly(self.F)


def _check_domain(m: MetricSpec, z: float):
    if not m.domain.contains(z):
        raise OutOfDomainError(f"z={z} outside domain [{m.domain.lo}, {m.domain.hi}] of {m.name!r}")


def jet_F(m: MetricSpec, z: float) -> Jet4:
    """Exact termwise 4-jet of F at z (interior or closed endpoint)."""
    _check_domain(m, z)
    return Jet4.from_tuple(m.f_poly().jet(z, 4))


def _c_series(m: MetricSpec, z: float) -> list:
    num, den = factor_ratio(m.C)
    ns = jet_to_series(num.jet(z, 4))
    ds = jet_to_series(den.jet(z, 4))
    if ds[0] == 0.0:
        raise SingularConformalFactorError(f"conformal denominator vanishes at z={z}")
    return series_div(ns, ds)


def jet_C(m: MetricSpec, z: float, powers=(1,)) -> dict:
    """Jets of the requested powers of C at z; requires C(z) > 0.

    Powers may be any rationals among {-3/2, -1, -1/2, 1/2, 1, 3/2} (others
    work too; the listed set is what the curvature formulas use).
    """
    _check_domain(m, z)
    cs = _c_series(m, z)
    if cs[0] <= 0.0:
        raise SingularConformalFactorError(f"C(z)={cs[0]} is not positive at z={z}")
    out = {}
    for p in powers:
        key = Fraction(p) if not isinstance(p, Fraction) else p
        if key == 1:
            out[key] = Jet4.from_tuple(series_to_jet(cs))
        else:
            out[key] = Jet4.from_tuple(series_to_jet(series_pow(cs, float(key))))
    return out


def conformal_value(m: MetricSpec, z: float) -> float:
    """C(z) as a plain float (may be non-positive; no singularity check)."""
    num, den = factor_ratio(m.C)
    d = den.eval(z)
    if d == 0.0:
        raise SingularConformalFactorError(f"conformal denominator vanishes at z={z}")
    return num.eval(z) / d
