"""Exact algebra of exponential polynomials  Σ aₖ·e^(k·z).

Exponents are exact rationals with denominator 1 or 2 (half-integers are all
that the profile and conformal-factor formulas ever produce, via √C factors).
Coefficients are either exact rationals (:class:`fractions.Fraction`) or
floats; arithmetic stays exact as long as every operand is exact.

Values are immutable after construction and all operations are pure, so they
can be shared freely between threads.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["ExpPoly", "ExpPolyError", "EvalOverflowError"]


class ExpPolyError(ValueError):
    """Invalid exponential-polynomial construction or operand."""


class EvalOverflowError(ArithmeticError):
    """Evaluation produced a non-finite value; carries the offending exponent."""

    def __init__(self, exponent: Fraction, z: float):
        self.exponent = exponent
        self.z = z
        super().__init__(f"term e^({exponent}z) is non-finite at z={z}")


_ALLOWED_DENOMINATORS = (1, 2)


def _as_exponent(k) -> Fraction:
    if isinstance(k, tuple):
        k = Fraction(k[0], k[1])
    elif isinstance(k, float):
        if k != int(k * 2) / 2.0:
            raise ExpPolyError(f"exponent {k!r} is not a half-integer")
        k = Fraction(int(k * 2), 2)
    k = Fraction(k)
    if k.denominator not in _ALLOWED_DENOMINATORS:
        raise ExpPolyError(f"exponent {k} has denominator {k.denominator}; only 1 or 2 allowed")
    return k


def _as_coefficient(c):
    if isinstance(c, Rational):
        return Fraction(c)
    if isinstance(c, float):
        if not math.isfinite(c):
            raise ExpPolyError(f"non-finite coefficient {c!r}")
        return c
    raise ExpPolyError(f"unsupported coefficient type {type(c).__name__}")


class ExpPoly:
    """A finite sum  Σ aₖ·e^(k·z)  with half-integer exponents k.

    Invariants: no stored coefficient is zero, exponents are unique, and the
    zero polynomial is the empty term map.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        data: dict[Fraction, object] = {}
        items = terms.items() if hasattr(terms, "items") else terms
        for k, c in items:
            k = _as_exponent(k)
            c = _as_coefficient(c)
            if k in data:
                c = data[k] + c
            if c == 0:
                data.pop(k, None)
            else:
                data[k] = c
        object.__setattr__(self, "_terms", data)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("ExpPoly is immutable")

    # ---------------------------------------------------------------- basics
    @staticmethod
    def zero() -> "ExpPoly":
        return ExpPoly()

    @staticmethod
    def constant(c) -> "ExpPoly":
        return ExpPoly([(0, c)])

    @staticmethod
    def exp_term(k, c=1) -> "ExpPoly":
        """The single term c·e^(k·z)."""
        return ExpPoly([(k, c)])

    def terms(self) -> tuple:
        """Sorted tuple of (exponent, coefficient) pairs."""
        return tuple(sorted(self._terms.items()))

    def coefficient(self, k):
        return self._terms.get(_as_exponent(k), Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    def exponents(self) -> tuple:
        return tuple(sorted(self._terms))

    def extreme_exponent(self, side: int):
        """Largest exponent for side=+1 (z→+∞ behaviour), smallest for -1."""
        if not self._terms:
            return None
        return max(self._terms) if side > 0 else min(self._terms)

    def to_float(self) -> "ExpPoly":
        return ExpPoly([(k, float(c)) for k, c in self._terms.items()])

    # ------------------------------------------------------------ arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        data = dict(self._terms)
        for k, c in other._terms.items():
            acc = data.get(k, 0) + c
            if acc == 0:
                data.pop(k, None)
            else:
                data[k] = acc
        return ExpPoly(data.items())

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return ExpPoly([(k, -c) for k, c in self._terms.items()])

    def __mul__(self, other):
        if isinstance(other, (Rational, float)) and not isinstance(other, ExpPoly):
            return self.scale(other)
        if not isinstance(other, ExpPoly):
            return NotImplemented
        data: dict[Fraction, object] = {}
        for ka, ca in self._terms.items():
            for kb, cb in other._terms.items():
                k = ka + kb
                acc = data.get(k, 0) + ca * cb
                if acc == 0:
                    data.pop(k, None)
                else:
                    data[k] = acc
        return ExpPoly(data.items())

    def __rmul__(self, other):
        if isinstance(other, (Rational, float)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "ExpPoly":
        c = _as_coefficient(c)
        if c == 0:
            return ExpPoly()
        return ExpPoly([(k, a * c) for k, a in self._terms.items()])

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExpPoly):
            return other
        if isinstance(other, (Rational, float)):
            return ExpPoly.constant(other)
        return NotImplemented

    # ---------------------------------------------------------- differential
    def derive(self, order: int = 1) -> "ExpPoly":
        """Termwise derivative: e^(k·z) maps to kⁿ·e^(k·z)."""
        if order < 0:
            raise ExpPolyError("derivative order must be non-negative")
        if order == 0:
            return self
        return ExpPoly([(k, c * k**order) for k, c in self._terms.items()])

    # ------------------------------------------------------------ evaluation
    def eval(self, z: float) -> float:
        """Floating-point value at z, terms accumulated in exponent order."""
        total = 0.0
        for k, c in sorted(self._terms.items()):
            try:
                term = float(c) * math.exp(float(k) * z)
            except OverflowError:
                raise EvalOverflowError(k, z) from None
            if not math.isfinite(term):
                raise EvalOverflowError(k, z)
            total += term
        if not math.isfinite(total):
            raise EvalOverflowError(self.extreme_exponent(1 if z > 0 else -1), z)
        return total

    def jet(self, z: float, order: int = 4) -> tuple:
        """(value, d/dz, ..., d^order/dz^order) at z."""
        values = []
        p = self
        for _ in range(order + 1):
            values.append(p.eval(z))
            p = p.derive()
        return tuple(values)

    # -------------------------------------------------------------- protocol
    def __eq__(self, other):
        if isinstance(other, (Rational, float)):
            other = ExpPoly.constant(other)
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "ExpPoly(0)"
        parts = []
        for k, c in sorted(self._terms.items()):
            if k == 0:
                parts.append(f"{c}")
            else:
                parts.append(f"{c}*e^({k}z)")
        return "ExpPoly(" + " + ".join(parts) + ")"
