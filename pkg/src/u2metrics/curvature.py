"""Pointwise curvature of a U(2)-invariant metric.

All tensors in this symmetry class are diagonal in the invariant coframe
(σ⁰..σ³) with two independent entries, so the trace-free Ricci and Bach
tensors are reported as coefficient pairs rather than 4×4 matrices:

    tf Ric = ric0_a·((σ⁰)² − (σ¹)²) + ric0_b·((σ⁰)² + (σ¹)² − (σ²)² − (σ³)²)
    Bach   = B1·(−2(σ¹)² + (σ²)² + (σ³)²) + B2·(−(σ⁰)² − (σ¹)² + (σ²)² + (σ³)²)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exppoly import ExpPoly
from .numerics import adaptive_simpson
from .operators import b_op_jet, l_compose_jet, l_op_jet, l_plus
from .profiles import MetricSpec, jet_C, jet_F

__all__ = [
    "CurvatureSample",
    "NotKahlerError",
    "scalar_curvature",
    "tf_ricci",
    "weyl",
    "delta_w_potential",
    "bach",
    "ricci_form_kahler",
    "kahler_scalar_curvature",
    "weyl_energy",
    "curvature_sample",
]

_HALF = Fraction(1, 2)


class NotKahlerError(ValueError):
    """Kähler-only quantity requested on a metric without the matching tag."""


@dataclass(frozen=True)
class CurvatureSample:
    """Every curvature scalar/component of a metric at one z."""

    z: float
    s: float
    ric0_a: float
    ric0_b: float
    w_plus: float
    w_minus: float
    w_plus_norm2: float
    w_minus_norm2: float
    delW_plus_pot: float
    delW_minus_pot: float
    bach_B1: float
    bach_B2: float
    rho_plus: Optional[float] = None
    rho_minus: Optional[float] = None


def _jets(m: MetricSpec, z: float):
    fj = jet_F(m, z).as_tuple()
    cj = jet_C(m, z, powers=(1, _HALF, -_HALF))
    return fj, cj[Fraction(1)].as_tuple(), cj[_HALF].as_tuple(), cj[-_HALF].as_tuple()


def _scalar_from_jets(fj, c, h):
    # s = -4C⁻¹(F″ + ½F − 2) − 24C^{-3/2}·d/dz(F·(C^{1/2})′)
    c_val = c[0]
    c_m32 = c_val ** -1.5
    dz_term = fj[1] * h[1] + fj[0] * h[2]
    return -4.0 / c_val * (fj[2] + 0.5 * fj[0] - 2.0) - 24.0 * c_m32 * dz_term


def scalar_curvature(m: MetricSpec, z: float) -> float:
    """Scalar curvature s(z); requires F(z), C(z) ≠ 0."""
    fj, c, h, _ = _jets(m, z)
    return _scalar_from_jets(fj, c, h)


def tf_ricci(m: MetricSpec, z: float) -> tuple:
    """(ric0_a, ric0_b), the two trace-free Ricci coefficients."""
    fj, c, _, g = _jets(m, z)
    ric0_a = 4.0 * fj[0] * g[0] * (g[2] - 0.25 * g[0])
    ric0_b = 2.0 * (g[0] * (fj[1] * g[1] + fj[0] * g[2]) - (fj[2] * 0.5 - 0.75 * fj[0] + 1.0) / c[0])
    return (ric0_a, ric0_b)


def weyl(m: MetricSpec, z: float) -> tuple:
    """(w_plus, w_minus, w_plus_norm2, w_minus_norm2).

    w± = −C⁻¹(L±F − 1) and |W±|² = (32/3)·C⁻²(L±F − 1)².
    """
    fj = jet_F(m, z).as_tuple()
    c = jet_C(m, z, powers=(1,))[Fraction(1)].value
    lp = l_op_jet("plus", fj)[0] - 1.0
    lm = l_op_jet("minus", fj)[0] - 1.0
    return (-lp / c, -lm / c, (32.0 / 3.0) * lp * lp / c**2, (32.0 / 3.0) * lm * lm / c**2)


def delta_w_potential(m: MetricSpec, sign, z: float) -> float:
    """P±(z) = e^{±(3/2)z}·(L±F − 1)·√C.

    δW± vanishes on an interval iff P± is constant there (or the whole Weyl
    half W± is identically zero, in which case δW± is trivially zero and the
    caller should detect that case first).
    """
    fj = jet_F(m, z).as_tuple()
    sqrt_c = jet_C(m, z, powers=(_HALF,))[_HALF].value
    if sign in ("plus", "+", 1):
        return math.exp(1.5 * z) * (l_op_jet("plus", fj)[0] - 1.0) * sqrt_c
    return math.exp(-1.5 * z) * (l_op_jet("minus", fj)[0] - 1.0) * sqrt_c


def bach(m: MetricSpec, z: float) -> tuple:
    """(B1, B2): B1 = (16/3)C⁻²·F·(L⁻(L⁺F) − 1), B2 = (8/3)C⁻²·B(F,F)."""
    fj = jet_F(m, z).as_tuple()
    c = jet_C(m, z, powers=(1,))[Fraction(1)].value
    b1 = (16.0 / 3.0) / c**2 * fj[0] * (l_compose_jet(fj) - 1.0)
    b2 = (8.0 / 3.0) / c**2 * b_op_jet(fj)
    return (b1, b2)


def ricci_form_kahler(m: MetricSpec, z: float) -> tuple:
    """(rho_plus, rho_minus), the Ricci-form coefficients of a Kähler metric.

    For a Jplus metric (C = C0·e^{-z}):
        rho_plus  = −(2/C)(L⁺F − 1)
        rho_minus = −(2/C)((−½F″ + ½F′ + F) − 1)
    The Jminus case is the z ↦ −z mirror of the same formulas.
    """
    if m.tag not in ("Jplus", "Jminus"):
        raise NotKahlerError(f"metric {m.name!r} is not tagged Jplus/Jminus")
    fj = jet_F(m, z).as_tuple()
    c = jet_C(m, z, powers=(1,))[Fraction(1)].value
    if m.tag == "Jplus":
        rp = -(2.0 / c) * (l_op_jet("plus", fj)[0] - 1.0)
        rm = -(2.0 / c) * ((-0.5 * fj[2] + 0.5 * fj[1] + fj[0]) - 1.0)
    else:
        rm = -(2.0 / c) * (l_op_jet("minus", fj)[0] - 1.0)
        rp = -(2.0 / c) * ((-0.5 * fj[2] - 0.5 * fj[1] + fj[0]) - 1.0)
    return (rp, rm)


def kahler_scalar_curvature(m: MetricSpec, z: float) -> float:
    """s via the Kähler shortcut −(8/C)(L±F − 1); cross-check for the general formula."""
    if m.tag not in ("Jplus", "Jminus"):
        raise NotKahlerError(f"metric {m.name!r} is not tagged Jplus/Jminus")
    fj = jet_F(m, z).as_tuple()
    c = jet_C(m, z, powers=(1,))[Fraction(1)].value
    sign = "plus" if m.tag == "Jplus" else "minus"
    return -(8.0 / c) * (l_op_jet(sign, fj)[0] - 1.0)


def weyl_energy(m: MetricSpec, a: float, b: float, tol: float = 1e-10) -> float:
    """∫ₐᵇ (16/3)(L⁺F − 1)² dz by adaptive Simpson quadrature.

    This is the W⁺ energy density per unit η-coframe 3-sphere volume; the
    constant S³ volume factor is deliberately not included.
    """
    poly = l_plus(m.f_poly()) - ExpPoly.constant(1)

    def integrand(z: float) -> float:
        v = poly.eval(z)
        return (16.0 / 3.0) * v * v

    return adaptive_simpson(integrand, a, b, tol=tol, max_depth=40)


def curvature_sample(m: MetricSpec, z: float) -> CurvatureSample:
    """All curvature quantities at one z (ρ± only when the metric is Kähler-tagged)."""
    fj, c, h, g = _jets(m, z)
    s = _scalar_from_jets(fj, c, h)
    ric0_a = 4.0 * fj[0] * g[0] * (g[2] - 0.25 * g[0])
    ric0_b = 2.0 * (g[0] * (fj[1] * g[1] + fj[0] * g[2]) - (fj[2] * 0.5 - 0.75 * fj[0] + 1.0) / c[0])
    lp = l_op_jet("plus", fj)[0] - 1.0
    lm = l_op_jet("minus", fj)[0] - 1.0
    c_val = c[0]
    rho_p = rho_m = None
    if m.tag in ("Jplus", "Jminus"):
        rho_p, rho_m = ricci_form_kahler(m, z)
    return CurvatureSample(
        z=z,
        s=s,
        ric0_a=ric0_a,
        ric0_b=ric0_b,
        w_plus=-lp / c_val,
        w_minus=-lm / c_val,
        w_plus_norm2=(32.0 / 3.0) * lp * lp / c_val**2,
        w_minus_norm2=(32.0 / 3.0) * lm * lm / c_val**2,
        delW_plus_pot=math.exp(1.5 * z) * lp * h[0],
        delW_minus_pot=math.exp(-1.5 * z) * lm * h[0],
        bach_B1=(16.0 / 3.0) / c_val**2 * fj[0] * (l_compose_jet(fj) - 1.0),
        bach_B2=(8.0 / 3.0) / c_val**2 * b_op_jet(fj),
        rho_plus=rho_p,
        rho_minus=rho_m,
    )
