"""Topology and asymptotics: bolts, end classification, completeness,
the ambiKähler transform, and transcription of classic r-coordinate metrics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .classify import fit_exp_family
from .exppoly import EvalOverflowError
from .numerics import adaptive_simpson
from .profiles import (
    Canonical,
    ConformalModel,
    Domain,
    EinsteinFactor,
    ExpFactor,
    MetricSpec,
    RatioFactor,
    SingularConformalFactorError,
    conformal_value,
    factor_ratio,
)

__all__ = [
    "Bolt",
    "EndReport",
    "TranscriptionResult",
    "TransformError",
    "OrientationError",
    "find_bolts",
    "classify_end",
    "distance",
    "ambikahler_transform",
    "transcribe_classic",
]

_ZERO_TOL = 1e-13
_SLOPE_TOL = 1e-9


class TransformError(ValueError):
    """ambiKähler transform requested on an untagged / non-exp metric."""


class OrientationError(ValueError):
    """z(r) came out non-monotone; flip the orientation sign."""


@dataclass(frozen=True)
class Bolt:
    z0: float
    slope: float
    smooth_quotient: bool
    degenerate: bool = False

    @property
    def self_intersection(self) -> Optional[int]:
        k = round(self.slope)
        return k if (self.smooth_quotient and k != 0) else None


@dataclass(frozen=True)
class EndReport:
    side: str  # "lower" | "upper"
    kind: str  # nut | bolt | ALE | ALF | cusp | asymptotically_einstein |
    #            curvature_singularity | conical | undetermined
    complete: bool
    self_intersection: Optional[int] = None
    cone_angle: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------- bolts
def find_bolts(m: MetricSpec, scan_n: int = 4000) -> list:
    """Zeros of F on the domain (interior plus closed endpoints).

    Sign changes are located by scanning, then refined by bisection with a
    Newton polish to |F| < 1e-13.  The slope k = F′(z0) is the bolt's
    self-intersection when it rounds to a nonzero integer (tolerance 1e-9);
    double zeros (|F′| < 1e-9 as well) are flagged degenerate, not bolts.
    """
    poly = m.f_poly()
    dpoly = poly.derive()
    lo, hi = m.domain.finite_window()
    zs = np.linspace(lo, hi, scan_n)
    roots = []

    def record(z0):
        for r in roots:
            if abs(r - z0) < 1e-8:
                return
        roots.append(z0)

    def refine(a, b):
        fa = poly.eval(a)
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = poly.eval(mid)
            if fa * fm <= 0.0:
                b = mid
            else:
                a, fa = mid, fm
            d = dpoly.eval(mid)
            if d != 0.0:
                nxt = mid - fm / d
                if a < nxt < b and abs(poly.eval(nxt)) < abs(fm):
                    a = b = nxt
            if abs(poly.eval(0.5 * (a + b))) < _ZERO_TOL:
                return 0.5 * (a + b)
        return 0.5 * (a + b)

    values = [poly.eval(z) for z in zs]
    for i in range(len(zs) - 1):
        if values[i] == 0.0:
            record(zs[i])
        elif values[i] * values[i + 1] < 0.0:
            record(refine(zs[i], zs[i + 1]))
    if values[-1] == 0.0:
        record(zs[-1])
    # closed endpoints count; open endpoints do not.
    for z_end, closed in ((m.domain.lo, m.domain.lo_closed), (m.domain.hi, m.domain.hi_closed)):
        if closed and abs(poly.eval(z_end)) < 1e-12:
            record(z_end)
    # drop roots that sit at *open* endpoints
    keep = []
    for r in sorted(roots):
        if not m.domain.lo_closed and abs(r - m.domain.lo) < 1e-8:
            continue
        if not m.domain.hi_closed and abs(r - m.domain.hi) < 1e-8:
            continue
        keep.append(r)

    out = []
    for z0 in keep:
        k = dpoly.eval(z0)
        degenerate = abs(k) < _SLOPE_TOL
        smooth = (not degenerate) and abs(k - round(k)) < _SLOPE_TOL and round(k) != 0
        out.append(Bolt(z0=z0, slope=k, smooth_quotient=smooth, degenerate=degenerate))
    return out


# ------------------------------------------------------------------- distance
def _zero_order(poly, z0: float, max_order: int = 4) -> int:
    """Order of vanishing of an exponential polynomial at z0 (0 if nonzero)."""
    scale = sum(abs(float(c)) for _, c in poly.terms()) or 1.0
    p = poly
    for n in range(max_order + 1):
        if abs(p.eval(z0)) > 1e-8 * scale:
            return n
        p = p.derive()
    return max_order + 1


def _endpoint_exponent(m: MetricSpec, z0: float) -> float:
    """Leading power p in √(C/F) ~ (z − z0)^p at a finite endpoint.

    The integrand's local behavior is read off the exact zero orders of F and
    of the conformal factor's numerator/denominator; the arclength integral
    converges iff p > −1.
    """
    num, den = factor_ratio(m.C)
    ord_f = _zero_order(m.f_poly(), z0)
    return 0.5 * (_zero_order(num, z0) - _zero_order(den, z0) - ord_f)


def _tail_integral(f, z0: float, delta: float, ratio: float, toward_lower: bool, tol: float = 1e-11) -> float:
    """∫ of f over the last ``delta`` before a finite endpoint where the
    integrand blows up like a known integrable power (geometric piece ratio
    ``ratio`` < 1 under interval halving)."""
    total = 0.0
    piece = 0.0
    a_off, b_off = delta, delta / 2.0
    # below this offset z0 ± off is no longer distinguishable from z0 itself
    off_floor = 1e-13 * max(abs(z0), 1.0)
    for _ in range(50):
        if b_off < off_floor:
            break
        if toward_lower:
            piece = adaptive_simpson(f, z0 + b_off, z0 + a_off, tol=tol)
        else:
            piece = adaptive_simpson(f, z0 - a_off, z0 - b_off, tol=tol)
        total += piece
        if abs(piece) < 1e-14 * max(abs(total), 1.0):
            return total
        a_off, b_off = b_off, b_off / 2.0
    return total + piece * ratio / (1.0 - ratio)


def distance(m: MetricSpec, z1: float, z2: float, tol: float = 1e-11) -> float:
    """∫ ½√(C/F) dz between z1 and z2 (each within the domain closure).

    Singular endpoints — F-zeros, conformal-factor poles, infinite z — are
    handled by exponent analysis of the integrand; returns +inf for divergent
    ends (cusps, infinite-length ends).
    """
    if z1 > z2:
        z1, z2 = z2, z1
    poly = m.f_poly()

    def integrand(z):
        fv = poly.eval(z)
        cv = conformal_value(m, z)
        if fv <= 0.0 or cv <= 0.0:
            raise SingularConformalFactorError(f"√(C/F) undefined at z={z}")
        return 0.5 * math.sqrt(cv / fv)

    def safe(z):
        try:
            return integrand(z)
        except (ArithmeticError, EvalOverflowError, ValueError):
            return math.inf

    total = 0.0
    lo, hi = z1, z2

    # infinite upper end: integrate to a finite cut, then an exponential tail
    if math.isinf(hi):
        cut = max(lo + 1.0, 30.0)
        f1, f2 = safe(cut), safe(cut + 1.0)
        if not (math.isfinite(f1) and math.isfinite(f2)) or f1 <= 0.0 or f2 <= 0.0:
            return math.inf
        lam = math.log(f2 / f1)
        if lam >= -1e-9:
            return math.inf
        total += f1 * (-1.0 / lam) * math.exp(0.0)  # ∫_cut^∞ f1·e^{λ(z-cut)} dz
        hi = cut
    if math.isinf(lo):
        cut = min(hi - 1.0, -30.0)
        f1, f2 = safe(cut), safe(cut - 1.0)
        if not (math.isfinite(f1) and math.isfinite(f2)) or f1 <= 0.0 or f2 <= 0.0:
            return math.inf
        lam = math.log(f2 / f1)
        if lam >= -1e-9:
            return math.inf
        total += f1 * (-1.0 / lam)
        lo = cut

    length = hi - lo
    delta = min(0.05, 0.1 * length)

    lo_singular = not math.isfinite(safe(lo))
    hi_singular = not math.isfinite(safe(hi))
    ratios = {}
    for side, singular, z_end in (("lo", lo_singular, lo), ("hi", hi_singular, hi)):
        if not singular:
            continue
        p = _endpoint_exponent(m, z_end)
        if p <= -1.0 + 1e-12:
            return math.inf
        ratios[side] = 0.5 ** (p + 1.0)
    a = lo + (delta if lo_singular else 0.0)
    b = hi - (delta if hi_singular else 0.0)
    total += adaptive_simpson(integrand, a, b, tol=tol)
    if lo_singular:
        total += _tail_integral(integrand, lo, delta, ratios["lo"], toward_lower=True, tol=tol)
    if hi_singular:
        total += _tail_integral(integrand, hi, delta, ratios["hi"], toward_lower=False, tol=tol)
    return total


# ------------------------------------------------------------------------ ends
def _c_exponent_at_infinity(m: MetricSpec, side: int) -> float:
    """Leading growth exponent of C = num/den as z → side·∞ (symbolic)."""
    num, den = factor_ratio(m.C)
    kn = num.extreme_exponent(side)
    kd = den.extreme_exponent(side)
    return float(kn - kd) * 1.0


def _f_limit_is_one(poly, side: int) -> bool:
    """True when F → 1 at side·∞: all exponents decay and the constant is 1."""
    for k, c in poly.terms():
        if k == 0:
            if c != 1:
                return False
        elif float(k) * side > 0:
            return False
    return True


def _f_growth_exponent(poly, side: int) -> float:
    k = poly.extreme_exponent(side)
    if k is None:
        return -math.inf
    return float(k) * side  # growth rate in |z|


def classify_end(m: MetricSpec, side: str) -> EndReport:
    """Classify the lower or upper end of the domain.

    Decision procedure: leading exponents of F and C are extracted
    symbolically from the exponential-polynomial carriers; a finite endpoint
    with a simple F-zero is a bolt (conical when the slope is not a nonzero
    integer), a double F-zero is a cusp (C bounded) or ALF end (C ~ (z−z0)⁻²);
    an infinite endpoint with F → 1 is a nut (C decaying) or ALE end (C
    growing); otherwise growth comparison of F against C separates
    asymptotically-Einstein ends (F = O(C)) from curvature singularities
    (F/C → ∞ with exponent gap ≥ 1).
    """
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    poly = m.f_poly()
    z_end = m.domain.lo if side == "lower" else m.domain.hi
    sgn = -1 if side == "lower" else +1
    diag: dict = {"endpoint": z_end}

    # distance from a midpoint reference toward the end
    w_lo, w_hi = m.domain.finite_window()
    z_ref = 0.5 * (w_lo + w_hi)
    try:
        dist = distance(m, *((z_end, z_ref) if side == "lower" else (z_ref, z_end)))
    except (ArithmeticError, ValueError):
        dist = math.nan
    diag["distance_to_end"] = dist

    def report(kind, complete, self_int=None, cone=None):
        return EndReport(side, kind, complete, self_int, cone, diag)

    if math.isfinite(z_end):
        f0 = poly.eval(z_end)
        f1 = poly.derive().eval(z_end)
        diag["F_at_end"] = f0
        diag["dF_at_end"] = f1
        if abs(f0) < 1e-10:
            if abs(f1) > _SLOPE_TOL:
                k = f1
                diag["slope"] = k
                if abs(k - round(k)) < _SLOPE_TOL and round(k) != 0:
                    return report("bolt", True, self_int=round(k))
                return report("conical", True, cone=2.0 * math.pi * abs(k))
            # double zero: cusp or ALF depending on C
            num, den = factor_ratio(m.C)
            den0 = den.eval(z_end)
            diag["C_denominator_at_end"] = den0
            if abs(den0) < 1e-10:
                return report("ALF", True)
            return report("cusp", True)
        return report("undetermined", False)

    # infinite endpoint
    ck = _c_exponent_at_infinity(m, sgn) * sgn  # growth rate of C in |z|
    fk = _f_growth_exponent(poly, sgn)
    diag["C_growth_exponent"] = ck
    diag["F_growth_exponent"] = fk
    if _f_limit_is_one(poly, sgn):
        if ck < -1e-12:
            return report("nut", True)
        if ck > 1e-12:
            return report("ALE", True)
        return report("undetermined", False)
    if fk > 0.0:
        if fk <= ck + 1e-12:
            return report("asymptotically_einstein", True)
        if fk - ck >= 1.0 - 1e-12:
            return report("curvature_singularity", False)
    return report("undetermined", False)


# ---------------------------------------------------------------- ambiKähler
def ambikahler_transform(m: MetricSpec) -> MetricSpec:
    """The ambiKähler partner: same F, conformal exponent flipped, tag flipped.

    Requires a Jplus metric with C = C0·e^{-z} or a Jminus metric with
    C = C0·e^{+z}; applying the transform twice is the identity.
    """
    if m.tag not in ("Jplus", "Jminus") or not isinstance(m.C, ExpFactor):
        raise TransformError(f"metric {m.name!r} is not an exp-factor Kähler metric")
    new_tag = "Jminus" if m.tag == "Jplus" else "Jplus"
    new_c = ExpFactor(m.C.c0, -m.C.eps)
    return MetricSpec(name=m.name, F=m.F, C=new_c, domain=m.domain, tag=new_tag)


# -------------------------------------------------------------- transcription
@dataclass(frozen=True)
class TranscriptionResult:
    metric: MetricSpec
    zs: np.ndarray
    f_samples: np.ndarray
    c_samples: np.ndarray
    canonical: Canonical
    f_rms: float
    c_model: ConformalModel
    c_rms: float
    best_model: str  # "exp" | "einstein"


def transcribe_classic(
    A: Callable[[float], float],
    B: Callable[[float], float],
    C: Callable[[float], float],
    r_range: tuple,
    orientation: int,
    samples: int = 48,
) -> TranscriptionResult:
    """Transcribe a classic r-coordinate metric (A·dr² + B·η₁² + C·(η₂²+η₃²)).

    z(r) is computed by quadrature of orientation·2√(AB)/C dr with z = 0 at
    the first sample; F = B/C is resampled in z and fitted onto the canonical
    exponential family, and the conformal factor C is fitted against both the
    Exp and Einstein models with best-model selection by rms.
    """
    if orientation not in (-1, 1):
        raise ValueError("orientation must be ±1")
    r_lo, r_hi = r_range
    rs = np.linspace(r_lo, r_hi, samples)

    def dz_dr(r):
        a, b, c = A(r), B(r), C(r)
        if a <= 0.0 or b <= 0.0 or c <= 0.0:
            raise ValueError(f"A, B, C must be positive on the r-range (r={r})")
        return orientation * 2.0 * math.sqrt(a * b) / c

    zs = np.empty(samples)
    zs[0] = 0.0
    for i in range(1, samples):
        zs[i] = zs[i - 1] + adaptive_simpson(dz_dr, rs[i - 1], rs[i], tol=1e-13)
    steps = np.diff(zs)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise OrientationError("z(r) is not monotone; flip the orientation sign")

    f_samples = np.array([B(r) / C(r) for r in rs])
    c_samples = np.array([C(r) for r in rs])
    (c1, c2, c3, c4), f_rms = fit_exp_family(zip(zs, f_samples))
    canonical = Canonical(c1, c2, c3, c4)

    # Exp model: log C = log C0 + ε z with ε snapped to ±1.
    logc = np.log(c_samples)
    slope = np.polyfit(zs, logc, 1)[0]
    eps = -1 if slope < 0 else 1
    log_c0 = float(np.mean(logc - eps * zs))
    exp_model = ExpFactor(math.exp(log_c0), eps)
    exp_pred = np.exp(log_c0 + eps * zs)
    exp_rms = float(np.sqrt(np.mean((exp_pred / c_samples - 1.0) ** 2)))

    # Einstein model: √(e^{-z}/C) = C5 + C6·e^{-z} is linear in e^{-z}.
    y = np.sqrt(np.exp(-zs) / c_samples)
    design = np.column_stack([np.ones_like(zs), np.exp(-zs)])
    (c5, c6), *_ = np.linalg.lstsq(design, y, rcond=None)
    ein_rms = math.inf
    ein_model = None
    if abs(c5) > 1e-300 or abs(c6) > 1e-300:
        ein_model = EinsteinFactor(float(c5), float(c6))
        ein_pred = np.exp(-zs) / (c5 + c6 * np.exp(-zs)) ** 2
        ein_rms = float(np.sqrt(np.mean((ein_pred / c_samples - 1.0) ** 2)))

    if ein_rms < exp_rms:
        best, c_model, c_rms = "einstein", ein_model, ein_rms
    else:
        best, c_model, c_rms = "exp", exp_model, exp_rms

    z_lo, z_hi = float(np.min(zs)), float(np.max(zs))
    metric = MetricSpec(
        name="transcribed",
        F=canonical,
        C=c_model,
        domain=Domain(z_lo, z_hi),
        tag=None,
    )
    order = np.argsort(zs)
    return TranscriptionResult(
        metric=metric,
        zs=zs[order],
        f_samples=f_samples[order],
        c_samples=c_samples[order],
        canonical=canonical,
        f_rms=f_rms,
        c_model=c_model,
        c_rms=c_rms,
        best_model=best,
    )
