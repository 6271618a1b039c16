"""Residual-based classification of canonical metrics.

Each predicate of the summary taxonomy (Kähler, extremal, CSC/ZSC, Einstein,
Bach-flat, half-conformally-flat, half-harmonic, harmonic, hyperKähler,
conformally extremal, B^t-flat) is evaluated either exactly — when the inputs
are exact canonical coefficients with an Exp/Einstein conformal model — or as
a maximum grid residual of its defining equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exppoly import ExpPoly
from .curvature import curvature_sample, tf_ricci
from .operators import l_compose, l_minus, l_plus
from .profiles import (
    Canonical,
    Domain,
    EinsteinFactor,
    ExpFactor,
    MetricSpec,
    SingularConformalFactorError,
    canonical_coefficients,
    conformal_value,
    jet_C,
    jet_F,
)

__all__ = [
    "PredicateResult",
    "ClassificationReport",
    "RankDeficientError",
    "classify",
    "conformally_extremal_residual",
    "fit_exp_family",
    "sample_grid",
    "PREDICATES",
]

PREDICATES = (
    "kahler_plus",
    "kahler_minus",
    "extremal",
    "csc",
    "zsc",
    "einstein",
    "kahler_einstein",
    "ricci_flat",
    "bach_flat",
    "sd",
    "asd",
    "half_harmonic_plus",
    "half_harmonic_minus",
    "harmonic",
    "hyperkahler_Iminus",
    "hyperkahler_Iplus",
    "conformally_extremal",
    "bt_flat",
)


class RankDeficientError(ValueError):
    """Least-squares design matrix is rank deficient (degenerate z-spacing)."""


@dataclass(frozen=True)
class PredicateResult:
    name: str
    verdict: str  # "yes" | "no" | "indeterminate"
    residual: float
    certificate: Optional[str] = None


@dataclass
class ClassificationReport:
    metric_name: str
    tol: float
    grid_n: int
    entries: dict = field(default_factory=dict)

    def verdict(self, name: str) -> str:
        return self.entries[name].verdict

    def residual(self, name: str) -> float:
        return self.entries[name].residual

    def tags(self) -> tuple:
        return tuple(n for n in PREDICATES if n in self.entries and self.entries[n].verdict == "yes")

    def text(self) -> str:
        lines = [f"metric {self.metric_name}", f"tol {self.tol:g}", f"grid_n {self.grid_n}"]
        for name in PREDICATES:
            if name not in self.entries:
                continue
            e = self.entries[name]
            line = f"{name} {e.verdict} residual={e.residual:.6g}"
            if e.certificate:
                line += f" [{e.certificate}]"
            lines.append(line)
        return "\n".join(lines)

    def tree(self) -> dict:
        return {
            "metric": self.metric_name,
            "tol": self.tol,
            "grid_n": self.grid_n,
            "predicates": {
                n: {
                    "verdict": e.verdict,
                    "residual": e.residual,
                    "certificate": e.certificate,
                }
                for n, e in self.entries.items()
            },
        }


def sample_grid(domain: Domain, n: int = 64) -> np.ndarray:
    """n interior sample points, geometrically clustered toward both ends.

    The sampled window is the domain itself when finite (shrunk 1% from each
    endpoint) and a finite sub-window when unbounded.
    """
    lo, hi = domain.finite_window()
    length = hi - lo
    pad = 0.01 * length
    half = n // 2
    offsets = np.geomspace(pad, 0.5 * length, half)
    points = np.concatenate([lo + offsets, hi - offsets])
    return np.unique(points)


def _rational_sqrt(x):
    """Exact sqrt of a Fraction when possible, else float."""
    if isinstance(x, Fraction) and x >= 0:
        num = math.isqrt(x.numerator)
        den = math.isqrt(x.denominator)
        if num * num == x.numerator and den * den == x.denominator:
            return Fraction(num, den)
    return math.sqrt(float(x))


def _as_einstein(model):
    """Einstein-model (C5, C6) equivalent of an Exp/Einstein factor, else None.

    C0·e^{-z} = e^{-z}/(1/√C0)²  and  C0·e^{+z} = e^{-z}/((1/√C0)·e^{-z})².
    """
    if isinstance(model, EinsteinFactor):
        return (model.c5, model.c6)
    if isinstance(model, ExpFactor):
        inv = 1 / _rational_sqrt(model.c0)
        return (inv, 0) if model.eps == -1 else (0, inv)
    return None


def conformally_extremal_residual(m: MetricSpec, grid: Sequence[float]) -> float:
    """max over grid of |L⁺(L⁻(F)) − 1| (conformal-factor independent)."""
    r = l_compose(m.f_poly()) - ExpPoly.constant(1)
    if r.is_zero:
        return 0.0
    return max(abs(r.eval(z)) for z in grid)


def fit_exp_family(samples) -> tuple:
    """Least-squares fit of F − 1 onto span{e^{-2z}, e^{-z}, e^{z}, e^{2z}}.

    Returns ((C1, C2, C3, C4), rms) with the canonical ½-weighting, i.e.
    F ≈ 1 + ½C1·e^{-2z} + C2·e^{-z} + C3·e^{z} + ½C4·e^{2z}.
    """
    samples = list(samples)
    if len(samples) < 8:
        raise ValueError("need at least 8 samples")
    zs = np.array([p[0] for p in samples], dtype=float)
    fs = np.array([p[1] for p in samples], dtype=float)
    design = np.column_stack([np.exp(-2 * zs), np.exp(-zs), np.exp(zs), np.exp(2 * zs)])
    coef, _, rank, _ = np.linalg.lstsq(design, fs - 1.0, rcond=None)
    if rank < 4:
        raise RankDeficientError("degenerate z-spacing: exponential design matrix is rank deficient")
    resid = design @ coef - (fs - 1.0)
    rms = float(np.sqrt(np.mean(resid**2)))
    c1, c2, c3, c4 = 2 * coef[0], coef[1], coef[2], 2 * coef[3]
    return ((float(c1), float(c2), float(c3), float(c4)), rms)


# --------------------------------------------------------------------- classify
def classify(
    m: MetricSpec,
    tol: float = 1e-9,
    grid_n: int = 64,
    t: Optional[float] = None,
    use_exact: bool = True,
) -> ClassificationReport:
    """Evaluate the full predicate taxonomy on a metric.

    ``use_exact=False`` forces the grid-residual path even when exact
    coefficient conditions are available (used to cross-validate the two).
    """
    report = ClassificationReport(metric_name=m.name, tol=tol, grid_n=grid_n)
    grid = sample_grid(m.domain, grid_n)
    poly = m.f_poly()

    # Guard: residual predicates are meaningless where F or C vanishes.
    singular_reason = None
    f_vals = []
    c_vals = []
    try:
        for z in grid:
            fv = poly.eval(z)
            cv = conformal_value(m, z)
            if fv == 0.0:
                singular_reason = f"F vanishes at grid point z={z:.6g}"
                break
            if cv <= 0.0:
                singular_reason = f"C is non-positive at grid point z={z:.6g}"
                break
            f_vals.append(fv)
            c_vals.append(cv)
    except (ArithmeticError, ValueError) as exc:
        singular_reason = str(exc)

    def put(name, verdict, residual, certificate=None):
        report.entries[name] = PredicateResult(name, verdict, float(residual), certificate)

    if singular_reason is not None:
        for name in PREDICATES:
            if name == "bt_flat" and t is None:
                continue
            put(name, "indeterminate", math.inf, singular_reason)
        return report

    f_vals = np.array(f_vals)
    c_vals = np.array(c_vals)

    def verdict_of(residual, scale=1.0):
        return "yes" if residual <= tol * scale else "no"

    # --- Kähler orientations: (log C)' must equal −1 (J⁺) or +1 (J⁻).
    dlogc = np.empty_like(c_vals)
    for i, z in enumerate(grid):
        cj = jet_C(m, z, powers=(1,))[Fraction(1)]
        dlogc[i] = cj.d1 / cj.value
    if use_exact and isinstance(m.C, ExpFactor):
        kp_res = 0.0 if m.C.eps == -1 else 2.0
        km_res = 0.0 if m.C.eps == +1 else 2.0
    else:
        kp_res = float(np.max(np.abs(dlogc + 1.0)))
        km_res = float(np.max(np.abs(dlogc - 1.0)))
    put("kahler_plus", verdict_of(kp_res), kp_res)
    put("kahler_minus", verdict_of(km_res), km_res)
    kahler = report.verdict("kahler_plus") == "yes" or report.verdict("kahler_minus") == "yes"

    # --- conformally extremal / extremal
    ce_res = conformally_extremal_residual(m, grid)
    put("conformally_extremal", verdict_of(ce_res), ce_res)
    if kahler:
        put("extremal", verdict_of(ce_res), ce_res)
    else:
        put("extremal", "no", min(kp_res, km_res), "not Kähler for either orientation")

    # --- curvature samples on the grid
    samples = [curvature_sample(m, z) for z in grid]
    s_arr = np.array([cs.s for cs in samples])
    s_scale = 1.0 + float(np.max(np.abs(s_arr)))
    s0 = float(np.mean(s_arr))
    csc_res = float(np.max(np.abs(s_arr - s0)))
    put("csc", verdict_of(csc_res, s_scale), csc_res, f"s0={s0:.12g}")
    zsc_res = max(csc_res, abs(s0))
    put("zsc", verdict_of(zsc_res, s_scale), zsc_res)

    ric_res = float(max(max(abs(cs.ric0_a), abs(cs.ric0_b)) for cs in samples))
    coeffs = canonical_coefficients(poly)
    einstein_pair = _as_einstein(m.C)
    einstein_exact = None
    if use_exact and coeffs is not None and einstein_pair is not None:
        c1, c2, c3, c4 = coeffs
        c5, c6 = einstein_pair
        einstein_exact = max(abs(c1 * c5 - c2 * c6), abs(c3 * c5 - c4 * c6))
    einstein_res = float(einstein_exact) if einstein_exact is not None else ric_res
    einstein_cert = f"einstein constant s/4 = {s0 / 4.0:.12g}"
    put("einstein", verdict_of(einstein_res), einstein_res, einstein_cert)
    einstein_yes = report.verdict("einstein") == "yes"

    put(
        "kahler_einstein",
        "yes" if (einstein_yes and kahler) else "no",
        max(einstein_res, 0.0 if kahler else min(kp_res, km_res)),
    )
    rf_res = max(einstein_res, zsc_res)
    put("ricci_flat", "yes" if (einstein_yes and report.verdict("zsc") == "yes") else "no", rf_res)

    # --- Bach flat
    if use_exact and coeffs is not None:
        c1, c2, c3, c4 = coeffs
        bach_res = abs(c1 * c4 - c2 * c3) if ce_res == 0.0 else max(float(abs(c1 * c4 - c2 * c3)), ce_res)
        bach_res = float(bach_res)
    else:
        bach_res = float(max(max(abs(cs.bach_B1), abs(cs.bach_B2)) for cs in samples))
    put("bach_flat", verdict_of(bach_res), bach_res)

    # --- half-conformally-flat (sd: W⁻ = 0, asd: W⁺ = 0)
    lm_poly = l_minus(poly) - ExpPoly.constant(1)
    lp_poly = l_plus(poly) - ExpPoly.constant(1)
    sd_res = 0.0 if lm_poly.is_zero else max(abs(lm_poly.eval(z)) for z in grid)
    asd_res = 0.0 if lp_poly.is_zero else max(abs(lp_poly.eval(z)) for z in grid)
    put("sd", verdict_of(sd_res), sd_res)
    put("asd", verdict_of(asd_res), asd_res)

    # --- half harmonic: P± constant on the grid (or the Weyl half vanishes)
    for name, wz_poly, pot in (
        ("half_harmonic_plus", lp_poly, [cs.delW_plus_pot for cs in samples]),
        ("half_harmonic_minus", lm_poly, [cs.delW_minus_pot for cs in samples]),
    ):
        if wz_poly.is_zero:
            put(name, "yes", 0.0, "weyl-half-zero")
        else:
            pot = np.array(pot)
            scale = 1.0 + float(np.max(np.abs(pot)))
            res = float(np.max(pot) - np.min(pot))
            put(name, verdict_of(res, scale), res)
    hh_res = max(report.residual("half_harmonic_plus"), report.residual("half_harmonic_minus"))
    put(
        "harmonic",
        "yes"
        if report.verdict("half_harmonic_plus") == "yes" and report.verdict("half_harmonic_minus") == "yes"
        else "no",
        hh_res,
    )

    # --- hyperKähler shape tests: the first-order system and its mirror
    for name, orient in (("hyperkahler_Iminus", -1), ("hyperkahler_Iplus", +1)):
        if np.any(f_vals <= 0.0):
            put(name, "indeterminate", math.inf, "F not positive on grid")
            continue
        worst = 0.0
        for i, z in enumerate(grid):
            fj = jet_F(m, z)
            sqrt_f = math.sqrt(fj.value)
            # I⁻:  F′/(2√F) = √F − 1   and  (log C)′ = −1 + 2/√F ; I⁺ mirrors signs.
            if orient < 0:
                r1 = fj.d1 / (2.0 * sqrt_f) - (sqrt_f - 1.0)
                r2 = dlogc[i] - (-1.0 + 2.0 / sqrt_f)
            else:
                r1 = fj.d1 / (2.0 * sqrt_f) + (sqrt_f - 1.0)
                r2 = dlogc[i] - (1.0 - 2.0 / sqrt_f)
            worst = max(worst, abs(r1), abs(r2))
        put(name, verdict_of(worst), worst)

    # --- B^t flatness (delegated residuals), only when t is supplied
    if t is not None:
        from .btflat import bt_grid_residual

        try:
            bt_res = bt_grid_residual(m, t, grid)
            put("bt_flat", verdict_of(bt_res, s_scale), bt_res, f"t={t:g}")
        except (ArithmeticError, ValueError) as exc:
            put("bt_flat", "indeterminate", math.inf, str(exc))

    return report
