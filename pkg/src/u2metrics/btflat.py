"""The B^t-flat system as an explicit first-order ODE flow.

State is the 8-vector (F, F′, F″, F‴, C, C′, s, K) with K = C·F·s′ carried as
a field so the quadrature (CFs′)′ = 0 is solved structurally rather than
integrated.  The flow solves the second-order equation F1 = 0 for C″ and the
fourth-order equation F2 = 0 for F⁗ (triangular elimination: F1 contains no
F⁗).  The third-order quantity T is a constant of the motion and is monitored
along every trajectory; B^t-flat solutions are those with T = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .operators import b_op_jet
from .profiles import MetricSpec, jet_C, jet_F
from .curvature import scalar_curvature

__all__ = [
    "BtState",
    "BtSample",
    "BtTrajectory",
    "SingularSystemError",
    "SeedError",
    "SearchFailure",
    "bt_residuals",
    "bt_rhs",
    "bt_integrate",
    "bt_csc_seed",
    "bt_nonextremal_search",
    "bt_grid_residual",
    "state_from_metric",
]

_COEF_FLOOR = 1e-12

STATE_FIELDS = ("F", "F1d", "F2d", "F3d", "C", "C1d", "s", "K")


class SingularSystemError(ArithmeticError):
    """A linear solve for a highest derivative is singular (or F/C vanished)."""


class SeedError(ValueError):
    """CSC seeding could not place the state on the T = 0 constraint."""


class SearchFailure(RuntimeError):
    """All search trials failed to produce a usable trajectory."""


@dataclass(frozen=True)
class BtState:
    z: float
    F: float
    F1d: float
    F2d: float
    F3d: float
    C: float
    C1d: float
    s: float
    K: float

    def vector(self) -> np.ndarray:
        return np.array([self.F, self.F1d, self.F2d, self.F3d, self.C, self.C1d, self.s, self.K])

    @staticmethod
    def from_vector(z: float, y: Sequence[float]) -> "BtState":
        return BtState(z, *(float(v) for v in y))


@dataclass(frozen=True)
class BtSample:
    state: BtState
    F4d: float
    Tval: float
    F1res: float
    F2res: float


@dataclass
class BtTrajectory:
    t: float
    samples: list = field(default_factory=list)
    max_T_drift: float = 0.0
    max_K_drift: float = 0.0
    steps_accepted: int = 0
    steps_rejected: int = 0
    truncated: bool = False
    truncation_reason: Optional[str] = None

    def final_state(self) -> BtState:
        return self.samples[-1].state

    def extremality_residual(self) -> float:
        """max |L⁺(L⁻F) − 1| over the trajectory, from the carried F⁗."""
        worst = 0.0
        for smp in self.samples:
            st = smp.state
            worst = max(worst, abs(0.25 * smp.F4d - 1.25 * st.F2d + st.F - 1.0))
        return worst


# ----------------------------------------------------------------- residuals
def _guard(state: BtState):
    if state.C <= 0.0:
        raise SingularSystemError(f"C={state.C} is not positive at z={state.z}")
    if state.F == 0.0:
        raise SingularSystemError(f"F vanishes at z={state.z}")


def _s_prime(state: BtState) -> float:
    return state.K / (state.C * state.F)


def _f1_parts(state: BtState) -> tuple:
    """F1res = coef·C″ + rest, with coef = 12F/√C."""
    F, F1, F2 = state.F, state.F1d, state.F2d
    C, C1 = state.C, state.C1d
    sqrt_c = math.sqrt(C)
    h1 = C1 / (2.0 * sqrt_c)  # (C^{1/2})′
    coef = 24.0 * F / (2.0 * sqrt_c)  # = 12F·C^{-1/2}, multiplies C″
    rest = (
        24.0 * (F1 * h1 + F * (-(C1 * C1) / (4.0 * C * sqrt_c)))
        + 4.0 * sqrt_c * (F2 + 0.5 * F - 2.0)
        + state.s * C * sqrt_c
    )
    return coef, rest


def _solve_c2d(state: BtState) -> float:
    coef, rest = _f1_parts(state)
    if abs(coef) < _COEF_FLOOR:
        raise SingularSystemError(f"F1 solve for C'' is singular (coefficient {coef:g})")
    return -rest / coef


def _f2_value(state: BtState, t: float, F4d: float, C2d: float) -> float:
    F, F1 = state.F, state.F1d
    C, C1 = state.C, state.C1d
    s1 = _s_prime(state)
    c_m12_d2 = -C2d / (2.0 * C**1.5) + 0.75 * C1 * C1 / C**2.5  # (C^{-1/2})″
    return (
        (8.0 / 3.0) * (0.25 * F4d - 1.25 * state.F2d + F - 1.0)
        + t * state.s * C**1.5 * (c_m12_d2 - 0.25 / math.sqrt(C))
        + 0.5 * t * (C / F) * F1 * s1
        + t * C1 * s1
    )


def tval(state: BtState, t: float) -> float:
    """The first-integral operator T at a state (third order; no C″ or F⁗)."""
    _guard(state)
    F, F1 = state.F, state.F1d
    C, C1 = state.C, state.C1d
    s = state.s
    s1 = _s_prime(state)
    b = b_op_jet((F, F1, state.F2d, state.F3d))
    return (
        16.0 * b
        - 18.0 * t * F * C1 * s1
        - 6.0 * t * C * F1 * s1
        - 0.75 * t * s / C * (C * C * (-16.0 + 4.0 * F + C * s) + 12.0 * F * C1 * C1 + 8.0 * C * C1 * F1)
    )


def bt_residuals(state: BtState, t: float, F4d: float, C2d: Optional[float] = None) -> tuple:
    """(e0, F1res, F2res, Tval) at a state.

    e0 audits the structurally solved quadrature (CFs′)′ with s′ = K/(CF);
    it is zero by construction.  F1res = 0 is the statement that the state's
    s field equals the metric's scalar curvature; it determines C″, so when
    ``C2d`` is not supplied it is solved for internally and the re-substituted
    residual (≈ 0) is returned for audit.  Supply the model's true C″ to get a
    genuine F1 residual for closed-form data.
    """
    _guard(state)
    s1 = _s_prime(state)
    cf_prime = state.C1d * state.F + state.C * state.F1d
    s2 = -state.K * cf_prime / (state.C * state.F) ** 2  # s″ on the flow
    e0 = cf_prime * s1 + state.C * state.F * s2
    if C2d is None:
        C2d = _solve_c2d(state)
    coef, rest = _f1_parts(state)
    f1res = coef * C2d + rest
    f2res = _f2_value(state, t, F4d, C2d)
    return (e0, f1res, f2res, tval(state, t))


# ----------------------------------------------------------------------- flow
def bt_rhs(state: BtState, t: float) -> tuple:
    """Derivative of the state vector, plus the solved (F4d, C2d).

    Solves F1 = 0 for C″ (coefficient 12F·C^{-1/2}) and then F2 = 0 for F⁗
    (coefficient 2/3); raises :class:`SingularSystemError` when a solve
    coefficient falls below 1e-12 in magnitude.
    """
    _guard(state)
    C2d = _solve_c2d(state)
    rest = _f2_value(state, t, 0.0, C2d)
    # F2 = (2/3)·F⁗ + rest
    F4d = -rest / (2.0 / 3.0)
    s1 = _s_prime(state)
    deriv = np.array([state.F1d, state.F2d, state.F3d, F4d, state.C1d, C2d, s1, 0.0])
    return deriv, F4d, C2d


# Dormand-Prince 5(4) pair.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def bt_integrate(
    init: BtState,
    t: float,
    span: tuple,
    tol: float = 1e-10,
    max_steps: int = 200000,
) -> BtTrajectory:
    """Integrate the 8th-order flow over ``span`` with an embedded 5(4) pair.

    Adaptive step control at relative+absolute tolerance ``tol``; never steps
    across F = 0 or C = 0 — on a singular solve the trajectory is truncated
    and flagged, with the partial samples returned.  K is carried, never
    integrated, so its drift is exactly zero; the drift of the first integral
    T is recorded in ``max_T_drift``.
    """
    a, b = float(span[0]), float(span[1])
    direction = 1.0 if b >= a else -1.0
    traj = BtTrajectory(t=t)

    z = a
    y = init.vector()  # the state's own z is superseded by the span start
    state = BtState.from_vector(z, y)
    try:
        deriv, F4d, _ = bt_rhs(state, t)
    except SingularSystemError as exc:
        traj.truncated = True
        traj.truncation_reason = str(exc)
        return traj
    T0 = tval(state, t)
    traj.samples.append(BtSample(state, F4d, T0, 0.0, 0.0))

    h = direction * min(0.01, abs(b - a))
    min_h = 1e-14 * max(1.0, abs(b - a))
    k = [None] * 7

    while (b - z) * direction > 0.0:
        if abs(h) > abs(b - z):
            h = b - z
        try:
            k[0] = deriv
            failed = False
            for i in range(1, 7):
                yi = y + h * sum(_DP_A[i][j] * k[j] for j in range(i))
                si = BtState.from_vector(z + _DP_C[i] * h, yi)
                k[i], _, _ = bt_rhs(si, t)
            y5 = y + h * sum(_DP_B5[i] * k[i] for i in range(7))
            y4 = y + h * sum(_DP_B4[i] * k[i] for i in range(7))
        except (SingularSystemError, FloatingPointError, OverflowError):
            failed = True
        if not failed:
            scale = tol + tol * np.abs(y)
            err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))
        if failed or not math.isfinite(err):
            h *= 0.5
            traj.steps_rejected += 1
            if abs(h) < min_h:
                traj.truncated = True
                traj.truncation_reason = f"step underflow near z={z:.6g}"
                return traj
            continue
        if err <= 1.0:
            z = z + h
            y = y5
            state = BtState.from_vector(z, y)
            try:
                deriv, F4d, _ = bt_rhs(state, t)
            except SingularSystemError as exc:
                traj.truncated = True
                traj.truncation_reason = str(exc)
                return traj
            Tv = tval(state, t)
            traj.max_T_drift = max(traj.max_T_drift, abs(Tv - T0))
            traj.samples.append(BtSample(state, F4d, Tv, 0.0, 0.0))
            traj.steps_accepted += 1
            if traj.steps_accepted >= max_steps:
                traj.truncated = True
                traj.truncation_reason = "max step count reached"
                return traj
        else:
            traj.steps_rejected += 1
        factor = 0.9 * err ** (-0.2) if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))
        if abs(h) < min_h:
            traj.truncated = True
            traj.truncation_reason = f"step underflow near z={z:.6g}"
            return traj
    return traj


# ------------------------------------------------------------------- seeding
def bt_csc_seed(
    F: float,
    F1d: float,
    F2d: float,
    C: float,
    C1d: float,
    s: float,
    t: float,
    z0: float = 0.0,
) -> BtState:
    """A state on the CSC constraint manifold: K = 0 and T = 0.

    T is linear in F‴ with coefficient 8·F′ (via the F′·(L⁺F)′ term of B), so
    F‴ is solved for directly; when F′ = 0 the solve retargets F″ instead
    (T is then quadratic in F″) and F‴ is set to zero.
    """
    if F == 0.0 or C <= 0.0:
        raise SeedError("seed requires F ≠ 0 and C > 0")
    if abs(F1d) >= _COEF_FLOOR:
        base = BtState(z0, F, F1d, F2d, 0.0, C, C1d, s, 0.0)
        t0 = tval(base, t)
        t1 = tval(BtState(z0, F, F1d, F2d, 1.0, C, C1d, s, 0.0), t)
        slope = t1 - t0  # = 8·F1d
        f3d = -t0 / slope
        return BtState(z0, F, F1d, F2d, f3d, C, C1d, s, 0.0)
    # Fallback: with F′ = 0,  T = 16((F−1)² − ¼F″²) − (3/4)tsC⁻¹(C²(−16+4F+Cs) + 12F·C′²)
    rest = 16.0 * (F - 1.0) ** 2 - 0.75 * t * s / C * (
        C * C * (-16.0 + 4.0 * F + C * s) + 12.0 * F * C1d * C1d
    )
    if rest < 0.0:
        raise SeedError("T = 0 unsolvable: F′ = 0 and the F″² target is negative")
    f2d = math.sqrt(rest / 4.0)
    if F2d < 0.0:
        f2d = -f2d
    return BtState(z0, F, F1d, f2d, 0.0, C, C1d, s, 0.0)


def bt_nonextremal_search(
    t: float,
    trials: int = 32,
    span: float = 0.8,
    seed: int = 0,
    tol: float = 1e-10,
    drift_cap: float = 1e-7,
) -> tuple:
    """Search random CSC (s ≠ 0) seeds for a non-conformally-extremal witness.

    Seed distributions: F, F′, F″ uniform in [−2, 2]; C uniform in [0.2, 3];
    C′ uniform in [−1, 1]; s uniform in [−1, 1].  Returns the trajectory with
    the largest extremality residual among trials whose conservation drift
    stays below ``drift_cap``.
    """
    if t == 0.0:
        raise ValueError("t must be nonzero")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    best = None
    best_res = -1.0
    failures = []
    for trial in range(trials):
        F, F1d, F2d = rng.uniform(-2.0, 2.0, size=3)
        C = rng.uniform(0.2, 3.0)
        C1d = rng.uniform(-1.0, 1.0)
        s = rng.uniform(-1.0, 1.0)
        if abs(F) < 0.2 or abs(s) < 0.05:
            continue  # skip near-singular / near-ZSC draws
        try:
            init = bt_csc_seed(F, F1d, F2d, C, C1d, s, t)
        except SeedError as exc:
            failures.append(f"trial {trial}: {exc}")
            continue
        traj = bt_integrate(init, t, (0.0, span), tol=tol)
        if traj.truncated or len(traj.samples) < 5:
            failures.append(f"trial {trial}: {traj.truncation_reason or 'too short'}")
            continue
        if traj.max_T_drift > drift_cap or traj.max_K_drift > drift_cap:
            failures.append(f"trial {trial}: drift {traj.max_T_drift:g}")
            continue
        res = traj.extremality_residual()
        if res > best_res:
            best, best_res = traj, res
    if best is None:
        raise SearchFailure("all trials failed: " + "; ".join(failures[:8]))
    return best, best_res


# -------------------------------------------------- residuals for closed forms
def state_from_metric(m: MetricSpec, t: float, z: float, s_const: Optional[float] = None) -> tuple:
    """(BtState, F4d, C2d) sampled from a closed-form metric at z.

    The s field is the metric's scalar curvature (with s′ via five-point
    differences feeding K = CFs′) unless ``s_const`` pins it to a constant.
    """
    from fractions import Fraction

    fj = jet_F(m, z)
    cj = jet_C(m, z, powers=(1,))[Fraction(1)]
    if s_const is not None:
        s_val, s1 = float(s_const), 0.0
    else:
        h = 1e-3
        svals = [scalar_curvature(m, z + j * h) for j in (-2, -1, 0, 1, 2)]
        s_val = svals[2]
        s1 = (svals[0] - 8.0 * svals[1] + 8.0 * svals[3] - svals[4]) / (12.0 * h)
    K = cj.value * fj.value * s1
    state = BtState(z, fj.value, fj.d1, fj.d2, fj.d3, cj.value, cj.d1, s_val, K)
    return state, fj.d4, cj.d2


def bt_grid_residual(m: MetricSpec, t: float, grid: Sequence[float]) -> float:
    """max over grid of the B^t-flat residuals |F1|, |F2|, |T| for a metric.

    Each residual is normalized by the magnitude of the terms entering it:
    near a conformal-factor pole the T expression carries C^{3/2} and C′²/C
    factors that amplify round-off in the sampled scalar curvature, so raw
    residuals there are pure float noise scaled by those factors.
    """
    worst = 0.0
    for z in grid:
        state, f4d, c2d = state_from_metric(m, t, z)
        _, f1res, f2res, tv = bt_residuals(state, t, f4d, C2d=c2d)
        c, c1d = state.C, state.C1d
        scale = 1.0 + c**1.5 * (1.0 + abs(state.s)) + (c1d * c1d) / max(c, 1e-30)
        worst = max(worst, abs(f1res) / scale, abs(f2res) / scale, abs(tv) / scale)
    return worst
