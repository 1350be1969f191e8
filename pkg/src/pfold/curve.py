"""Global solution curves, turning points, and convergence diagnostics.

Given the dense trajectory ``w(t)`` of a generating IVP, the full
``(lambda, u(0))`` solution curve of the corresponding boundary value
problem is recovered algebraically:

* ``gelfand``:  ``lambda = t^(alpha+p) e^w``,        ``u(0) = -w``;
* ``mems``:     ``lambda = t^(alpha+p) / w^(p+q-1)``, ``u(0) = 1 - 1/w``;
* ``jl``:       ``lambda = t^(p+alpha) w^(q-p+1)``,   ``u(0) = 1/w - 1``.

``lambda'(t)`` has the sign of a class-specific monitor function ``M(t)``
(a bracket linear in ``w`` and ``t w'``), so folds of the curve are exactly
the roots of ``M``.  The guiding solution ``w0`` is the zero set of ``M``;
crossings of ``w`` with ``w0`` and roots of ``M`` interlace, and both
accumulate geometrically in ``t`` when the linearized Euler equation is
oscillatory.

Roots are bracketed on a scan grid (trajectory nodes plus a log-uniform
refinement) and refined by bisection on the dense output.  A sign change is
accepted only where ``|M|`` clears a guard proportional to the local
interpolation error, which suppresses spurious near-tangential crossings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ivp as _ivp
from .model import (
    ClosedForms,
    Params,
    ProblemClass,
    characteristic_quadratic,
    closed_forms,
    guiding_eval,
)

__all__ = [
    "CurvePoint",
    "SolutionCurve",
    "TurningPoint",
    "IntersectionRecord",
    "ConvergenceReport",
    "curve_values",
    "monitor",
    "build_curve",
    "turning_points",
    "intersections",
    "check_interlacing",
    "convergence",
    "profile",
    "singular_profile",
    "shooting_check",
]

#: Relative t-tolerance for bisection refinement of monitor roots and crossings.
ROOT_RTOL = 1e-10

#: Scan density for root bracketing, in points per decade of t.
SCAN_PER_DECADE = 64


def curve_values(problem: ProblemClass, params: Params, t, w):
    """Map ``(t, w)`` to ``(lambda, u0)`` for the given class (vectorized)."""
    p, alpha, q = params.p, params.alpha, params.q
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    if problem is ProblemClass.GELFAND:
        lam = t ** (alpha + p) * np.exp(w)
        u0 = -w
    elif problem is ProblemClass.MEMS:
        lam = t ** (alpha + p) / w ** (p + q - 1.0)
        u0 = 1.0 - 1.0 / w
    else:
        lam = t ** (p + alpha) * w ** (q - p + 1.0)
        u0 = 1.0 / w - 1.0
    if lam.ndim == 0:
        return float(lam), float(u0)
    return lam, u0


def monitor(problem: ProblemClass, params: Params, t, w, wprime):
    """Monitor function ``M(t)`` whose sign equals the sign of ``lambda'(t)``:

    * ``gelfand``: ``(alpha + p) + t w'``,
    * ``mems``:    ``(alpha + p) w - t (p + q - 1) w'``,
    * ``jl``:      ``(p + alpha) w + (q - p + 1) t w'``.
    """
    p, alpha, q = params.p, params.alpha, params.q
    if problem is ProblemClass.GELFAND:
        return (alpha + p) + t * wprime
    if problem is ProblemClass.MEMS:
        return (alpha + p) * w - t * (p + q - 1.0) * wprime
    return (p + alpha) * w + (q - p + 1.0) * t * wprime


#: Headroom factor of the sign-change guard over the estimated dense-output error.
GUARD_FACTOR = 50.0


def _monitor_coeff_sum(problem: ProblemClass, params: Params) -> float:
    """Sum of the magnitudes of the monitor's coefficients on ``w`` and ``t w'``."""
    p, alpha, q = params.p, params.alpha, params.q
    if problem is ProblemClass.GELFAND:
        return 1.0
    if problem is ProblemClass.MEMS:
        return (alpha + p) + (p + q - 1.0)
    return (p + alpha) + (q - p + 1.0)


def _error_guard(traj: _ivp.Trajectory, w, t_wprime, coeff_sum: float):
    """Noise floor for sign changes of a functional linear in ``w`` and ``t w'``.

    The dense output carries a global error of order
    ``rel_tol * (|w| + |t w'|) + abs_tol`` (with headroom for accumulation);
    sign changes whose values stay below ``GUARD_FACTOR`` times this level
    are unresolved and must not be reported.
    """
    cfg = traj.config
    state_err = cfg.rel_tol * (np.abs(w) + np.abs(t_wprime) + 1.0) + cfg.abs_tol
    return GUARD_FACTOR * coeff_sum * state_err


@dataclass(frozen=True)
class CurvePoint:
    """One sample of the solution curve (``lam`` is the parameter value)."""

    t: float
    lam: float
    u0: float
    monitor: float


@dataclass(frozen=True)
class SolutionCurve:
    """Log-uniformly sampled solution curve with its source trajectory."""

    problem: ProblemClass
    params: Params
    closed_forms: ClosedForms
    points: tuple[CurvePoint, ...]
    trajectory: _ivp.Trajectory
    truncated: bool = False

    @property
    def t_end(self) -> float:
        return self.points[-1].t


@dataclass(frozen=True)
class TurningPoint:
    """Fold of the solution curve: a sign change of the monitor.

    ``direction`` records the passage of the curve through the fold:
    ``"right-to-left"`` for a monitor going + to - (local maximum of
    ``lambda``), ``"left-to-right"`` for - to +.
    """

    t_star: float
    lambda_star: float
    u0_star: float
    direction: str


@dataclass(frozen=True)
class IntersectionRecord:
    """Sign changes of ``P(t) = w(t) - w0(t)`` and the extrema between them."""

    times: tuple[float, ...]
    extrema_times: tuple[float, ...]
    extrema_abs: tuple[float, ...]


def _scan_grid(traj: _ivp.Trajectory, t_lo: float, t_hi: float) -> np.ndarray:
    decades = math.log10(t_hi / t_lo)
    refine = np.geomspace(t_lo, t_hi, max(int(round(SCAN_PER_DECADE * decades)), 8) + 1)
    nodes = traj.ts[(traj.ts >= t_lo) & (traj.ts <= t_hi)]
    return np.unique(np.concatenate([refine, nodes]))


def _bisect(fn, a: float, b: float, fa: float) -> float:
    """Plain bisection of a scalar function with a sign change on [a, b]."""
    while (b - a) > ROOT_RTOL * max(abs(a), abs(b)):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        if fn(mid) * fa > 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _guarded_sign_changes(values, guards):
    """Indices (i, j) of consecutive guard-clearing points with opposite signs."""
    significant = np.abs(values) > guards
    idx = np.flatnonzero(significant)
    pairs = []
    for k in range(len(idx) - 1):
        i, j = idx[k], idx[k + 1]
        if values[i] * values[j] < 0.0:
            pairs.append((i, j))
    return pairs


def build_curve(traj: _ivp.Trajectory, cf: ClosedForms | None = None,
                samples_per_decade: int = 50) -> SolutionCurve:
    """Sample the solution curve log-uniformly over the trajectory range.

    The number of rows is ``round(samples_per_decade * decades) + 1`` where
    ``decades = log10(t_end / t_start)``.  For ``jl`` runs truncated at a
    zero of ``w``, samples with ``w`` at or below the integration floor are
    dropped and the curve is marked ``truncated``.
    """
    if cf is None:
        cf = closed_forms(traj.params, traj.problem)
    t_lo, t_hi = traj.t_start, traj.t_end
    if not t_hi > t_lo:
        raise ValueError("trajectory covers an empty range")
    decades = math.log10(t_hi / t_lo)
    count = int(round(samples_per_decade * decades)) + 1
    if count < 2:
        raise ValueError("requested sampling produces fewer than two points")
    grid = np.geomspace(t_lo, t_hi, count)
    w, wp = traj.eval_many(grid)
    keep = np.ones(len(grid), dtype=bool)
    truncated = traj.termination == "zero"
    if traj.problem is not ProblemClass.GELFAND:
        keep = w > 10.0 * traj.config.abs_tol
    lam, u0 = curve_values(traj.problem, traj.params, grid[keep], w[keep])
    mon = monitor(traj.problem, traj.params, grid[keep], w[keep], wp[keep])
    points = tuple(
        CurvePoint(t=float(t), lam=float(lv), u0=float(u), monitor=float(m))
        for t, lv, u, m in zip(grid[keep], lam, u0, mon)
    )
    if not points:
        raise ValueError("no curve points with positive w in range")
    return SolutionCurve(
        problem=traj.problem,
        params=traj.params,
        closed_forms=cf,
        points=points,
        trajectory=traj,
        truncated=truncated,
    )


def turning_points(traj: _ivp.Trajectory) -> list[TurningPoint]:
    """All guarded sign changes of the monitor on the trajectory range,
    refined by bisection on the dense output.

    Directions alternate along the returned (time-ordered) sequence.
    """
    problem, params = traj.problem, traj.params
    grid = _scan_grid(traj, traj.t_start, traj.t_end)
    w, wp = traj.eval_many(grid)
    m = monitor(problem, params, grid, w, wp)
    guards = _error_guard(traj, w, grid * wp, _monitor_coeff_sum(problem, params))

    def m_at(t: float) -> float:
        wt, wpt = traj.eval(t)
        return monitor(problem, params, t, wt, wpt)

    out: list[TurningPoint] = []
    for i, j in _guarded_sign_changes(m, guards):
        t_star = _bisect(m_at, float(grid[i]), float(grid[j]), float(m[i]))
        wt, _ = traj.eval(t_star)
        lam, u0 = curve_values(problem, params, t_star, wt)
        direction = "right-to-left" if m[i] > 0.0 else "left-to-right"
        out.append(TurningPoint(t_star=t_star, lambda_star=lam, u0_star=u0,
                                direction=direction))
    return out


def intersections(traj: _ivp.Trajectory, cf: ClosedForms | None = None,
                  t_min: float | None = None) -> IntersectionRecord:
    """Crossings of the generating solution with the guiding solution.

    Locates the sign changes of ``P(t) = w(t) - w0(t)`` on
    ``[t_min, t_end]`` (default ``t_min = 10 t_start``, which excludes the
    region where the guiding solution is singular or trivially far), and
    the extremum of ``|P|`` between each pair of consecutive crossings.
    """
    if cf is None:
        cf = closed_forms(traj.params, traj.problem)
    if t_min is None:
        t_min = 10.0 * traj.t_start
    if not t_min > traj.t_start:
        raise ValueError(f"t_min must exceed t_start = {traj.t_start!r}")
    grid = _scan_grid(traj, t_min, traj.t_end)
    w, wp = traj.eval_many(grid)
    w0, w0p = guiding_eval(cf, grid)
    p_vals = w - w0
    guards = _error_guard(traj, w, grid * wp, 1.0)

    def p_at(t: float) -> float:
        wt, _ = traj.eval(t)
        return wt - guiding_eval(cf, t)[0]

    def dp_at(t: float) -> float:
        _, wpt = traj.eval(t)
        return wpt - guiding_eval(cf, t)[1]

    times: list[float] = []
    for i, j in _guarded_sign_changes(p_vals, guards):
        times.append(_bisect(p_at, float(grid[i]), float(grid[j]), float(p_vals[i])))

    extrema_times: list[float] = []
    extrema_abs: list[float] = []
    dp_vals = wp - w0p
    for a, b in zip(times[:-1], times[1:]):
        inside = (grid > a) & (grid < b)
        cand: list[float] = []
        sub = np.flatnonzero(inside)
        for k in range(len(sub) - 1):
            i, j = sub[k], sub[k + 1]
            if dp_vals[i] * dp_vals[j] < 0.0:
                cand.append(_bisect(dp_at, float(grid[i]), float(grid[j]), float(dp_vals[i])))
        if not cand and np.any(inside):
            # fall back to the largest sampled deviation
            k = np.argmax(np.abs(p_vals[inside]))
            cand = [float(grid[inside][k])]
        if cand:
            best = max(cand, key=lambda t: abs(p_at(t)))
            extrema_times.append(best)
            extrema_abs.append(abs(p_at(best)))
    return IntersectionRecord(
        times=tuple(times),
        extrema_times=tuple(extrema_times),
        extrema_abs=tuple(extrema_abs),
    )


def check_interlacing(crossing_times, turning_times) -> bool:
    """True when crossings and folds strictly alternate.

    Merged in time order, consecutive events must be of different type;
    this implies the counts differ by at most one and that every interval
    between consecutive crossings contains exactly one fold.
    """
    events = sorted(
        [(t, "x") for t in crossing_times] + [(t, "m") for t in turning_times]
    )
    return all(a[1] != b[1] for a, b in zip(events[:-1], events[1:]))


def singular_profile(cf: ClosedForms, r):
    """Explicit singular limit profile: ``-(p+alpha) ln r``, ``1 - r^beta``,
    or ``r^-beta - 1`` depending on the class."""
    r = np.asarray(r, dtype=float)
    if cf.guiding_kind == "logarithmic":
        u = -cf.beta * np.log(r)
    elif cf.guiding_kind == "power-growth":
        u = 1.0 - r**cf.beta
    else:
        u = r**-cf.beta - 1.0
    return float(u) if u.ndim == 0 else u


def profile(traj: _ivp.Trajectory, t: float, r_grid) -> tuple[np.ndarray, np.ndarray]:
    """Radial solution ``u(r)`` of the boundary value problem at curve
    parameter ``t``, reconstructed by scaling:

    * ``gelfand``: ``u(r) = w(t r) - w(t)``,
    * ``mems``:    ``u(r) = 1 - w(t r)/w(t)``,
    * ``jl``:      ``u(r) = w(t r)/w(t) - 1``.

    ``u(1) = 0`` exactly and ``u`` decreases in ``r``.
    """
    r = np.asarray(r_grid, dtype=float)
    if np.any(r <= 0.0) or np.any(r > 1.0):
        raise ValueError("r_grid must lie in (0, 1]")
    if t * r.max() > traj.t_end * (1.0 + 1e-12) or t * r.min() < traj.t_start * (1.0 - 1e-12):
        raise ValueError("t * r_grid leaves the trajectory range")
    w_r, _ = traj.eval_many(np.minimum(t * r, traj.t_end))
    w_t, _ = traj.eval(min(t, traj.t_end))
    if traj.problem is ProblemClass.GELFAND:
        u = w_r - w_t
    elif traj.problem is ProblemClass.MEMS:
        u = 1.0 - w_r / w_t
    else:
        u = w_r / w_t - 1.0
    return r, u


@dataclass(frozen=True)
class ConvergenceReport:
    """Distance of the computed curve from its explicit singular limit."""

    lambda_inf: float
    t_eval: float
    lambda_at: float
    lambda_gap: float
    turning_lambda_gaps: tuple[float, ...]
    profile_sup_gap: float
    char_root_real: float

    def to_dict(self) -> dict:
        return {
            "lambda_inf": self.lambda_inf,
            "t_eval": self.t_eval,
            "lambda_at": self.lambda_at,
            "lambda_gap": self.lambda_gap,
            "turning_lambda_gaps": list(self.turning_lambda_gaps),
            "profile_sup_gap": self.profile_sup_gap,
            "char_root_real": self.char_root_real,
        }


def convergence(curve: SolutionCurve, t_eval: float | None = None,
                r_points: int = 64) -> ConvergenceReport:
    """Convergence report at ``t_eval`` (default: end of the curve).

    ``lambda_gap`` is ``|lambda(t_eval) - lambda_inf|``;
    ``turning_lambda_gaps`` lists ``|lambda* - lambda_inf|`` over all folds
    (eventually decreasing when the regime is oscillatory);
    ``profile_sup_gap`` is the sup-distance of the radial profile at
    ``t_eval`` from the explicit singular profile over 64 log-spaced radii
    in [0.1, 1].  The real part of the characteristic roots is included
    since it sets the expected decay rate ``t^Re(r)`` of both gaps.
    """
    traj = curve.trajectory
    if traj.t_end < 1e3:
        raise ValueError("convergence report needs a trajectory reaching t >= 1e3")
    if t_eval is None:
        t_eval = traj.t_end
    cf = curve.closed_forms
    w_t, _ = traj.eval(t_eval)
    lam, _ = curve_values(curve.problem, curve.params, t_eval, w_t)
    turns = turning_points(traj)
    gaps = tuple(abs(tp.lambda_star - cf.lambda_inf) for tp in turns)
    r = np.geomspace(0.1, 1.0, r_points)
    _, u = profile(traj, t_eval, r)
    sup_gap = float(np.max(np.abs(u - singular_profile(cf, r))))
    quad = characteristic_quadratic(curve.params, curve.problem)
    return ConvergenceReport(
        lambda_inf=cf.lambda_inf,
        t_eval=float(t_eval),
        lambda_at=float(lam),
        lambda_gap=float(abs(lam - cf.lambda_inf)),
        turning_lambda_gaps=gaps,
        profile_sup_gap=sup_gap,
        char_root_real=quad.roots[0].real,
    )


def _bvp_source(problem: ProblemClass, q: float | None):
    if problem is ProblemClass.GELFAND:
        return math.exp
    if problem is ProblemClass.MEMS:
        return lambda u: (1.0 - u) ** -q
    return lambda u: (1.0 + u) ** q


def shooting_check(params: Params, problem: ProblemClass, point: CurvePoint,
                   rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> float:
    """Independent validation of a curve point by shooting the radial BVP.

    Integrates the radial equation in ``r`` from a series startup near 0
    with center value ``u(0) = point.u0`` at ``lambda = point.lam`` and
    returns ``|u(1)|``, which vanishes exactly when the point lies on the
    solution curve.  Tolerances are decoupled from the generating
    integration so the check is a genuine cross-validation.
    """
    p, n, alpha = params.p, params.n, params.alpha
    lam, u0 = point.lam, point.u0
    if problem is ProblemClass.MEMS and not u0 < 1.0:
        raise ValueError("mems center value must satisfy u0 < 1")
    f = _bvp_source(problem, params.q)
    g0 = lam * f(u0)
    sigma = (alpha + p) / (p - 1.0)
    kappa = (p - 1.0) / (alpha + p) * (g0 / (n + alpha)) ** (1.0 / (p - 1.0))
    # startup radius: keep the series correction below ~1e-10 of the scale
    if kappa > 0.0:
        r_start = min(1e-6, (1e-10 * max(1.0, abs(u0)) / kappa) ** (1.0 / sigma))
        r_start = max(r_start, 1e-30)
    else:
        r_start = 1e-6
    y0 = [u0 - kappa * r_start**sigma, -g0 * r_start ** (n + alpha) / (n + alpha)]

    def rhs(r, y):
        u, v = y
        return (
            _ivp._phi_inv(v / r ** (n - 1.0), p),
            -lam * r ** (n + alpha - 1.0) * f(u),
        )

    cfg = _ivp.IntegratorConfig(t_start=r_start, t_max=1.0, rel_tol=rel_tol,
                                abs_tol=abs_tol, max_steps=200_000, log_time=False)
    xs, ys, interps, _, _, completed = _ivp._run_segment(
        rhs, r_start, y0, 1.0, cfg, cfg.max_steps, watch_zero=False
    )
    if not completed:
        raise _ivp.IntegrationError("shooting integration exhausted max_steps",
                                    (xs[-1], ys[-1][0], ys[-1][1]))
    return abs(ys[-1][0])
