"""Numerical integration of the three generating initial value problems.

Each problem class is generated by one IVP that is singular at ``t = 0``:

* ``gelfand``:  ``phi(w')' + ((n-1)/t) phi(w') + t^alpha e^w = 0``,
  ``w(0) = 0``, ``w'(0) = 0``;
* ``mems``:     ``phi(w')' + ((n-1)/t) phi(w') = t^alpha / w^q``,
  ``w(0) = 1``, ``w'(0) = 0``;
* ``jl``:       ``phi(w')' + ((n-1)/t) phi(w') + t^alpha w^q = 0``,
  ``w(0) = 1``, ``w'(0) = 0``,

with ``phi(s) = s |s|^(p-2)``.  The equations are integrated in the flux
variables ``(w, v)`` with ``v = t^(n-1) phi(w')``, so that the singular
``(n-1)/t`` term is absorbed into an exact derivative and ``phi`` is never
differentiated:

    ``w' = phiinv(v / t^(n-1))``,  ``v' = -+ t^(n+alpha-1) f(w)``.

Integration starts from a two-term series expansion at a small ``t_start``
(the IVP itself cannot be started at 0 because ``phiinv`` has unbounded
slope there for p > 2), runs in ``t`` up to 1 with step growth capped so
the power-law flux spans a bounded range per step (keeping dense output
accurate relative to the local solution scale), and in ``s = ln t`` beyond
1, since folds accumulate multiplicatively and uniform resolution in
``ln t`` is the natural choice there.  The stepper is an adaptive
high-order explicit Runge-Kutta pair with dense output.  For the ``jl``
class, ``w`` may reach zero in finite time; the crossing is located by
bisection on the dense output and the trajectory is truncated there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853, OdeSolution

from .model import (
    InvalidParamsError,
    Params,
    ProblemClass,
    validate_params,
)

__all__ = [
    "State",
    "IntegratorConfig",
    "Trajectory",
    "IntegrationError",
    "TruncatedTrajectoryError",
    "startup_state",
    "integrate",
    "residual",
    "pohozaev",
]


class IntegrationError(RuntimeError):
    """Integration could not be completed (e.g. step-size underflow).

    ``last_state`` holds the last accepted ``(t, w, v)``.
    """

    def __init__(self, message: str, last_state: tuple[float, float, float] | None = None):
        super().__init__(message)
        self.last_state = last_state


class TruncatedTrajectoryError(IntegrationError):
    """``max_steps`` was exhausted; ``trajectory`` carries the partial result."""

    def __init__(self, message: str, trajectory: "Trajectory"):
        last = (trajectory.t_end, trajectory.ws[-1], trajectory.vs[-1])
        super().__init__(message, last)
        self.trajectory = trajectory


@dataclass(frozen=True)
class State:
    """Point state of the flux system: ``v = t^(n-1) phi(w')``."""

    t: float
    w: float
    v: float


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration controls.

    ``t_start`` must be small enough that the two-term startup series is
    accurate to the requested tolerances; the defaults leave orders of
    magnitude of headroom for moderate parameters (startup consistency can
    be checked by re-integrating from ``t_start/4``).  With ``log_time``
    (the default) the stepper runs in ``s = ln t`` for ``t >= 1``.
    """

    t_start: float = 1e-6
    t_max: float = 1e4
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 100_000
    log_time: bool = True

    def validated(self) -> "IntegratorConfig":
        if not (0.0 < self.t_start < self.t_max):
            raise InvalidParamsError(
                f"need 0 < t_start < t_max, got t_start = {self.t_start!r}, t_max = {self.t_max!r}"
            )
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise InvalidParamsError("tolerances must be positive")
        if self.max_steps < 1:
            raise InvalidParamsError("max_steps must be >= 1")
        return self


def _phi(s: float, p: float) -> float:
    return math.copysign(abs(s) ** (p - 1.0), s) if s != 0.0 else 0.0


def _phi_inv(s: float, p: float) -> float:
    return math.copysign(abs(s) ** (1.0 / (p - 1.0)), s) if s != 0.0 else 0.0


def _source_sign(problem: ProblemClass) -> float:
    # Sign of v' = sign * t^(n+alpha-1) f(w): the mems flux grows, the others decay.
    return 1.0 if problem is ProblemClass.MEMS else -1.0


def _make_f(problem: ProblemClass, q: float | None):
    if problem is ProblemClass.GELFAND:
        return math.exp
    if problem is ProblemClass.MEMS:
        return lambda w: w**-q
    # Clamp at zero: past a zero crossing the trajectory is discarded anyway,
    # and the clamp keeps the right-hand side finite for fractional q.
    return lambda w: max(w, 0.0) ** q


def startup_state(params: Params, problem: ProblemClass, t_start: float) -> State:
    """Two-term series state at ``t_start``.

    With ``sigma = (alpha+p)/(p-1)`` and
    ``kappa = ((p-1)/(alpha+p)) (1/(n+alpha))^(1/(p-1))`` the solution near
    zero is ``w = w(0) -+ kappa t^sigma`` and the flux is the exactly
    integrated ``v = -+ t^(n+alpha)/(n+alpha)`` (source frozen at its center
    value, which is 1 for all three classes).
    """
    validate_params(params, problem)
    if not t_start > 0.0:
        raise ValueError(f"t_start must be positive, got {t_start!r}")
    p, n, alpha = params.p, params.n, params.alpha
    sigma = (alpha + p) / (p - 1.0)
    kappa = (p - 1.0) / (alpha + p) * (1.0 / (n + alpha)) ** (1.0 / (p - 1.0))
    sgn = _source_sign(problem)
    w_center = 0.0 if problem is ProblemClass.GELFAND else 1.0
    w = w_center + sgn * kappa * t_start**sigma
    v = sgn * t_start ** (n + alpha) / (n + alpha)
    return State(t=t_start, w=w, v=v)


def _bisect_dense(dense, a: float, b: float, component: int = 0) -> float:
    """Bisection root of a dense-output component on [a, b] (sign change assumed)."""
    fa = dense(a)[component]
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        if dense(mid)[component] * fa > 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


@dataclass
class _Segment:
    """One integration phase with its dense output, in ``x = t`` or ``x = ln t``."""

    logspace: bool
    t_lo: float
    t_hi: float
    sol: OdeSolution

    def x_of(self, t):
        return np.log(t) if self.logspace else t


def _run_segment(rhs, x0, y0, x_end, cfg, steps_budget, watch_zero,
                 step_ratio_cap: float | None = None):
    """Drive one DOP853 phase; returns (xs, ys, interpolants, zero_x, steps, done).

    ``step_ratio_cap`` bounds each step to ``(cap - 1) * x``: with power-law
    growth of the flux this keeps the per-step dynamic range bounded, so the
    dense interpolant stays accurate relative to the local solution scale.
    """
    max_step = (step_ratio_cap - 1.0) * x0 if step_ratio_cap else np.inf
    solver = DOP853(rhs, x0, y0, x_end, rtol=cfg.rel_tol, atol=cfg.abs_tol,
                    max_step=max_step)
    xs = [x0]
    ys = [tuple(y0)]
    interps = []
    steps = 0
    zero_x = None
    while solver.status == "running":
        if steps >= steps_budget:
            return xs, ys, interps, None, steps, False
        if step_ratio_cap:
            solver.max_step = (step_ratio_cap - 1.0) * solver.t
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            raise IntegrationError(
                f"integration failed at t-coordinate {solver.t!r}: {msg}",
                (xs[-1], ys[-1][0], ys[-1][1]),
            )
        if not np.all(np.isfinite(solver.y)):
            raise IntegrationError(
                f"non-finite state at t-coordinate {solver.t!r}",
                (xs[-1], ys[-1][0], ys[-1][1]),
            )
        dense = solver.dense_output()
        interps.append(dense)
        if watch_zero and ys[-1][0] > 0.0 and solver.y[0] <= 0.0:
            zero_x = _bisect_dense(dense, xs[-1], solver.t)
            w_end, v_end = dense(zero_x)
            xs.append(zero_x)
            ys.append((float(w_end), float(v_end)))
            return xs, ys, interps, zero_x, steps, True
        xs.append(solver.t)
        ys.append((float(solver.y[0]), float(solver.y[1])))
    return xs, ys, interps, None, steps, True


def integrate(params: Params, problem: ProblemClass,
              config: IntegratorConfig | None = None) -> "Trajectory":
    """Integrate the generating IVP from the series startup to ``t_max``.

    For the ``jl`` class integration stops early if ``w`` reaches zero; the
    returned trajectory then has ``termination == "zero"``.

    Raises
    ------
    IntegrationError
        On stepper failure (step-size underflow, non-finite state).
    TruncatedTrajectoryError
        When ``max_steps`` is exhausted; carries the partial trajectory.
    """
    cfg = (config or IntegratorConfig()).validated()
    validate_params(params, problem)
    p, n, alpha = params.p, params.n, params.alpha
    f = _make_f(problem, params.q)
    sgn = _source_sign(problem)
    watch_zero = problem is ProblemClass.JOSEPH_LUNDGREN

    def rhs_lin(t, y):
        w, v = y
        return (
            _phi_inv(v / t ** (n - 1.0), p),
            sgn * t ** (n + alpha - 1.0) * f(w),
        )

    def rhs_log(s, y):
        t = math.exp(s)
        w, v = y
        return (
            t * _phi_inv(v / t ** (n - 1.0), p),
            sgn * t ** (n + alpha) * f(w),
        )

    # phase layout: linear in t below 1, logarithmic above (when enabled)
    phases: list[tuple[bool, float, float]] = []
    if cfg.log_time and cfg.t_max > 1.0:
        if cfg.t_start < 1.0:
            phases.append((False, cfg.t_start, 1.0))
        phases.append((True, max(cfg.t_start, 1.0), cfg.t_max))
    else:
        phases.append((False, cfg.t_start, cfg.t_max))

    # linear-phase growth cap: flux ~ t^(n+alpha), so a ratio cap of
    # 100^(1/(n+alpha)) bounds the flux range per step to a factor 100
    ratio_cap = max(100.0 ** (1.0 / (n + alpha)), 1.2)

    start = startup_state(params, problem, cfg.t_start)
    y = [start.w, start.v]
    budget = cfg.max_steps
    segments: list[_Segment] = []
    t_nodes: list[float] = [cfg.t_start]
    states: list[tuple[float, float]] = [(start.w, start.v)]
    termination = "t_max"
    completed = True

    for logspace, t_lo, t_hi in phases:
        rhs = rhs_log if logspace else rhs_lin
        x0 = math.log(t_lo) if logspace else t_lo
        x1 = math.log(t_hi) if logspace else t_hi
        xs, ys, interps, zero_x, used, completed = _run_segment(
            rhs, x0, list(y), x1, cfg, budget, watch_zero,
            step_ratio_cap=None if logspace else ratio_cap,
        )
        budget -= used
        if interps:
            sol = OdeSolution(np.asarray(xs), interps)
            reached_bound = completed and zero_x is None and xs[-1] == x1
            t_hi_actual = t_hi if reached_bound else (math.exp(xs[-1]) if logspace else xs[-1])
            segments.append(_Segment(logspace, t_lo, t_hi_actual, sol))
            ts_new = [math.exp(x) for x in xs[1:]] if logspace else list(xs[1:])
            if reached_bound:
                ts_new[-1] = t_hi
            t_nodes.extend(float(t) for t in ts_new)
            states.extend(ys[1:])
        y = list(ys[-1])
        if zero_x is not None:
            termination = "zero"
            break
        if not completed:
            termination = "truncated"
            break

    traj = Trajectory._build(problem, params, cfg, segments, t_nodes, states, termination)
    if not completed:
        raise TruncatedTrajectoryError(
            f"max_steps = {cfg.max_steps} exhausted at t = {traj.t_end!r}", traj
        )
    return traj


@dataclass
class Trajectory:
    """Dense numerical solution of a generating IVP on ``[t_start, t_end]``.

    Immutable after construction.  ``termination`` is ``"t_max"`` when the
    requested horizon was reached, ``"zero"`` when a ``jl`` run stopped at a
    zero of ``w`` (then ``t_end`` is the crossing time), and ``"truncated"``
    for partial data carried by :class:`TruncatedTrajectoryError`.
    """

    problem: ProblemClass
    params: Params
    config: IntegratorConfig
    ts: np.ndarray
    ws: np.ndarray
    wprimes: np.ndarray
    vs: np.ndarray
    termination: str
    _segments: tuple[_Segment, ...]

    @classmethod
    def _build(cls, problem, params, cfg, segments, t_nodes, states, termination):
        ts = np.asarray(t_nodes, dtype=float)
        wv = np.asarray(states, dtype=float)
        p, n = params.p, params.n
        wp = np.array([_phi_inv(v / t ** (n - 1.0), p) for t, v in zip(ts, wv[:, 1])])
        return cls(
            problem=problem,
            params=params,
            config=cfg,
            ts=ts,
            ws=wv[:, 0],
            wprimes=wp,
            vs=wv[:, 1],
            termination=termination,
            _segments=tuple(segments),
        )

    @property
    def t_start(self) -> float:
        return float(self.ts[0])

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    @property
    def zero_time(self) -> float | None:
        return self.t_end if self.termination == "zero" else None

    def _check_range(self, t: np.ndarray) -> None:
        lo, hi = self.t_start, self.t_end
        slack = 1e-12 * hi
        if np.any(t < lo - 1e-12 * lo) or np.any(t > hi + slack):
            raise ValueError(
                f"t outside trajectory range [{lo!r}, {hi!r}]"
            )

    def eval_state(self, t: float) -> tuple[float, float]:
        """Dense ``(w, v)`` at a scalar ``t``; exact at stored nodes."""
        tt = np.asarray(t, dtype=float)
        self._check_range(tt)
        idx = np.searchsorted(self.ts, tt)
        if idx < len(self.ts) and self.ts[idx] == tt:
            return float(self.ws[idx]), float(self.vs[idx])
        for seg in self._segments:
            if seg.t_lo <= tt <= seg.t_hi or seg is self._segments[-1]:
                w, v = seg.sol(seg.x_of(tt))
                return float(w), float(v)
        raise ValueError(f"no segment covers t = {t!r}")

    def eval(self, t: float) -> tuple[float, float]:
        """Dense ``(w, w')`` at a scalar ``t``; exact at stored nodes."""
        tt = np.asarray(t, dtype=float)
        self._check_range(tt)
        idx = np.searchsorted(self.ts, tt)
        if idx < len(self.ts) and self.ts[idx] == tt:
            return float(self.ws[idx]), float(self.wprimes[idx])
        w, v = self.eval_state(float(tt))
        wp = _phi_inv(v / float(tt) ** (self.params.n - 1.0), self.params.p)
        return w, wp

    def eval_many(self, ts) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized dense ``(w, w')``; exact at stored nodes."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        self._check_range(ts)
        w = np.empty_like(ts)
        v = np.empty_like(ts)
        done = np.zeros(ts.shape, dtype=bool)
        for seg in self._segments:
            mask = ~done & (ts >= seg.t_lo) & (ts <= seg.t_hi)
            if np.any(mask):
                vals = seg.sol(seg.x_of(ts[mask]))
                w[mask], v[mask] = vals[0], vals[1]
                done[mask] = True
        if not np.all(done) and self._segments:
            seg = self._segments[-1]
            vals = seg.sol(seg.x_of(ts[~done]))
            w[~done], v[~done] = vals[0], vals[1]
        # stored nodes win bitwise over the interpolant
        idx = np.searchsorted(self.ts, ts)
        idx = np.clip(idx, 0, len(self.ts) - 1)
        exact = self.ts[idx] == ts
        w[exact] = self.ws[idx[exact]]
        v[exact] = self.vs[idx[exact]]
        n, p = self.params.n, self.params.p
        arg = v / ts ** (n - 1.0)
        wp = np.sign(arg) * np.abs(arg) ** (1.0 / (p - 1.0))
        wp[exact] = self.wprimes[idx[exact]]
        return w, wp


def residual(params: Params, problem: ProblemClass,
             w: float, wprime: float, wsecond: float, t: float) -> float:
    """Pointwise defect of the generating ODE:
    ``phi'(w') w'' + ((n-1)/t) phi(w') -+ t^alpha f(w)``; zero on exact solutions.

    For ``p < 2`` the derivative ``phi'`` is singular at ``w' = 0``, so
    ``wprime`` must be nonzero there.
    """
    validate_params(params, problem)
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t!r}")
    p, n, alpha, q = params.p, params.n, params.alpha, params.q
    if p < 2.0 and wprime == 0.0:
        raise ValueError("residual needs wprime != 0 when p < 2")
    phi_p = (p - 1.0) * abs(wprime) ** (p - 2.0)
    lead = phi_p * wsecond + (n - 1.0) / t * _phi(wprime, p)
    if problem is ProblemClass.GELFAND:
        return lead + t**alpha * math.exp(w)
    if problem is ProblemClass.MEMS:
        return lead - t**alpha * w**-q
    return lead + t**alpha * w**q


def pohozaev(traj: Trajectory, t: float) -> float:
    """Pohozaev combination for ``jl`` trajectories:

    ``P(t) = t^n [(p-1) |w'|^p + p t^alpha w^(q+1)/(q+1)] + (n-p) v w``.

    ``P(0) = 0`` and, in the supercritical regime, ``P`` is nonincreasing
    and nonpositive, which rules out zeros of ``w``.
    """
    if traj.problem is not ProblemClass.JOSEPH_LUNDGREN:
        raise ValueError(f"pohozaev applies to jl trajectories only, got {traj.problem.value}")
    p, n, alpha, q = traj.params.p, traj.params.n, traj.params.alpha, traj.params.q
    w, v = traj.eval_state(t)
    wp = _phi_inv(v / t ** (n - 1.0), p)
    big_f = t**alpha * w ** (q + 1.0) / (q + 1.0)
    return t**n * ((p - 1.0) * abs(wp) ** p + p * big_f) + (n - p) * v * w
