"""Closed-form quantities and regime classification.

Three self-similar radial quasilinear problems are supported, all posed on
the unit ball with the p-Laplace operator ``div(|grad u|^{p-2} grad u)`` and
a positive parameter ``lambda`` multiplying the nonlinearity:

* ``gelfand``:  nonlinearity ``r^alpha * exp(u)``,
* ``mems``:     nonlinearity ``r^alpha / (1 - u)^q`` (0 < u < 1),
* ``jl``:       nonlinearity ``r^alpha * (1 + u)^q`` (Joseph-Lundgren type).

Each problem is generated by a single scaled initial value problem whose
solution ``w(t)`` parameterizes the full ``(lambda, u(0))`` solution curve.
This module holds everything that can be computed without integrating that
IVP: the explicit guiding solution ``w0`` that ``w`` approaches as
``t -> infinity``, the limit value ``lambda_inf`` of the curve, the Euler
(equidimensional) equation obtained by linearizing about ``w0``, and the
named inequality conditions that decide whether the characteristic roots are
complex, i.e. whether the curve spirals through infinitely many folds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ProblemClass",
    "Params",
    "ClosedForms",
    "ConditionResult",
    "RegimeReport",
    "CharacteristicQuadratic",
    "InvalidParamsError",
    "ValidityError",
    "validate_params",
    "beta_exponent",
    "closed_forms",
    "guiding_eval",
    "guiding_curvature",
    "characteristic_quadratic",
    "check_conditions",
]

#: Absolute half-width inside which a condition margin counts as "boundary".
BOUNDARY_TOL = 1e-14


class InvalidParamsError(ValueError):
    """Raised when parameters violate the basic invariants of a problem class."""


class ValidityError(ValueError):
    """Raised when a closed-form validity inequality fails.

    The message names the inequality that failed.
    """


class ProblemClass(str, Enum):
    """The three supported problem families."""

    GELFAND = "gelfand"
    MEMS = "mems"
    JOSEPH_LUNDGREN = "jl"


@dataclass(frozen=True)
class Params:
    """Problem parameters.

    Attributes
    ----------
    p : float
        p-Laplace exponent, p > 1.
    n : float
        Space dimension (treated as a real number), n >= 1.
    alpha : float
        Radial weight exponent in ``r^alpha``, alpha >= 0.
    q : float or None
        Nonlinearity exponent. Required with q > 0 for ``mems`` and q > 1
        for ``jl``; ignored by ``gelfand``.
    """

    p: float
    n: float
    alpha: float = 0.0
    q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "n", float(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))
        if self.q is not None:
            object.__setattr__(self, "q", float(self.q))


def validate_params(params: Params, problem: ProblemClass) -> None:
    """Check the class invariants of *params*, raising :class:`InvalidParamsError`."""
    p, n, alpha, q = params.p, params.n, params.alpha, params.q
    for name, value in (("p", p), ("n", n), ("alpha", alpha)):
        if not math.isfinite(value):
            raise InvalidParamsError(f"{name} must be finite, got {value!r}")
    if not p > 1.0:
        raise InvalidParamsError(f"p must satisfy p > 1, got p = {p!r}")
    if not alpha >= 0.0:
        raise InvalidParamsError(f"alpha must satisfy alpha >= 0, got alpha = {alpha!r}")
    if not n >= 1.0:
        raise InvalidParamsError(f"n must satisfy n >= 1, got n = {n!r}")
    if problem is ProblemClass.MEMS:
        if q is None or not math.isfinite(q) or not q > 0.0:
            raise InvalidParamsError(f"mems requires q > 0, got q = {q!r}")
    elif problem is ProblemClass.JOSEPH_LUNDGREN:
        if q is None or not math.isfinite(q) or not q > 1.0:
            raise InvalidParamsError(f"jl requires q > 1, got q = {q!r}")


def beta_exponent(params: Params, problem: ProblemClass) -> float:
    """Exponent of the guiding solution.

    For ``mems`` the guiding solution grows like ``t**beta`` with
    ``beta = (alpha + p)/(p + q - 1)``; for ``jl`` it decays like
    ``t**-beta`` with ``beta = (p + alpha)/(q - p + 1)``; for ``gelfand``
    the guiding solution is logarithmic and the returned value is the
    slope ``alpha + p`` of ``-w0`` against ``ln t``.
    """
    p, alpha, q = params.p, params.alpha, params.q
    if problem is ProblemClass.GELFAND:
        return alpha + p
    if problem is ProblemClass.MEMS:
        return (alpha + p) / (p + q - 1.0)
    if q - p + 1.0 <= 0.0:
        raise ValidityError(
            f"jl scaling requires q - p + 1 > 0, got q - p + 1 = {q - p + 1.0!r}"
        )
    return (p + alpha) / (q - p + 1.0)


@dataclass(frozen=True)
class ClosedForms:
    """Explicit constants attached to a (params, problem) pair.

    Attributes
    ----------
    beta : float
        Guiding exponent (see :func:`beta_exponent`).
    coeff : float
        Guiding coefficient: ``c0`` for ``mems`` (``w0 = c0 t**beta``),
        ``a0`` for ``jl`` (``w0 = a0 t**-beta``), and ``exp(a0)`` for
        ``gelfand`` (``w0 = ln(coeff) - (alpha+p) ln t``).
    lambda_inf : float
        Limit of ``lambda(t)`` along the solution curve as ``t -> infinity``,
        obtained by substituting the guiding solution into the curve formula.
    guiding_kind : str
        One of ``"power-growth"``, ``"power-decay"``, ``"logarithmic"``.
    notes : tuple of str
        Diagnostics, e.g. alternative limit expressions that coincide with
        ``lambda_inf`` only in special cases.
    """

    problem: ProblemClass
    params: Params
    beta: float
    coeff: float
    lambda_inf: float
    guiding_kind: str
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "coeff": self.coeff,
            "lambda_inf": self.lambda_inf,
            "guiding_kind": self.guiding_kind,
            "notes": list(self.notes),
        }


def closed_forms(params: Params, problem: ProblemClass) -> ClosedForms:
    """Compute guiding-solution constants and the curve limit ``lambda_inf``.

    Raises
    ------
    ValidityError
        If the validity inequality of the class fails: ``n > p`` for
        ``gelfand``, ``(p-1)(beta-1) + n - 1 > 0`` for ``mems``, and
        ``(n-p) beta^(p-1) - (p-1) beta^p > 0`` for ``jl``.
    """
    validate_params(params, problem)
    p, n, alpha, q = params.p, params.n, params.alpha, params.q

    if problem is ProblemClass.GELFAND:
        if not n > p:
            raise ValidityError(f"gelfand guiding solution requires n > p, got n = {n!r}, p = {p!r}")
        coeff = (n - p) * (alpha + p) ** (p - 1.0)
        return ClosedForms(
            problem=problem,
            params=params,
            beta=alpha + p,
            coeff=coeff,
            lambda_inf=coeff,
            guiding_kind="logarithmic",
        )

    beta = beta_exponent(params, problem)

    if problem is ProblemClass.MEMS:
        bracket = (p - 1.0) * (beta - 1.0) + n - 1.0
        if not bracket > 0.0:
            raise ValidityError(
                "mems guiding solution requires (p-1)(beta-1) + n - 1 > 0, "
                f"got {bracket!r}"
            )
        lam = beta ** (p - 1.0) * bracket
        c0 = lam ** (-1.0 / (p + q - 1.0))
        alt = c0 ** -(q - 1.0)
        note = (
            f"lambda_inf = coeff**-(p+q-1) = {lam!r}; the exponent-(q-1) "
            f"variant coeff**-(q-1) = {alt!r} coincides only when coeff = 1"
        )
        return ClosedForms(
            problem=problem,
            params=params,
            beta=beta,
            coeff=c0,
            lambda_inf=lam,
            guiding_kind="power-growth",
            notes=(note,),
        )

    bracket = (n - p) * beta ** (p - 1.0) - (p - 1.0) * beta**p
    if not bracket > 0.0:
        raise ValidityError(
            "jl guiding solution requires (n-p) beta^(p-1) - (p-1) beta^p > 0, "
            f"got {bracket!r}"
        )
    a0 = bracket ** (1.0 / (q - p + 1.0))
    lam = bracket
    alt = a0 ** (q - 1.0)
    note = (
        f"lambda_inf = coeff**(q-p+1) = {lam!r}; the exponent-(q-1) "
        f"variant coeff**(q-1) = {alt!r} coincides only at p = 2"
    )
    return ClosedForms(
        problem=problem,
        params=params,
        beta=beta,
        coeff=a0,
        lambda_inf=lam,
        guiding_kind="power-decay",
        notes=(note,),
    )


def guiding_eval(cf: ClosedForms, t):
    """Evaluate the guiding solution and its exact derivative at ``t > 0``.

    Accepts a scalar or an array; returns ``(w0, w0prime)`` of matching shape.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("guiding solution is defined for t > 0 only")
    if cf.guiding_kind == "power-growth":
        w0 = cf.coeff * t**cf.beta
        w0p = cf.beta * cf.coeff * t ** (cf.beta - 1.0)
    elif cf.guiding_kind == "power-decay":
        w0 = cf.coeff * t**-cf.beta
        w0p = -cf.beta * cf.coeff * t ** (-cf.beta - 1.0)
    else:
        w0 = math.log(cf.coeff) - cf.beta * np.log(t)
        w0p = -cf.beta / t
    if w0.ndim == 0:
        return float(w0), float(w0p)
    return w0, w0p


def guiding_curvature(cf: ClosedForms, t):
    """Exact second derivative of the guiding solution at ``t > 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("guiding solution is defined for t > 0 only")
    if cf.guiding_kind == "power-growth":
        w0pp = cf.beta * (cf.beta - 1.0) * cf.coeff * t ** (cf.beta - 2.0)
    elif cf.guiding_kind == "power-decay":
        w0pp = cf.beta * (cf.beta + 1.0) * cf.coeff * t ** (-cf.beta - 2.0)
    else:
        w0pp = cf.beta / t**2
    return float(w0pp) if w0pp.ndim == 0 else w0pp


@dataclass(frozen=True)
class CharacteristicQuadratic:
    """Monic characteristic quadratic ``r**2 + b r + c`` of the linearized
    Euler equation about the guiding solution, with its roots.

    ``oscillatory`` is true exactly when the discriminant is negative, in
    which case solutions of the linearization oscillate in ``ln t`` and the
    solution curve is expected to fold infinitely often.
    """

    coefficients: tuple[float, float, float]
    roots: tuple[complex, complex]
    discriminant: float
    oscillatory: bool

    def to_dict(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "roots": [{"real": r.real, "imag": r.imag} for r in self.roots],
            "discriminant": self.discriminant,
            "oscillatory": self.oscillatory,
        }


def _solve_monic(b: float, c: float) -> tuple[tuple[complex, complex], float]:
    """Roots of ``r**2 + b r + c``, complex pair ordered +Im first, real pair ascending."""
    disc = b * b - 4.0 * c
    if disc < 0.0:
        re = -b / 2.0
        im = math.sqrt(-disc) / 2.0
        return (complex(re, im), complex(re, -im)), disc
    s = math.sqrt(disc)
    # avoid cancellation: compute the large-magnitude root first
    if b >= 0.0:
        r1 = (-b - s) / 2.0
    else:
        r1 = (-b + s) / 2.0
    r2 = c / r1 if r1 != 0.0 else (-b - r1)
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    return (complex(lo, 0.0), complex(hi, 0.0)), disc


def characteristic_quadratic(params: Params, problem: ProblemClass) -> CharacteristicQuadratic:
    """Characteristic quadratic of the Euler equation linearized at ``w0``.

    Normalized monic form ``r**2 + (A - 1) r + B`` with

    * ``gelfand``: ``A = n - p + 1``, ``B = (n-p)(p+alpha)/(p-1)``,
    * ``mems``:    ``A - 1 = (p-2)(beta-1) + n - 2``,
      ``B = q beta [(p-1)(beta-1) + n - 1]/(p-1)``,
    * ``jl``:      ``A = -beta(p-2) + n - p + 1``,
      ``B = q(n-p) beta/(p-1) - q beta**2``.
    """
    validate_params(params, problem)
    p, n, alpha, q = params.p, params.n, params.alpha, params.q
    if problem is ProblemClass.GELFAND:
        b = n - p
        c = (n - p) * (p + alpha) / (p - 1.0)
    elif problem is ProblemClass.MEMS:
        beta = beta_exponent(params, problem)
        b = (p - 2.0) * (beta - 1.0) + n - 2.0
        c = q * beta * ((p - 1.0) * (beta - 1.0) + n - 1.0) / (p - 1.0)
    else:
        beta = beta_exponent(params, problem)
        b = -beta * (p - 2.0) + n - p
        c = q * (n - p) * beta / (p - 1.0) - q * beta**2
    roots, disc = _solve_monic(b, c)
    return CharacteristicQuadratic(
        coefficients=(1.0, b, c),
        roots=roots,
        discriminant=disc,
        oscillatory=disc < 0.0,
    )


@dataclass(frozen=True)
class ConditionResult:
    """Outcome of one named inequality.

    ``margin`` is signed so that positive means the condition holds
    strictly; ``boundary`` is set when ``|margin| <= 1e-14``, in which case
    ``holds`` is false (the conditions are strict inequalities).  Window
    conditions carry ``lower``/``upper`` bounds on ``n``; one-sided
    conditions carry the comparison ``threshold``.
    """

    name: str
    holds: bool
    margin: float
    boundary: bool = False
    threshold: float | None = None
    lower: float | None = None
    upper: float | None = None
    expression: str = ""

    def to_dict(self) -> dict:
        d: dict = {
            "holds": self.holds,
            "margin": self.margin,
            "boundary": self.boundary,
            "expression": self.expression,
        }
        if self.threshold is not None:
            d["threshold"] = self.threshold
        if self.lower is not None:
            d["lower"] = self.lower
        if self.upper is not None:
            d["upper"] = self.upper
            if self.lower is not None:
                d["window"] = f"{self.lower:g}<n<{self.upper:g}"
        return d


def _condition(name: str, margin: float, *, threshold=None, lower=None, upper=None,
               expression: str = "") -> ConditionResult:
    boundary = abs(margin) <= BOUNDARY_TOL
    return ConditionResult(
        name=name,
        holds=(margin > 0.0) and not boundary,
        margin=margin,
        boundary=boundary,
        threshold=threshold,
        lower=lower,
        upper=upper,
        expression=expression,
    )


def _window(name: str, value: float, lower: float, upper: float, expression: str) -> ConditionResult:
    return _condition(
        name,
        min(value - lower, upper - value),
        lower=lower,
        upper=upper,
        expression=expression,
    )


@dataclass(frozen=True)
class RegimeReport:
    """Named inequality conditions plus the oscillation classification.

    ``predicted_infinite_turns`` is the conjunction of the sufficient
    conditions under which the solution curve is known to fold infinitely
    often for the given class.
    """

    problem: ProblemClass
    params: Params
    conditions: dict[str, ConditionResult]
    quadratic: CharacteristicQuadratic | None
    predicted_infinite_turns: bool
    notes: tuple[str, ...] = ()

    @property
    def char_roots(self) -> tuple[complex, complex] | None:
        return self.quadratic.roots if self.quadratic is not None else None

    @property
    def oscillatory(self) -> bool:
        return self.quadratic.oscillatory if self.quadratic is not None else False

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.value,
            "params": {
                "p": self.params.p,
                "q": self.params.q,
                "alpha": self.params.alpha,
                "n": self.params.n,
            },
            "conditions": {k: v.to_dict() for k, v in sorted(self.conditions.items())},
            "characteristic": self.quadratic.to_dict() if self.quadratic is not None else None,
            "predicted_infinite_turns": self.predicted_infinite_turns,
            "notes": list(self.notes),
        }


def _gelfand_conditions(params: Params) -> dict[str, ConditionResult]:
    p, n, alpha = params.p, params.n, params.alpha
    upper = (p * p + 3.0 * p + 4.0 * alpha) / (p - 1.0)
    return {
        "dimension_window": _window(
            "dimension_window", n, p, upper,
            "p < n < (p^2 + 3p + 4 alpha)/(p - 1)",
        )
    }


def _mems_conditions(params: Params) -> dict[str, ConditionResult]:
    p, n, alpha, q = params.p, params.n, params.alpha, params.q
    beta = (alpha + p) / (p + q - 1.0)
    conds: dict[str, ConditionResult] = {}

    conds["guiding_positive"] = _condition(
        "guiding_positive",
        (p - 1.0) * (beta - 1.0) + n - 1.0,
        expression="(p-1)(beta-1) + n - 1 > 0",
    )

    lead = 4.0 * q - (p - 2.0) ** 2
    conds["leading_coefficient"] = _condition(
        "leading_coefficient", lead, expression="4q - (p-2)^2 > 0",
    )

    big_a = (p - 1.0) * lead
    big_b = (4.0 * q - 2.0 * (p - 1.0) * (p - 2.0)) * (n - p)
    big_c = (p - 1.0) * (n - p) ** 2
    conds["oscillation"] = _condition(
        "oscillation",
        big_a * beta**2 + big_b * beta - big_c,
        expression="A beta^2 + B beta - C > 0 with A = 4(p-1)q - (p-1)(p-2)^2, "
        "B = 4q(n-p) - 2(p-1)(p-2)(n-p), C = (p-1)(n-p)^2",
    )

    denom = (p - 1.0) * lead
    if denom != 0.0:
        rhs = ((p - n) * (2.0 * q - p * p + 3.0 * p - 2.0)
               + 2.0 * abs(n - p) * math.sqrt(q * (p + q - 1.0))) / denom
    else:
        rhs = math.inf
    conds["beta_threshold"] = _condition(
        "beta_threshold",
        beta - rhs,
        threshold=rhs,
        expression="beta > [(p-n)(2q - p^2 + 3p - 2) + 2|n-p| sqrt(q(p+q-1))]"
        " / [(p-1)(4q - (p-2)^2)]",
    )

    conds["decay_exponent"] = _condition(
        "decay_exponent",
        (p - 1.0) * (beta - 1.0) + n - 1.0 - beta,
        expression="(p-1)(beta-1) + n - 1 > beta",
    )

    m1 = 2.0 * math.sqrt(q * (p + q - 1.0)) + p * p - 3.0 * p + 2.0 - 2.0 * q
    denom_w = (p + q - 1.0) * m1
    if denom_w != 0.0:
        upper = p + (alpha + p) * (p - 1.0) * lead / denom_w
    else:
        upper = math.inf
    conds["sufficient_window"] = _condition(
        "sufficient_window",
        min(m1, lead, n - p, upper - n),
        lower=p,
        upper=upper,
        expression="2 sqrt(q(p+q-1)) + p^2 - 3p + 2 - 2q > 0 and 4q > (p-2)^2 "
        "and p <= n < p + (alpha+p)(p-1)[4q-(p-2)^2] / "
        "[(p+q-1)(2 sqrt(q(p+q-1)) + p^2 - 3p + 2 - 2q)]",
    )
    return conds


def _jl_conditions(params: Params) -> dict[str, ConditionResult]:
    p, n, alpha, q = params.p, params.n, params.alpha, params.q
    conds: dict[str, ConditionResult] = {}

    if n > p:
        threshold = (n * p - n + p + p * alpha) / (n - p)
        conds["supercritical"] = _condition(
            "supercritical",
            q - threshold,
            threshold=threshold,
            expression="q > (np - n + p + p alpha)/(n - p), n > p",
        )
    else:
        conds["supercritical"] = _condition(
            "supercritical",
            n * (q - p + 1.0) - p * (q + 1.0 + alpha),
            expression="q > (np - n + p + p alpha)/(n - p), n > p",
        )

    scaling_ok = q - p + 1.0 > 0.0
    if scaling_ok:
        beta = (p + alpha) / (q - p + 1.0)
        theta = 2.0 * beta * (p - 2.0) + 4.0 * q * beta / (p - 1.0)
        gamma = (p - 2.0) ** 2 * beta**2 + 4.0 * q * beta**2
        disc = theta**2 - 4.0 * gamma
        conds["oscillation"] = _condition(
            "oscillation",
            theta * (n - p) - (n - p) ** 2 - gamma,
            expression="(n-p)^2 - theta (n-p) + gamma < 0 with "
            "theta = 2 beta (p-2) + 4 q beta/(p-1), gamma = (p-2)^2 beta^2 + 4 q beta^2",
        )
        if disc >= 0.0:
            half = (theta + math.sqrt(disc)) / 2.0
            conds["dimension_upper"] = _condition(
                "dimension_upper",
                half - (n - p),
                threshold=p + half,
                expression="n - p < (theta + sqrt(theta^2 - 4 gamma))/2",
            )
            conds["dimension_window"] = _window(
                "dimension_window",
                n,
                p * (q + 1.0 + alpha) / (q - p + 1.0),
                p + half,
                "p(q + 1 + alpha)/(q - p + 1) < n < p + (theta + sqrt(theta^2 - 4 gamma))/2",
            )
        else:
            for name in ("dimension_upper", "dimension_window"):
                conds[name] = _condition(
                    name, disc, expression="no real oscillation window (theta^2 - 4 gamma < 0)",
                )
    else:
        for name in ("oscillation", "dimension_upper", "dimension_window"):
            conds[name] = _condition(
                name, q - p + 1.0, expression="q - p + 1 > 0 required",
            )

    if p == 2.0 and alpha == 0.0:
        upper = 4.0 * q / (q - 1.0) + 4.0 * math.sqrt(q / (q - 1.0))
        if n > 2.0:
            conds["classical_supercritical"] = _condition(
                "classical_supercritical",
                q - (n + 2.0) / (n - 2.0),
                threshold=(n + 2.0) / (n - 2.0),
                expression="q > (n+2)/(n-2), n > 2",
            )
        else:
            conds["classical_supercritical"] = _condition(
                "classical_supercritical",
                q * (n - 2.0) - (n + 2.0),
                expression="q > (n+2)/(n-2), n > 2",
            )
        conds["classical_dimension_upper"] = _condition(
            "classical_dimension_upper",
            upper - (n - 2.0),
            threshold=2.0 + upper,
            expression="n - 2 < 4q/(q-1) + 4 sqrt(q/(q-1))",
        )
        conds["classical_window"] = _window(
            "classical_window",
            n,
            (2.0 + 2.0 * q) / (q - 1.0),
            2.0 + upper,
            "(2+2q)/(q-1) < n < 2 + 4q/(q-1) + 4 sqrt(q/(q-1))",
        )
    return conds


def check_conditions(params: Params, problem: ProblemClass) -> RegimeReport:
    """Evaluate every named condition of the class, with signed margins.

    Always returns a report; no exceptions beyond parameter validation.
    Margins are oriented so that positive means the inequality holds
    strictly; a margin within ``1e-14`` of zero is reported as boundary
    and does not count as holding.
    """
    validate_params(params, problem)
    try:
        quad = characteristic_quadratic(params, problem)
    except ValidityError as exc:
        quad = None
        notes_degenerate = (str(exc),)
    else:
        notes_degenerate = ()
    notes: list[str] = list(notes_degenerate)

    if problem is ProblemClass.GELFAND:
        conds = _gelfand_conditions(params)
        predicted = conds["dimension_window"].holds
    elif problem is ProblemClass.MEMS:
        conds = _mems_conditions(params)
        predicted = (
            conds["leading_coefficient"].holds
            and conds["beta_threshold"].holds
            and conds["decay_exponent"].holds
        )
        if predicted and params.n < 3.0:
            notes.append(
                "infinite-turn prediction for mems with n < 3 relies on an "
                "n >= 3 step in its derivation; treat as unverified"
            )
    else:
        conds = _jl_conditions(params)
        predicted = conds["supercritical"].holds and conds["dimension_upper"].holds

    return RegimeReport(
        problem=problem,
        params=params,
        conditions=conds,
        quadratic=quad,
        predicted_infinite_turns=predicted,
        notes=tuple(notes),
    )
