"""Closed-form well-posedness constants and empirical checks of the bounds.

For the delay problem with order ``a``, horizon ``T``, coefficient bounds
``B_j`` and Lipschitz constants ``l_j`` write ``L = T^a sum_j B_j l_j``.

* existence and uniqueness holds when ``L < Gamma(a + 1)``;
* then ``|x1 - x2| <= L / (Gamma(a+1) - L) * |psi1 - psi2|``;
* and an ``eps``-perturbed solution stays within ``K eps`` of the exact one,
  ``K = T^a / (Gamma(a+1) - L)``.

The ``verify_*`` harnesses solve the perturbed and unperturbed problems
on the same grid and compare sup-norms against these bounds with an
additive slack of ``10 h``.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .errors import ConditionViolation, InputError
from .solver import ProblemSpec, sample_function, apply_operator, solve_delay, sup_distance

__all__ = [
    "ConditionReport",
    "DependenceReport",
    "UlamReport",
    "contraction_check",
    "lipschitz_estimate",
    "verify_dependence",
    "verify_ulam",
]

logger = logging.getLogger(__name__)

SLACK_FACTOR = 10.0


@dataclass(frozen=True)
class ConditionReport:
    """Both sides of the contraction condition and the derived constants."""

    contraction_lhs: float
    contraction_rhs: float
    horizon_power: float
    unique_solution: bool
    ulam_k: float | None
    dependence_coeff: float | None

    @property
    def margin(self) -> float:
        return self.contraction_rhs - self.contraction_lhs

    def to_dict(self) -> dict[str, object]:
        return {
            "contraction_lhs": self.contraction_lhs,
            "contraction_rhs": self.contraction_rhs,
            "margin": self.margin,
            "unique_solution": self.unique_solution,
            "ulam_k": self.ulam_k,
            "dependence_coeff": self.dependence_coeff,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        def fmt(v: float | None) -> str:
            return "n/a" if v is None else f"{v:.12g}"

        verdict = "holds" if self.unique_solution else "FAILS"
        return "\n".join(
            [
                f"contraction condition {verdict}: T^a sum B_j l_j < Gamma(a+1)",
                f"  T^a sum B_j l_j   = {fmt(self.contraction_lhs)}",
                f"  Gamma(a+1)        = {fmt(self.contraction_rhs)}",
                f"  margin            = {fmt(self.margin)}",
                f"  unique_solution   = {str(self.unique_solution).lower()}",
                f"  ulam_k            = {fmt(self.ulam_k)}",
                f"  dependence_coeff  = {fmt(self.dependence_coeff)}",
            ]
        )


def contraction_check(problem: ProblemSpec, step: float | None = None) -> ConditionReport:
    """Evaluate the contraction condition and, when it holds, K and the dependence factor.

    ``B_j`` is taken from the term when supplied, otherwise as the maximum of
    ``|b_j|`` on the grid of ``step`` (default ``T/1024``).
    """
    missing = [j for j, term in enumerate(problem.terms) if term.lipschitz is None]
    if missing:
        raise InputError(f"terms[{missing[0]}].lipschitz is required")
    bsup = problem.sup_b(step)
    power = problem.horizon**problem.alpha
    lhs = power * math.fsum(b * term.lipschitz for b, term in zip(bsup, problem.terms))
    rhs = math.gamma(problem.alpha + 1.0)
    unique = lhs < rhs
    ulam_k = power / (rhs - lhs) if unique else None
    dep = lhs / (rhs - lhs) if unique else None
    return ConditionReport(lhs, rhs, power, unique, ulam_k, dep)


def _require_unique(report: ConditionReport) -> None:
    if not report.unique_solution:
        raise ConditionViolation(
            f"contraction condition fails ({report.contraction_lhs:.6g} >= {report.contraction_rhs:.6g}); bound is meaningless"
        )


@dataclass(frozen=True)
class DependenceReport:
    measured: float
    history_gap: float
    coefficient: float
    bound: float
    slack: float
    passed: bool


def verify_dependence(
    problem: ProblemSpec,
    history1: Callable,
    history2: Callable,
    step: float | None = None,
) -> DependenceReport:
    """Solve under two histories and test ``|x1 - x2| <= c |psi1 - psi2| + 10 h``."""
    report = contraction_check(problem, step)
    _require_unique(report)
    p1 = dataclasses.replace(problem, history=history1)
    p2 = dataclasses.replace(problem, history=history2)
    x1, x2 = solve_delay(p1, step), solve_delay(p2, step)
    gap = float(np.max(np.abs(x1.history_part() - x2.history_part())))
    measured = sup_distance(x1, x2)
    bound = report.dependence_coeff * gap
    slack = SLACK_FACTOR * x1.step
    logger.debug("dependence: measured %.3e bound %.3e", measured, bound)
    return DependenceReport(measured, gap, report.dependence_coeff, bound, slack, measured <= bound + slack)


@dataclass(frozen=True)
class UlamReport:
    epsilon: float
    ulam_k: float
    measured: float
    bound: float
    defect: float
    defect_bound: float
    slack: float
    passed: bool
    defect_passed: bool


def verify_ulam(
    problem: ProblemSpec,
    epsilon: float,
    perturbation: Callable,
    step: float | None = None,
) -> UlamReport:
    """Compare the solution with forcing ``+ h(t)``, ``|h| <= eps``, to the exact one.

    Checks ``|y_eps - y_e| <= K eps + 10 h`` and that ``y_eps`` misses its own
    unperturbed integral equation by at most ``T^a / Gamma(a+1) * eps + 10 h``.
    """
    if not (math.isfinite(epsilon) and epsilon > 0):
        raise InputError(f"epsilon must be positive, got {epsilon!r}")
    report = contraction_check(problem, step)
    _require_unique(report)
    n = problem.cells(step)
    h = problem.horizon / n
    probe = np.linspace(0.0, problem.horizon, 2 * n + 1)
    sup_h = float(np.max(np.abs(sample_function(perturbation, probe))))
    if sup_h > epsilon * (1 + 1e-12):
        raise InputError(f"perturbation exceeds epsilon on the grid: sup|h| = {sup_h:.6g} > {epsilon:.6g}")
    exact = solve_delay(problem, step)
    perturbed = solve_delay(problem, step, forcing=perturbation)
    measured = sup_distance(perturbed, exact)
    bound = report.ulam_k * epsilon
    defect = sup_distance(perturbed, apply_operator(problem, perturbed, step))
    defect_bound = report.horizon_power / report.contraction_rhs * epsilon
    slack = SLACK_FACTOR * h
    return UlamReport(
        epsilon,
        report.ulam_k,
        measured,
        bound,
        defect,
        defect_bound,
        slack,
        measured <= bound + slack,
        defect <= defect_bound + slack,
    )


def lipschitz_estimate(
    g: Callable,
    lo: float,
    hi: float,
    samples: int = 1001,
    supplied: float | None = None,
) -> float:
    """Largest difference quotient of ``g`` over a uniform sample of ``[lo, hi]``.

    Any chord slope is a weighted mean of the slopes between neighbouring
    samples, so adjacent pairs already realise the maximum over all pairs.
    The result is a lower bound for the true Lipschitz constant. A warning is
    issued when it exceeds ``supplied`` by more than 1e-9.
    """
    if not lo < hi:
        raise InputError(f"need lo < hi, got [{lo}, {hi}]")
    if samples < 2:
        raise InputError("need at least two samples")
    x = np.linspace(lo, hi, samples)
    y = sample_function(g, x)
    if not np.all(np.isfinite(y)):
        raise InputError("g returned non-finite values on the sample range")
    estimate = float(np.max(np.abs(np.diff(y)) / np.diff(x)))
    if supplied is not None and estimate > supplied + 1e-9:
        warnings.warn(
            f"sampled Lipschitz estimate {estimate:.6g} exceeds supplied constant {supplied:.6g}",
            stacklevel=2,
        )
    return estimate
