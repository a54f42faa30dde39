"""Creep (compliance) functions of the Voigt model and their shape checks.

Classical Voigt body ``eta x' + E x = sigma``: compliance
``k(t) = (1 - exp(-t/tau)) / E`` with retardation time ``tau = eta/E``.

Fractional Voigt body ``eta D^a x + E x = sigma``: compliance
``k_a(t) = (1 - E_a(-t^a/tau)) / E``, equivalently
``t^a E_{a,a+1}(-lam t^a) / eta`` with ``lam = E/eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, InputError
from .mlf import DEFAULT_TOL, mittag_leffler
from .solver import Trajectory, linear_inputs

__all__ = [
    "Material",
    "MonotonicityReport",
    "classical_creep",
    "creep_kernel_integral",
    "fractional_creep",
    "fractional_creep_raw",
    "monotonicity_probe",
    "strain_from_stress",
]


@dataclass(frozen=True)
class Material:
    """Voigt material: elastic modulus ``E``, viscosity ``eta``, order ``alpha``.

    For ``alpha < 1`` the viscosity carries units of stress * time**alpha.
    """

    elastic_modulus: float
    viscosity: float
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.elastic_modulus) and self.elastic_modulus > 0):
            raise DomainError(f"elastic modulus must be positive, got {self.elastic_modulus!r}")
        if not (math.isfinite(self.viscosity) and self.viscosity > 0):
            raise DomainError(f"viscosity must be positive, got {self.viscosity!r}")
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")

    @property
    def retardation_time(self) -> float:
        return self.viscosity / self.elastic_modulus

    @property
    def rate(self) -> float:
        """``lam = E / eta``."""
        return self.elastic_modulus / self.viscosity


def _times(t) -> np.ndarray:
    ts = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(ts)):
        raise DomainError("t must be finite")
    if np.any(ts < 0):
        raise DomainError("creep functions are defined for t >= 0")
    return ts


def _out(t, values: np.ndarray):
    return float(values) if np.ndim(t) == 0 else values


def classical_creep(material: Material, t):
    """``(1 - exp(-t/tau)) / E``; ignores ``material.alpha``."""
    ts = _times(t)
    return _out(t, -np.expm1(-ts / material.retardation_time) / material.elastic_modulus)


def fractional_creep(material: Material, t, tol: float = DEFAULT_TOL):
    """``(1 - E_a(-t^a / tau)) / E``. Reduces to :func:`classical_creep` at ``alpha = 1``."""
    ts = _times(t)
    a = material.alpha
    ml = mittag_leffler(-(ts**a) / material.retardation_time, a, 1.0, tol)
    return _out(t, (1.0 - ml) / material.elastic_modulus)


def fractional_creep_raw(material: Material, t, tol: float = DEFAULT_TOL):
    """Unscaled creep function ``t^a E_{a,a+1}(-lam t^a)`` of ``D^a x + lam x = phi``.

    Equal to ``eta * fractional_creep(material, t)``.
    """
    ts = _times(t)
    a = material.alpha
    return _out(t, ts**a * mittag_leffler(-material.rate * ts**a, a, a + 1.0, tol))


def creep_kernel_integral(material: Material, t, tol: float = DEFAULT_TOL):
    """``int_0^t s^a E_{a,a+1}(-lam s^a) ds = t^(a+1) E_{a,a+2}(-lam t^a)``."""
    ts = _times(t)
    a = material.alpha
    return _out(t, ts ** (a + 1.0) * mittag_leffler(-material.rate * ts**a, a, a + 2.0, tol))


def strain_from_stress(material: Material, stress, t) -> Trajectory:
    """Boltzmann-Volterra strain ``x(t) = k(t) phi(0) + int_0^t k(t-s) phi'(s) ds``.

    ``k`` is :func:`fractional_creep_raw` and ``phi`` the right-hand side of
    ``D^a x + lam x = phi`` (the stress divided by ``eta``), so the result
    matches :func:`~fraccreep.solver.solve_linear_closed` for the same
    ``phi``. ``phi'`` comes from central differences (one-sided at the ends)
    and is averaged per cell; the creep kernel is integrated exactly.
    """
    t, phi, h = linear_inputs(material.alpha, material.rate, stress, t)
    n = t.size - 1
    dphi = np.gradient(phi, h)
    weights = np.diff(creep_kernel_integral(material, h * np.arange(n + 1)))
    x = phi[0] * fractional_creep_raw(material, t)
    x[1:] += np.convolve(weights, 0.5 * (dphi[:-1] + dphi[1:]))[:n]
    return Trajectory(0.0, h, x)


@dataclass(frozen=True)
class MonotonicityReport:
    """Per-order outcome of a finite-difference sign probe.

    ``worst[n-1]`` is the largest violation of the expected sign by the
    order-``n`` difference (0 when none), in function-value units.
    """

    pattern: str
    passed: tuple[bool, ...]
    worst: tuple[float, ...]

    @property
    def all_passed(self) -> bool:
        return all(self.passed)

    def first_failure(self) -> int | None:
        for n, ok in enumerate(self.passed, 1):
            if not ok:
                return n
        return None


def monotonicity_probe(
    values,
    t,
    max_order: int = 4,
    tol: float = 1e-10,
    pattern: Literal["creep", "completely_monotone"] = "creep",
) -> MonotonicityReport:
    """Check the alternating sign pattern of finite differences up to ``max_order``.

    ``pattern="completely_monotone"`` expects ``(-1)^n D^n f >= 0`` for every
    order, as for ``E_{a,b}(-t)``. ``pattern="creep"`` expects
    ``(-1)^(n-1) D^n f >= 0``: the compliance grows while its rate is
    completely monotone, as for ``1 - exp(-t)``.

    On a uniform grid ``D^n f`` is the plain forward difference. On any other
    increasing grid the divided difference is rescaled by ``n! hbar^n``
    (``hbar`` the mean spacing of the stencil), which coincides with the
    forward difference when spacing is uniform. An order passes when no
    scaled difference falls below ``-tol`` on the wrong side.
    """
    f = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    if f.shape != t.shape or f.ndim != 1:
        raise InputError("values and grid must be 1-d arrays of equal length")
    if max_order < 1:
        raise InputError("max_order must be at least 1")
    if t.size < max_order + 1:
        raise InputError(f"need at least {max_order + 1} grid points for order {max_order}")
    if not np.all(np.diff(t) > 0):
        raise InputError("grid must be strictly increasing")
    if not np.all(np.isfinite(f)):
        raise InputError("values must be finite")
    if pattern not in ("creep", "completely_monotone"):
        raise InputError(f"unknown pattern {pattern!r}")

    passed, worst = [], []
    dd = f.copy()
    for n in range(1, max_order + 1):
        span = t[n:] - t[:-n]
        dd = (dd[1:] - dd[:-1]) / span
        scaled = dd * math.factorial(n) * (span / n) ** n
        sign = (-1) ** n if pattern == "completely_monotone" else (-1) ** (n - 1)
        violation = float(max(0.0, np.max(-sign * scaled)))
        worst.append(violation)
        passed.append(violation <= tol)
    return MonotonicityReport(pattern, tuple(passed), tuple(worst))
