r"""Two-parameter Mittag-Leffler function on the real line.

.. math::

    E_{\alpha,\beta}(z) = \sum_{n\ge 0} \frac{z^n}{\Gamma(\alpha n + \beta)}

Three regimes are combined for the negative real axis:

* the power series, while rounding in the alternating sum stays below the
  requested tolerance (small :math:`|z|`);
* the inverse-power asymptotic expansion
  :math:`E_{\alpha,\beta}(-x) \sim \sum_{k\ge1} (-1)^{k+1} x^{-k}/\Gamma(\beta-\alpha k)`
  truncated at its smallest term (large :math:`x`);
* in between, numerical inversion of the Laplace transform
  :math:`s^{\alpha-\beta}/(s^\alpha - z)` on a parabolic Bromwich contour
  (trapezoidal rule, Weideman & Trefethen 2007).

The crossover arguments are computed per ``(alpha, beta, tol)`` from the error
bounds of the two outer regimes and cached. Positive arguments always use the
series, whose terms do not cancel there.

Accuracy is guaranteed (``MlResult.guaranteed``) for ``0 < alpha <= 1`` and
``beta >= alpha``. Other parameters get a best-effort series value.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, SingularityError

__all__ = [
    "DEFAULT_TOL",
    "KernelArgs",
    "MlArgs",
    "MlResult",
    "alpha_exponential",
    "crossover_points",
    "erfc_reference",
    "evaluate",
    "kernel_integral",
    "mittag_leffler",
    "rgamma",
]

DEFAULT_TOL = 1e-10

_EPS = sys.float_info.epsilon
# per-term rounding allowance: pow plus gamma (CPython quotes <= 10 ulp)
_TERM_ULPS = 16.0
_MAX_SERIES_TERMS = 5000
_MAX_ASYMPTOTIC_TERMS = 300
_CONTOUR_NODES = 24
_CONTOUR_CHECK_NODES = 20
# beyond this |z|**(1/alpha) the series sum of |terms| exceeds 1e26
_SERIES_CUTOFF = 60.0


@dataclass(frozen=True)
class MlArgs:
    """Arguments of one Mittag-Leffler evaluation."""

    alpha: float
    beta: float
    z: float
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "z", "tol"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.alpha <= 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if self.tol <= 0:
            raise DomainError(f"tol must be positive, got {self.tol!r}")

    @property
    def in_guaranteed_domain(self) -> bool:
        return 0 < self.alpha <= 1 and self.beta >= self.alpha


@dataclass(frozen=True)
class MlResult:
    """Value of E_{alpha,beta}(z) with an a-posteriori absolute error bound.

    ``method`` is one of ``"series"``, ``"contour"``, ``"asymptotic"``.
    ``guaranteed`` is False when the bound exceeds the tolerance or the
    parameters are outside ``0 < alpha <= 1, beta >= alpha``.
    """

    value: float
    error_bound: float
    method: str
    guaranteed: bool


@dataclass(frozen=True)
class KernelArgs:
    """Parameters of the decaying alpha-exponential kernel."""

    alpha: float
    lam: float
    t: float

    def __post_init__(self) -> None:
        for name in ("alpha", "lam", "t"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite, got {getattr(self, name)!r}")
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.lam <= 0:
            raise DomainError(f"lambda must be positive, got {self.lam!r}")
        if self.t < 0:
            raise DomainError(f"t must be non-negative, got {self.t!r}")


# ---------------------------------------------------------------------------
# gamma helpers


def _gamma_sign(y: float) -> float:
    if y > 0:
        return 1.0
    return -1.0 if math.floor(y) % 2 else 1.0


def rgamma(y: float) -> float:
    """Reciprocal gamma function ``1/Gamma(y)``; zero at the poles."""
    if y <= 0 and y == math.floor(y):
        return 0.0
    if -170.0 < y < 171.0:
        return 1.0 / math.gamma(y)
    try:
        return _gamma_sign(y) * math.exp(-math.lgamma(y))
    except OverflowError:
        return _gamma_sign(y) * math.inf


def _log_rgamma(y: float) -> tuple[float, float]:
    """Return ``(sign, log|1/Gamma(y)|)``; sign is 0 at the poles."""
    if y <= 0 and y == math.floor(y):
        return 0.0, -math.inf
    return _gamma_sign(y), -math.lgamma(y)


def _log_rgamma_shifted(beta: float, alpha: float, k: int) -> tuple[float, float]:
    """``_log_rgamma(beta - alpha*k)`` without rounding the argument.

    Far along the negative axis the float ``beta - alpha*k`` can land exactly
    on a pole although the true argument does not. The offset from the pole
    is therefore taken in exact rational arithmetic and the reflection
    formula ``1/Gamma(y) = sin(pi y) Gamma(1-y) / pi`` is applied.
    """
    y = Fraction(beta) - Fraction(alpha) * k
    if y > Fraction(1, 2):
        return _log_rgamma(float(y))
    n = math.floor(y)
    delta = float(y - n)
    if delta == 0.0:
        return 0.0, -math.inf
    sign = -1.0 if n % 2 else 1.0
    return sign, math.log(math.sin(math.pi * delta)) + math.lgamma(float(1 - y)) - math.log(math.pi)


# ---------------------------------------------------------------------------
# regimes


def _series(alpha: float, beta: float, z: float, tol: float) -> tuple[float, float]:
    """Power series with a rigorous truncation bound.

    For ``alpha*n + beta > 0`` the term ratio
    ``|z| Gamma(alpha(n-1)+beta) / Gamma(alpha n+beta)`` decreases with ``n``
    (digamma is increasing), so once it drops below one the tail is bounded
    by a geometric series.
    """
    terms: list[float] = []
    rounding = 0.0
    log_abs_z = math.log(abs(z)) if z != 0 else -math.inf
    tail = math.inf
    prev_mag = 0.0
    prev_positive_arg = False
    for n in range(_MAX_SERIES_TERMS):
        y = alpha * n + beta
        if n == 0:
            term = rgamma(y)
            exponent = 0.0
        elif z == 0:
            break
        else:
            sign, log_r = _log_rgamma(y)
            exponent = n * log_abs_z + log_r
            if sign == 0.0:
                term = 0.0
            elif y < 171.0 and n * log_abs_z < 700.0:
                term = z**n * rgamma(y)
            elif exponent > 700.0:
                return math.nan, math.inf
            else:
                term = sign * (-1.0 if (z < 0 and n % 2) else 1.0) * math.exp(exponent)
        mag = abs(term)
        terms.append(term)
        rounding += (_TERM_ULPS + abs(exponent)) * _EPS * mag
        if z == 0:
            tail = 0.0
            break
        if prev_positive_arg and prev_mag > 0.0:
            ratio = mag / prev_mag
            if ratio < 1.0:
                tail = mag * ratio / (1.0 - ratio)
                if tail <= 1e-3 * tol or tail <= _EPS * abs(math.fsum(terms)) * 1e-3:
                    break
        prev_mag = mag
        prev_positive_arg = y > 0
    value = math.fsum(terms)
    return value, tail + rounding + _EPS * abs(value)


def _asymptotic(alpha: float, beta: float, x: float) -> tuple[float, float]:
    """Inverse-power expansion of E_{alpha,beta}(-x), truncated optimally.

    The remainder after ``K`` terms is estimated as twice the largest of the
    next three terms (three, because poles of 1/Gamma zero out some terms).
    For ``alpha > 2/3`` an exponentially small contribution of size
    ``x**((1-beta)/alpha) * exp(x**(1/alpha) * cos(pi/alpha)) / alpha`` is
    added to the bound; at ``alpha = 1`` it is the exact missing piece.
    """
    log_x = math.log(x)
    terms: list[float] = []
    for k in range(1, _MAX_ASYMPTOTIC_TERMS + 1):
        sign, log_r = _log_rgamma_shifted(beta, alpha, k)
        if sign == 0.0:
            terms.append(0.0)
            continue
        exponent = -k * log_x + log_r
        if exponent > 700.0:
            break
        terms.append(sign * (1.0 if k % 2 else -1.0) * math.exp(exponent))
    mags = [abs(t) for t in terms] + [math.inf] * 3
    best_k, best_bound = 0, math.inf
    for k in range(len(terms) + 1):
        bound = 2.0 * max(mags[k], mags[k + 1], mags[k + 2])
        if bound < best_bound:
            best_k, best_bound = k, bound
    kept = terms[:best_k]
    value = math.fsum(kept)
    rounding = sum((_TERM_ULPS + k * abs(log_x)) * _EPS * abs(t) for k, t in enumerate(kept, 1))
    if alpha > 2.0 / 3.0:
        c = math.cos(math.pi / alpha)
        expo = x ** (1.0 / alpha) * c + (1.0 - beta) / alpha * log_x
        best_bound += 2.0 * math.exp(expo) / alpha if expo > -745.0 else 0.0
    return value, best_bound + rounding + _EPS * abs(value)


@lru_cache(maxsize=None)
def _contour_nodes(nodes: int) -> tuple[np.ndarray, np.ndarray, float]:
    # parabola s(u) = mu (1 + iu)^2, trapezoid step 3/N, mu = pi N / 12
    h = 3.0 / nodes
    mu = math.pi * nodes / 12.0
    u = h * np.arange(nodes + 1)
    w = 1.0 + 1j * u
    s = mu * w * w
    weights = np.full(nodes + 1, 2.0)
    weights[0] = 1.0
    factor = weights * w * np.exp(s)
    return s, factor, h * mu / math.pi


def _contour_sum(alpha: float, beta: float, z: np.ndarray, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    s, factor, scale = _contour_nodes(nodes)
    numer = factor * s ** (alpha - beta)
    terms = numer[None, :] / (s[None, :] ** alpha - z[:, None])
    return terms.sum(axis=1).real * scale, np.abs(terms).sum(axis=1) * scale


def _contour(alpha: float, beta: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bromwich-integral values for z < 0 with an a-posteriori error estimate."""
    value, mass = _contour_sum(alpha, beta, z, _CONTOUR_NODES)
    check, _ = _contour_sum(alpha, beta, z, _CONTOUR_CHECK_NODES)
    return value, np.abs(value - check) + 8.0 * _EPS * mass


@lru_cache(maxsize=1024)
def crossover_points(alpha: float, beta: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Arguments ``(x_series, x_asymptotic)`` separating the three regimes.

    The series is used for ``-x_series <= z < 0``, the asymptotic expansion
    for ``z <= -x_asymptotic`` and the contour integral in between. Each
    limit is where that regime's error bound reaches ``tol / 2``.
    """
    target = 0.5 * tol

    def series_ok(x: float) -> bool:
        return _series(alpha, beta, -x, tol)[1] <= target

    cap = _SERIES_CUTOFF**alpha
    hi = min(1.0, cap)
    while series_ok(hi) and hi < cap:
        hi = min(2.0 * hi, cap)
    lo = 0.0
    if series_ok(hi):
        lo = hi
    for _ in range(60):
        if hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        if series_ok(mid):
            lo = mid
        else:
            hi = mid
    x_series = lo

    def asymptotic_ok(x: float) -> bool:
        return _asymptotic(alpha, beta, x)[1] <= target

    start = max(x_series, 1e-3)
    lo_log, hi_log = math.log(start), math.log(start)
    while not asymptotic_ok(math.exp(hi_log)):
        lo_log = hi_log
        hi_log += 1.0
        if hi_log > 690.0:
            return x_series, math.inf
    if hi_log == lo_log:
        return x_series, start
    for _ in range(60):
        if hi_log - lo_log <= 1e-10:
            break
        mid = 0.5 * (lo_log + hi_log)
        if asymptotic_ok(math.exp(mid)):
            hi_log = mid
        else:
            lo_log = mid
    return x_series, math.exp(hi_log)


# ---------------------------------------------------------------------------
# public evaluation


def evaluate(args: MlArgs) -> MlResult:
    """Evaluate E_{alpha,beta}(z) and report how it was obtained."""
    alpha, beta, z, tol = args.alpha, args.beta, args.z, args.tol
    in_domain = args.in_guaranteed_domain
    if z >= 0 or alpha > 1:
        value, err = _series(alpha, beta, z, tol)
        return MlResult(value, err, "series", in_domain and err <= tol)
    x = -z
    x_series, x_asym = crossover_points(alpha, beta, tol)
    if x <= x_series:
        value, err = _series(alpha, beta, z, tol)
        method = "series"
    elif x >= x_asym:
        value, err = _asymptotic(alpha, beta, x)
        method = "asymptotic"
    else:
        v, e = _contour(alpha, beta, np.array([z]))
        value, err = float(v[0]), float(e[0])
        method = "contour"
    return MlResult(value, err, method, in_domain and err <= tol)


def mittag_leffler(z, alpha: float, beta: float = 1.0, tol: float = DEFAULT_TOL):
    """E_{alpha,beta}(z) for a scalar or array of real arguments.

    Returns a float for scalar input and an ndarray otherwise. Use
    :func:`evaluate` to obtain the error bound and regime of a single value.
    """
    if np.ndim(z) == 0:
        return evaluate(MlArgs(alpha, beta, float(z), tol)).value
    zs = np.asarray(z, dtype=float)
    flat = zs.ravel()
    if not np.all(np.isfinite(flat)):
        raise DomainError("z must be finite")
    MlArgs(alpha, beta, 0.0, tol)  # validates parameters
    out = np.empty_like(flat)
    use_contour = np.zeros(flat.shape, dtype=bool)
    if alpha <= 1:
        x_series, x_asym = crossover_points(alpha, beta, tol)
        use_contour = (flat < -x_series) & (flat > -x_asym)
    if use_contour.any():
        out[use_contour] = _contour(alpha, beta, flat[use_contour])[0]
    for i in np.flatnonzero(~use_contour):
        out[i] = evaluate(MlArgs(alpha, beta, float(flat[i]), tol)).value
    return out.reshape(zs.shape)


def _kernel_check(t, alpha: float, lam: float) -> np.ndarray:
    ts = np.asarray(t, dtype=float)
    KernelArgs(alpha, lam, 0.0)
    if not np.all(np.isfinite(ts)):
        raise DomainError("t must be finite")
    if np.any(ts < 0):
        raise DomainError("t must be non-negative")
    return ts


def alpha_exponential(t, alpha: float, lam: float, tol: float = DEFAULT_TOL):
    r"""Decaying alpha-exponential :math:`t^{\alpha-1}E_{\alpha,\alpha}(-\lambda t^\alpha)`.

    This is the Green's function of :math:`{}^CD^\alpha x + \lambda x`. It is
    singular at ``t = 0`` for ``alpha < 1``; asking for that point raises
    :class:`SingularityError` instead of returning infinity.
    """
    ts = _kernel_check(t, alpha, lam)
    if alpha < 1 and np.any(ts == 0):
        raise SingularityError("alpha-exponential kernel is singular at t = 0")
    if alpha == 1:
        out = np.exp(-lam * ts)
    else:
        out = ts ** (alpha - 1) * mittag_leffler(-lam * ts**alpha, alpha, alpha, tol)
    return float(out) if np.ndim(t) == 0 else out


def kernel_integral(t, alpha: float, lam: float, tol: float = DEFAULT_TOL):
    r"""Exact integral of the alpha-exponential kernel over ``[0, t]``.

    .. math::

        \int_0^t s^{\alpha-1}E_{\alpha,\alpha}(-\lambda s^\alpha)\,ds
            = t^\alpha E_{\alpha,\alpha+1}(-\lambda t^\alpha)

    Differences of this function are the exact product-integration weights
    used by the solvers.
    """
    ts = _kernel_check(t, alpha, lam)
    out = ts**alpha * mittag_leffler(-lam * ts**alpha, alpha, alpha + 1.0, tol)
    return float(out) if np.ndim(t) == 0 else out


# ---------------------------------------------------------------------------
# erfc oracle


def _erf_series(x: float) -> float:
    # erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
    terms = []
    term = x
    n = 0
    while True:
        contrib = term / (2 * n + 1)
        terms.append(contrib)
        if abs(contrib) < 1e-18 * max(1.0, abs(x)):
            break
        n += 1
        term *= -x * x / n
    return 2.0 / math.sqrt(math.pi) * math.fsum(terms)


def _erfc_continued_fraction(x: float) -> float:
    # erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
    # evaluated with the modified Lentz algorithm.
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for k in range(1, 500):
        a = 0.5 * k
        d = x + a * d
        d = 1.0 / (d if d != 0 else tiny)
        c = x + a / (c if c != 0 else tiny)
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x * x) / math.sqrt(math.pi) / f


def erfc_reference(x: float) -> float:
    """Complementary error function, independent of :func:`math.erfc`.

    Maclaurin series of erf for ``|x| < 3``, Laplace continued fraction
    beyond. Absolute accuracy is better than 1e-13 on the real line. Meant as
    a test oracle for the ``alpha = 1/2`` identities.
    """
    x = float(x)
    if math.isnan(x):
        raise DomainError("x must not be NaN")
    if x == math.inf:
        return 0.0
    if x == -math.inf:
        return 2.0
    if x < 0:
        return 2.0 - erfc_reference(-x)
    if x < 3.0:
        return 1.0 - _erf_series(x)
    return _erfc_continued_fraction(x)

