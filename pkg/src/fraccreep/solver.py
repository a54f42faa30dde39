"""Time-marching solvers for the fractional Voigt model.

Linear problem ``D^a x + lam x = phi, x(0) = 0`` (Caputo derivative):

* :func:`solve_linear_closed` integrates ``x(t) = int_0^t e_a(t-s) phi(s) ds``
  with the alpha-exponential kernel integrated exactly on every cell;
* :func:`solve_linear_volterra` solves the equivalent second-kind equation
  ``x = I^a phi - lam I^a x`` with Riemann-Liouville product weights and
  never touches the Mittag-Leffler function, so it serves as an oracle for
  the first route.

Delay problem ``D^a x + lam x = sum_j b_j(t) g_j(x(t - tau_j))`` with history
``x = psi`` on ``[-v, 0]``: :func:`solve_delay` marches the integral form,
:func:`apply_operator` applies the integral operator once and
:func:`picard_iterate` iterates it.

All grids are uniform, start at ``t = 0`` and have ``N`` cells of width
``h = T/N``; the delay solver prepends history nodes at ``-h, -2h, ...``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, InputError, SolverError
from .mlf import kernel_integral

__all__ = [
    "DEFAULT_CELLS",
    "DelayTerm",
    "PicardResult",
    "ProblemSpec",
    "Trajectory",
    "apply_operator",
    "closed_weights",
    "format_number",
    "history_eval",
    "linear_inputs",
    "picard_iterate",
    "picard_linear",
    "refinement_orders",
    "rl_weights",
    "sample_function",
    "solve_delay",
    "solve_linear_closed",
    "solve_linear_volterra",
    "sup_distance",
    "uniform_grid",
]

DEFAULT_CELLS = 1024
_SUBITER_MAX = 50
_SUBITER_TOL = 1e-12
_PSI_ZERO_TOL = 1e-12

ScalarFn = Callable[..., object]


def format_number(value: float) -> str:
    """Fixed-point decimal with 12 significant digits (trailing zeros trimmed)."""
    return np.format_float_positional(
        float(value), precision=12, unique=False, fractional=False, trim="-"
    )


def sample_function(fn: ScalarFn, arg: np.ndarray) -> np.ndarray:
    """Evaluate a user function on an array, tolerating scalar-only callables."""
    try:
        out = np.asarray(fn(arg), dtype=float)
        if out.shape != arg.shape:
            out = np.broadcast_to(out, arg.shape).astype(float)
    except (TypeError, ValueError):
        out = np.array([float(fn(float(a))) for a in arg.ravel()]).reshape(arg.shape)
    return out


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class DelayTerm:
    """One summand ``b(t) * g(x(t - delay))`` of the forcing.

    ``lipschitz`` is the constant of ``g`` used by every closed-form bound.
    ``b_sup`` is ``sup |b|`` on ``[0, T]``; when omitted it is estimated on
    the solution grid.
    """

    b: ScalarFn
    g: ScalarFn
    lipschitz: float | None
    delay: float
    b_sup: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delay) and self.delay > 0):
            raise InputError(f"delay must be positive and finite, got {self.delay!r}")
        if self.lipschitz is not None and not (math.isfinite(self.lipschitz) and self.lipschitz > 0):
            raise InputError(f"lipschitz must be positive, got {self.lipschitz!r}")
        if self.b_sup is not None and not (math.isfinite(self.b_sup) and self.b_sup >= 0):
            raise InputError(f"b_sup must be non-negative, got {self.b_sup!r}")


@dataclass(frozen=True)
class ProblemSpec:
    """Fractional delay problem on ``[-v, T]`` with ``v = max delay``."""

    alpha: float
    lam: float
    horizon: float
    terms: tuple[DelayTerm, ...]
    history: ScalarFn
    grid_step: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not 0 < self.alpha <= 1:
            raise InputError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise InputError(f"lambda must be positive, got {self.lam!r}")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise InputError(f"horizon must be positive, got {self.horizon!r}")
        if not self.terms:
            raise InputError("at least one delay term required")
        for j, term in enumerate(self.terms):
            if term.delay > self.horizon:
                raise InputError(f"terms[{j}].delay = {term.delay!r} exceeds the horizon {self.horizon!r}")
            g0 = float(sample_function(term.g, np.zeros(1))[0])
            if g0 == 0.0:
                warnings.warn(f"terms[{j}]: g(0) = 0, hypothesis g(0) != 0 not met", stacklevel=3)
        psi0 = float(sample_function(self.history, np.zeros(1))[0])
        if abs(psi0) > _PSI_ZERO_TOL:
            raise InputError(f"history must vanish at 0, got psi(0) = {psi0!r}")
        _check_continuity(self.history, self.max_delay)
        if self.grid_step is not None:
            _cells(self.horizon, self.grid_step)

    @property
    def max_delay(self) -> float:
        return max(term.delay for term in self.terms)

    def cells(self, step: float | None = None) -> int:
        return _cells(self.horizon, step if step is not None else self.grid_step)

    def sup_b(self, step: float | None = None) -> list[float]:
        """``B_j`` for every term: supplied value or max of ``|b_j|`` on the grid."""
        t = uniform_grid(self.horizon, self.cells(step))
        return [
            term.b_sup if term.b_sup is not None else float(np.max(np.abs(sample_function(term.b, t))))
            for term in self.terms
        ]


def _check_continuity(psi: ScalarFn, v: float) -> None:
    # A jump survives refinement; the largest sampled increment of a
    # continuous function shrinks with the spacing.
    coarse = np.diff(sample_function(psi, np.linspace(-v, 0.0, 2049)))
    fine = np.diff(sample_function(psi, np.linspace(-v, 0.0, 32769)))
    if not (np.all(np.isfinite(coarse)) and np.all(np.isfinite(fine))):
        raise InputError("history is not finite on [-v, 0]")
    jump_coarse = float(np.max(np.abs(coarse)))
    jump_fine = float(np.max(np.abs(fine)))
    if jump_fine > 1e-9 and jump_fine > 0.9 * jump_coarse:
        raise InputError(f"history appears discontinuous on [-v, 0] (jump ~ {jump_fine:.3g})")


def _cells(horizon: float, step: float | None) -> int:
    if step is None:
        return DEFAULT_CELLS
    if not (math.isfinite(step) and step > 0):
        raise InputError(f"step must be positive, got {step!r}")
    n = round(horizon / step)
    if n < 1 or abs(n * step - horizon) > 1e-9 * horizon:
        raise InputError(f"step {step!r} does not divide the horizon {horizon!r}")
    return n


def uniform_grid(horizon: float, cells: int) -> np.ndarray:
    """Nodes ``k * T/N`` for ``k = 0..N``."""
    if cells < 1:
        raise InputError("grid needs at least one cell")
    return horizon * np.arange(cells + 1) / cells


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples ``values[k] = x(t0 + k * step)`` on a uniform grid.

    ``notes`` carries solver flags such as a violated uniqueness condition.
    """

    t0: float
    step: float
    values: np.ndarray
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise InputError("trajectory needs at least two samples")
        if not np.all(np.isfinite(values)):
            raise InputError("trajectory values must be finite")
        if not self.step > 0:
            raise InputError("trajectory step must be positive")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.values.size)

    @property
    def origin_index(self) -> int:
        """Index of the node at ``t = 0``."""
        return int(round(-self.t0 / self.step))

    def forward(self) -> np.ndarray:
        """Values on ``[0, T]``."""
        return self.values[self.origin_index :]

    def history_part(self) -> np.ndarray:
        """Values on ``[t0, 0]``."""
        return self.values[: self.origin_index + 1]

    def at(self, t) -> np.ndarray | float:
        """Piecewise-linear interpolation of the samples."""
        out = np.interp(t, self.times, self.values)
        return float(out) if np.ndim(t) == 0 else out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "x"])
        for t, x in zip(self.times, self.values):
            writer.writerow([format_number(t), format_number(x)])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def read_csv(cls, path: str | Path) -> Trajectory:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["t", "x"]:
            raise InputError(f"{path}: expected header 't,x'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        if data.shape[0] < 2:
            raise InputError(f"{path}: need at least two rows")
        step = float(np.mean(np.diff(data[:, 0])))
        return cls(float(data[0, 0]), step, data[:, 1])


# ---------------------------------------------------------------------------
# linear problem


def linear_inputs(alpha: float, lam: float, phi, t) -> tuple[np.ndarray, np.ndarray, float]:
    """Validate a linear problem; return the grid, forcing samples and step."""
    if not 0 < alpha <= 1:
        raise InputError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not (math.isfinite(lam) and lam > 0):
        raise InputError(f"lambda must be positive, got {lam!r}")
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise InputError("grid must be a 1-d array with at least two nodes")
    h = (t[-1] - t[0]) / (t.size - 1)
    if t[0] != 0.0 or h <= 0 or np.max(np.abs(np.diff(t) - h)) > 1e-9 * max(h, 1.0):
        raise InputError("grid must be uniform and start at t = 0")
    f = sample_function(phi, t) if callable(phi) else np.asarray(phi, dtype=float)
    if f.shape != t.shape:
        raise InputError(f"stress has {f.size} samples but the grid has {t.size} nodes")
    if not np.all(np.isfinite(f)):
        raise InputError("stress samples must be finite")
    return t, f, h


def closed_weights(alpha: float, lam: float, h: float, cells: int) -> np.ndarray:
    """``W[m] = K((m+1)h) - K(mh)`` with ``K`` the exact kernel integral."""
    return np.diff(kernel_integral(h * np.arange(cells + 1), alpha, lam))


def rl_weights(alpha: float, h: float, cells: int) -> np.ndarray:
    """Riemann-Liouville rectangle weights ``((m+1)^a - m^a) h^a / Gamma(a+1)``."""
    m = np.arange(cells + 1, dtype=float)
    return np.diff(m**alpha) * h**alpha / math.gamma(alpha + 1.0)


def solve_linear_closed(alpha: float, lam: float, phi, t) -> Trajectory:
    """Product integration of ``x(t) = int_0^t e_a^{-lam(t-s)} phi(s) ds``.

    ``phi`` is replaced on every cell by the mean of its end samples and the
    kernel is integrated exactly through differences of
    :func:`~fraccreep.mlf.kernel_integral`. Exact for constant ``phi``.

    Parameters
    ----------
    alpha, lam : float
        Fractional order in (0, 1] and rate ``lam > 0``.
    phi : callable or array_like
        Stress, either a function of ``t`` or its samples on ``t``.
    t : array_like
        Uniform grid starting at 0.
    """
    t, f, h = linear_inputs(alpha, lam, phi, t)
    n = t.size - 1
    w = closed_weights(alpha, lam, h, n)
    cell_mean = 0.5 * (f[:-1] + f[1:])
    x = np.zeros(n + 1)
    x[1:] = np.convolve(w, cell_mean)[:n]
    return Trajectory(0.0, h, x)


def solve_linear_volterra(alpha: float, lam: float, phi, t) -> Trajectory:
    """Second-kind Volterra route ``x = I^a phi - lam I^a x``.

    Each cell carries the mean of its end values against the exact integral
    of ``(t-s)^(a-1)/Gamma(a)`` over the cell; the unknown end value enters
    only through the newest cell and is solved for directly.
    """
    t, f, h = linear_inputs(alpha, lam, phi, t)
    n = t.size - 1
    w = rl_weights(alpha, h, n)
    forcing = np.convolve(w, 0.5 * (f[:-1] + f[1:]))[:n]
    x = np.zeros(n + 1)
    cell_mean = np.zeros(n)
    for k in range(1, n + 1):
        # cells 0..k-2 are complete; cell k-1 still misses x[k]
        known = np.dot(w[k - 1 : 0 : -1], cell_mean[: k - 1]) if k > 1 else 0.0
        rhs = forcing[k - 1] - lam * (known + w[0] * 0.5 * x[k - 1])
        x[k] = rhs / (1.0 + 0.5 * lam * w[0])
        cell_mean[k - 1] = 0.5 * (x[k - 1] + x[k])
    return Trajectory(0.0, h, x)


def picard_linear(alpha: float, lam: float, phi, t, iterations: int) -> list[np.ndarray]:
    """Successive approximations of ``x = I^a phi - lam I^a x``.

    Starts from ``x_0 = I^a phi``; the m-th iterate approximates the partial
    sum ``sum_{k<=m} (-lam)^k I^((k+1)a) phi``.
    """
    if iterations < 1:
        raise InputError("iterations must be at least 1")
    t, f, h = linear_inputs(alpha, lam, phi, t)
    n = t.size - 1
    w = rl_weights(alpha, h, n)

    def integrate(y: np.ndarray) -> np.ndarray:
        out = np.zeros(n + 1)
        out[1:] = np.convolve(w, 0.5 * (y[:-1] + y[1:]))[:n]
        return out

    base = integrate(f)
    iterates = [base]
    for _ in range(iterations - 1):
        iterates.append(base - lam * integrate(iterates[-1]))
    return iterates


# ---------------------------------------------------------------------------
# delay problem


def history_eval(problem: ProblemSpec, t):
    """History ``psi(t)`` for ``-v <= t <= 0``; exactly 0 at ``t = 0``."""
    ts = np.asarray(t, dtype=float)
    v = problem.max_delay
    if np.any(ts < -v * (1 + 1e-12)) or np.any(ts > 0):
        raise DomainError(f"history is defined on [-{v}, 0] only")
    out = sample_function(problem.history, ts.ravel()).reshape(ts.shape)
    out = np.where(ts == 0, 0.0, out)
    return float(out) if np.ndim(t) == 0 else out


def _history_nodes(problem: ProblemSpec, h: float) -> np.ndarray:
    m = math.ceil(problem.max_delay / h - 1e-9)
    t = -h * np.arange(m, -1, -1, dtype=float)
    # nodes below -v (when v is not a multiple of h) repeat psi(-v)
    return history_eval(problem, np.maximum(t, -problem.max_delay))


def _contraction_lhs(problem: ProblemSpec, step: float | None) -> float | None:
    if any(term.lipschitz is None for term in problem.terms):
        return None
    bsup = problem.sup_b(step)
    return problem.horizon**problem.alpha * math.fsum(b * term.lipschitz for b, term in zip(bsup, problem.terms))


class _Setup:
    """Grid, weights and precomputed coefficient samples shared by the solvers."""

    def __init__(self, problem: ProblemSpec, step: float | None, forcing: ScalarFn | None) -> None:
        self.problem = problem
        self.n = problem.cells(step)
        self.h = problem.horizon / self.n
        self.weights = closed_weights(problem.alpha, problem.lam, self.h, self.n)
        self.mids = self.h * (np.arange(self.n) + 0.5)
        self.delays = np.array([term.delay for term in problem.terms])
        self.b_mid = np.array([sample_function(term.b, self.mids) for term in problem.terms])
        self.extra = np.zeros(self.n) if forcing is None else sample_function(forcing, self.mids)
        self.history = _history_nodes(problem, self.h)
        # delayed arguments s - tau_j per (term, cell)
        self.args = self.mids[None, :] - self.delays[:, None]
        hist_args = np.minimum(self.args, 0.0)
        self.psi_at_args = history_eval(problem, hist_args)
        notes = []
        lhs = _contraction_lhs(problem, step)
        if lhs is not None and not lhs < math.gamma(problem.alpha + 1.0):
            notes.append("uniqueness not guaranteed: T^a sum B_j l_j >= Gamma(a+1)")
        self.notes = tuple(notes)

    def delayed(self, x: np.ndarray, arg: float, psi_value: float) -> float:
        if arg <= 0.0:
            return psi_value
        pos = arg / self.h
        k = min(int(pos), self.n - 1)
        frac = pos - k
        return (1.0 - frac) * x[k] + frac * x[k + 1]

    def forcing_at(self, x: np.ndarray, cell: int) -> float:
        total = self.extra[cell]
        for j, term in enumerate(self.problem.terms):
            y = self.delayed(x, self.args[j, cell], self.psi_at_args[j, cell])
            gv = term.g(y)
            total += self.b_mid[j, cell] * float(gv)
        if not math.isfinite(total):
            raise SolverError("non-finite forcing value", step_index=cell + 1)
        return total

    def forcing_all(self, x: np.ndarray) -> np.ndarray:
        nodes = self.h * np.arange(self.n + 1)
        total = self.extra.copy()
        for j, term in enumerate(self.problem.terms):
            arg = self.args[j]
            y = np.where(arg <= 0.0, self.psi_at_args[j], np.interp(np.maximum(arg, 0.0), nodes, x))
            total += self.b_mid[j] * sample_function(term.g, y)
        if not np.all(np.isfinite(total)):
            bad = int(np.flatnonzero(~np.isfinite(total))[0])
            raise SolverError("non-finite forcing value", step_index=bad + 1)
        return total

    def trajectory(self, x: np.ndarray) -> Trajectory:
        full = np.concatenate([self.history[:-1], x])
        t0 = -self.h * (self.history.size - 1)
        return Trajectory(t0, self.h, full, self.notes)


def solve_delay(problem: ProblemSpec, step: float | None = None, *, forcing: ScalarFn | None = None) -> Trajectory:
    """March the delay integral equation on ``[0, T]``.

    The forcing ``sum_j b_j(s) g_j(x(s - tau_j))`` (plus the optional extra
    ``forcing(s)``) is sampled at cell midpoints; delayed values come from
    ``psi`` for non-positive arguments and from linear interpolation of the
    computed solution otherwise. When a delayed argument falls inside the
    cell being computed (``tau_j < h/2``) the new value is found by
    fixed-point sub-iteration.

    The result spans ``[-v, T]``. If the contraction condition fails the
    trajectory is still returned and carries a note in ``notes``.
    """
    setup = _Setup(problem, step, forcing)
    n, w = setup.n, setup.weights
    x = np.zeros(n + 1)
    f = np.zeros(n)
    reaches_ahead = setup.args > (np.arange(n) * setup.h)[None, :] * (1 + 1e-14)
    needs_sub = reaches_ahead.any(axis=0)
    for k in range(n):
        if not needs_sub[k]:
            f[k] = setup.forcing_at(x, k)
            x[k + 1] = np.dot(w[k::-1], f[: k + 1])
            continue
        x[k + 1] = x[k]
        for _ in range(_SUBITER_MAX):
            f[k] = setup.forcing_at(x, k)
            new = np.dot(w[k::-1], f[: k + 1])
            change = abs(new - x[k + 1])
            x[k + 1] = new
            if change <= _SUBITER_TOL:
                break
        else:
            raise SolverError("sub-iteration did not converge", step_index=k + 1)
    return setup.trajectory(x)


def apply_operator(
    problem: ProblemSpec,
    x: Trajectory,
    step: float | None = None,
    *,
    forcing: ScalarFn | None = None,
) -> Trajectory:
    """One application of the integral operator ``P`` on the solver grid.

    ``x`` must live on the grid produced by :func:`solve_delay` for the same
    ``problem`` and ``step``. The history part of the result is ``psi``.
    """
    setup = _Setup(problem, step, forcing)
    if len(x) != setup.history.size + setup.n or abs(x.step - setup.h) > 1e-12 * setup.h:
        raise InputError("trajectory does not match the problem grid")
    f = setup.forcing_all(x.forward())
    out = np.zeros(setup.n + 1)
    out[1:] = np.convolve(setup.weights, f)[: setup.n]
    return setup.trajectory(out)


@dataclass(frozen=True)
class PicardResult:
    """Iterates ``x^0, x^1, ...`` and ratios of successive sup-norm increments."""

    iterates: list[Trajectory]
    ratios: list[float]

    def increments(self) -> list[float]:
        return [
            float(np.max(np.abs(b.forward() - a.forward())))
            for a, b in zip(self.iterates, self.iterates[1:])
        ]


def picard_iterate(problem: ProblemSpec, iterations: int, step: float | None = None) -> PicardResult:
    """Successive approximations ``x^{m+1} = P x^m`` from ``x^0 = (psi, 0)``.

    Returns ``iterations + 1`` trajectories and the ratios
    ``|x^{m+1} - x^m| / |x^m - x^{m-1}|`` (sup norm on ``[0, T]``). A zero
    denominator, i.e. exact convergence, yields a ratio of 0.
    """
    if iterations < 2:
        raise InputError("iterations must be at least 2")
    setup = _Setup(problem, step, None)
    current = setup.trajectory(np.zeros(setup.n + 1))
    iterates = [current]
    for _ in range(iterations):
        f = setup.forcing_all(current.forward())
        out = np.zeros(setup.n + 1)
        out[1:] = np.convolve(setup.weights, f)[: setup.n]
        current = setup.trajectory(out)
        iterates.append(current)
    result = PicardResult(iterates, [])
    inc = result.increments()
    ratios = [0.0 if prev == 0.0 else cur / prev for prev, cur in zip(inc, inc[1:])]
    return PicardResult(iterates, ratios)


def sup_distance(a: Trajectory | np.ndarray, b: Trajectory | np.ndarray) -> float:
    """Max absolute difference of two sample vectors (forward parts for trajectories)."""
    va = a.forward() if isinstance(a, Trajectory) else np.asarray(a)
    vb = b.forward() if isinstance(b, Trajectory) else np.asarray(b)
    return float(np.max(np.abs(va - vb)))


def refinement_orders(errors: Sequence[float]) -> list[float]:
    """Observed orders ``log2(e_k / e_{k+1})`` for errors at halving steps."""
    return [math.log2(a / b) for a, b in zip(errors, errors[1:])]
