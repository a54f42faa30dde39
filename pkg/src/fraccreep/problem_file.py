"""JSON problem files for the delay problem.

Layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "alpha": 0.5, "lambda": 1, "horizon": 1,
      "grid_step": 0.0009765625,              # optional, default T/1024
      "terms": [
        {"b": "t^1", "g": "(x+1)/4", "lipschitz": 0.25, "delay": 1,
         "b_sup": 1}                           # b_sup optional
      ],
      "history": "t"
    }

``b`` and ``history`` are expressions in ``t``, ``g`` in ``x``. Numeric
fields accept numbers or constant expressions such as ``"1/3"``.
``lipschitz`` may be omitted only when ``g`` is affine; its slope is used.
"""

from __future__ import annotations

import json
import math
import warnings
from pathlib import Path
from typing import Any

from .errors import FracCreepError, ProblemFileError
from .expressions import Expression, ExpressionError
from .solver import DelayTerm, ProblemSpec

__all__ = ["SCHEMA_VERSION", "dump_problem", "load_problem", "parse_problem", "problem_to_dict"]

SCHEMA_VERSION = 1
_TOP_KEYS = {"schema_version", "alpha", "lambda", "horizon", "grid_step", "terms", "history"}
_TERM_KEYS = {"b", "b_sup", "g", "lipschitz", "delay"}


def _number(raw: Any, field: str) -> float:
    if isinstance(raw, bool):
        raise ProblemFileError(field, "expected a number")
    if isinstance(raw, (int, float)):
        value = float(raw)
    elif isinstance(raw, str):
        try:
            value = float(Expression(raw, "_")(0.0))
        except ExpressionError as exc:
            raise ProblemFileError(field, f"not a constant expression ({exc})") from None
    else:
        raise ProblemFileError(field, "expected a number")
    if not math.isfinite(value):
        raise ProblemFileError(field, "must be finite")
    return value


def _expression(raw: Any, field: str, variable: str) -> Expression:
    if not isinstance(raw, str):
        raise ProblemFileError(field, f"expected an expression string in {variable!r}")
    try:
        return Expression(raw, variable)
    except ExpressionError as exc:
        raise ProblemFileError(field, str(exc)) from None


def _require(data: dict, key: str, field: str) -> Any:
    if key not in data:
        raise ProblemFileError(field, "missing required field")
    return data[key]


def problem_from_dict(data: Any) -> ProblemSpec:
    """Validate a decoded problem document and build the :class:`ProblemSpec`."""
    if not isinstance(data, dict):
        raise ProblemFileError("<root>", "expected a JSON object")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        raise ProblemFileError(unknown[0], "unknown field")
    version = _require(data, "schema_version", "schema_version")
    if version != SCHEMA_VERSION:
        raise ProblemFileError("schema_version", f"unsupported version {version!r} (expected {SCHEMA_VERSION})")
    alpha = _number(_require(data, "alpha", "alpha"), "alpha")
    if not 0 < alpha <= 1:
        raise ProblemFileError("alpha", "must lie in (0, 1]")
    lam = _number(_require(data, "lambda", "lambda"), "lambda")
    if lam <= 0:
        raise ProblemFileError("lambda", "must be positive")
    horizon = _number(_require(data, "horizon", "horizon"), "horizon")
    if horizon <= 0:
        raise ProblemFileError("horizon", "must be positive")
    step = None
    if data.get("grid_step") is not None:
        step = _number(data["grid_step"], "grid_step")
        n = round(horizon / step) if step > 0 else 0
        if step <= 0 or n < 1 or abs(n * step - horizon) > 1e-9 * horizon:
            raise ProblemFileError("grid_step", "must be positive and divide the horizon")

    raw_terms = _require(data, "terms", "terms")
    if not isinstance(raw_terms, list):
        raise ProblemFileError("terms", "expected a list")
    if not raw_terms:
        raise ProblemFileError("terms", "at least one delay term required")
    terms = []
    for j, raw in enumerate(raw_terms):
        prefix = f"terms[{j}]"
        if not isinstance(raw, dict):
            raise ProblemFileError(prefix, "expected an object")
        unknown = sorted(set(raw) - _TERM_KEYS)
        if unknown:
            raise ProblemFileError(f"{prefix}.{unknown[0]}", "unknown field")
        b = _expression(_require(raw, "b", f"{prefix}.b"), f"{prefix}.b", "t")
        g = _expression(_require(raw, "g", f"{prefix}.g"), f"{prefix}.g", "x")
        delay = _number(_require(raw, "delay", f"{prefix}.delay"), f"{prefix}.delay")
        if delay <= 0:
            raise ProblemFileError(f"{prefix}.delay", "must be positive")
        if delay > horizon:
            raise ProblemFileError(f"{prefix}.delay", f"exceeds the horizon {horizon!r}")
        if raw.get("lipschitz") is not None:
            lipschitz = _number(raw["lipschitz"], f"{prefix}.lipschitz")
            if lipschitz <= 0:
                raise ProblemFileError(f"{prefix}.lipschitz", "must be positive")
        else:
            affine = g.affine()
            if affine is None:
                raise ProblemFileError(f"{prefix}.lipschitz", "required when g is not affine")
            if affine[0] == 0.0:
                raise ProblemFileError(f"{prefix}.lipschitz", "g is constant; supply a positive constant")
            lipschitz = abs(affine[0])
        b_sup = None
        if raw.get("b_sup") is not None:
            b_sup = _number(raw["b_sup"], f"{prefix}.b_sup")
            if b_sup < 0:
                raise ProblemFileError(f"{prefix}.b_sup", "must be non-negative")
        terms.append(DelayTerm(b=b, g=g, lipschitz=lipschitz, delay=delay, b_sup=b_sup))

    history = _expression(_require(data, "history", "history"), "history", "t")
    psi0 = float(history(0.0))
    if abs(psi0) > 1e-12:
        raise ProblemFileError("history", f"history must vanish at 0 (psi(0) = {psi0!r})")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return ProblemSpec(alpha, lam, horizon, tuple(terms), history, grid_step=step)
    except FracCreepError as exc:
        raise ProblemFileError("history" if "history" in str(exc) else "<root>", str(exc)) from None


def parse_problem(path: str | Path) -> ProblemSpec:
    """Read and validate a problem file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"line {exc.lineno}, column {exc.colno}", f"invalid JSON: {exc.msg}") from None
    return problem_from_dict(data)


load_problem = parse_problem


def problem_to_dict(problem: ProblemSpec) -> dict[str, Any]:
    """Canonical document for a problem whose functions are :class:`Expression` objects."""
    for name, fn in [("history", problem.history)] + [
        (f"terms[{j}].{part}", getattr(term, part))
        for j, term in enumerate(problem.terms)
        for part in ("b", "g")
    ]:
        if not isinstance(fn, Expression):
            raise ProblemFileError(name, "only expression-based problems can be serialised")
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "alpha": problem.alpha,
        "lambda": problem.lam,
        "horizon": problem.horizon,
    }
    if problem.grid_step is not None:
        doc["grid_step"] = problem.grid_step
    terms = []
    for term in problem.terms:
        entry: dict[str, Any] = {
            "b": term.b.source,
            "g": term.g.source,
            "lipschitz": term.lipschitz,
            "delay": term.delay,
        }
        if term.b_sup is not None:
            entry["b_sup"] = term.b_sup
        terms.append(entry)
    doc["terms"] = terms
    doc["history"] = problem.history.source
    return doc


def dump_problem(problem: ProblemSpec) -> str:
    """Canonical JSON text; parsing it reproduces an equal :class:`ProblemSpec`."""
    return json.dumps(problem_to_dict(problem), indent=2, sort_keys=False) + "\n"
