"""Small arithmetic expression language for problem files.

Grammar: numeric literals, one variable (``t`` or ``x``), the constant
``pi``, ``+ - * /``, ``^`` (or ``**``) with an exponent free of the
variable, parentheses, and the functions ``sin``, ``cos``, ``exp``.
Expressions compile to numpy-vectorised callables.
"""

from __future__ import annotations

import ast
import math

import numpy as np

__all__ = ["Expression", "ExpressionError"]

_FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}
_CONSTANTS = {"pi": math.pi}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


class ExpressionError(ValueError):
    """Raised for text outside the expression grammar."""


class Expression:
    """A parsed, validated expression in a single variable.

    Instances compare equal when their canonical text and variable agree.

    >>> g = Expression("(x + 1)/4", "x")
    >>> g(3.0)
    1.0
    >>> g.affine()
    (0.25, 0.25)
    """

    __slots__ = ("_code", "_tree", "source", "variable")

    def __init__(self, source: str, variable: str = "t") -> None:
        if not isinstance(source, str) or not source.strip():
            raise ExpressionError("expression must be a non-empty string")
        try:
            tree = ast.parse(source.strip().replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"syntax error in {source!r}: {exc.msg}") from None
        _validate(tree.body, variable)
        self._tree = tree
        self.variable = variable
        self.source = ast.unparse(tree).replace(" ** ", "^")
        self._code = compile(tree, "<expression>", "eval")

    def __call__(self, value):
        env = {"__builtins__": {}, **_FUNCTIONS, **_CONSTANTS}
        out = eval(self._code, env, {self.variable: value})  # grammar-checked above
        if np.ndim(value) and np.ndim(out) == 0:
            out = np.full(np.shape(value), float(out))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Expression):
            return NotImplemented
        return self.source == other.source and self.variable == other.variable

    def __hash__(self) -> int:
        return hash((self.source, self.variable))

    def __repr__(self) -> str:
        return f"Expression({self.source!r}, {self.variable!r})"

    def __str__(self) -> str:
        return self.source

    def affine(self) -> tuple[float, float] | None:
        """``(slope, intercept)`` if the expression is affine in its variable, else None."""
        try:
            return _affine(self._tree.body, self.variable)
        except (ZeroDivisionError, OverflowError, ValueError):
            return None


def _validate(node: ast.AST, variable: str) -> None:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported literal {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id != variable and node.id not in _CONSTANTS:
            raise ExpressionError(f"unknown name {node.id!r} (variable is {variable!r})")
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.UAdd, ast.USub)):
            raise ExpressionError("unsupported unary operator")
        _validate(node.operand, variable)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _BINOPS):
            raise ExpressionError(f"unsupported operator {type(node.op).__name__}")
        if isinstance(node.op, ast.Pow) and _mentions(node.right, variable):
            raise ExpressionError("exponent must not depend on the variable")
        _validate(node.left, variable)
        _validate(node.right, variable)
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCTIONS):
            raise ExpressionError("only sin, cos and exp may be called")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        _validate(node.args[0], variable)
    else:
        raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def _mentions(node: ast.AST, variable: str) -> bool:
    return any(isinstance(n, ast.Name) and n.id == variable for n in ast.walk(node))


def _constant(node: ast.AST) -> float:
    env = {"__builtins__": {}, **_FUNCTIONS, **_CONSTANTS}
    return float(eval(compile(ast.Expression(node), "<const>", "eval"), env))


def _affine(node: ast.AST, variable: str) -> tuple[float, float] | None:
    if not _mentions(node, variable):
        return 0.0, _constant(node)
    if isinstance(node, ast.Name):
        return 1.0, 0.0
    if isinstance(node, ast.UnaryOp):
        inner = _affine(node.operand, variable)
        if inner is None:
            return None
        return inner if isinstance(node.op, ast.UAdd) else (-inner[0], -inner[1])
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exponent = _constant(node.right)
            return _affine(node.left, variable) if exponent == 1.0 else None
        left = _affine(node.left, variable)
        right = _affine(node.right, variable)
        if left is None or right is None:
            return None
        if isinstance(node.op, ast.Add):
            return left[0] + right[0], left[1] + right[1]
        if isinstance(node.op, ast.Sub):
            return left[0] - right[0], left[1] - right[1]
        if isinstance(node.op, ast.Mult):
            if left[0] == 0.0:
                return left[1] * right[0], left[1] * right[1]
            if right[0] == 0.0:
                return right[1] * left[0], right[1] * left[1]
            return None
        if isinstance(node.op, ast.Div):
            if right[0] != 0.0:
                return None
            return left[0] / right[1], left[1] / right[1]
    return None
