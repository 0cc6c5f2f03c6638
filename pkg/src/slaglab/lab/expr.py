"""Restricted arithmetic expressions for configs and boundary data.

Only numbers, names from an explicit namespace, ``+ - * / **``, unary
minus and calls to whitelisted numpy functions are accepted.
"""

from __future__ import annotations

import ast
import math
import operator

import numpy as np

from ..errors import DomainError

__all__ = ["evaluate", "scalar", "FUNCTIONS"]

FUNCTIONS = {
    name: getattr(np, name)
    for name in ("exp", "log", "sqrt", "sin", "cos", "tan", "arctan", "arcsinh", "sinh", "cosh", "abs")
}
FUNCTIONS["atan"] = np.arctan
FUNCTIONS["asinh"] = np.arcsinh
CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def evaluate(text: str, names: dict | None = None):
    """Evaluate ``text`` with variables ``names`` (numbers or arrays)."""
    env = dict(CONSTANTS)
    env.update(names or {})
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise DomainError(f"cannot parse expression {text!r}") from exc

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise DomainError(f"unknown name {node.id!r} in {text!r}")
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in FUNCTIONS and not node.keywords):
            return FUNCTIONS[node.func.id](*[walk(a) for a in node.args])
        raise DomainError(f"unsupported construct in expression {text!r}")

    return walk(tree)


def scalar(text) -> float:
    """A float from a number or a constant expression such as ``pi/8``."""
    if isinstance(text, (int, float)):
        return float(text)
    return float(evaluate(str(text)))
