"""Tiny arithmetic parsers for CLI values: pi expressions and fraction spins."""

from __future__ import annotations

import ast
from fractions import Fraction

import numpy as np

__all__ = ["parse_angle", "parse_spin"]

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div)


def _eval_node(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return float(np.pi)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        v = _eval_node(node.operand)
        return v if isinstance(node.op, ast.UAdd) else -v
    if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
        left, right = _eval_node(node.left), _eval_node(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if right == 0:
            raise ValueError("division by zero in angle expression")
        return left / right
    raise ValueError(f"unsupported syntax in angle expression: {ast.dump(node)}")


def parse_angle(text: str) -> float:
    """Evaluate expressions like '2*pi', 'pi/3', '-pi/2 + 0.1' (radians)."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse angle {text!r}: {exc}") from None
    return _eval_node(tree)


def parse_spin(text: str) -> float:
    """Parse a half-integer spin given as a fraction ('3/2') or decimal ('1.5')."""
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"cannot parse spin {text!r}") from None
    if value <= 0 or (2 * value).denominator != 1:
        raise ValueError(f"spin must be a positive half-integer, got {text!r}")
    return float(value)
