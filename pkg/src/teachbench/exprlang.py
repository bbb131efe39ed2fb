"""Tiny arithmetic expression language for teachable feature functions.

Grammar: ``expr := name | number | expr ('+'|'-'|'*') expr | '(' expr ')'
| expr '<' expr`` with ``*`` binding tighter than ``+``/``-`` and ``<``
loosest. A ``<`` comparison evaluates to 1.0 or 0.0.

Parsing is delegated to Python's ``ast`` module (whose precedence for this
subset matches the grammar exactly) and the resulting tree is checked
against an allowlist of node types, so anything outside the grammar is
rejected with a position.
"""

from __future__ import annotations

import ast
import math
from typing import Union

Node = Union["Attr", "Const", "BinOp"]


class ExprError(ValueError):
    """Malformed or out-of-grammar expression; carries a 1-based column."""

    def __init__(self, message: str, column: int | None = None):
        self.column = column
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)


class EvalError(ValueError):
    """Expression evaluation failed (e.g. unknown attribute name)."""


class Attr:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


class Const:
    __slots__ = ("value",)

    def __init__(self, value: float):
        self.value = float(value)


class BinOp:
    __slots__ = ("op", "lhs", "rhs")

    def __init__(self, op: str, lhs: Node, rhs: Node):
        self.op = op  # one of '+', '-', '*', '<'
        self.lhs = lhs
        self.rhs = rhs


_BIN_OPS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*"}


def parse(source: str) -> Node:
    """Parse ``source`` into an expression tree.

    Raises:
        ExprError: On syntax errors or constructs outside the grammar,
            with the offending column when known.
    """
    try:
        module = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"syntax error: {exc.msg}", exc.offset) from None
    return _convert(module.body)


def _convert(node: ast.expr) -> Node:
    col = node.col_offset + 1
    if isinstance(node, ast.Name):
        return Attr(node.id)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExprError(f"non-numeric constant {node.value!r}", col)
        return Const(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        operand = _convert(node.operand)
        if not isinstance(operand, Const):
            raise ExprError("unary minus is only allowed on numbers", col)
        return Const(-operand.value)
    if isinstance(node, ast.BinOp):
        op = _BIN_OPS.get(type(node.op))
        if op is None:
            raise ExprError(f"operator {type(node.op).__name__} not allowed", col)
        return BinOp(op, _convert(node.left), _convert(node.right))
    if isinstance(node, ast.Compare):
        if len(node.ops) != 1 or not isinstance(node.ops[0], ast.Lt):
            raise ExprError("only a single '<' comparison is allowed", col)
        return BinOp("<", _convert(node.left), _convert(node.comparators[0]))
    raise ExprError(f"construct {type(node).__name__} not allowed", col)


def evaluate(node: Node, attrs: dict[str, float]) -> float:
    """Evaluate an expression tree over named attribute values."""
    if isinstance(node, Attr):
        try:
            return float(attrs[node.name])
        except KeyError:
            raise EvalError(f"unknown attribute {node.name!r}") from None
    if isinstance(node, Const):
        return node.value
    lhs = evaluate(node.lhs, attrs)
    rhs = evaluate(node.rhs, attrs)
    if node.op == "+":
        result = lhs + rhs
    elif node.op == "-":
        result = lhs - rhs
    elif node.op == "*":
        result = lhs * rhs
    else:
        result = 1.0 if lhs < rhs else 0.0
    if not math.isfinite(result):
        raise EvalError(f"expression evaluated to non-finite value {result}")
    return result


def attr_names(node: Node) -> set[str]:
    """All attribute names referenced by the expression."""
    if isinstance(node, Attr):
        return {node.name}
    if isinstance(node, Const):
        return set()
    return attr_names(node.lhs) | attr_names(node.rhs)
