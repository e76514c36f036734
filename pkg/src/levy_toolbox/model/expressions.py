"""Expression strings for function-valued model fields.

Grammar: symbols `x`, `u`; operators `+ - * / ^` (`**` is accepted too); functions
`sin, cos, exp, abs, sign, min, max`; constants `pi, e`. Expressions are parsed with
`ast`, checked against that whitelist and compiled once; evaluation is vectorised with
numpy and broadcasts `x` against `u`.
"""

from __future__ import annotations

import ast
from functools import reduce
import logging
import typing as t

log = logging.getLogger("levy_toolbox.model.expressions")

from levy_toolbox.exc import ExpressionError

import numpy as np

SYMBOLS: frozenset[str] = frozenset({"x", "u"})
CONSTANTS: dict[str, float] = {"pi": float(np.pi), "e": float(np.e)}


def _fold(op: t.Callable[[t.Any, t.Any], t.Any]) -> t.Callable[..., t.Any]:
    def _apply(*args: t.Any) -> t.Any:
        if len(args) < 2:
            raise ExpressionError(f"{op.__name__} expects at least two arguments")
        return reduce(op, args)

    return _apply


FUNCTIONS: dict[str, t.Callable[..., t.Any]] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "sign": np.sign,
    "min": _fold(np.minimum),
    "max": _fold(np.maximum),
}

_ALLOWED_NODES: tuple[type, ...] = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Call,
    ast.Name,
    ast.Load,
    ast.Constant,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
)


class Expression:
    """A compiled, whitelisted expression in `x` (and optionally `u`).

    Params:
        source (str | float | int): Expression text, or a number for a constant field.

    """

    def __init__(self, source: str | float | int) -> None:
        self.source: str = str(source)
        text = self.source.replace("^", "**")

        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            msg = ExpressionError(f"Cannot parse expression '{self.source}'. Details: {exc}")
            log.error(msg)

            raise msg from exc

        self.symbols: frozenset[str] = self._check(tree)
        self._code = compile(tree, filename="<expression>", mode="eval")

    def _check(self, tree: ast.AST) -> frozenset[str]:
        used: set[str] = set()

        for node in ast.walk(tree):
            if not isinstance(node, _ALLOWED_NODES):
                raise ExpressionError(
                    f"Construct '{type(node).__name__}' is not allowed in '{self.source}'"
                )
            if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
                raise ExpressionError(f"Only numeric literals are allowed in '{self.source}'")
            if isinstance(node, ast.Call):
                if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
                    raise ExpressionError(f"Unknown function in '{self.source}'")
                if node.keywords:
                    raise ExpressionError(f"Keyword arguments are not allowed in '{self.source}'")
            if isinstance(node, ast.Name):
                if node.id in SYMBOLS:
                    used.add(node.id)
                elif node.id not in CONSTANTS and node.id not in FUNCTIONS:
                    raise ExpressionError(f"Unknown symbol '{node.id}' in '{self.source}'")

        return frozenset(used)

    @property
    def is_constant(self) -> bool:
        return not self.symbols

    def __call__(self, x: t.Any, u: t.Any = 0.0) -> np.ndarray:
        x_arr = np.asarray(x, dtype=float)
        u_arr = np.asarray(u, dtype=float)
        namespace: dict[str, t.Any] = {"x": x_arr, "u": u_arr, **CONSTANTS, **FUNCTIONS}

        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            value = eval(self._code, {"__builtins__": {}}, namespace)

        shape = np.broadcast_shapes(x_arr.shape, u_arr.shape)

        return np.broadcast_to(np.asarray(value, dtype=float), shape).astype(float)

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"
