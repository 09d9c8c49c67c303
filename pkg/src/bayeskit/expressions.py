"""Model formulas: parsing, printing, evaluation, and parameter grids.

A formula is plain text over numbers, named quantities, arithmetic and a
small set of functions.  Names are classified only at evaluation time:
whatever the caller binds as a parameter is a parameter, the rest are
covariates.  Parsed trees are immutable and compare by structure.

Grammar (recursive descent, one token of lookahead):

    formula  := sum
    sum      := product (("+" | "-") product)*
    product  := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" unary)?        right-associative
    atom     := NUMBER | NAME | NAME "(" sum ")" | "(" sum ")"

so "^" binds tighter than unary minus: -p^2 is -(p^2), while an
exponent may itself be negated (p^-2).  Function names are fixed to
sin, cos, exp and log; anything else in call position is rejected.
All names are case-sensitive.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .exceptions import (
    DomainError,
    EvaluationError,
    ParseError,
    UnboundNameError,
    UnknownFunctionError,
    ValidationError,
)
from .measurement import ObservationSet

FUNCTIONS = ("cos", "exp", "log", "sin")


# ---------------------------------------------------------------------------
# Syntax tree


class Node:
    """Base class for formula syntax nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Number(Node):
    """Literal constant. Always finite and non-negative; signs are Negate nodes."""

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value) or value < 0.0:
            raise ValidationError(f"literal must be a finite non-negative number, got {value!r}")
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class Name(Node):
    """Reference to a parameter or covariate; which one is decided at evaluation."""

    identifier: str


@dataclass(frozen=True)
class Negate(Node):
    operand: Node


@dataclass(frozen=True)
class Binary(Node):
    op: str  # one of + - * / ^
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    function: str
    argument: Node


@dataclass(frozen=True)
class ModelExpression:
    """A formula together with its parsed tree."""

    source: str
    root: Node

    def names(self) -> frozenset[str]:
        """All free names appearing in the formula."""
        found: set[str] = set()
        _collect_names(self.root, found)
        return frozenset(found)


def _collect_names(node: Node, into: set[str]) -> None:
    if isinstance(node, Name):
        into.add(node.identifier)
    elif isinstance(node, Negate):
        _collect_names(node.operand, into)
    elif isinstance(node, Binary):
        _collect_names(node.left, into)
        _collect_names(node.right, into)
    elif isinstance(node, Call):
        _collect_names(node.argument, into)


# ---------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | end
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ParseError(
                f"unreadable character {source[pos]!r}",
                pos,
                ("number", "name", "operator"),
            )
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.k = 0

    def _peek(self) -> _Token:
        return self.tokens[self.k]

    def _advance(self) -> _Token:
        token = self.tokens[self.k]
        self.k += 1
        return token

    def _match_op(self, *ops: str) -> _Token | None:
        token = self._peek()
        if token.kind == "op" and token.text in ops:
            return self._advance()
        return None

    def _expect_op(self, op: str) -> None:
        token = self._peek()
        if token.kind != "op" or token.text != op:
            raise ParseError(
                f"expected {op!r}, got {token.text or 'end of formula'!r}",
                token.pos,
                (op,),
            )
        self._advance()

    def parse(self) -> Node:
        node = self._sum()
        token = self._peek()
        if token.kind != "end":
            raise ParseError(
                f"unexpected {token.text!r} after a complete formula",
                token.pos,
                ("+", "-", "*", "/", "^", "end of formula"),
            )
        return node

    def _sum(self) -> Node:
        node = self._product()
        while (token := self._match_op("+", "-")) is not None:
            node = Binary(token.text, node, self._product())
        return node

    def _product(self) -> Node:
        node = self._unary()
        while (token := self._match_op("*", "/")) is not None:
            node = Binary(token.text, node, self._unary())
        return node

    def _unary(self) -> Node:
        if self._match_op("-") is not None:
            return Negate(self._unary())
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        if self._match_op("^") is not None:
            return Binary("^", base, self._unary())
        return base

    def _atom(self) -> Node:
        token = self._advance()
        if token.kind == "number":
            return Number(float(token.text))
        if token.kind == "name":
            if self._peek().kind == "op" and self._peek().text == "(":
                if token.text not in FUNCTIONS:
                    raise UnknownFunctionError(
                        f"unknown function {token.text!r}", token.pos, FUNCTIONS
                    )
                self._advance()
                argument = self._sum()
                self._expect_op(")")
                return Call(token.text, argument)
            return Name(token.text)
        if token.kind == "op" and token.text == "(":
            node = self._sum()
            self._expect_op(")")
            return node
        raise ParseError(
            f"expected a value, got {token.text or 'end of formula'!r}",
            token.pos,
            ("number", "name", "(", "-"),
        )


def parse(source: str) -> ModelExpression:
    """Parse formula text into a :class:`ModelExpression`.

    Syntax problems raise :class:`~bayeskit.exceptions.ParseError` with
    the character position and the token kinds acceptable there; a call
    to anything outside the built-in function set raises
    :class:`~bayeskit.exceptions.UnknownFunctionError`.
    """
    if not isinstance(source, str):
        raise ValidationError(f"formula must be text, got {type(source).__name__}")
    return ModelExpression(source, _Parser(source).parse())


# ---------------------------------------------------------------------------
# Printing

def _precedence(node: Node) -> int:
    if isinstance(node, Binary):
        return 4 if node.op == "^" else 2 if node.op in "*/" else 1
    if isinstance(node, Negate):
        return 3
    return 5  # atoms


def to_source(node: Node) -> str:
    """Render a tree back to formula text.

    Parentheses are inserted exactly where the grammar requires them, so
    parsing the output reproduces the tree node for node.
    """
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Name):
        return node.identifier
    if isinstance(node, Call):
        return f"{node.function}({to_source(node.argument)})"
    if isinstance(node, Negate):
        inner = to_source(node.operand)
        if _precedence(node.operand) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Binary):
        prec = _precedence(node)
        left = to_source(node.left)
        right = to_source(node.right)
        if node.op == "^":
            if _precedence(node.left) <= 4:
                left = f"({left})"
            if _precedence(node.right) < 3:
                right = f"({right})"
        else:
            if _precedence(node.left) < prec:
                left = f"({left})"
            if _precedence(node.right) <= prec:
                right = f"({right})"
        return f"{left} {node.op} {right}"
    raise ValidationError(f"not a formula node: {node!r}")


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(expr: ModelExpression, params: Mapping[str, float], covariates: Mapping[str, float]) -> float:
    """Evaluate the formula under the given bindings.

    Every free name must appear in exactly one of the two maps; extra
    unused bindings are ignored.  Operations that would produce NaN
    (log of a non-positive value, zero divided by zero, and kin) raise
    :class:`~bayeskit.exceptions.DomainError` naming the innermost
    offending subexpression.
    """
    env: dict[str, float] = {}
    for name in expr.names():
        in_params = name in params
        in_covariates = name in covariates
        if in_params and in_covariates:
            raise UnboundNameError(
                f"name {name!r} is bound as both a parameter and a covariate", name
            )
        if not in_params and not in_covariates:
            raise UnboundNameError(f"name {name!r} has no binding", name)
        value = float(params[name] if in_params else covariates[name])
        if math.isnan(value):
            raise ValidationError(f"binding for {name!r} is NaN")
        env[name] = value
    return _eval(expr.root, env)


def _domain_error(node: Node, reason: str) -> DomainError:
    return DomainError(f"{reason} in {to_source(node)!r}", to_source(node))


def _eval(node: Node, env: Mapping[str, float]) -> float:
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Name):
        return env[node.identifier]
    if isinstance(node, Negate):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        arg = _eval(node.argument, env)
        if node.function == "log":
            if arg <= 0.0:
                raise _domain_error(node, f"log of non-positive value {arg!r}")
            return math.log(arg)
        if node.function == "exp":
            try:
                return math.exp(arg)
            except OverflowError:
                return math.inf
        try:
            out = math.sin(arg) if node.function == "sin" else math.cos(arg)
        except ValueError:
            raise _domain_error(node, f"{node.function} of {arg!r}") from None
        return out
    if isinstance(node, Binary):
        left = _eval(node.left, env)
        right = _eval(node.right, env)
        if node.op == "+":
            out = left + right
        elif node.op == "-":
            out = left - right
        elif node.op == "*":
            out = left * right
        elif node.op == "/":
            if right == 0.0:
                raise _domain_error(node, "division by zero")
            out = left / right
        else:  # ^
            try:
                out = math.pow(left, right)
            except OverflowError:
                out = math.inf
            except ValueError:
                raise _domain_error(
                    node, f"power with base {left!r} and exponent {right!r}"
                ) from None
        if math.isnan(out):
            raise _domain_error(node, "indeterminate arithmetic result")
        return out
    raise ValidationError(f"not a formula node: {node!r}")


def predictions(expr: ModelExpression, params: Mapping[str, float], obs: ObservationSet) -> list[float]:
    """Evaluate the formula at every observation's covariates.

    Returns one prediction per record, in order.  Evaluation failures
    are re-raised with the record index prepended to the message.
    """
    out = []
    for k, record in enumerate(obs.records):
        try:
            out.append(evaluate(expr, params, record.covariates))
        except EvaluationError as exc:
            raise type(exc)(f"record {k}: {exc.args[0]}", exc.subexpression) from None
    return out


# ---------------------------------------------------------------------------
# Parameter grids


@dataclass(frozen=True)
class GridAxis:
    """One parameter's range and resolution: ``points`` cells on [lower, upper]."""

    name: str
    lower: float
    upper: float
    points: int

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise ValidationError(f"axis name must be non-empty text, got {self.name!r}")
        lower, upper = float(self.lower), float(self.upper)
        if not (math.isfinite(lower) and math.isfinite(upper) and lower < upper):
            raise ValidationError(
                f"axis {self.name!r} needs finite bounds with lower < upper, "
                f"got [{lower!r}, {upper!r}]"
            )
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 2:
            raise ValidationError(f"axis {self.name!r} needs an integer point count >= 2")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def step(self) -> float:
        return (self.upper - self.lower) / self.points


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered, uniquely named axes spanning a rectangular parameter box."""

    axes: tuple[GridAxis, ...]

    def __init__(self, axes: Sequence[GridAxis]):
        axes = tuple(axes)
        if not axes:
            raise ValidationError("a parameter space needs at least one axis")
        names = [axis.name for axis in axes]
        if len(set(names)) != len(names):
            raise ValidationError(f"axis names must be unique, got {names}")
        object.__setattr__(self, "axes", axes)

    @property
    def dimension(self) -> int:
        return len(self.axes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(axis.name for axis in self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.points for axis in self.axes)

    def axis(self, name: str) -> GridAxis:
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise ValidationError(f"unknown axis {name!r}")


def load_model(data: Mapping) -> tuple[ModelExpression, ParameterSpace]:
    """Build a formula and its parameter space from a model document.

    The document holds a ``formula`` string and a ``parameters`` list of
    ``{name, min, max, points}`` entries.  Names in the formula that are
    not declared as parameters are covariates, to be supplied by the
    observations.  Every declared parameter must actually appear in the
    formula.
    """
    try:
        formula = data["formula"]
        declared = data["parameters"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed model document: {exc}") from None
    expr = parse(formula)
    try:
        axes = [GridAxis(p["name"], p["min"], p["max"], p["points"]) for p in declared]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed parameter entry: {exc}") from None
    space = ParameterSpace(axes)
    unused = set(space.names) - expr.names()
    if unused:
        raise ValidationError(f"parameters never used by the formula: {sorted(unused)}")
    return expr, space
