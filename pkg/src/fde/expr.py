"""Small expression language for right-hand sides, deviations and solutions.

Grammar (lowest to highest precedence)::

    expr    := term (("+" | "-") term)*
    term    := power (("*" | "/") power)*
    power   := unary ("^" power)?          right-associative
    unary   := "-" unary | primary         binds tighter than ^
    primary := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Evaluation is vectorised over numpy arrays.  Domain violations raise
DomainError instead of producing NaN.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExprSyntaxError, MissingVariable, UnknownIdentifier

CONSTANTS = {"e": np.e, "pi": np.pi}
FUNCTIONS = {"exp": 1, "log": 1, "sqrt": 1, "sin": 1, "cos": 1, "pow": 2, "abs": 1}
DEFAULT_VARIABLES = ("t", "u", "v")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op" or "end"
    text: str
    offset: int  # byte offset in the UTF-8 source


def tokenize(source: str) -> list:
    tokens = []
    pos = 0
    byte = 0
    while True:
        m = _TOKEN.match(source, pos)
        if not m or m.end() == pos:
            rest = source[pos:]
            stripped = rest.lstrip()
            byte += len(rest[: len(rest) - len(stripped)].encode())
            if not stripped:
                tokens.append(Token("end", "", byte))
                return tokens
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", byte)
        kind = m.lastgroup
        start = m.start(kind)
        byte += len(source[pos:start].encode())
        tokens.append(Token(kind, m.group(kind), byte))
        byte += len(m.group(kind).encode())
        pos = m.end()


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


class _Parser:
    def __init__(self, source: str, variables):
        self.tokens = tokenize(source)
        self.i = 0
        self.variables = frozenset(variables)

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        if self.tok.text != text or self.tok.kind != "op":
            raise ExprSyntaxError(self._describe(), self.tok.offset, (repr(text),))
        return self.advance()

    def _describe(self) -> str:
        return "unexpected end of input" if self.tok.kind == "end" else f"unexpected token {self.tok.text!r}"

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(self._describe(), self.tok.offset, ("'+'", "'-'", "'*'", "'/'", "'^'", "end"))
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.power()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = Binary(op, node, self.power())
        return node

    def power(self):
        node = self.unary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return Binary("^", node, self.power())
        return node

    def unary(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Unary("-", self.unary())
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownIdentifier(tok.text, tok.offset)
                return self.call(tok)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in self.variables:
                return Var(tok.text)
            raise UnknownIdentifier(tok.text, tok.offset)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(self._describe(), tok.offset, ("number", "name", "'-'", "'('"))

    def call(self, name: Token):
        self.expect("(")
        args = [self.expr()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if len(args) != FUNCTIONS[name.text]:
            raise ExprSyntaxError(
                f"{name.text} takes {FUNCTIONS[name.text]} argument(s), got {len(args)}", name.offset
            )
        return Call(name.text, tuple(args))


def parse_expr(source: str, variables=DEFAULT_VARIABLES):
    """Parse ``source`` into an expression tree over the given variable names."""
    return _Parser(source, variables).parse()


def variables_of(node) -> frozenset:
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, Unary):
        return variables_of(node.operand)
    if isinstance(node, Binary):
        return variables_of(node.left) | variables_of(node.right)
    if isinstance(node, Call):
        return frozenset().union(*(variables_of(a) for a in node.args))
    return frozenset()


def _check(function, bad, arg):
    if np.any(bad):
        arg = np.asarray(arg)
        value = arg[bad][0] if arg.ndim else arg
        raise DomainError(function, float(value))


def _power(base, expo):
    base, expo = np.broadcast_arrays(np.asarray(base, dtype=float), np.asarray(expo, dtype=float))
    fractional = expo != np.round(expo)
    _check("^", (base < 0) & fractional, base)
    _check("^", (base == 0) & (expo < 0), base)
    return np.power(base, expo)


def _call(func, args):
    x = args[0]
    if func == "exp":
        return np.exp(x)
    if func == "log":
        _check("log", np.asarray(x) <= 0, x)
        return np.log(x)
    if func == "sqrt":
        _check("sqrt", np.asarray(x) < 0, x)
        return np.sqrt(x)
    if func == "sin":
        return np.sin(x)
    if func == "cos":
        return np.cos(x)
    if func == "abs":
        return np.abs(x)
    return _power(x, args[1])


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        if env.get(node.name) is None:
            raise MissingVariable(f"variable {node.name!r} not supplied")
        return env[node.name]
    if isinstance(node, Unary):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        return _call(node.func, [_eval(a, env) for a in node.args])
    left, right = _eval(node.left, env), _eval(node.right, env)
    if node.op == "+":
        return np.add(left, right)
    if node.op == "-":
        return np.subtract(left, right)
    if node.op == "*":
        return np.multiply(left, right)
    if node.op == "/":
        _check("/", np.asarray(right) == 0, right)
        return np.divide(left, right)
    return _power(left, right)


def eval_expr(node, t=None, u=None, v=None, **env):
    """Evaluate a tree; array arguments broadcast.  Scalars in, float out."""
    env.update(t=t, u=u, v=v)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = _eval(node, env)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def to_source(node) -> str:
    """Fully parenthesised source text that parses back to an equal tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Unary):
        return f"-({to_source(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_source(a) for a in node.args)})"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"


class Expr:
    """A parsed expression together with its source text."""

    def __init__(self, source: str, variables=DEFAULT_VARIABLES):
        self.source = source
        self.tree = parse_expr(source, variables)

    @classmethod
    def from_tree(cls, tree) -> "Expr":
        obj = cls.__new__(cls)
        obj.tree = tree
        obj.source = to_source(tree)
        return obj

    @property
    def variables(self) -> frozenset:
        return variables_of(self.tree)

    def __call__(self, t=None, u=None, v=None):
        return eval_expr(self.tree, t, u, v)

    def __eq__(self, other):
        return isinstance(other, Expr) and self.tree == other.tree

    def __hash__(self):
        return hash(self.tree)

    def __repr__(self):
        return f"Expr({self.source!r})"
