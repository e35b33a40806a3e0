"""A small expression language for weights.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := NUMBER | 'n' | 'num' | 'den' | '(' expr ')'
            | 'exp' '(' expr ')' | 'pow' '(' expr ',' expr ')'

``n`` is the element itself on integer-encoded semigroups; ``num`` and
``den`` are the reduced numerator and denominator on rational ones.
Evaluation is exact (Fractions) until ``exp`` or a fractional ``pow``
forces the log domain; exact mode refuses that.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Tuple, Union

from .numeric import EXACT, LOG, LogScalar, ModeError
from .semigroup import FRACTION, INT, SemigroupSpec

# exact pow results larger than this many bits are refused
MAX_EXACT_BITS = 1 << 20


class WeightSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, src: str = ""):
        self.pos = pos
        self.src = src
        super().__init__(f"{message} at position {pos}")


class WeightEvalError(ValueError):
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Node", ...]


Node = Union[Num, Var, BinOp, Call]

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_]\w*)|(\S))")
_FUNCS = {"exp": 1, "pow": 2}
_VARS = {INT: {"n"}, FRACTION: {"num", "den"}}


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/(),":
                raise WeightSyntaxError(f"unexpected character {ch!r}", start, src)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, kind: Optional[str]):
        self.src = src
        self.kind = kind
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.advance()
        if tok[1] != value:
            what = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise WeightSyntaxError(f"expected {value!r}, found {what}", tok[2], self.src)

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise WeightSyntaxError(f"unexpected {tok[1]!r}", tok[2], self.src)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(Fraction(text))
        if kind == "name":
            if text in _FUNCS:
                self.expect("(")
                args = [self.expr()]
                for _ in range(_FUNCS[text] - 1):
                    self.expect(",")
                    args.append(self.expr())
                self.expect(")")
                return Call(text, tuple(args))
            allowed = _VARS.get(self.kind, {"n", "num", "den"})
            if text not in allowed:
                raise WeightSyntaxError(
                    f"unknown variable {text!r} for {self.kind or 'this'} elements", pos, self.src)
            return Var(text)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = repr(text) if kind != "end" else "end of input"
        raise WeightSyntaxError(f"unexpected {what}", pos, self.src)


@dataclass(frozen=True)
class WeightExpr:
    src: str
    tree: Node
    kind: str
    overrides: Tuple[Tuple[object, Fraction], ...] = ()

    @property
    def uses_exp(self) -> bool:
        return _has_log_op(self.tree)

    @property
    def is_constant(self) -> bool:
        return not self.overrides and not _has_var(self.tree)

    def evaluate(self, s, mode: str = EXACT):
        table = dict(self.overrides)
        if s in table:
            value = table[s]
        else:
            value = _eval(self.tree, _bind(s, self.kind), mode)
        if mode == LOG:
            value = LogScalar.from_value(value)
            if value.is_zero or not value.is_real or value.phase < 0:
                raise WeightEvalError(f"weight {self.src!r} is not positive at {s}")
            return value
        if isinstance(value, LogScalar):  # pragma: no cover - guarded in _eval
            raise ModeError("log-domain value in exact mode")
        if value <= 0:
            raise WeightEvalError(f"weight {self.src!r} is not positive at {s}")
        return value


def parse_weight_expr(src: str, spec: Optional[SemigroupSpec] = None,
                      overrides: Optional[Mapping] = None) -> WeightExpr:
    """Parse ``src`` for the element kind of ``spec``.

    ``overrides`` maps elements to literal values that replace the
    expression's value there.
    """
    if not src or not src.strip():
        raise WeightSyntaxError("empty expression", 0, src)
    kind = spec.kind if spec is not None else INT
    tree = _Parser(src, kind).parse()
    items = []
    for key, val in (overrides or {}).items():
        if isinstance(key, str):
            key = spec.parse(key) if spec is not None else int(key)
        val = Fraction(val) if not isinstance(val, Fraction) else val
        if val <= 0:
            raise WeightEvalError(f"override value for {key} must be positive")
        items.append((key, val))
    items.sort(key=lambda kv: kv[0])
    return WeightExpr(src, tree, kind, tuple(items))


def _bind(s, kind):
    if kind == FRACTION:
        f = Fraction(s)
        return {"num": Fraction(f.numerator), "den": Fraction(f.denominator)}
    return {"n": Fraction(s)}


def _has_var(node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, BinOp):
        return _has_var(node.left) or _has_var(node.right)
    if isinstance(node, Call):
        return any(_has_var(a) for a in node.args)
    return False


def _has_log_op(node) -> bool:
    if isinstance(node, Call):
        if node.func == "exp":
            return True
        return any(_has_log_op(a) for a in node.args)
    if isinstance(node, BinOp):
        return _has_log_op(node.left) or _has_log_op(node.right)
    return False


def _eval(node, env, mode):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, BinOp):
        a = _eval(node.left, env, mode)
        b = _eval(node.right, env, mode)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0:
            raise WeightEvalError("division by zero")
        return a / b
    if node.func == "exp":
        x = _eval(node.args[0], env, mode)
        if isinstance(x, LogScalar):
            x = float(x)
        if x == 0:
            return Fraction(1)
        if mode != LOG:
            raise ModeError("exp of a nonzero argument is irrational; use log mode")
        return LogScalar.exp(float(x))
    base = _eval(node.args[0], env, mode)
    k = _eval(node.args[1], env, mode)
    if isinstance(k, LogScalar):
        k = float(k)
    integral = isinstance(k, Fraction) and k.denominator == 1
    if mode == LOG:
        b = LogScalar.from_value(base)
        if integral:
            return b ** int(k)
        return b ** float(k)
    if not integral:
        raise ModeError("fractional pow is not exact; use log mode")
    k = int(k)
    if base.numerator and abs(k) * max(base.numerator.bit_length(),
                                       base.denominator.bit_length()) > MAX_EXACT_BITS:
        raise ModeError("exact pow too large; switch to log mode")
    if base == 0 and k < 0:
        raise WeightEvalError("zero to a negative power")
    return base ** k
