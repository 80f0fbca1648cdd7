"""Parser for source fragments in the Python-style subset grammar.

Catalog files store statement payloads as plain source text ("x = x + 10",
"x > 5 and y > 10", "3" for a counted loop bound); this module turns them
back into AST values. Rendering the same payloads lives in ``render``; the
two sides round-trip.
"""

from __future__ import annotations

import re

from .errors import FragmentParseError
from .model import (
    Assign,
    BinOp,
    BoolOp,
    BoolVar,
    Comparison,
    CountedBound,
    Expr,
    Lit,
    LoopBound,
    Predicate,
    Var,
)

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<int>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|==|!=|<|>|[-+*%()=])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FragmentParseError(f"unexpected character {text[pos]!r}", pos=pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> tuple[str, str, int]:
        tok = self.next()
        if tok[0] != kind or (text is not None and tok[1] != text):
            want = text if text is not None else kind
            raise FragmentParseError(f"expected {want!r}, got {tok[1]!r}", pos=tok[2])
        return tok

    def at_end(self) -> bool:
        return self.peek()[0] == "eof"

    def finish(self) -> None:
        tok = self.peek()
        if tok[0] != "eof":
            raise FragmentParseError(f"trailing input {tok[1]!r}", pos=tok[2])

    # expressions: additive > multiplicative > factor

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.next()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "%")):
            op = self.next()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        kind, text, pos = self.peek()
        if kind == "int":
            self.next()
            return Lit(int(text))
        if kind == "op" and text == "-":
            self.next()
            tok = self.expect("int")
            return Lit(-int(tok[1]))
        if kind == "name":
            self.next()
            return Var(text)
        if kind == "op" and text == "(":
            self.next()
            node = self.expr()
            self.expect("op", ")")
            return node
        raise FragmentParseError(f"expected expression, got {text!r}", pos=pos)

    # predicates: or > and > atom

    def predicate(self) -> Predicate:
        parts = [self.and_level()]
        while self.peek()[:2] == ("name", "or"):
            self.next()
            parts.append(self.and_level())
        if len(parts) == 1:
            return parts[0]
        return BoolOp("or", tuple(parts))

    def and_level(self) -> Predicate:
        parts = [self.pred_atom()]
        while self.peek()[:2] == ("name", "and"):
            self.next()
            parts.append(self.pred_atom())
        if len(parts) == 1:
            return parts[0]
        return BoolOp("and", tuple(parts))

    def pred_atom(self) -> Predicate:
        # A parenthesized atom is ambiguous between a grouped predicate and a
        # grouped arithmetic expression; try the predicate reading first and
        # fall back when what follows the ")" says otherwise.
        if self.peek()[:2] == ("op", "("):
            mark = self.i
            self.next()
            try:
                inner = self.predicate()
                self.expect("op", ")")
            except FragmentParseError:
                self.i = mark
            else:
                nxt = self.peek()
                follows_pred = nxt[0] == "eof" or nxt[:2] in (
                    ("name", "and"),
                    ("name", "or"),
                    ("op", ")"),
                )
                if follows_pred and isinstance(inner, (Comparison, BoolOp)):
                    return inner
                self.i = mark
        left = self.expr()
        kind, text, pos = self.peek()
        if kind == "op" and text in ("==", "!=", ">", "<", ">=", "<="):
            self.next()
            right = self.expr()
            return Comparison(text, left, right)
        if isinstance(left, Var):
            return BoolVar(left.name)
        raise FragmentParseError(f"expected comparison operator, got {text!r}", pos=pos)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    p.finish()
    return node


def parse_predicate(text: str) -> Predicate:
    p = _Parser(text)
    node = p.predicate()
    p.finish()
    return node


def parse_assign(text: str) -> Assign:
    p = _Parser(text)
    name = p.expect("name")[1]
    p.expect("op", "=")
    expr = p.expr()
    p.finish()
    return Assign(name, expr)


def parse_loop_bound(text: str) -> LoopBound:
    """A bare integer is a counted bound; anything else must be a predicate."""
    stripped = text.strip()
    if re.fullmatch(r"\d+", stripped):
        return CountedBound(int(stripped))
    return parse_predicate(text)
