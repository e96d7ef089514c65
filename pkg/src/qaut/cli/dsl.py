"""Parser for the small presentation language.

    space blocks(1,2); variant q_aut; Q diag(1,1,2,2,3);

Statements end with ``;`` or a newline; ``#`` starts a comment.  See
docs/dsl.md for the grammar.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..ncalg import GaussQ
from ..presentations import (Presentation, QMatrix, appendix_presentations, aut_B_presentation,
                             aut_Mn_presentation, magic_presentation, q_variant)

__all__ = ["ParseError", "SpaceSpec", "DSLSpec", "parse_dsl", "build_presentation"]

VARIANTS = ("aut", "q_aut", "a_o_new", "a_o_old", "a_u")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


@dataclass(frozen=True)
class SpaceSpec:
    kind: str          # X | M | blocks | U
    params: tuple

    def __str__(self):
        return f"{self.kind}({','.join(map(str, self.params))})"

    @property
    def blocks(self) -> tuple:
        if self.kind == "X":
            return (1,) * self.params[0]
        if self.kind == "M":
            return (self.params[0],)
        if self.kind == "blocks":
            return self.params
        raise ValueError(f"{self} is not a finite space")


@dataclass(frozen=True)
class DSLSpec:
    space: SpaceSpec | None
    variant: str = "aut"
    Q: QMatrix | None = None

    def to_json(self) -> dict:
        return {"space": None if self.space is None else str(self.space),
                "variant": self.variant,
                "Q": None if self.Q is None else self.Q.to_json()}


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<comment>\#[^\n]*) | (?P<nl>\n)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[()\[\],;=+\-])
  | (?P<bad>.)
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokens(text: str) -> list:
    out, line, start = [], 1, 0
    for m in _TOKEN.finditer(text):
        kind, s = m.lastgroup, m.group()
        col = m.start() - start + 1
        if kind == "nl":
            out.append(_Tok(";", s, line, col))
            line, start = line + 1, m.end()
        elif kind == "bad":
            raise ParseError(f"unexpected character {s!r}", line, col)
        elif kind not in ("ws", "comment"):
            out.append(_Tok(kind if kind != "punct" else s, s, line, col))
    out.append(_Tok("eof", "", line, len(text) - start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.cur
        raise ParseError(msg, tok.line, tok.col)

    def take(self, kind: str, what: str | None = None) -> _Tok:
        if self.cur.kind != kind:
            self.fail(f"expected {what or kind!r}, found {self.cur.text or 'end of input'!r}")
        t = self.cur
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.cur.kind == kind:
            self.i += 1
            return True
        return False

    def integer(self) -> int:
        t = self.take("num", "integer")
        if not t.text.isdigit() or int(t.text) < 1:
            self.fail("expected a positive integer", t)
        return int(t.text)

    def int_list(self) -> tuple:
        self.take("(")
        vals = [self.integer()]
        while self.accept(","):
            vals.append(self.integer())
        self.take(")")
        return tuple(vals)

    def term(self) -> GaussQ:
        t = self.cur
        if t.kind == "name" and t.text == "i":
            self.i += 1
            return GaussQ(0, 1)
        num = self.take("num", "number")
        val = Fraction(num.text)
        if self.cur.kind == "name" and self.cur.text == "i":
            self.i += 1
            return GaussQ(0, val)
        return GaussQ(val)

    def number(self) -> GaussQ:
        sign = -1 if self.accept("-") else 1
        if sign == 1:
            self.accept("+")
        val = self.term() * sign
        while self.cur.kind in ("+", "-"):
            s = 1 if self.take(self.cur.kind).kind == "+" else -1
            val = val + self.term() * s
        return val

    def num_list(self, close: str) -> list:
        vals = [self.number()]
        while self.accept(","):
            vals.append(self.number())
        self.take(close)
        return vals

    def space(self) -> SpaceSpec:
        t = self.take("name", "space kind")
        if t.text in ("X", "M", "U"):
            params = self.int_list()
            if len(params) != 1:
                self.fail(f"{t.text}(...) takes one size", t)
            return SpaceSpec(t.text, params)
        if t.text == "blocks":
            return SpaceSpec("blocks", self.int_list())
        self.fail(f"unknown space {t.text!r} (expected X, M, blocks or U)", t)

    def qmatrix(self) -> QMatrix:
        t = self.take("name", "diag or matrix")
        if t.text == "diag":
            self.take("(")
            return QMatrix.diag(self.num_list(")"))
        if t.text == "matrix":
            self.take("[")
            rows = []
            while True:
                self.take("[")
                rows.append(self.num_list("]"))
                if not self.accept(","):
                    break
            self.take("]")
            if any(len(r) != len(rows) for r in rows):
                self.fail("matrix must be square", t)
            return QMatrix.of(rows)
        self.fail(f"unknown Q form {t.text!r}", t)

    def program(self) -> DSLSpec:
        space = variant = Q = None
        seen: set = set()
        while self.cur.kind != "eof":
            if self.accept(";"):
                continue
            kw = self.take("name", "statement")
            if kw.text in seen:
                self.fail(f"duplicate {kw.text!r} statement", kw)
            seen.add(kw.text)
            self.accept("=")
            if kw.text == "space":
                space = self.space()
            elif kw.text == "variant":
                v = self.take("name", "variant name")
                if v.text not in VARIANTS:
                    self.fail(f"unknown variant {v.text!r}", v)
                variant = v.text
            elif kw.text == "Q":
                Q = self.qmatrix()
            else:
                self.fail(f"unknown statement {kw.text!r}", kw)
            if self.cur.kind not in (";", "eof"):
                self.fail("expected ';'")
        return DSLSpec(space, variant or "aut", Q)


def parse_dsl(text: str) -> DSLSpec:
    return _Parser(text).program()


def build_presentation(spec: DSLSpec) -> Presentation:
    s, v = spec.space, spec.variant
    if v == "aut":
        if s is None or s.kind == "U":
            raise ValueError("variant aut needs space X(n), M(n) or blocks(...)")
        if s.kind == "X":
            return magic_presentation(s.params[0])
        if s.kind == "M":
            return aut_Mn_presentation(s.params[0])
        return aut_B_presentation(s.params)
    if v == "q_aut":
        if spec.Q is None:
            raise ValueError("variant q_aut needs a Q statement")
        if s is None or s.kind == "U":
            raise ValueError("variant q_aut needs space X(n), M(n) or blocks(...)")
        base = "B" if s.kind == "blocks" else s.kind
        return q_variant(base, s.params if base == "B" else s.params[0], spec.Q)
    if v in ("a_o_new", "a_o_old"):
        if spec.Q is None:
            raise ValueError(f"variant {v} needs a Q statement")
        return appendix_presentations(v, Q=spec.Q)
    n = s.params[0] if s is not None and s.kind in ("U", "X", "M") else None
    if n is None:
        raise ValueError("variant a_u needs space U(n)")
    return appendix_presentations("a_u", n=n)
