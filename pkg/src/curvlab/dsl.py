"""Parser for the kernel expression language.

Grammar (``^`` binds tighter than ``*``)::

    expr   := power ('*' power)*
    power  := factor ('^' number)*
    factor := atom | 'contract' '(' expr ')' | '(' expr ')'
    atom   := 'szego' | 'szego_poly' '(' int ')' | 'da' '(' int ')'
            | 'diag' '(' '[' number (',' number)* ']' [';' 'tail' '=' number] ')'
            | 'detball2' | 'const' '(' number ')'
    number := ['+' | '-'] decimal ['/' decimal]

Examples: ``diag([8,16]; tail=15)``, ``contract(szego * diag([1,1,1/4]; tail=1))``,
``da(2)^0.5``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from curvlab.kernels import (Constant, Contract, DetBall2, Diagonal, DomainError, DruryArveson, Kernel, Power,
                             Product, SzegoDisc, SzegoPolydisc)


class DSLError(ValueError):
    pass


class DSLSyntaxError(DSLError):
    def __init__(self, text: str, pos: int, expected, found: str):
        self.text = text
        self.pos = pos
        self.expected = frozenset(expected)
        self.found = found
        want = ", ".join(sorted(self.expected))
        super().__init__(f"syntax error at position {pos}: expected one of {{{want}}}, found {found!r}\n"
                         f"  {text}\n  {' ' * pos}^")


class DSLDomainError(DSLError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[()\[\];=*^,/+-]))")

_NULLARY = {"szego": SzegoDisc, "detball2": DetBall2}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op" or "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            out.append(_Tok("end", "<end>", pos))
            return out
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise DSLSyntaxError(text, pos, {"number", "name", "operator"}, text[pos])
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected):
        raise DSLSyntaxError(self.text, self.tok.pos, expected, self.tok.text)

    def eat(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind == "num":
            self.fail({text})
        tok = self.tok
        self.i += 1
        return tok

    def peek(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "num"

    def parse(self) -> Kernel:
        k = self.expr()
        if self.tok.kind != "end":
            self.fail({"*", "^", "<end>"})
        return k

    def expr(self) -> Kernel:
        k = self.power()
        while self.peek("*"):
            pos = self.tok.pos
            self.i += 1
            right = self.power()
            try:
                k = Product(k, right)
            except DomainError as exc:
                raise DSLDomainError(f"at position {pos}: {exc}") from exc
        return k

    def power(self) -> Kernel:
        k = self.factor()
        while self.peek("^"):
            self.i += 1
            k = Power(k, self.number())
        return k

    def factor(self) -> Kernel:
        tok = self.tok
        if self.peek("("):
            self.i += 1
            k = self.expr()
            self.eat(")")
            return k
        if tok.kind != "name":
            self.fail({"(", "szego", "szego_poly", "da", "diag", "detball2", "const", "contract"})
        self.i += 1
        name = tok.text
        if name in _NULLARY:
            return _NULLARY[name]()
        if name in ("szego_poly", "da"):
            self.eat("(")
            m = self.integer()
            self.eat(")")
            return SzegoPolydisc(m) if name == "szego_poly" else DruryArveson(m)
        if name == "const":
            self.eat("(")
            c = self.number()
            self.eat(")")
            return Constant(c)
        if name == "diag":
            return self.diag()
        if name == "contract":
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            try:
                return Contract(inner)
            except DomainError as exc:
                raise DSLDomainError(f"at position {tok.pos}: {exc}") from exc
        self.i -= 1
        self.fail({"szego", "szego_poly", "da", "diag", "detball2", "const", "contract"})

    def diag(self) -> Kernel:
        self.eat("(")
        self.eat("[")
        coeffs = [self.number()]
        while self.peek(","):
            self.i += 1
            coeffs.append(self.number())
        self.eat("]")
        tail = 0.0
        if self.peek(";"):
            self.i += 1
            self.eat("tail")
            self.eat("=")
            tail = self.number()
        elif not self.peek(")"):
            self.fail({";", ")"})
        self.eat(")")
        return Diagonal(tuple(coeffs), tail)

    def integer(self) -> int:
        tok = self.tok
        if tok.kind != "num" or not tok.text.isdigit() or int(tok.text) < 1:
            self.fail({"positive integer"})
        self.i += 1
        return int(tok.text)

    def number(self) -> float:
        sign = 1.0
        if self.peek("-") or self.peek("+"):
            sign = -1.0 if self.tok.text == "-" else 1.0
            self.i += 1
        if self.tok.kind != "num":
            self.fail({"number"})
        value = float(self.tok.text)
        self.i += 1
        if self.peek("/"):
            self.i += 1
            if self.tok.kind != "num":
                self.fail({"number"})
            denom = float(self.tok.text)
            if denom == 0:
                self.fail({"non-zero number"})
            value /= denom
            self.i += 1
        return sign * value


def parse_kernel(text: str) -> Kernel:
    """Parse a kernel expression; raises :class:`DSLSyntaxError` or :class:`DSLDomainError`."""
    return _Parser(text).parse()


parse_kernel_dsl = parse_kernel
