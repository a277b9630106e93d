"""Parser for form expressions.

Grammar (``+`` is the orthogonal sum, ``*`` the tensor product and binds
tighter; both are left associative)::

    form  := term { "+" term }
    term  := atom { "*" atom }
    atom  := "<" [class {"," class}] ">"      diagonal form (``<>`` is the zero form)
           | "<<" [class {"," class}] ">>"    Pfister form
           | class "*" atom                   scaling
           | "-" atom                         negation
           | "(" form ")"
           | "H"                              hyperbolic plane <1,-1>
           | int "x" atom                     repetition
    class := ["-"] factor {"*" factor},  factor := "1" | "s" | variable
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ValidationError
from .forms import Form, PfisterSpec, hyperbolic, negate, perp, pfister, scale, tensor
from .squareclass import QUADCLOSED, FieldTower, factor_bits

_TOKEN = re.compile(r"\s*(?:(<<|>>|[<>,+*\-()])|(\d+)|([A-Za-z_][A-Za-z0-9_]*))")


class FormParseError(ValidationError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # "sym", "int", "name" or "end"
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    i = 0
    while True:
        while i < len(src) and src[i].isspace():
            i += 1
        if i == len(src):
            out.append(Token("end", "", i))
            return out
        m = _TOKEN.match(src, i)
        if not m:
            raise _error(src, i, f"unexpected character {src[i]!r}")
        start = m.start(m.lastindex)
        kind = {1: "sym", 2: "int", 3: "name"}[m.lastindex]
        out.append(Token(kind, m.group(m.lastindex), start))
        i = m.end()


def _error(src: str, pos: int, message: str) -> FormParseError:
    line = src.count("\n", 0, pos) + 1
    column = pos - (src.rfind("\n", 0, pos) + 1) + 1
    return FormParseError(message, line, column)


class _Parser:
    def __init__(self, src: str, field: FieldTower, syntax_only: bool = False):
        self.src = src
        self.field = field
        self.syntax_only = syntax_only
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise _error(self.src, tok.pos, message)

    def eat(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind == "end":
            found = repr(self.tok.text) if self.tok.kind != "end" else "end of input"
            self.fail(f"expected {text!r}, found {found}")
        tok = self.tok
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind == "sym" and self.tok.text == text

    def parse(self) -> Form:
        f = self.form()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return f

    def form(self) -> Form:
        f = self.term()
        while self.at("+"):
            self.i += 1
            f = perp(f, self.term())
        return f

    def term(self) -> Form:
        f = self.atom()
        while self.at("*"):
            self.i += 1
            f = tensor(f, self.atom())
        return f

    def atom(self) -> Form:
        tok = self.tok
        if self.at("<"):
            self.i += 1
            bits = self.class_list(">")
            return Form(self.field, tuple(bits))
        if self.at("<<"):
            self.i += 1
            bits = self.class_list(">>")
            return pfister(PfisterSpec(self.field, tuple(bits)))
        if self.at("-"):
            self.i += 1
            return negate(self.atom())
        if self.at("("):
            self.i += 1
            f = self.form()
            self.eat(")")
            return f
        if tok.kind == "name" and tok.text == "H":
            self.i += 1
            return hyperbolic(self.field)
        if tok.kind == "int" and self.peek().kind == "name" and self.peek().text == "x":
            self.i += 2
            f = self.atom()
            return Form(self.field, f.entries * int(tok.text))
        if tok.kind in ("int", "name"):
            bits = self.class_factors()
            self.eat("*")
            return scale(bits, self.atom())
        if tok.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {tok.text!r}")

    def class_list(self, close: str) -> list[int]:
        bits = []
        if self.at(close):
            self.i += 1
            return bits
        while True:
            bits.append(self.class_literal())
            if self.at(","):
                self.i += 1
                continue
            self.eat(close)
            return bits

    def class_literal(self) -> int:
        bits = 0
        if self.at("-"):
            self.i += 1
            bits = self.field.minus_one_bits
        return bits ^ self.class_factors()

    def class_factors(self) -> int:
        bits = self.factor()
        # a "*" continues the class only when a factor (not an atom) follows
        while self.at("*") and self.peek().kind in ("int", "name") and not self._starts_atom(1):
            self.i += 1
            bits ^= self.factor()
        return bits

    def _starts_atom(self, k: int) -> bool:
        tok = self.peek(k)
        if tok.kind == "name" and tok.text == "H":
            return True
        return tok.kind == "int" and self.peek(k + 1).kind == "name" and self.peek(k + 1).text == "x"

    def factor(self) -> int:
        tok = self.tok
        if tok.kind not in ("int", "name"):
            self.fail("expected a square-class factor")
        if tok.kind == "int" and tok.text != "1":
            self.fail(f"bad square-class factor {tok.text!r}")
        if self.syntax_only:
            self.i += 1
            return 0
        try:
            bits = factor_bits(tok.text, self.field)
        except ValidationError as e:
            self.fail(str(e), tok)
        self.i += 1
        return bits


def parse_form(src: str, field: FieldTower) -> Form:
    return _Parser(src, field).parse()


def check_syntax(src: str):
    """Raise :class:`FormParseError` if ``src`` is not a well-formed expression.

    Variable names are not checked, so this works without a field descriptor.
    """
    _Parser(src, FieldTower(QUADCLOSED), syntax_only=True).parse()
