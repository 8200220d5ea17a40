"""Concrete syntax: tokenizer, recursive-descent parser and printer.

Grammar::

    term   ::= '\\' ident+ '.' term | 'lam' ident+ '.' term
             | 'mu' mident '.' term | '[' mident ']' term
             | atom+ [binder]
    atom   ::= ident | '(' term ')'
    type   ::= tatom ['->' type]
    tatom  ::= 'bot' | '_|_' | Atom | '?T' digits | '(' type ')'

``ident`` starts with a lower-case letter, ``mident`` is an apostrophe
followed by an identifier, ``Atom`` starts with an upper-case letter.
The Unicode forms ``λ``, ``μ``, ``⊥`` and ``→`` are accepted as well.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from lambdamu.syntax import (
    BOT,
    App,
    Arrow,
    Atom,
    Bot,
    Hole,
    Lam,
    LVar,
    Mu,
    Named,
    Term,
    Type,
)

KEYWORDS = {"lam", "mu", "bot"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->|→)
  | (?P<bot>_\|_|⊥)
  | (?P<lam>\\|λ)
  | (?P<mu_sym>μ)
  | (?P<hole>\?T[0-9]+)
  | (?P<mident>'[A-Za-z0-9_]+)
  | (?P<atom>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<punct>[.()\[\]])
""",
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.line = line
        self.col = col
        self.expected = expected
        where = f"{line}:{col}"
        if expected:
            message = f"{message}; expected one of {', '.join(sorted(expected))}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rindex("\n") + 1
        else:
            if kind == "ident" and text in KEYWORDS:
                kind = text
            elif kind == "mu_sym":
                kind = "mu"
            elif kind == "punct":
                kind = text
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, what: str, expected):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{what}, found {found}", t.line, t.col, frozenset(expected))

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail("unexpected token", {kind})
        t = self.tok
        self.i += 1
        return t

    def done(self):
        if self.tok.kind != "eof":
            self.fail("trailing input", {"eof"})

    # terms

    BINDER_START = {"lam", "mu", "["}
    ATOM_START = {"ident", "("}

    def term(self) -> Term:
        k = self.tok.kind
        if k in self.BINDER_START:
            return self.binder()
        if k not in self.ATOM_START:
            self.fail("expected a term", self.BINDER_START | self.ATOM_START)
        t = self.atom()
        while self.tok.kind in self.ATOM_START:
            t = App(t, self.atom())
        if self.tok.kind in self.BINDER_START:
            t = App(t, self.binder())
        return t

    def binder(self) -> Term:
        k = self.tok.kind
        if k == "lam":
            self.i += 1
            names = [self.expect("ident").text]
            while self.tok.kind == "ident":
                names.append(self.expect("ident").text)
            self.expect(".")
            body = self.term()
            for n in reversed(names):
                body = Lam(n, body)
            return body
        if k == "mu":
            self.i += 1
            name = self.expect("mident").text
            self.expect(".")
            return Mu(name, self.term())
        self.expect("[")
        name = self.expect("mident").text
        self.expect("]")
        return Named(name, self.term())

    def atom(self) -> Term:
        if self.tok.kind == "ident":
            return LVar(self.expect("ident").text)
        self.expect("(")
        t = self.term()
        self.expect(")")
        return t

    # types

    def type_(self) -> Type:
        a = self.tatom()
        if self.tok.kind == "arrow":
            self.i += 1
            return Arrow(a, self.type_())
        return a

    def tatom(self) -> Type:
        k = self.tok.kind
        if k == "bot":
            self.i += 1
            return BOT
        if k == "atom":
            return Atom(self.expect("atom").text)
        if k == "hole":
            return Hole(int(self.expect("hole").text[2:]))
        if k == "(":
            self.i += 1
            a = self.type_()
            self.expect(")")
            return a
        self.fail("expected a type", {"bot", "atom", "hole", "("})


def parse_term(src: str) -> Term:
    p = _Parser(src)
    t = p.term()
    p.done()
    return t


def parse_type(src: str) -> Type:
    p = _Parser(src)
    a = p.type_()
    p.done()
    return a


# ---------------------------------------------------------------------------
# printing


def print_term(t: Term) -> str:
    return _pt(t)


def _pt(t) -> str:
    tt = type(t)
    if tt is LVar:
        return t.name
    if tt is Lam:
        names = [t.var]
        body = t.body
        while type(body) is Lam:
            names.append(body.var)
            body = body.body
        return f"\\{' '.join(names)}. {_pt(body)}"
    if tt is Mu:
        return f"mu {t.var}. {_pt(t.body)}"
    if tt is Named:
        return f"[{t.mvar}] {_pt(t.body)}"
    f = t.fun
    fs = _pt(f)
    if type(f) in (Lam, Mu, Named):
        fs = f"({fs})"
    a = t.arg
    a_s = _pt(a)
    if type(a) is not LVar:
        a_s = f"({a_s})"
    return f"{fs} {a_s}"


def print_type(a: Type) -> str:
    if type(a) is Arrow:
        d = print_type(a.dom)
        if type(a.dom) is Arrow:
            d = f"({d})"
        return f"{d} -> {print_type(a.cod)}"
    if isinstance(a, Bot):
        return "bot"
    if isinstance(a, Hole):
        return f"?T{a.id}"
    return a.name
