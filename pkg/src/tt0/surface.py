"""Surface syntax for `.tt0` files: lexer, parser and printer.

Binders carry an erasure mode: `(x : A) -> B` is a runtime function,
`(x :0 A) -> B` an erased-domain one, `{x : A} -> B` / `{x :0 A} -> B` the
implicit variants, and `(x :0 A) * B` an erased-first-component pair type.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .diagnostics import LexError, ParseError, SourceSpan


class Mode(enum.Enum):
    """Erasure mode of a binder or argument: erased (0) or runtime (omega)."""

    ZERO = "0"
    OMEGA = "w"

    def __str__(self) -> str:
        return "0" if self is Mode.ZERO else "ω"


class Icit(enum.Enum):
    EXPL = "explicit"
    IMPL = "implicit"


# ---------------------------------------------------------------------------
# Tokens


KEYWORDS = (
    "let",
    "in",
    "U",
    "Nat",
    "Bool",
    "zero",
    "succ",
    "natElim",
    "true",
    "false",
    "boolElim",
    "fst",
    "snd",
    "main",
)

PUNCT = ("(", ")", "{", "}", "\\", ".", ":0", ":", "->", "*", ",", ";", "=", "_")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword, punctuation symbol, "ident", "number", "eof"
    text: str
    span: SourceSpan
    value: int | None = None  # set for number tokens


def tokenize(source: str, filename: str = "<input>") -> list[Token]:
    """Split source text into tokens; raises LexError on an illegal character."""
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)

    def span(l0: int, c0: int, l1: int, c1: int) -> SourceSpan:
        return SourceSpan(filename, l0, c0, l1, c1)

    digits = "0123456789"
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    ident_chars = letters + digits + "_'"

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        l0, c0 = line, col
        if c in digits:
            j = i
            while j < n and source[j] in digits:
                j += 1
            text = source[i:j]
            col += j - i
            toks.append(Token("number", text, span(l0, c0, line, col - 1), int(text)))
            i = j
            continue
        if c in letters:
            j = i
            while j < n and source[j] in ident_chars:
                j += 1
            text = source[i:j]
            col += j - i
            kind = text if text in KEYWORDS else "ident"
            toks.append(Token(kind, text, span(l0, c0, line, col - 1)))
            i = j
            continue
        if c == ":" and i + 1 < n and source[i + 1] == "0" and not (
            i + 2 < n and source[i + 2] in digits
        ):
            toks.append(Token(":0", ":0", span(l0, c0, line, col + 1)))
            i += 2
            col += 2
            continue
        if source.startswith("->", i):
            toks.append(Token("->", "->", span(l0, c0, line, col + 1)))
            i += 2
            col += 2
            continue
        if c in "(){}\\.:*,;=_":
            toks.append(Token(c, c, span(l0, c0, line, col)))
            i += 1
            col += 1
            continue
        raise LexError(f"illegal character {c!r}", span(l0, c0, line, col))

    toks.append(Token("eof", "", span(line, col, line, col)))
    return toks


# ---------------------------------------------------------------------------
# Surface AST.  Spans never participate in equality: two parses of the same
# text are `==` even if whitespace differs.


@dataclass(frozen=True)
class Surface:
    span: SourceSpan = field(compare=False, repr=False)


@dataclass(frozen=True)
class SVar(Surface):
    name: str = ""


@dataclass(frozen=True)
class SLam(Surface):
    name: str = ""
    mode: Mode | None = None
    ann: Surface | None = None
    icit: Icit = Icit.EXPL
    body: Surface | None = None


@dataclass(frozen=True)
class SApp(Surface):
    fn: Surface | None = None
    arg: Surface | None = None
    icit: Icit = Icit.EXPL


@dataclass(frozen=True)
class SPi(Surface):
    name: str = "_"
    mode: Mode = Mode.OMEGA
    icit: Icit = Icit.EXPL
    dom: Surface | None = None
    cod: Surface | None = None


@dataclass(frozen=True)
class SSigma(Surface):
    name: str = "_"
    mode: Mode = Mode.OMEGA
    fst_ty: Surface | None = None
    snd_ty: Surface | None = None


@dataclass(frozen=True)
class SPair(Surface):
    fst: Surface | None = None
    snd: Surface | None = None


@dataclass(frozen=True)
class SFst(Surface):
    arg: Surface | None = None


@dataclass(frozen=True)
class SSnd(Surface):
    arg: Surface | None = None


@dataclass(frozen=True)
class SLet(Surface):
    name: str = ""
    ty: Surface | None = None
    defn: Surface | None = None
    body: Surface | None = None


@dataclass(frozen=True)
class SUniv(Surface):
    pass


@dataclass(frozen=True)
class SNatTy(Surface):
    pass


@dataclass(frozen=True)
class SNum(Surface):
    value: int = 0


@dataclass(frozen=True)
class SZero(Surface):
    pass


@dataclass(frozen=True)
class SSucc(Surface):
    arg: Surface | None = None


@dataclass(frozen=True)
class SNatElim(Surface):
    motive: Surface | None = None
    zcase: Surface | None = None
    scase: Surface | None = None
    scrut: Surface | None = None


@dataclass(frozen=True)
class SBoolTy(Surface):
    pass


@dataclass(frozen=True)
class STrue(Surface):
    pass


@dataclass(frozen=True)
class SFalse(Surface):
    pass


@dataclass(frozen=True)
class SBoolElim(Surface):
    motive: Surface | None = None
    tcase: Surface | None = None
    fcase: Surface | None = None
    scrut: Surface | None = None


@dataclass(frozen=True)
class SHole(Surface):
    pass


@dataclass(frozen=True)
class Decl:
    span: SourceSpan = field(compare=False, repr=False)
    name: str = ""
    ty: Surface | None = None
    body: Surface | None = None


@dataclass(frozen=True)
class Module:
    span: SourceSpan = field(compare=False, repr=False)
    decls: tuple[Decl, ...] = ()
    main: Surface | None = None


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"unexpected {describe(t)}", t.span, expected=(kind,))
        return self.next()

    # -- module -------------------------------------------------------------

    def module(self) -> Module:
        start = self.peek().span
        decls: list[Decl] = []
        names: set[str] = set()
        main: Surface | None = None
        while True:
            t = self.peek()
            if t.kind == "eof":
                break
            if t.kind == "main":
                self.next()
                self.expect("=")
                main = self.term()
                self.expect(";")
                trailing = self.peek()
                if trailing.kind != "eof":
                    raise ParseError(
                        f"unexpected {describe(trailing)} after main expression",
                        trailing.span,
                        expected=("eof",),
                    )
                break
            if t.kind != "let":
                raise ParseError(
                    f"unexpected {describe(t)}", t.span, expected=("let", "main")
                )
            self.next()
            name = self.binder_name()
            self.expect(":")
            ty = self.term()
            self.expect("=")
            body = self.term()
            end = self.expect(";")
            if name.text in names:
                raise ParseError(f"duplicate declaration {name.text!r}", name.span)
            names.add(name.text)
            decls.append(
                Decl(name.span.merge(end.span), name.text, ty, body)
            )
        end_span = self.peek().span
        return Module(start.merge(end_span), tuple(decls), main)

    def binder_name(self) -> Token:
        t = self.peek()
        if t.kind in ("ident", "_"):
            return self.next()
        raise ParseError(f"unexpected {describe(t)}", t.span, expected=("identifier",))

    # -- terms --------------------------------------------------------------

    def term(self) -> Surface:
        t = self.peek()
        if t.kind == "\\":
            return self.lam()
        if t.kind == "let":
            return self.let_in()
        return self.fun()

    def lam(self) -> Surface:
        start = self.expect("\\").span
        binders: list[tuple[Token, Mode | None, Surface | None, Icit]] = []
        while self.peek().kind != ".":
            binders.append(self.lam_binder())
        if not binders:
            raise ParseError("lambda needs at least one binder", self.peek().span)
        self.expect(".")
        body = self.term()
        for name, mode, ann, icit in reversed(binders):
            body = SLam(start.merge(body.span), name.text, mode, ann, icit, body)
        return body

    def lam_binder(self) -> tuple[Token, Mode | None, Surface | None, Icit]:
        t = self.peek()
        if t.kind in ("ident", "_"):
            return self.next(), None, None, Icit.EXPL
        if t.kind in ("(", "{"):
            close = ")" if t.kind == "(" else "}"
            icit = Icit.EXPL if t.kind == "(" else Icit.IMPL
            self.next()
            name = self.binder_name()
            mode: Mode | None = None
            ann: Surface | None = None
            if self.peek().kind in (":", ":0"):
                mode = Mode.ZERO if self.next().kind == ":0" else Mode.OMEGA
                ann = self.term()
            elif icit is Icit.EXPL:
                raise ParseError(
                    "parenthesised lambda binder needs a type annotation",
                    self.peek().span,
                    expected=(":", ":0"),
                )
            self.expect(close)
            return name, mode, ann, icit
        raise ParseError(
            f"unexpected {describe(t)} in lambda binder",
            t.span,
            expected=("identifier", "(", "{"),
        )

    def let_in(self) -> Surface:
        start = self.expect("let").span
        name = self.binder_name()
        self.expect(":")
        ty = self.term()
        self.expect("=")
        defn = self.term()
        self.expect("in")
        body = self.term()
        return SLet(start.merge(body.span), name.text, ty, defn, body)

    def binder_group_ahead(self) -> bool:
        # `( x :` / `( x :0` / `{ x :` ... opens a Pi or Sigma binder.
        return self.peek().kind in ("(", "{") and self.peek(1).kind in (
            "ident",
            "_",
        ) and self.peek(2).kind in (":", ":0")

    def fun(self) -> Surface:
        if self.binder_group_ahead():
            return self.binder_form()
        lhs = self.sigma()
        if self.peek().kind == "->":
            self.next()
            cod = self.fun()
            return SPi(lhs.span.merge(cod.span), "_", Mode.OMEGA, Icit.EXPL, lhs, cod)
        return lhs

    def binder_form(self) -> Surface:
        opener = self.next()
        icit = Icit.EXPL if opener.kind == "(" else Icit.IMPL
        close = ")" if opener.kind == "(" else "}"
        name = self.binder_name()
        mode = Mode.ZERO if self.next().kind == ":0" else Mode.OMEGA
        dom = self.term()
        self.expect(close)
        t = self.peek()
        if t.kind == "->":
            self.next()
            cod = self.fun()
            return SPi(opener.span.merge(cod.span), name.text, mode, icit, dom, cod)
        if t.kind == "*" and icit is Icit.EXPL:
            self.next()
            snd = self.sigma_component()
            sig = SSigma(opener.span.merge(snd.span), name.text, mode, dom, snd)
            if self.peek().kind == "->":
                self.next()
                cod = self.fun()
                return SPi(sig.span.merge(cod.span), "_", Mode.OMEGA, Icit.EXPL, sig, cod)
            return sig
        raise ParseError(
            f"unexpected {describe(t)} after binder",
            t.span,
            expected=("->",) if icit is Icit.IMPL else ("->", "*"),
        )

    def sigma(self) -> Surface:
        lhs = self.app()
        if self.peek().kind == "*":
            self.next()
            snd = self.sigma_component()
            return SSigma(lhs.span.merge(snd.span), "_", Mode.OMEGA, lhs, snd)
        return lhs

    def sigma_component(self) -> Surface:
        # The right operand of `*` may itself be a binder form, so that
        # `(k : Nat) * (w :0 Nat) * Nat` nests to the right.
        if self.binder_group_ahead():
            return self.binder_form()
        return self.sigma()

    _ATOM_STARTERS = (
        "ident",
        "number",
        "_",
        "(",
        "U",
        "Nat",
        "Bool",
        "zero",
        "true",
        "false",
        "succ",
        "fst",
        "snd",
        "natElim",
        "boolElim",
    )

    def app(self) -> Surface:
        head = self.atom()
        while True:
            t = self.peek()
            if t.kind == "{":
                # Implicit argument; a `{x : A}` binder group cannot appear
                # in argument position, so no ambiguity with implicit Pi.
                if self.binder_group_ahead():
                    break
                self.next()
                arg = self.term()
                end = self.expect("}")
                head = SApp(head.span.merge(end.span), head, arg, Icit.IMPL)
            elif t.kind in self._ATOM_STARTERS:
                if t.kind == "(" and self.binder_group_ahead():
                    break
                arg = self.atom()
                head = SApp(head.span.merge(arg.span), head, arg, Icit.EXPL)
            else:
                break
        return head

    def atom(self) -> Surface:
        t = self.peek()
        match t.kind:
            case "ident":
                self.next()
                return SVar(t.span, t.text)
            case "number":
                self.next()
                assert t.value is not None
                return SNum(t.span, t.value)
            case "_":
                self.next()
                return SHole(t.span)
            case "U":
                self.next()
                return SUniv(t.span)
            case "Nat":
                self.next()
                return SNatTy(t.span)
            case "Bool":
                self.next()
                return SBoolTy(t.span)
            case "zero":
                self.next()
                return SZero(t.span)
            case "true":
                self.next()
                return STrue(t.span)
            case "false":
                self.next()
                return SFalse(t.span)
            case "succ":
                self.next()
                arg = self.atom()
                return SSucc(t.span.merge(arg.span), arg)
            case "fst":
                self.next()
                arg = self.atom()
                return SFst(t.span.merge(arg.span), arg)
            case "snd":
                self.next()
                arg = self.atom()
                return SSnd(t.span.merge(arg.span), arg)
            case "natElim":
                self.next()
                motive, z, s, n = (self.atom() for _ in range(4))
                return SNatElim(t.span.merge(n.span), motive, z, s, n)
            case "boolElim":
                self.next()
                motive, a, b, c = (self.atom() for _ in range(4))
                return SBoolElim(t.span.merge(c.span), motive, a, b, c)
            case "(":
                self.next()
                inner = self.term()
                if self.peek().kind == ",":
                    self.next()
                    snd = self.term()
                    end = self.expect(")")
                    return SPair(t.span.merge(end.span), inner, snd)
                self.expect(")")
                return inner
            case _:
                raise ParseError(
                    f"unexpected {describe(t)}", t.span, expected=("term",)
                )


def describe(t: Token) -> str:
    return "end of input" if t.kind == "eof" else f"{t.text!r}"


def parse_module(tokens: list[Token]) -> Module:
    return _Parser(tokens).module()


def parse_module_text(source: str, filename: str = "<input>") -> Module:
    return parse_module(tokenize(source, filename))


def parse_term_text(source: str, filename: str = "<input>") -> Surface:
    p = _Parser(tokenize(source, filename))
    t = p.term()
    p.expect("eof")
    return t


# ---------------------------------------------------------------------------
# Printer.  Printing a module and re-parsing it yields an equal Module.


def _mode_colon(mode: Mode | None) -> str:
    return ":0" if mode is Mode.ZERO else ":"


def pp_term(t: Surface, prec: int = 0) -> str:
    # prec levels: 0 term (lambda/let/pi), 1 sigma, 2 application, 3 atom
    match t:
        case SVar(name=x):
            return x
        case SNum(value=v):
            return str(v)
        case SHole():
            return "_"
        case SUniv():
            return "U"
        case SNatTy():
            return "Nat"
        case SBoolTy():
            return "Bool"
        case SZero():
            return "zero"
        case STrue():
            return "true"
        case SFalse():
            return "false"
        case SSucc(arg=a):
            return _wrap(f"succ {pp_term(a, 3)}", prec, 2)
        case SFst(arg=a):
            return _wrap(f"fst {pp_term(a, 3)}", prec, 2)
        case SSnd(arg=a):
            return _wrap(f"snd {pp_term(a, 3)}", prec, 2)
        case SNatElim(motive=p, zcase=z, scase=s, scrut=n):
            parts = " ".join(pp_term(u, 3) for u in (p, z, s, n))
            return _wrap(f"natElim {parts}", prec, 2)
        case SBoolElim(motive=p, tcase=a, fcase=b, scrut=c):
            parts = " ".join(pp_term(u, 3) for u in (p, a, b, c))
            return _wrap(f"boolElim {parts}", prec, 2)
        case SApp(fn=f, arg=a, icit=icit):
            if icit is Icit.IMPL:
                return _wrap(f"{pp_term(f, 2)} {{{pp_term(a, 0)}}}", prec, 2)
            return _wrap(f"{pp_term(f, 2)} {pp_term(a, 3)}", prec, 2)
        case SPair(fst=a, snd=b):
            return f"({pp_term(a, 0)}, {pp_term(b, 0)})"
        case SLam(name=x, mode=mode, ann=ann, icit=icit, body=b):
            if ann is not None:
                open_, close = ("{", "}") if icit is Icit.IMPL else ("(", ")")
                binder = f"{open_}{x} {_mode_colon(mode)} {pp_term(ann, 0)}{close}"
            elif icit is Icit.IMPL:
                binder = f"{{{x}}}"
            else:
                binder = x
            return _wrap(f"\\{binder}. {pp_term(b, 0)}", prec, 0)
        case SLet(name=x, ty=ty, defn=d, body=b):
            return _wrap(
                f"let {x} : {pp_term(ty, 0)} = {pp_term(d, 0)} in {pp_term(b, 0)}",
                prec,
                0,
            )
        case SPi(name=x, mode=mode, icit=icit, dom=dom, cod=cod):
            if icit is Icit.EXPL and x == "_" and mode is Mode.OMEGA:
                return _wrap(f"{pp_term(dom, 1)} -> {pp_term(cod, 0)}", prec, 0)
            open_, close = ("{", "}") if icit is Icit.IMPL else ("(", ")")
            binder = f"{open_}{x} {_mode_colon(mode)} {pp_term(dom, 0)}{close}"
            return _wrap(f"{binder} -> {pp_term(cod, 0)}", prec, 0)
        case SSigma(name=x, mode=mode, fst_ty=a, snd_ty=b):
            if x == "_" and mode is Mode.OMEGA:
                return _wrap(f"{pp_term(a, 2)} * {pp_term(b, 1)}", prec, 1)
            binder = f"({x} {_mode_colon(mode)} {pp_term(a, 0)})"
            return _wrap(f"{binder} * {pp_term(b, 1)}", prec, 1)
    raise AssertionError(f"unhandled surface node {t!r}")


def _wrap(s: str, prec: int, at: int) -> str:
    return f"({s})" if prec > at else s


def pp_module(m: Module) -> str:
    lines = [
        f"let {d.name} : {pp_term(d.ty, 0)} = {pp_term(d.body, 0)};" for d in m.decls
    ]
    if m.main is not None:
        lines.append(f"main = {pp_term(m.main, 0)};")
    return "\n".join(lines) + "\n"
