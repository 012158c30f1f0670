from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tt0.surface as sf
from conftest import corpus_files
from tt0.diagnostics import LexError, ParseError, SourceSpan
from tt0.surface import (
    Icit,
    Mode,
    SPi,
    SSigma,
    parse_module_text,
    parse_term_text,
    pp_module,
    pp_term,
    tokenize,
)


def kinds(source: str) -> list[str]:
    return [t.kind for t in tokenize(source)]


class TestTokenize:
    def test_mode_annotated_binder(self):
        assert kinds("(x :0 Nat) -> Nat") == [
            "(", "ident", ":0", "Nat", ")", "->", "Nat", "eof",
        ]

    def test_empty_input(self):
        assert kinds("") == ["eof"]

    def test_unsupported_glyph_position(self):
        with pytest.raises(LexError) as e:
            tokenize("λx. x")
        assert e.value.span.start_line == 1
        assert e.value.span.start_col == 1

    def test_comments_are_skipped(self):
        assert kinds("-- a comment\nzero") == ["zero", "eof"]

    def test_spans_are_one_based(self):
        toks = tokenize("let x")
        assert (toks[0].span.start_line, toks[0].span.start_col) == (1, 1)
        assert (toks[1].span.start_line, toks[1].span.start_col) == (1, 5)

    def test_arrow_not_split(self):
        assert kinds("a->b") == ["ident", "->", "ident", "eof"]


class TestParse:
    def test_identity_declaration(self):
        m = parse_module_text("let id : {A :0 U} -> A -> A = \\{A} x. x;")
        assert len(m.decls) == 1
        decl = m.decls[0]
        assert decl.name == "id"
        assert isinstance(decl.ty, SPi)
        assert decl.ty.mode is Mode.ZERO
        assert decl.ty.icit is Icit.IMPL

    def test_erased_sigma(self):
        t = parse_term_text("(n :0 Nat) * Nat")
        assert isinstance(t, SSigma)
        assert t.name == "n"
        assert t.mode is Mode.ZERO

    def test_missing_expression(self):
        with pytest.raises(ParseError) as e:
            parse_module_text("let x : Nat = ;")
        assert e.value.span is not None
        assert e.value.span.start_col == 15

    def test_arrow_right_associative(self):
        t = parse_term_text("Nat -> Nat -> Nat")
        assert isinstance(t, SPi)
        assert isinstance(t.cod, SPi)

    def test_star_binds_tighter_than_arrow(self):
        t = parse_term_text("Nat * Nat -> Nat")
        assert isinstance(t, SPi)
        assert isinstance(t.dom, SSigma)

    def test_application_left_associative(self):
        assert parse_term_text("f a b") == parse_term_text("(f a) b")

    def test_duplicate_declaration_rejected(self):
        with pytest.raises(ParseError):
            parse_module_text("let x : Nat = zero; let x : Nat = zero;")

    def test_main_must_be_last(self):
        with pytest.raises(ParseError):
            parse_module_text("main = zero; let x : Nat = zero;")

    def test_parse_error_span_inside_input(self):
        for src in ["let", "let x", "let x : Nat = (zero", "\\. x"]:
            with pytest.raises(ParseError) as e:
                parse_module_text(src)
            span = e.value.span
            assert span is not None
            lines = src.splitlines() or [""]
            assert 1 <= span.start_line <= len(lines) + 1


class TestRoundTrip:
    @pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
    def test_print_parse_round_trip(self, path):
        module = parse_module_text(path.read_text(), str(path))
        printed = pp_module(module)
        reparsed = parse_module_text(printed, str(path))
        assert reparsed == module

    def test_term_round_trip_examples(self):
        for src in [
            "\\{A} x. x",
            "(x :0 Nat) -> Nat",
            "{A :0 U} -> A -> A",
            "(k : Nat) * (w :0 Nat) * Nat",
            "natElim (\\k. Nat) n (\\k ih. succ ih) m",
            "let y : Nat = succ zero in succ y",
            "f {zero} (succ zero)",
            "fst (snd p)",
            "boolElim (\\x. Bool) b false a",
            "(x : Nat) -> (Nat -> Nat) -> Nat * Bool",
            "((n :0 Nat) * Nat) -> Nat",
            "\\(x : Nat * Nat) {y :0 U}. fst x",
        ]:
            t = parse_term_text(src)
            assert parse_term_text(pp_term(t)) == t

    @given(data=st.data())
    @settings(max_examples=150, deadline=None)
    def test_random_term_round_trip(self, data):
        t = data.draw(surface_terms(3))
        assert parse_term_text(pp_term(t)) == t


DUMMY = SourceSpan("<gen>", 1, 1, 1, 1)


def surface_terms(depth: int) -> st.SearchStrategy:
    names = st.sampled_from(["x", "y", "f"])
    modes = st.sampled_from([Mode.OMEGA, Mode.ZERO])
    leaves = st.one_of(
        names.map(lambda n: sf.SVar(DUMMY, n)),
        st.just(sf.SZero(DUMMY)),
        st.just(sf.SUniv(DUMMY)),
        st.just(sf.SNatTy(DUMMY)),
        st.just(sf.STrue(DUMMY)),
        st.just(sf.SHole(DUMMY)),
        st.integers(0, 9).map(lambda k: sf.SNum(DUMMY, k)),
    )

    def extend(sub: st.SearchStrategy) -> st.SearchStrategy:
        return st.one_of(
            sub,
            st.tuples(sub, sub).map(lambda ab: sf.SApp(DUMMY, ab[0], ab[1])),
            st.tuples(sub, sub).map(
                lambda ab: sf.SApp(DUMMY, ab[0], ab[1], Icit.IMPL)
            ),
            st.tuples(names, sub).map(
                lambda nb: sf.SLam(DUMMY, nb[0], None, None, Icit.EXPL, nb[1])
            ),
            st.tuples(names, modes, sub, sub).map(
                lambda q: sf.SLam(DUMMY, q[0], q[1], q[2], Icit.EXPL, q[3])
            ),
            st.tuples(names, modes, st.sampled_from([Icit.EXPL, Icit.IMPL]), sub, sub).map(
                lambda q: sf.SPi(DUMMY, q[0], q[1], q[2], q[3], q[4])
            ),
            st.tuples(sub, sub).map(
                lambda ab: sf.SPi(DUMMY, "_", Mode.OMEGA, Icit.EXPL, ab[0], ab[1])
            ),
            st.tuples(names, modes, sub, sub).map(
                lambda q: sf.SSigma(DUMMY, q[0], q[1], q[2], q[3])
            ),
            st.tuples(sub, sub).map(
                lambda ab: sf.SSigma(DUMMY, "_", Mode.OMEGA, ab[0], ab[1])
            ),
            st.tuples(sub, sub).map(lambda ab: sf.SPair(DUMMY, ab[0], ab[1])),
            sub.map(lambda a: sf.SFst(DUMMY, a)),
            sub.map(lambda a: sf.SSnd(DUMMY, a)),
            sub.map(lambda a: sf.SSucc(DUMMY, a)),
            st.tuples(names, sub, sub, sub).map(
                lambda q: sf.SLet(DUMMY, q[0], q[1], q[2], q[3])
            ),
            st.tuples(sub, sub, sub, sub).map(
                lambda q: sf.SNatElim(DUMMY, *q)
            ),
            st.tuples(sub, sub, sub, sub).map(
                lambda q: sf.SBoolElim(DUMMY, *q)
            ),
        )

    out = leaves
    for _ in range(depth):
        out = extend(out)
    return out
