from __future__ import annotations

from tt0 import core as co
from tt0.core import Context, VNatTy, VZero, conv, evaluate
from tt0.surface import Icit, Mode
from tt0.translate import check_zeroing, recheck_stripped, strip_modes, sweep, zero_ctx
from tt0.unify import MetaStore

W, Z0 = Mode.OMEGA, Mode.ZERO
EX = Icit.EXPL


class TestZeroCtx:
    def test_runtime_entry_and_flag(self):
        ctx = Context().bind("x", W, VNatTy()).erased()
        z = zero_ctx(ctx)
        assert z.entries[0].mode is Z0
        assert z.flag is False
        assert z.entries[0].ty == VNatTy()

    def test_empty_context(self):
        assert zero_ctx(Context()) == Context()

    def test_idempotent(self):
        ctx = (
            Context()
            .bind("x", Z0, VNatTy())
            .define("d", W, VNatTy(), VZero())
            .erased()
        )
        once = zero_ctx(ctx)
        assert zero_ctx(once) == once


class TestCheckZeroing:
    def test_type_over_runtime_context(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy())
        check_zeroing(store, ctx.erased(), co.NatTy(), co.VUniv())

    def test_erased_judgment_transports(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy()).erased()
        check_zeroing(store, ctx, co.Var(0), VNatTy())

    def test_corpus_sweep(self, corpus):
        for result in corpus.values():
            sig = Context()
            for d in result.decls:
                check_zeroing(result.store, sig.erased(), d.ty, co.VUniv())
                check_zeroing(result.store, sig, d.body, d.ty_value)
                sig = sig.define(d.name, W, d.ty_value, d.body_value)


class TestStripModes:
    def test_pi(self):
        assert strip_modes(co.Pi("x", Z0, EX, co.NatTy(), co.NatTy())) == co.Pi(
            "x", W, EX, co.NatTy(), co.NatTy()
        )

    def test_lam(self):
        assert strip_modes(co.Lam("x", Z0, EX, co.Zero())) == co.Lam(
            "x", W, EX, co.Zero()
        )

    def test_constructor_unchanged(self):
        assert strip_modes(co.Zero()) == co.Zero()

    def test_idempotent_on_corpus(self, corpus):
        for result in corpus.values():
            for d in result.decls:
                once = strip_modes(d.body)
                assert strip_modes(once) == once

    def test_not_injective_but_conv_distinguishes(self):
        # The two function types collapse to the same stripped term while
        # remaining distinct in the mode-aware theory.
        pi0 = co.Pi("x", Z0, EX, co.NatTy(), co.NatTy())
        piw = co.Pi("x", W, EX, co.NatTy(), co.NatTy())
        assert strip_modes(pi0) == strip_modes(piw)
        assert not conv(MetaStore(), 0, evaluate((), pi0), evaluate((), piw))


class TestRecheckStripped:
    def test_identity_with_erased_type_argument(self):
        store = MetaStore()
        ty = co.Pi("A", Z0, Icit.IMPL, co.Univ(), co.Pi("x", W, EX, co.Var(0), co.Var(1)))
        body = co.Lam("A", Z0, Icit.IMPL, co.Lam("x", W, EX, co.Var(0)))
        recheck_stripped(store, Context(), strip_modes(body), strip_modes(ty))

    def test_erased_pair(self):
        store = MetaStore()
        ty = co.Sigma("n", Z0, co.NatTy(), co.NatTy())
        body = co.Pair(Z0, co.Zero(), co.Zero())
        recheck_stripped(store, Context(), strip_modes(body), strip_modes(ty))

    def test_corpus_sweep(self, corpus):
        for name, result in corpus.items():
            rows = sweep(result)
            assert all(r.zeroing_ok for r in rows), name
            assert all(r.stripping_ok for r in rows), name
