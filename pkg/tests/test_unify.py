from __future__ import annotations

import pytest

from tt0 import core as co
from tt0.core import Context, VNatTy, VSucc, VZero, conv, evaluate, force, kernel_check
from tt0.diagnostics import UnifyError
from tt0.surface import Icit, Mode
from tt0.unify import (
    MetaStore,
    PartialRenaming,
    fresh_meta,
    invert,
    rename,
    solve,
    unify,
)

W, Z0 = Mode.OMEGA, Mode.ZERO
EX = Icit.EXPL


def flex(store: MetaStore, ctx: Context, ty) -> co.Value:
    return evaluate(ctx.env, fresh_meta(store, ctx, ty))


class TestFreshMeta:
    def test_empty_context_bare_meta(self):
        store = MetaStore()
        t = fresh_meta(store, Context(), VNatTy())
        assert t == co.Meta(0)
        assert store.lookup(0).entries == ()

    def test_bound_context_inserted_meta(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy())
        t = fresh_meta(store, ctx, VNatTy())
        assert t == co.InsertedMeta(0, (W,))

    def test_capture_records_mode_and_flag(self):
        store = MetaStore()
        ctx = Context().bind("x", Z0, VNatTy()).erased()
        fresh_meta(store, ctx, VNatTy())
        entry = store.lookup(0)
        assert entry.flag is True
        assert entry.entries[0].mode is Z0

    def test_defined_entries_not_in_mask(self):
        store = MetaStore()
        ctx = Context().define("d", W, VNatTy(), VZero()).bind("x", W, VNatTy())
        t = fresh_meta(store, ctx, VNatTy())
        assert t == co.InsertedMeta(0, (None, W))


class TestUnify:
    def test_ground(self):
        unify(MetaStore(), 0, VZero(), VZero())

    def test_pi_mode_mismatch(self):
        store = MetaStore()
        pi0 = evaluate((), co.Pi("x", Z0, EX, co.NatTy(), co.NatTy()))
        piw = evaluate((), co.Pi("x", W, EX, co.NatTy(), co.NatTy()))
        with pytest.raises(UnifyError, match="mode"):
            unify(store, 0, pi0, piw)

    def test_solve_pair_and_recheck(self):
        # ?m x y = (x, y)  solves to \x. \y. (x, y)
        store = MetaStore()
        sig_ty = evaluate((), co.Sigma("a", W, co.NatTy(), co.NatTy()))
        ctx = Context().bind("x", W, VNatTy()).bind("y", W, VNatTy())
        mv = flex(store, ctx, sig_ty)
        rhs = co.VPair(W, co.vvar(0), co.vvar(1))
        unify(store, ctx.depth, mv, rhs, ctx.names)
        entry = store.lookup(0)
        assert entry.solution_closed == co.Lam(
            "x", W, EX, co.Lam("y", W, EX, co.Pair(W, co.Var(1), co.Var(0)))
        )
        kernel_check(store, Context(), entry.solution_closed, entry.closed_ty_value)
        assert conv(store, ctx.depth, force(store, mv), rhs)

    def test_post_unification_convertibility(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy())
        mv = flex(store, ctx, VNatTy())
        rhs = VSucc(co.vvar(0))
        unify(store, ctx.depth, mv, rhs, ctx.names)
        assert conv(store, ctx.depth, force(store, mv), rhs)

    def test_flex_flex_distinct_solves_one_side(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy())
        m1 = flex(store, ctx, VNatTy())
        m2 = flex(store, ctx, VNatTy())
        unify(store, ctx.depth, m1, m2, ctx.names)
        assert store.lookup(0).solved or store.lookup(1).solved

    def test_spine_mismatch_same_meta(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy()).bind("y", W, VNatTy())
        m = fresh_meta(store, ctx, VNatTy())
        v1 = evaluate((co.vvar(0), co.vvar(1)), m)
        v2 = evaluate((co.vvar(1), co.vvar(0)), m)
        with pytest.raises(UnifyError, match="variables"):
            unify(store, ctx.depth, v1, v2, ctx.names)


def spine_of(v: co.Value) -> tuple[co.SpineItem, ...]:
    assert isinstance(v, co.VNeutral)
    return v.spine


class TestInvert:
    def setup_method(self):
        self.store = MetaStore()
        self.ctx = Context().bind("x", W, VNatTy()).bind("y", W, VNatTy())
        self.meta = fresh_meta(self.store, self.ctx, VNatTy())
        self.entries = self.store.lookup(0).entries

    def test_distinct_variables(self):
        v = evaluate(self.ctx.env, self.meta)
        pren, layout = invert(
            self.entries, spine_of(v), self.store, self.ctx.depth, self.ctx.names
        )
        assert pren.map == {0: (0, W), 1: (1, W)}
        assert len(layout) == 2

    def test_non_linear(self):
        x = co.vvar(0)
        v = evaluate((x, x), self.meta)
        with pytest.raises(UnifyError, match="non-linear"):
            invert(self.entries, spine_of(v), self.store, self.ctx.depth)

    def test_non_pattern_projection(self):
        spine = (co.SFst(W),)
        with pytest.raises(UnifyError, match="non-pattern"):
            invert((), spine, self.store, 1)

    def test_non_pattern_constant_argument(self):
        v = evaluate((VZero(), co.vvar(1)), self.meta)
        with pytest.raises(UnifyError, match="non-pattern"):
            invert(self.entries, spine_of(v), self.store, self.ctx.depth)


class TestRename:
    def test_occurs_check(self):
        store = MetaStore()
        m = fresh_meta(store, Context(), VNatTy())
        pren = PartialRenaming(dom=0, cod=0, map={})
        rhs = VSucc(evaluate((), m))
        with pytest.raises(UnifyError, match="occurs"):
            rename(store, 0, pren, rhs)

    def test_scope_check(self):
        store = MetaStore()
        fresh_meta(store, Context(), VNatTy())
        pren = PartialRenaming(dom=0, cod=1, map={})
        with pytest.raises(UnifyError, match="scope"):
            rename(store, 0, pren, co.vvar(0), names=("y",))

    def test_mode_check_blocks_erased_variable_at_runtime(self):
        # Meta captured outside the erased fragment must not use z :0 Nat
        # at a runtime position of its solution.
        store = MetaStore()
        ctx = Context().bind("z", Z0, VNatTy())
        m = fresh_meta(store, ctx, VNatTy())
        entry = store.lookup(0)
        assert entry.flag is False
        spine = spine_of(evaluate(ctx.env, m))
        with pytest.raises(UnifyError) as e:
            solve(store, ctx.depth, 0, spine, VSucc(co.vvar(0)), ctx.names)
        assert e.value.reason == "mode"
        assert "'z'" in e.value.message

    def test_same_solution_allowed_under_marker(self):
        store = MetaStore()
        ctx = Context().bind("z", Z0, VNatTy()).erased()
        m = fresh_meta(store, ctx, VNatTy())
        spine = spine_of(evaluate(ctx.env, m))
        solve(store, ctx.depth, 0, spine, VSucc(co.vvar(0)), ctx.names)
        assert store.lookup(0).solution_closed == co.Lam(
            "z", Z0, EX, co.Succ(co.Var(0))
        )

    def test_erased_positions_exempt_from_mode_check(self):
        # The erased variable may appear inside an erased argument of the
        # solution even when the meta itself is a runtime meta.
        store = MetaStore()
        fn_ty = evaluate((), co.Pi("a", Z0, EX, co.NatTy(), co.NatTy()))
        ctx = Context().bind("f", W, fn_ty).bind("z", Z0, VNatTy())
        m = fresh_meta(store, ctx, VNatTy())
        spine = spine_of(evaluate(ctx.env, m))
        rhs = co.vapp(co.vvar(0), Z0, EX, co.vvar(1))  # f z, argument erased
        solve(store, ctx.depth, 0, spine, rhs, ctx.names)
        assert store.lookup(0).solved


class TestSolve:
    def test_succ_solution(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy())
        m = fresh_meta(store, ctx, VNatTy())
        solve(store, 1, 0, spine_of(evaluate(ctx.env, m)), VSucc(co.vvar(0)), ("x",))
        assert store.lookup(0).solution_closed == co.Lam(
            "x", W, EX, co.Succ(co.Var(0))
        )
        assert store.lookup(0).solution_body == co.Succ(co.Var(0))

    def test_type_meta_solution(self):
        store = MetaStore()
        ctx = Context().erased()
        fresh_meta(store, ctx, co.VUniv())
        solve(store, 0, 0, (), VNatTy())
        assert store.lookup(0).solution_closed == co.NatTy()

    def test_scope_error_names_variable(self):
        store = MetaStore()
        ctx = Context().bind("x", W, VNatTy()).bind("y", W, VNatTy())
        m = fresh_meta(store, Context().bind("x", W, VNatTy()), VNatTy())
        v = evaluate((co.vvar(0),), m)
        with pytest.raises(UnifyError, match="scope.*y|y.*scope"):
            solve(store, ctx.depth, 0, spine_of(v), co.vvar(1), ctx.names)

    def test_solution_with_defined_prefix_uses_let(self):
        store = MetaStore()
        ctx = Context().define("d", W, VNatTy(), VSucc(VZero()))
        fresh_meta(store, ctx, VNatTy())
        solve(store, ctx.depth, 0, (), VSucc(VZero()))
        sol = store.lookup(0).solution_closed
        assert isinstance(sol, co.Let)
        assert store.lookup(0).solution_body == co.Succ(co.Zero())
        kernel_check(store, Context(), sol, store.lookup(0).closed_ty_value)

    def test_extra_spine_arguments_become_lambdas(self):
        # A meta of function type applied under a binder: ?m x = succ x.
        store = MetaStore()
        fn_ty = evaluate((), co.Pi("a", W, EX, co.NatTy(), co.NatTy()))
        m = fresh_meta(store, Context(), fn_ty)
        mv = co.vapp(evaluate((), m), W, EX, co.vvar(0))
        unify(store, 1, mv, VSucc(co.vvar(0)), ("x",))
        entry = store.lookup(0)
        assert entry.solution_closed == co.Lam("x", W, EX, co.Succ(co.Var(0)))
        kernel_check(store, Context(), entry.solution_closed, entry.closed_ty_value)


class TestSolutionSoundness:
    def test_every_committed_solution_kernel_checks(self, corpus):
        total = 0
        for result in corpus.values():
            for entry in result.store:
                assert entry.solved
                kernel_check(
                    result.store,
                    Context(flag=entry.flag),
                    entry.solution_closed,
                    entry.closed_ty_value,
                )
                total += 1
        assert total > 0
