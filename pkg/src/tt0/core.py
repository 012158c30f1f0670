"""Core calculus: mode-annotated terms, NbE values, conversion, kernel.

Terms use de Bruijn indices, values use de Bruijn levels.  Eliminations
(App/Pair/Fst/Snd) record the mode of the Pi/Sigma they interact with; the
extraction pass consumes those annotations.

The erasure marker is represented by one boolean flag on the context: a
judgment checked with the flag set is an erased judgment, and erased
resources (mode-0 variables, type codes, erased projections) are usable
exactly when the flag is set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterator

from .diagnostics import InternalError, KernelError
from .surface import Icit, Mode

if TYPE_CHECKING:
    from .unify import MetaStore


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    ix: int


@dataclass(frozen=True)
class Lam(Term):
    name: str = field(compare=False)
    mode: Mode
    icit: Icit
    body: Term


@dataclass(frozen=True)
class App(Term):
    mode: Mode
    icit: Icit
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pi(Term):
    name: str = field(compare=False)
    mode: Mode
    icit: Icit
    dom: Term
    cod: Term


@dataclass(frozen=True)
class Sigma(Term):
    name: str = field(compare=False)
    mode: Mode
    fst_ty: Term
    snd_ty: Term


@dataclass(frozen=True)
class Pair(Term):
    mode: Mode
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst(Term):
    mode: Mode
    pair: Term


@dataclass(frozen=True)
class Snd(Term):
    mode: Mode
    pair: Term


@dataclass(frozen=True)
class Univ(Term):
    pass


@dataclass(frozen=True)
class NatTy(Term):
    pass


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Succ(Term):
    arg: Term


@dataclass(frozen=True)
class NatElim(Term):
    motive: Term
    zcase: Term
    scase: Term
    scrut: Term


@dataclass(frozen=True)
class BoolTy(Term):
    pass


@dataclass(frozen=True)
class TrueTm(Term):
    pass


@dataclass(frozen=True)
class FalseTm(Term):
    pass


@dataclass(frozen=True)
class BoolElim(Term):
    motive: Term
    tcase: Term
    fcase: Term
    scrut: Term


@dataclass(frozen=True)
class Let(Term):
    name: str = field(compare=False)
    ty: Term
    defn: Term
    body: Term


@dataclass(frozen=True)
class Meta(Term):
    mid: int


@dataclass(frozen=True)
class InsertedMeta(Term):
    """A metavariable applied to the bound variables of its creation context.

    mask[i] is the binder mode of context entry i if that entry is bound,
    None if it is let-defined; its length equals the binding depth at the
    node's occurrence.
    """

    mid: int
    mask: tuple[Mode | None, ...]


# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class Value:
    pass


Env = tuple[Value, ...]


@dataclass(frozen=True)
class Closure:
    env: Env
    body: Term

    def apply(self, arg: Value) -> Value:
        return evaluate(self.env + (arg,), self.body)


@dataclass(frozen=True)
class VLam(Value):
    name: str = field(compare=False)
    mode: Mode
    icit: Icit
    clos: Closure


@dataclass(frozen=True)
class VPi(Value):
    name: str = field(compare=False)
    mode: Mode
    icit: Icit
    dom: Value
    cod: Closure


@dataclass(frozen=True)
class VSigma(Value):
    name: str = field(compare=False)
    mode: Mode
    fst_ty: Value
    snd_ty: Closure


@dataclass(frozen=True)
class VPair(Value):
    mode: Mode
    fst: Value
    snd: Value


@dataclass(frozen=True)
class VUniv(Value):
    pass


@dataclass(frozen=True)
class VNatTy(Value):
    pass


@dataclass(frozen=True)
class VZero(Value):
    pass


@dataclass(frozen=True)
class VSucc(Value):
    arg: Value


@dataclass(frozen=True)
class VBoolTy(Value):
    pass


@dataclass(frozen=True)
class VTrue(Value):
    pass


@dataclass(frozen=True)
class VFalse(Value):
    pass


@dataclass(frozen=True)
class VarH:
    lvl: int


@dataclass(frozen=True)
class MetaH:
    mid: int


@dataclass(frozen=True)
class SApp:
    mode: Mode
    icit: Icit
    arg: Value


@dataclass(frozen=True)
class SFst:
    mode: Mode


@dataclass(frozen=True)
class SSnd:
    mode: Mode


@dataclass(frozen=True)
class SNatElim:
    motive: Value
    zcase: Value
    scase: Value


@dataclass(frozen=True)
class SBoolElim:
    motive: Value
    tcase: Value
    fcase: Value


SpineItem = SApp | SFst | SSnd | SNatElim | SBoolElim


@dataclass(frozen=True)
class VNeutral(Value):
    head: VarH | MetaH
    spine: tuple[SpineItem, ...] = ()


def vvar(lvl: int) -> VNeutral:
    return VNeutral(VarH(lvl))


def is_flex(v: Value) -> bool:
    return isinstance(v, VNeutral) and isinstance(v.head, MetaH)


# ---------------------------------------------------------------------------
# Evaluation.  Pure in the meta store: unsolved and solved metas alike
# evaluate to flexible neutrals; `force` consults the store.


def evaluate(env: Env, t: Term) -> Value:
    match t:
        case Var(ix):
            return env[len(env) - 1 - ix]
        case Lam(name, mode, icit, body):
            return VLam(name, mode, icit, Closure(env, body))
        case App(mode, icit, fn, arg):
            return vapp(evaluate(env, fn), mode, icit, evaluate(env, arg))
        case Pi(name, mode, icit, dom, cod):
            return VPi(name, mode, icit, evaluate(env, dom), Closure(env, cod))
        case Sigma(name, mode, fst_ty, snd_ty):
            return VSigma(name, mode, evaluate(env, fst_ty), Closure(env, snd_ty))
        case Pair(mode, fst, snd):
            return VPair(mode, evaluate(env, fst), evaluate(env, snd))
        case Fst(mode, pair):
            return vfst(mode, evaluate(env, pair))
        case Snd(mode, pair):
            return vsnd(mode, evaluate(env, pair))
        case Univ():
            return VUniv()
        case NatTy():
            return VNatTy()
        case Zero():
            return VZero()
        case Succ(arg):
            return VSucc(evaluate(env, arg))
        case NatElim(motive, zcase, scase, scrut):
            return vnatelim(
                evaluate(env, motive),
                evaluate(env, zcase),
                evaluate(env, scase),
                evaluate(env, scrut),
            )
        case BoolTy():
            return VBoolTy()
        case TrueTm():
            return VTrue()
        case FalseTm():
            return VFalse()
        case BoolElim(motive, tcase, fcase, scrut):
            return vboolelim(
                evaluate(env, motive),
                evaluate(env, tcase),
                evaluate(env, fcase),
                evaluate(env, scrut),
            )
        case Let(_, _, defn, body):
            return evaluate(env + (evaluate(env, defn),), body)
        case Meta(mid):
            return VNeutral(MetaH(mid))
        case InsertedMeta(mid, mask):
            v: Value = VNeutral(MetaH(mid))
            for i, m in enumerate(mask):
                if m is not None:
                    v = vapp(v, m, Icit.EXPL, env[i])
            return v
    raise AssertionError(f"unhandled term {t!r}")


def vapp(fn: Value, mode: Mode, icit: Icit, arg: Value) -> Value:
    match fn:
        case VLam(_, _, _, clos):
            return clos.apply(arg)
        case VNeutral(head, spine):
            return VNeutral(head, spine + (SApp(mode, icit, arg),))
    raise InternalError(f"applying a non-function value {fn!r}")


def vfst(mode: Mode, v: Value) -> Value:
    match v:
        case VPair(_, fst, _):
            return fst
        case VNeutral(head, spine):
            return VNeutral(head, spine + (SFst(mode),))
    raise InternalError(f"first projection of a non-pair value {v!r}")


def vsnd(mode: Mode, v: Value) -> Value:
    match v:
        case VPair(_, _, snd):
            return snd
        case VNeutral(head, spine):
            return VNeutral(head, spine + (SSnd(mode),))
    raise InternalError(f"second projection of a non-pair value {v!r}")


def vnatelim(motive: Value, zcase: Value, scase: Value, scrut: Value) -> Value:
    match scrut:
        case VZero():
            return zcase
        case VSucc(pred):
            ih = vnatelim(motive, zcase, scase, pred)
            return vapp(vapp(scase, Mode.OMEGA, Icit.EXPL, pred), Mode.OMEGA, Icit.EXPL, ih)
        case VNeutral(head, spine):
            return VNeutral(head, spine + (SNatElim(motive, zcase, scase),))
    raise InternalError(f"natural-number elimination of {scrut!r}")


def vboolelim(motive: Value, tcase: Value, fcase: Value, scrut: Value) -> Value:
    match scrut:
        case VTrue():
            return tcase
        case VFalse():
            return fcase
        case VNeutral(head, spine):
            return VNeutral(head, spine + (SBoolElim(motive, tcase, fcase),))
    raise InternalError(f"boolean elimination of {scrut!r}")


def apply_spine(v: Value, spine: tuple[SpineItem, ...]) -> Value:
    for item in spine:
        match item:
            case SApp(mode, icit, arg):
                v = vapp(v, mode, icit, arg)
            case SFst(mode):
                v = vfst(mode, v)
            case SSnd(mode):
                v = vsnd(mode, v)
            case SNatElim(motive, zcase, scase):
                v = vnatelim(motive, zcase, scase, v)
            case SBoolElim(motive, tcase, fcase):
                v = vboolelim(motive, tcase, fcase, v)
    return v


def force(store: "MetaStore", v: Value) -> Value:
    """Unfold solved metavariables at the head of a flexible neutral."""
    while isinstance(v, VNeutral) and isinstance(v.head, MetaH):
        sol = store.lookup(v.head.mid).solution_value
        if sol is None:
            return v
        v = apply_spine(sol, v.spine)
    return v


# ---------------------------------------------------------------------------
# Readback


def quote(store: "MetaStore", depth: int, v: Value) -> Term:
    v = force(store, v)
    match v:
        case VLam(name, mode, icit, clos):
            return Lam(name, mode, icit, quote(store, depth + 1, clos.apply(vvar(depth))))
        case VPi(name, mode, icit, dom, cod):
            return Pi(
                name,
                mode,
                icit,
                quote(store, depth, dom),
                quote(store, depth + 1, cod.apply(vvar(depth))),
            )
        case VSigma(name, mode, fst_ty, snd_ty):
            return Sigma(
                name,
                mode,
                quote(store, depth, fst_ty),
                quote(store, depth + 1, snd_ty.apply(vvar(depth))),
            )
        case VPair(mode, fst, snd):
            return Pair(mode, quote(store, depth, fst), quote(store, depth, snd))
        case VUniv():
            return Univ()
        case VNatTy():
            return NatTy()
        case VZero():
            return Zero()
        case VSucc(arg):
            return Succ(quote(store, depth, arg))
        case VBoolTy():
            return BoolTy()
        case VTrue():
            return TrueTm()
        case VFalse():
            return FalseTm()
        case VNeutral(head, spine):
            t: Term
            if isinstance(head, VarH):
                t = Var(depth - 1 - head.lvl)
            else:
                t = Meta(head.mid)
            for item in spine:
                t = _quote_spine_item(store, depth, t, item)
            return t
    raise AssertionError(f"unhandled value {v!r}")


def _quote_spine_item(store: "MetaStore", depth: int, t: Term, item: SpineItem) -> Term:
    match item:
        case SApp(mode, icit, arg):
            return App(mode, icit, t, quote(store, depth, arg))
        case SFst(mode):
            return Fst(mode, t)
        case SSnd(mode):
            return Snd(mode, t)
        case SNatElim(motive, zcase, scase):
            return NatElim(
                quote(store, depth, motive),
                quote(store, depth, zcase),
                quote(store, depth, scase),
                t,
            )
        case SBoolElim(motive, tcase, fcase):
            return BoolElim(
                quote(store, depth, motive),
                quote(store, depth, tcase),
                quote(store, depth, fcase),
                t,
            )
    raise AssertionError(f"unhandled spine item {item!r}")


def normal_form(store: "MetaStore", env: Env, t: Term) -> Term:
    return quote(store, len(env), evaluate(env, t))


# ---------------------------------------------------------------------------
# Conversion checking (rigid only; metavariable solving lives in unify)


def conv(store: "MetaStore", depth: int, a: Value, b: Value) -> bool:
    a = force(store, a)
    b = force(store, b)
    match a, b:
        case VLam(_, mode, _, clos), VLam(_, mode2, _, clos2):
            if mode is not mode2:
                return False
            x = vvar(depth)
            return conv(store, depth + 1, clos.apply(x), clos2.apply(x))
        case VLam(_, mode, icit, clos), _:
            x = vvar(depth)
            return conv(store, depth + 1, clos.apply(x), vapp(b, mode, icit, x))
        case _, VLam(_, mode, icit, clos):
            x = vvar(depth)
            return conv(store, depth + 1, vapp(a, mode, icit, x), clos.apply(x))
        case VPair(mode, fst, snd), _:
            return conv(store, depth, fst, vfst(mode, b)) and conv(
                store, depth, snd, vsnd(mode, b)
            )
        case _, VPair(mode, fst, snd):
            return conv(store, depth, vfst(mode, a), fst) and conv(
                store, depth, vsnd(mode, a), snd
            )
        case VPi(_, mode, icit, dom, cod), VPi(_, mode2, icit2, dom2, cod2):
            if mode is not mode2 or icit is not icit2:
                return False
            if not conv(store, depth, dom, dom2):
                return False
            x = vvar(depth)
            return conv(store, depth + 1, cod.apply(x), cod2.apply(x))
        case VSigma(_, mode, fst_ty, snd_ty), VSigma(_, mode2, fst2, snd2):
            if mode is not mode2:
                return False
            if not conv(store, depth, fst_ty, fst2):
                return False
            x = vvar(depth)
            return conv(store, depth + 1, snd_ty.apply(x), snd2.apply(x))
        case VUniv(), VUniv():
            return True
        case VNatTy(), VNatTy():
            return True
        case VBoolTy(), VBoolTy():
            return True
        case VZero(), VZero():
            return True
        case VTrue(), VTrue():
            return True
        case VFalse(), VFalse():
            return True
        case VSucc(x), VSucc(y):
            return conv(store, depth, x, y)
        case VNeutral(h1, s1), VNeutral(h2, s2):
            if h1 != h2 or len(s1) != len(s2):
                return False
            return all(
                _conv_spine_item(store, depth, i1, i2) for i1, i2 in zip(s1, s2)
            )
    return False


def _conv_spine_item(
    store: "MetaStore", depth: int, a: SpineItem, b: SpineItem
) -> bool:
    match a, b:
        case SApp(mode, _, arg), SApp(mode2, _, arg2):
            return mode is mode2 and conv(store, depth, arg, arg2)
        case SFst(mode), SFst(mode2):
            return mode is mode2
        case SSnd(mode), SSnd(mode2):
            return mode is mode2
        case SNatElim(p, z, s), SNatElim(p2, z2, s2):
            return (
                conv(store, depth, p, p2)
                and conv(store, depth, z, z2)
                and conv(store, depth, s, s2)
            )
        case SBoolElim(p, t, f), SBoolElim(p2, t2, f2):
            return (
                conv(store, depth, p, p2)
                and conv(store, depth, t, t2)
                and conv(store, depth, f, f2)
            )
    return False


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class CtxEntry:
    name: str
    mode: Mode
    ty: Value
    defined: bool  # let-bound or top-level definition, not a lambda binder


@dataclass(frozen=True)
class Context:
    """A typing context: entries, their evaluation environment, and the
    erased flag that represents the presence of the erasure marker."""

    entries: tuple[CtxEntry, ...] = ()
    env: Env = ()
    flag: bool = False

    @property
    def depth(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e.name for e in self.entries)

    def bind(self, name: str, mode: Mode, ty: Value) -> Context:
        entry = CtxEntry(name, mode, ty, defined=False)
        return Context(self.entries + (entry,), self.env + (vvar(self.depth),), self.flag)

    def define(self, name: str, mode: Mode, ty: Value, value: Value) -> Context:
        entry = CtxEntry(name, mode, ty, defined=True)
        return Context(self.entries + (entry,), self.env + (value,), self.flag)

    def with_flag(self, flag: bool) -> Context:
        return Context(self.entries, self.env, flag) if flag != self.flag else self

    def erased(self) -> Context:
        return self.with_flag(True)

    def lookup(self, name: str) -> tuple[int, CtxEntry] | None:
        """Innermost entry with the given name, as (de Bruijn index, entry)."""
        for ix, entry in enumerate(reversed(self.entries)):
            if entry.name == name:
                return ix, entry
        return None

    def iter_levels(self) -> Iterator[tuple[int, CtxEntry]]:
        return enumerate(self.entries)


# ---------------------------------------------------------------------------
# Kernel typechecker.
#
# The judgment is "ctx (with flag) |- t : A as a runtime term".  Erased
# judgments are the same check with the flag set.  Positions that consume
# erased data (type annotations, domains and codomains, motives, arguments
# of mode-0 applications, first components of mode-0 pairs) recurse with
# the flag forced on.  Type codes themselves (U, Nat, Bool, Pi, Sigma) are
# erased resources and demand the flag, as do mode-0 variables and mode-0
# first projections.


# Eliminator motives bind a runtime variable: families over a runtime
# domain and over an erased one are interchangeable (the binder is only
# ever used inside types), and the runtime choice keeps mode stripping
# syntax-preserving.
NAT_MOTIVE_TY = VPi("n", Mode.OMEGA, Icit.EXPL, VNatTy(), Closure((), Univ()))
BOOL_MOTIVE_TY = VPi("b", Mode.OMEGA, Icit.EXPL, VBoolTy(), Closure((), Univ()))

# Type of the successor case, Pi (k : Nat). P k -> P (succ k), evaluated in
# an environment holding the motive value.
_NAT_SUCC_CASE_TY = Pi(
    "k",
    Mode.OMEGA,
    Icit.EXPL,
    NatTy(),
    Pi(
        "ih",
        Mode.OMEGA,
        Icit.EXPL,
        App(Mode.OMEGA, Icit.EXPL, Var(1), Var(0)),
        App(Mode.OMEGA, Icit.EXPL, Var(2), Succ(Var(1))),
    ),
)


def nat_succ_case_type(motive: Value) -> Value:
    return evaluate((motive,), _NAT_SUCC_CASE_TY)


def motive_app(motive: Value, scrut: Value) -> Value:
    return vapp(motive, Mode.OMEGA, Icit.EXPL, scrut)


def kernel_infer(store: "MetaStore", ctx: Context, t: Term) -> Value:
    match t:
        case Var(ix):
            if not 0 <= ix < ctx.depth:
                raise InternalError(f"variable index {ix} out of scope at depth {ctx.depth}")
            entry = ctx.entries[ctx.depth - 1 - ix]
            if entry.mode is Mode.ZERO and not ctx.flag:
                raise KernelError(
                    f"erased variable {entry.name!r} used at runtime"
                )
            return entry.ty
        case App(mode, icit, fn, arg):
            fn_ty = force(store, kernel_infer(store, ctx, fn))
            if not isinstance(fn_ty, VPi):
                raise KernelError("application of a non-function")
            if fn_ty.mode is not mode or fn_ty.icit is not icit:
                raise KernelError(
                    f"application annotation {mode}/{icit.value} does not match "
                    f"function type {fn_ty.mode}/{fn_ty.icit.value}"
                )
            arg_ctx = ctx.erased() if mode is Mode.ZERO else ctx
            kernel_check(store, arg_ctx, arg, fn_ty.dom)
            return fn_ty.cod.apply(evaluate(ctx.env, arg))
        case Pi(name, mode, _, dom, cod):
            _require_erased(ctx, "dependent function type")
            kernel_check(store, ctx.erased(), dom, VUniv())
            dom_v = evaluate(ctx.env, dom)
            kernel_check(store, ctx.bind(name, mode, dom_v).erased(), cod, VUniv())
            return VUniv()
        case Sigma(name, mode, fst_ty, snd_ty):
            _require_erased(ctx, "dependent pair type")
            kernel_check(store, ctx.erased(), fst_ty, VUniv())
            fst_v = evaluate(ctx.env, fst_ty)
            kernel_check(store, ctx.bind(name, mode, fst_v).erased(), snd_ty, VUniv())
            return VUniv()
        case Univ():
            _require_erased(ctx, "universe")
            return VUniv()
        case NatTy():
            _require_erased(ctx, "Nat type")
            return VUniv()
        case BoolTy():
            _require_erased(ctx, "Bool type")
            return VUniv()
        case Zero():
            return VNatTy()
        case Succ(arg):
            kernel_check(store, ctx, arg, VNatTy())
            return VNatTy()
        case TrueTm():
            return VBoolTy()
        case FalseTm():
            return VBoolTy()
        case NatElim(motive, zcase, scase, scrut):
            kernel_check(store, ctx.erased(), motive, NAT_MOTIVE_TY)
            motive_v = evaluate(ctx.env, motive)
            kernel_check(store, ctx, zcase, motive_app(motive_v, VZero()))
            kernel_check(store, ctx, scase, nat_succ_case_type(motive_v))
            kernel_check(store, ctx, scrut, VNatTy())
            return motive_app(motive_v, evaluate(ctx.env, scrut))
        case BoolElim(motive, tcase, fcase, scrut):
            kernel_check(store, ctx.erased(), motive, BOOL_MOTIVE_TY)
            motive_v = evaluate(ctx.env, motive)
            kernel_check(store, ctx, tcase, motive_app(motive_v, VTrue()))
            kernel_check(store, ctx, fcase, motive_app(motive_v, VFalse()))
            kernel_check(store, ctx, scrut, VBoolTy())
            return motive_app(motive_v, evaluate(ctx.env, scrut))
        case Fst(mode, pair):
            pair_ty = force(store, kernel_infer(store, ctx, pair))
            if not isinstance(pair_ty, VSigma):
                raise KernelError("first projection of a non-pair")
            if pair_ty.mode is not mode:
                raise KernelError("projection mode does not match pair type")
            if mode is Mode.ZERO and not ctx.flag:
                raise KernelError("erased first projection used at runtime")
            return pair_ty.fst_ty
        case Snd(mode, pair):
            pair_ty = force(store, kernel_infer(store, ctx, pair))
            if not isinstance(pair_ty, VSigma):
                raise KernelError("second projection of a non-pair")
            if pair_ty.mode is not mode:
                raise KernelError("projection mode does not match pair type")
            return pair_ty.snd_ty.apply(vfst(mode, evaluate(ctx.env, pair)))
        case Let(name, ty, defn, body):
            kernel_check(store, ctx.erased(), ty, VUniv())
            ty_v = evaluate(ctx.env, ty)
            kernel_check(store, ctx, defn, ty_v)
            inner = ctx.define(name, Mode.OMEGA, ty_v, evaluate(ctx.env, defn))
            return kernel_infer(store, inner, body)
        case Meta(mid):
            return store.lookup(mid).closed_ty_value
        case InsertedMeta(mid, mask):
            if len(mask) != ctx.depth:
                raise InternalError(
                    f"inserted meta mask length {len(mask)} != depth {ctx.depth}"
                )
            ty = store.lookup(mid).closed_ty_value
            for i, m in enumerate(mask):
                if m is None:
                    continue
                ty = force(store, ty)
                if not isinstance(ty, VPi):
                    raise InternalError("inserted meta over-applied")
                ty = ty.cod.apply(ctx.env[i])
            return ty
        case Lam() | Pair():
            raise KernelError("cannot infer a type for an unannotated introduction")
    raise AssertionError(f"unhandled term {t!r}")


def kernel_check(store: "MetaStore", ctx: Context, t: Term, expected: Value) -> None:
    expected = force(store, expected)
    match t, expected:
        case Lam(name, mode, icit, body), VPi(_, pmode, picit, dom, cod):
            if mode is not pmode:
                raise KernelError(
                    f"lambda mode {mode} does not match function type mode {pmode}"
                )
            if icit is not picit:
                raise KernelError("lambda implicitness does not match function type")
            inner = ctx.bind(name, mode, dom)
            kernel_check(store, inner, body, cod.apply(vvar(ctx.depth)))
            return
        case Lam(), _:
            raise KernelError(
                f"lambda checked against a non-function type "
                f"{pp(quote(store, ctx.depth, expected), ctx.names)}"
            )
        case Pair(mode, fst, snd), VSigma(_, smode, fst_ty, snd_ty):
            if mode is not smode:
                raise KernelError("pair mode does not match pair type mode")
            fst_ctx = ctx.erased() if mode is Mode.ZERO else ctx
            kernel_check(store, fst_ctx, fst, fst_ty)
            kernel_check(store, ctx, snd, snd_ty.apply(evaluate(ctx.env, fst)))
            return
        case Pair(), _:
            raise KernelError(
                f"pair checked against a non-pair type "
                f"{pp(quote(store, ctx.depth, expected), ctx.names)}"
            )
        case Let(name, ty, defn, body), _:
            kernel_check(store, ctx.erased(), ty, VUniv())
            ty_v = evaluate(ctx.env, ty)
            kernel_check(store, ctx, defn, ty_v)
            inner = ctx.define(name, Mode.OMEGA, ty_v, evaluate(ctx.env, defn))
            kernel_check(store, inner, body, expected)
            return
        case _:
            got = kernel_infer(store, ctx, t)
            if not conv(store, ctx.depth, got, expected):
                raise KernelError(
                    "type mismatch: expected "
                    f"{pp(quote(store, ctx.depth, expected), ctx.names)}, got "
                    f"{pp(quote(store, ctx.depth, got), ctx.names)}"
                )


def _require_erased(ctx: Context, what: str) -> None:
    if not ctx.flag:
        raise KernelError(f"{what} is a type code and cannot be used at runtime")


# ---------------------------------------------------------------------------
# Pretty-printing


_SUB0 = "₀"


def _fresh(name: str, names: tuple[str, ...]) -> str:
    if name == "_":
        return name
    while name in names:
        name += "'"
    return name


def pp(t: Term, names: tuple[str, ...] = (), prec: int = 0) -> str:
    """Print a core term with named binders and explicit mode marks."""
    # prec: 0 lowest (lambda/let/pi), 1 sigma, 2 application, 3 atom
    match t:
        case Var(ix):
            if 0 <= ix < len(names):
                return names[len(names) - 1 - ix]
            return f"@{ix}"
        case Meta(mid):
            return f"?{mid}"
        case InsertedMeta(mid, mask):
            args = [
                names[i] if i < len(names) else f"@lvl{i}"
                for i, m in enumerate(mask)
                if m is not None
            ]
            return f"?{mid}[{', '.join(args)}]" if args else f"?{mid}"
        case Univ():
            return "U"
        case NatTy():
            return "Nat"
        case BoolTy():
            return "Bool"
        case Zero():
            return "zero"
        case TrueTm():
            return "true"
        case FalseTm():
            return "false"
        case Succ(arg):
            return _wrap(f"succ {pp(arg, names, 3)}", prec, 2)
        case Fst(mode, pair):
            mark = _SUB0 if mode is Mode.ZERO else ""
            return _wrap(f"fst{mark} {pp(pair, names, 3)}", prec, 2)
        case Snd(mode, pair):
            mark = _SUB0 if mode is Mode.ZERO else ""
            return _wrap(f"snd{mark} {pp(pair, names, 3)}", prec, 2)
        case NatElim(motive, z, s, n):
            parts = " ".join(pp(u, names, 3) for u in (motive, z, s, n))
            return _wrap(f"natElim {parts}", prec, 2)
        case BoolElim(motive, a, b, c):
            parts = " ".join(pp(u, names, 3) for u in (motive, a, b, c))
            return _wrap(f"boolElim {parts}", prec, 2)
        case App(_, icit, fn, arg):
            if icit is Icit.IMPL:
                return _wrap(f"{pp(fn, names, 2)} {{{pp(arg, names, 0)}}}", prec, 2)
            return _wrap(f"{pp(fn, names, 2)} {pp(arg, names, 3)}", prec, 2)
        case Lam(name, mode, icit, body):
            x = _fresh(name, names)
            mark = _SUB0 if mode is Mode.ZERO else ""
            binder = f"{{{x}}}" if icit is Icit.IMPL else x
            return _wrap(f"λ{mark} {binder}. {pp(body, names + (x,), 0)}", prec, 0)
        case Pi(name, mode, icit, dom, cod):
            x = _fresh(name, names)
            mark = _SUB0 if mode is Mode.ZERO else ""
            if icit is Icit.EXPL and name == "_" and mode is Mode.OMEGA:
                return _wrap(
                    f"{pp(dom, names, 1)} → {pp(cod, names + (x,), 0)}", prec, 0
                )
            open_, close = ("{", "}") if icit is Icit.IMPL else ("(", ")")
            return _wrap(
                f"Π{mark} {open_}{x} : {pp(dom, names, 0)}{close}. "
                f"{pp(cod, names + (x,), 0)}",
                prec,
                0,
            )
        case Sigma(name, mode, fst_ty, snd_ty):
            x = _fresh(name, names)
            mark = _SUB0 if mode is Mode.ZERO else ""
            if name == "_":
                lhs = pp(fst_ty, names, 2)
            else:
                lhs = f"({x} : {pp(fst_ty, names, 0)})"
            return _wrap(f"{lhs} *{mark} {pp(snd_ty, names + (x,), 1)}", prec, 0)
        case Pair(mode, fst, snd):
            mark = _SUB0 if mode is Mode.ZERO else ""
            return f"({pp(fst, names, 0)}, {pp(snd, names, 0)}){mark}"
        case Let(name, ty, defn, body):
            x = _fresh(name, names)
            return _wrap(
                f"let {x} : {pp(ty, names, 0)} = {pp(defn, names, 0)} in "
                f"{pp(body, names + (x,), 0)}",
                prec,
                0,
            )
    raise AssertionError(f"unhandled term {t!r}")


def _wrap(s: str, prec: int, at: int) -> str:
    return f"({s})" if prec > at else s


# ---------------------------------------------------------------------------
# Structural JSON encoding


def _mode_json(mode: Mode) -> str:
    return "0" if mode is Mode.ZERO else "w"


def to_json(t: Term) -> dict:
    match t:
        case Var(ix):
            return {"tag": "Var", "ix": ix}
        case Lam(name, mode, icit, body):
            return {
                "tag": "Lam",
                "name": name,
                "mode": _mode_json(mode),
                "implicit": icit is Icit.IMPL,
                "body": to_json(body),
            }
        case App(mode, icit, fn, arg):
            return {
                "tag": "App",
                "mode": _mode_json(mode),
                "implicit": icit is Icit.IMPL,
                "fn": to_json(fn),
                "arg": to_json(arg),
            }
        case Pi(name, mode, icit, dom, cod):
            return {
                "tag": "Pi",
                "name": name,
                "mode": _mode_json(mode),
                "implicit": icit is Icit.IMPL,
                "dom": to_json(dom),
                "cod": to_json(cod),
            }
        case Sigma(name, mode, fst_ty, snd_ty):
            return {
                "tag": "Sigma",
                "name": name,
                "mode": _mode_json(mode),
                "fst": to_json(fst_ty),
                "snd": to_json(snd_ty),
            }
        case Pair(mode, fst, snd):
            return {
                "tag": "Pair",
                "mode": _mode_json(mode),
                "fst": to_json(fst),
                "snd": to_json(snd),
            }
        case Fst(mode, pair):
            return {"tag": "Fst", "mode": _mode_json(mode), "pair": to_json(pair)}
        case Snd(mode, pair):
            return {"tag": "Snd", "mode": _mode_json(mode), "pair": to_json(pair)}
        case Univ():
            return {"tag": "U"}
        case NatTy():
            return {"tag": "Nat"}
        case Zero():
            return {"tag": "zero"}
        case Succ(arg):
            return {"tag": "succ", "arg": to_json(arg)}
        case NatElim(motive, z, s, n):
            return {
                "tag": "natElim",
                "motive": to_json(motive),
                "zcase": to_json(z),
                "scase": to_json(s),
                "scrut": to_json(n),
            }
        case BoolTy():
            return {"tag": "Bool"}
        case TrueTm():
            return {"tag": "true"}
        case FalseTm():
            return {"tag": "false"}
        case BoolElim(motive, a, b, c):
            return {
                "tag": "boolElim",
                "motive": to_json(motive),
                "tcase": to_json(a),
                "fcase": to_json(b),
                "scrut": to_json(c),
            }
        case Let(name, ty, defn, body):
            return {
                "tag": "Let",
                "name": name,
                "ty": to_json(ty),
                "defn": to_json(defn),
                "body": to_json(body),
            }
        case Meta(mid):
            return {"tag": "Meta", "id": mid}
        case InsertedMeta(mid, mask):
            return {
                "tag": "InsertedMeta",
                "id": mid,
                "mask": [None if m is None else _mode_json(m) for m in mask],
            }
    raise AssertionError(f"unhandled term {t!r}")
