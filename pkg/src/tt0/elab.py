"""Bidirectional elaboration from surface syntax to the core calculus.

Elaboration enforces the erasure discipline (a term expected at an erased
position is checked with the context's erased flag set), inserts implicit
applications and metavariables, and records on every application and
projection the mode of the function or pair type it eliminates.  After a
module elaborates, all metavariables must be solved; every definition is
then zonked and independently re-checked by the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import core as co
from . import surface as sf
from .core import Context, Term, Value, evaluate, force, quote
from .diagnostics import Diagnostic, ElabError, InternalError, SourceSpan, UnifyError
from .surface import Icit, Mode
from .unify import MetaStore, fresh_meta, unify


@dataclass
class ElabState:
    """Mutable state of one module elaboration: the meta store plus the
    signature of already elaborated declarations."""

    store: MetaStore = field(default_factory=MetaStore)
    sig: Context = field(default_factory=Context)
    source: str | None = None


@dataclass(frozen=True)
class DeclInfo:
    name: str
    span: SourceSpan
    ty: Term  # zonked, at the depth of the preceding declarations
    body: Term  # zonked, same depth
    ty_value: Value
    body_value: Value


@dataclass
class ElabResult:
    decls: list[DeclInfo]
    main: tuple[Term, Value] | None  # zonked main and its type value
    store: MetaStore
    sig: Context  # all declarations, as defined entries at flag false
    errors: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return not self.errors

    def decl(self, name: str) -> DeclInfo:
        for d in self.decls:
            if d.name == name:
                return d
        raise KeyError(name)


# ---------------------------------------------------------------------------
# Helpers


def _unify_types(
    st: ElabState, ctx: Context, span: SourceSpan, got: Value, expected: Value
) -> None:
    try:
        unify(st.store, ctx.depth, got, expected, ctx.names)
    except UnifyError as e:
        exp_s = co.pp(quote(st.store, ctx.depth, expected), ctx.names)
        got_s = co.pp(quote(st.store, ctx.depth, got), ctx.names)
        raise ElabError(
            f"type mismatch: expected {exp_s}, got {got_s} ({e.message})", span
        ) from e


def insert_implicits(
    st: ElabState, ctx: Context, term: Term, ty: Value, span: SourceSpan
) -> tuple[Term, Value]:
    """Apply a term to fresh metavariables while its type is an implicit Pi."""
    ty = force(st.store, ty)
    while isinstance(ty, co.VPi) and ty.icit is Icit.IMPL:
        arg_ctx = ctx.erased() if ty.mode is Mode.ZERO else ctx
        m = fresh_meta(st.store, arg_ctx, ty.dom, span)
        term = co.App(ty.mode, Icit.IMPL, term, m)
        ty = force(st.store, ty.cod.apply(evaluate(ctx.env, m)))
    return term, ty


def check_erased(st: ElabState, ctx: Context, t: sf.Surface, expected: Value) -> Term:
    """Check a term as erased: same judgment with the erased flag set."""
    return check(st, ctx.erased(), t, expected)


def check_type(st: ElabState, ctx: Context, t: sf.Surface) -> Term:
    return check_erased(st, ctx, t, co.VUniv())


# ---------------------------------------------------------------------------
# Checking


def check(st: ElabState, ctx: Context, t: sf.Surface, expected: Value) -> Term:
    expected = force(st.store, expected)
    match t, expected:
        case sf.SLam(), co.VPi() if _lam_matches(t, expected):
            if t.mode is not None and t.mode is not expected.mode:
                raise ElabError(
                    f"lambda binder mode {t.mode} does not match function type "
                    f"mode {expected.mode}",
                    t.span,
                )
            if t.ann is not None:
                ann = check_type(st, ctx, t.ann)
                _unify_types(st, ctx, t.ann.span, evaluate(ctx.env, ann), expected.dom)
            inner = ctx.bind(t.name, expected.mode, expected.dom)
            body = check(st, inner, t.body, expected.cod.apply(co.vvar(ctx.depth)))
            return co.Lam(t.name, expected.mode, expected.icit, body)
        case _, co.VPi(name, mode, Icit.IMPL, dom, cod):
            # Insert an implicit lambda around anything that is not itself an
            # implicit lambda.
            inner = ctx.bind(name, mode, dom)
            body = check(st, inner, t, cod.apply(co.vvar(ctx.depth)))
            return co.Lam(name, mode, Icit.IMPL, body)
        case sf.SPair(fst=fst, snd=snd), co.VSigma(_, mode, fst_ty, snd_ty):
            fst_ctx = ctx.erased() if mode is Mode.ZERO else ctx
            fst_t = check(st, fst_ctx, fst, fst_ty)
            snd_t = check(st, ctx, snd, snd_ty.apply(evaluate(ctx.env, fst_t)))
            return co.Pair(mode, fst_t, snd_t)
        case sf.SLet(name=name, ty=ty, defn=defn, body=body), _:
            ty_t = check_type(st, ctx, ty)
            ty_v = evaluate(ctx.env, ty_t)
            defn_t = check(st, ctx, defn, ty_v)
            inner = ctx.define(name, Mode.OMEGA, ty_v, evaluate(ctx.env, defn_t))
            body_t = check(st, inner, body, expected)
            return co.Let(name, ty_t, defn_t, body_t)
        case sf.SHole(), _:
            return fresh_meta(st.store, ctx, expected, t.span)
        case _:
            term, ty = infer(st, ctx, t)
            term, ty = insert_implicits(st, ctx, term, ty, t.span)
            _unify_types(st, ctx, t.span, ty, expected)
            return term


def _lam_matches(t: sf.SLam, pi: co.VPi) -> bool:
    return t.icit is pi.icit


# ---------------------------------------------------------------------------
# Inference


def infer(st: ElabState, ctx: Context, t: sf.Surface) -> tuple[Term, Value]:
    match t:
        case sf.SVar(name=name):
            found = ctx.lookup(name)
            if found is None:
                raise ElabError(f"unbound name {name!r}", t.span)
            ix, entry = found
            if entry.mode is Mode.ZERO and not ctx.flag:
                raise ElabError(
                    f"erased variable {name!r} used at runtime", t.span
                )
            return co.Var(ix), entry.ty
        case sf.SApp(fn=fn, arg=arg, icit=icit):
            fn_t, fn_ty = infer(st, ctx, fn)
            if isinstance(fn_t, co.Lam):
                # A literal lambda at an application head carries no domain
                # annotation the kernel could re-infer; bind it with an
                # annotated let instead.
                ann = quote(st.store, ctx.depth, fn_ty)
                fn_t = co.Let("f", ann, fn_t, co.Var(0))
            if icit is Icit.EXPL:
                fn_t, fn_ty = insert_implicits(st, ctx, fn_t, fn_ty, fn.span)
            fn_ty = force(st.store, fn_ty)
            if not isinstance(fn_ty, co.VPi):
                # A metavariable can still become a function type.
                if co.is_flex(fn_ty):
                    dom_m = fresh_meta(st.store, ctx.erased(), co.VUniv(), fn.span)
                    dom_v = evaluate(ctx.env, dom_m)
                    cod_ctx = ctx.bind("x", Mode.OMEGA, dom_v).erased()
                    cod_m = fresh_meta(st.store, cod_ctx, co.VUniv(), fn.span)
                    pi = co.VPi(
                        "x", Mode.OMEGA, icit, dom_v,
                        co.Closure(ctx.env, cod_m),
                    )
                    _unify_types(st, ctx, fn.span, fn_ty, pi)
                    fn_ty = pi
                else:
                    got = co.pp(quote(st.store, ctx.depth, fn_ty), ctx.names)
                    raise ElabError(f"applying a non-function of type {got}", fn.span)
            if fn_ty.icit is not icit:
                if icit is Icit.IMPL:
                    raise ElabError(
                        "unexpected implicit argument to an explicit function", t.span
                    )
                raise ElabError("expected an implicit argument", t.span)
            if fn_ty.mode is Mode.ZERO:
                arg_t = check_erased(st, ctx, arg, fn_ty.dom)
            else:
                arg_t = check(st, ctx, arg, fn_ty.dom)
            res_ty = fn_ty.cod.apply(evaluate(ctx.env, arg_t))
            return co.App(fn_ty.mode, icit, fn_t, arg_t), res_ty
        case sf.SLam(name=name, mode=mode, ann=ann, icit=icit, body=body):
            if icit is Icit.IMPL:
                raise ElabError("cannot infer a type for an implicit lambda", t.span)
            lam_mode = mode if mode is not None else Mode.OMEGA
            if ann is not None:
                dom_t = check_type(st, ctx, ann)
            else:
                dom_t = fresh_meta(st.store, ctx.erased(), co.VUniv(), t.span)
            dom_v = evaluate(ctx.env, dom_t)
            inner = ctx.bind(name, lam_mode, dom_v)
            body_t, body_ty = infer(st, inner, body)
            body_t, body_ty = insert_implicits(st, inner, body_t, body_ty, body.span)
            cod_t = quote(st.store, ctx.depth + 1, body_ty)
            pi_ty = co.VPi(name, lam_mode, icit, dom_v, co.Closure(ctx.env, cod_t))
            return co.Lam(name, lam_mode, icit, body_t), pi_ty
        case sf.SPi(name=name, mode=mode, icit=icit, dom=dom, cod=cod):
            _require_erased(ctx, t.span, "a function type")
            dom_t = check_type(st, ctx, dom)
            inner = ctx.bind(name, mode, evaluate(ctx.env, dom_t))
            cod_t = check_type(st, inner, cod)
            return co.Pi(name, mode, icit, dom_t, cod_t), co.VUniv()
        case sf.SSigma(name=name, mode=mode, fst_ty=fst_ty, snd_ty=snd_ty):
            _require_erased(ctx, t.span, "a pair type")
            fst_t = check_type(st, ctx, fst_ty)
            inner = ctx.bind(name, mode, evaluate(ctx.env, fst_t))
            snd_t = check_type(st, inner, snd_ty)
            return co.Sigma(name, mode, fst_t, snd_t), co.VUniv()
        case sf.SPair():
            raise ElabError(
                "cannot infer a type for a pair; annotate the enclosing binding",
                t.span,
            )
        case sf.SFst(arg=arg):
            pair_t, pair_ty = infer(st, ctx, arg)
            pair_ty = force(st.store, pair_ty)
            if not isinstance(pair_ty, co.VSigma):
                got = co.pp(quote(st.store, ctx.depth, pair_ty), ctx.names)
                raise ElabError(f"projecting from a non-pair of type {got}", t.span)
            if pair_ty.mode is Mode.ZERO and not ctx.flag:
                raise ElabError(
                    "the first component of this pair is erased and cannot be "
                    "projected at runtime",
                    t.span,
                )
            return co.Fst(pair_ty.mode, pair_t), pair_ty.fst_ty
        case sf.SSnd(arg=arg):
            pair_t, pair_ty = infer(st, ctx, arg)
            pair_ty = force(st.store, pair_ty)
            if not isinstance(pair_ty, co.VSigma):
                got = co.pp(quote(st.store, ctx.depth, pair_ty), ctx.names)
                raise ElabError(f"projecting from a non-pair of type {got}", t.span)
            fst_v = co.vfst(pair_ty.mode, evaluate(ctx.env, pair_t))
            return co.Snd(pair_ty.mode, pair_t), pair_ty.snd_ty.apply(fst_v)
        case sf.SLet(name=name, ty=ty, defn=defn, body=body):
            ty_t = check_type(st, ctx, ty)
            ty_v = evaluate(ctx.env, ty_t)
            defn_t = check(st, ctx, defn, ty_v)
            inner = ctx.define(name, Mode.OMEGA, ty_v, evaluate(ctx.env, defn_t))
            body_t, body_ty = infer(st, inner, body)
            return co.Let(name, ty_t, defn_t, body_t), body_ty
        case sf.SUniv():
            _require_erased(ctx, t.span, "the universe")
            return co.Univ(), co.VUniv()
        case sf.SNatTy():
            _require_erased(ctx, t.span, "the Nat type")
            return co.NatTy(), co.VUniv()
        case sf.SBoolTy():
            _require_erased(ctx, t.span, "the Bool type")
            return co.BoolTy(), co.VUniv()
        case sf.SZero():
            return co.Zero(), co.VNatTy()
        case sf.SNum(value=v):
            term: Term = co.Zero()
            for _ in range(v):
                term = co.Succ(term)
            return term, co.VNatTy()
        case sf.SSucc(arg=arg):
            arg_t = check(st, ctx, arg, co.VNatTy())
            return co.Succ(arg_t), co.VNatTy()
        case sf.STrue():
            return co.TrueTm(), co.VBoolTy()
        case sf.SFalse():
            return co.FalseTm(), co.VBoolTy()
        case sf.SNatElim(motive=motive, zcase=zcase, scase=scase, scrut=scrut):
            motive_t = check_erased(st, ctx, motive, co.NAT_MOTIVE_TY)
            motive_v = evaluate(ctx.env, motive_t)
            zcase_t = check(st, ctx, zcase, co.motive_app(motive_v, co.VZero()))
            scase_t = check(st, ctx, scase, co.nat_succ_case_type(motive_v))
            scrut_t = check(st, ctx, scrut, co.VNatTy())
            res = co.motive_app(motive_v, evaluate(ctx.env, scrut_t))
            return co.NatElim(motive_t, zcase_t, scase_t, scrut_t), res
        case sf.SBoolElim(motive=motive, tcase=tcase, fcase=fcase, scrut=scrut):
            motive_t = check_erased(st, ctx, motive, co.BOOL_MOTIVE_TY)
            motive_v = evaluate(ctx.env, motive_t)
            tcase_t = check(st, ctx, tcase, co.motive_app(motive_v, co.VTrue()))
            fcase_t = check(st, ctx, fcase, co.motive_app(motive_v, co.VFalse()))
            scrut_t = check(st, ctx, scrut, co.VBoolTy())
            res = co.motive_app(motive_v, evaluate(ctx.env, scrut_t))
            return co.BoolElim(motive_t, tcase_t, fcase_t, scrut_t), res
        case sf.SHole():
            ty_m = fresh_meta(st.store, ctx.erased(), co.VUniv(), t.span)
            ty_v = evaluate(ctx.env, ty_m)
            return fresh_meta(st.store, ctx, ty_v, t.span), ty_v
    raise AssertionError(f"unhandled surface term {t!r}")


def _require_erased(ctx: Context, span: SourceSpan, what: str) -> None:
    if not ctx.flag:
        raise ElabError(
            f"{what} is a type code and can only appear in erased positions", span
        )


# ---------------------------------------------------------------------------
# Zonking: substitute all solved metavariables into a term.  A solution is
# stored under exactly the captured context of its meta, and an inserted
# meta occurs at exactly that binding depth, so the solution body can be
# spliced in verbatim.


def zonk(store: MetaStore, t: Term) -> Term:
    match t:
        case co.InsertedMeta(mid, _):
            entry = store.lookup(mid)
            if entry.solution_body is None:
                return t
            # The captured context coincides with the occurrence context,
            # so the in-context solution splices in verbatim.
            return zonk(store, entry.solution_body)
        case co.Meta(mid):
            entry = store.lookup(mid)
            if entry.solution_closed is None:
                return t
            if not entry.entries:
                return zonk(store, entry.solution_closed)
            # A bare occurrence stands for the closed solution (applied by
            # explicit spines around it); keep it inferable with a let.
            return co.Let(
                f"m{mid}",
                zonk(store, entry.closed_ty),
                zonk(store, entry.solution_closed),
                co.Var(0),
            )
        case co.Var() | co.Univ() | co.NatTy() | co.Zero() | co.BoolTy() \
                | co.TrueTm() | co.FalseTm():
            return t
        case co.Lam(name, mode, icit, body):
            return co.Lam(name, mode, icit, zonk(store, body))
        case co.App(mode, icit, fn, arg):
            return co.App(mode, icit, zonk(store, fn), zonk(store, arg))
        case co.Pi(name, mode, icit, dom, cod):
            return co.Pi(name, mode, icit, zonk(store, dom), zonk(store, cod))
        case co.Sigma(name, mode, fst_ty, snd_ty):
            return co.Sigma(name, mode, zonk(store, fst_ty), zonk(store, snd_ty))
        case co.Pair(mode, fst, snd):
            return co.Pair(mode, zonk(store, fst), zonk(store, snd))
        case co.Fst(mode, pair):
            return co.Fst(mode, zonk(store, pair))
        case co.Snd(mode, pair):
            return co.Snd(mode, zonk(store, pair))
        case co.Succ(arg):
            return co.Succ(zonk(store, arg))
        case co.NatElim(motive, zcase, scase, scrut):
            return co.NatElim(
                zonk(store, motive),
                zonk(store, zcase),
                zonk(store, scase),
                zonk(store, scrut),
            )
        case co.BoolElim(motive, tcase, fcase, scrut):
            return co.BoolElim(
                zonk(store, motive),
                zonk(store, tcase),
                zonk(store, fcase),
                zonk(store, scrut),
            )
        case co.Let(name, ty, defn, body):
            return co.Let(
                name, zonk(store, ty), zonk(store, defn), zonk(store, body)
            )
    raise AssertionError(f"unhandled term {t!r}")


# ---------------------------------------------------------------------------
# Modules


def elaborate_module(
    m: sf.Module, source: str | None = None
) -> ElabResult:
    st = ElabState(source=source)
    decls: list[DeclInfo] = []
    errors: list[Diagnostic] = []

    for decl in m.decls:
        ty_t: Term | None = None
        ty_v: Value | None = None
        try:
            ty_t = check_type(st, st.sig, decl.ty)
            ty_v = evaluate(st.sig.env, ty_t)
            body_t = check(st, st.sig, decl.body, ty_v)
        except Diagnostic as e:
            errors.append(e)
            if ty_v is not None:
                # The type elaborated; keep the name as an opaque axiom so
                # later declarations can still mention it.
                st.sig = st.sig.bind(decl.name, Mode.OMEGA, ty_v)
            continue
        body_v = evaluate(st.sig.env, body_t)
        decls.append(DeclInfo(decl.name, decl.span, ty_t, body_t, ty_v, body_v))
        st.sig = st.sig.define(decl.name, Mode.OMEGA, ty_v, body_v)

    main: tuple[Term, Value] | None = None
    if m.main is not None:
        try:
            main_t, main_ty = infer(st, st.sig, m.main)
            main_t, main_ty = insert_implicits(st, st.sig, main_t, main_ty, m.main.span)
            main = (main_t, main_ty)
        except Diagnostic as e:
            errors.append(e)

    if not errors:
        for entry in st.store.unsolved():
            ctx_desc = ", ".join(
                f"{e.name} :{'0' if e.mode is Mode.ZERO else ''} "
                f"{co.pp(e.ty, tuple(x.name for x in entry.entries[:i]))}"
                for i, e in enumerate(entry.entries)
            )
            names = tuple(e.name for e in entry.entries)
            msg = f"unsolved metavariable ?{entry.mid} : {co.pp(entry.ty, names)}"
            if ctx_desc:
                msg += f" in context ({ctx_desc})"
            errors.append(ElabError(msg, entry.span))

    if errors:
        return ElabResult(decls, main, st.store, st.sig, errors)

    # Zonk and re-check everything with the kernel.
    zonked: list[DeclInfo] = []
    sig = Context()
    for d in decls:
        ty_t = zonk(st.store, d.ty)
        body_t = zonk(st.store, d.body)
        ty_v = evaluate(sig.env, ty_t)
        body_v = evaluate(sig.env, body_t)
        try:
            co.kernel_check(st.store, sig.erased(), ty_t, co.VUniv())
            co.kernel_check(st.store, sig, body_t, ty_v)
        except Diagnostic as e:
            raise InternalError(
                f"kernel rejected elaborated declaration {d.name!r}: {e.message}"
            ) from e
        zonked.append(DeclInfo(d.name, d.span, ty_t, body_t, ty_v, body_v))
        sig = sig.define(d.name, Mode.OMEGA, ty_v, body_v)
    if main is not None:
        main_t = zonk(st.store, main[0])
        main_ty_t = zonk(st.store, quote(st.store, sig.depth, main[1]))
        main_ty_v = evaluate(sig.env, main_ty_t)
        try:
            co.kernel_check(st.store, sig, main_t, main_ty_v)
        except Diagnostic as e:
            raise InternalError(
                f"kernel rejected elaborated main expression: {e.message}"
            ) from e
        main = (main_t, main_ty_v)

    return ElabResult(zonked, main, st.store, sig, errors)


def elaborate_text(source: str, filename: str = "<input>") -> ElabResult:
    module = sf.parse_module_text(source, filename)
    return elaborate_module(module, source)


# ---------------------------------------------------------------------------
# Closing a definition over the declarations it uses.  Produces a closed
# term with one let per (transitively) referenced declaration; unused
# declarations are dropped, which requires renumbering the remaining
# top-level references.


def _prefix_refs(t: Term, depth: int) -> set[int]:
    """Levels below `depth` referenced by a term elaborated at `depth`."""
    refs: set[int] = set()

    def go(u: Term, c: int) -> None:
        match u:
            case co.Var(ix):
                if ix >= c:
                    refs.add(depth + c - 1 - ix)
            case co.Lam(body=b):
                go(b, c + 1)
            case co.App(fn=f, arg=a):
                go(f, c)
                go(a, c)
            case co.Pi(dom=d, cod=b):
                go(d, c)
                go(b, c + 1)
            case co.Sigma(fst_ty=d, snd_ty=b):
                go(d, c)
                go(b, c + 1)
            case co.Pair(fst=f, snd=s):
                go(f, c)
                go(s, c)
            case co.Fst(pair=p) | co.Snd(pair=p) | co.Succ(arg=p):
                go(p, c)
            case co.NatElim(motive=m, zcase=z, scase=s, scrut=n):
                for u2 in (m, z, s, n):
                    go(u2, c)
            case co.BoolElim(motive=m, tcase=a, fcase=b2, scrut=n):
                for u2 in (m, a, b2, n):
                    go(u2, c)
            case co.Let(ty=ty, defn=d, body=b):
                go(ty, c)
                go(d, c)
                go(b, c + 1)
            case co.InsertedMeta() | co.Meta():
                raise InternalError("metavariable in a zonked term")
            case _:
                pass

    go(t, 0)
    return refs


def _thin(t: Term, depth: int, rank: dict[int, int]) -> Term:
    """Renumber prefix references of a term at `depth` after dropping the
    prefix entries not in `rank` (rank maps kept levels to new levels)."""
    new_depth = sum(1 for lvl in rank if lvl < depth)

    def go(u: Term, c: int) -> Term:
        match u:
            case co.Var(ix):
                if ix < c:
                    return u
                lvl = depth + c - 1 - ix
                return co.Var(new_depth + c - 1 - rank[lvl])
            case co.Lam(name, mode, icit, body):
                return co.Lam(name, mode, icit, go(body, c + 1))
            case co.App(mode, icit, fn, arg):
                return co.App(mode, icit, go(fn, c), go(arg, c))
            case co.Pi(name, mode, icit, dom, cod):
                return co.Pi(name, mode, icit, go(dom, c), go(cod, c + 1))
            case co.Sigma(name, mode, fst_ty, snd_ty):
                return co.Sigma(name, mode, go(fst_ty, c), go(snd_ty, c + 1))
            case co.Pair(mode, fst, snd):
                return co.Pair(mode, go(fst, c), go(snd, c))
            case co.Fst(mode, pair):
                return co.Fst(mode, go(pair, c))
            case co.Snd(mode, pair):
                return co.Snd(mode, go(pair, c))
            case co.Succ(arg):
                return co.Succ(go(arg, c))
            case co.NatElim(motive, zcase, scase, scrut):
                return co.NatElim(
                    go(motive, c), go(zcase, c), go(scase, c), go(scrut, c)
                )
            case co.BoolElim(motive, tcase, fcase, scrut):
                return co.BoolElim(
                    go(motive, c), go(tcase, c), go(fcase, c), go(scrut, c)
                )
            case co.Let(name, ty, defn, body):
                return co.Let(name, go(ty, c), go(defn, c), go(body, c + 1))
            case _:
                return u

    return go(t, 0)


def close_over_signature(result: ElabResult, t: Term, depth: int) -> Term:
    """Build a closed term from `t` (elaborated at signature depth `depth`)
    by wrapping it in lets for the declarations it transitively uses."""
    needed = _prefix_refs(t, depth)
    changed = True
    while changed:
        changed = False
        for lvl in sorted(needed):
            d = result.decls[lvl]
            more = _prefix_refs(d.ty, lvl) | _prefix_refs(d.body, lvl)
            if not more <= needed:
                needed |= more
                changed = True
    kept = sorted(needed)
    rank = {lvl: i for i, lvl in enumerate(kept)}
    closed = _thin(t, depth, rank)
    for lvl in reversed(kept):
        d = result.decls[lvl]
        closed = co.Let(d.name, _thin(d.ty, lvl, rank), _thin(d.body, lvl, rank), closed)
    return closed


def closed_definition(result: ElabResult, name: str) -> Term:
    lvl = next((i for i, d in enumerate(result.decls) if d.name == name), None)
    if lvl is None:
        raise KeyError(name)
    return close_over_signature(result, result.decls[lvl].body, lvl)


def closed_main(result: ElabResult) -> Term:
    if result.main is None:
        raise KeyError("module has no main expression")
    return close_over_signature(result, result.main[0], len(result.decls))
