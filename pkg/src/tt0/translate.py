"""Executable well-typedness transports over the mode structure.

Two translations, each followed by an independent kernel re-check:

* zeroing: set every context entry's mode to 0 and clear the erasure flag,
  then re-check the unchanged term as an erased judgment.  Success
  witnesses that types and erased terms depend on no runtime data.
* mode stripping: rewrite every mode annotation to omega and re-check with
  the erased flag set.  In that configuration every variable and every
  type code is usable everywhere, so the check is exactly a plain MLTT
  check of the stripped term.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import core as co
from .core import Context, CtxEntry, Term, Value, evaluate
from .diagnostics import Diagnostic, InternalError
from .elab import ElabResult
from .surface import Mode
from .unify import MetaStore


def zero_ctx(ctx: Context) -> Context:
    """Set every entry's mode to 0 and clear the erased flag; types and the
    evaluation environment are unchanged."""
    entries = tuple(
        CtxEntry(e.name, Mode.ZERO, e.ty, e.defined) for e in ctx.entries
    )
    return Context(entries, ctx.env, flag=False)


def check_zeroing(store: MetaStore, ctx: Context, t: Term, ty: Value) -> None:
    """Re-check a term in the zeroed context, as an erased judgment.

    Under the flag representation zeroing is the identity on syntax, so the
    whole content of the translation is this well-typedness transport; a
    failure indicates a bug rather than a user error.
    """
    try:
        co.kernel_check(store, zero_ctx(ctx).erased(), t, ty)
    except Diagnostic as e:
        raise InternalError(f"zeroed judgment failed to re-check: {e.message}") from e


def strip_modes(t: Term) -> Term:
    """Rewrite every mode annotation in a term to omega."""
    w = Mode.OMEGA
    match t:
        case co.Lam(name, _, icit, body):
            return co.Lam(name, w, icit, strip_modes(body))
        case co.App(_, icit, fn, arg):
            return co.App(w, icit, strip_modes(fn), strip_modes(arg))
        case co.Pi(name, _, icit, dom, cod):
            return co.Pi(name, w, icit, strip_modes(dom), strip_modes(cod))
        case co.Sigma(name, _, fst_ty, snd_ty):
            return co.Sigma(name, w, strip_modes(fst_ty), strip_modes(snd_ty))
        case co.Pair(_, fst, snd):
            return co.Pair(w, strip_modes(fst), strip_modes(snd))
        case co.Fst(_, pair):
            return co.Fst(w, strip_modes(pair))
        case co.Snd(_, pair):
            return co.Snd(w, strip_modes(pair))
        case co.Succ(arg):
            return co.Succ(strip_modes(arg))
        case co.NatElim(motive, zcase, scase, scrut):
            return co.NatElim(
                strip_modes(motive),
                strip_modes(zcase),
                strip_modes(scase),
                strip_modes(scrut),
            )
        case co.BoolElim(motive, tcase, fcase, scrut):
            return co.BoolElim(
                strip_modes(motive),
                strip_modes(tcase),
                strip_modes(fcase),
                strip_modes(scrut),
            )
        case co.Let(name, ty, defn, body):
            return co.Let(name, strip_modes(ty), strip_modes(defn), strip_modes(body))
        case co.InsertedMeta() | co.Meta():
            raise InternalError("metavariable in a term being mode-stripped")
        case _:
            return t


def recheck_stripped(store: MetaStore, stripped_sig: Context, t: Term, ty: Term) -> None:
    """Check the stripped term against the stripped type in the all-omega,
    flag-set configuration (plain MLTT)."""
    try:
        ty_v = evaluate(stripped_sig.env, ty)
        co.kernel_check(store, stripped_sig.erased(), ty, co.VUniv())
        co.kernel_check(store, stripped_sig.erased(), t, ty_v)
    except Diagnostic as e:
        raise InternalError(f"stripped judgment failed to re-check: {e.message}") from e


@dataclass(frozen=True)
class SweepRow:
    name: str
    zeroing_ok: bool
    stripping_ok: bool
    detail: str = ""


def sweep(result: ElabResult) -> list[SweepRow]:
    """Run both translations over every declaration of an elaborated module."""
    rows: list[SweepRow] = []
    sig = Context()
    stripped_sig = Context()
    for d in result.decls:
        zero_ok = strip_ok = True
        detail = ""
        try:
            check_zeroing(result.store, sig.erased(), d.ty, co.VUniv())
            check_zeroing(result.store, sig, d.body, d.ty_value)
        except InternalError as e:
            zero_ok = False
            detail = e.message
        s_ty = strip_modes(d.ty)
        s_body = strip_modes(d.body)
        try:
            recheck_stripped(result.store, stripped_sig, s_body, s_ty)
        except InternalError as e:
            strip_ok = False
            detail = e.message
        rows.append(SweepRow(d.name, zero_ok, strip_ok, detail))
        sig = sig.define(d.name, Mode.OMEGA, d.ty_value, d.body_value)
        s_ty_v = evaluate(stripped_sig.env, s_ty)
        s_body_v = evaluate(stripped_sig.env, s_body)
        stripped_sig = stripped_sig.define(d.name, Mode.OMEGA, s_ty_v, s_body_v)
    return rows
