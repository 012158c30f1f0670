"""Command line driver: check, elaborate, normalise, extract, run and
verify the mode translations over `.tt0` files."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import core as co
from . import extract as ex
from . import translate
from .diagnostics import Diagnostic, InternalError
from .elab import ElabResult, closed_definition, closed_main, elaborate_text

JSON_VERSION = 1

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_USAGE = 2
EXIT_FUEL = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tt0", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("file", help="input .tt0 file")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--no-color", action="store_true", help="plain diagnostics")

    sp = sub.add_parser("check", help="elaborate and re-check every declaration")
    common(sp)

    sp = sub.add_parser("elab", help="print the elaborated core terms")
    common(sp)

    sp = sub.add_parser("nf", help="print the normal form of a definition")
    common(sp)
    sp.add_argument("--def", dest="name", required=True, metavar="NAME")

    sp = sub.add_parser("extract", help="print the extracted runtime program")
    common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--def", dest="name", metavar="NAME")
    g.add_argument("--main", action="store_true")

    sp = sub.add_parser("run", help="extract main, evaluate it, print the result")
    common(sp)
    sp.add_argument("--fuel", type=int, default=None, metavar="N")

    sp = sub.add_parser("meta", help="re-check the zeroed and mode-stripped module")
    common(sp)

    return p


class _Reporter:
    def __init__(self, source: str | None, use_json: bool, color: bool):
        self.source = source
        self.use_json = use_json
        self.color = color

    def emit(self, diags: list[Diagnostic]) -> None:
        if self.use_json:
            payload = {
                "version": JSON_VERSION,
                "diagnostics": [d.to_json() for d in diags],
            }
            print(json.dumps(payload), file=sys.stderr)
            return
        for d in diags:
            text = d.render(self.source)
            if self.color:
                text = text.replace("error:", "\x1b[31merror:\x1b[0m", 1)
            print(text, file=sys.stderr)


def _load(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _elaborate(path: str, reporter_args: tuple[bool, bool]) -> tuple[ElabResult | None, _Reporter, int]:
    use_json, no_color = reporter_args
    color = not no_color and sys.stderr.isatty()
    try:
        source = _load(path)
    except OSError as e:
        rep = _Reporter(None, use_json, color)
        rep.emit([Diagnostic(f"cannot read {path}: {e.strerror}")])
        return None, rep, EXIT_DIAGNOSTICS
    rep = _Reporter(source, use_json, color)
    try:
        result = elaborate_text(source, path)
    except Diagnostic as e:
        rep.emit([e])
        return None, rep, EXIT_DIAGNOSTICS
    if not result.ok:
        rep.emit(result.errors)
        return None, rep, EXIT_DIAGNOSTICS
    return result, rep, EXIT_OK


def _decl_names(result: ElabResult, upto: int) -> tuple[str, ...]:
    return tuple(d.name for d in result.decls[:upto])


def cmd_check(result: ElabResult, args: argparse.Namespace) -> int:
    rows = []
    for i, d in enumerate(result.decls):
        ty = co.pp(d.ty, _decl_names(result, i))
        rows.append({"name": d.name, "type": ty})
        if not args.json:
            print(f"ok {d.name} : {ty}")
    if result.main is not None:
        ty_t = co.quote(result.store, result.sig.depth, result.main[1])
        ty = co.pp(ty_t, _decl_names(result, len(result.decls)))
        rows.append({"name": "main", "type": ty})
        if not args.json:
            print(f"ok main : {ty}")
    if args.json:
        print(json.dumps({"version": JSON_VERSION, "checked": rows}))
    return EXIT_OK


def cmd_elab(result: ElabResult, args: argparse.Namespace) -> int:
    if args.json:
        decls = [
            {"name": d.name, "type": co.to_json(d.ty), "body": co.to_json(d.body)}
            for d in result.decls
        ]
        payload: dict = {"version": JSON_VERSION, "decls": decls}
        if result.main is not None:
            payload["main"] = co.to_json(result.main[0])
        print(json.dumps(payload))
        return EXIT_OK
    for i, d in enumerate(result.decls):
        names = _decl_names(result, i)
        print(f"let {d.name} : {co.pp(d.ty, names)}")
        print(f"  = {co.pp(d.body, names)}")
    if result.main is not None:
        print(f"main = {co.pp(result.main[0], _decl_names(result, len(result.decls)))}")
    return EXIT_OK


def _named_closed(result: ElabResult, name: str) -> co.Term:
    try:
        return closed_definition(result, name)
    except KeyError:
        raise Diagnostic(f"no declaration named {name!r}") from None


def cmd_nf(result: ElabResult, args: argparse.Namespace) -> int:
    closed = _named_closed(result, args.name)
    nf = co.normal_form(result.store, (), closed)
    if args.json:
        print(json.dumps({"version": JSON_VERSION, "nf": co.to_json(nf)}))
    else:
        print(co.pp(nf))
    return EXIT_OK


def cmd_extract(result: ElabResult, args: argparse.Namespace) -> int:
    if args.main:
        if result.main is None:
            raise Diagnostic("module has no main expression")
        closed = closed_main(result)
    else:
        closed = _named_closed(result, args.name)
    target = ex.extract(co.Context(), closed)
    if args.json:
        print(json.dumps({"version": JSON_VERSION, "target": ex.target_to_json(target)}))
    else:
        print(ex.pp_target(target))
    return EXIT_OK


def cmd_run(result: ElabResult, args: argparse.Namespace) -> int:
    if result.main is None:
        raise Diagnostic("module has no main expression")
    closed = closed_main(result)
    target = ex.extract(co.Context(), closed)
    fuel: int | None
    if args.fuel is not None:
        fuel = args.fuel
    else:
        raw = os.environ.get("TT0_FUEL", str(ex.DEFAULT_FUEL))
        try:
            fuel = int(raw)
        except ValueError:
            print(f"tt0: invalid TT0_FUEL value {raw!r}", file=sys.stderr)
            return EXIT_USAGE
    if fuel == 0:
        fuel = None  # unbounded; may not terminate
    try:
        nf = ex.eval_target(target, fuel)
    except ex.FuelExhausted as e:
        _Reporter(None, args.json, False).emit([e])
        return EXIT_FUEL
    k = ex.as_numeral(nf)
    if args.json:
        payload = {"version": JSON_VERSION, "result": ex.target_to_json(nf)}
        if k is not None:
            payload["numeral"] = k
        print(json.dumps(payload))
    else:
        print(ex.pp_target(nf))
        if k is not None:
            print(f"= {k}")
    return EXIT_OK


def cmd_meta(result: ElabResult, args: argparse.Namespace) -> int:
    rows = translate.sweep(result)
    ok = all(r.zeroing_ok and r.stripping_ok for r in rows)
    if args.json:
        payload = {
            "version": JSON_VERSION,
            "decls": [
                {
                    "name": r.name,
                    "zeroing": r.zeroing_ok,
                    "stripping": r.stripping_ok,
                }
                for r in rows
            ],
            "ok": ok,
        }
        print(json.dumps(payload))
        return EXIT_OK if ok else EXIT_DIAGNOSTICS
    width = max((len(r.name) for r in rows), default=4)
    print(f"{'decl'.ljust(width)}  zeroing  stripping")
    for r in rows:
        z = "ok" if r.zeroing_ok else "FAIL"
        s = "ok" if r.stripping_ok else "FAIL"
        print(f"{r.name.ljust(width)}  {z.ljust(7)}  {s}")
    return EXIT_OK if ok else EXIT_DIAGNOSTICS


_COMMANDS = {
    "check": cmd_check,
    "elab": cmd_elab,
    "nf": cmd_nf,
    "extract": cmd_extract,
    "run": cmd_run,
    "meta": cmd_meta,
}


def main(argv: list[str] | None = None) -> int:
    sys.setrecursionlimit(100_000)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    result, rep, code = _elaborate(args.file, (args.json, args.no_color))
    if result is None:
        return code
    try:
        return _COMMANDS[args.command](result, args)
    except InternalError as e:
        rep.emit([e])
        return EXIT_DIAGNOSTICS
    except Diagnostic as e:
        rep.emit([e])
        return EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
