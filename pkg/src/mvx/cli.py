"""Command-line front end.

Exit codes: 0 success / everything holds, 1 a semantic negative (violations,
failed constraints, disagreement), 2 an operational error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import MvxError, ParseError
from .metrics import coc, load_corpus, render_report, run_corpus
from .model import ObjRef, check_conformance, load_metamodel_file, load_model_file
from .registry import load_registry_file
from .validation import Verdict, check_transition, execute_query, validate_model
from .values import from_portable, render, to_portable

OK, NEGATIVE, FAILURE = 0, 1, 2

_COLORS = {"red": "31", "green": "32", "yellow": "33", "dim": "2"}


class UsageError(Exception):
    pass


def _color_enabled(stream) -> bool:
    if os.environ.get("MVX_COLOR") == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, color: str, on: bool) -> str:
    return f"\033[{_COLORS[color]}m{text}\033[0m" if on else text


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _envelope(command: str, inputs: dict, body: dict) -> dict:
    return {
        "tool": {"name": "mvx", "version": __version__},
        "command": command,
        "inputs": {role: {"path": str(p), "sha256": _sha256(p)} for role, p in inputs.items() if p is not None},
        **body,
    }


def _emit(args, text: str | None, doc: dict | None) -> None:
    if args.format == "json":
        out = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        out = text
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def _verdict_word(v: Verdict, on: bool) -> str:
    return _paint(v.value, "green" if v is Verdict.TRUE else "red", on)


# -- commands ------------------------------------------------------------------


def _load(args):
    mm = load_metamodel_file(args.metamodel)
    return mm, load_model_file(args.model, mm)


def cmd_conform(args) -> int:
    _, store = _load(args)
    violations = check_conformance(store)
    doc = _envelope(
        "conform",
        {"metamodel": args.metamodel, "model": args.model},
        {"conformant": not violations, "violations": [v.to_dict() for v in violations]},
    )
    lines = [f"{v.object_id}\t{v.feature or '-'}\t{v.kind.value}\t{v.message}" for v in violations]
    lines.append(f"{len(violations)} violation(s)" if violations else "conformant")
    _emit(args, "\n".join(lines) + "\n", doc)
    return NEGATIVE if violations else OK


def cmd_validate(args) -> int:
    mm, store = _load(args)
    registry = load_registry_file(args.constraints, mm)
    violations = check_conformance(store)
    if violations and not args.force:
        for v in violations:
            print(f"mvx: {args.model}: {v.object_id}: {v.kind.value}: {v.message}", file=sys.stderr)
        print("mvx: model does not conform; use --force to validate anyway", file=sys.stderr)
        return FAILURE
    report = validate_model(store, registry)
    on = _color_enabled(sys.stdout) and not args.output
    lines = [
        f"{e.constraint}\t{e.object_id}\t{_verdict_word(e.verdict, on)}\t{e.severity}\t{e.message}".rstrip()
        for e in report.entries
    ]
    failing = len(report.failures())
    word = _paint("true", "green", on) if report.overall else _paint("false", "red", on)
    lines.append(f"overall: {word} ({failing} of {len(report.entries)} entries not true)")
    if violations:
        lines.append(f"warning: validated despite {len(violations)} conformance violation(s)")
    doc = _envelope(
        "validate",
        {"metamodel": args.metamodel, "model": args.model, "constraints": args.constraints},
        {**report.to_dict(), "conformanceViolations": [v.to_dict() for v in violations]},
    )
    _emit(args, "\n".join(lines) + "\n", doc)
    return OK if report.overall else NEGATIVE


def cmd_query(args) -> int:
    _, store = _load(args)
    diagnostics: list[str] = []
    value = execute_query(store, args.lang, args.expression, context=args.context, diagnostics=diagnostics)
    doc = _envelope(
        "query",
        {"metamodel": args.metamodel, "model": args.model},
        {"language": args.lang, "expression": args.expression, "result": to_portable(value),
         "diagnostics": diagnostics},
    )
    _emit(args, render(value) + "\n", doc)
    return OK


def _parse_literal(text: str):
    """CLI literal: JSON, ``@id`` for an object, otherwise a bare string."""
    if text.startswith("@") and len(text) > 1:
        return ObjRef(text[1:])
    try:
        return from_portable(json.loads(text))
    except json.JSONDecodeError:
        return text


def _parse_args_flags(pairs) -> dict:
    out = {}
    for item in pairs or ():
        name, sep, raw = item.partition("=")
        if not sep or not name:
            raise UsageError(f"malformed --arg {item!r}; expected name=value")
        if name in out:
            raise UsageError(f"argument {name!r} given twice")
        out[name] = _parse_literal(raw)
    return out


def cmd_transition(args) -> int:
    mm = load_metamodel_file(args.metamodel)
    pre = load_model_file(args.pre, mm)
    post = load_model_file(args.post, mm)
    contract = load_registry_file(args.constraints, mm).contract(args.contract)
    bindings = _parse_args_flags(args.arg)
    kw = {} if args.result is None else {"result": _parse_literal(args.result)}
    result = check_transition(pre, post, contract, args.receiver, bindings, **kw)
    if result.correct:
        status = "correct"
    elif result.admissible:
        status = "incorrect"
    else:
        status = "inadmissible"
    on = _color_enabled(sys.stdout) and not args.output
    lines = [f"pre[{i}]\t{_verdict_word(v, on)}" for i, v in enumerate(result.pre_verdicts)]
    lines += [f"post[{i}]\t{_verdict_word(v, on)}" for i, v in enumerate(result.post_verdicts)]
    lines.append(f"{result.contract} on {result.receiver}: {status}")
    doc = _envelope(
        "transition",
        {"metamodel": args.metamodel, "pre": args.pre, "post": args.post, "constraints": args.constraints},
        {**result.to_dict(), "status": status, "args": {k: to_portable(v) for k, v in bindings.items()}},
    )
    _emit(args, "\n".join(lines) + "\n", doc)
    return OK if result.correct else NEGATIVE


def cmd_corpus(args) -> int:
    corpus = load_corpus(args.corpus, args.fixtures)
    report = run_corpus(corpus)
    inputs = {"corpus": args.corpus}
    for name, fx in sorted(corpus.fixtures.items()):
        inputs[f"fixture:{name}:metamodel"] = fx.metamodel_path
        inputs[f"fixture:{name}:model"] = fx.model_path
    doc = _envelope("corpus", inputs, report.to_dict())
    text = render_report(report, "text")
    for e in report.disagreements:
        text += f"DISAGREE {e.id}: ocl {render(from_portable(e.oclVerdict))} vs navex {render(from_portable(e.navexVerdict))}\n"
    _emit(args, text, doc)
    return OK if report.aggregates.agreementRate == 1.0 else NEGATIVE


def cmd_metrics(args) -> int:
    rows = [(t, coc(t)) for t in args.text]
    if args.corpus:
        corpus = load_corpus(args.corpus)
        for e in sorted(corpus.entries, key=lambda e: e.id):
            for side in (e.ocl, e.navex):
                if side is not None:
                    rows.append((side, coc(side)))
    doc = _envelope(
        "metrics",
        {"corpus": args.corpus} if args.corpus else {},
        {"coc": [{"text": t, "coc": n} for t, n in rows]},
    )
    _emit(args, "".join(f"{n}\t{t}\n" for t, n in rows), doc)
    return OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mvx", description="Validate, query and compare constraint languages over models.")
    p.add_argument("--version", action="version", version=f"mvx {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("-o", "--output", metavar="PATH", help="write the report here instead of stdout")

    sp = sub.add_parser("conform", help="check a model against its metamodel")
    sp.add_argument("--metamodel", required=True)
    sp.add_argument("--model", required=True)
    common(sp)
    sp.set_defaults(func=cmd_conform)

    sp = sub.add_parser("validate", help="evaluate a constraint registry over a model")
    sp.add_argument("--metamodel", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--constraints", required=True, help="registry JSON or .ocl file")
    sp.add_argument("--force", action="store_true", help="validate even if the model does not conform")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("query", help="evaluate one expression")
    sp.add_argument("--metamodel", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--lang", choices=("ocl", "navex"), required=True)
    sp.add_argument("--context", metavar="ID", help="bind self/data to this object instead of the model root")
    sp.add_argument("expression")
    common(sp)
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("transition", help="check a pre/post state pair against an operation contract")
    sp.add_argument("--metamodel", required=True)
    sp.add_argument("--pre", required=True)
    sp.add_argument("--post", required=True)
    sp.add_argument("--constraints", required=True, help="registry JSON or .ocl file holding the contract")
    sp.add_argument("--contract", required=True, help="operation name or Class::operation")
    sp.add_argument("--receiver", required=True)
    sp.add_argument("--arg", action="append", metavar="NAME=VALUE")
    sp.add_argument("--result", metavar="VALUE")
    common(sp)
    sp.set_defaults(func=cmd_transition)

    sp = sub.add_parser("corpus", help="run the paired-expression corpus")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--fixtures", metavar="DIR", help="resolve fixture paths here (default: next to the corpus)")
    common(sp)
    sp.set_defaults(func=cmd_corpus)

    sp = sub.add_parser("metrics", help="character counts (whitespace excluded)")
    sp.add_argument("--corpus", help="also count every text in this corpus")
    sp.add_argument("text", nargs="*")
    common(sp)
    sp.set_defaults(func=cmd_metrics)
    return p


def _describe(exc: Exception) -> str:
    if isinstance(exc, ParseError):
        return str(exc)
    if isinstance(exc, MvxError):
        where = f"{exc.path}: " if exc.path else ""
        return f"{where}{exc.kind}: {exc.message}"
    if isinstance(exc, OSError):
        return f"{exc.filename}: {exc.strerror}" if exc.filename else str(exc)
    return str(exc)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else FAILURE
    try:
        return args.func(args)
    except (MvxError, OSError, UsageError) as exc:
        print(f"mvx: error: {_describe(exc)}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":
    sys.exit(main())
