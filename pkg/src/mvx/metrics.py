"""Conciseness metric, paired-expression corpus, and the differential runner."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .errors import CorpusError, MvxError, ParseError
from .evaluation import Env, eval_navex, eval_ocl
from .model import ModelStore, ObjRef, load_metamodel_file, load_model_file
from .navex import parse_navex
from .ocl import ast as OA
from .ocl import parse_constraints, parse_expression
from .registry import OperationContract
from .validation import check_transition
from .values import INVALID, STORE, agree, from_portable, logic_and, render, to_portable

CATEGORIES = ("Strings", "Numerics", "Booleans", "Collections", "Iterators", "OclAny")
WHITESPACE = frozenset(" \t\r\n")

# Published figures for the same kind of comparison. Printed for context only.
REFERENCE = {"coverage": (29, 31), "meanCocOcl": 74.2, "meanCocNavex": 64.8}


def coc(text: str) -> int:
    """Characters in ``text`` other than space, tab, CR and LF."""
    return sum(1 for ch in text if ch not in WHITESPACE)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    category: str
    ocl: str | None
    navex: str | None
    fixture: str
    context: str | None = None
    expected: Any = None
    has_expected: bool = False
    notes: str = ""
    transition: dict | None = None


@dataclass
class Fixture:
    name: str
    metamodel_path: Path
    model_path: Path
    _store: ModelStore | None = None

    def store(self) -> ModelStore:
        if self._store is None:
            try:
                mm = load_metamodel_file(self.metamodel_path)
                self._store = load_model_file(self.model_path, mm)
            except OSError as exc:
                raise CorpusError(f"fixture {self.name!r}: {exc}", kind="UnknownFixture") from None
        return self._store


@dataclass
class Corpus:
    entries: list[CorpusEntry]
    fixtures: dict[str, Fixture]
    path: Path | None = None


def _entry(raw: dict, i: int) -> CorpusEntry:
    where = f"$.entries[{i}]"
    if not isinstance(raw, dict):
        raise CorpusError("entry must be an object", kind="SchemaViolation", path=where)
    for key in ("id", "category", "fixture"):
        if not isinstance(raw.get(key), str):
            raise CorpusError(f"entry needs a string {key!r}", kind="SchemaViolation", path=where)
    if raw["category"] not in CATEGORIES:
        raise CorpusError(f"unknown category {raw['category']!r}", kind="SchemaViolation", path=f"{where}.category")
    ocl, navex = raw.get("ocl"), raw.get("navex")
    if ocl is None and navex is None:
        raise CorpusError("entry has neither ocl nor navex text", kind="SchemaViolation", path=where)
    notes = raw.get("notes") or ""
    if (ocl is None or navex is None) and not notes.strip():
        raise CorpusError("a missing side must be explained in notes", kind="SchemaViolation", path=f"{where}.notes")
    return CorpusEntry(
        id=raw["id"],
        category=raw["category"],
        ocl=ocl,
        navex=navex,
        fixture=raw["fixture"],
        context=raw.get("context"),
        expected=from_portable(raw["expected"]) if raw.get("expected") is not None else None,
        has_expected=raw.get("expected") is not None,
        notes=notes,
        transition=raw.get("transition"),
    )


def load_corpus(path, fixtures_dir=None) -> Corpus:
    """Read a corpus document; fixture paths resolve against ``fixtures_dir``
    or, by default, the corpus file's directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(exc.msg, kind="SchemaViolation", path=f"{path}:{exc.lineno}:{exc.colno}") from None
    return corpus_from_doc(doc, Path(fixtures_dir) if fixtures_dir else path.parent, path)


def corpus_from_doc(doc, base: Path, path: Path | None = None) -> Corpus:
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise CorpusError("corpus must be an object with an 'entries' list", kind="SchemaViolation", path="$")
    fixtures = {}
    for name, spec in (doc.get("fixtures") or {}).items():
        try:
            fixtures[name] = Fixture(name, base / spec["metamodel"], base / spec["model"])
        except (KeyError, TypeError):
            raise CorpusError(
                "fixture needs 'metamodel' and 'model' paths", kind="SchemaViolation", path=f"$.fixtures.{name}"
            ) from None
    entries = [_entry(raw, i) for i, raw in enumerate(doc["entries"])]
    ids = [e.id for e in entries]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise CorpusError(f"duplicate entry id {dupes[0]!r}", kind="DuplicateId")
    for e in entries:
        if e.fixture not in fixtures:
            raise CorpusError(f"entry {e.id!r} names unknown fixture {e.fixture!r}", kind="UnknownFixture")
        if e.transition and e.transition.get("post") not in fixtures:
            raise CorpusError(f"entry {e.id!r} names unknown post fixture", kind="UnknownFixture")
    return Corpus(entries, fixtures, path)


# -- running ------------------------------------------------------------------


@dataclass
class SideOutcome:
    value: Any = None
    error: str | None = None


def _context(store: ModelStore, entry: CorpusEntry):
    if entry.context is None:
        return STORE
    if entry.context not in store.objects:
        raise CorpusError(
            f"entry {entry.id!r}: no object {entry.context!r} in fixture {entry.fixture!r}",
            kind="UnknownContextObject",
        )
    return ObjRef(entry.context)


def _run_declarations(text: str, entry: CorpusEntry, corpus: Corpus, store: ModelStore):
    decls = parse_constraints(text)
    result = True
    for decl in decls:
        if isinstance(decl, OA.ClassContext):
            if entry.context is not None:
                targets = [_context(store, entry)]
            else:
                targets = store.all_instances(decl.class_name)
            for ref in targets:
                for _, body in decl.invariants:
                    result = logic_and(result, eval_ocl(body, Env(store, context=ref)))
        elif isinstance(decl, OA.DeriveContext):
            if len(decls) > 1:
                raise CorpusError(f"entry {entry.id!r}: a derive entry holds one declaration", kind="SchemaViolation")
            return eval_ocl(decl.body, Env(store, context=_context(store, entry)))
        else:
            spec = entry.transition
            if not spec:
                raise CorpusError(f"entry {entry.id!r}: an operation context needs a 'transition'", kind="SchemaViolation")
            post = corpus.fixtures[spec["post"]].store()
            contract = OperationContract(
                decl.class_name, decl.sig, tuple(b for _, b in decl.pres), tuple(b for _, b in decl.posts)
            )
            args = {k: from_portable(v) for k, v in (spec.get("args") or {}).items()}
            kw = {"result": from_portable(spec["result"])} if "result" in spec else {}
            outcome = check_transition(store, post, contract, entry.context, args, **kw)
            result = logic_and(result, outcome.correct)
    return result


def run_side(language: str, text: str, entry: CorpusEntry, corpus: Corpus) -> SideOutcome:
    store = corpus.fixtures[entry.fixture].store().snapshot()
    ctx = _context(store, entry)
    try:
        if language == "ocl":
            if text.lstrip().startswith("context"):
                return SideOutcome(_run_declarations(text, entry, corpus, store))
            return SideOutcome(eval_ocl(parse_expression(text), Env(store, context=ctx)))
        # addObject and friends may write, but only to this private snapshot
        return SideOutcome(eval_navex(parse_navex(text), Env(store, context=ctx, writable=True)))
    except ParseError as exc:
        return SideOutcome(INVALID, f"ParseError at {exc.line}:{exc.column}: {exc.message}")
    except CorpusError:
        raise
    except MvxError as exc:
        return SideOutcome(INVALID, f"{exc.kind}: {exc.message}")


@dataclass
class EntryResult:
    id: str
    category: str
    oclVerdict: Any
    navexVerdict: Any
    oclError: str | None
    navexError: str | None
    agree: bool | None
    oclCoc: int | None
    navexCoc: int | None
    expectedOk: bool | None
    notes: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Aggregates:
    entries: int = 0
    paired: int = 0
    agreeing: int = 0
    oclSupported: int = 0
    navexSupported: int = 0
    oclCoverage: float = 0.0
    navexCoverage: float = 0.0
    meanCocOcl: float = 0.0
    meanCocNavex: float = 0.0
    agreementRate: float = 1.0
    expectedMismatches: int = 0


@dataclass
class CorpusReport:
    entries: list[EntryResult] = field(default_factory=list)
    aggregates: Aggregates = field(default_factory=Aggregates)

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries], "aggregates": asdict(self.aggregates)}

    @classmethod
    def from_dict(cls, doc: dict) -> "CorpusReport":
        return cls([EntryResult(**e) for e in doc["entries"]], Aggregates(**doc["aggregates"]))

    @property
    def disagreements(self) -> list[EntryResult]:
        return [e for e in self.entries if e.agree is False]


def _portable(outcome: SideOutcome | None):
    return None if outcome is None else to_portable(outcome.value)


def aggregate(results: list[EntryResult]) -> Aggregates:
    n = len(results)
    paired = [r for r in results if r.oclCoc is not None and r.navexCoc is not None]
    agg = Aggregates(entries=n, paired=len(paired))
    agg.agreeing = sum(1 for r in paired if r.agree)
    agg.oclSupported = sum(1 for r in results if r.oclCoc is not None)
    agg.navexSupported = sum(1 for r in results if r.navexCoc is not None)
    agg.oclCoverage = agg.oclSupported / n if n else 0.0
    agg.navexCoverage = agg.navexSupported / n if n else 0.0
    if paired:
        agg.meanCocOcl = sum(r.oclCoc for r in paired) / len(paired)
        agg.meanCocNavex = sum(r.navexCoc for r in paired) / len(paired)
        agg.agreementRate = agg.agreeing / len(paired)
    agg.expectedMismatches = sum(1 for r in results if r.expectedOk is False)
    return agg


def run_corpus(corpus: Corpus) -> CorpusReport:
    results = []
    for entry in sorted(corpus.entries, key=lambda e: e.id):
        ocl = run_side("ocl", entry.ocl, entry, corpus) if entry.ocl is not None else None
        nav = run_side("navex", entry.navex, entry, corpus) if entry.navex is not None else None
        agrees = None
        if ocl is not None and nav is not None:
            agrees = ocl.error is None and nav.error is None and agree(ocl.value, nav.value)
        expected_ok = None
        if entry.has_expected:
            sides = [s for s in (ocl, nav) if s is not None]
            expected_ok = all(s.error is None and agree(s.value, entry.expected) for s in sides)
        results.append(
            EntryResult(
                id=entry.id,
                category=entry.category,
                oclVerdict=_portable(ocl),
                navexVerdict=_portable(nav),
                oclError=ocl.error if ocl else None,
                navexError=nav.error if nav else None,
                agree=agrees,
                oclCoc=coc(entry.ocl) if entry.ocl is not None else None,
                navexCoc=coc(entry.navex) if entry.navex is not None else None,
                expectedOk=expected_ok,
                notes=entry.notes,
            )
        )
    return CorpusReport(results, aggregate(results))


# -- rendering ------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return "-"
    return render(from_portable(value))


def _flag(value: bool | None) -> str:
    return "-" if value is None else ("yes" if value else "NO")


def _table(rows: list[list[str]]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def render_report(report: CorpusReport, fmt: str = "text", *, truncate: int = 28) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")

    def clip(s: str) -> str:
        return s if len(s) <= truncate else s[: truncate - 3] + "..."

    header = ["id", "category", "ocl", "navex", "agree", "expected", "coc(ocl)", "coc(navex)"]
    rows = [header]
    for e in report.entries:
        rows.append(
            [
                e.id,
                e.category,
                clip("error" if e.oclError else _cell(e.oclVerdict)),
                clip("error" if e.navexError else _cell(e.navexVerdict)),
                _flag(e.agree),
                _flag(e.expectedOk),
                "-" if e.oclCoc is None else str(e.oclCoc),
                "-" if e.navexCoc is None else str(e.navexCoc),
            ]
        )
    a = report.aggregates
    lines = _table(rows)
    lines.append("")
    lines.append(f"{a.entries} entries, {a.paired} paired")
    if a.entries:
        lines.append(f"agreement       {a.agreeing}/{a.paired} ({a.agreementRate:.1%})")
        lines.append(f"ocl coverage    {a.oclSupported}/{a.entries} ({a.oclCoverage:.1%})")
        lines.append(f"navex coverage  {a.navexSupported}/{a.entries} ({a.navexCoverage:.1%})")
        lines.append(f"mean coc        ocl {a.meanCocOcl:.1f}, navex {a.meanCocNavex:.1f} (paired entries)")
        if a.expectedMismatches:
            lines.append(f"expected-value mismatches: {a.expectedMismatches}")
        errors = [e for e in report.entries if e.oclError or e.navexError]
        for e in errors:
            lines.append(f"  {e.id}: {e.oclError or e.navexError}")
    done, total = REFERENCE["coverage"]
    lines.append(
        f"reference figures (context only, not checked): coverage {done}/{total} = {done / total:.1%}, "
        f"mean coc {REFERENCE['meanCocNavex']} navigation vs {REFERENCE['meanCocOcl']} ocl"
    )
    return "\n".join(lines) + "\n"


def load_report(text: str) -> CorpusReport:
    return CorpusReport.from_dict(json.loads(text))


__all__ = [
    "CATEGORIES",
    "Corpus",
    "CorpusEntry",
    "CorpusReport",
    "EntryResult",
    "aggregate",
    "coc",
    "corpus_from_doc",
    "load_corpus",
    "load_report",
    "render_report",
    "run_corpus",
    "run_side",
]
