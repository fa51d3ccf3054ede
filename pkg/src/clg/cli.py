"""Command-line entry point: ``clg check``, ``clg term-lint``, ``clg reuse``.

Exit codes: 0 clean, 1 at least one error-severity finding, 2 usage, I/O or
parse failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence, TextIO

from . import termbase as tbmod
from .docmodel import XMLSyntaxError, parse_document
from .morphlex import LexiconError, load_lexicon
from .reuse import compute_reuse_stats
from .rules import (
    ERROR,
    WARNING,
    Diagnostic,
    RuleConfig,
    RuleConfigError,
    check_document,
    load_rule_config,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_FAILURE = 2

ENV_LEXICON = "CLG_LEXICON"
ENV_TERMBASE = "CLG_TERMBASE"
ENV_RULES = "CLG_RULES"

TERM_MISMATCH = "TERM-PREFERRED-MISMATCH"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    lexicon: str | None = None
    termbase: str | None = None
    rules: str | None = None
    format: str = "text"
    inputs: list[str] = field(default_factory=list)
    id_attribute: str = "id"


def _bundled(name: str) -> str:
    return str(resources.files("clg") / "data" / name)


def _resource(flag: str | None, env: str, default: str | None) -> str | None:
    if flag:
        return flag
    return os.environ.get(env) or default


def resolve(cfg: RunConfig) -> RunConfig:
    """Fill resource paths from environment variables, then bundled seeds."""
    return RunConfig(
        lexicon=_resource(cfg.lexicon, ENV_LEXICON, _bundled("lexicon.tsv")),
        termbase=_resource(cfg.termbase, ENV_TERMBASE, _bundled("termbase.tsv")),
        rules=_resource(cfg.rules, ENV_RULES, None),
        format=cfg.format,
        inputs=list(cfg.inputs),
        id_attribute=cfg.id_attribute,
    )


def collect_inputs(paths: Sequence[str]) -> list[str]:
    """Expand directories to their ``*.xml`` files, recursively and sorted."""
    files = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(str(f) for f in path.rglob("*.xml") if f.is_file()))
        elif path.is_file():
            files.append(p)
        else:
            raise UsageError(f"{p}: no such file or directory")
    return files


def _read(path: str) -> str:
    with open(path, encoding="utf-8-sig") as f:
        return f.read()


def _caret_line(source_line: str, column: int, width: int) -> str:
    prefix = "".join(ch if ch == "\t" else " " for ch in source_line[: column - 1])
    return prefix + "^" + "~" * max(0, min(width, len(source_line) - column + 1) - 1)


def format_diagnostics(
    diags: Sequence[Diagnostic], fmt: str = "machine", sources: dict[str, str] | None = None
) -> str:
    """Render diagnostics; ``machine`` is one ``file:line:col: severity rule message`` line each."""
    if fmt not in ("text", "machine"):
        raise ValueError(f"unknown format {fmt!r}")
    out = []
    lines_cache: dict[str, list[str]] = {}
    for d in diags:
        out.append(f"{d.file}:{d.span.line}:{d.span.column}: {d.severity} {d.rule_id} {d.message}\n")
        if fmt == "machine":
            continue
        source = (sources or {}).get(d.file)
        if source is not None:
            lines = lines_cache.setdefault(d.file, source.split("\n"))
            src_line = lines[d.span.line - 1].rstrip("\r")
            out.append(f"    {src_line}\n")
            out.append(f"    {_caret_line(src_line, d.span.column, d.span.end - d.span.start)}\n")
        if d.suggestion:
            out.append(f"    suggestion: {d.suggestion}\n")
    return "".join(out)


def _load_resources(cfg: RunConfig):
    try:
        lex = load_lexicon(cfg.lexicon)
        tb = tbmod.load_termbase(cfg.termbase)
        if cfg.rules is not None and not Path(cfg.rules).is_file():
            raise UsageError(f"{cfg.rules}: rule config not found")
        rules = load_rule_config(cfg.rules) if cfg.rules else RuleConfig.default()
    except OSError as exc:
        raise UsageError(f"{exc.filename}: {exc.strerror}") from exc
    except LexiconError as exc:
        raise UsageError(f"{cfg.lexicon}: {exc}") from exc
    except tbmod.TermbaseError as exc:
        raise UsageError(f"{cfg.termbase}: {exc}") from exc
    except RuleConfigError as exc:
        raise UsageError(f"{cfg.rules}: {exc}") from exc
    return lex, tb, rules


def run_check(cfg: RunConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    cfg = resolve(cfg)
    try:
        if not cfg.inputs:
            raise UsageError("check needs at least one input path")
        lex, tb, rules = _load_resources(cfg)
        files = collect_inputs(cfg.inputs)
    except UsageError as exc:
        print(f"clg: {exc}", file=err)
        return EXIT_FAILURE
    failed = False
    diagnostics: list[Diagnostic] = []
    sources = {}
    for path in files:
        try:
            source = _read(path)
            tree = parse_document(source)
        except OSError as exc:
            print(f"clg: {path}: {exc.strerror}", file=err)
            failed = True
            continue
        except UnicodeDecodeError as exc:
            print(f"clg: {path}: not valid UTF-8 ({exc.reason})", file=err)
            failed = True
            continue
        except XMLSyntaxError as exc:
            print(f"{path}:{exc}", file=err)
            failed = True
            continue
        sources[path] = source
        diagnostics.extend(check_document(tree, lex, tb, rules, path))
    out.write(format_diagnostics(diagnostics, cfg.format, sources))
    if failed:
        return EXIT_FAILURE
    return EXIT_FINDINGS if any(d.severity == ERROR for d in diagnostics) else EXIT_OK


def _finding_message(ev: tbmod.TermEvaluation, code: str, semantic_class: str) -> str:
    if code == tbmod.PATTERN_MISMATCH:
        return f"{ev.surface!r}: pattern {ev.pattern} does not fit a {semantic_class} concept"
    if code == tbmod.MORPHEMES_DISPREFERRED:
        return f"{ev.surface!r}: 4 lexical morphemes, 3 are preferred"
    if code == tbmod.MORPHEMES_EXCEEDED:
        return f"{ev.surface!r}: {ev.lexical_count} lexical morphemes, more than 4 disqualify"
    return f"{ev.surface!r}: cannot be segmented with the lexicon"


def term_lint_findings(tb, lex, concept_ids: Sequence[str]) -> list[tuple[str, str, str, str]]:
    """(concept id, severity, code, message) for each concept's German terms."""
    findings = []
    for cid in concept_ids:
        concept = tb.concepts[cid]
        terms = tb.terms_of(cid, "de")
        if not terms:
            continue
        ranked = tbmod.evaluate_preferred_term(
            [(t.surface, t.feature_focus) for t in terms], concept.semantic_class, lex
        )
        for ev in ranked:
            for code in ev.findings:
                findings.append((cid, WARNING, code, _finding_message(ev, code, concept.semantic_class)))
        stored = tb.preferred(cid, "de")
        winner = ranked[0].surface
        if stored is not None and stored.surface != winner:
            findings.append(
                (
                    cid,
                    ERROR,
                    TERM_MISMATCH,
                    f"stored preferred term {stored.surface!r}, computed winner {winner!r}",
                )
            )
    return findings


def run_term_lint(
    cfg: RunConfig, concept_id: str | None = None, out: TextIO | None = None, err: TextIO | None = None
) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    cfg = resolve(cfg)
    try:
        lex, tb, _ = _load_resources(cfg)
        if concept_id is not None and concept_id not in tb.concepts:
            raise UsageError(f"unknown concept id {concept_id!r}")
    except UsageError as exc:
        print(f"clg: {exc}", file=err)
        return EXIT_FAILURE
    ids = [concept_id] if concept_id is not None else list(tb.concepts)
    findings = term_lint_findings(tb, lex, ids)
    for cid, severity, code, message in findings:
        out.write(f"{cfg.termbase}:{cid}: {severity} {code} {message}\n")
    return EXIT_FINDINGS if any(f[1] == ERROR for f in findings) else EXIT_OK


def run_reuse(cfg: RunConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        if not cfg.inputs:
            raise UsageError("reuse needs at least one input path")
        if not cfg.id_attribute:
            raise UsageError("--id-attribute must not be empty")
        files = collect_inputs(cfg.inputs)
        trees = []
        for path in files:
            try:
                trees.append(parse_document(_read(path)))
            except XMLSyntaxError as exc:
                raise UsageError(f"{path}:{exc}") from exc
            except (OSError, UnicodeDecodeError) as exc:
                raise UsageError(f"{path}: {exc}") from exc
    except UsageError as exc:
        print(f"clg: {exc}", file=err)
        return EXIT_FAILURE
    stats = compute_reuse_stats(trees, cfg.id_attribute)
    ratio = stats.reuse_ratio
    if cfg.format == "machine":
        out.write(
            f"total_instances={stats.total_instances} unique_modules={stats.unique_modules} "
            f"reuse_ratio={ratio}\n"
        )
    else:
        out.write(f"documents:        {len(trees)}\n")
        out.write(f"module instances: {stats.total_instances}\n")
        out.write(f"unique modules:   {stats.unique_modules}\n")
        out.write(f"reuse ratio:      {ratio} ({float(ratio):.3f})\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lexicon", help=f"lexicon file (env {ENV_LEXICON})")
    common.add_argument("--termbase", help=f"termbase file (env {ENV_TERMBASE})")
    common.add_argument("--rules", help=f"rule config file (env {ENV_RULES})")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    parser = argparse.ArgumentParser(
        prog="clg", description="Controlled-language checker for German technical XML."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", parents=[common], help="check XML documents")
    check.add_argument("inputs", nargs="+", metavar="PATH")
    lint = sub.add_parser("term-lint", parents=[common], help="evaluate termbase preferred terms")
    lint.add_argument("concept", nargs="?", help="concept id (default: all)")
    reuse = sub.add_parser("reuse", parents=[common], help="module reuse statistics")
    reuse.add_argument("inputs", nargs="+", metavar="PATH")
    reuse.add_argument("--id-attribute", default="id")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_FAILURE
    cfg = RunConfig(
        lexicon=args.lexicon,
        termbase=args.termbase,
        rules=args.rules,
        format=args.format,
        inputs=list(getattr(args, "inputs", [])),
        id_attribute=getattr(args, "id_attribute", "id"),
    )
    if args.command == "check":
        return run_check(cfg)
    if args.command == "term-lint":
        return run_term_lint(cfg, args.concept)
    return run_reuse(cfg)


if __name__ == "__main__":
    sys.exit(main())
