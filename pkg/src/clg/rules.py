"""Element-context rule engine.

Each built-in rule is bound to a context selector, an element path suffix
such as ``safetyadvice/cause``, and runs on every text block whose path ends
with it. Severities are configurable per rule; ``off`` disables a rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator

from . import morphlex, termbase
from .docmodel import (
    DEFAULT_ABBREVIATIONS,
    EXCLAMATION,
    PERIOD,
    QUESTION,
    DocumentTree,
    Sentence,
    Span,
    TextBlock,
    extract_text_blocks,
    split_sentences,
)
from .morphlex import Lexicon, NoSegmentationError
from .termbase import Termbase

ERROR = "error"
WARNING = "warning"
INFO = "info"
OFF = "off"
SEVERITIES = (ERROR, WARNING, INFO, OFF)
_SEVERITY_RANK = {INFO: 0, WARNING: 1, ERROR: 2}

DEFAULT_MAX_TOKENS = 12


class RuleConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class RuleSetting:
    selector: str
    severity: str
    option: str | None = None


# rule id -> default selector, severity and option
DEFAULTS: dict[str, RuleSetting] = {
    "STEP-IMPERATIVE": RuleSetting("action/step", ERROR),
    "CAUSE-SAFETY-ELLIPSIS": RuleSetting("safetyadvice/cause", ERROR),
    "CAUSE-SAFETY-EXCLAIM": RuleSetting("safetyadvice/cause", ERROR),
    "CAUSE-ERROR-SENTENCE": RuleSetting("errordescription/cause", ERROR),
    "CAUSE-ERROR-PERIOD": RuleSetting("errordescription/cause", ERROR),
    "SYMPTOM-NO-QUESTION": RuleSetting("symptom", ERROR),
    "NO-PASSIVE": RuleSetting("*", WARNING),
    "COMPOUND-LENGTH": RuleSetting("*", ERROR),
    "TERM-DEPRECATED": RuleSetting("*", ERROR),
    "TERM-AMBIGUOUS": RuleSetting("*", INFO),
    "MAX-TOKENS": RuleSetting("cause", INFO, str(DEFAULT_MAX_TOKENS)),
    "ANALYSIS-SKIPPED": RuleSetting("*", OFF),
}


@dataclass(frozen=True)
class RuleConfig:
    entries: dict[str, RuleSetting]

    @classmethod
    def default(cls) -> "RuleConfig":
        return cls(dict(DEFAULTS))

    def with_severity(self, rule_id: str, severity: str) -> "RuleConfig":
        if rule_id not in self.entries:
            raise RuleConfigError(f"unknown rule id {rule_id!r}")
        if severity not in SEVERITIES:
            raise RuleConfigError(f"invalid severity {severity!r}")
        entries = dict(self.entries)
        entries[rule_id] = replace(entries[rule_id], severity=severity)
        return RuleConfig(entries)


def _validate_selector(selector: str) -> bool:
    if selector == "*":
        return True
    return all(part and not part.isspace() for part in selector.split("/"))


def parse_rule_config(lines: Iterable[str]) -> RuleConfig:
    """Merge ``rule_id<TAB>selector<TAB>severity[<TAB>option]`` lines into the defaults."""
    entries = dict(DEFAULTS)
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise RuleConfigError("expected rule_id, selector, severity[, option]", lineno)
        rule_id, selector, severity = (f.strip() for f in fields[:3])
        if rule_id not in DEFAULTS:
            raise RuleConfigError(f"unknown rule id {rule_id!r}", lineno)
        if severity not in SEVERITIES:
            raise RuleConfigError(f"invalid severity {severity!r}", lineno)
        if not _validate_selector(selector):
            raise RuleConfigError(f"invalid context selector {selector!r}", lineno)
        option = fields[3].strip() if len(fields) == 4 else entries[rule_id].option
        if rule_id == "MAX-TOKENS":
            if not (option or "").isdigit() or int(option) < 1:
                raise RuleConfigError(f"MAX-TOKENS needs a positive integer, got {option!r}", lineno)
        entries[rule_id] = RuleSetting(selector, severity, option)
    return RuleConfig(entries)


def load_rule_config(path: str | Path | None) -> RuleConfig:
    """Read a rule config; ``None`` or a missing file yields the defaults."""
    if path is None or not Path(path).exists():
        return RuleConfig.default()
    with open(path, encoding="utf-8-sig") as f:
        return parse_rule_config(f)


def selector_matches(selector: str, element_path: tuple[str, ...]) -> bool:
    if selector == "*":
        return True
    parts = selector.split("/")
    if len(parts) > len(element_path):
        return False
    tail = element_path[len(element_path) - len(parts):]
    return all(p == "*" or p == name for p, name in zip(parts, tail))


@dataclass(frozen=True)
class Diagnostic:
    rule_id: str
    severity: str
    file: str
    span: Span
    element_path: tuple[str, ...]
    message: str
    suggestion: str | None = None

    def sort_key(self) -> tuple:
        return (self.span.line, self.span.column, self.rule_id, self.span.end, self.message)


@dataclass(frozen=True)
class Finding:
    """Rule output before severity and file are attached."""

    rule_id: str
    span: Span
    message: str
    suggestion: str | None = None
    # downgrade target for findings weaker than the rule's main violation
    cap: str | None = None


@dataclass
class _Context:
    lex: Lexicon
    tb: Termbase
    cfg: RuleConfig

    def option(self, rule_id: str) -> str | None:
        return self.cfg.entries[rule_id].option


def _span_between(a: Span, b: Span) -> Span:
    return Span(a.start, b.end, a.line, a.column)


def _finite_verbs(sentence: Sentence, lex: Lexicon) -> list:
    # finite verbs are lowercase except at the start of a sentence; capitalized
    # matches elsewhere are nominalized infinitives ("beim Wenden")
    return [
        tok
        for i, tok in enumerate(sentence.tokens)
        if morphlex.is_finite_verb_form(tok.surface, lex)
        and (i == 0 or not tok.surface[:1].isupper())
    ]


def _quote(text: str) -> str:
    return f"'{text}'"


def rule_step_imperative(block, sentences, ctx):
    if not sentences:
        return
    first = sentences[0]
    toks = first.tokens
    if (
        len(toks) >= 2
        and morphlex.is_infinitive_form(toks[0].surface, ctx.lex)
        and toks[1].surface == "Sie"
    ):
        return
    yield Finding(
        "STEP-IMPERATIVE",
        first.span,
        "step must start with the formal imperative (infinitive followed by 'Sie')",
    )


def rule_cause_safety_ellipsis(block, sentences, ctx):
    for s in sentences:
        for tok in _finite_verbs(s, ctx.lex):
            yield Finding(
                "CAUSE-SAFETY-ELLIPSIS",
                tok.span,
                f"hazard cause must be an ellipsis without finite verb, found {_quote(tok.surface)}",
            )


def rule_cause_safety_exclaim(block, sentences, ctx):
    for s in sentences:
        if s.terminal != EXCLAMATION:
            yield Finding(
                "CAUSE-SAFETY-EXCLAIM", s.span, "hazard cause must end with an exclamation point"
            )


def rule_cause_error_sentence(block, sentences, ctx):
    for s in sentences:
        if not _finite_verbs(s, ctx.lex):
            yield Finding(
                "CAUSE-ERROR-SENTENCE",
                s.span,
                "error cause must be a full sentence with a finite verb",
            )


def rule_cause_error_period(block, sentences, ctx):
    for s in sentences:
        if s.terminal != PERIOD:
            yield Finding("CAUSE-ERROR-PERIOD", s.span, "error cause must end with a period")


def rule_symptom_no_question(block, sentences, ctx):
    for s in sentences:
        problems = []
        if s.terminal == QUESTION:
            problems.append("question mark")
        if s.tokens and ctx.lex.is_question_word(s.tokens[0].surface):
            problems.append(f"question word {_quote(s.tokens[0].surface)}")
        if not _finite_verbs(s, ctx.lex):
            problems.append("no finite verb")
        if problems:
            yield Finding(
                "SYMPTOM-NO-QUESTION",
                s.span,
                "symptom must be a statement with a finite verb, not a question: "
                + ", ".join(problems),
            )


_PARTICIPLE_RE = re.compile(r"^ge[^\W\d_]{2,}(?:t|en)$")


def _werden_forms(lex: Lexicon) -> frozenset[str]:
    verb = lex.verb("werden")
    return verb.finite_forms if verb else frozenset()


def rule_no_passive(block, sentences, ctx):
    werden = _werden_forms(ctx.lex)
    for s in sentences:
        toks = s.tokens
        for i, tok in enumerate(toks):
            if tok.surface.lower() not in werden:
                continue
            if i > 0 and tok.surface[:1].isupper():
                continue
            for later in toks[i + 1:]:
                w = later.surface
                if ctx.lex.is_known_participle(w) or (w.islower() and _PARTICIPLE_RE.match(w)):
                    yield Finding(
                        "NO-PASSIVE",
                        _span_between(tok.span, later.span),
                        f"avoid passive voice: {_quote(tok.surface)} ... {_quote(w)}",
                    )
                    break
            else:
                continue
            break


def rule_compound_length(block, sentences, ctx):
    for s in sentences:
        for tok in s.tokens:
            w = tok.surface
            if not w[:1].isupper() or not w.isalpha():
                continue
            try:
                count = morphlex.count_lexical_morphemes(w, ctx.lex)
            except NoSegmentationError:
                continue
            if count > 4:
                yield Finding(
                    "COMPOUND-LENGTH",
                    tok.span,
                    f"{_quote(w)} has {count} lexical morphemes; no more than 4 are allowed",
                )
            elif count == 4:
                yield Finding(
                    "COMPOUND-LENGTH",
                    tok.span,
                    f"{_quote(w)} has 4 lexical morphemes; 3 are preferred",
                    cap=WARNING,
                )


def _term_hits(sentences, ctx):
    for s in sentences:
        for tok in s.tokens:
            hits = termbase.lookup(ctx.tb, tok.surface)
            if hits:
                yield tok, hits


def rule_term_deprecated(block, sentences, ctx):
    for tok, hits in _term_hits(sentences, ctx):
        # an occurrence that is valid for some concept is left to TERM-AMBIGUOUS
        if any(status != termbase.DEPRECATED for _, status in hits):
            continue
        preferred = []
        for cid in sorted({cid for cid, _ in hits}):
            entry = ctx.tb.preferred(cid, "de")
            if entry is not None and entry.surface not in preferred:
                preferred.append(entry.surface)
        suggestion = " / ".join(preferred) or None
        message = f"deprecated term {_quote(tok.surface)}"
        if suggestion:
            message += f"; use {_quote(suggestion)}"
        yield Finding("TERM-DEPRECATED", tok.span, message, suggestion)


def rule_term_ambiguous(block, sentences, ctx):
    for tok, hits in _term_hits(sentences, ctx):
        ids = sorted({cid for cid, _ in hits})
        if len(ids) >= 2:
            yield Finding(
                "TERM-AMBIGUOUS",
                tok.span,
                f"term {_quote(tok.surface)} denotes several concepts: {', '.join(ids)}",
            )


def rule_max_tokens(block, sentences, ctx):
    limit = int(ctx.option("MAX-TOKENS") or DEFAULT_MAX_TOKENS)
    for s in sentences:
        if len(s.tokens) > limit:
            yield Finding(
                "MAX-TOKENS",
                s.span,
                f"sentence has {len(s.tokens)} words; keep it short (at most {limit})",
            )


def rule_analysis_skipped(block, sentences, ctx):
    for s in sentences:
        for i, tok in enumerate(s.tokens):
            w = tok.surface
            if i == 0 or not w[:1].isupper() or not w.isalpha():
                continue
            try:
                morphlex.segment_compound(w, ctx.lex)
            except NoSegmentationError:
                yield Finding(
                    "ANALYSIS-SKIPPED", tok.span, f"cannot analyze {_quote(w)}: not in lexicon"
                )


Rule = Callable[[TextBlock, list, _Context], Iterator[Finding]]

RULES: dict[str, Rule] = {
    "STEP-IMPERATIVE": rule_step_imperative,
    "CAUSE-SAFETY-ELLIPSIS": rule_cause_safety_ellipsis,
    "CAUSE-SAFETY-EXCLAIM": rule_cause_safety_exclaim,
    "CAUSE-ERROR-SENTENCE": rule_cause_error_sentence,
    "CAUSE-ERROR-PERIOD": rule_cause_error_period,
    "SYMPTOM-NO-QUESTION": rule_symptom_no_question,
    "NO-PASSIVE": rule_no_passive,
    "COMPOUND-LENGTH": rule_compound_length,
    "TERM-DEPRECATED": rule_term_deprecated,
    "TERM-AMBIGUOUS": rule_term_ambiguous,
    "MAX-TOKENS": rule_max_tokens,
    "ANALYSIS-SKIPPED": rule_analysis_skipped,
}


def _capped(severity: str, cap: str | None) -> str:
    if cap is None or _SEVERITY_RANK[severity] <= _SEVERITY_RANK[cap]:
        return severity
    return cap


def check_document(
    tree: DocumentTree,
    lex: Lexicon,
    tb: Termbase,
    cfg: RuleConfig | None = None,
    file: str = "<input>",
    abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS,
) -> list[Diagnostic]:
    """Run every enabled rule on the matching text blocks of ``tree``."""
    cfg = cfg or RuleConfig.default()
    ctx = _Context(lex, tb, cfg)
    abbreviations = tuple(abbreviations)
    diagnostics = []
    for block in extract_text_blocks(tree):
        sentences = split_sentences(block, abbreviations)
        for rule_id, rule in RULES.items():
            setting = cfg.entries[rule_id]
            if setting.severity == OFF or not selector_matches(setting.selector, block.element_path):
                continue
            for f in rule(block, sentences, ctx):
                diagnostics.append(
                    Diagnostic(
                        f.rule_id,
                        _capped(setting.severity, f.cap),
                        file,
                        f.span,
                        block.element_path,
                        f.message,
                        f.suggestion,
                    )
                )
    diagnostics.sort(key=Diagnostic.sort_key)
    return diagnostics
