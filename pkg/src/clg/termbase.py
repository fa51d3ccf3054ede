"""Concept-oriented termbase: concepts carry terms in several languages.

Each concept has at most one preferred term per language; synonyms are
admitted or deprecated. Lookups are case-insensitive and tolerate a small
set of inflection endings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import morphlex
from .morphlex import Lexicon, NoSegmentationError

PREFERRED = "preferred"
ADMITTED = "admitted"
DEPRECATED = "deprecated"
STATUSES = (PREFERRED, ADMITTED, DEPRECATED)

SEMANTIC_CLASSES = ("process", "device", "part", "other")
RELATION_KINDS = ("hypernym", "hyponym", "part-of")
INFLECTION_SUFFIXES = ("en", "es", "n", "s", "e")

# formation patterns that fit each semantic class; "other" accepts anything
CLASS_PATTERNS = {
    "process": {morphlex.CONVERSION},
    "device": {morphlex.UNG_NOMINALIZATION, morphlex.ER_OR_NOMINALIZATION},
    "part": {morphlex.HYPERNYM_COMPOUND},
}

# findings produced by evaluate_preferred_term
PATTERN_MISMATCH = "FORMATION-CLASS-MISMATCH"
MORPHEMES_DISPREFERRED = "MORPHEME-COUNT-DISPREFERRED"
MORPHEMES_EXCEEDED = "MORPHEME-COUNT-EXCEEDED"
UNSEGMENTABLE = "UNSEGMENTABLE"

_LANG_RE = re.compile(r"^[a-z]{2}$")


class TermbaseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Concept:
    id: str
    semantic_class: str
    definition: str = ""
    relations: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class TermEntry:
    concept_id: str
    language: str
    surface: str
    status: str
    feature_focus: str | None = None


def fold(surface: str) -> str:
    return surface.lower()


@dataclass(frozen=True)
class Termbase:
    concepts: dict[str, Concept]
    terms: tuple[TermEntry, ...]
    index: dict[str, frozenset[tuple[str, str]]] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        index: dict[str, set[tuple[str, str]]] = {}
        for t in self.terms:
            index.setdefault(fold(t.surface), set()).add((t.concept_id, t.status))
        object.__setattr__(self, "index", {k: frozenset(v) for k, v in index.items()})

    def terms_of(self, concept_id: str, language: str | None = None) -> list[TermEntry]:
        return [
            t
            for t in self.terms
            if t.concept_id == concept_id and (language is None or t.language == language)
        ]

    def preferred(self, concept_id: str, language: str = "de") -> TermEntry | None:
        for t in self.terms_of(concept_id, language):
            if t.status == PREFERRED:
                return t
        return None


@dataclass(frozen=True)
class IntegrityFinding:
    concept_id: str
    kind: str
    message: str


def check_concept_integrity(tb: Termbase) -> list[IntegrityFinding]:
    findings = []
    preferred: dict[tuple[str, str], list[str]] = {}
    for t in tb.terms:
        if t.concept_id not in tb.concepts:
            findings.append(
                IntegrityFinding(
                    t.concept_id, "unknown-concept", f"term {t.surface!r} has no concept"
                )
            )
        if t.status == PREFERRED:
            preferred.setdefault((t.concept_id, t.language), []).append(t.surface)
    for (cid, lang), surfaces in preferred.items():
        if len(surfaces) > 1:
            findings.append(
                IntegrityFinding(
                    cid,
                    "duplicate-preferred",
                    f"{len(surfaces)} preferred {lang} terms: {', '.join(surfaces)}",
                )
            )
    for cid, concept in tb.concepts.items():
        if (cid, "de") not in preferred:
            findings.append(
                IntegrityFinding(cid, "missing-german-preferred", "no preferred German term")
            )
        for kind, target in concept.relations:
            if target not in tb.concepts:
                findings.append(
                    IntegrityFinding(
                        cid, "dangling-relation", f"{kind} relation to unknown concept {target!r}"
                    )
                )
    return sorted(findings, key=lambda f: (f.concept_id, f.kind, f.message))


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


_UNESCAPE_RE = re.compile(r"\\(.)")


def _unescape(value: str) -> str:
    return _UNESCAPE_RE.sub(lambda m: {"t": "\t", "n": "\n"}.get(m.group(1), m.group(1)), value)


def parse_termbase(lines: Iterable[str]) -> Termbase:
    concepts: dict[str, Concept] = {}
    relations: dict[str, list[tuple[str, str]]] = {}
    relation_lines: list[tuple[int, str, str, str]] = []
    terms: list[TermEntry] = []
    term_lines: list[int] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        tag = fields[0]
        if tag == "C":
            if len(fields) not in (3, 4):
                raise TermbaseError("C record needs id, class[, definition]", lineno)
            cid, cls = fields[1], fields[2]
            if not cid:
                raise TermbaseError("empty concept id", lineno)
            if cid in concepts:
                raise TermbaseError(f"duplicate concept id {cid!r}", lineno)
            if cls not in SEMANTIC_CLASSES:
                raise TermbaseError(f"unknown semantic class {cls!r}", lineno)
            definition = _unescape(fields[3]) if len(fields) == 4 else ""
            concepts[cid] = Concept(cid, cls, definition)
        elif tag == "R":
            if len(fields) != 4:
                raise TermbaseError("R record needs id, kind, target", lineno)
            _, cid, kind, target = fields
            if kind not in RELATION_KINDS:
                raise TermbaseError(f"unknown relation kind {kind!r}", lineno)
            relation_lines.append((lineno, cid, kind, target))
        elif tag == "T":
            if len(fields) not in (5, 6):
                raise TermbaseError("T record needs concept, lang, surface, status[, feature]", lineno)
            cid, lang, surface, status = fields[1:5]
            feature = fields[5] if len(fields) == 6 and fields[5] else None
            if not _LANG_RE.match(lang):
                raise TermbaseError(f"language must be a two-letter code, got {lang!r}", lineno)
            if status not in STATUSES:
                raise TermbaseError(f"unknown status {status!r}", lineno)
            if feature is not None and feature not in morphlex.FEATURES:
                raise TermbaseError(f"unknown feature {feature!r}", lineno)
            surface = _unescape(surface)
            if not surface:
                raise TermbaseError("empty term surface", lineno)
            terms.append(TermEntry(cid, lang, surface, status, feature))
            term_lines.append(lineno)
        else:
            raise TermbaseError(f"unknown record type {tag!r}", lineno)

    for lineno, cid, kind, target in relation_lines:
        if cid not in concepts:
            raise TermbaseError(f"relation from unknown concept {cid!r}", lineno)
        if target not in concepts:
            raise TermbaseError(f"dangling relation to {target!r}", lineno)
        relations.setdefault(cid, []).append((kind, target))
    preferred: set[tuple[str, str]] = set()
    for lineno, t in zip(term_lines, terms):
        if t.concept_id not in concepts:
            raise TermbaseError(f"term for unknown concept {t.concept_id!r}", lineno)
        if t.status == PREFERRED:
            key = (t.concept_id, t.language)
            if key in preferred:
                raise TermbaseError(
                    f"second preferred {t.language} term for concept {t.concept_id!r}", lineno
                )
            preferred.add(key)
    for cid, rels in relations.items():
        c = concepts[cid]
        concepts[cid] = Concept(c.id, c.semantic_class, c.definition, tuple(rels))
    return Termbase(concepts, tuple(terms))


def load_termbase(path: str | Path) -> Termbase:
    with open(path, encoding="utf-8-sig") as f:
        return parse_termbase(f)


def dump_termbase(tb: Termbase) -> str:
    out = []
    for c in tb.concepts.values():
        out.append(f"C\t{c.id}\t{c.semantic_class}\t{_escape(c.definition)}")
    for c in tb.concepts.values():
        for kind, target in c.relations:
            out.append(f"R\t{c.id}\t{kind}\t{target}")
    for t in tb.terms:
        out.append(
            f"T\t{t.concept_id}\t{t.language}\t{_escape(t.surface)}\t{t.status}\t{t.feature_focus or ''}"
        )
    return "".join(line + "\n" for line in out)


def save_termbase(tb: Termbase, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dump_termbase(tb))


def _variants(surface: str) -> list[str]:
    folded = fold(surface)
    out = [folded]
    for suffix in INFLECTION_SUFFIXES:
        if folded.endswith(suffix) and len(folded) > len(suffix) + 1:
            out.append(folded[: -len(suffix)])
    return out


def lookup(tb: Termbase, surface: str) -> set[tuple[str, str]]:
    """Concept hits for ``surface``: exact (case-folded) plus stripped endings."""
    hits: set[tuple[str, str]] = set()
    for variant in _variants(surface):
        hits.update(tb.index.get(variant, ()))
    return hits


def detect_ambiguous_terms(tb: Termbase) -> list[tuple[str, tuple[str, ...]]]:
    out = []
    for surface in sorted(tb.index):
        ids = sorted({cid for cid, _ in tb.index[surface]})
        if len(ids) >= 2:
            out.append((surface, tuple(ids)))
    return out


def find_occurrences(
    tb: Termbase, tokens: Sequence
) -> list[tuple[int, str, str]]:
    """Single-token term hits as (token index, concept id, status).

    ``tokens`` may hold strings or objects with a ``surface`` attribute.
    """
    hits = []
    for i, token in enumerate(tokens):
        surface = token if isinstance(token, str) else token.surface
        for cid, status in sorted(lookup(tb, surface)):
            hits.append((i, cid, status))
    return hits


@dataclass(frozen=True)
class TermEvaluation:
    surface: str
    feature_focus: str | None
    pattern: str | None
    lexical_count: int | None
    findings: tuple[str, ...]

    @property
    def feature_rank(self) -> int:
        if self.feature_focus in morphlex.FEATURES:
            return morphlex.FEATURES.index(self.feature_focus)
        return len(morphlex.FEATURES)

    def sort_key(self) -> tuple:
        f = self.findings
        return (
            UNSEGMENTABLE in f,
            MORPHEMES_EXCEEDED in f,
            PATTERN_MISMATCH in f,
            MORPHEMES_DISPREFERRED in f,
            self.feature_rank,
            self.surface,
            self.feature_focus or "",
        )


def _inferred_feature(seg: morphlex.Segmentation) -> str | None:
    roots = seg.roots
    # the head names the category; the distinguishing feature sits in front of it
    modifiers = roots[:-1] if len(roots) > 1 else roots
    for m in modifiers:
        if m.feature != morphlex.NO_FEATURE:
            return m.feature
    return None


def evaluate_term(
    surface: str, feature_focus: str | None, semantic_class: str, lex: Lexicon
) -> TermEvaluation:
    try:
        seg = morphlex.segment_compound(surface, lex)
    except NoSegmentationError:
        return TermEvaluation(surface, feature_focus, None, None, (UNSEGMENTABLE,))
    pattern = morphlex.classify_formation_pattern(surface, lex)
    count = seg.lexical_count
    findings = []
    allowed = CLASS_PATTERNS.get(semantic_class)
    if allowed is not None and pattern not in allowed:
        findings.append(PATTERN_MISMATCH)
    if count > 4:
        findings.append(MORPHEMES_EXCEEDED)
    elif count == 4:
        findings.append(MORPHEMES_DISPREFERRED)
    if feature_focus is None:
        feature_focus = _inferred_feature(seg)
    return TermEvaluation(surface, feature_focus, pattern, count, tuple(findings))


def evaluate_preferred_term(
    candidates: Sequence[tuple[str, str | None]], semantic_class: str, lex: Lexicon
) -> list[TermEvaluation]:
    """Rank candidate terms for a concept of the given semantic class.

    Criteria in order: formation pattern fits the class, at most three
    lexical morphemes (more than four disqualifies), feature focus rank,
    then the surface itself. The result does not depend on input order.
    """
    if not candidates:
        raise ValueError("no candidate terms to evaluate")
    if semantic_class not in SEMANTIC_CLASSES:
        raise ValueError(f"unknown semantic class {semantic_class!r}")
    evaluations = [evaluate_term(s, f, semantic_class, lex) for s, f in candidates]
    return sorted(evaluations, key=TermEvaluation.sort_key)
