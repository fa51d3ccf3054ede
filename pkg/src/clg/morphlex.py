"""Morpheme and verb lexicon, plus German word-formation analysis.

Words are segmented into roots, derivational suffixes and linking elements
(Fugenelemente). A segmentation must start with a root, and a linking
element may only be followed by a root or by the end of the word (the
latter covers plural/inflection endings such as ``Walze-n``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

ROOT = "root"
SUFFIX = "derivational-suffix"
LINKING = "linking-element"
KINDS = (ROOT, SUFFIX, LINKING)

LINKING_ELEMENTS = frozenset({"s", "n", "en", "e", "er", "es"})
REQUIRED_SUFFIXES = frozenset({"ung", "er", "or"})

# best first
FEATURES = (
    "function",
    "object",
    "working-principle",
    "shape",
    "material",
    "temporal-graduate-internal",
)
NO_FEATURE = "none"

CONVERSION = "conversion"
UNG_NOMINALIZATION = "ung-nominalization"
ER_OR_NOMINALIZATION = "er-or-nominalization"
HYPERNYM_COMPOUND = "hypernym-compound"
SIMPLEX = "simplex"
OTHER = "other"
PATTERNS = (
    CONVERSION,
    UNG_NOMINALIZATION,
    ER_OR_NOMINALIZATION,
    HYPERNYM_COMPOUND,
    SIMPLEX,
    OTHER,
)

# ties between equally long candidates at one position
_KIND_ORDER = {ROOT: 0, SUFFIX: 1, LINKING: 2}

_WORD_RE = re.compile(r"^[^\W\d_]+$")


class LexiconError(ValueError):
    """Raised for malformed or inconsistent lexicon data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoSegmentationError(ValueError):
    """The word cannot be covered by the lexicon (cannot analyze)."""

    def __init__(self, word: str):
        self.word = word
        super().__init__(f"no segmentation found for {word!r}")


@dataclass(frozen=True)
class MorphemeEntry:
    surface: str
    kind: str
    feature: str = NO_FEATURE
    is_hypernym_head: bool = False

    def __post_init__(self):
        if not self.surface:
            raise LexiconError("empty morpheme surface")
        if self.surface != self.surface.lower():
            raise LexiconError(f"morpheme surface must be lowercase: {self.surface!r}")
        if self.kind not in KINDS:
            raise LexiconError(f"unknown morpheme kind {self.kind!r}")
        if self.kind == LINKING and self.surface not in LINKING_ELEMENTS:
            raise LexiconError(f"{self.surface!r} is not an allowed linking element")
        if self.feature != NO_FEATURE:
            if self.feature not in FEATURES:
                raise LexiconError(f"unknown feature {self.feature!r}")
            if self.kind != ROOT:
                raise LexiconError(f"feature on non-root morpheme {self.surface!r}")


@dataclass(frozen=True)
class VerbEntry:
    infinitive: str
    finite_forms: frozenset[str]
    participle: str | None = None

    def __post_init__(self):
        if not self.infinitive.endswith("n"):
            raise LexiconError(f"infinitive must end in -en or -n: {self.infinitive!r}")
        if not self.finite_forms:
            raise LexiconError(f"verb {self.infinitive!r} has no finite forms")


@dataclass(frozen=True)
class Segmentation:
    # (surface as written in the input, lexicon entry)
    parts: tuple[tuple[str, MorphemeEntry], ...]

    @property
    def lexical_count(self) -> int:
        return sum(1 for _, m in self.parts if m.kind == ROOT)

    @property
    def roots(self) -> list[MorphemeEntry]:
        return [m for _, m in self.parts if m.kind == ROOT]

    def surfaces(self) -> list[str]:
        return [s for s, _ in self.parts]


@dataclass(frozen=True)
class Lexicon:
    morphemes: tuple[MorphemeEntry, ...] = ()
    verbs: tuple[VerbEntry, ...] = ()
    question_words: frozenset[str] = frozenset()
    _by_surface: dict = field(init=False, repr=False, compare=False)
    _finite: frozenset = field(init=False, repr=False, compare=False)
    _infinitives: dict = field(init=False, repr=False, compare=False)
    _participles: frozenset = field(init=False, repr=False, compare=False)
    _trie: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_surface: dict[str, list[MorphemeEntry]] = {}
        seen = set()
        for m in self.morphemes:
            if (m.surface, m.kind) in seen:
                raise LexiconError(f"duplicate {m.kind} {m.surface!r}")
            seen.add((m.surface, m.kind))
            by_surface.setdefault(m.surface, []).append(m)
        for entries in by_surface.values():
            entries.sort(key=lambda m: _KIND_ORDER[m.kind])
        finite = set()
        infinitives = {}
        participles = set()
        for v in self.verbs:
            finite.update(f.lower() for f in v.finite_forms)
            infinitives[v.infinitive.lower()] = v
            if v.participle:
                participles.add(v.participle.lower())
        object.__setattr__(self, "_by_surface", {k: tuple(v) for k, v in by_surface.items()})
        trie: dict = {}
        for surface, entries in self._by_surface.items():
            node = trie
            for ch in surface:
                node = node.setdefault(ch, {})
            node[None] = entries
        object.__setattr__(self, "_trie", trie)
        object.__setattr__(self, "_finite", frozenset(finite))
        object.__setattr__(self, "_infinitives", infinitives)
        object.__setattr__(self, "_participles", frozenset(participles))
        object.__setattr__(
            self, "question_words", frozenset(q.lower() for q in self.question_words)
        )

    def entries(self, surface: str) -> tuple[MorphemeEntry, ...]:
        return self._by_surface.get(surface.lower(), ())

    @property
    def roots(self) -> list[MorphemeEntry]:
        return [m for m in self.morphemes if m.kind == ROOT]

    def verb(self, infinitive: str) -> VerbEntry | None:
        return self._infinitives.get(infinitive.lower())

    def is_verb_root(self, root: str) -> bool:
        """True if ``root`` + -en/-n is an infinitive in the verb table."""
        root = root.lower()
        return root + "en" in self._infinitives or root + "n" in self._infinitives

    def is_known_participle(self, token: str) -> bool:
        return token.lower() in self._participles

    def is_question_word(self, token: str) -> bool:
        return token.lower() in self.question_words


def _flag(value: str, lineno: int) -> bool:
    if value not in ("0", "1"):
        raise LexiconError(f"hypernym flag must be 0 or 1, got {value!r}", lineno)
    return value == "1"


def parse_lexicon(lines: Iterable[str]) -> Lexicon:
    morphemes: list[MorphemeEntry] = []
    verbs: list[VerbEntry] = []
    questions: list[str] = []
    seen_morphemes: set[tuple[str, str]] = set()
    seen_verbs: set[str] = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        tag = fields[0]
        try:
            if tag == "M":
                if len(fields) not in (4, 5):
                    raise LexiconError("M record needs surface, kind, feature[, flag]")
                surface = fields[1].strip().lower()
                feature = fields[3].strip() or NO_FEATURE
                flag = _flag(fields[4].strip(), lineno) if len(fields) == 5 else False
                entry = MorphemeEntry(surface, fields[2].strip(), feature, flag)
                if (entry.surface, entry.kind) in seen_morphemes:
                    raise LexiconError(f"duplicate {entry.kind} {entry.surface!r}")
                seen_morphemes.add((entry.surface, entry.kind))
                morphemes.append(entry)
            elif tag == "V":
                if len(fields) not in (3, 4):
                    raise LexiconError("V record needs infinitive, finite forms[, participle]")
                infinitive = fields[1].strip().lower()
                forms = frozenset(f.strip().lower() for f in fields[2].split(",") if f.strip())
                participle = fields[3].strip().lower() if len(fields) == 4 else ""
                if infinitive in seen_verbs:
                    raise LexiconError(f"duplicate verb {infinitive!r}")
                seen_verbs.add(infinitive)
                verbs.append(VerbEntry(infinitive, forms, participle or None))
            elif tag == "Q":
                if len(fields) != 2 or not fields[1].strip():
                    raise LexiconError("Q record needs exactly one question word")
                questions.append(fields[1].strip().lower())
            else:
                raise LexiconError(f"unknown record type {tag!r}")
        except LexiconError as exc:
            if exc.line is None:
                raise LexiconError(str(exc), lineno) from None
            raise
    return Lexicon(tuple(morphemes), tuple(verbs), frozenset(questions))


def load_lexicon(path: str | Path) -> Lexicon:
    with open(path, encoding="utf-8-sig") as f:
        return parse_lexicon(f)


def _allowed(prev: MorphemeEntry | None, entry: MorphemeEntry) -> bool:
    if prev is None:
        return entry.kind == ROOT
    if prev.kind == LINKING:
        return entry.kind == ROOT
    return True


def segment_compound(word: str, lex: Lexicon) -> Segmentation:
    """Split ``word`` into lexicon morphemes with the fewest roots.

    Among segmentations with the minimal root count, the one whose segment
    lengths are lexicographically largest from the left wins; equally long
    candidates prefer root over suffix over linking element.
    """
    if not word or not _WORD_RE.match(word):
        raise NoSegmentationError(word)
    folded = word.lower()
    n = len(folded)
    if n != len(word):
        raise NoSegmentationError(word)
    trie = lex._trie
    inf = n + 1
    # free[i]: best cover of folded[i:] when any kind may come next
    # bound[i]: same, but only a root may come next (after a linking element)
    # each cell is (roots, entry, end of entry)
    free: list = [None] * (n + 1)
    bound: list = [None] * (n + 1)
    free[n] = bound[n] = (0, None, n)
    for i in range(n - 1, -1, -1):
        best_free = best_bound = (inf, None, n)
        matches = []
        node = trie
        j = i
        while j < n:
            node = node.get(folded[j])
            if node is None:
                break
            j += 1
            entries = node.get(None)
            if entries:
                matches.append((j, entries))
        # longest first; within one length the kind order is fixed by the trie
        for j, entries in reversed(matches):
            for entry in entries:
                if entry.kind == ROOT:
                    cost = free[j][0] + 1
                    if cost < best_free[0]:
                        best_free = (cost, entry, j)
                    if cost < best_bound[0]:
                        best_bound = (cost, entry, j)
                else:
                    rest = bound[j] if entry.kind == LINKING else free[j]
                    if rest[0] < best_free[0]:
                        best_free = (rest[0], entry, j)
        free[i] = best_free
        bound[i] = best_bound
    # a word starts with a root: the "bound" table has exactly that constraint
    roots, entry, j = bound[0]
    if roots >= inf:
        raise NoSegmentationError(word)
    parts = []
    i = 0
    while entry is not None:
        parts.append((word[i:j], entry))
        i = j
        _, entry, j = (bound if entry.kind == LINKING else free)[i]
    return Segmentation(tuple(parts))


def count_lexical_morphemes(word: str, lex: Lexicon) -> int:
    return segment_compound(word, lex).lexical_count


def classify_formation_pattern(word: str, lex: Lexicon) -> str:
    """Return the formation pattern tag of ``word``.

    The suffix decides before the compound head, so ``Farbreiber`` is an
    -er nominalization even though it has two roots.
    """
    if word[:1].isupper() and is_infinitive_form(word, lex):
        return CONVERSION
    seg = segment_compound(word, lex)
    parts = [m for _, m in seg.parts]
    # trailing linking element is an inflection ending, not part of the stem
    while parts and parts[-1].kind == LINKING:
        parts.pop()
    last = parts[-1]
    if last.kind == SUFFIX:
        if last.surface == "ung":
            return UNG_NOMINALIZATION
        if last.surface in ("er", "or") and len(parts) >= 2:
            before = parts[-2]
            if before.kind == ROOT and lex.is_verb_root(before.surface):
                return ER_OR_NOMINALIZATION
        return OTHER
    roots = seg.roots
    if len(roots) >= 2 and last.is_hypernym_head:
        return HYPERNYM_COMPOUND
    if len(roots) == 1 and not any(m.kind == SUFFIX for m in parts):
        return SIMPLEX
    return OTHER


def is_finite_verb_form(token: str, lex: Lexicon) -> bool:
    return token.lower() in lex._finite


def is_infinitive_form(token: str, lex: Lexicon) -> bool:
    return token.lower() in lex._infinitives
