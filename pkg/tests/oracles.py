"""Independent reference implementations used by the tests.

Neither function shares code with ``clg.morphlex.segment_compound``: the
first enumerates every cover recursively, the second asks the regex engine
whether a cover with exactly k roots exists, for k = 1, 2, ...
"""

from __future__ import annotations

import re

from clg.morphlex import LINKING, ROOT, SUFFIX, Lexicon


def enumerate_covers(word: str, lex: Lexicon) -> list[list[tuple[str, str]]]:
    """Every cover of ``word`` as a list of (surface, kind) pairs.

    A cover starts with a root; a linking element may only be followed by a
    root or the end of the word.
    """
    w = word.lower()
    by_kind = {
        kind: sorted({m.surface for m in lex.morphemes if m.kind == kind})
        for kind in (ROOT, SUFFIX, LINKING)
    }
    covers = []

    def walk(pos, prev_kind, acc):
        if pos == len(w):
            covers.append(list(acc))
            return
        for kind, surfaces in by_kind.items():
            if prev_kind is None and kind != ROOT:
                continue
            if prev_kind == LINKING and kind != ROOT:
                continue
            for s in surfaces:
                if w.startswith(s, pos):
                    acc.append((s, kind))
                    walk(pos + len(s), kind, acc)
                    acc.pop()

    walk(0, None, [])
    return covers


def brute_force_min_roots(word: str, lex: Lexicon) -> int | None:
    counts = [sum(k == ROOT for _, k in c) for c in enumerate_covers(word, lex)]
    return min(counts) if counts else None


class RegexCoverOracle:
    """Minimal root count by exhaustive backtracking in the regex engine."""

    def __init__(self, lex: Lexicon):
        def alt(kind):
            surfaces = sorted({m.surface for m in lex.morphemes if m.kind == kind}, key=len, reverse=True)
            return "(?:" + "|".join(map(re.escape, surfaces)) + ")" if surfaces else "(?!)"

        self.root, self.suffix, self.link = alt(ROOT), alt(SUFFIX), alt(LINKING)
        self._patterns: dict[int, re.Pattern] = {}

    def pattern(self, k: int) -> re.Pattern:
        if k not in self._patterns:
            unit = f"{self.root}{self.suffix}*"
            body = unit + f"(?:{self.link}?{unit})" * (k - 1) + f"{self.link}?"
            self._patterns[k] = re.compile(body)
        return self._patterns[k]

    def min_roots(self, word: str) -> int | None:
        w = word.lower()
        for k in range(1, len(w) + 1):
            if self.pattern(k).fullmatch(w):
                return k
        return None
