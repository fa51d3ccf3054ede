"""Minimal XML reader with source spans, text blocks, sentences and tokens.

Only elements, attributes, text, CDATA and the five predefined entities are
understood. Comments, processing instructions and a DOCTYPE declaration are
skipped. All offsets are character offsets into the source string; lines and
columns are 1-based.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

ENTITIES = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}
DEFAULT_ABBREVIATIONS = ("z.B.", "bzw.", "ggf.", "max.", "min.")

PERIOD = "period"
EXCLAMATION = "exclamation"
QUESTION = "question"
NO_TERMINAL = "none"
_TERMINALS = {".": PERIOD, "!": EXCLAMATION, "?": QUESTION}

_NAME_RE = re.compile(r"[^\W\d][\w.\-]*")
_ATTR_RE = re.compile(r"\s+([^\W\d][\w.\-]*)\s*=\s*(\"[^\"<]*\"|'[^'<]*')")
_ENTITY_RE = re.compile(r"&([a-z]+);")
# letters, digits; hyphen joins compounds (KBA-Walze)
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")
_SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)")


class XMLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    column: int


class LineIndex:
    """Maps character offsets to (line, column)."""

    def __init__(self, source: str):
        self.starts = [0] + [m.end() for m in re.finditer("\n", source)]

    def position(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.starts, offset)
        return line, offset - self.starts[line - 1] + 1

    def span(self, start: int, end: int) -> Span:
        line, column = self.position(start)
        return Span(start, end, line, column)


@dataclass(frozen=True)
class Text:
    value: str
    span: Span = field(compare=False)
    # source offset of every character of ``value``
    offsets: tuple[int, ...] = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class Element:
    name: str
    attributes: dict[str, str]
    children: tuple[Union["Element", Text], ...]
    span: Span = field(compare=False)

    def iter(self) -> Iterator["Element"]:
        yield self
        for child in self.children:
            if isinstance(child, Element):
                yield from child.iter()

    def text_content(self) -> str:
        return "".join(
            c.value if isinstance(c, Text) else c.text_content() for c in self.children
        )


@dataclass(frozen=True)
class DocumentTree:
    root: Element
    source: str = field(compare=False, repr=False)
    lines: LineIndex = field(compare=False, repr=False)

    def iter(self) -> Iterator[Element]:
        return self.root.iter()


@dataclass(frozen=True)
class Token:
    surface: str
    span: Span


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    terminal: str
    span: Span

    @property
    def words(self) -> list[str]:
        return [t.surface for t in self.tokens]


@dataclass(frozen=True)
class TextBlock:
    element_path: tuple[str, ...]
    text: str
    span: Span
    offsets: tuple[int, ...] = field(compare=False, repr=False)
    lines: LineIndex = field(compare=False, repr=False)

    def source_span(self, start: int, end: int) -> Span:
        """Span in the source for ``text[start:end]`` (``end`` > ``start``)."""
        return self.lines.span(self.offsets[start], self.offsets[end - 1] + 1)

    @property
    def path(self) -> str:
        return "/".join(self.element_path)


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.lines = LineIndex(source)

    def error(self, message: str, offset: int | None = None):
        line, column = self.lines.position(self.pos if offset is None else offset)
        raise XMLSyntaxError(message, line, column)

    def skip_misc(self):
        src = self.src
        while True:
            while self.pos < len(src) and (src[self.pos].isspace() or src[self.pos] == "﻿"):
                self.pos += 1
            if src.startswith("<?", self.pos):
                self.skip_until("?>", "unterminated processing instruction")
            elif src.startswith("<!--", self.pos):
                self.skip_until("-->", "unterminated comment")
            elif src.startswith("<!DOCTYPE", self.pos):
                self.skip_doctype()
            else:
                return

    def skip_until(self, marker: str, message: str):
        end = self.src.find(marker, self.pos)
        if end < 0:
            self.error(message)
        self.pos = end + len(marker)

    def skip_doctype(self):
        depth = 0
        start = self.pos
        for i in range(self.pos, len(self.src)):
            ch = self.src[i]
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == ">" and depth <= 0:
                self.pos = i + 1
                return
        self.error("unterminated DOCTYPE", start)

    def parse(self) -> DocumentTree:
        self.skip_misc()
        if not self.src.startswith("<", self.pos):
            self.error("expected root element")
        root = self.element()
        self.skip_misc()
        if self.pos != len(self.src):
            self.error("content after root element")
        return DocumentTree(root, self.src, self.lines)

    def decode(self, start: int, end: int, chars: list[str], offsets: list[int]):
        src = self.src
        i = start
        while i < end:
            ch = src[i]
            if ch == "&":
                m = _ENTITY_RE.match(src, i, end)
                if m is None or m.group(1) not in ENTITIES:
                    self.error("unknown or malformed entity reference", i)
                chars.append(ENTITIES[m.group(1)])
                offsets.append(i)
                i = m.end()
            elif ch == "<":
                self.error("unexpected '<'", i)
            else:
                chars.append(ch)
                offsets.append(i)
                i += 1

    def element(self) -> Element:
        src = self.src
        start = self.pos
        m = _NAME_RE.match(src, start + 1)
        if m is None:
            self.error("invalid element name", start + 1)
        name = m.group()
        self.pos = m.end()
        attributes: dict[str, str] = {}
        while True:
            am = _ATTR_RE.match(src, self.pos)
            if am is None:
                break
            key = am.group(1)
            if key in attributes:
                self.error(f"duplicate attribute {key!r}", am.start(1))
            chars: list[str] = []
            self.decode(am.start(2) + 1, am.end(2) - 1, chars, [])
            attributes[key] = "".join(chars)
            self.pos = am.end()
        while self.pos < len(src) and src[self.pos].isspace():
            self.pos += 1
        if src.startswith("/>", self.pos):
            self.pos += 2
            empty = Text("", self.lines.span(self.pos, self.pos))
            return Element(name, attributes, (empty,), self.lines.span(start, self.pos))
        if not src.startswith(">", self.pos):
            self.error(f"bad attribute syntax in <{name}>")
        self.pos += 1
        children: list[Element | Text] = []
        chars = []
        offsets: list[int] = []
        text_start = self.pos

        def flush():
            if chars:
                span = self.lines.span(text_start, self.pos)
                children.append(Text("".join(chars), span, tuple(offsets)))
                chars.clear()
                offsets.clear()

        while True:
            lt = src.find("<", self.pos)
            if lt < 0:
                self.error(f"unclosed element <{name}>", start)
            if not chars:
                text_start = self.pos
            self.decode(self.pos, lt, chars, offsets)
            self.pos = lt
            if src.startswith("</", lt):
                flush()
                m = _NAME_RE.match(src, lt + 2)
                if m is None or m.group() != name:
                    self.error(f"mismatched closing tag, expected </{name}>", lt)
                self.pos = m.end()
                while self.pos < len(src) and src[self.pos].isspace():
                    self.pos += 1
                if not src.startswith(">", self.pos):
                    self.error("malformed closing tag", lt)
                self.pos += 1
                break
            if src.startswith("<!--", lt):
                flush()
                self.skip_until("-->", "unterminated comment")
            elif src.startswith("<![CDATA[", lt):
                end = src.find("]]>", lt)
                if end < 0:
                    self.error("unterminated CDATA section", lt)
                if not chars:
                    text_start = lt
                body = lt + len("<![CDATA[")
                chars.extend(src[body:end])
                offsets.extend(range(body, end))
                self.pos = end + 3
            elif src.startswith("<?", lt):
                flush()
                self.skip_until("?>", "unterminated processing instruction")
            else:
                flush()
                children.append(self.element())
        if not children:
            children.append(Text("", self.lines.span(self.pos, self.pos)))
        return Element(name, attributes, tuple(children), self.lines.span(start, self.pos))


def parse_document(source: str) -> DocumentTree:
    """Parse XML text into a tree; raises XMLSyntaxError with line/column."""
    return _Parser(source).parse()


def _escape(text: str, quote: bool = False) -> str:
    text = text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    if quote:
        text = text.replace('"', "&quot;")
    return text


def serialize(node: Element | DocumentTree) -> str:
    if isinstance(node, DocumentTree):
        node = node.root
    attrs = "".join(f' {k}="{_escape(v, True)}"' for k, v in node.attributes.items())
    body = "".join(
        _escape(c.value) if isinstance(c, Text) else serialize(c) for c in node.children
    )
    return f"<{node.name}{attrs}>{body}</{node.name}>"


def extract_text_blocks(tree: DocumentTree) -> list[TextBlock]:
    """One block per element with direct non-whitespace text, in document order."""
    blocks = []

    def walk(element: Element, path: tuple[str, ...]):
        path = path + (element.name,)
        texts = [c for c in element.children if isinstance(c, Text)]
        if any(t.value.strip() for t in texts):
            text = "".join(t.value for t in texts)
            offsets = tuple(o for t in texts for o in t.offsets)
            lead = len(text) - len(text.lstrip())
            trail = len(text.rstrip())
            span = tree.lines.span(offsets[lead], offsets[trail - 1] + 1)
            blocks.append(TextBlock(path, text, span, offsets, tree.lines))
        for child in element.children:
            if isinstance(child, Element):
                walk(child, path)

    walk(tree.root, ())
    return blocks


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Word tokens of ``text`` as (surface, start, end); punctuation is dropped."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def _sentence_ranges(
    text: str, abbreviations: Iterable[str]
) -> list[tuple[int, int, str]]:
    abbrevs = tuple(a.lower() for a in abbreviations)
    lowered = text.lower()
    ranges = []
    start = 0
    for m in _SENTENCE_END_RE.finditer(text):
        end = m.end()
        if m.group() == "." and _is_abbreviation(lowered, end, abbrevs):
            continue
        if text[start:m.start()].strip():
            ranges.append((start, end, _TERMINALS[m.group()[-1]]))
        start = end
    if text[start:].strip():
        ranges.append((start, len(text), NO_TERMINAL))
    return ranges


def _is_abbreviation(lowered: str, end: int, abbrevs: tuple[str, ...]) -> bool:
    for abbrev in abbrevs:
        begin = end - len(abbrev)
        if begin >= 0 and lowered.startswith(abbrev, begin):
            if begin == 0 or not lowered[begin - 1].isalnum():
                return True
    return False


def split_sentences(
    block: TextBlock | str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS
) -> list[Sentence]:
    """Split a block (or plain string) into sentences with source spans.

    A plain string gets spans relative to itself on line 1.
    """
    if isinstance(block, str):
        text = block
        lines = LineIndex(text)

        def to_span(a: int, b: int) -> Span:
            return lines.span(a, b)

    else:
        text = block.text
        to_span = block.source_span
    sentences = []
    for start, end, terminal in _sentence_ranges(text, abbreviations):
        chunk = text[start:end]
        lead = len(chunk) - len(chunk.lstrip())
        tokens = tuple(
            Token(surface, to_span(start + a, start + b))
            for surface, a, b in tokenize(chunk)
        )
        span = to_span(start + lead, len(text[:end].rstrip()))
        sentences.append(Sentence(tokens, terminal, span))
    return sentences
