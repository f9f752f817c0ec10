"""HTML lexing, tag classification, and display-text normalization.

A page is handled as a decoded character string. The lexer produces a
lossless partition of the input: every token keeps the exact source slice
it came from, so concatenating token slices reproduces the page unchanged.
Malformed markup (stray ``<``, unterminated tags) degrades to text runs
instead of failing.

Tag names are case-folded. Whether a tag is inline styling (``<b>``),
layout structure (``<tr>``) or neither comes from a TagClassConfig, so
deployments can override the built-in sets.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from html.entities import html5 as _NAMED_REFS
from pathlib import Path


class TokenKind(Enum):
    OPEN = "open-tag"
    CLOSE = "close-tag"
    SELF_CLOSING = "self-closing-tag"
    TEXT = "text-run"
    COMMENT = "comment"
    DOCTYPE = "doctype"


TAG_KINDS = (TokenKind.OPEN, TokenKind.CLOSE, TokenKind.SELF_CLOSING)


class TagClass(Enum):
    TEXT_FORMAT = "text-format"
    LAYOUT_FORMAT = "layout-format"
    OTHER = "other"


@dataclass(frozen=True)
class TagClassConfig:
    """Tag-name sets driving classification.

    ``text_format`` tags are stripped before any analysis, ``layout_format``
    tags make up the structural skeleton, ``void`` tags are self-closing even
    without a slash and can never pair. ``version`` must change whenever any
    set changes; templates record it so a stored template can be matched to
    the config that produced it.
    """

    text_format: frozenset[str]
    layout_format: frozenset[str]
    void: frozenset[str]
    version: str

    def __post_init__(self):
        object.__setattr__(self, "text_format", frozenset(n.lower() for n in self.text_format))
        object.__setattr__(self, "layout_format", frozenset(n.lower() for n in self.layout_format))
        object.__setattr__(self, "void", frozenset(n.lower() for n in self.void))
        overlap = self.text_format & self.layout_format
        if overlap:
            raise ValueError(f"tag names classified both text-format and layout-format: {sorted(overlap)}")

    @classmethod
    def from_json_dict(cls, doc: dict) -> "TagClassConfig":
        return cls(
            text_format=frozenset(doc["text_format"]),
            layout_format=frozenset(doc["layout_format"]),
            void=frozenset(doc.get("void", ())),
            version=str(doc["version"]),
        )

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "text_format": sorted(self.text_format),
            "layout_format": sorted(self.layout_format),
            "void": sorted(self.void),
        }


DEFAULT_TAG_CLASSES = TagClassConfig(
    text_format=frozenset({
        "b", "i", "em", "strong", "u", "s", "small", "big", "font",
        "sup", "sub", "span", "a", "abbr", "code", "tt",
    }),
    layout_format=frozenset({
        "html", "head", "body", "title", "table", "thead", "tbody", "tr",
        "td", "th", "div", "p", "ul", "ol", "li", "dl", "dt", "dd",
        "form", "br", "hr", "center", "blockquote",
    }),
    void=frozenset({"br", "hr", "img", "input", "meta", "link"}),
    version="default-1",
)


def load_tag_class_config(path: str | Path) -> TagClassConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return TagClassConfig.from_json_dict(json.load(fh))


def classify_tag(name: str, config: TagClassConfig) -> TagClass:
    if name in config.text_format:
        return TagClass.TEXT_FORMAT
    if name in config.layout_format:
        return TagClass.LAYOUT_FORMAT
    return TagClass.OTHER


@dataclass(frozen=True)
class TagToken:
    """One lexed tag, text run, comment or doctype.

    ``source_span`` is the half-open character span into the page the token
    came from; ``raw`` is the exact slice for that span. ``name`` is the
    case-folded tag name and empty for non-tags. ``tag_class`` is populated
    for tag kinds only.
    """

    kind: TokenKind
    name: str
    source_span: tuple[int, int]
    raw: str
    tag_class: TagClass | None = None

    @property
    def start(self) -> int:
        return self.source_span[0]

    @property
    def end(self) -> int:
        return self.source_span[1]


_TAG_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9:._-]*")


def tokenize(source: str, config: TagClassConfig = DEFAULT_TAG_CLASSES) -> list[TagToken]:
    """Lex a page into a lossless, ordered token partition.

    Never raises: constructs that cannot be read as markup come back as
    text runs, so ``"".join(t.raw for t in tokens) == source`` always holds.
    """
    tokens: list[TagToken] = []
    n = len(source)
    pos = 0

    def text(a: int, b: int) -> None:
        if b > a:
            tokens.append(TagToken(TokenKind.TEXT, "", (a, b), source[a:b]))

    def marker(kind: TokenKind, a: int, b: int) -> None:
        tokens.append(TagToken(kind, "", (a, b), source[a:b]))

    while pos < n:
        lt = source.find("<", pos)
        if lt < 0:
            text(pos, n)
            break
        text(pos, lt)
        pos = lt

        if source.startswith("<!--", pos):
            close = source.find("-->", pos + 4)
            end = n if close < 0 else close + 3
            marker(TokenKind.COMMENT, pos, end)
            pos = end
            continue

        nxt = source[pos + 1] if pos + 1 < n else ""
        if nxt in ("!", "?"):
            gt = source.find(">", pos)
            if gt < 0:
                # unterminated declaration: plain text to the end
                text(pos, n)
                break
            kind = TokenKind.DOCTYPE if source[pos + 2 : pos + 9].lower() == "doctype" else TokenKind.COMMENT
            marker(kind, pos, gt + 1)
            pos = gt + 1
            continue

        closing = nxt == "/"
        name_at = pos + (2 if closing else 1)
        m = _TAG_NAME_RE.match(source, name_at)
        if m is None:
            # stray '<' (or '</' junk): literal text up to the next '<'
            nxt_lt = source.find("<", pos + 1)
            stop = n if nxt_lt < 0 else nxt_lt
            text(pos, stop)
            pos = stop
            continue

        name = m.group(0).lower()
        i = m.end()
        quote: str | None = None
        gt = -1
        while i < n:
            c = source[i]
            if quote:
                if c == quote:
                    quote = None
            elif c in ('"', "'"):
                quote = c
            elif c == ">":
                gt = i
                break
            elif c == "<":
                break  # a new tag starts before this one closed
            i += 1
        if gt < 0:
            stop = i if i < n else n
            text(pos, stop)
            pos = stop
            continue

        end = gt + 1
        if closing:
            kind = TokenKind.CLOSE
        elif name in config.void or (gt > name_at and source[gt - 1] == "/"):
            kind = TokenKind.SELF_CLOSING
        else:
            kind = TokenKind.OPEN
        tokens.append(TagToken(kind, name, (pos, end), source[pos:end], classify_tag(name, config)))
        pos = end

    return tokens


def strip_text_format_tags(tokens: list[TagToken], config: TagClassConfig) -> list[TagToken]:
    """Drop inline-styling tags; everything else survives in order with its spans."""
    return [
        t for t in tokens
        if not (t.kind in TAG_KINDS and classify_tag(t.name, config) is TagClass.TEXT_FORMAT)
    ]


# --- character references ------------------------------------------------

_MAX_NAMED = max(len(k) for k in _NAMED_REFS)
_HEX_DIGITS = set("0123456789abcdefABCDEF")
_DEC_DIGITS = set("0123456789")


def _match_reference(s: str, i: int) -> tuple[str, int] | None:
    """Read a character reference at s[i] == '&'.

    Returns (decoded text, end index) or None when the ampersand is literal.
    Named references follow the longest-match table (legacy semicolonless
    forms included); numeric references accept decimal and hex with an
    optional semicolon. Anything unknown or invalid stays literal.
    """
    n = len(s)
    j = i + 1
    if j < n and s[j] == "#":
        k = j + 1
        digits = _DEC_DIGITS
        base = 10
        if k < n and s[k] in "xX":
            k += 1
            digits = _HEX_DIGITS
            base = 16
        start = k
        while k < n and s[k] in digits:
            k += 1
        if k == start:
            return None
        cp = int(s[start:k], base)
        end = k + 1 if k < n and s[k] == ";" else k
        if cp <= 0 or cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
            return None
        return chr(cp), end
    limit = min(n - j, _MAX_NAMED)
    for length in range(limit, 0, -1):
        key = s[j : j + length]
        if key in _NAMED_REFS:
            return _NAMED_REFS[key], j + length
    return None


@dataclass
class NormalizedText:
    """Rendered display text plus the map back into the page source.

    ``offset_map`` holds one (normalized_offset, source_offset) anchor per
    character; ``source_ends`` gives the exclusive end of the source region
    each character came from (an entity reference spans several source
    characters). Separator spaces synthesized at tag boundaries are anchored
    at the source offset of the character that follows them, which keeps the
    map monotone and inside text runs.
    """

    text: str
    offset_map: tuple[tuple[int, int], ...]
    source_ends: tuple[int, ...]

    def source_start(self, i: int) -> int:
        return self.offset_map[i][1]

    def source_end(self, i: int) -> int:
        return self.source_ends[i]


def _rewrite(chars: list[str], starts: list[int], ends: list[int]) -> tuple[list[str], list[int], list[int], bool]:
    """One decode-and-collapse pass over already-rendered text.

    Decodes character references, collapses whitespace runs to one space,
    trims the ends; reports whether the text changed so callers can iterate
    to a fixed point (decoding can uncover another reference).
    """
    text = "".join(chars)
    out_c: list[str] = []
    out_s: list[int] = []
    out_e: list[int] = []
    pending = False

    def emit(c: str, s: int, e: int) -> None:
        nonlocal pending
        if c.isspace():
            pending = True
            return
        if pending and out_c:
            out_c.append(" ")
            out_s.append(s)
            out_e.append(s)
        pending = False
        out_c.append(c)
        out_s.append(s)
        out_e.append(e)

    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "&":
            m = _match_reference(text, i)
            if m is not None:
                decoded, end = m
                span_s = starts[i]
                span_e = ends[end - 1]
                for dc in decoded:
                    emit(dc, span_s, span_e)
                i = end
                continue
        emit(c, starts[i], ends[i])
        i += 1

    return out_c, out_s, out_e, "".join(out_c) != text


def render_text(tokens: list[TagToken]) -> NormalizedText:
    """Reconstruct the display text a browser copy would yield.

    Text runs concatenate with character references decoded; every tag
    boundary and every whitespace run collapses to a single space (a ``<br>``
    is just a separator, no newline semantics); comments and doctypes are
    invisible; the ends are trimmed.
    """
    chars: list[str] = []
    starts: list[int] = []
    ends: list[int] = []
    pending = False

    def emit(c: str, s: int, e: int) -> None:
        nonlocal pending
        if c.isspace():
            pending = True
            return
        if pending and chars:
            chars.append(" ")
            starts.append(s)
            ends.append(s)
        pending = False
        chars.append(c)
        starts.append(s)
        ends.append(e)

    for tok in tokens:
        if tok.kind in TAG_KINDS:
            pending = True
            continue
        if tok.kind is not TokenKind.TEXT:
            continue  # comments/doctypes neither display nor separate
        base = tok.start
        t = tok.raw
        i = 0
        tn = len(t)
        while i < tn:
            c = t[i]
            if c == "&":
                m = _match_reference(t, i)
                if m is not None:
                    decoded, end = m
                    for dc in decoded:
                        emit(dc, base + i, base + end)
                    i = end
                    continue
            emit(c, base + i, base + i + 1)
            i += 1

    while True:
        chars, starts, ends, changed = _rewrite(chars, starts, ends)
        if not changed:
            break

    return NormalizedText(
        text="".join(chars),
        offset_map=tuple((k, s) for k, s in enumerate(starts)),
        source_ends=tuple(ends),
    )


def normalize(text: str) -> str:
    """Canonical form for display-text comparison.

    Character references decoded, whitespace runs collapsed to one space,
    ends trimmed. Idempotent: decoding iterates to a fixed point, so even
    double-encoded input settles.
    """
    if not text:
        return ""
    tok = TagToken(TokenKind.TEXT, "", (0, len(text)), text)
    return render_text([tok]).text


@dataclass(frozen=True)
class PageBundle:
    """A page ready for analysis: source, cleaned tokens, rendered text."""

    source: str
    tokens: tuple[TagToken, ...]
    rendered: NormalizedText
    source_ref: str = ""


def build_page(source: str, config: TagClassConfig = DEFAULT_TAG_CLASSES, source_ref: str = "") -> PageBundle:
    """Tokenize, strip inline-styling tags, and render the display text."""
    tokens = strip_text_format_tags(tokenize(source, config), config)
    return PageBundle(source=source, tokens=tuple(tokens), rendered=render_text(tokens), source_ref=source_ref)
