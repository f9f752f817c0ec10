"""Locating labeled display text in a page and splitting around it.

Matching happens in normalized rendered space (what the operator copied
from the browser), then maps back to source offsets through the rendered
text's anchor map. Region and attribute boundaries always land on displayed
characters, never on markup.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AmbiguousAttribute, AmbiguousRoi, AttributeNotFound, RoiNotFound
from .page_model import NormalizedText, TagToken, normalize


@dataclass(frozen=True)
class RoiAttribute:
    label: str
    text: str


@dataclass(frozen=True)
class RoiSpec:
    """The operator's pasted region text plus its ordered labeled fragments."""

    roi_text: str
    attributes: tuple[RoiAttribute, ...]

    def __post_init__(self):
        if not normalize(self.roi_text):
            raise ValueError("roi_text must contain displayed text")
        seen = set()
        for attr in self.attributes:
            if not attr.label:
                raise ValueError("attribute labels must be non-empty")
            if attr.label in seen:
                raise ValueError(f"duplicate attribute label: {attr.label!r}")
            seen.add(attr.label)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RoiSpec":
        return cls(
            roi_text=doc["roi_text"],
            attributes=tuple(RoiAttribute(a["label"], a["text"]) for a in doc.get("attributes", ())),
        )

    def to_json_dict(self) -> dict:
        return {
            "roi_text": self.roi_text,
            "attributes": [{"label": a.label, "text": a.text} for a in self.attributes],
        }


@dataclass(frozen=True)
class RoiLocation:
    """Source spans for the located region and each labeled attribute."""

    roi_span: tuple[int, int]
    attribute_spans: tuple[tuple[str, tuple[int, int]], ...]


def _occurrences(hay: str, needle: str, start: int = 0) -> list[int]:
    out = []
    i = hay.find(needle, start)
    while i >= 0:
        out.append(i)
        i = hay.find(needle, i + 1)
    return out


def roi_occurrences(rendered: NormalizedText, roi: RoiSpec) -> int:
    """How many times the normalized region text occurs on the page."""
    needle = normalize(roi.roi_text)
    return len(_occurrences(rendered.text, needle))


def _placeable(window: str, texts: list[str], start: int) -> bool:
    # greedy earliest placement decides feasibility of the remaining sequence
    c = start
    for t in texts:
        i = window.find(t, c)
        if i < 0:
            return False
        c = i + len(t)
    return True


def locate_roi(
    page_tokens: list[TagToken] | tuple[TagToken, ...],
    rendered: NormalizedText,
    roi: RoiSpec,
    *,
    first_match: bool = False,
    with_attributes: bool = True,
) -> RoiLocation:
    """Find the region's unique occurrence and each attribute inside it.

    Raises RoiNotFound / AmbiguousRoi for 0 / >1 region occurrences
    (``first_match`` downgrades the latter to taking the first), and
    AttributeNotFound / AmbiguousAttribute per label. An attribute occurrence
    counts only if every later attribute can still be placed after it, so
    ordering disambiguates repeats whenever it can.
    """
    needle = normalize(roi.roi_text)
    occ = _occurrences(rendered.text, needle)
    if not occ:
        raise RoiNotFound(f"region text not found on page: {needle[:60]!r}...")
    if len(occ) > 1 and not first_match:
        raise AmbiguousRoi(
            f"region text occurs {len(occ)} times; extend the pasted text to make it unique"
        )
    p = occ[0]
    last = p + len(needle) - 1
    roi_span = (rendered.source_start(p), rendered.source_end(last))
    if not with_attributes:
        return RoiLocation(roi_span=roi_span, attribute_spans=())

    window = rendered.text[p : p + len(needle)]
    texts = [normalize(a.text) for a in roi.attributes]
    spans: list[tuple[str, tuple[int, int]]] = []
    cursor = 0
    for k, attr in enumerate(roi.attributes):
        t = texts[k]
        if not t:
            raise AttributeNotFound(attr.label, f"attribute {attr.label!r} has no displayed text")
        cands = _occurrences(window, t, cursor)
        if not cands:
            raise AttributeNotFound(attr.label)
        valid = [q for q in cands if _placeable(window, texts[k + 1 :], q + len(t))]
        if not valid:
            # the conflict sits further down: name the first later label that fails
            c = cands[0] + len(t)
            for nk in range(k + 1, len(roi.attributes)):
                i = window.find(texts[nk], c)
                if i < 0:
                    raise AttributeNotFound(roi.attributes[nk].label)
                c = i + len(texts[nk])
            raise AttributeNotFound(attr.label)
        if len(valid) > 1:
            raise AmbiguousAttribute(attr.label)
        q = valid[0]
        spans.append((
            attr.label,
            (rendered.source_start(p + q), rendered.source_end(p + q + len(t) - 1)),
        ))
        cursor = q + len(t)
    return RoiLocation(roi_span=roi_span, attribute_spans=tuple(spans))


def split_page(source: str, loc: RoiLocation) -> tuple[str, str]:
    """Upper part before the region, lower part after it; the region itself
    belongs to neither."""
    s, e = loc.roi_span
    return source[:s], source[e:]
