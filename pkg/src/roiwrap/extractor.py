"""Applying a stored template to new pages.

The region is found structurally: a displayed text run can start the region
if the unpaired-tag prefix before it equals the template's upper open path,
and can end it if the unpaired-close suffix after it equals the lower open
path. Inside the (unique) region, attribute values are sliced by walking the
induced delimiters in order; searches extend to the first displayed text
past the region, mirroring how the delimiters were induced.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import AmbiguousRegion, DelimiterNotFound, RegionNotFound
from .page_model import (
    DEFAULT_TAG_CLASSES,
    NormalizedText,
    PageBundle,
    TAG_KINDS,
    TagClass,
    TagClassConfig,
    TagToken,
    TokenKind,
)
from .skeleton_metrics import Side, part_metrics
from .template_store import canonical_tag, now_stamp

if TYPE_CHECKING:
    from .template_store import Template


@dataclass(frozen=True)
class ExtractionRecord:
    """One labeled record pulled out of one page."""

    template_id: str
    source_ref: str
    extracted_at: str
    values: tuple[tuple[str, str], ...]          # (label, normalized text)
    value_spans: tuple[tuple[int, int], ...]     # raw source spans, for audit

    def to_json_dict(self, include_spans: bool = False) -> dict:
        vals = []
        for k, (label, text) in enumerate(self.values):
            entry: dict = {"label": label, "text": text}
            if include_spans:
                entry["span"] = list(self.value_spans[k])
            vals.append(entry)
        return {
            "template_id": self.template_id,
            "source_ref": self.source_ref,
            "extracted_at": self.extracted_at,
            "values": vals,
        }


def display_groups(bundle: PageBundle) -> list[tuple[int, int]]:
    """Source spans of maximal displayed-text stretches, in document order.

    Adjacent text runs with no tag between them (inline tags are already
    stripped from the bundle) count as one stretch: the tag context cannot
    change inside it. Boundaries come from the rendered map (entity-aware),
    so they agree exactly with the spans the locator produces.
    """
    rendered = bundle.rendered
    if not rendered.text:
        return []
    # tags break segments; text/comments/doctypes don't
    segment_ids: list[int] = []
    seg = 0
    for t in bundle.tokens:
        if t.kind in TAG_KINDS:
            seg += 1
        segment_ids.append(seg)
    token_starts = [t.start for t in bundle.tokens]
    groups: list[tuple[int, int]] = []
    current = -1
    for k in range(len(rendered.text)):
        anchor = rendered.source_start(k)
        idx = bisect_right(token_starts, anchor) - 1
        sid = segment_ids[idx]
        if sid != current:
            groups.append((anchor, rendered.source_end(k)))
            current = sid
        else:
            s, _ = groups[-1]
            groups[-1] = (s, max(groups[-1][1], rendered.source_end(k)))
    return groups


def _skeleton_tokens(bundle: PageBundle, config: TagClassConfig) -> list[TagToken]:
    return [
        t for t in bundle.tokens
        if t.kind in (TokenKind.OPEN, TokenKind.CLOSE)
        and t.tag_class is TagClass.LAYOUT_FORMAT
        and t.name not in config.void
    ]


def path_candidates(
    bundle: PageBundle,
    upper_open_path: tuple[str, ...],
    lower_open_path: tuple[str, ...],
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
) -> tuple[list[int], list[int]]:
    """Start/end offsets of displayed runs whose flanking unpaired paths match."""
    groups = display_groups(bundle)
    skeleton = _skeleton_tokens(bundle, config)
    starts: list[int] = []
    ends: list[int] = []
    for s, e in groups:
        prefix = [t for t in skeleton if t.end <= s]
        if part_metrics(prefix, Side.UPPER).open_path == tuple(upper_open_path):
            starts.append(s)
        suffix = [t for t in skeleton if t.start >= e]
        if part_metrics(suffix, Side.LOWER).open_path == tuple(lower_open_path):
            ends.append(e)
    return starts, ends


def locate_roi_by_template(
    bundle: PageBundle,
    template: "Template",
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
) -> tuple[int, int]:
    """The unique source span flanked by the template's open paths."""
    starts, ends = path_candidates(bundle, template.upper_open_path, template.lower_open_path, config)
    cands = [(s, e) for s in starts for e in ends if s < e]
    if not cands:
        raise RegionNotFound("no text region matches the template's open paths")
    if len(cands) > 1:
        raise AmbiguousRegion(
            f"{len(cands)} candidate regions match the template's open paths (list page?)"
        )
    return cands[0]


def _normalized_window(rendered: NormalizedText, a: int, b: int) -> str:
    """Rendered text of the source window [a, b), trimmed."""
    starts = [p[1] for p in rendered.offset_map]
    lo = bisect_left(starts, a)
    hi = bisect_left(starts, b)
    return rendered.text[lo:hi].strip()


def extract(
    template: "Template",
    bundle: PageBundle,
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
) -> ExtractionRecord:
    """Slice the located region into labeled values using the delimiters.

    The cursor walks forward only; a required delimiter occurrence that is
    missing (before the next attribute's start tag, for end delimiters)
    raises DelimiterNotFound with the offending label, the usual sign that
    the template has drifted.
    """
    region_start, region_end = locate_roi_by_template(bundle, template, config)

    groups = display_groups(bundle)
    ext_end = len(bundle.source)
    for s, _e in groups:
        if s >= region_end:
            ext_end = s
            break

    tags = [
        t for t in bundle.tokens
        if t.kind in TAG_KINDS and t.start >= region_start and t.end <= ext_end
    ]
    canon = [canonical_tag(t) for t in tags]

    def find_tag(want: str, lo: int, hi: int) -> int | None:
        for i in range(lo, hi):
            if canon[i] == want:
                return i
        return None

    delims = sorted(template.delimiters, key=lambda d: d.ordinal)
    values: list[tuple[str, str]] = []
    spans: list[tuple[int, int]] = []
    cursor_i = 0
    cursor_char = region_start

    for k, d in enumerate(delims):
        if d.start_tag:
            i = find_tag(d.start_tag, cursor_i, len(tags))
            if i is None:
                raise DelimiterNotFound(d.label)
            vstart_char = tags[i].end
            after_i = i + 1
        else:
            vstart_char = cursor_char
            after_i = cursor_i

        # value may not run past the next attribute's start delimiter
        bound_i = len(tags)
        bound_char = region_end
        nxt = delims[k + 1] if k + 1 < len(delims) else None
        if nxt is not None and nxt.start_tag:
            j = find_tag(nxt.start_tag, after_i, len(tags))
            if j is not None:
                bound_i = j
                bound_char = tags[j].start

        if d.end_tag:
            j = find_tag(d.end_tag, after_i, bound_i)
            if j is None:
                raise DelimiterNotFound(d.label)
            vend_char = tags[j].start
            cursor_i = j + 1
            cursor_char = tags[j].end
        else:
            vend_char = bound_char
            cursor_i = bound_i
            cursor_char = bound_char

        values.append((d.label, _normalized_window(bundle.rendered, vstart_char, vend_char)))
        spans.append((vstart_char, vend_char))

    return ExtractionRecord(
        template_id=template.id,
        source_ref=bundle.source_ref,
        extracted_at=now_stamp(),
        values=tuple(values),
        value_spans=tuple(spans),
    )
