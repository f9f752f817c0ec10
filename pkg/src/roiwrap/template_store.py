"""Attribute delimiter induction and template persistence.

Delimiters are the canonical layout/void tags flanking each labeled
attribute: scanning outward from the attribute's text, the nearest such tag
wins unless displayed text (or, on the left, the region start) intervenes
first. A tag squeezed between two attributes with nothing displayed between
them belongs to the *later* attribute's start. Stored templates are plain
JSON files, one per template, with a canonical key order so a save/load
cycle is byte-stable.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import TemplateNotFound
from .page_model import (
    DEFAULT_TAG_CLASSES,
    PageBundle,
    TAG_KINDS,
    TagClass,
    TagClassConfig,
    TagToken,
    TokenKind,
    classify_tag,
    normalize,
    strip_text_format_tags,
    tokenize,
)
from .segmenter import RoiLocation, RoiSpec, locate_roi, split_page
from .skeleton_metrics import Side, Signature, layout_skeleton, part_metrics, signature


def canonical_tag(token: TagToken) -> str:
    """Attribute-free lowercase form used for delimiter identity."""
    return f"</{token.name}>" if token.kind is TokenKind.CLOSE else f"<{token.name}>"


@dataclass(frozen=True)
class AttributeDelimiter:
    label: str
    start_tag: str | None
    end_tag: str | None
    ordinal: int


@dataclass(frozen=True)
class HistoryEntry:
    signature: Signature
    updated_at: str


@dataclass(frozen=True)
class Template:
    """Everything needed to re-extract and to recheck one labeled page kind."""

    id: str
    source_ref: str
    roi_spec: RoiSpec
    signature: Signature
    upper_open_path: tuple[str, ...]
    lower_open_path: tuple[str, ...]
    delimiters: tuple[AttributeDelimiter, ...]
    tag_class_version: str
    created_at: str
    updated_at: str
    history: tuple[HistoryEntry, ...] = ()


def now_stamp() -> str:
    """UTC, second precision. ROIWRAP_NOW pins it for reproducible output."""
    pinned = os.environ.get("ROIWRAP_NOW")
    if pinned:
        return pinned
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def template_id(source_ref: str, roi_spec: RoiSpec) -> str:
    """Content hash of the labeling, so re-inducing is idempotent in a store."""
    doc = json.dumps(
        {"source_ref": source_ref, "roi_spec": roi_spec.to_json_dict()},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()[:16]


def _is_displayed(token: TagToken) -> bool:
    return token.kind is TokenKind.TEXT and normalize(token.raw) != ""


def _is_boundary_tag(token: TagToken, config: TagClassConfig) -> bool:
    if token.kind not in TAG_KINDS:
        return False
    return token.name in config.void or classify_tag(token.name, config) is TagClass.LAYOUT_FORMAT


def _token_index_at(tokens: list[TagToken], offset: int) -> int:
    """Index of the token whose span contains ``offset``."""
    lo, hi = 0, len(tokens) - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        s, e = tokens[mid].source_span
        if offset < s:
            hi = mid - 1
        elif offset >= e:
            lo = mid + 1
        else:
            return mid
    raise ValueError(f"offset {offset} not covered by any token")


def induce_delimiters(
    source: str,
    loc: RoiLocation,
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
) -> list[AttributeDelimiter]:
    """Derive each attribute's (start_tag, end_tag) from its located span.

    Left scans stop at the region start; right scans run until displayed
    text, which for the last attribute means they may pick the tag sitting
    just past the region's final character. When one tag occurrence is both
    an attribute's end and the next attribute's start, the later attribute
    keeps it.
    """
    tokens = strip_text_format_tags(tokenize(source, config), config)
    roi_start = loc.roi_span[0]

    starts: list[tuple[str | None, int | None]] = []  # (canonical, token index)
    ends: list[tuple[str | None, int | None]] = []

    for label, (a, b) in loc.attribute_spans:
        # backward: nearest boundary tag before any displayed text or region start
        run_i = _token_index_at(tokens, a)
        run = tokens[run_i]
        prefix = run.raw[: a - run.start]
        found: tuple[str | None, int | None] = (None, None)
        if normalize(prefix) == "":
            for i in range(run_i - 1, -1, -1):
                t = tokens[i]
                if t.end <= roi_start:
                    break  # left the region
                if t.kind is TokenKind.TEXT:
                    if normalize(t.raw) != "":
                        break
                    continue
                if _is_boundary_tag(t, config):
                    found = (canonical_tag(t), i)
                    break
        starts.append(found)

        # forward: nearest boundary tag before any displayed text (no right bound)
        run_j = _token_index_at(tokens, b - 1)
        run = tokens[run_j]
        suffix = run.raw[b - run.start :]
        found = (None, None)
        if normalize(suffix) == "":
            for i in range(run_j + 1, len(tokens)):
                t = tokens[i]
                if t.kind is TokenKind.TEXT:
                    if normalize(t.raw) != "":
                        break
                    continue
                if _is_boundary_tag(t, config):
                    found = (canonical_tag(t), i)
                    break
        ends.append(found)

    # collision rule: a shared occurrence becomes the later attribute's start
    out: list[AttributeDelimiter] = []
    for k, (label, _span) in enumerate(loc.attribute_spans):
        start_tag, _si = starts[k]
        end_tag, ei = ends[k]
        if ei is not None and k + 1 < len(starts) and starts[k + 1][1] == ei:
            end_tag = None
        out.append(AttributeDelimiter(label=label, start_tag=start_tag, end_tag=end_tag, ordinal=k))
    return out


def induce_template(
    page: PageBundle,
    roi: RoiSpec,
    source_ref: str | None = None,
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
    *,
    first_match: bool = False,
) -> Template:
    """Run the full induction pipeline on one labeled exemplar page."""
    ref = source_ref if source_ref is not None else page.source_ref
    loc = locate_roi(page.tokens, page.rendered, roi, first_match=first_match)
    upper_src, lower_src = split_page(page.source, loc)
    upper = part_metrics(layout_skeleton(upper_src, config), Side.UPPER)
    lower = part_metrics(layout_skeleton(lower_src, config), Side.LOWER)
    sig = signature(upper, lower)
    delims = induce_delimiters(page.source, loc, config)
    stamp = now_stamp()
    return Template(
        id=template_id(ref, roi),
        source_ref=ref,
        roi_spec=roi,
        signature=sig,
        upper_open_path=upper.open_path,
        lower_open_path=lower.open_path,
        delimiters=tuple(delims),
        tag_class_version=config.version,
        created_at=stamp,
        updated_at=stamp,
        history=(),
    )


# --- persistence ----------------------------------------------------------

def template_to_json_dict(t: Template) -> dict:
    return {
        "id": t.id,
        "source_ref": t.source_ref,
        "roi_spec": t.roi_spec.to_json_dict(),
        "signature": t.signature.to_json_dict(),
        "upper_open_path": list(t.upper_open_path),
        "lower_open_path": list(t.lower_open_path),
        "delimiters": [
            {"label": d.label, "start_tag": d.start_tag, "end_tag": d.end_tag, "ordinal": d.ordinal}
            for d in t.delimiters
        ],
        "tag_class_version": t.tag_class_version,
        "created_at": t.created_at,
        "updated_at": t.updated_at,
        "history": [
            {"signature": h.signature.to_json_dict(), "updated_at": h.updated_at}
            for h in t.history
        ],
    }


def template_from_json_dict(doc: dict) -> Template:
    return Template(
        id=doc["id"],
        source_ref=doc["source_ref"],
        roi_spec=RoiSpec.from_json_dict(doc["roi_spec"]),
        signature=Signature.from_json_dict(doc["signature"]),
        upper_open_path=tuple(doc["upper_open_path"]),
        lower_open_path=tuple(doc["lower_open_path"]),
        delimiters=tuple(
            AttributeDelimiter(
                label=d["label"],
                start_tag=d["start_tag"],
                end_tag=d["end_tag"],
                ordinal=int(d["ordinal"]),
            )
            for d in doc["delimiters"]
        ),
        tag_class_version=doc["tag_class_version"],
        created_at=doc["created_at"],
        updated_at=doc["updated_at"],
        history=tuple(
            HistoryEntry(Signature.from_json_dict(h["signature"]), h["updated_at"])
            for h in doc["history"]
        ),
    )


def template_json_bytes(t: Template) -> bytes:
    return (json.dumps(template_to_json_dict(t), indent=2) + "\n").encode("utf-8")


def save_template(t: Template, store_dir: str | Path) -> Path:
    store = Path(store_dir)
    store.mkdir(parents=True, exist_ok=True)
    path = store / f"{t.id}.json"
    path.write_bytes(template_json_bytes(t))
    return path


def load_template(template_id_: str, store_dir: str | Path) -> Template:
    path = Path(store_dir) / f"{template_id_}.json"
    if not path.is_file():
        raise TemplateNotFound(f"no template {template_id_!r} in {store_dir}")
    with open(path, "r", encoding="utf-8") as fh:
        return template_from_json_dict(json.load(fh))


def list_templates(store_dir: str | Path) -> list[str]:
    """Template ids in the store, oldest update first (ties break on id)."""
    store = Path(store_dir)
    if not store.is_dir():
        return []
    entries = []
    for path in store.glob("*.json"):
        try:
            t = template_from_json_dict(json.loads(path.read_text(encoding="utf-8")))
        except (ValueError, KeyError):
            continue  # foreign file in the store directory
        entries.append((t.updated_at, t.id))
    return [tid for _stamp, tid in sorted(entries)]
