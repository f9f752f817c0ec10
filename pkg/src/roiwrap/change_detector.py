"""Four-way change classification between stored and fresh signatures.

The two per-side balances and their gap partition every (old, new) pair into
exactly four cases: nothing changed; both sides shifted by the same amount
(the gap hides it, the balances do not); exactly one side changed; both
sides changed differently. Rechecking recomputes the signature from a fresh
page and can replace the stored template in place when drift is found.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as _replace
from enum import Enum
from pathlib import Path

from .errors import AmbiguousRoi, AttributeNotFound, AmbiguousAttribute, RoiLost, RoiNotFound
from .extractor import path_candidates
from .page_model import DEFAULT_TAG_CLASSES, PageBundle, TagClassConfig
from .segmenter import locate_roi
from .skeleton_metrics import Side, Signature, layout_skeleton, part_metrics, signature
from .template_store import (
    HistoryEntry,
    Template,
    induce_template,
    now_stamp,
    save_template,
)


class ChangedSide(Enum):
    NONE = "none"
    UPPER = "upper"
    LOWER = "lower"
    BOTH = "both"


@dataclass(frozen=True)
class ChangeReport:
    case_id: int
    changed_side: ChangedSide
    old_signature: Signature
    new_signature: Signature
    replaced: bool

    def to_json_dict(self) -> dict:
        return {
            "case": self.case_id,
            "changed_side": self.changed_side.value,
            "old_signature": self.old_signature.to_json_dict(),
            "new_signature": self.new_signature.to_json_dict(),
            "replaced": self.replaced,
        }


def compare(old: Signature, new: Signature) -> ChangeReport:
    """Classify an (old, new) signature pair into exactly one of four cases."""
    upper_changed = old.sigma_upper != new.sigma_upper
    lower_changed = old.sigma_lower != new.sigma_lower
    delta_changed = old.delta != new.delta

    if not upper_changed and not lower_changed:
        case_id, side = 1, ChangedSide.NONE
    elif not delta_changed:
        case_id, side = 2, ChangedSide.BOTH
    elif upper_changed and lower_changed:
        case_id, side = 4, ChangedSide.BOTH
    else:
        case_id = 3
        side = ChangedSide.UPPER if upper_changed else ChangedSide.LOWER

    return ChangeReport(
        case_id=case_id,
        changed_side=side,
        old_signature=old,
        new_signature=new,
        replaced=False,
    )


def _signature_of_split(source: str, span: tuple[int, int], config: TagClassConfig) -> Signature:
    upper = part_metrics(layout_skeleton(source[: span[0]], config), Side.UPPER)
    lower = part_metrics(layout_skeleton(source[span[1] :], config), Side.LOWER)
    return signature(upper, lower)


def _segment_by_paths(page: PageBundle, template: Template, config: TagClassConfig) -> tuple[int, int] | None:
    """Fallback segmentation when the labeled text is gone: use the stored
    open paths, taking the innermost (last) matching start."""
    starts, ends = path_candidates(page, template.upper_open_path, template.lower_open_path, config)
    if not starts:
        return None
    s = starts[-1]
    tail = [e for e in ends if e > s]
    if not tail:
        return None
    return s, tail[0]


def recheck(
    template: Template,
    page: PageBundle,
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
    *,
    auto_replace: bool = False,
    store_dir: str | Path | None = None,
) -> ChangeReport:
    """Compare a fresh page against the stored signature; optionally replace.

    The signature is recomputed from the stored labeled text when it is
    still locatable, else from the stored open paths. With ``auto_replace``,
    any change re-induces the template from this page, pushes the old
    signature to history and saves; that needs the labeled text, so a
    changed template whose text is gone raises RoiLost.
    """
    if auto_replace and store_dir is None:
        raise ValueError("auto_replace needs a store_dir to save into")

    roi_locatable = True
    try:
        loc = locate_roi(page.tokens, page.rendered, template.roi_spec, with_attributes=False)
        span = loc.roi_span
    except (RoiNotFound, AmbiguousRoi):
        roi_locatable = False
        seg = _segment_by_paths(page, template, config)
        if seg is None:
            raise RoiLost(
                "labeled text is gone and the stored open paths match nothing; relabel required"
            )
        span = seg

    new_sig = _signature_of_split(page.source, span, config)
    report = compare(template.signature, new_sig)

    if report.case_id != 1 and auto_replace:
        if not roi_locatable:
            raise RoiLost("template changed and the labeled text is gone; relabel required")
        try:
            fresh = induce_template(page, template.roi_spec, source_ref=template.source_ref, config=config)
        except (RoiNotFound, AmbiguousRoi, AttributeNotFound, AmbiguousAttribute) as exc:
            raise RoiLost(f"cannot re-induce template from this page: {exc}") from exc
        updated = Template(
            id=template.id,
            source_ref=template.source_ref,
            roi_spec=template.roi_spec,
            signature=fresh.signature,
            upper_open_path=fresh.upper_open_path,
            lower_open_path=fresh.lower_open_path,
            delimiters=fresh.delimiters,
            tag_class_version=fresh.tag_class_version,
            created_at=template.created_at,
            updated_at=now_stamp(),
            history=template.history + (HistoryEntry(template.signature, template.updated_at),),
        )
        save_template(updated, store_dir)
        report = _replace(report, replaced=True)

    return report
