"""Wrapper induction from a labeled region of interest.

Learn an extraction template outward from the operator's pasted display
text, re-extract labeled records from sibling pages, and flag template
drift by comparing tag-balance signatures.
"""

from .errors import (
    AmbiguousAttribute,
    AmbiguousRegion,
    AmbiguousRoi,
    AttributeNotFound,
    DelimiterCollision,
    DelimiterNotFound,
    HttpError,
    NetworkError,
    RegionNotFound,
    RoiLost,
    RoiNotFound,
    RoiwrapError,
    TemplateNotFound,
    TooLarge,
)
from .page_model import (
    DEFAULT_TAG_CLASSES,
    NormalizedText,
    PageBundle,
    TagClass,
    TagClassConfig,
    TagToken,
    TokenKind,
    build_page,
    classify_tag,
    load_tag_class_config,
    normalize,
    render_text,
    strip_text_format_tags,
    tokenize,
)
from .segmenter import RoiAttribute, RoiLocation, RoiSpec, locate_roi, roi_occurrences, split_page
from .skeleton_metrics import (
    PartMetrics,
    PartTree,
    Side,
    Signature,
    Symmetry,
    TreeNode,
    build_part_tree,
    layout_skeleton,
    part_metrics,
    signature,
)
from .template_store import (
    AttributeDelimiter,
    Template,
    induce_delimiters,
    induce_template,
    list_templates,
    load_template,
    save_template,
)
from .change_detector import ChangedSide, ChangeReport, compare, recheck
from .extractor import ExtractionRecord, extract, locate_roi_by_template
from .fetcher import FetchOptions, PageSource, fetch, fetch_page

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
