"""Tag-balance metrics over the layout skeleton of a page part.

The skeleton of a part is its layout-format open/close tags only. A stack
matcher pairs closes with the nearest same-name pending open; a close that
does not match the stack top is left unpaired rather than force-popping, so
malformed tag soup degrades deterministically. ``sigma`` is unpaired minus
pairs and may go negative; it is never clamped.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .page_model import (
    DEFAULT_TAG_CLASSES,
    TagClass,
    TagClassConfig,
    TagToken,
    TokenKind,
    tokenize,
)

# A matched open/close couple counts as one; set to 2 to count both tags.
PAIR_UNITS = 1


class Side(Enum):
    UPPER = "upper"
    LOWER = "lower"


class Symmetry(Enum):
    FULLY_SYMMETRIC = "fully-symmetric"
    LOWER_ASYMMETRIC = "lower-asymmetric"
    UPPER_ASYMMETRIC = "upper-asymmetric"


@dataclass(frozen=True)
class PartMetrics:
    """Balance counts for one part.

    ``unpaired`` counts tags whose partner is not inside the part (their
    partner lies across the region); ``pairs`` counts matched couples lying
    wholly inside it; ``open_path`` lists the unpaired tag names in document
    order, which for the upper part is the still-open ancestor chain of the
    region, deepest last.
    """

    side: Side
    unpaired: int
    pairs: int
    sigma: int
    open_path: tuple[str, ...]


@dataclass(frozen=True)
class Signature:
    """Per-page structural signature: the two part balances and their gap."""

    sigma_upper: int
    sigma_lower: int
    delta: int
    symmetry: Symmetry

    @classmethod
    def from_sigmas(cls, sigma_upper: int, sigma_lower: int) -> "Signature":
        delta = sigma_upper - sigma_lower
        if delta == 0:
            symmetry = Symmetry.FULLY_SYMMETRIC
        elif delta < 0:
            symmetry = Symmetry.LOWER_ASYMMETRIC
        else:
            symmetry = Symmetry.UPPER_ASYMMETRIC
        return cls(sigma_upper, sigma_lower, delta, symmetry)

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Signature":
        sig = cls.from_sigmas(int(doc["sigma_upper"]), int(doc["sigma_lower"]))
        if sig.delta != int(doc["delta"]) or sig.symmetry.value != doc["symmetry"]:
            raise ValueError("inconsistent signature document")
        return sig

    def to_json_dict(self) -> dict:
        return {
            "sigma_upper": self.sigma_upper,
            "sigma_lower": self.sigma_lower,
            "delta": self.delta,
            "symmetry": self.symmetry.value,
        }


def layout_skeleton(part_source: str, config: TagClassConfig = DEFAULT_TAG_CLASSES) -> list[TagToken]:
    """Reduce a part to its layout-format open/close tags.

    Text, comments, inline-styling tags, unknown tags and voids all drop out;
    voids cannot pair so they carry no balance information.
    """
    return [
        t for t in tokenize(part_source, config)
        if t.kind in (TokenKind.OPEN, TokenKind.CLOSE)
        and t.tag_class is TagClass.LAYOUT_FORMAT
        and t.name not in config.void
    ]


def _match(skeleton: list[TagToken]) -> tuple[int, list[bool]]:
    """Stack-match a skeleton; returns (pair count, per-token unpaired flags)."""
    unpaired = [True] * len(skeleton)
    stack: list[int] = []  # indices of pending opens
    pairs = 0
    for i, tok in enumerate(skeleton):
        if tok.kind is TokenKind.OPEN:
            stack.append(i)
        elif tok.kind is TokenKind.CLOSE:
            if stack and skeleton[stack[-1]].name == tok.name:
                j = stack.pop()
                unpaired[i] = unpaired[j] = False
                pairs += 1
            # else: stray close, stays unpaired, pops nothing
    return pairs, unpaired


def part_metrics(skeleton: list[TagToken], side: Side) -> PartMetrics:
    """Balance counts for a part's skeleton (tolerates mismatched closes)."""
    pairs, unpaired = _match(skeleton)
    path = tuple(t.name for t, u in zip(skeleton, unpaired) if u)
    n_unpaired = len(path)
    return PartMetrics(
        side=side,
        unpaired=n_unpaired,
        pairs=pairs,
        sigma=n_unpaired - pairs * PAIR_UNITS,
        open_path=path,
    )


def signature(upper: PartMetrics, lower: PartMetrics) -> Signature:
    if upper.side is not Side.UPPER or lower.side is not Side.LOWER:
        raise ValueError("signature() wants (upper, lower) metrics in that order")
    return Signature.from_sigmas(upper.sigma, lower.sigma)


@dataclass(frozen=True)
class TreeNode:
    name: str
    children: tuple["TreeNode", ...] = ()


@dataclass(frozen=True)
class PartTree:
    """Diagnostic forest for a part, scanned left to right.

    Matched pairs become nodes under the nearest still-pending open (or at
    the top level); unmatched opens end up as spine roots in document order
    carrying whatever completed inside them; unmatched closes become leaves
    where they occurred. ``root_count`` is reported for inspection and is not
    a balance quantity.
    """

    roots: tuple[TreeNode, ...]
    root_count: int


def build_part_tree(skeleton: list[TagToken]) -> PartTree:
    roots: list[TreeNode] = []
    stack: list[tuple[TagToken, list[TreeNode]]] = []

    def place(node: TreeNode) -> None:
        if stack:
            stack[-1][1].append(node)
        else:
            roots.append(node)

    for tok in skeleton:
        if tok.kind is TokenKind.OPEN:
            stack.append((tok, []))
        elif tok.kind is TokenKind.CLOSE:
            if stack and stack[-1][0].name == tok.name:
                open_tok, children = stack.pop()
                place(TreeNode(open_tok.name, tuple(children)))
            else:
                place(TreeNode(tok.name))

    # leftover pending opens: the spine, in document order
    for open_tok, children in stack:
        roots.append(TreeNode(open_tok.name, tuple(children)))

    return PartTree(roots=tuple(roots), root_count=len(roots))
