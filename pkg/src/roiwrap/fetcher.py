"""Page retrieval from local files and HTTP(S) URLs.

Local file refs are first-class so everything downstream runs offline.
Decoding never throws: the charset comes from headers, then meta tags, then
falls back to UTF-8, and invalid byte sequences become replacement
characters.
"""

from __future__ import annotations

import codecs
import re
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .errors import HttpError, NetworkError, TooLarge
from .page_model import DEFAULT_TAG_CLASSES, PageBundle, TagClassConfig, build_page
from .template_store import now_stamp

_MAX_REDIRECTS = 5


@dataclass(frozen=True)
class FetchOptions:
    timeout: float = 10.0
    max_bytes: int = 10_000_000
    user_agent: str = "roiwrap/0.1"


@dataclass(frozen=True)
class PageSource:
    source_ref: str
    raw: bytes
    decoded: str
    charset: str
    fetched_at: str
    status: int  # HTTP status, 0 for local files


_META_CHARSET_RE = re.compile(rb"""<meta[^>]+charset\s*=\s*["']?\s*([a-zA-Z0-9._-]+)""", re.IGNORECASE)


def _sniff_charset(raw: bytes, header_charset: str | None) -> str:
    for cand in (header_charset,):
        if cand and _known_codec(cand):
            return cand
    m = _META_CHARSET_RE.search(raw[:4096])
    if m:
        cand = m.group(1).decode("ascii", "replace")
        if _known_codec(cand):
            return cand
    return "utf-8"


def _known_codec(name: str) -> bool:
    try:
        codecs.lookup(name)
        return True
    except LookupError:
        return False


class _CappedRedirects(urllib.request.HTTPRedirectHandler):
    max_redirections = _MAX_REDIRECTS


def _fetch_http(url: str, options: FetchOptions) -> PageSource:
    request = urllib.request.Request(url, headers={"User-Agent": options.user_agent})
    opener = urllib.request.build_opener(_CappedRedirects())
    try:
        with opener.open(request, timeout=options.timeout) as resp:
            raw = resp.read(options.max_bytes + 1)
            if len(raw) > options.max_bytes:
                raise TooLarge(f"response exceeds {options.max_bytes} bytes: {url}")
            status = getattr(resp, "status", resp.getcode())
            header_charset = resp.headers.get_content_charset()
    except urllib.error.HTTPError as exc:
        if exc.code >= 400:
            raise HttpError(exc.code, f"HTTP {exc.code} fetching {url}") from exc
        raise NetworkError(f"redirect failure fetching {url}: {exc}") from exc
    except (urllib.error.URLError, socket.timeout, ConnectionError, OSError) as exc:
        raise NetworkError(f"cannot fetch {url}: {exc}") from exc
    charset = _sniff_charset(raw, header_charset)
    return PageSource(
        source_ref=url,
        raw=raw,
        decoded=raw.decode(charset, errors="replace"),
        charset=charset,
        fetched_at=now_stamp(),
        status=status,
    )


def _fetch_file(source_ref: str, path: Path, options: FetchOptions) -> PageSource:
    if not path.is_file():
        raise FileNotFoundError(f"no such page file: {path}")
    if path.stat().st_size > options.max_bytes:
        raise TooLarge(f"file exceeds {options.max_bytes} bytes: {path}")
    raw = path.read_bytes()
    charset = _sniff_charset(raw, None)
    return PageSource(
        source_ref=source_ref,
        raw=raw,
        decoded=raw.decode(charset, errors="replace"),
        charset=charset,
        fetched_at=now_stamp(),
        status=0,
    )


def fetch(source_ref: str, options: FetchOptions | None = None) -> PageSource:
    """Retrieve one page by URL or filesystem path."""
    options = options or FetchOptions()
    if source_ref.startswith(("http://", "https://")):
        return _fetch_http(source_ref, options)
    if source_ref.startswith("file://"):
        return _fetch_file(source_ref, Path(source_ref[len("file://"):]), options)
    return _fetch_file(source_ref, Path(source_ref), options)


def fetch_page(
    source_ref: str,
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
    options: FetchOptions | None = None,
) -> PageBundle:
    """Fetch and prepare a page for analysis."""
    src = fetch(source_ref, options)
    return build_page(src.decoded, config, source_ref=source_ref)
