"""Command-line entry point: induce, check, extract, serve.

The output stream carries only JSON (one document, or one object per line
in batch mode); diagnostics go to the error stream. Exit codes are stable:
0 success / no change, 1 usage error, 2 input error, 3 template change
detected, 4 extraction failure, 5 network error.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
from concurrent.futures import ThreadPoolExecutor

from .change_detector import recheck
from .errors import (
    AmbiguousAttribute,
    AmbiguousRegion,
    AmbiguousRoi,
    AttributeNotFound,
    DelimiterNotFound,
    FetchError,
    HttpError,
    NetworkError,
    RegionNotFound,
    RoiLost,
    RoiNotFound,
    TemplateNotFound,
    TooLarge,
    error_code,
)
from .extractor import extract
from .fetcher import FetchOptions, fetch_page
from .page_model import DEFAULT_TAG_CLASSES, load_tag_class_config
from .segmenter import RoiSpec, roi_occurrences
from .template_store import induce_template, load_template, save_template, template_to_json_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_CHANGED = 3
EXIT_EXTRACTION = 4
EXIT_NETWORK = 5

_INPUT_ERRORS = (
    RoiNotFound,
    AmbiguousRoi,
    AttributeNotFound,
    AmbiguousAttribute,
    TemplateNotFound,
    RoiLost,
    FileNotFoundError,
    ValueError,
    json.JSONDecodeError,
)
_EXTRACTION_ERRORS = (RegionNotFound, AmbiguousRegion, DelimiterNotFound)
_NETWORK_ERRORS = (NetworkError, HttpError, TooLarge, FetchError)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the exit-code table wants 1
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="roiwrap", description="Induce, check and apply page extraction templates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--tag-config", help="JSON file overriding the built-in tag class sets")
        p.add_argument("--user-agent", default=None, help="User-Agent header for HTTP fetches")

    p = sub.add_parser("induce", help="learn a template from a labeled page")
    p.add_argument("--page", required=True, help="page URL or file path")
    p.add_argument("--roi", required=True, help="labeled region JSON file")
    p.add_argument("--store", required=True, help="template store directory")
    p.add_argument("--first-match", action="store_true",
                   help="take the first region occurrence instead of failing on ambiguity")
    add_common(p)

    p = sub.add_parser("check", help="compare a page against a stored template")
    p.add_argument("--template", required=True, help="template id")
    p.add_argument("--store", required=True)
    p.add_argument("--page", default=None, help="page to check (default: the template's source ref)")
    p.add_argument("--auto-replace", action="store_true",
                   help="on change, re-induce and overwrite the stored template")
    add_common(p)

    p = sub.add_parser("extract", help="pull labeled values out of pages")
    p.add_argument("--template", required=True, help="template id")
    p.add_argument("--store", required=True)
    p.add_argument("--page", default=None, help="single page URL or file path")
    p.add_argument("--batch", default=None, help="file listing one page ref per line")
    p.add_argument("--jobs", type=int, default=4, help="parallel fetches in batch mode")
    p.add_argument("--audit-spans", action="store_true", help="include raw source spans per value")
    add_common(p)

    p = sub.add_parser("serve", help="run the labeling/checking HTTP API")
    p.add_argument("--store", required=True)
    p.add_argument("--listen", default="127.0.0.1:8035", help="addr:port to bind")
    p.add_argument("--ui-dir", default=None, help="static files served at /")
    add_common(p)

    return parser


def _load_config(args):
    if getattr(args, "tag_config", None):
        return load_tag_class_config(args.tag_config)
    return DEFAULT_TAG_CLASSES


def _fetch_options(args) -> FetchOptions:
    if getattr(args, "user_agent", None):
        return FetchOptions(user_agent=args.user_agent)
    return FetchOptions()


def _cmd_induce(args) -> int:
    config = _load_config(args)
    with open(args.roi, "r", encoding="utf-8") as fh:
        roi = RoiSpec.from_json_dict(json.load(fh))
    bundle = fetch_page(args.page, config, _fetch_options(args))
    if args.first_match:
        count = roi_occurrences(bundle.rendered, roi)
        if count > 1:
            print(f"warning: region text occurs {count} times; using the first occurrence",
                  file=sys.stderr)
    template = induce_template(bundle, roi, source_ref=args.page, config=config,
                               first_match=args.first_match)
    path = save_template(template, args.store)
    print(f"saved template {template.id} -> {path}", file=sys.stderr)
    print(json.dumps(template_to_json_dict(template), indent=2))
    return EXIT_OK


def _cmd_check(args) -> int:
    config = _load_config(args)
    template = load_template(args.template, args.store)
    page_ref = args.page or template.source_ref
    bundle = fetch_page(page_ref, config, _fetch_options(args))
    report = recheck(template, bundle, config,
                     auto_replace=args.auto_replace, store_dir=args.store)
    print(json.dumps(report.to_json_dict()))
    return EXIT_OK if report.case_id == 1 else EXIT_CHANGED


def _cmd_extract(args) -> int:
    config = _load_config(args)
    template = load_template(args.template, args.store)
    if template.tag_class_version != config.version:
        print(f"warning: template was induced with tag classes {template.tag_class_version!r}, "
              f"running with {config.version!r}", file=sys.stderr)
    options = _fetch_options(args)

    if not args.page and not args.batch:
        print("extract: one of --page/--batch is required", file=sys.stderr)
        return EXIT_USAGE

    refs: list[str] = []
    if args.page:
        refs.append(args.page)
    if args.batch:
        with open(args.batch, "r", encoding="utf-8") as fh:
            refs.extend(line.strip() for line in fh if line.strip())

    out_lock = threading.Lock()

    def run_one(ref: str) -> bool:
        try:
            bundle = fetch_page(ref, config, options)
            record = extract(template, bundle, config)
            line = json.dumps(record.to_json_dict(include_spans=args.audit_spans))
            ok = True
        except (*_EXTRACTION_ERRORS, FetchError, FileNotFoundError) as exc:
            line = json.dumps({"source_ref": ref, "error": error_code(exc), "message": str(exc)})
            ok = False
        with out_lock:
            print(line)
            sys.stdout.flush()
        return ok

    if args.batch and len(refs) > 1:
        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            results = list(pool.map(run_one, refs))
    else:
        results = [run_one(r) for r in refs]

    if not all(results):
        return EXIT_EXTRACTION
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import run_server

    config = _load_config(args)
    host, _, port = args.listen.rpartition(":")
    if not host or not port.isdigit():
        print(f"serve: bad --listen value {args.listen!r} (want addr:port)", file=sys.stderr)
        return EXIT_USAGE
    run_server(args.store, host, int(port), ui_dir=args.ui_dir, config=config,
               fetch_options=_fetch_options(args))
    return EXIT_OK


_COMMANDS = {
    "induce": _cmd_induce,
    "check": _cmd_check,
    "extract": _cmd_extract,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _NETWORK_ERRORS as exc:
        print(f"roiwrap: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except _EXTRACTION_ERRORS as exc:
        print(f"roiwrap: {exc}", file=sys.stderr)
        return EXIT_EXTRACTION
    except _INPUT_ERRORS as exc:
        print(f"roiwrap: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
