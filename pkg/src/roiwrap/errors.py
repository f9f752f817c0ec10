"""Exception types shared across the package."""


class RoiwrapError(Exception):
    """Base class for every library error."""


class RoiNotFound(RoiwrapError):
    """The pasted region text does not occur in the page's rendered text."""


class AmbiguousRoi(RoiwrapError):
    """The region text occurs more than once; the pasted text must be extended."""


class AttributeNotFound(RoiwrapError):
    def __init__(self, label: str, message: str | None = None):
        self.label = label
        super().__init__(message or f"attribute text not found in region: {label!r}")


class AmbiguousAttribute(RoiwrapError):
    def __init__(self, label: str, message: str | None = None):
        self.label = label
        super().__init__(message or f"attribute text occurs more than once in region: {label!r}")


class DelimiterCollision(RoiwrapError):
    def __init__(self, label: str, message: str | None = None):
        self.label = label
        super().__init__(message or f"cannot assign boundary tag for attribute: {label!r}")


class TemplateNotFound(RoiwrapError):
    """No stored template with the requested id."""


class RegionNotFound(RoiwrapError):
    """No text region on the page matches the template's open paths."""


class AmbiguousRegion(RoiwrapError):
    """More than one region matches the template's open paths (list page?)."""


class DelimiterNotFound(RoiwrapError):
    def __init__(self, label: str, message: str | None = None):
        self.label = label
        super().__init__(message or f"delimiter tag missing for attribute: {label!r}")


class RoiLost(RoiwrapError):
    """The labeled text is gone and no fallback segmentation exists; relabel by hand."""


class FetchError(RoiwrapError):
    """Base class for page-retrieval failures."""


class NetworkError(FetchError):
    pass


class HttpError(FetchError):
    def __init__(self, status: int, message: str | None = None):
        self.status = status
        super().__init__(message or f"HTTP error {status}")


class TooLarge(FetchError):
    pass


def error_code(exc: BaseException) -> str:
    """Stable machine-readable code for an error, shared by CLI and service."""
    table: list[tuple[type, str]] = [
        (RoiNotFound, "roi_not_found"),
        (AmbiguousRoi, "ambiguous_roi"),
        (AttributeNotFound, "attribute_not_found"),
        (AmbiguousAttribute, "ambiguous_attribute"),
        (DelimiterCollision, "delimiter_collision"),
        (TemplateNotFound, "not_found"),
        (RegionNotFound, "region_not_found"),
        (AmbiguousRegion, "ambiguous_region"),
        (DelimiterNotFound, "delimiter_not_found"),
        (RoiLost, "roi_lost"),
        (TooLarge, "too_large"),
        (HttpError, "network_error"),
        (NetworkError, "network_error"),
        (FileNotFoundError, "file_not_found"),
        (ValueError, "usage"),
    ]
    for klass, code in table:
        if isinstance(exc, klass):
            return code
    return "internal"
