"""Exception types shared across the package."""

from __future__ import annotations


class JsonSubError(Exception):
    """Base class for every error this package raises deliberately."""


class MalformedSchema(JsonSubError):
    """Input schema (or a regex inside it) violates the expected shape."""


class UnsupportedKeyword(JsonSubError):
    """Schema uses a keyword outside the supported Draft-06 subset."""

    def __init__(self, keyword: str, detail: str = ""):
        self.keyword = keyword
        msg = f"unsupported keyword: {keyword}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


class UnresolvableRef(JsonSubError):
    """$ref target is missing or not document-local."""


class UnsupportedRegexFeature(JsonSubError):
    """Regex uses a feature outside the decidable subset (backreferences, lookaround, ...)."""


class UnsupportedFeature(JsonSubError):
    """The verdict would depend on reasoning this implementation does not do."""


class BudgetExceeded(JsonSubError):
    """Step or wall-clock budget ran out; carries the stats at the point of failure."""

    def __init__(self, message: str, stats=None):
        super().__init__(message)
        self.stats = stats


class UniverseTooLarge(JsonSubError):
    """Requested enumeration bounds exceed the configured cap."""
