"""Typed errors for every pipeline stage.

Each error carries a stable ``code`` string that is what the session state
and the HTTP API report, so the UI can switch on it without parsing
messages.
"""

from __future__ import annotations


class DblpNlqError(Exception):
    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message

    def to_dict(self) -> dict:
        return {"error": self.code, "message": self.message}


# --- vocabulary / manifest ---

class ManifestError(DblpNlqError):
    code = "ManifestError"


# --- logical-form parsing ---

class LogicalFormSyntaxError(DblpNlqError):
    """Base for parse failures; ``position`` is a 0-based token index."""

    code = "LogicalFormSyntax"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at token {position})")
        self.position = position


class EmptyInputError(DblpNlqError):
    code = "EmptyInput"


class UnbalancedDelimiterError(LogicalFormSyntaxError):
    code = "UnbalancedDelimiter"


class UnknownRelationTokenError(LogicalFormSyntaxError):
    code = "UnknownRelationToken"

    def __init__(self, token: str, position: int):
        super().__init__(f"unknown token {token!r}", position)
        self.token = token


class UnexpectedTokenError(LogicalFormSyntaxError):
    code = "UnexpectedToken"


# --- translator ---

class NoPatternMatchedError(DblpNlqError):
    code = "NoPatternMatched"


class PatternLoadError(DblpNlqError):
    code = "PatternLoadError"


class EndpointUnavailableError(DblpNlqError):
    code = "EndpointUnavailable"


class EndpointTimeoutError(DblpNlqError):
    code = "EndpointTimeout"


class MalformedModelOutputError(DblpNlqError):
    """Model produced tokens that do not parse; the raw text is kept so the
    template stage can still attempt correction."""

    code = "MalformedModelOutput"

    def __init__(self, message: str, raw_text: str):
        super().__init__(message)
        self.raw_text = raw_text


# --- entity linking ---

class SearchApiUnavailableError(DblpNlqError):
    code = "SearchApiUnavailable"


class SearchApiMalformedResponseError(DblpNlqError):
    code = "SearchApiMalformedResponse"


class FixtureMissError(DblpNlqError):
    code = "FixtureMiss"


class NotALiteralKindError(DblpNlqError):
    code = "NotALiteralKind"


class MalformedYearError(DblpNlqError):
    code = "MalformedYear"


# --- template base ---

class EmptyTemplateBaseError(DblpNlqError):
    code = "EmptyTemplateBase"


# --- query building ---

class UnboundPlaceholderError(DblpNlqError):
    code = "UnboundPlaceholder"

    def __init__(self, unbound: list[str]):
        super().__init__("unbound: " + ", ".join(unbound))
        self.unbound = tuple(unbound)


class ArityMismatchError(DblpNlqError):
    code = "ArityMismatch"


class ParseFailureError(DblpNlqError):
    code = "ParseFailure"


# --- query execution ---

class QueryRejectedError(DblpNlqError):
    """Endpoint-reported error; the endpoint's message is passed through."""

    code = "QueryRejected"


class MalformedResultsError(DblpNlqError):
    code = "MalformedResults"


# --- session ---

class UnknownSessionError(DblpNlqError):
    code = "UnknownSession"


class IndexOutOfRangeError(DblpNlqError):
    code = "IndexOutOfRange"


class EmptyQuestionError(DblpNlqError):
    code = "EmptyQuestion"


# --- evaluation ---

class FileUnreadableError(DblpNlqError):
    code = "FileUnreadable"


class SchemaMismatchError(DblpNlqError):
    code = "SchemaMismatch"
