"""
Module for utility functions shared by every part of the package: the error
base class and the structured document helpers.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

SCHEMA_VERSION = "iexg/1"
SCHEMA_KEY = "schema"


class IexgError(Exception):
    """Base class of every domain error raised by the package."""

    def __init__(self, message: str = "Operation failed.") -> None:
        super().__init__(message)

    def to_document(self) -> dict:
        """
        Machine-readable description of the error.

        Returns:
            Dict
                The error document, ending with the schema field.
        """
        return with_schema({"error": type(self).__name__, "message": str(self)})


class MalformedDocument(IexgError):
    def __init__(
        self,
        message: str = "The document does not follow the expected format.",
    ) -> None:
        super().__init__(message)


class InvalidSettings(IexgError):
    def __init__(
        self,
        message: str = "The settings failed validation.",
    ) -> None:
        super().__init__(message)


class InvalidArgument(IexgError, ValueError):
    def __init__(self, message: str = "Argument out of its valid range.") -> None:
        super().__init__(message)


class IndexOutOfRange(IexgError, IndexError):
    def __init__(self, message: str = "Index out of range.") -> None:
        super().__init__(message)


def parse_rational(value: Any) -> Fraction:
    """
    Parse an exact rational from a document value.

    Args:
        value: Str or Int
            A string formatted as 'p/q' or 'p', or an integer.

    Returns:
        Fraction
            The parsed rational.
    """
    # bool is an int subclass, floats are inexact
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise MalformedDocument(
            f"Expected a rational as an integer or a 'p/q' string, got {value!r}."
        )
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise MalformedDocument(f"Cannot parse {value!r} as a rational.")


def format_rational(value: Fraction | int) -> str:
    """Format a rational as 'p/q', or 'p' when it is an integer."""
    return str(Fraction(value))


def with_schema(document: dict) -> dict:
    """
    Return a copy of the document with the schema field as its last key.

    Args:
        document: Dict
            The output document.

    Returns:
        Dict
            The same document, with the schema field appended.
    """
    tagged = {key: value for key, value in document.items() if key != SCHEMA_KEY}
    tagged[SCHEMA_KEY] = SCHEMA_VERSION
    return tagged


def require_key(document: Mapping, key: str, kind: str = "document") -> Any:
    """
    Get a mandatory field from a document.

    Args:
        document: Mapping
            The parsed document.
        key: Str
            The field name.
        kind: Str
            Name of the document type, used in the error message.

    Returns:
        Any
            The field value.
    """
    if not isinstance(document, Mapping):
        raise MalformedDocument(f"Expected a JSON object for the {kind}, got {document!r}.")
    try:
        return document[key]
    except KeyError:
        raise MalformedDocument(f"Missing field {key!r} in the {kind}.")


def load_document(path: str | Path) -> Any:
    """Read a JSON document from a file."""
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def dump_document(document: dict) -> str:
    """Serialize an output document, appending the schema field."""
    return json.dumps(with_schema(document), indent=2, ensure_ascii=False)
