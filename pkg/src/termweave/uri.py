"""Identifier and URI-reference syntax checks used for pointing."""

from __future__ import annotations

import re

# NCName: a Name without colons; start char is a letter or underscore.
_NCNAME = re.compile(r"^[^\W\d][\w.\-·]*$")
_LANG = re.compile(r"^[A-Za-z0-9-]+$")
_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*$")
# RFC 3986 characters plus non-ASCII (IRI); percent signs are checked separately.
_URI_CHARS = re.compile(r"^[A-Za-z0-9\-._~:/?#\[\]@!$&'()*+,;=%\u00a0-\U0010ffff]*$")
_BAD_PERCENT = re.compile(r"%(?![0-9A-Fa-f]{2})")


def is_ncname(value: str) -> bool:
    return bool(_NCNAME.match(value))


def is_language_tag(value: str) -> bool:
    return bool(_LANG.match(value))


def is_uri_reference(value: str) -> bool:
    """Return True if *value* is a syntactically valid, non-empty URI reference."""
    if not value or not _URI_CHARS.match(value) or _BAD_PERCENT.search(value):
        return False
    if value.count("#") > 1:
        return False
    head = re.split(r"[/?#]", value, maxsplit=1)[0]
    if ":" in head:
        return bool(_SCHEME.match(head.split(":", 1)[0]))
    return True


def has_scheme(value: str) -> bool:
    head = re.split(r"[/?#]", value, maxsplit=1)[0]
    return ":" in head and bool(_SCHEME.match(head.split(":", 1)[0]))


def is_local_fragment(value: str) -> bool:
    return value.startswith("#")


def fragment_id(value: str) -> str:
    return value[1:] if value.startswith("#") else value
