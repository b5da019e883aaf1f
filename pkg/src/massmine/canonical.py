"""Attribute-name canonicalization: tokenize, Porter-stem, rejoin."""

from __future__ import annotations

import re
from functools import lru_cache

from .stemmer import porter_stem

__all__ = ["tokenize", "canonical_key", "stem_token", "SEGMENT_SEPARATORS"]

SEGMENT_SEPARATORS = (".", "[]")

_SEGMENT_SPLIT = re.compile(r"(\.|\[\])")
_CAMEL = re.compile(r"(?<=[a-z])(?=[A-Z])")
_TRAILING_DIGITS = re.compile(r"^([a-z]+)([0-9]+)$")


def _split_segments(raw: str) -> list[str]:
    # separators are kept as their own items so they can be restored verbatim
    return [part for part in _SEGMENT_SPLIT.split(raw) if part != ""]


def _word_tokens(segment: str) -> list[str]:
    words = []
    chunk = []
    for ch in segment:
        if ch.isalnum():
            chunk.append(ch)
        elif chunk:
            words.append("".join(chunk))
            chunk = []
    if chunk:
        words.append("".join(chunk))
    tokens = []
    for word in words:
        tokens.extend(t.lower() for t in _CAMEL.split(word) if t)
    return tokens


def tokenize(raw: str) -> list[list[str]]:
    """Split ``raw`` into lowercase tokens, one list per path segment.

    Segments are delimited by ``.`` and ``[]``; inside a segment, any
    non-alphanumeric character and every lowercase-to-uppercase transition
    is a token boundary.

    >>> tokenize("user.accountId")
    [['user'], ['account', 'id']]
    """
    return [
        _word_tokens(part)
        for part in _split_segments(raw)
        if part not in SEGMENT_SEPARATORS
    ]


def stem_token(token: str) -> str:
    # "address2" -> stem("address") + "2"; other digit mixes pass through
    if token.isascii() and token.isalpha():
        return porter_stem(token)
    match = _TRAILING_DIGITS.match(token)
    if match:
        return porter_stem(match.group(1)) + match.group(2)
    return token


@lru_cache(maxsize=16384)
def canonical_key(raw: str) -> str:
    """Canonical comparison key for a raw (possibly dotted) attribute name.

    Each token is stemmed once; tokens are joined with ``_`` and the
    original ``.`` / ``[]`` separators are put back.

    >>> canonical_key("tags[].name")
    'tag[].name'
    >>> canonical_key("createdAt") == canonical_key("created_at")
    True
    """
    out = []
    for part in _split_segments(raw):
        if part in SEGMENT_SEPARATORS:
            out.append(part)
            continue
        stems = [stem_token(t) for t in _word_tokens(part)]
        # a segment made only of punctuation still needs a placeholder
        out.append("_".join(stems) if stems else "_")
    return "".join(out)
