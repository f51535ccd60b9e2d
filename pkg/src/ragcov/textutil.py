"""Word-level text helpers shared by the offline embedder and theme extraction."""

from __future__ import annotations

import re

_WORD_RE = re.compile(r"[a-z0-9]+")

# Compact English stop list: function words that carry no topical signal.
# Kept small on purpose; domain terms must never appear here.
STOPWORDS = frozenset(
    """
    a about above after again all am an and any are as at be because been
    before being below between both but by can could did do does doing down
    during each few for from further had has have having he her here hers
    him his how i if in into is it its itself just me more most my no nor
    not of off on once only or other our ours out over own same say she
    should so some such than that the their theirs them then there these
    they this those through to too under until up very was we were what
    when where which while who whom why will with would you your yours
    """.split()
)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens in order of appearance."""
    return _WORD_RE.findall(text.lower())


def content_words(text: str) -> list[str]:
    """Tokens with stop words removed.

    Falls back to all tokens when every token is a stop word, so that
    purely functional sentences still map to a usable word set.
    """
    tokens = tokenize(text)
    kept = [t for t in tokens if t not in STOPWORDS]
    return kept if kept else tokens
