"""Lexical analysis for the sparse path and the stub embedders.

Lowercase, split on non-alphanumerics, keep numerals; no stemming and no
stopword removal.
"""

import re

_TERM = re.compile(r"[^\W_]+")


def analyze(text):
    return _TERM.findall(text.lower())
