"""Stopword-ratio language identification."""

from __future__ import annotations

import re

from .pipeline import GENERAL_STOPWORDS

_WORD_RE = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)?")

# Small closed-class lists; enough to tell the usual registry languages apart.
_OTHER_STOPWORDS = {
    "fr": frozenset(
        "le la les un une des du de et est sont en au aux pour par sur dans avec "
        "ce cette ces qui que ne pas plus il elle nous vous ils leur son sa ses "
        "se ou mais donc être avoir".split()
    ),
    "de": frozenset(
        "der die das den dem des ein eine einer eines und ist sind nicht mit von "
        "zu im in für auf aus bei wird werden oder auch sich es sie wir ihr".split()
    ),
    "es": frozenset(
        "el la los las un una unos unas y es son de del en con por para que se "
        "no su sus al como más pero o este esta".split()
    ),
    "it": frozenset(
        "il lo la gli le un una di del della e è sono in con per che non si da "
        "al alla come più ma o questo questa".split()
    ),
    "pt": frozenset(
        "o a os as um uma de do da dos das e é são em no na com por para que não "
        "se ao mais mas ou este esta".split()
    ),
    "nl": frozenset(
        "de het een en is zijn van in op met voor niet te dat die er ook om aan "
        "bij als maar of wordt".split()
    ),
}

DEFAULT_THRESHOLD = 0.10


def detect_language(text: str, threshold: float = DEFAULT_THRESHOLD) -> str:
    """Guess the ISO-639-1 code of ``text`` from stopword hit ratios.

    English wins whenever its ratio exceeds ``threshold``; otherwise the best
    competing list is returned if it clears the same bar, else ``"unknown"``.
    """
    tokens = [t.lower() for t in _WORD_RE.findall(text)]
    if not tokens:
        return "unknown"
    n = len(tokens)
    if sum(t in GENERAL_STOPWORDS for t in tokens) / n > threshold:
        return "en"
    best, best_ratio = "unknown", threshold
    for code in sorted(_OTHER_STOPWORDS):
        ratio = sum(t in _OTHER_STOPWORDS[code] for t in tokens) / n
        if ratio > best_ratio:
            best, best_ratio = code, ratio
    return best
