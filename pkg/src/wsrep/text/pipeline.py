"""Markup removal, identifier splitting, stopword removal and stemming."""

from __future__ import annotations

import html
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .porter import porter_stem

_BLOCK_RE = re.compile(r"<(style|script)\b[^>]*>.*?</\1\s*>", re.S | re.I)
_COMMENT_RE = re.compile(r"<!--.*?-->", re.S)
_TAG_RE = re.compile(r"<[^<>]*>")
_CSS_RULE_RE = re.compile(r"\{[^{}]*:[^{}]*\}")
_SYMBOL_RE = re.compile(r"[^\w\s-]|_")
_LOOSE_HYPHEN_RE = re.compile(r"(?<!\w)-|-(?!\w)")
_LETTER_RUN_RE = re.compile(r"[^\W\d_]+")


def load_stoplist(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line stoplist; blank lines and ``#`` comments are skipped."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def _bundled(name: str) -> frozenset[str]:
    with resources.as_file(resources.files("wsrep") / "data" / name) as p:
        return load_stoplist(p)


GENERAL_STOPWORDS = _bundled("stop_general.txt")
BOILERPLATE_STOPWORDS = _bundled("stop_boilerplate.txt")


def _drop_markup(text: str) -> str:
    text = _COMMENT_RE.sub(" ", text)
    text = _BLOCK_RE.sub(" ", text)
    return _TAG_RE.sub(" ", text)


def strip_markup(text: str) -> str:
    """Remove HTML/XML tags, CSS and punctuation; keep intra-word hyphens.

    >>> strip_markup("<b>weather</b> service!")
    'weather service'
    """
    # Documentation often carries escaped HTML, so unescape between two passes.
    text = _drop_markup(html.unescape(_drop_markup(text)))
    text = _CSS_RULE_RE.sub(" ", text)
    text = _SYMBOL_RE.sub(" ", text)
    text = _LOOSE_HYPHEN_RE.sub(" ", text)
    return " ".join(text.split())


def _split_case(run: str) -> list[str]:
    pieces = []
    start = 0
    for i in range(1, len(run)):
        prev, cur = run[i - 1], run[i]
        if not cur.isupper():
            continue
        if not prev.isupper():
            cut = True  # camelCase boundary
        else:
            # end of an acronym followed by a capitalised word: XMLParser
            cut = i + 1 < len(run) and run[i + 1].islower()
        if cut:
            pieces.append(run[start:i])
            start = i
    pieces.append(run[start:])
    return pieces


def split_identifier(ident: str) -> list[str]:
    """Split an identifier into word pieces, keeping each piece's casing.

    Delimiters (``_``, ``-``, ``.``, other symbols) and digit runs separate
    pieces and are dropped.  Runs of capitals stay together as one acronym.

    >>> split_identifier("GetAllCountryCurrenciesResponse")
    ['Get', 'All', 'Country', 'Currencies', 'Response']
    >>> split_identifier("weather_report2XML")
    ['weather', 'report', 'XML']
    """
    pieces: list[str] = []
    for run in _LETTER_RUN_RE.findall(ident):
        pieces.extend(_split_case(run))
    return pieces


@dataclass(frozen=True)
class TextPipeline:
    """The three text-processing steps bound to a particular stoplist."""

    stopwords: frozenset[str] = GENERAL_STOPWORDS | BOILERPLATE_STOPWORDS

    @classmethod
    def from_files(
        cls, general: str | Path | None = None, boilerplate: str | Path | None = None
    ) -> "TextPipeline":
        g = load_stoplist(general) if general else GENERAL_STOPWORDS
        b = load_stoplist(boilerplate) if boilerplate else BOILERPLATE_STOPWORDS
        return cls(g | b)

    def remove_stopwords(self, tokens: Iterable[str]) -> list[str]:
        return [t for t in tokens if t.lower() not in self.stopwords]

    def __call__(self, text: str) -> list[str]:
        """Run markup removal, splitting, stopword removal and stemming."""
        pieces = []
        for word in strip_markup(text).split():
            pieces.extend(split_identifier(word))
        stems = (stem(t) for t in self.remove_stopwords(pieces))
        # a stem can collapse onto a stopword ("thes" -> "the")
        return [s for s in stems if s not in self.stopwords]


DEFAULT_PIPELINE = TextPipeline()


def remove_stopwords(tokens: Iterable[str]) -> list[str]:
    return DEFAULT_PIPELINE.remove_stopwords(tokens)


def stem(token: str) -> str:
    return porter_stem(token)


def pipeline(text: str) -> list[str]:
    return DEFAULT_PIPELINE(text)
