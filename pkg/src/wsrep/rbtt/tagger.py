"""Tokenizer and coarse part-of-speech tagger for service descriptions.

Only the classes the extraction rules look at need to be reliable:
determiners, relative pronouns, verbs and punctuation.  Everything else
falls back to NOUN, or OTHER for the closed class of function words.
"""

from __future__ import annotations

import enum
import html
import re
from dataclasses import dataclass

START_PARA = "startPara"
START_SENTENCE = "startSentence"


class Pos(str, enum.Enum):
    DT = "DT"
    PRP_REL = "PRP_REL"
    VERB = "VERB"
    NOUN = "NOUN"
    PUNCT = "PUNCT"
    SYM = "SYM"
    OTHER = "OTHER"


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lemma: str
    pos: Pos
    flags: frozenset[str] = frozenset()
    # whether whitespace separated this token from the previous one
    ws_before: bool = False


DETERMINERS = frozenset(
    "the a an this these those each every some any no another either neither".split()
)
RELATIVE_PRONOUNS = frozenset("which who whom whose that".split())
AUXILIARIES = frozenset(
    "is are was were be been being am has have had do does did can could will "
    "would shall should may might must".split()
)
FUNCTION_WORDS = frozenset(
    "for of to in on at by with from and or but nor as into onto about via over "
    "under between through per than not also then so if while until upon within "
    "without against among during it its you your we our they their he she his "
    "her i me my us them there here".split()
)

# Verb stems whose base and -s forms are verbs too.
VERB_STEMS = frozenset(
    """
    accept allow apply calculate compute convert create deliver determine enable
    fetch generate give include let obtain offer perform provide receive retrieve
    return send serve translate validate verify get
    """.split()
)
# Stems that double as nouns: only -ing / -ed forms count as verbs.
NOUNISH_STEMS = frozenset(
    """
    access book charge check code contain display group help list look manage
    notify process publish query read relate report request search show store
    submit support track transfer update use write
    """.split()
)

_SENTENCE_END = frozenset(".!?")
_TOKEN_RE = re.compile(
    r"(?P<word>\w+(?:[-'’.]\w+)*)|(?P<punct>[.,;:!?()\[\]{}\"«»…])|(?P<sym>\S)"
)
_PARA_BREAK_RE = re.compile(r"\n[ \t\r\f\v]*\n")
_BLOCK_TAG_RE = re.compile(r"</?(?:p|div|li|ul|ol|h[1-6]|table|tr)\b[^>]*>", re.I)
_ANY_TAG_RE = re.compile(r"<!--.*?-->|<[^<>]*>", re.S)


def remove_tags(text: str) -> str:
    """Drop markup but keep paragraph structure and punctuation."""
    for _ in range(2):  # once for literal tags, once for escaped ones
        text = _BLOCK_TAG_RE.sub("\n\n", text)
        text = _ANY_TAG_RE.sub(" ", text)
        text = html.unescape(text)
    return text


def _stem_candidates(word: str, suffix: str) -> list[str]:
    base = word[: -len(suffix)]
    out = [base, base + "e"]
    if len(base) >= 2 and base[-1] == base[-2]:
        out.append(base[:-1])
    if suffix == "ied" or suffix == "ies":
        out = [base + "y"]
    return out


def _pos_of_word(lemma: str) -> Pos:
    if lemma in DETERMINERS:
        return Pos.DT
    if lemma in RELATIVE_PRONOUNS:
        return Pos.PRP_REL
    if lemma in AUXILIARIES:
        return Pos.VERB
    if lemma in FUNCTION_WORDS:
        return Pos.OTHER
    if lemma in VERB_STEMS:
        return Pos.VERB
    for suffix in ("ied", "ing", "ed"):
        if lemma.endswith(suffix) and len(lemma) > len(suffix) + 1:
            cands = _stem_candidates(lemma, suffix)
            if any(c in VERB_STEMS or c in NOUNISH_STEMS for c in cands):
                return Pos.VERB
    for suffix in ("ies", "es", "s"):
        if lemma.endswith(suffix) and len(lemma) > len(suffix) + 1:
            cands = [lemma[: -len(suffix)]]
            if suffix == "ies":
                cands = [lemma[:-3] + "y"]
            if any(c in VERB_STEMS for c in cands):
                return Pos.VERB
    return Pos.NOUN


def tokenize_tag(text: str) -> list[TaggedToken]:
    """Split ``text`` into tagged tokens with paragraph/sentence flags."""
    tokens: list[TaggedToken] = []
    prev_end = 0
    sentence_start = True
    for m in _TOKEN_RE.finditer(text):
        gap = text[prev_end : m.start()]
        flags = set()
        if not tokens or _PARA_BREAK_RE.search(gap):
            flags.update((START_PARA, START_SENTENCE))
        elif sentence_start:
            flags.add(START_SENTENCE)
        surface = m.group()
        lemma = surface.lower()
        if m.lastgroup == "word":
            pos = _pos_of_word(lemma)
        elif m.lastgroup == "punct":
            pos = Pos.PUNCT
        else:
            pos = Pos.SYM
        tokens.append(TaggedToken(surface, lemma, pos, frozenset(flags), bool(gap)))
        sentence_start = surface in _SENTENCE_END
        prev_end = m.end()
    return tokens
