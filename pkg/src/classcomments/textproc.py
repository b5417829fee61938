"""Sentence splitting, tokenization, stopword removal and stemming."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .porter import porter_stem

__all__ = [
    "Sentence",
    "split_sentences",
    "tokenize",
    "remove_stopwords",
    "porter_stem",
    "preprocess",
    "stopwords",
    "PREPROCESSING_CHAIN",
]

STOPWORDS_VERSION = "en-127-v1"
ANNOTATION_PREFIX = "ann_"
MAX_NUMBER_DIGITS = 6

# Recorded in model files so a trained model states how its terms were made.
PREPROCESSING_CHAIN = {
    "tokenizer": "lowercase/split-non-alnum/ann_-annotations/drop-numbers>6-digits",
    "stopwords": STOPWORDS_VERSION,
    "stemmer": "porter-1980-reference-c",
}

_ABBREVIATIONS = ("e.g", "i.e", "etc")
_TERMINATORS = ".!?"


@dataclass(frozen=True)
class Sentence:
    text: str
    index: int


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    data = resources.files("classcomments").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in data.splitlines() if w.strip())


def _is_abbreviation(chunk: str, following: str) -> bool:
    """True if the period closing *chunk* belongs to an abbreviation.

    *following* is the text after the period.  A single letter only counts
    as an abbreviation when the sentence visibly continues (next word
    lowercase or numeric), so "Parses X. Returns Y." still splits.
    """
    words = chunk.split()
    if not words:
        return False
    word = words[-1].lstrip("([{\"'")
    if word.lower() in _ABBREVIATIONS:
        return True
    if len(word) == 1 and word.isalpha():
        nxt = following.lstrip()
        return bool(nxt) and (nxt[0].islower() or nxt[0].isdigit())
    return False


def _paragraphs(text: str) -> list[str]:
    paras: list[str] = []
    current: list[str] = []
    for line in text.replace("\r\n", "\n").replace("\r", "\n").split("\n"):
        if line.strip():
            current.append(line)
        elif current:
            paras.append(" ".join(current))
            current = []
    if current:
        paras.append(" ".join(current))
    return paras


def split_sentences(text: str) -> list[Sentence]:
    """Split on ., ! or ? followed by whitespace (or end of text) and on blank lines."""
    pieces: list[str] = []
    for para in _paragraphs(text):
        start = 0
        i = 0
        n = len(para)
        while i < n:
            if para[i] not in _TERMINATORS:
                i += 1
                continue
            j = i + 1
            while j < n and para[j] in _TERMINATORS:
                j += 1
            if j >= n or para[j].isspace():
                single_period = para[i] == "." and j == i + 1
                if not (single_period and _is_abbreviation(para[start:i], para[j:])):
                    pieces.append(para[start:j])
                    start = j
            i = j
        pieces.append(para[start:])

    sentences = []
    for piece in pieces:
        normalized = " ".join(piece.split())
        if normalized:
            sentences.append(Sentence(normalized, len(sentences)))
    return sentences


def tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    text = text.lower()
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isalnum():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            word = text[i:j]
            if not (word.isdigit() and len(word) > MAX_NUMBER_DIGITS):
                tokens.append(word)
            i = j
        elif ch == "@" and i + 1 < n and text[i + 1].isalpha() and (i == 0 or not text[i - 1].isalnum()):
            j = i + 1
            while j < n and text[j].isalnum():
                j += 1
            tokens.append(ANNOTATION_PREFIX + text[i + 1 : j])
            i = j
        else:
            i += 1
    return tokens


def remove_stopwords(tokens: list[str]) -> list[str]:
    stop = stopwords()
    return [t for t in tokens if t.startswith(ANNOTATION_PREFIX) or t not in stop]


def preprocess(text: str) -> list[str]:
    """Full term pipeline used for TF-IDF: tokenize, drop stopwords, stem."""
    return [t if t.startswith(ANNOTATION_PREFIX) else porter_stem(t) for t in remove_stopwords(tokenize(text))]
