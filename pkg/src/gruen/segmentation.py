"""Sentence and word segmentation.

Splits raw output text into sentences and sentences into lowercased word
tokens. Every downstream scorer consumes this module's output, so the
splitter is deliberately rule-based and deterministic: sentence-final
punctuation (. ! ?) followed by whitespace and an uppercase/digit start,
with a fixed abbreviation list guarding false boundaries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

__all__ = [
    "Sentence",
    "Document",
    "SentenceSplitter",
    "split_sentences",
    "tokenize_words",
    "segment",
    "load_abbreviations",
]

# Punctuation stripped from token edges only; internal punctuation
# (contractions, hyphenations) survives so embedding keys stay intact.
_EDGE_PUNCT = "\"'`.,;:!?()[]{}<>«»“”‘’--…*_/\\|~^"

# A boundary candidate: run of sentence-final punctuation, optional closing
# quotes/brackets, whitespace, then an opening quote/bracket-prefixed
# uppercase letter or digit. Periods inside decimal numbers never match
# because they are not followed by whitespace.
_BOUNDARY = re.compile(
    r"([.!?]+[\"'”’)\]]*)(\s+)(?=[\"'“‘(\[]*[A-Z0-9])"
)

_WHITESPACE = re.compile(r"\s+")


@dataclass(frozen=True)
class Sentence:
    """One sentence with its lowercased word tokens."""

    text: str
    tokens: tuple[str, ...]
    char_len: int
    word_count: int

    @classmethod
    def from_text(cls, text: str) -> "Sentence":
        toks = tuple(tokenize_words(text))
        return cls(text=text, tokens=toks, char_len=len(text), word_count=len(toks))


@dataclass(frozen=True)
class Document:
    """A system output with its sentence segmentation."""

    raw_text: str
    sentences: tuple[Sentence, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.sentences)


def tokenize_words(sentence_text: str) -> list[str]:
    """Lowercase, split on whitespace, strip edge punctuation, drop empties."""
    out = []
    for raw in sentence_text.lower().split():
        tok = raw.strip(_EDGE_PUNCT)
        if tok:
            out.append(tok)
    return out


def load_abbreviations(path: str | Path | None = None) -> frozenset[str]:
    """Load the abbreviation list (one per line, '#' comments allowed).

    Without a path, the list shipped with the package is used.
    """
    if path is None:
        text = (
            resources.files("gruen").joinpath("data/abbreviations.txt").read_text("utf-8")
        )
    else:
        text = Path(path).read_text("utf-8")
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


class SentenceSplitter:
    """Deterministic abbreviation-aware sentence boundary detector."""

    def __init__(self, abbreviations: frozenset[str] | None = None):
        self.abbreviations = (
            abbreviations if abbreviations is not None else load_abbreviations()
        )

    def split(self, text: str) -> list[Sentence]:
        spans = []
        start = 0
        for match in _BOUNDARY.finditer(text):
            if self._is_abbreviation(text, match):
                continue
            end = match.end(1)
            spans.append(text[start:end])
            start = match.end(2)
        spans.append(text[start:])

        sentences = []
        for span in spans:
            normalized = _WHITESPACE.sub(" ", span).strip()
            if normalized:
                sentences.append(Sentence.from_text(normalized))
        return sentences

    def _is_abbreviation(self, text: str, match: re.Match) -> bool:
        punct = match.group(1)
        # Abbreviations only guard plain periods; '!' and '?' always split.
        if punct.rstrip("\"'”’)]") != ".":
            return False
        word_end = match.start(1) + 1  # include the period itself
        word_start = word_end - 1
        while word_start > 0 and not text[word_start - 1].isspace():
            word_start -= 1
        word = text[word_start:word_end]
        if word.lower() in self.abbreviations:
            return True
        # Single capital initial, as in "J. Smith".
        return len(word) == 2 and word[0].isalpha() and word[0].isupper()


_DEFAULT_SPLITTER: SentenceSplitter | None = None


def _default_splitter() -> SentenceSplitter:
    global _DEFAULT_SPLITTER
    if _DEFAULT_SPLITTER is None:
        _DEFAULT_SPLITTER = SentenceSplitter()
    return _DEFAULT_SPLITTER


def split_sentences(text: str, splitter: SentenceSplitter | None = None) -> list[Sentence]:
    """Split raw text into sentences; degenerate input yields an empty list."""
    return (splitter or _default_splitter()).split(text)


def segment(text: str, splitter: SentenceSplitter | None = None) -> Document:
    """Segment raw text into a Document."""
    return Document(raw_text=text, sentences=tuple(split_sentences(text, splitter)))
