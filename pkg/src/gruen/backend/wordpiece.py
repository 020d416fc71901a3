"""Subword vocabulary and greedy wordpiece segmentation.

The vocabulary file is one token per line (line number = token id), with
continuation pieces prefixed "##". Words that cannot be segmented fall back
to the unknown token.
"""

from __future__ import annotations

import unicodedata
from pathlib import Path

SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")
_MAX_WORD_CHARS = 100


class WordpieceVocab:
    def __init__(self, tokens: list[str], do_lower_case: bool = False):
        self.ids = {tok: i for i, tok in enumerate(tokens)}
        if len(self.ids) != len(tokens):
            raise ValueError("vocabulary contains duplicate tokens")
        missing = [t for t in SPECIAL_TOKENS if t not in self.ids]
        if missing:
            raise ValueError("vocabulary lacks special tokens: %s" % missing)
        self.tokens = tokens
        self.do_lower_case = do_lower_case
        self.pad_id, self.unk_id, self.cls_id, self.sep_id, self.mask_id = (
            self.ids[t] for t in SPECIAL_TOKENS
        )

    @classmethod
    def load(cls, path: str | Path, do_lower_case: bool = False) -> "WordpieceVocab":
        lines = Path(path).read_text("utf-8").splitlines()
        return cls([line.rstrip("\n") for line in lines if line.strip()], do_lower_case)

    def basic_tokenize(self, text: str) -> list[str]:
        """Whitespace split, then split punctuation into standalone tokens."""
        if self.do_lower_case:
            text = text.lower()
        out: list[str] = []
        for chunk in text.split():
            word = ""
            for ch in chunk:
                if _is_punctuation(ch):
                    if word:
                        out.append(word)
                        word = ""
                    out.append(ch)
                else:
                    word += ch
            if word:
                out.append(word)
        return out

    def wordpiece(self, word: str) -> list[int]:
        """Greedy longest-match-first segmentation of one word into piece ids."""
        if self.do_lower_case:
            word = word.lower()
        if len(word) > _MAX_WORD_CHARS:
            return [self.unk_id]
        pieces: list[int] = []
        start = 0
        while start < len(word):
            end = len(word)
            piece_id = None
            while start < end:
                candidate = word[start:end]
                if start > 0:
                    candidate = "##" + candidate
                if candidate in self.ids:
                    piece_id = self.ids[candidate]
                    break
                end -= 1
            if piece_id is None:
                return [self.unk_id]
            pieces.append(piece_id)
            start = end
        return pieces

    def encode_text(self, text: str) -> list[int]:
        """Basic-tokenize then wordpiece a full text span."""
        ids: list[int] = []
        for word in self.basic_tokenize(text):
            ids.extend(self.wordpiece(word))
        return ids


def _is_punctuation(ch: str) -> bool:
    code = ord(ch)
    if 33 <= code <= 47 or 58 <= code <= 64 or 91 <= code <= 96 or 123 <= code <= 126:
        return True
    return unicodedata.category(ch).startswith("P")
