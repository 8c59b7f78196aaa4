"""Bag-of-words representation of text with a reconstruction skeleton.

A document is an ordered token list plus the separator strings between them,
so rendering the all-ones vector reproduces the normalized source exactly.
Dropping tokens merges the surrounding separators; any merged gap that held
whitespace collapses to a single space so the output never carries doubled
blanks. Duplicate tokens keep independent, positional bits.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass

import numpy as np

from irkit.errors import EmptyDocumentError, ShapeError

_PUNCT = set(string.punctuation)


@dataclass(frozen=True)
class TokenizedDocument:
    tokens: tuple
    separators: tuple  # len(tokens) + 1 entries; whitespace runs or ""
    lowercase: bool
    split_punct: bool

    @property
    def n_tokens(self) -> int:
        return len(self.tokens)

    @property
    def source(self) -> str:
        parts = []
        for sep, tok in zip(self.separators, self.tokens):
            parts.append(sep)
            parts.append(tok)
        parts.append(self.separators[-1])
        return "".join(parts)


def _split_word(piece: str) -> list[str]:
    """Split a whitespace-free chunk into word and punctuation tokens."""
    out, word = [], []
    for ch in piece:
        if ch in _PUNCT:
            if word:
                out.append("".join(word))
                word = []
            out.append(ch)
        else:
            word.append(ch)
    if word:
        out.append("".join(word))
    return out


def tokenize(text: str, lowercase: bool = False, split_punct: bool = True) -> TokenizedDocument:
    if not text or not text.strip():
        raise EmptyDocumentError("text contains no tokens")
    normalized = text.lower() if lowercase else text

    tokens: list[str] = []
    separators: list[str] = []
    pending_sep = ""
    for piece in re.split(r"(\s+)", normalized):
        if piece == "":
            continue
        if piece.isspace():
            pending_sep += piece
            continue
        for sub in (_split_word(piece) if split_punct else [piece]):
            separators.append(pending_sep)
            pending_sep = ""
            tokens.append(sub)
    separators.append(pending_sep)
    return TokenizedDocument(tuple(tokens), tuple(separators), lowercase, split_punct)


def render(doc: TokenizedDocument, keep) -> str:
    """Render the document with 0-bit tokens removed."""
    keep = np.asarray(keep)
    if len(keep) != doc.n_tokens:
        raise ShapeError(f"keep vector length {len(keep)} != token count {doc.n_tokens}")
    kept = [i for i in range(doc.n_tokens) if keep[i]]
    if not kept:
        return ""

    parts = []
    if kept[0] == 0:
        parts.append(doc.separators[0])  # untouched lead passes through verbatim
    for a, b in zip(kept, kept[1:]):
        parts.append(doc.tokens[a])
        if b == a + 1:
            parts.append(doc.separators[b])
        else:
            merged = "".join(doc.separators[a + 1:b + 1])
            parts.append(" " if any(ch.isspace() for ch in merged) else "")
    parts.append(doc.tokens[kept[-1]])
    if kept[-1] == doc.n_tokens - 1:
        parts.append(doc.separators[-1])
    return "".join(parts)
