"""Normalization of raw text into a 27-symbol stream with sentence structure.

Pipeline, applied in this order:

1. lowercase
2. strip diacritics (canonical decomposition, combining marks dropped)
3. delete digits
4. ``?`` and ``!`` become ``.``
5. every other character that is not ``a-z`` or ``.`` becomes a space
6. split into sentences on ``.``
7. split sentences into words on whitespace, dropping empties
8. flat form: all words joined by single spaces
9. truncate the flat form to ``cut_length`` symbols

The retained sentences are exactly those covering the truncated flat form,
so the last word may be cut short, and the flat form ends with a space when
the cut falls right after a word.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field

import numpy as np

from .seqcore import Alphabet, SymbolSequence

logger = logging.getLogger(__name__)

LETTERS = "abcdefghijklmnopqrstuvwxyz"
TEXT_ALPHABET = Alphabet(tuple(LETTERS + " "))
PERIOD_ALPHABET = Alphabet(tuple(LETTERS + " ."))
DEFAULT_CUT = 78000

# Letters that canonical decomposition leaves alone.
_EXTRA_FOLDS = str.maketrans({
    "ß": "ss", "æ": "ae", "œ": "oe", "ø": "o", "đ": "d", "ð": "d",
    "ħ": "h", "ı": "i", "ł": "l", "þ": "th",
})
_NOT_KEPT = re.compile(r"[^a-z.]")

_LUT = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(TEXT_ALPHABET.symbols):
    _LUT[ord(_c)] = _i


class EmptyDocumentError(ValueError):
    pass


@dataclass(frozen=True)
class NormalizationOptions:
    """Switches for the choices the filtering protocol leaves open.

    ``collapse_whitespace=False`` keeps the raw run lengths of spaces in the
    flat form (sentence/word structure is unaffected); the flat form then no
    longer equals the joined words, so use it only for sensitivity checks.
    """

    collapse_whitespace: bool = True
    drop_apostrophes: bool = False
    join_hyphens: bool = False


@dataclass(frozen=True, eq=False)
class Document:
    meta: dict
    sentences: tuple[tuple[str, ...], ...]
    flat: SymbolSequence
    cut_length: int
    full_length: int = 0
    options: NormalizationOptions = field(default_factory=NormalizationOptions)

    @property
    def is_short(self) -> bool:
        """True when the text was shorter than ``cut_length``."""
        return self.full_length < self.cut_length

    @property
    def words(self) -> list[str]:
        return [w for s in self.sentences for w in s]

    @property
    def flat_text(self) -> str:
        return self.flat.to_string()

    def __eq__(self, other):
        if not isinstance(other, Document):
            return NotImplemented
        return (self.sentences == other.sentences and self.flat == other.flat
                and self.cut_length == other.cut_length)

    def render(self) -> str:
        """One sentence per line, terminated by a period.

        Normalizing the rendering gives back this document, except that a
        trailing separator space left by the cut is not represented.
        """
        return "".join(" ".join(s) + ".\n" for s in self.sentences)

    def to_bytes(self) -> bytes:
        """The flat form as raw bytes over ``a-z`` and 0x20."""
        return self.flat_text.encode("ascii")


def _fold(text: str) -> str:
    text = text.translate(_EXTRA_FOLDS)
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def clean(raw: str, options: NormalizationOptions = NormalizationOptions()) -> str:
    """Steps 1-5: a string over ``a-z``, space and period."""
    text = _fold(raw.lower())
    text = "".join(ch for ch in text if not ch.isdigit())
    text = text.replace("?", ".").replace("!", ".")
    if options.drop_apostrophes:
        text = text.replace("'", "").replace("’", "")
    if options.join_hyphens:
        text = re.sub(r"-\s*\n\s*|-", "", text)
    return _NOT_KEPT.sub(" ", text)


def text_to_sequence(text: str, alphabet: Alphabet = TEXT_ALPHABET) -> SymbolSequence:
    """Fast encoding of an ASCII string over the text alphabet."""
    if alphabet is TEXT_ALPHABET:
        raw = np.frombuffer(text.encode("ascii"), dtype=np.uint8)
        idx = _LUT[raw]
        if (idx == 255).any():
            bad = int(np.argmax(idx == 255))
            raise ValueError(f"symbol {text[bad]!r} at position {bad + 1} not in text alphabet")
        return SymbolSequence(alphabet, idx)
    from .seqcore import encode
    return encode(text, alphabet)


def _truncate_sentences(sentences, cut: int):
    """Keep the sentences/words that fit in the first ``cut`` flat symbols."""
    out = []
    used = 0
    for sent in sentences:
        kept = []
        for w in sent:
            sep = 1 if used else 0
            room = cut - used - sep
            if room <= 0:
                break
            if len(w) > room:
                kept.append(w[:room])
                used += sep + room
                break
            kept.append(w)
            used += sep + len(w)
        if kept:
            out.append(tuple(kept))
        if used >= cut:
            break
    return tuple(out)


def normalize(
    raw: str,
    cut_length: int = DEFAULT_CUT,
    meta: dict | None = None,
    options: NormalizationOptions = NormalizationOptions(),
) -> Document:
    """Normalize ``raw`` into a :class:`Document`.

    Documents shorter than ``cut_length`` keep their full length and are
    flagged (``Document.is_short``).
    """
    if cut_length < 1:
        raise ValueError("cut_length must be >= 1")
    cleaned = clean(raw, options)
    sentences = []
    for chunk in cleaned.split("."):
        words = chunk.split()
        if words:
            sentences.append(tuple(words))
    if not sentences:
        raise EmptyDocumentError("text contains no words after normalization")
    full_length = sum(len(w) for s in sentences for w in s) + sum(len(s) for s in sentences) - 1
    kept = _truncate_sentences(sentences, cut_length)
    if options.collapse_whitespace:
        # may end in a separator space when the cut falls between words
        flat = " ".join(w for s in sentences for w in s)[:cut_length]
    else:
        flat = cleaned.replace(".", " ").strip()[:cut_length]
    if full_length < cut_length:
        logger.warning("document %s has %d symbols, fewer than cut length %d",
                       (meta or {}).get("id", "?"), full_length, cut_length)
    return Document(
        meta=dict(meta or {}),
        sentences=kept,
        flat=text_to_sequence(flat),
        cut_length=cut_length,
        full_length=full_length,
        options=options,
    )


def sentences_with_periods(sentences) -> str:
    return "".join(" ".join(s) + "." for s in sentences)


def flat_with_periods(doc: Document) -> SymbolSequence:
    """Flat form with a period closing every sentence (28-symbol alphabet).

    Replacing each period by a space yields the flat form plus one trailing
    space.
    """
    return text_to_sequence(sentences_with_periods(doc.sentences), PERIOD_ALPHABET)
