"""Level-specific randomizations of a normalized document.

Every level returns a sequence over the 27-symbol text alphabet with the
same length as ``doc.flat``:

* ``sentence``: sentence order permuted, words inside sentences untouched
* ``word``: all words permuted across the document
* ``character``: all symbols of the flat form permuted
* ``eword``: the flat form split on a delimiter letter (default ``e``),
  the pieces permuted and rejoined with the delimiter
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _rng
from .textpipe import Document, LETTERS, sentences_with_periods, text_to_sequence
from .seqcore import SymbolSequence

LEVELS = ("sentence", "word", "character", "eword")
_LEVEL_CODE = {name: i for i, name in enumerate(LEVELS)}


@dataclass(frozen=True)
class ScrambleSpec:
    level: str
    seed: int = 0
    delimiter: str = "e"

    def __post_init__(self):
        if self.level not in _LEVEL_CODE:
            raise ValueError(f"unknown scramble level {self.level!r}; expected one of {LEVELS}")
        if self.level == "eword" and (len(self.delimiter) != 1 or self.delimiter not in LETTERS + " "):
            raise ValueError(f"invalid e-word delimiter {self.delimiter!r}")


def _units(doc: Document, spec: ScrambleSpec) -> list:
    if spec.level == "sentence":
        return list(doc.sentences)
    if spec.level == "word":
        return doc.words
    if spec.level == "character":
        return list(range(doc.flat.n))
    return doc.flat_text.split(spec.delimiter)


def apply_order(doc: Document, spec: ScrambleSpec, order) -> SymbolSequence:
    """Render ``doc`` at ``spec.level`` with its units arranged as ``order``.

    Output unit ``i`` is input unit ``order[i]``.
    """
    units = _units(doc, spec)
    order = list(order)
    if sorted(order) != list(range(len(units))):
        raise ValueError("order must be a permutation of the unit indices")
    n = doc.flat.n
    if spec.level == "character":
        return doc.flat.with_data(doc.flat.data[np.asarray(order, dtype=np.intp)])
    if spec.level == "sentence":
        text = sentences_with_periods([units[i] for i in order]).replace(".", " ")
    elif spec.level == "word":
        text = " ".join(units[i] for i in order)
    else:
        text = spec.delimiter.join(units[i] for i in order)
    # restore the separator space a between-words cut leaves at the end
    return text_to_sequence(text[:n].ljust(n))


def scramble(doc: Document, spec: ScrambleSpec) -> SymbolSequence:
    """Seeded surrogate of ``doc`` at one organization level."""
    if doc.flat.n < 2:
        raise ValueError("document too short to scramble")
    rng = _rng.generator(spec.seed, _rng.SCRAMBLE, _LEVEL_CODE[spec.level])
    k = len(_units(doc, spec))
    return apply_order(doc, spec, _rng.fisher_yates(k, rng))
