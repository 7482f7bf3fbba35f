"""Alphabets and symbol sequences.

Every estimator in the package works on :class:`SymbolSequence`, a thin
wrapper around a ``uint8``/``int32`` index array tied to an :class:`Alphabet`.
Symbols at the API boundary are arbitrary hashable atoms (usually single
characters); internally only their indices are used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np


class UnknownSymbolError(ValueError):
    """A symbol is not part of the alphabet it is being encoded with."""

    def __init__(self, symbol, position: int):
        self.symbol = symbol
        self.position = position
        super().__init__(f"unknown symbol {symbol!r} at position {position}")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbols with a bijection onto ``range(size)``."""

    symbols: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        index = {s: i for i, s in enumerate(symbols)}
        if len(index) != len(symbols):
            raise ValueError("alphabet symbols must be pairwise distinct")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", index)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    def index(self, symbol: Hashable) -> int:
        return self._index[symbol]

    def dtype(self):
        return np.uint8 if self.size <= 256 else np.int32


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """A sequence of alphabet indices.

    ``data`` is a read-only numpy array; use :func:`decode` to get symbols
    back.
    """

    alphabet: Alphabet
    data: np.ndarray

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=self.alphabet.dtype())
        if data.ndim != 1:
            raise ValueError("sequence data must be one-dimensional")
        if data.size and int(data.max()) >= self.alphabet.size:
            raise ValueError("sequence index out of alphabet range")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolSequence):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.alphabet, self.data.tobytes()))

    def to_string(self) -> str:
        """Join the decoded symbols; only meaningful for character alphabets."""
        return "".join(decode(self))

    def with_data(self, data: np.ndarray) -> "SymbolSequence":
        return SymbolSequence(self.alphabet, data)


def infer_alphabet(text: Iterable[Hashable]) -> Alphabet:
    """Distinct symbols of ``text`` in order of first occurrence."""
    return Alphabet(tuple(dict.fromkeys(text)))


def encode(text: Sequence[Hashable], alphabet: Alphabet | None = None) -> SymbolSequence:
    """Map ``text`` onto indices of ``alphabet``.

    If no alphabet is given, one is inferred from ``text``. Positions in the
    error message are 1-based.
    """
    if alphabet is None:
        alphabet = infer_alphabet(text)
    index = alphabet._index
    out = np.empty(len(text), dtype=alphabet.dtype())
    for pos, sym in enumerate(text):
        try:
            out[pos] = index[sym]
        except KeyError:
            raise UnknownSymbolError(sym, pos + 1) from None
    return SymbolSequence(alphabet, out)


def decode(seq: SymbolSequence) -> list:
    symbols = seq.alphabet.symbols
    return [symbols[i] for i in seq.data.tolist()]
