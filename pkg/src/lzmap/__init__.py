"""Lempel-Ziv complexity-entropy analysis of symbolic sequences and text."""

__version__ = "0.1.0"

from .seqcore import Alphabet, SymbolSequence, decode, encode, infer_alphabet
from .lzfactor import Factorization, factorize, factorize_naive, lz_complexity
from .entropy import (
    block_entropy_oracle,
    block_shuffle,
    entropy_rate,
    excess_entropy,
    SurrogateSpec,
)
from .textpipe import Document, flat_with_periods, normalize
from .scramble import ScrambleSpec, scramble
from .analysis import AnalysisParams, TextAnalysisRecord, analyze_text

__all__ = [
    "Alphabet", "SymbolSequence", "decode", "encode", "infer_alphabet",
    "Factorization", "factorize", "factorize_naive", "lz_complexity",
    "block_entropy_oracle", "block_shuffle", "entropy_rate", "excess_entropy", "SurrogateSpec",
    "Document", "flat_with_periods", "normalize",
    "ScrambleSpec", "scramble",
    "AnalysisParams", "TextAnalysisRecord", "analyze_text",
]
