"""Entropy-rate and excess-entropy estimators built on LZ76 complexity.

The entropy rate is estimated as ``C_LZ * log2(n) / n`` bits per symbol,
with no finite-size correction. Excess entropy is estimated from
block-shuffled surrogates: for each block length ``M`` the sequence is cut
into ``n // M`` blocks whose order is randomized, and the surplus entropy
rate of the surrogate over the original is summed for ``M = 1..m_max``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _rng
from .lzfactor import lz_complexity
from .seqcore import SymbolSequence

DEFAULT_M_MAX = 40
DEFAULT_REPEATS = 10


class SequenceTooShortError(ValueError):
    pass


class ResourceLimitError(ValueError):
    pass


@dataclass(frozen=True)
class EntropyEstimate:
    h_lz: float
    n: int
    c_lz: int


@dataclass(frozen=True)
class SurrogateSpec:
    block_length: int
    seed: int = 0
    repeat_index: int = 0


@dataclass(frozen=True)
class ExcessEntropyEstimate:
    """Excess entropy with its per-block-length terms.

    ``terms[M-1]`` is the mean over ``repeats`` shuffles of
    ``h_lz(surrogate_M) - base_h``; ``term_sd`` holds the matching
    population standard deviations.
    """

    e_lz: float
    m_max: int
    repeats: int
    terms: tuple[float, ...]
    term_sd: tuple[float, ...]
    base_h: float
    seed: int

    def recomputed(self) -> float:
        return math.fsum(self.terms)


@dataclass(frozen=True)
class BlockEntropyTable:
    """Empirical block entropies ``H[n]`` for ``n = 0..max_n`` (``H[0] = 0``)."""

    max_n: int
    h_of_n: tuple[float, ...]
    h_mu_of_n: tuple[float, ...]

    @property
    def excess_partial_sums(self) -> tuple[float, ...]:
        """Running sums of ``h_mu(n) - h_mu(max_n)``, a truncated excess entropy."""
        tail = self.h_mu_of_n[-1]
        out, acc = [], 0.0
        for v in self.h_mu_of_n[1:]:
            acc += v - tail
            out.append(acc)
        return tuple(out)


def _h_from_count(c: int, n: int) -> float:
    return c * math.log2(n) / n


def entropy_rate(seq: SymbolSequence) -> EntropyEstimate:
    """LZ76 entropy-rate estimate in bits per symbol."""
    if seq.n < 2:
        raise SequenceTooShortError(f"entropy rate needs n >= 2, got {seq.n}")
    c = lz_complexity(seq)
    return EntropyEstimate(_h_from_count(c, seq.n), seq.n, c)


def apply_block_permutation(seq: SymbolSequence, block_length: int, order) -> SymbolSequence:
    """Rearrange the full blocks of ``seq`` so that output block ``i`` is input block ``order[i]``.

    The trailing ``n % block_length`` symbols stay in place at the end.
    """
    n, m = seq.n, block_length
    if not 1 <= m <= max(n, 1):
        raise ValueError(f"block length {m} outside [1, {n}]")
    k = n // m
    order = np.asarray(order, dtype=np.intp)
    if sorted(order.tolist()) != list(range(k)):
        raise ValueError("order must be a permutation of the block indices")
    data = seq.data
    body = data[: k * m].reshape(k, m)[order].ravel()
    return seq.with_data(np.concatenate([body, data[k * m:]]))


def block_shuffle(seq: SymbolSequence, spec: SurrogateSpec) -> SymbolSequence:
    """Surrogate with the order of length-``M`` blocks randomized."""
    m = spec.block_length
    if not 1 <= m <= seq.n:
        raise ValueError(f"block length {m} outside [1, {seq.n}]")
    rng = _rng.generator(spec.seed, _rng.BLOCK_SHUFFLE, m, spec.repeat_index)
    order = _rng.fisher_yates(seq.n // m, rng)
    return apply_block_permutation(seq, m, order)


def _surrogate_h(seq: SymbolSequence, m: int, r: int, seed: int) -> float:
    return entropy_rate(block_shuffle(seq, SurrogateSpec(m, seed, r))).h_lz


def excess_entropy(
    seq: SymbolSequence,
    m_max: int = DEFAULT_M_MAX,
    repeats: int = DEFAULT_REPEATS,
    seed: int = 0,
    workers: int = 1,
) -> ExcessEntropyEstimate:
    """Sum over ``M = 1..m_max`` of the mean surrogate entropy-rate surplus.

    Each ``(M, repeat)`` surrogate draws from its own stream derived from
    ``seed``, so the result does not depend on ``workers``.
    """
    if not 1 <= m_max <= seq.n:
        raise ValueError(f"m_max={m_max} must satisfy 1 <= m_max <= n={seq.n}")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    base = entropy_rate(seq).h_lz
    tasks = [(m, r) for m in range(1, m_max + 1) for r in range(repeats)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hs = list(pool.map(lambda t: _surrogate_h(seq, t[0], t[1], seed), tasks))
    else:
        hs = [_surrogate_h(seq, m, r, seed) for m, r in tasks]
    diffs = np.asarray(hs).reshape(m_max, repeats) - base
    terms = tuple(float(x) for x in diffs.mean(axis=1))
    sds = tuple(float(x) for x in diffs.std(axis=1))
    return ExcessEntropyEstimate(
        e_lz=math.fsum(terms),
        m_max=m_max,
        repeats=repeats,
        terms=terms,
        term_sd=sds,
        base_h=base,
        seed=int(seed),
    )


def block_entropy_oracle(seq: SymbolSequence, max_n: int, max_blocks: int = 4096) -> BlockEntropyTable:
    """Plug-in block entropies from overlapping windows.

    ``max_blocks`` caps ``alphabet_size ** max_n``; the default allows block
    lengths up to 12 on a binary alphabet.
    """
    size = seq.alphabet.size
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if size ** max_n > max_blocks:
        raise ResourceLimitError(
            f"{size}**{max_n} possible blocks exceeds the limit of {max_blocks}"
        )
    if seq.n < max_n:
        raise SequenceTooShortError("sequence shorter than the largest block")
    data = seq.data.astype(np.int64)
    codes = np.zeros(seq.n, dtype=np.int64)
    hs = [0.0]
    for L in range(1, max_n + 1):
        # codes[i] encodes the window data[i : i + L]
        codes = codes[: seq.n - L + 1] * size + data[L - 1:]
        counts = np.bincount(codes, minlength=1)
        p = counts[counts > 0] / codes.size
        hs.append(float(-(p * np.log2(p)).sum()))
    h_mu = tuple([0.0] + [hs[i] - hs[i - 1] for i in range(1, max_n + 1)])
    return BlockEntropyTable(max_n, tuple(hs), h_mu)
