"""LZ76 exhaustive-history factorization.

A factor starting at position ``p`` is the shortest extension
``s[p..q]`` that does not occur in ``s[0..q-1]``; copies may overlap the
factor itself but never include its final symbol. The last factor may run
into the end of the sequence while still being reproducible.

Two implementations are provided. :func:`factorize_naive` follows the
definition with plain substring search and is the reference for testing.
:func:`factorize` builds a suffix automaton annotated with the first end
position of every state, which turns "does the candidate occur starting
before ``p``" into a single comparison per symbol. Total work is linear in
``n`` for a fixed alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .seqcore import SymbolSequence


class EmptySequenceError(ValueError):
    pass


# Dense transition tables above this many cells fall back to the dict engine.
_DENSE_CELL_LIMIT = 64_000_000


@dataclass(frozen=True)
class Factorization:
    """Factor boundaries of a sequence.

    ``ends`` holds the 1-based inclusive end position of each factor.
    ``last_exhaustive`` is False when the final factor hit the end of the
    sequence while it was still a copy of earlier material.
    """

    n: int
    ends: tuple[int, ...]
    last_exhaustive: bool = True

    @property
    def c_lz(self) -> int:
        return len(self.ends)

    @property
    def spans(self) -> list[tuple[int, int]]:
        starts = (1,) + tuple(e + 1 for e in self.ends[:-1])
        return list(zip(starts, self.ends))

    def factors(self, seq) -> list:
        """Slice ``seq`` (anything indexable) into its factors."""
        return [seq[a - 1:b] for a, b in self.spans]

    def dotted(self, text: str) -> str:
        return ".".join(self.factors(text))


def _check(seq: SymbolSequence) -> None:
    if seq.n == 0:
        raise EmptySequenceError("cannot factorize an empty sequence")


def factorize_naive(seq: SymbolSequence) -> Factorization:
    """Reference factorization by direct substring search (quadratic or worse)."""
    _check(seq)
    # chr() keeps str.find usable for any alphabet size
    s = "".join(map(chr, seq.data.tolist()))
    n = len(s)
    ends = []
    p = 0
    last_exhaustive = True
    while p < n:
        q = p
        while q < n and s[p:q + 1] in s[:q]:
            q += 1
        if q == n:
            last_exhaustive = False
            q = n - 1
        ends.append(q + 1)
        p = q + 1
    return Factorization(n, tuple(ends), last_exhaustive)


@numba.njit(cache=True, nogil=True)
def _lz76_dense(data, sigma):
    n = data.shape[0]
    cap = 2 * n + 1
    nxt = np.full((cap, sigma), -1, dtype=np.int32)
    link = np.empty(cap, dtype=np.int32)
    length = np.empty(cap, dtype=np.int32)
    first = np.empty(cap, dtype=np.int32)
    link[0] = -1
    length[0] = 0
    first[0] = -1
    size = 1
    last = 0
    for i in range(n):
        c = data[i]
        cur = size
        size += 1
        length[cur] = length[last] + 1
        first[cur] = i
        p = last
        while p != -1 and nxt[p, c] == -1:
            nxt[p, c] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            q = nxt[p, c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = size
                size += 1
                length[clone] = length[p] + 1
                for a in range(sigma):
                    nxt[clone, a] = nxt[q, a]
                link[clone] = link[q]
                first[clone] = first[q]
                while p != -1 and nxt[p, c] == q:
                    nxt[p, c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur

    ends = np.empty(n, dtype=np.int64)
    k = 0
    pos = 0
    exhaustive = True
    while pos < n:
        state = 0
        j = pos
        while True:
            if j == n:
                exhaustive = False
                j = n - 1
                break
            nstate = nxt[state, data[j]]
            # an occurrence ending before j starts before pos
            if first[nstate] < j:
                state = nstate
                j += 1
            else:
                break
        ends[k] = j + 1
        k += 1
        pos = j + 1
    return ends[:k], exhaustive


def _lz76_dict(data: np.ndarray):
    """Same algorithm with dict transitions, for alphabets too large for a dense table."""
    data = data.tolist()
    n = len(data)
    nxt = [{}]
    link = [-1]
    length = [0]
    first = [-1]
    last = 0
    for i, c in enumerate(data):
        cur = len(nxt)
        nxt.append({})
        link.append(0)
        length.append(length[last] + 1)
        first.append(i)
        p = last
        while p != -1 and c not in nxt[p]:
            nxt[p][c] = cur
            p = link[p]
        if p != -1:
            q = nxt[p][c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = len(nxt)
                nxt.append(dict(nxt[q]))
                link.append(link[q])
                length.append(length[p] + 1)
                first.append(first[q])
                while p != -1 and nxt[p].get(c) == q:
                    nxt[p][c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur

    ends = []
    pos = 0
    exhaustive = True
    while pos < n:
        state = 0
        j = pos
        while True:
            if j == n:
                exhaustive = False
                j = n - 1
                break
            nstate = nxt[state][data[j]]
            if first[nstate] < j:
                state = nstate
                j += 1
            else:
                break
        ends.append(j + 1)
        pos = j + 1
    return np.asarray(ends, dtype=np.int64), exhaustive


def _run(seq: SymbolSequence):
    _check(seq)
    sigma = max(seq.alphabet.size, 1)
    if (2 * seq.n + 1) * sigma <= _DENSE_CELL_LIMIT:
        return _lz76_dense(seq.data, sigma)
    return _lz76_dict(seq.data)


def factorize(seq: SymbolSequence) -> Factorization:
    """LZ76 factorization in linear time (for a fixed alphabet size)."""
    ends, exhaustive = _run(seq)
    return Factorization(seq.n, tuple(ends.tolist()), bool(exhaustive))


def lz_complexity(seq: SymbolSequence) -> int:
    """Number of LZ76 factors ``C_LZ`` of ``seq``."""
    ends, _ = _run(seq)
    return int(ends.shape[0])
