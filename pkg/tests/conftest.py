import math
import os
from pathlib import Path

import numpy as np
import pytest

from lzmap.seqcore import Alphabet, SymbolSequence

FIXTURES = Path(__file__).parent / "fixtures"
BINARY = Alphabet((0, 1))

# criterion number -> (status, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def binary_entropy(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def markov_chain(n, switch_p, rng):
    """Symmetric two-state chain: flip state with probability ``switch_p``."""
    flips = rng.random(n) < switch_p
    flips[0] = rng.random() < 0.5
    return SymbolSequence(BINARY, np.cumsum(flips) % 2)


def iid(n, size, rng):
    return SymbolSequence(Alphabet(tuple(range(size))), rng.integers(0, size, n))


def synthetic_text(n_chars, seed=0):
    """Zipf-distributed pseudo-words grouped into sentences of random length."""
    rng = np.random.default_rng(seed)
    letters = np.array(list("etaoinshrdlcumwfgypbvkjxqz"))
    freq = 1.0 / np.arange(1, 27) ** 0.9
    vocab = set()
    while len(vocab) < 3000:
        k = int(rng.integers(1, 10))
        vocab.add("".join(rng.choice(letters, k, p=freq / freq.sum())))
    vocab = sorted(vocab)
    rng.shuffle(vocab)
    zipf = 1.0 / np.arange(1, len(vocab) + 1)
    zipf /= zipf.sum()
    out, size = [], 0
    while size < n_chars * 1.05:
        words = rng.choice(vocab, int(rng.integers(3, 25)), p=zipf)
        s = " ".join(words).capitalize() + ". "
        out.append(s)
        size += len(s)
    return "".join(out)


@pytest.fixture(scope="session")
def hamlet_excerpt():
    return (FIXTURES / "hamlet_excerpt.txt").read_text(encoding="utf-8")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num:>2}: {status:<4} {detail}")


def corpus_dir():
    value = os.environ.get("LZMAP_CORPUS_DIR")
    return Path(value) if value else None
