"""Per-text complexity-entropy records and corpus-level statistics."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

from . import _rng
from .entropy import DEFAULT_M_MAX, DEFAULT_REPEATS, entropy_rate, excess_entropy
from .scramble import LEVELS, ScrambleSpec, scramble
from .textpipe import Document

SCHEMA_VERSION = 1

# Level prefixes used in record fields: sentence, word, character, e-word.
_PREFIX = {"sentence": "s", "word": "w", "character": "c", "eword": "e"}


class EmptyInputError(ValueError):
    pass


class DegenerateFitError(ValueError):
    pass


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class AnalysisParams:
    m_max: int = DEFAULT_M_MAX
    repeats: int = DEFAULT_REPEATS
    n_seeds: int = 5
    seed: int = 0
    surrogate_seed: int = 0
    include_eword: bool = False
    eword_delimiter: str = "e"
    workers: int = 1

    def key(self) -> dict:
        """Parameters that change the numbers (``workers`` does not)."""
        d = asdict(self)
        d.pop("workers")
        return d


@dataclass
class TextAnalysisRecord:
    """Entropy rate and excess entropy of a text at every organization level.

    Surrogate-level values (``h_s``, ``e_w``, ...) are means over
    ``n_seeds`` scrambles; the ``*_sd`` fields are the matching population
    standard deviations. Gains are derived on access and written out with
    the record.
    """

    id: str
    author: str
    title: str
    n: int
    short: bool
    h_orig: float
    e_orig: float
    h_s: float
    h_s_sd: float
    e_s: float
    e_s_sd: float
    h_w: float
    h_w_sd: float
    e_w: float
    e_w_sd: float
    h_c: float
    h_c_sd: float
    e_c: float
    e_c_sd: float
    vocab: int
    word_entropy: float
    sentence_length_entropy: float
    n_sentences: int
    m_max: int
    repeats: int
    n_seeds: int
    seed: int
    surrogate_seed: int
    cut_length: int
    h_e: float | None = None
    h_e_sd: float | None = None
    e_e: float | None = None
    e_e_sd: float | None = None

    @property
    def I_s(self) -> float:
        return self.h_s - self.h_orig

    @property
    def I_w(self) -> float:
        return self.h_w - self.h_s

    @property
    def I_c(self) -> float:
        return self.h_c - self.h_w

    @property
    def dE_s(self) -> float:
        return self.e_orig - self.e_s

    @property
    def dE_w(self) -> float:
        return self.e_s - self.e_w

    @property
    def dE_c(self) -> float:
        return self.e_w - self.e_c

    @property
    def D_s(self) -> float:
        """Word-level difference ``h_w - h_orig`` (positive for real texts)."""
        return self.h_w - self.h_orig

    @property
    def D_s_neg(self) -> float:
        """The opposite sign convention, ``h_orig - h_w``."""
        return self.h_orig - self.h_w

    def to_row(self) -> dict:
        row = {f.name: getattr(self, f.name) for f in fields(self)}
        for name in DERIVED_COLUMNS:
            row[name] = getattr(self, name)
        return row

    @classmethod
    def from_row(cls, row: dict) -> "TextAnalysisRecord":
        missing = [c for c in REQUIRED_COLUMNS if c not in row]
        if missing:
            raise SchemaError(f"record is missing columns: {', '.join(missing)}")
        kwargs = {}
        for f in fields(cls):
            if f.name not in row:
                continue
            kwargs[f.name] = _coerce(f.name, row[f.name])
        return cls(**kwargs)


DERIVED_COLUMNS = ("I_s", "I_w", "I_c", "dE_s", "dE_w", "dE_c", "D_s", "D_s_neg")
BASE_COLUMNS = tuple(f.name for f in fields(TextAnalysisRecord))
CSV_COLUMNS = BASE_COLUMNS + DERIVED_COLUMNS
REQUIRED_COLUMNS = tuple(
    f.name for f in fields(TextAnalysisRecord) if not f.name.startswith(("h_e", "e_e"))
)

_INT_FIELDS = {"n", "vocab", "n_sentences", "m_max", "repeats", "n_seeds", "seed",
               "surrogate_seed", "cut_length"}
_STR_FIELDS = {"id", "author", "title"}


def _coerce(name: str, value):
    if name in _STR_FIELDS:
        return "" if value is None else str(value)
    if name == "short":
        if isinstance(value, str):
            return value.strip().lower() in ("true", "1", "yes")
        return bool(value)
    if value is None or value == "":
        return None
    if name in _INT_FIELDS:
        return int(value)
    return float(value)


def _entropy_stats(seqs, params: AnalysisParams, level_code: int):
    hs, es = [], []
    for i, seq in enumerate(seqs):
        hs.append(entropy_rate(seq).h_lz)
        e_seed = _rng.derive_seed(params.surrogate_seed, _rng.SURROGATE_SEED, level_code, i)
        es.append(excess_entropy(seq, params.m_max, params.repeats, e_seed, params.workers).e_lz)
    hs, es = np.asarray(hs), np.asarray(es)
    return float(hs.mean()), float(hs.std()), float(es.mean()), float(es.std())


def analyze_text(doc: Document, params: AnalysisParams = AnalysisParams()) -> TextAnalysisRecord:
    """Estimate ``(h, E)`` for the original text and every scramble level.

    Scrambles are drawn from ``params.seed``; block-shuffle surrogates inside
    the excess-entropy estimator from ``params.surrogate_seed``. The original
    text's values therefore do not depend on ``params.seed``.
    """
    if params.n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    flat = doc.flat
    h_orig = entropy_rate(flat).h_lz
    e_seed = _rng.derive_seed(params.surrogate_seed, _rng.SURROGATE_SEED, len(LEVELS), 0)
    e_orig = excess_entropy(flat, params.m_max, params.repeats, e_seed, params.workers).e_lz

    levels = ["sentence", "word", "character"] + (["eword"] if params.include_eword else [])
    values = {}
    for level in levels:
        code = LEVELS.index(level)
        seqs = []
        for i in range(params.n_seeds):
            s = _rng.derive_seed(params.seed, _rng.SCRAMBLE, code, i)
            seqs.append(scramble(doc, ScrambleSpec(level, s, params.eword_delimiter)))
        h, h_sd, e, e_sd = _entropy_stats(seqs, params, code)
        p = _PREFIX[level]
        values.update({f"h_{p}": h, f"h_{p}_sd": h_sd, f"e_{p}": e, f"e_{p}_sd": e_sd})

    vocab, s_w = word_statistics(doc)
    meta = doc.meta
    return TextAnalysisRecord(
        id=str(meta.get("id", "")),
        author=str(meta.get("author", "")),
        title=str(meta.get("title", "")),
        n=flat.n,
        short=doc.is_short,
        h_orig=h_orig,
        e_orig=e_orig,
        vocab=vocab,
        word_entropy=s_w,
        sentence_length_entropy=sentence_length_entropy(doc),
        n_sentences=len(doc.sentences),
        m_max=params.m_max,
        repeats=params.repeats,
        n_seeds=params.n_seeds,
        seed=params.seed,
        surrogate_seed=params.surrogate_seed,
        cut_length=doc.cut_length,
        **values,
    )


def _shannon(counts: Iterable[int]) -> float:
    c = np.asarray(list(counts), dtype=float)
    p = c / c.sum()
    # 0 instead of -0.0 for degenerate histograms
    return float(-(p * np.log2(p)).sum()) + 0.0


def word_statistics(doc: Document) -> tuple[int, float]:
    """Vocabulary size and entropy (bits) of the word-frequency histogram."""
    words = doc.words
    if not words:
        raise EmptyInputError("document has no words")
    counts = Counter(words)
    return len(counts), _shannon(counts.values())


def sentence_length_entropy(doc: Document) -> float:
    """Entropy (bits) of the histogram of sentence lengths in words."""
    if not doc.sentences:
        return 0.0
    return _shannon(Counter(len(s) for s in doc.sentences).values())


def center_of_mass(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    if len(points) == 0:
        raise EmptyInputError("center of mass of no points")
    arr = np.asarray(points, dtype=float).reshape(-1, 2)
    x, y = arr.mean(axis=0)
    return float(x), float(y)


def linear_fit(points: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Ordinary least squares line through ``points``.

    Returns ``(slope, intercept, rms_residual)`` where the residual is the
    root-mean-square vertical deviation.
    """
    arr = np.asarray(points, dtype=float).reshape(-1, 2)
    if arr.shape[0] < 2:
        raise DegenerateFitError("need at least two points")
    x, y = arr[:, 0], arr[:, 1]
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx <= 1e-300 or np.ptp(x) == 0:
        raise DegenerateFitError("x values have zero variance")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    return slope, intercept, float(math.sqrt(float(resid @ resid) / len(x)))


GAIN_PAIRS = {
    "orig": ("h_orig", "e_orig"),
    "sentence": ("h_s", "e_s"),
    "word": ("h_w", "e_w"),
    "character": ("h_c", "e_c"),
    "gain_sentence": ("I_s", "dE_s"),
    "gain_word": ("I_w", "dE_w"),
    "gain_character": ("I_c", "dE_c"),
    "ds": ("D_s", "dE_sw"),
}


def _pair(record: TextAnalysisRecord, name: str) -> float:
    if name == "dE_sw":
        # E_LZ - E_w, the companion axis of the D_s map
        return record.e_orig - record.e_w
    return getattr(record, name)


def points(records: Iterable[TextAnalysisRecord], pair: str) -> list[tuple[float, float]]:
    xname, yname = GAIN_PAIRS[pair]
    return [(_pair(r, xname), _pair(r, yname)) for r in records]


@dataclass(frozen=True)
class GroupStats:
    group: str
    T: int
    V_mean: float
    V_sd: float
    V_min: int
    V_max: int
    S_mean: float
    S_min: float
    S_max: float
    centers: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CorpusStats:
    groups: dict
    slope: float | None
    intercept: float | None
    residual: float | None


def group_stats(records: Sequence[TextAnalysisRecord], key: str = "author") -> CorpusStats:
    """Per-group vocabulary/word-entropy statistics and global ``(h, E)`` fit.

    ``V_sd`` is the population standard deviation, so a group with a single
    text has ``V_sd == 0``.
    """
    if not records:
        raise EmptyInputError("no records")
    buckets = defaultdict(list)
    for r in records:
        buckets[str(getattr(r, key))].append(r)
    groups = {}
    for name, recs in buckets.items():
        v = np.asarray([r.vocab for r in recs], dtype=float)
        s = np.asarray([r.word_entropy for r in recs], dtype=float)
        centers = {pair: center_of_mass(points(recs, pair)) for pair in GAIN_PAIRS}
        groups[name] = GroupStats(
            group=name, T=len(recs),
            V_mean=float(v.mean()), V_sd=float(v.std()), V_min=int(v.min()), V_max=int(v.max()),
            S_mean=float(s.mean()), S_min=float(s.min()), S_max=float(s.max()),
            centers=centers,
        )
    try:
        slope, intercept, residual = linear_fit(points(records, "orig"))
    except DegenerateFitError:
        slope = intercept = residual = None
    return CorpusStats(groups, slope, intercept, residual)


def records_to_csv(records: Iterable[TextAnalysisRecord]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        row = r.to_row()
        writer.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_from_csv(text: str) -> list[TextAnalysisRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise SchemaError("empty records file")
    missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise SchemaError(f"records file is missing columns: {', '.join(missing)}")
    return [TextAnalysisRecord.from_row(row) for row in reader]


def records_to_json(records: Iterable[TextAnalysisRecord]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "columns": list(CSV_COLUMNS),
        "records": [r.to_row() for r in records],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def records_from_json(text: str) -> list[TextAnalysisRecord]:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "records" not in doc:
        raise SchemaError("not a records document")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {doc.get('schema_version')!r}")
    return [TextAnalysisRecord.from_row(row) for row in doc["records"]]


def load_records(path) -> list[TextAnalysisRecord]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return records_from_json(text)
    return records_from_csv(text)
