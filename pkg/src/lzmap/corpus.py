"""Corpus ingestion and the on-disk cache.

Cache layout::

    <cache>/raw/<id>.txt          raw bytes as downloaded
    <cache>/results/<key>.json    analysis records, checksummed

All writes go to a temporary file in the target directory followed by an
atomic rename, so concurrent writers never leave a partial file behind.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import re
import tempfile
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

MIRROR_ENV = "LZMAP_MIRROR"
DEFAULT_MIRROR = "https://www.gutenberg.org/cache/epub/{id}/pg{id}.txt"

_START = re.compile(r"^\s*\*{3,}\s*START OF (THE |THIS )?PROJECT GUTENBERG.*$", re.I | re.M)
_END = re.compile(r"^\s*\*{3,}\s*END OF (THE |THIS )?PROJECT GUTENBERG.*$", re.I | re.M)
_SAFE_ID = re.compile(r"^[A-Za-z0-9._-]+$")


class FetchError(RuntimeError):
    pass


class FormatError(FetchError):
    pass


class CacheChecksumError(RuntimeError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    source: str
    author: str
    title: str
    raw: bytes
    sha256: str

    @classmethod
    def from_bytes(cls, raw: bytes, source: str, author: str = "", title: str = "") -> "CorpusEntry":
        return cls(source, author, title, raw, hashlib.sha256(raw).hexdigest())

    def verify(self) -> bool:
        return hashlib.sha256(self.raw).hexdigest() == self.sha256

    @property
    def text(self) -> str:
        return decode_text(self.raw)


@dataclass(frozen=True)
class StrippedText:
    text: str
    has_start: bool
    has_end: bool

    @property
    def flagged(self) -> bool:
        return not (self.has_start and self.has_end)


@dataclass(frozen=True)
class ManifestRow:
    id: str
    author: str
    title: str
    path: str = ""


def decode_text(raw: bytes) -> str:
    if raw.startswith(b"\xef\xbb\xbf"):
        raw = raw[3:]
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _check_id(id: str) -> str:
    id = str(id).strip()
    if not _SAFE_ID.match(id):
        raise ValueError(f"invalid catalog id {id!r}")
    return id


def raw_path(cache_dir, id: str) -> Path:
    return Path(cache_dir) / "raw" / f"{_check_id(id)}.txt"


def _validate_body(body: bytes, id: str) -> None:
    if not body.strip():
        raise FormatError(f"{id}: empty response")
    head = body[:2048].lower()
    if b"\x00" in body[:65536]:
        raise FormatError(f"{id}: binary response")
    if b"<html" in head or b"<!doctype html" in head:
        raise FormatError(f"{id}: got HTML instead of plain text")


def fetch_remote(
    id: str,
    cache_dir,
    mirror: str | None = None,
    timeout: float = 30.0,
    delay: float = 0.0,
    author: str = "",
    title: str = "",
) -> CorpusEntry:
    """Plain text for catalog ``id``, downloading it on a cache miss.

    ``mirror`` is a URL template with an ``{id}`` field; it defaults to the
    ``LZMAP_MIRROR`` environment variable, then to the Gutenberg cache URL.
    """
    path = raw_path(cache_dir, id)
    if path.exists():
        return CorpusEntry.from_bytes(path.read_bytes(), str(id), author, title)
    template = mirror or os.environ.get(MIRROR_ENV) or DEFAULT_MIRROR
    url = template.format(id=id)
    if delay:
        time.sleep(delay)
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            body = resp.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise FetchError(f"{id}: could not fetch {url}: {exc}") from exc
    _validate_body(body, str(id))
    _atomic_write(path, body)
    logger.info("fetched %s (%d bytes)", id, len(body))
    return CorpusEntry.from_bytes(body, str(id), author, title)


def load_local(path, author: str = "", title: str = "") -> CorpusEntry:
    path = Path(path)
    return CorpusEntry.from_bytes(path.read_bytes(), str(path), author, title)


def strip_boilerplate(entry: CorpusEntry | str) -> StrippedText:
    """Text between the ``*** START OF`` and ``*** END OF`` marker lines.

    With a missing marker the corresponding end of the text is kept, and the
    result is flagged.
    """
    text = entry.text if isinstance(entry, CorpusEntry) else entry
    start = _START.search(text)
    end = _END.search(text, start.end() if start else 0)
    lo = start.end() if start else 0
    hi = end.start() if end else len(text)
    if not (start and end):
        logger.warning("boilerplate markers missing (start=%s, end=%s)", bool(start), bool(end))
    return StrippedText(text[lo:hi].strip("\r\n"), bool(start), bool(end))


def read_manifest(path) -> list[ManifestRow]:
    """Rows of a UTF-8 CSV manifest with columns ``id,author,title[,path]``.

    A relative ``path`` is resolved against the manifest's directory.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        cols = set(reader.fieldnames or ())
        if not {"id", "author", "title"} <= cols:
            raise ValueError(f"{path}: manifest needs id,author,title columns")
        rows = []
        for rec in reader:
            local = (rec.get("path") or "").strip()
            if local and not os.path.isabs(local):
                local = str(path.parent / local)
            rows.append(ManifestRow(
                (rec["id"] or "").strip(), (rec["author"] or "").strip(),
                (rec["title"] or "").strip(), local,
            ))
    return rows


def load_entry(row: ManifestRow, cache_dir, mirror: str | None = None, **kw) -> CorpusEntry:
    if row.path:
        return load_local(row.path, row.author, row.title)
    if not row.id:
        raise FetchError(f"manifest row {row.title!r} has neither id nor path")
    return fetch_remote(row.id, cache_dir, mirror, author=row.author, title=row.title, **kw)


def params_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    """Write-once store of analysis rows keyed by (content hash, parameter hash)."""

    def __init__(self, cache_dir):
        self.root = Path(cache_dir) / "results"

    def key(self, content_hash: str, params: dict) -> str:
        return hashlib.sha256(f"{content_hash}:{params_hash(params)}".encode()).hexdigest()

    def path(self, content_hash: str, params: dict) -> Path:
        return self.root / f"{self.key(content_hash, params)}.json"

    def store(self, content_hash: str, params: dict, row: dict) -> Path:
        path = self.path(content_hash, params)
        if path.exists():
            try:
                self.load(content_hash, params)
                return path
            except CacheChecksumError:
                pass
        payload = {"content_hash": content_hash, "params_hash": params_hash(params), "row": row}
        body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        doc = {"checksum": hashlib.sha256(body.encode()).hexdigest(), "payload": body}
        _atomic_write(path, json.dumps(doc).encode())
        return path

    def load(self, content_hash: str, params: dict) -> dict | None:
        """The cached row, None on a miss; raises on a corrupt entry."""
        path = self.path(content_hash, params)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            body = doc["payload"]
            if hashlib.sha256(body.encode()).hexdigest() != doc["checksum"]:
                raise ValueError("checksum mismatch")
            payload = json.loads(body)
        except (ValueError, KeyError, TypeError) as exc:
            raise CacheChecksumError(f"corrupt cache entry {path.name}: {exc}") from exc
        if payload["content_hash"] != content_hash or payload["params_hash"] != params_hash(params):
            return None
        return payload["row"]

    def lookup(self, content_hash: str, params: dict) -> dict | None:
        """Like :meth:`load`, but corrupt entries are logged and treated as misses."""
        try:
            return self.load(content_hash, params)
        except CacheChecksumError as exc:
            logger.warning("%s; recomputing", exc)
            return None
