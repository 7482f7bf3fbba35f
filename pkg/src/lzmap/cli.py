"""Command-line front end: fetch -> normalize -> analyze -> report.

Exit codes: 0 success, 1 at least one entry failed, 2 configuration error.
Logs and progress go to stderr; data goes to stdout or to ``--out``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .analysis import (
    GAIN_PAIRS,
    AnalysisParams,
    SchemaError,
    TextAnalysisRecord,
    analyze_text,
    group_stats,
    load_records,
    points,
    records_to_csv,
    records_to_json,
)
from .corpus import FetchError, ResultCache, load_entry, read_manifest, strip_boilerplate
from .textpipe import DEFAULT_CUT, NormalizationOptions, normalize

logger = logging.getLogger("lzmap")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2
MIN_CUT = 1000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    manifest: Path | None = None
    cache_dir: Path = Path(".lzmap-cache")
    cut_length: int = DEFAULT_CUT
    m_max: int = 40
    repeats: int = 10
    n_seeds: int = 5
    seed: int = 0
    surrogate_seed: int = 0
    output_format: str = "csv"
    normalization: NormalizationOptions = field(default_factory=NormalizationOptions)
    include_eword: bool = False
    strip: bool = True
    use_cache: bool = True
    jobs: int = 1
    mirror: str | None = None
    allow_short_cut: bool = False

    def validate(self) -> None:
        for name in ("m_max", "repeats", "n_seeds", "jobs", "cut_length"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.cut_length < MIN_CUT and not self.allow_short_cut:
            raise ConfigError(f"cut length {self.cut_length} < {MIN_CUT}; pass --allow-short-cut to override")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")

    def params(self) -> AnalysisParams:
        return AnalysisParams(
            m_max=self.m_max, repeats=self.repeats, n_seeds=self.n_seeds, seed=self.seed,
            surrogate_seed=self.surrogate_seed, include_eword=self.include_eword,
        )

    def cache_params(self) -> dict:
        d = self.params().key()
        d.update(cut_length=self.cut_length, strip=self.strip,
                 normalization=vars(self.normalization).copy())
        return d


def _analyze_one(row, config: RunConfig):
    """Worker: returns ``(row_dict, None)`` or ``(None, error message)``."""
    try:
        entry = load_entry(row, config.cache_dir, config.mirror)
        cache = ResultCache(config.cache_dir)
        cparams = config.cache_params()
        if config.use_cache:
            hit = cache.lookup(entry.sha256, cparams)
            if hit is not None:
                return hit, None
        text = strip_boilerplate(entry).text if config.strip else entry.text
        meta = {"id": row.id or Path(row.path).stem, "author": row.author, "title": row.title}
        doc = normalize(text, config.cut_length, meta, config.normalization)
        record = analyze_text(doc, config.params())
        out = record.to_row()
        if config.use_cache:
            cache.store(entry.sha256, cparams, out)
        return out, None
    except Exception as exc:  # reported per entry; other texts continue
        return None, f"{type(exc).__name__}: {exc}"


def cmd_fetch(args) -> int:
    rows = read_manifest(args.manifest)
    failures = []
    for row in rows:
        try:
            entry = load_entry(row, args.cache, args.mirror, delay=args.delay)
            print(f"ok\t{row.id or row.path}\t{len(entry.raw)}\t{entry.sha256}", file=sys.stderr)
        except (FetchError, ValueError, OSError) as exc:
            failures.append((row.id or row.title, str(exc)))
    for ident, msg in failures:
        print(f"error\t{ident}\t{msg}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        manifest=Path(args.manifest),
        cache_dir=Path(args.cache),
        cut_length=args.cut,
        m_max=args.mmax,
        repeats=args.repeats,
        n_seeds=args.seeds,
        seed=args.seed,
        surrogate_seed=args.surrogate_seed,
        output_format=args.format,
        normalization=NormalizationOptions(
            collapse_whitespace=not args.keep_spacing,
            drop_apostrophes=args.drop_apostrophes,
            join_hyphens=args.join_hyphens,
        ),
        include_eword=args.eword,
        strip=not args.no_strip,
        use_cache=not args.no_cache,
        jobs=args.jobs,
        mirror=args.mirror,
        allow_short_cut=args.allow_short_cut,
    )


def run_analyze(config: RunConfig) -> tuple[list[TextAnalysisRecord], list[tuple[str, str]]]:
    config.validate()
    rows = read_manifest(config.manifest)
    if config.jobs > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_analyze_one, rows, [config] * len(rows)))
    else:
        results = [_analyze_one(r, config) for r in rows]
    records, failures = [], []
    for row, (out, err) in zip(rows, results):
        ident = row.id or row.path
        if err is not None:
            failures.append((ident, err))
            logger.error("%s: %s", ident, err)
        else:
            records.append(TextAnalysisRecord.from_row(out))
            logger.info("%s: h=%.4f E=%.4f", ident, out["h_orig"], out["e_orig"])
    return records, failures


def cmd_analyze(args) -> int:
    try:
        config = _config_from_args(args)
        config.validate()
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    records, failures = run_analyze(config)
    text = records_to_json(records) if config.output_format == "json" else records_to_csv(records)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for ident, msg in failures:
        print(f"error\t{ident}\t{msg}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


_STATS_COLUMNS = ("group", "T", "V_mean", "V_sd", "V_min", "V_max", "S_mean", "S_min", "S_max")


def _label(text: str) -> str:
    return "_".join(text.split()) or "-"


def write_report(records, group_by: str, out_dir: Path) -> dict:
    stats = group_stats(records, group_by)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["\t".join(_STATS_COLUMNS)]
    for g in stats.groups.values():
        lines.append("\t".join([
            g.group, str(g.T), f"{g.V_mean:.1f}", f"{g.V_sd:.1f}", str(g.V_min), str(g.V_max),
            f"{g.S_mean:.4f}", f"{g.S_min:.4f}", f"{g.S_max:.4f}",
        ]))
    table = "\n".join(lines) + "\n"
    (out_dir / "group_stats.tsv").write_text(table, encoding="utf-8")
    for pair in GAIN_PAIRS:
        body = ["# x y label"]
        for r, (x, y) in zip(records, points(records, pair)):
            body.append(f"{x!r} {y!r} {_label(str(getattr(r, group_by)))}")
        (out_dir / f"scatter_{pair}.txt").write_text("\n".join(body) + "\n", encoding="utf-8")
    summary = {
        "fit": {"slope": stats.slope, "intercept": stats.intercept, "rms_residual": stats.residual},
        "groups": {
            name: {**{c: getattr(g, c) for c in _STATS_COLUMNS}, "centers": g.centers}
            for name, g in stats.groups.items()
        },
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return {"table": table, "stats": stats}


def cmd_report(args) -> int:
    try:
        records = load_records(args.records)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"cannot read records: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not records:
        print("records file has no rows", file=sys.stderr)
        return EXIT_CONFIG
    result = write_report(records, args.group_by, Path(args.out))
    sys.stdout.write(result["table"])
    st = result["stats"]
    if st.slope is not None:
        print(f"fit E = {st.slope:.4f} * h + {st.intercept:.4f}  (rms {st.residual:.4f})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lzmap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fetch", help="download manifest entries into the cache")
    f.add_argument("--manifest", required=True)
    f.add_argument("--cache", default=".lzmap-cache")
    f.add_argument("--mirror", default=None, help="URL template with {id}; default $LZMAP_MIRROR")
    f.add_argument("--delay", type=float, default=0.0, help="seconds to wait before each download")
    f.set_defaults(func=cmd_fetch)

    a = sub.add_parser("analyze", help="compute complexity-entropy records")
    a.add_argument("--manifest", required=True)
    a.add_argument("--cache", default=".lzmap-cache")
    a.add_argument("--mirror", default=None)
    a.add_argument("--cut", type=int, default=DEFAULT_CUT, help="symbols kept per text (default %(default)s)")
    a.add_argument("--mmax", type=int, default=40, help="largest shuffle block length (default %(default)s)")
    a.add_argument("--repeats", type=int, default=10, help="shuffles per block length (default %(default)s)")
    a.add_argument("--seeds", type=int, default=5, help="scrambles per level (default %(default)s)")
    a.add_argument("--seed", type=int, default=0, help="master seed for scrambles")
    a.add_argument("--surrogate-seed", type=int, default=0, help="seed for block-shuffle surrogates")
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument("--out", default=None)
    a.add_argument("--format", choices=("csv", "json"), default="csv")
    a.add_argument("--eword", action="store_true", help="also run the e-word scramble")
    a.add_argument("--keep-spacing", action="store_true", help="do not collapse whitespace runs")
    a.add_argument("--drop-apostrophes", action="store_true")
    a.add_argument("--join-hyphens", action="store_true")
    a.add_argument("--no-strip", action="store_true", help="keep Gutenberg header/footer")
    a.add_argument("--no-cache", action="store_true", help="neither read nor write cached results")
    a.add_argument("--allow-short-cut", action="store_true", help=f"permit --cut below {MIN_CUT}")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("report", help="group statistics, fit and scatter files")
    r.add_argument("--records", required=True)
    r.add_argument("--group-by", default="author")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
