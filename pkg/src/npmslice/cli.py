"""Command-line pipeline: ingest, slice, score, evaluate, stats, run.

Stages hand off through files in the output directory:

    ingest.jsonl, work/<id>/      extraction log and unpacked archives
    slices_<strategy>.jsonl       one Slice per line
    slice_log.jsonl, annotations/ per-package slicing notes
    scores_<strategy>.jsonl       one verdict (or unscored reason) per slice
    report.json, *.csv            verdicts, metrics, ROC, SFR, context stats

Exit codes: 0 ok, 2 usage, 3 missing stage input, 4 fatal IO.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from . import evaluation as ev
from .catalog import CatalogError, builtin_catalog, load_catalog
from .ingest import (
    ExtractionRecord, IngestError, PackageRef, corpus_summary, ingest_package, is_archive,
    load_corpus, load_file_set,
)
from .scoring import (
    ReplayTransport, ScorerConfig, Unscored, build_prompt, load_template, read_results,
    results_to_jsonl, score_many_remote, score_stub,
)
from .slicer import BUDGET_PRESETS, SliceBudget, read_slices, slice_package, slices_to_jsonl

log = logging.getLogger("npmslice")

EXIT_OK, EXIT_USAGE, EXIT_MISSING, EXIT_IO = 0, 2, 3, 4
CLI_STRATEGIES = ("static", "taint", "baseline")


class StageError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    manifest: str | None = None
    out: str = "npmslice-out"
    strategies: list = field(default_factory=lambda: ["static", "taint"])
    budget: str = "fast"
    wall_clock: float | None = None
    max_nodes: int | None = None
    max_slices: int | None = None
    char_cap: int | None = None
    catalog: str | None = None
    scorer: str = "stub"
    endpoint_url: str | None = None
    api_key_env: str = "NPMSLICE_API_KEY"
    model: str = "local-model"
    max_in_flight: int = 4
    retries: int = 3
    request_timeout: float = 60.0
    replay: str | None = None
    template: str | None = None
    tau: float = ev.DEFAULT_TAU
    token_mode: str = "approx"
    token_command: str | None = None
    chunk_tokens: int = 500
    workers: int = 1

    def validate(self):
        if not self.strategies:
            raise StageError("at least one strategy is required", EXIT_USAGE)
        bad = [s for s in self.strategies if s not in CLI_STRATEGIES]
        if bad:
            raise StageError(f"unknown strategies: {', '.join(bad)}", EXIT_USAGE)
        if self.budget not in BUDGET_PRESETS:
            raise StageError(f"unknown budget preset {self.budget!r}", EXIT_USAGE)
        if self.scorer not in ("stub", "remote"):
            raise StageError(f"unknown scorer {self.scorer!r}", EXIT_USAGE)
        if self.scorer == "remote" and not self.endpoint_url:
            raise StageError("remote scorer needs endpoint_url", EXIT_USAGE)
        if not 0.0 <= self.tau <= 1.0:
            raise StageError("tau must lie in [0, 1]", EXIT_USAGE)
        if self.workers < 1:
            raise StageError("workers must be at least 1", EXIT_USAGE)
        try:
            self.slice_budget()
            if self.scorer == "remote":
                self.scorer_config()
        except ValueError as exc:
            raise StageError(str(exc), EXIT_USAGE) from None

    def slice_budget(self) -> SliceBudget:
        b = BUDGET_PRESETS[self.budget]
        over = {k: v for k, v in (("wall_clock_per_package", self.wall_clock),
                                  ("max_nodes_per_slice", self.max_nodes),
                                  ("max_slices_per_package", self.max_slices),
                                  ("char_cap", self.char_cap)) if v is not None}
        return replace(b, **over)

    def scorer_config(self) -> ScorerConfig:
        return ScorerConfig(self.endpoint_url, self.api_key_env, self.model, self.max_in_flight,
                            self.retries, self.request_timeout)


def read_config_file(path: str | Path) -> dict:
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix.lower() == ".json":
        data = json.loads(raw)
    else:
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        data = tomllib.loads(raw.decode("utf-8"))
    known = {f.name for f in fields(RunConfig)}
    flat = {}
    for k, v in data.items():
        if isinstance(v, dict):
            for k2, v2 in v.items():
                flat[k2.replace("-", "_")] = v2
        else:
            flat[k.replace("-", "_")] = v
    unknown = sorted(set(flat) - known)
    if unknown:
        raise StageError(f"unknown config keys: {', '.join(unknown)}", EXIT_USAGE)
    return flat


def _catalog(cfg: RunConfig):
    if not cfg.catalog:
        return builtin_catalog()
    try:
        return load_catalog(cfg.catalog, base=builtin_catalog())
    except OSError as exc:
        raise StageError(f"cannot read catalog: {exc}", EXIT_USAGE) from None
    except CatalogError as exc:
        raise StageError(f"bad catalog: {exc}", EXIT_USAGE) from None


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise StageError(f"output directory not writable: {exc}", EXIT_IO) from None
    return out


def _write(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise StageError(f"cannot write {path}: {exc}", EXIT_IO) from None


def _need(path: Path, stage: str) -> Path:
    if not path.exists():
        raise StageError(f"missing {path.name}; run the '{stage}' stage first", EXIT_MISSING)
    return path


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=1))


def _ingest_job(args):
    ref, base, work = args
    fs = ingest_package(ref, base, work)
    return ExtractionRecord.from_set(fs)


def cmd_ingest(cfg: RunConfig) -> list[dict]:
    if not cfg.manifest:
        raise StageError("ingest needs --manifest", EXIT_USAGE)
    manifest = Path(cfg.manifest)
    if not manifest.is_file():
        raise StageError(f"manifest not found: {manifest}", EXIT_USAGE)
    out = _out(cfg)
    try:
        refs = load_corpus(manifest, check_paths=False)
    except (ValueError, IngestError) as exc:
        raise StageError(f"bad manifest: {exc}", EXIT_USAGE) from None
    base = manifest.parent.resolve()
    jobs = []
    for r in refs:
        origin = Path(r.origin_path) if Path(r.origin_path).is_absolute() else base / r.origin_path
        work = (out / "work" / _safe_name(r.id)) if is_archive(origin) else None
        jobs.append((r, base, work))
    records = _map(_ingest_job, jobs, cfg.workers)
    rows = []
    for (ref, _, work), rec in zip(jobs, records):
        d = json.loads(rec.to_json())
        origin = Path(ref.origin_path) if Path(ref.origin_path).is_absolute() else base / ref.origin_path
        d["root"] = f"work/{_safe_name(ref.id)}" if work is not None else str(origin.resolve())
        rows.append(d)
    _write(out / "ingest.jsonl", "".join(json.dumps(r) + "\n" for r in rows))
    tally = corpus_summary(_Status(r) for r in rows)
    _write(out / "ingest_summary.json", json.dumps(tally, indent=2) + "\n")
    log.info("ingested %d packages", len(rows))
    return rows


class _Status:
    """Adapter so corpus_summary can tally extraction rows."""

    def __init__(self, row):
        self.package = PackageRef(row["id"], row["origin_path"], row["label"])
        self.status = row["status"]


def _ingest_rows(out: Path) -> list[dict]:
    path = _need(out / "ingest.jsonl", "ingest")
    rows = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    return sorted(rows, key=lambda r: r["id"])


def _file_set(out: Path, row: dict):
    ref = PackageRef(row["id"], row["origin_path"], row["label"])
    root = Path(row["root"])
    if not root.is_absolute():
        root = out / root
    return load_file_set(ref, root, row["status"])


def _slice_job(args):
    out, row, catalog, strategies, budget, chunk = args
    fs = _file_set(out, row)
    return slice_package(fs, catalog, strategies, budget, chunk)


def cmd_slice(cfg: RunConfig) -> dict:
    out = _out(cfg)
    rows = _ingest_rows(out)
    catalog = _catalog(cfg)
    budget = cfg.slice_budget()
    jobs = [(out, r, catalog, tuple(cfg.strategies), budget, cfg.chunk_tokens) for r in rows]
    results = _map(_slice_job, jobs, cfg.workers)
    per_strategy = {s: [] for s in cfg.strategies}
    log_rows = []
    ann_dir = out / "annotations"
    for row, res in zip(rows, results):
        notes = list(row.get("notes", []))
        if row["status"] != "ok":
            notes.append(f"status:{row['status']}")
        if res.error:
            notes.append(f"slice_error:{res.error}")
        if res.diagnostics:
            notes.append(f"parse_diagnostics:{res.diagnostics}")
        for s in cfg.strategies:
            per_strategy[s].extend(res.slices.get(s, []))
            if res.exhausted.get(s):
                notes.append(f"budget_exhausted:{s}")
        entry = {
            "package": row["id"],
            "status": row["status"],
            "slices": {s: len(res.slices.get(s, [])) for s in cfg.strategies},
            "budget_exhausted": {s: bool(res.exhausted.get(s)) for s in cfg.strategies},
            "diagnostics": res.diagnostics,
            "error": res.error,
            "notes": notes,
        }
        log_rows.append(entry)
        if any(n.startswith(("budget_exhausted", "slice_error", "status:", "corrupt", "path_traversal",
                             "lossy_decode", "parse_diagnostics")) for n in notes):
            ann_dir.mkdir(exist_ok=True)
            _write(ann_dir / f"{_safe_name(row['id'])}.json", json.dumps(entry, indent=2) + "\n")
    for s, slices in per_strategy.items():
        _write(out / f"slices_{s}.jsonl", slices_to_jsonl(slices))
    _write(out / "slice_log.jsonl", "".join(json.dumps(e) + "\n" for e in log_rows))
    return {s: len(v) for s, v in per_strategy.items()}


def _safe_name(pid: str) -> str:
    return "".join(c if c.isalnum() or c in "-_.@" else "_" for c in pid)


def _indexed(slices):
    """(slice_ref, slice) with per-package running indexes."""
    counts: dict[str, int] = {}
    for s in slices:
        i = counts.get(s.package, 0)
        counts[s.package] = i + 1
        yield (s.package, i), s


def cmd_score(cfg: RunConfig) -> dict:
    out = _out(cfg)
    catalog = _catalog(cfg)
    done = {}
    for s in cfg.strategies:
        items = list(_indexed(read_slices(_need(out / f"slices_{s}.jsonl", "slice"))))
        if cfg.scorer == "stub":
            results = [score_stub(sl, catalog, ref) for ref, sl in items]
        else:
            template = load_template(cfg.template)
            transport = ReplayTransport.from_file(cfg.replay) if cfg.replay else None
            bundles = [build_prompt(sl, template, ref) for ref, sl in items]
            results = score_many_remote(bundles, cfg.scorer_config(), transport)
        _write(out / f"scores_{s}.jsonl", results_to_jsonl(results))
        done[s] = (sum(r.scored for r in results), sum(not r.scored for r in results))
    return done


def _slice_lookup(out: Path, strategy: str):
    by_pkg: dict[str, list] = {}
    for ref, sl in _indexed(read_slices(_need(out / f"slices_{strategy}.jsonl", "slice"))):
        by_pkg.setdefault(ref[0], []).append(sl)
    return by_pkg


def _labeled_metrics(verdicts, note: list):
    labeled = [v for v in verdicts if v.package.declared_label in ("malware", "benign")]
    if len(labeled) < len(verdicts):
        note.append(f"excluded_unlabeled:{len(verdicts) - len(labeled)}")
    return ev.compute_metrics(labeled).to_dict()


def cmd_evaluate(cfg: RunConfig) -> dict:
    out = _out(cfg)
    rows = _ingest_rows(out)
    catalog = _catalog(cfg)
    refs = {r["id"]: PackageRef(r["id"], r["origin_path"], r["label"]) for r in rows}
    file_sets = {r["id"]: _file_set(out, r) for r in rows}
    report = {"tau": cfg.tau, "n_packages": len(rows), "strategies": {}, "sfr_means": {},
              "context_stats": {}}
    all_slices = {}
    all_sfr = []
    for s in cfg.strategies:
        slices = _slice_lookup(out, s)
        results = read_results(_need(out / f"scores_{s}.jsonl", "score"))
        by_pkg: dict[str, list] = {}
        for r in results:
            by_pkg.setdefault(r.slice_ref[0], []).append(r)
        verdicts = [ev.aggregate(by_pkg.get(pid, []), cfg.tau, refs[pid], len(slices.get(pid, [])))
                    for pid in sorted(refs)]
        notes: list[str] = []
        sliced_notes: list[str] = []
        metrics = {
            "all": _labeled_metrics(verdicts, notes),
            "sliced_only": _labeled_metrics([v for v in verdicts if v.n_slices > 0], sliced_notes),
        }
        sfr_rows = [ev.sfr(file_sets[pid].files, slices.get(pid, []), catalog, refs[pid], s)
                    for pid in sorted(refs)]
        all_sfr.extend(sfr_rows)
        report["strategies"][s] = {
            "verdicts": [v.to_dict() for v in verdicts],
            "metrics": metrics,
            "notes": notes,
            "n_slices": sum(len(v) for v in slices.values()),
            "n_unscored": sum(isinstance(r, Unscored) for r in results),
            "n_without_slices": sum(v.n_slices == 0 for v in verdicts),
            "sfr": {"rows": [r.to_dict() for r in sfr_rows]},
        }
        all_slices[s] = [sl for pid in sorted(slices) for sl in slices[pid]]
    report["sfr_means"] = ev.sfr_means(all_sfr)
    report["context_stats"] = _context(cfg, all_slices, file_sets.values())
    ev.write_report(out, report)
    return report


def _context(cfg, all_slices, file_sets):
    stats = {m: {u: s.to_dict() for u, s in d.items()}
             for m, d in ev.context_stats(all_slices, cfg.token_mode, cfg.token_command).items()}
    stats["original"] = {u: s.to_dict() for u, s in
                         ev.file_context_stats(file_sets, cfg.token_mode, cfg.token_command).items()}
    return stats


def cmd_stats(cfg: RunConfig) -> dict:
    out = _out(cfg)
    rows = _ingest_rows(out)
    all_slices = {}
    for s in cfg.strategies:
        slices = _slice_lookup(out, s)
        all_slices[s] = [sl for pid in sorted(slices) for sl in slices[pid]]
    stats = _context(cfg, all_slices, [_file_set(out, r) for r in rows])
    _write(out / "context_stats.json", json.dumps(stats, indent=2) + "\n")
    return stats


def cmd_run(cfg: RunConfig) -> dict:
    cmd_ingest(cfg)
    cmd_slice(cfg)
    cmd_score(cfg)
    return cmd_evaluate(cfg)


COMMANDS = {"ingest": cmd_ingest, "slice": cmd_slice, "score": cmd_score, "evaluate": cmd_evaluate,
            "stats": cmd_stats, "run": cmd_run}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="npmslice", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="TOML or JSON file with RunConfig keys")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--manifest", help="CSV or JSONL corpus manifest")
        sp.add_argument("--strategies", help="comma list of static,taint,baseline")
        sp.add_argument("--budget", help="budget preset: " + ", ".join(BUDGET_PRESETS))
        sp.add_argument("--wall-clock", type=float, dest="wall_clock")
        sp.add_argument("--max-nodes", type=int, dest="max_nodes")
        sp.add_argument("--max-slices", type=int, dest="max_slices")
        sp.add_argument("--char-cap", type=int, dest="char_cap")
        sp.add_argument("--catalog", help="catalog TOML/JSON file")
        sp.add_argument("--scorer", choices=("stub", "remote"))
        sp.add_argument("--endpoint-url", dest="endpoint_url")
        sp.add_argument("--model")
        sp.add_argument("--replay", help="recorded response fixture for the remote scorer")
        sp.add_argument("--template", help="prompt template file")
        sp.add_argument("--tau", type=float)
        sp.add_argument("--token-mode", dest="token_mode", choices=("approx", "external"))
        sp.add_argument("--token-command", dest="token_command")
        sp.add_argument("--chunk-tokens", type=int, dest="chunk_tokens")
        sp.add_argument("--workers", type=int)
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Flags override the config file, which overrides the defaults."""
    values = {}
    if args.config:
        try:
            values.update(read_config_file(args.config))
        except OSError as exc:
            raise StageError(f"cannot read config: {exc}", EXIT_USAGE) from None
        except ValueError as exc:
            raise StageError(f"bad config: {exc}", EXIT_USAGE) from None
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if isinstance(values.get("strategies"), str):
        values["strategies"] = [s.strip() for s in values["strategies"].split(",") if s.strip()]
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        COMMANDS[args.command](cfg)
    except StageError as exc:
        print(f"npmslice {args.command}: {exc}", file=sys.stderr)
        if exc.code == EXIT_USAGE:
            parser.print_usage(sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
