"""Package discovery, safe extraction and corpus bookkeeping."""

from __future__ import annotations

import csv
import io
import json
import posixpath
import shutil
import tarfile
import tempfile
import warnings
import zlib
from dataclasses import dataclass, field
from pathlib import Path

JS_EXTENSIONS = (".js", ".mjs", ".cjs")
METADATA_NAMES = ("package.json",)
LABELS = ("benign", "malware", "unlabeled")
STATUSES = ("ok", "corrupt_archive", "no_javascript", "empty")
DEFAULT_SIZE_CAP = 20 * 1024 * 1024
ARCHIVE_SUFFIXES = (".tar.gz", ".tgz")

_LABEL_ALIASES = {"malicious": "malware", "": "unlabeled", "unknown": "unlabeled"}


class IngestError(Exception):
    pass


class CorruptArchive(IngestError):
    pass


class PathTraversal(IngestError):
    pass


class DuplicateId(IngestError):
    pass


class MissingPath(IngestError):
    pass


@dataclass(frozen=True)
class PackageRef:
    id: str
    origin_path: str
    declared_label: str = "unlabeled"

    def __post_init__(self):
        if not self.id:
            raise ValueError("package id must be non-empty")
        if self.declared_label not in LABELS:
            raise ValueError(f"unknown label {self.declared_label!r}")


@dataclass(frozen=True)
class SourceFile:
    path: str
    text: str
    line_count: int


@dataclass(frozen=True)
class SourceFileSet:
    package: PackageRef
    files: tuple[SourceFile, ...]
    status: str
    metadata: tuple[tuple[str, str], ...] = ()
    notes: tuple[str, ...] = ()

    def file(self, path: str) -> SourceFile:
        for f in self.files:
            if f.path == path:
                return f
        raise KeyError(path)


def count_lines(text: str) -> int:
    """Number of newline-delimited lines; a trailing newline does not open a new line."""
    if not text:
        return 0
    return text.count("\n") + (0 if text.endswith("\n") else 1)


def split_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if text.endswith("\n"):
        lines.pop()
    return lines if text else []


def decode_lossy(data: bytes) -> str:
    return data.decode("utf-8", errors="replace")


def is_archive(path: str | Path) -> bool:
    return str(path).lower().endswith(ARCHIVE_SUFFIXES)


def package_id_for(path: str | Path) -> str:
    name = Path(path).name
    low = name.lower()
    for suf in ARCHIVE_SUFFIXES:
        if low.endswith(suf):
            return name[: -len(suf)]
    return name


def _safe_member_name(name: str) -> str:
    norm = posixpath.normpath(name.replace("\\", "/"))
    if norm.startswith("/") or norm == ".." or norm.startswith("../") or ":" in norm.split("/")[0]:
        raise PathTraversal(name)
    return norm


def extract_archive(archive: str | Path, dest: str | Path) -> list[str]:
    """Extract regular files of a tar(.gz) archive under dest.

    Links, devices and members whose normalized path leaves dest raise
    PathTraversal for links that escape, and are skipped otherwise.
    Returns the extracted relative paths.
    """
    dest = Path(dest)
    extracted = []
    try:
        with tarfile.open(archive, "r:*") as tar:
            members = tar.getmembers()
            for m in members:
                rel = _safe_member_name(m.name)
                if m.issym() or m.islnk():
                    target = posixpath.normpath(posixpath.join(posixpath.dirname(rel), m.linkname))
                    if m.linkname.startswith("/") or target.startswith(".."):
                        raise PathTraversal(m.name)
                    continue
                if not m.isfile() or rel == ".":
                    continue
                out = dest / rel
                out.parent.mkdir(parents=True, exist_ok=True)
                src = tar.extractfile(m)
                if src is None:
                    continue
                with open(out, "wb") as fh:
                    shutil.copyfileobj(src, fh)
                extracted.append(rel)
    except PathTraversal:
        raise
    except (tarfile.TarError, EOFError, zlib.error, OSError) as exc:
        raise CorruptArchive(str(exc)) from exc
    return extracted


def _collect(root: Path, ref: PackageRef, size_cap: int, notes: list[str]) -> SourceFileSet:
    files = []
    metadata = []
    n_any = 0
    for p in sorted(root.rglob("*"), key=lambda q: q.relative_to(root).as_posix()):
        if not p.is_file() or p.is_symlink():
            continue
        n_any += 1
        rel = p.relative_to(root).as_posix()
        if p.name in METADATA_NAMES:
            metadata.append((rel, decode_lossy(p.read_bytes())))
            continue
        if not rel.lower().endswith(JS_EXTENSIONS):
            continue
        size = p.stat().st_size
        if size > size_cap:
            notes.append(f"skipped_large_file:{rel}:{size}")
            continue
        raw = p.read_bytes()
        text = decode_lossy(raw)
        if "�" in text and b"\xef\xbf\xbd" not in raw:
            notes.append(f"lossy_decode:{rel}")
        files.append(SourceFile(rel, text, count_lines(text)))
    if files:
        status = "ok"
    elif n_any == 0:
        status = "empty"
    else:
        status = "no_javascript"
    return SourceFileSet(ref, tuple(files), status, tuple(metadata), tuple(notes))


def open_package(
    path: str | Path,
    ref: PackageRef | None = None,
    work_dir: str | Path | None = None,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> SourceFileSet:
    """Open a package directory or archive as a SourceFileSet.

    Archives are unpacked into ``work_dir`` (or a temporary directory that
    is removed afterwards). Corrupt archives yield status ``corrupt_archive``;
    members escaping the extraction root raise PathTraversal.
    """
    path = Path(path)
    if ref is None:
        ref = PackageRef(package_id_for(path), str(path))
    if not path.exists():
        raise MissingPath(str(path))
    notes: list[str] = []
    if path.is_dir():
        return _collect(path, ref, size_cap, notes)
    if work_dir is None:
        with tempfile.TemporaryDirectory(prefix="npmslice-") as tmp:
            return _open_archive(path, ref, Path(tmp), size_cap, notes)
    work = Path(work_dir)
    if work.exists():
        shutil.rmtree(work)
    work.mkdir(parents=True)
    return _open_archive(path, ref, work, size_cap, notes)


def _open_archive(path, ref, dest, size_cap, notes):
    try:
        extract_archive(path, dest)
    except CorruptArchive as exc:
        notes.append(f"corrupt_archive:{exc}".rstrip(":"))
        return SourceFileSet(ref, (), "corrupt_archive", (), tuple(notes))
    return _collect(dest, ref, size_cap, notes)


def ingest_package(ref: PackageRef, base_dir: str | Path | None = None, work_dir=None,
                   size_cap: int = DEFAULT_SIZE_CAP) -> SourceFileSet:
    """Like open_package but never raises for per-package problems."""
    origin = Path(ref.origin_path)
    if base_dir is not None and not origin.is_absolute():
        origin = Path(base_dir) / origin
    try:
        return open_package(origin, ref, work_dir=work_dir, size_cap=size_cap)
    except PathTraversal as exc:
        return SourceFileSet(ref, (), "corrupt_archive", (), (f"path_traversal:{exc}",))
    except MissingPath:
        return SourceFileSet(ref, (), "empty", (), ("missing_path",))


def _normalize_label(raw) -> str:
    label = str(raw if raw is not None else "").strip().lower()
    label = _LABEL_ALIASES.get(label, label)
    if label not in LABELS:
        raise ValueError(f"unknown label {raw!r}")
    return label


def load_corpus(manifest: str | Path, check_paths: bool = True) -> list[PackageRef]:
    """Read a CSV (path,label[,id]) or JSONL manifest into PackageRefs."""
    manifest = Path(manifest)
    text = manifest.read_text(encoding="utf-8")
    rows = []
    if manifest.suffix.lower() in (".jsonl", ".ndjson", ".json"):
        for line in text.splitlines():
            if line.strip():
                rows.append(json.loads(line))
    else:
        reader = csv.DictReader(io.StringIO(text))
        rows = [r for r in reader if any((v or "").strip() for v in r.values())]
    if not rows:
        warnings.warn(f"manifest {manifest} lists no packages", stacklevel=2)
        return []
    base = manifest.parent
    refs = []
    seen = set()
    for row in rows:
        p = str(row.get("path") or "").strip()
        if not p:
            raise MissingPath(f"row without path in {manifest}")
        full = Path(p) if Path(p).is_absolute() else base / p
        if check_paths and not full.exists():
            raise MissingPath(p)
        pid = str(row.get("id") or "").strip() or package_id_for(p.rstrip("/"))
        if pid in seen:
            raise DuplicateId(pid)
        seen.add(pid)
        refs.append(PackageRef(pid, p, _normalize_label(row.get("label"))))
    return refs


def corpus_summary(results) -> dict[str, dict[str, int]]:
    """Tally SourceFileSets by (declared label, status); zero cells included."""
    tally = {label: {s: 0 for s in STATUSES} for label in LABELS}
    for r in results:
        tally[r.package.declared_label][r.status] += 1
    return tally


@dataclass
class ExtractionRecord:
    id: str
    origin_path: str
    label: str
    status: str
    files: list = field(default_factory=list)
    metadata: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @classmethod
    def from_set(cls, fs: SourceFileSet) -> "ExtractionRecord":
        return cls(
            fs.package.id,
            fs.package.origin_path,
            fs.package.declared_label,
            fs.status,
            [{"path": f.path, "lines": f.line_count} for f in fs.files],
            [p for p, _ in fs.metadata],
            list(fs.notes),
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "origin_path": self.origin_path,
                "label": self.label,
                "status": self.status,
                "n_files": len(self.files),
                "n_lines": sum(f["lines"] for f in self.files),
                "files": self.files,
                "metadata": self.metadata,
                "notes": self.notes,
            },
            sort_keys=False,
        )


def load_file_set(ref: PackageRef, root: str | Path, status: str = "ok",
                  size_cap: int = DEFAULT_SIZE_CAP) -> SourceFileSet:
    """Re-read an already extracted package tree, keeping the recorded status."""
    root = Path(root)
    if status != "ok" or not root.is_dir():
        return SourceFileSet(ref, (), status)
    fs = _collect(root, ref, size_cap, [])
    return SourceFileSet(ref, fs.files, fs.status, fs.metadata, fs.notes)
