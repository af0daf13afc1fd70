"""Sensitive API catalog: sources, sinks and dual APIs grouped by behavior."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

ROLES = ("source", "sink", "dual")
DIRECTIONS = ("as_source", "as_sink")
GROUPS = (
    "information_gathering",
    "file_operations",
    "network_communication",
    "system_execution",
    "code_obfuscation",
    "environment_cleanup",
    "parallel_processing",
)
BUILTIN_VERSION = "builtin-1"

_NAME = re.compile(r"^[A-Za-z_$][\w$]*$")
_PATH = re.compile(r"^[A-Za-z_$][\w$]*(\.[A-Za-z_$][\w$]*)+$")


class CatalogError(Exception):
    pass


class BadPattern(CatalogError):
    pass


class BadRole(CatalogError):
    pass


class BadGroup(CatalogError):
    pass


class CatalogEmpty(CatalogError):
    pass


@dataclass(frozen=True)
class ApiPattern:
    name_pattern: str
    role: str
    group: str
    dual_direction: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise BadRole(f"role {self.role!r} for pattern {self.name_pattern!r}")
        if self.group not in GROUPS:
            raise BadGroup(f"group {self.group!r} for pattern {self.name_pattern!r}")
        if (self.role == "dual") != (self.dual_direction is not None):
            raise BadRole(f"dual_direction must be set iff role is dual ({self.name_pattern!r})")
        if self.dual_direction is not None and self.dual_direction not in DIRECTIONS:
            raise BadRole(f"dual_direction {self.dual_direction!r}")
        try:
            re.compile(self.name_pattern)
        except re.error as exc:
            raise BadPattern(f"pattern {self.name_pattern!r}: {exc}") from exc

    @property
    def acts_as_source(self) -> bool:
        return self.role == "source" or self.dual_direction == "as_source"

    @property
    def acts_as_sink(self) -> bool:
        return self.role == "sink" or self.dual_direction == "as_sink"

    @cached_property
    def regex(self) -> re.Pattern:
        return re.compile(r"\b(?:" + self.name_pattern + r")\b")

    @cached_property
    def target(self) -> str:
        """What the pattern is matched against: a bare name, a dotted path or string literals."""
        plain = re.sub(r"\\(.)", r"\1", self.name_pattern)
        if _NAME.match(plain):
            return "name"
        if _PATH.match(plain):
            return "path"
        return "literal"

    def matches_node(self, node) -> bool:
        if node.kind == "call":
            if self.target == "name":
                return bool(node.callee_name) and self.regex.search(node.callee_name) is not None
            if self.target == "path":
                return bool(node.callee_path) and self.regex.search(node.callee_path) is not None
            return any(self.regex.search(s) for s in node.string_args)
        if node.kind == "member_access" and self.target == "path":
            return self.regex.search(node.property_path) is not None
        return False

    def to_row(self) -> dict:
        row = {"pattern": self.name_pattern, "role": self.role, "group": self.group}
        if self.dual_direction is not None:
            row["dual_direction"] = self.dual_direction
        return row


@dataclass(frozen=True)
class ApiCatalog:
    patterns: tuple[ApiPattern, ...]
    version: str = BUILTIN_VERSION

    def __post_init__(self):
        if not self.patterns:
            raise CatalogEmpty("catalog has no patterns")
        if len(set(self.patterns)) != len(self.patterns):
            raise BadPattern("catalog contains duplicate patterns")
        if not any(p.acts_as_source for p in self.patterns):
            raise CatalogEmpty("catalog has no source-capable pattern")
        if not any(p.acts_as_sink for p in self.patterns):
            raise CatalogEmpty("catalog has no sink-capable pattern")

    def sources(self, group: str | None = None) -> list[ApiPattern]:
        return [p for p in self.patterns if p.acts_as_source and group in (None, p.group)]

    def sinks(self, group: str | None = None) -> list[ApiPattern]:
        return [p for p in self.patterns if p.acts_as_sink and group in (None, p.group)]

    @property
    def source_groups(self) -> list[str]:
        present = {p.group for p in self.patterns if p.acts_as_source}
        return [g for g in GROUPS if g in present]

    @property
    def sink_groups(self) -> list[str]:
        present = {p.group for p in self.patterns if p.acts_as_sink}
        return [g for g in GROUPS if g in present]

    def lookup(self, name: str) -> list[ApiPattern]:
        """Patterns matching a callee name (``exec``) or dotted path (``process.env``)."""
        out = []
        for p in self.patterns:
            if p.target == "name" and "." not in name and p.regex.fullmatch(name):
                out.append(p)
            elif p.target == "name" and "." in name and p.regex.fullmatch(name.rsplit(".", 1)[1]):
                out.append(p)
            elif p.target == "path" and p.regex.search(name):
                out.append(p)
            elif p.target == "literal" and p.regex.search(name):
                out.append(p)
        return out

    @cached_property
    def _memo(self) -> dict:
        return {}

    def roles_of(self, node) -> frozenset:
        """Set of (direction, group) pairs a call/member node matches."""
        if node.kind not in ("call", "member_access"):
            return frozenset()
        key = (node.kind, node.callee_name, node.property_path, node.string_args)
        hit = self._memo.get(key)
        if hit is None:
            found = set()
            for p in self.patterns:
                if p.matches_node(node):
                    if p.acts_as_source:
                        found.add(("source", p.group))
                    if p.acts_as_sink:
                        found.add(("sink", p.group))
            hit = self._memo[key] = frozenset(found)
        return hit

    @cached_property
    def line_regex(self) -> re.Pattern:
        alts = "|".join(f"(?:{p.name_pattern})" for p in dict.fromkeys(self.patterns))
        return re.compile(r"\b(?:" + alts + r")\b")

    def line_matches(self, text: str) -> bool:
        """True if the text mentions any catalog API (used for feature lines)."""
        return self.line_regex.search(text) is not None

    def to_dict(self) -> dict:
        return {"version": self.version, "mode": "replace",
                "patterns": [p.to_row() for p in self.patterns]}


# Source table (methods & properties), by category.
_SOURCES = {
    "file_operations": """readFile readFileSync read readSync readv createReadStream open openSync
        opendir readdir readlink realpath access exists stat fstat lstat Dir Dirent ReadStream
        FileReadStream""",
    "information_gathering": """userInfo networkInterfaces cpus homedir platform hostname arch
        release version tmpdir totalmem uptime getuid getgid getgroups cpuUsage memoryUsage
        process.env process.argv process.version process.pid process.platform process.arch lookup
        resolve getServers Resolver""",
    "network_communication": """createServer createSecureServer createConnection connect
        createSocket get request fetch Server IncomingMessage ServerResponse Socket Stream
        TLSSocket WebSocket _connectionListener send""",
}

# Sink table, by category (file modification and command execution mapped onto groups).
_SINKS = {
    "file_operations": """writeFile writeFileSync appendFile createWriteStream write writeSync save
        copyFile cp rename chmod chown utimes mkdir mkdtemp symlink link fsync close WriteStream""",
    "system_execution": """exec execSync spawn spawnSync fork execFile _forkChild ChildProcess
        dlopen binding eval Function setTimeout setInterval Invoke-Expression Start-Process
        ShellExecute run""",
    "network_communication": """request get post put delete patch fetch curl connect
        createConnection send emit ClientRequest Agent Socket query execute insert save""",
    "code_obfuscation": """createCipheriv createCipher publicEncrypt sign createHmac createHash
        pbkdf2 scrypt deflate gzip brotliCompress btoa atob stringify escape""",
    "environment_cleanup": """unlink rm rmdir truncate exit kill abort umask setuid setgid chdir
        _debugProcess unwatchFile nextTick""",
}

# Groups whose APIs act in both directions.
_DUAL_GROUPS = ("file_operations", "network_communication")

# Categorization table examples, as (name, role, group, direction).
_EXAMPLES = [
    ("process.env", "source", "information_gathering", None),
    ("os.userInfo", "source", "information_gathering", None),
    ("child_process.exec", "sink", "system_execution", None),
    ("spawn", "sink", "system_execution", None),
    ("eval", "sink", "system_execution", None),
    ("Buffer.from", "sink", "code_obfuscation", None),
    ("JSON.stringify", "sink", "code_obfuscation", None),
    ("fs.unlink", "sink", "environment_cleanup", None),
    ("process.kill", "sink", "environment_cleanup", None),
    ("cluster.fork", "sink", "parallel_processing", None),
    ("fs.readFileSync", "dual", "file_operations", "as_source"),
    ("fs.writeFileSync", "dual", "file_operations", "as_sink"),
    ("socket.on", "dual", "network_communication", "as_source"),
    ("createServer", "dual", "network_communication", "as_source"),
    ("http.post", "dual", "network_communication", "as_sink"),
]


def _builtin_patterns() -> list[ApiPattern]:
    out: list[ApiPattern] = []
    seen = set()

    def add(name, role, group, direction):
        p = ApiPattern(re.escape(name), role, group, direction)
        if p not in seen:
            seen.add(p)
            out.append(p)

    for group, names in _SOURCES.items():
        dual = group in _DUAL_GROUPS
        for name in names.split():
            add(name, "dual" if dual else "source", group, "as_source" if dual else None)
    for group, names in _SINKS.items():
        dual = group in _DUAL_GROUPS
        for name in names.split():
            add(name, "dual" if dual else "sink", group, "as_sink" if dual else None)
    for name, role, group, direction in _EXAMPLES:
        add(name, role, group, direction)
    return out


def builtin_catalog() -> ApiCatalog:
    return ApiCatalog(tuple(_builtin_patterns()), BUILTIN_VERSION)


def _rows_to_patterns(rows) -> list[ApiPattern]:
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise BadPattern(f"row {i}: expected a table/object")
        pat = row.get("pattern", row.get("name_pattern"))
        if not isinstance(pat, str) or not pat:
            raise BadPattern(f"row {i}: missing pattern")
        try:
            re.compile(pat)
        except re.error as exc:
            raise BadPattern(f"row {i} ({pat!r}): {exc}") from exc
        role = row.get("role")
        if role not in ROLES:
            raise BadRole(f"row {i} ({pat!r}): role {role!r}")
        group = row.get("group")
        if group not in GROUPS:
            raise BadGroup(f"row {i} ({pat!r}): group {group!r}")
        direction = row.get("dual_direction")
        if role == "dual" and direction is None:
            out.append(ApiPattern(pat, role, group, "as_source"))
            out.append(ApiPattern(pat, role, group, "as_sink"))
        else:
            try:
                out.append(ApiPattern(pat, role, group, direction))
            except CatalogError as exc:
                raise type(exc)(f"row {i}: {exc}") from exc
    return out


def parse_catalog(data: dict, base: ApiCatalog | None = None) -> ApiCatalog:
    mode = data.get("mode", "replace")
    if mode not in ("replace", "extend"):
        raise CatalogError(f"mode must be 'replace' or 'extend', got {mode!r}")
    rows = data.get("patterns", [])
    new = _rows_to_patterns(rows)
    if mode == "extend":
        base = base or builtin_catalog()
        merged = list(base.patterns)
        have = set(merged)
        for p in new:
            if p not in have:
                have.add(p)
                merged.append(p)
        version = data.get("version", base.version + "+ext")
        return ApiCatalog(tuple(merged), version)
    if not new:
        raise CatalogEmpty("replace-mode catalog lists no patterns")
    dedup = list(dict.fromkeys(new))
    return ApiCatalog(tuple(dedup), data.get("version", "custom"))


def load_catalog(path: str | Path, base: ApiCatalog | None = None) -> ApiCatalog:
    """Load a TOML or JSON catalog file that replaces or extends the builtin one."""
    path = Path(path)
    raw = path.read_bytes()
    if not raw.strip():
        data = {}
    elif path.suffix.lower() == ".toml":
        data = tomllib.loads(raw.decode("utf-8"))
    else:
        data = json.loads(raw.decode("utf-8"))
    if "mode" not in data:
        data = dict(data, mode="replace")
    return parse_catalog(data, base)


def catalog_to_json(cat: ApiCatalog) -> str:
    return json.dumps(cat.to_dict(), indent=1) + "\n"


def catalog_to_toml(cat: ApiCatalog) -> str:
    lines = [f"version = {json.dumps(cat.version)}", 'mode = "replace"', ""]
    for p in cat.patterns:
        lines.append("[[patterns]]")
        for k, v in p.to_row().items():
            if "'" in v or "\n" in v:
                lines.append(f"{k} = {json.dumps(v)}")
            else:
                # literal strings keep regex backslashes as-is
                lines.append(f"{k} = '{v}'")
        lines.append("")
    return "\n".join(lines)


def _sorted_unique(nodes):
    return sorted({n.id: n for n in nodes}.values(), key=lambda n: (n.file, n.line, n.column, n.id))


def query_nodes(cpg, catalog: ApiCatalog, group: str, as_source: bool) -> list:
    want = ("source" if as_source else "sink", group)
    hits = [n for n in cpg.nodes if want in catalog.roles_of(n)]
    return _sorted_unique(hits)


def query_sources(cpg, catalog: ApiCatalog, group: str) -> list:
    """Call/member nodes matching a source-capable pattern of the group."""
    if group not in GROUPS:
        raise BadGroup(group)
    return query_nodes(cpg, catalog, group, True)


def query_sinks(cpg, catalog: ApiCatalog, group: str) -> list:
    """Call/member nodes matching a sink-capable pattern of the group."""
    if group not in GROUPS:
        raise BadGroup(group)
    return query_nodes(cpg, catalog, group, False)
