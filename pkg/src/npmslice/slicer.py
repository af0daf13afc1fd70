"""Sensitive code slices: static backward slicing, taint slicing with
heuristic backtracking, and the fixed-size chunking baseline."""

from __future__ import annotations

import bisect
import json
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .catalog import ApiCatalog, query_sinks, query_sources
from .cpg import Cpg, CpgNode
from .ingest import SourceFileSet
from .tokens import split_chunks, token_spans

STRATEGIES = ("static", "taint_flow", "taint_fallback", "baseline_chunk")
DEFAULT_CHAR_CAP = 8000
FLOW_PATHS_PER_PAIR = 64


class LineOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class SliceBudget:
    wall_clock_per_package: float = 3.0
    max_nodes_per_slice: int = 50_000
    max_slices_per_package: int = 5_000
    char_cap: int = DEFAULT_CHAR_CAP

    def __post_init__(self):
        for name in ("wall_clock_per_package", "max_nodes_per_slice",
                     "max_slices_per_package", "char_cap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def preset(cls, name: str) -> "SliceBudget":
        try:
            return BUDGET_PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown budget preset {name!r}") from None


BUDGET_PRESETS = {
    "fast": SliceBudget(3.0, 50_000, 5_000),
    "paper-fallback": SliceBudget(180.0, 500_000, 50_000),
}


class _Clock:
    """Wall-clock deadline shared by one strategy run."""

    def __init__(self, seconds: float):
        self.deadline = time.monotonic() + seconds
        self.tripped = False

    def expired(self) -> bool:
        if not self.tripped and time.monotonic() > self.deadline:
            self.tripped = True
        return self.tripped


@dataclass(frozen=True)
class Anchor:
    file: str
    line: int
    callee: str
    column: int = 1

    def to_list(self) -> list:
        return [self.file, self.line, self.callee]


@dataclass(frozen=True)
class Slice:
    package: str
    strategy: str
    node_ids: tuple[int, ...]
    lines: tuple[tuple[str, tuple[int, ...]], ...]
    snippet: str
    source_anchor: Anchor | None = None
    sink_anchor: Anchor | None = None
    budget_exhausted: bool = False
    truncated: bool = False
    token_span: tuple[int, int] | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")

    @property
    def line_set(self) -> frozenset[tuple[str, int]]:
        return frozenset((f, ln) for f, ls in self.lines for ln in ls)

    @property
    def loc(self) -> int:
        return sum(len(ls) for _, ls in self.lines)

    def to_dict(self) -> dict:
        return {
            "package": self.package,
            "strategy": self.strategy,
            "node_ids": list(self.node_ids),
            "lines": [[f, list(ls)] for f, ls in self.lines],
            "snippet": self.snippet,
            "source_anchor": self.source_anchor.to_list() if self.source_anchor else None,
            "sink_anchor": self.sink_anchor.to_list() if self.sink_anchor else None,
            "budget_exhausted": self.budget_exhausted,
            "truncated": self.truncated,
            "token_span": list(self.token_span) if self.token_span else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Slice":
        def anchor(a):
            return Anchor(a[0], int(a[1]), a[2]) if a else None

        return cls(
            d["package"],
            d["strategy"],
            tuple(d["node_ids"]),
            tuple((f, tuple(ls)) for f, ls in d["lines"]),
            d["snippet"],
            anchor(d.get("source_anchor")),
            anchor(d.get("sink_anchor")),
            bool(d.get("budget_exhausted", False)),
            bool(d.get("truncated", False)),
            tuple(d["token_span"]) if d.get("token_span") else None,
        )


class SliceRun(list):
    """List of slices plus whether the run hit its budget."""

    def __init__(self, items: Iterable[Slice] = (), budget_exhausted: bool = False):
        super().__init__(items)
        self.budget_exhausted = budget_exhausted


class FlowPaths(NamedTuple):
    paths: list
    truncated: bool
    budget_hit: bool


class BackwardSlice(NamedTuple):
    nodes: list
    source: CpgNode | None
    exhausted: bool


def _node_key(n: CpgNode):
    return (n.file, n.line, n.column, n.id)


def _anchor(n: CpgNode) -> Anchor:
    callee = n.callee_name or n.property_path or n.code.strip()
    return Anchor(n.file, n.line, callee, n.column)


def _package_id(cpg: Cpg) -> str:
    return cpg.package.id if cpg.package is not None else ""


def filter_clean(nodes: Iterable[CpgNode]) -> list[CpgNode]:
    """Keep real statements, one per (file, line), in source order."""
    keep: dict[tuple[str, int], CpgNode] = {}
    for n in sorted(nodes, key=_node_key):
        if n.synthetic or not n.is_statement:
            continue
        if n.kind == "other" and not n.code.strip():
            continue
        keep.setdefault((n.file, n.line), n)
    return list(keep.values())


def backward_slice(sink: CpgNode, source_ids: set[int], cpg: Cpg,
                   budget: SliceBudget | None = None, clock: _Clock | None = None) -> BackwardSlice:
    """Breadth-first walk over reverse CFG edges from the sink's statement.

    The visited statements are returned (cleaned) only if one of them owns a
    source node; the first such source in visiting order becomes the anchor.
    """
    budget = budget or SliceBudget()
    start = cpg.statement_of(sink.id)
    seen = {start.id}
    queue = deque([start.id])
    order = []
    source = None
    while queue:
        if len(seen) > budget.max_nodes_per_slice or (clock is not None and clock.expired()):
            return BackwardSlice([], None, True)
        nid = queue.popleft()
        order.append(nid)
        if source is None:
            hits = [i for i in cpg.owned(nid) if i in source_ids]
            if hits:
                source = min((cpg.nodes[i] for i in hits), key=_node_key)
        for p in sorted(cpg.pred(nid, "CFG")):
            if p not in seen:
                seen.add(p)
                queue.append(p)
    if source is None:
        return BackwardSlice([], None, False)
    return BackwardSlice(filter_clean(cpg.nodes[i] for i in order), source, False)


def _window(line: str, column: int | None, cap: int) -> tuple[str, bool]:
    if len(line) <= cap:
        return line, False
    centre = (column - 1) if column else 0
    start = max(0, min(centre - cap // 2, len(line) - cap))
    return line[start:start + cap], True


def _render(cpg: Cpg, lines, focus: dict[tuple[str, int], int], cap: int | None) -> tuple[str, bool]:
    """Join verbatim lines in (file, line) order with file markers for multi-file slices."""
    out = []
    truncated = False
    multi = len(lines) > 1
    for f, ls in lines:
        if multi:
            out.append(f"// --- {f} ---")
        src = cpg.lines(f)
        for ln in ls:
            text = src[ln - 1]
            if cap is not None:
                text, cut = _window(text, focus.get((f, ln)), cap)
                truncated |= cut
            out.append(text)
    return "\n".join(out), truncated


def _group_lines(pairs: Iterable[tuple[str, int]]) -> tuple[tuple[str, tuple[int, ...]], ...]:
    by_file: dict[str, set[int]] = {}
    for f, ln in pairs:
        by_file.setdefault(f, set()).add(ln)
    return tuple((f, tuple(sorted(by_file[f]))) for f in sorted(by_file))


def reconstruct(slice_: Slice, cpg: Cpg, char_cap: int | None = None) -> str:
    """Ordered source text for a slice's lines."""
    if not slice_.lines:
        raise ValueError("slice has no lines")
    lines = _group_lines((f, ln) for f, ls in slice_.lines for ln in ls)
    focus = {}
    if slice_.sink_anchor is not None:
        a = slice_.sink_anchor
        focus[(a.file, a.line)] = a.column
    return _render(cpg, lines, focus, char_cap)[0]


def _make_slice(cpg, strategy, node_ids, pairs, source, sink, cap, exhausted=False) -> Slice:
    lines = _group_lines(pairs)
    focus = {}
    if source is not None:
        focus[(source.file, source.line)] = source.column
    if sink is not None:
        focus[(sink.file, sink.line)] = sink.column
    snippet, truncated = _render(cpg, lines, focus, cap)
    return Slice(
        _package_id(cpg), strategy, tuple(node_ids), lines, snippet,
        _anchor(source) if source is not None else None,
        _anchor(sink) if sink is not None else None,
        exhausted, truncated,
    )


def _flag_all(slices: list[Slice]) -> list[Slice]:
    return [Slice(**{**s.__dict__, "budget_exhausted": True}) for s in slices]


def _all_source_ids(cpg: Cpg, catalog: ApiCatalog) -> set[int]:
    ids: set[int] = set()
    for g in catalog.source_groups:
        ids.update(n.id for n in query_sources(cpg, catalog, g))
    return ids


def static_slice(cpg: Cpg, catalog: ApiCatalog, budget: SliceBudget | None = None) -> SliceRun:
    """Backward CFG slices from every sink that can be reached from some source."""
    budget = budget or SliceBudget()
    clock = _Clock(budget.wall_clock_per_package)
    source_ids = _all_source_ids(cpg, catalog)
    exhausted = False
    found = []
    for group in catalog.sink_groups:
        for sink in query_sinks(cpg, catalog, group):
            if clock.expired():
                exhausted = True
                break
            res = backward_slice(sink, source_ids, cpg, budget, clock)
            exhausted |= res.exhausted
            if res.nodes:
                found.append((sink, res))
    found.sort(key=lambda t: _node_key(t[0]))
    out = []
    seen = set()
    for sink, res in found:
        pairs = [(n.file, n.line) for n in res.nodes]
        key = frozenset(pairs)
        if key in seen:
            continue
        seen.add(key)
        if len(out) >= budget.max_slices_per_package:
            exhausted = True
            break
        out.append(_make_slice(cpg, "static", [n.id for n in res.nodes], pairs,
                               res.source, sink, budget.char_cap))
    return SliceRun(_flag_all(out) if exhausted else out, exhausted)


def _can_reach(cpg: Cpg, targets: set[int]) -> set[int]:
    seen = set(targets)
    stack = list(targets)
    while stack:
        for p in cpg.pred(stack.pop(), "DFG"):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def reachable_by_flows(sinks, sources, cpg: Cpg, budget: SliceBudget | None = None,
                       max_paths: int = FLOW_PATHS_PER_PAIR,
                       clock: _Clock | None = None) -> "FlowPaths":
    """Simple DFG paths (two or more nodes) from a source to a sink.

    Paths are grown breadth-first so shorter ones are found first. Returns
    the paths sorted by (sink line, source line, length). ``truncated`` is
    set when enumeration stopped early; ``budget_hit`` when that was due to
    the node cap or the clock rather than the per-call path cap.
    """
    budget = budget or SliceBudget()
    sink_ids = {n.id for n in sinks}
    live = _can_reach(cpg, sink_ids)
    queue = deque((n.id,) for n in sorted(sources, key=_node_key) if n.id in live)
    found: list[tuple[int, ...]] = []
    expansions = 0
    truncated = budget_hit = False
    while queue and not truncated:
        path = queue.popleft()
        for nxt in sorted(cpg.succ(path[-1], "DFG")):
            if nxt not in live or nxt in path:
                continue
            expansions += 1
            if expansions > budget.max_nodes_per_slice or (
                clock is not None and expansions % 256 == 0 and clock.expired()
            ):
                truncated = budget_hit = True
                break
            grown = path + (nxt,)
            if nxt in sink_ids:
                found.append(grown)
                if len(found) >= max_paths:
                    truncated = True
                    break
            queue.append(grown)
    if clock is not None and clock.expired():
        truncated = budget_hit = True
    nodes = cpg.nodes

    def key(p):
        s, t = nodes[p[0]], nodes[p[-1]]
        return (t.line, s.line, len(p), t.file, s.file, p)

    return FlowPaths(sorted(found, key=key), truncated, budget_hit)


def find_enclosing_source(node: CpgNode, sources, cpg: Cpg) -> CpgNode | None:
    """Nearest call on the AST parent chain (the node itself included) that is a source."""
    ids = {n.id for n in sources}
    current: int | None = node.id
    while current is not None:
        n = cpg.nodes[current]
        if n.kind == "call" and n.id in ids:
            return n
        parents = cpg.ast_parents(current)
        current = parents[0] if parents else None
    return None


def build_snippet(cpg: Cpg, from_line: int, to_line: int, file: str,
                  char_cap: int | None = None, focus: dict | None = None):
    """Inclusive line range of a file as (lines, snippet, truncated)."""
    if from_line > to_line:
        from_line, to_line = to_line, from_line
    n = len(cpg.lines(file))
    if from_line < 1 or to_line > n:
        raise LineOutOfRange(f"{file}:{from_line}-{to_line} outside 1-{n}")
    lines = ((file, tuple(range(from_line, to_line + 1))),)
    snippet, truncated = _render(cpg, lines, focus or {}, char_cap)
    return lines, snippet, truncated


def taint_slice(cpg: Cpg, catalog: ApiCatalog, budget: SliceBudget | None = None) -> SliceRun:
    """Data-flow slices per (source group, sink group), with the nesting fallback."""
    budget = budget or SliceBudget()
    clock = _Clock(budget.wall_clock_per_package)
    nodes = cpg.nodes
    exhausted = False
    results: list[tuple[tuple, Slice]] = []
    for sg in catalog.source_groups:
        sources = query_sources(cpg, catalog, sg)
        if not sources:
            continue
        for kg in catalog.sink_groups:
            if clock.expired():
                exhausted = True
                break
            sinks = query_sinks(cpg, catalog, kg)
            if not sinks:
                continue
            flows, _, budget_hit = reachable_by_flows(sinks, sources, cpg, budget, clock=clock)
            exhausted |= budget_hit
            if flows:
                for path in flows:
                    src, snk = nodes[path[0]], nodes[path[-1]]
                    sl = _make_slice(cpg, "taint_flow", path, [(nodes[i].file, nodes[i].line) for i in path],
                                     src, snk, budget.char_cap)
                    results.append(((snk.file, snk.line, src.file, src.line, len(path), path), sl))
                continue
            processed = set()
            for sink in sinks:
                src = find_enclosing_source(sink, sources, cpg)
                if src is None:
                    continue
                pair = (src.id, sink.line)
                if pair in processed:
                    continue
                processed.add(pair)
                end = max(sink.end_line, sink.line)
                focus = {(sink.file, sink.line): sink.column}
                lines, snippet, truncated = build_snippet(
                    cpg, src.line, end, sink.file, budget.char_cap, focus)
                ids = (src.id,) if src.id == sink.id else (src.id, sink.id)
                sl = Slice(_package_id(cpg), "taint_fallback", ids, lines, snippet,
                           _anchor(src), _anchor(sink), False, truncated)
                results.append(((sink.file, sink.line, src.file, src.line, len(ids), ids), sl))
        if exhausted:
            break
    results.sort(key=lambda t: (t[0], t[1].strategy))
    out = []
    seen = set()
    for _, sl in results:
        key = (sl.strategy, sl.node_ids, sl.lines)
        if key in seen:
            continue
        seen.add(key)
        if len(out) >= budget.max_slices_per_package:
            exhausted = True
            break
        out.append(sl)
    return SliceRun(_flag_all(out) if exhausted else out, exhausted)


def baseline_chunks(file_set: SourceFileSet, chunk_limit_tokens: int = 500) -> list[Slice]:
    """Split every file into consecutive chunks of at most ``chunk_limit_tokens`` tokens.

    A chunk's snippet is the exact text between its first and last token;
    its lines are the lines those tokens sit on.
    """
    out = []
    for f in file_set.files:
        spans = token_spans(f.text)
        if not spans:
            continue
        starts = _line_starts(f.text)
        for a, b in split_chunks(len(spans), chunk_limit_tokens):
            lo, hi = spans[a][0], spans[b - 1][1]
            touched = sorted({_line_of(starts, spans[i][0]) for i in range(a, b)})
            out.append(Slice(
                file_set.package.id, "baseline_chunk", (),
                ((f.path, tuple(touched)),), f.text[lo:hi], token_span=(a, b),
            ))
    return out


def _line_starts(text: str) -> list[int]:
    starts = [0]
    i = text.find("\n")
    while i >= 0:
        starts.append(i + 1)
        i = text.find("\n", i + 1)
    return starts


def _line_of(starts: list[int], offset: int) -> int:
    return bisect.bisect_right(starts, offset)


STRATEGY_FILES = {"static": ("static",), "taint": ("taint_flow", "taint_fallback"),
                  "baseline": ("baseline_chunk",)}


@dataclass
class PackageSlices:
    package: str
    slices: dict = field(default_factory=dict)
    exhausted: dict = field(default_factory=dict)
    diagnostics: int = 0
    error: str | None = None


def slice_package(file_set: SourceFileSet, catalog: ApiCatalog, strategies=("static", "taint"),
                  budget: SliceBudget | None = None, chunk_limit_tokens: int = 500) -> PackageSlices:
    """Run the requested strategies on one package; never raises for bad input."""
    from .cpg import assemble_cpg

    budget = budget or SliceBudget()
    res = PackageSlices(file_set.package.id)
    try:
        cpg = assemble_cpg(file_set.files, file_set.package) if (
            {"static", "taint"} & set(strategies)) else None
        if cpg is not None:
            res.diagnostics = len(cpg.diagnostics)
        for s in strategies:
            if s == "static":
                run = static_slice(cpg, catalog, budget)
            elif s == "taint":
                run = taint_slice(cpg, catalog, budget)
            elif s == "baseline":
                run = SliceRun(baseline_chunks(file_set, chunk_limit_tokens))
            else:
                raise ValueError(f"unknown strategy {s!r}")
            res.slices[s] = list(run)
            res.exhausted[s] = run.budget_exhausted
    except (RecursionError, MemoryError, ValueError) as exc:
        res.error = f"{type(exc).__name__}: {exc}"
    return res


def slices_to_jsonl(slices: Iterable[Slice]) -> str:
    return "".join(s.to_json() + "\n" for s in slices)


def read_slices(path) -> list[Slice]:
    from pathlib import Path

    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(Slice.from_dict(json.loads(line)))
    return out


__all__ = [
    "Anchor", "BackwardSlice", "BUDGET_PRESETS", "LineOutOfRange", "PackageSlices", "Slice",
    "SliceBudget", "SliceRun", "backward_slice", "baseline_chunks", "build_snippet",
    "filter_clean", "find_enclosing_source", "reachable_by_flows", "read_slices",
    "reconstruct", "slice_package", "slices_to_jsonl", "static_slice",
    "taint_slice",
]
