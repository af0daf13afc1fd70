"""Code property graph for a JavaScript subset.

Each file is parsed with tree-sitter and lowered to statement-level nodes
plus the call, member-access and function nodes nested inside them. Three
edge layers are derived:

* AST: parent links between graph nodes (a forest rooted at one synthetic
  node per file).
* CFG: statement-level control flow within each function body, plus an
  edge from a call statement to the first statement of any function passed
  to it as an argument (or invoked immediately).
* DFG: reaching-definition edges from defining statements to the innermost
  node that reads the variable, value edges from nested calls/member reads
  to their enclosing node, closure edges into function bodies, and edges
  from a module's export statements to the require/import that binds it.
"""

from __future__ import annotations

import json
import posixpath
import re
import sys
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import tree_sitter_javascript as _tsjs
from tree_sitter import Language, Parser

from .ingest import PackageRef, SourceFile, split_lines

LAYERS = ("AST", "CFG", "DFG")
KINDS = (
    "call",
    "identifier",
    "literal",
    "assignment",
    "declaration",
    "control",
    "function_def",
    "return",
    "member_access",
    "other",
)

MAX_NESTING = 400

CALL_TYPES = frozenset({"call_expression", "new_expression"})
MEMBER_TYPES = frozenset({"member_expression", "subscript_expression"})
FUNC_TYPES = frozenset(
    {"function_expression", "function", "arrow_function", "generator_function", "method_definition"}
)
ASSIGN_TYPES = frozenset({"assignment_expression", "augmented_assignment_expression"})
LITERAL_TYPES = frozenset(
    {"string", "number", "template_string", "true", "false", "null", "undefined", "regex"}
)
SKIP_TYPES = frozenset(
    {
        "property_identifier",
        "private_property_identifier",
        "comment",
        "string_fragment",
        "escape_sequence",
        "regex",
        "regex_pattern",
        "regex_flags",
        "number",
        "this",
        "super",
        "true",
        "false",
        "null",
        "undefined",
        "formal_parameters",
        "statement_identifier",
        "hash_bang_line",
        "class",
        "class_declaration",
        "statement_block",
        "meta_property",
    }
)
_UNWRAP = frozenset({"await_expression", "parenthesized_expression"})
_CONTAINERS = frozenset({"statement_block", "else_clause", "catch_clause", "finally_clause"})
_WS = re.compile(r"\s+")


@lru_cache(maxsize=1)
def _parser() -> Parser:
    return Parser(Language(_tsjs.language()))


@dataclass(frozen=True)
class CpgNode:
    id: int
    kind: str
    code: str
    file: str
    line: int
    column: int
    callee_name: str | None = None
    end_line: int = 0
    is_statement: bool = False
    synthetic: bool = False
    callee_path: str | None = None
    string_args: tuple[str, ...] = ()
    stmt: int = -1
    region: int = -1

    @property
    def property_path(self) -> str | None:
        if self.kind == "member_access":
            return _WS.sub("", self.code)
        return self.callee_path


@dataclass(frozen=True)
class CpgEdge:
    src: int
    dst: int
    layer: str


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    end_line: int
    message: str


@dataclass
class Region:
    id: int
    creator: int | None
    locals: set = field(default_factory=set)
    tree: tuple | None = None


@dataclass
class ParsedFile:
    """Nodes and analysis facts for one file, before CFG/DFG derivation."""

    path: str
    text: str
    nodes: list
    ast_edges: list
    diagnostics: list
    regions: dict
    defs: dict
    weak_defs: dict
    uses: dict
    callbacks: list
    named_callbacks: list
    func_decls: dict
    requires: list
    exports: list

    @property
    def statements(self) -> list:
        return [n for n in self.nodes if n.is_statement]

    @property
    def ids(self) -> range:
        if not self.nodes:
            return range(0)
        return range(self.nodes[0].id, self.nodes[-1].id + 1)


def _run_deep(fn, *args, **kwargs):
    """Run fn on a thread with a large stack so deep nesting cannot overflow."""
    if getattr(threading.current_thread(), "_npmslice_deep", False):
        return fn(*args, **kwargs)
    box = {}

    def target():
        threading.current_thread()._npmslice_deep = True
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    old = threading.stack_size()
    threading.stack_size(256 * 1024 * 1024)
    try:
        t = threading.Thread(target=target, name="npmslice-deep")
        t.start()
    finally:
        threading.stack_size(old)
    try:
        t.join()
    finally:
        sys.setrecursionlimit(limit)
    if "error" in box:
        raise box["error"]
    return box["value"]


def _pattern_names(ts) -> list[str]:
    """Identifiers bound by a declaration or parameter pattern."""
    out = []
    stack = [ts]
    while stack:
        n = stack.pop()
        t = n.type
        if t in ("identifier", "shorthand_property_identifier_pattern"):
            out.append(n.text.decode("utf-8", "replace"))
        elif t == "pair_pattern":
            v = n.child_by_field_name("value")
            if v is not None:
                stack.append(v)
        elif t in ("assignment_pattern", "object_assignment_pattern"):
            v = n.child_by_field_name("left")
            if v is not None:
                stack.append(v)
        elif t in ("object_pattern", "array_pattern", "rest_pattern", "formal_parameters"):
            stack.extend(reversed(n.named_children))
    return out


def _unwrap(ts):
    while ts is not None and ts.type in _UNWRAP:
        inner = [c for c in ts.named_children if c.type != "comment"]
        if not inner:
            break
        ts = inner[-1]
    return ts


def _member_root(ts):
    """(root identifier name or None, index expressions along the chain)."""
    idx = []
    obj = ts
    while obj is not None and obj.type in MEMBER_TYPES:
        if obj.type == "subscript_expression":
            i = obj.child_by_field_name("index")
            if i is not None:
                idx.append(i)
        obj = obj.child_by_field_name("object")
    name = obj.text.decode("utf-8", "replace") if obj is not None and obj.type == "identifier" else None
    return name, idx, obj


def _string_value(ts) -> str | None:
    if ts.type == "string":
        raw = ts.text.decode("utf-8", "replace")
        return raw[1:-1] if len(raw) >= 2 else ""
    if ts.type == "template_string" and not any(
        c.type == "template_substitution" for c in ts.named_children
    ):
        raw = ts.text.decode("utf-8", "replace")
        return raw[1:-1] if len(raw) >= 2 else ""
    return None


def _local_error(ts) -> bool:
    """True if ts contains a syntax error outside its nested statement bodies."""
    if ts.type == "ERROR" or ts.is_missing:
        return True
    if not ts.has_error:
        return False
    stack = list(ts.children)
    while stack:
        n = stack.pop()
        if n.type == "ERROR" or n.is_missing:
            return True
        if not n.has_error or n.type in _CONTAINERS:
            continue
        if n.type.endswith("_statement") or n.type.endswith("_declaration"):
            continue
        stack.extend(n.children)
    return False


class _Builder:
    def __init__(self, path: str, text: str, first_id: int):
        self.path = path
        self.src = text.encode("utf-8")
        self.rows = self.src.split(b"\n")
        self._ascii: dict[int, bool] = {}
        self.next_id = first_id
        self.nodes: list[CpgNode] = []
        self.ast_edges: list[tuple[int, int]] = []
        self.diagnostics: list[Diagnostic] = []
        self.regions: dict[int, Region] = {}
        self.defs = defaultdict(list)
        self.weak_defs = defaultdict(list)
        self.uses = defaultdict(list)
        self.callbacks: list[tuple[int, int]] = []
        self.named_callbacks: list[tuple[int, str]] = []
        self.func_decls = defaultdict(list)
        self.requires: list[tuple[int, str]] = []
        self.exports: list[int] = []

    # -- node helpers -------------------------------------------------------

    def _col(self, row: int, bcol: int) -> int:
        if row >= len(self.rows):
            return bcol + 1
        ok = self._ascii.get(row)
        if ok is None:
            ok = self._ascii[row] = self.rows[row].isascii()
        if ok:
            return bcol + 1
        return len(self.rows[row][:bcol].decode("utf-8", "replace")) + 1

    def _text(self, a: int, b: int) -> str:
        return self.src[a:b].decode("utf-8", "replace")

    def _add(self, ts, kind, parent, region, stmt=None, is_statement=False, code=None,
             callee_name=None, callee_path=None, string_args=(), synthetic=False):
        nid = self.next_id
        self.next_id += 1
        if ts is None:
            line, col, end = 1, 1, 1
        else:
            line = ts.start_point.row + 1
            col = self._col(ts.start_point.row, ts.start_point.column)
            end = ts.end_point.row + 1
            if ts.end_point.column == 0 and end > line:
                end -= 1
        if code is None:
            code = self._text(ts.start_byte, ts.end_byte) if ts is not None else ""
        node = CpgNode(
            id=nid,
            kind=kind,
            code=code,
            file=self.path,
            line=line,
            column=col,
            callee_name=callee_name,
            end_line=end,
            is_statement=is_statement,
            synthetic=synthetic,
            callee_path=callee_path,
            string_args=tuple(string_args),
            stmt=nid if is_statement else (stmt if stmt is not None else -1),
            region=region if region is not None else nid,
        )
        self.nodes.append(node)
        if parent is not None:
            self.ast_edges.append((parent, nid))
        return nid

    def _header(self, ts, body) -> str:
        if body is None:
            return self._text(ts.start_byte, ts.end_byte)
        end = body.start_byte
        if body.type == "statement_block":
            end += 1
            return self._text(ts.start_byte, end)
        return self._text(ts.start_byte, end).rstrip()

    def _opaque(self, ts, parent, region, diag=None):
        nid = self._add(ts, "other", parent, region, is_statement=True)
        if diag:
            n = self.nodes[-1]
            self.diagnostics.append(Diagnostic(self.path, n.line, n.end_line, diag))
        return nid

    # -- statements ---------------------------------------------------------

    def build(self):
        # keep the tree alive: nodes do not own it
        self.tree = _parser().parse(self.src)
        root_ts = self.tree.root_node
        if not [c for c in root_ts.named_children if c.type not in ("comment", "hash_bang_line")]:
            return
        root = self._add(None, "other", None, None, synthetic=True, code="")
        self.regions[root] = Region(root, None)
        self.regions[root].tree = self._block(root_ts, root, root, 0)

    def _block(self, ts, parent, region, depth):
        items = []
        for c in ts.named_children:
            it = self._statement(c, parent, region, depth)
            if it is not None:
                items.append(it)
        return ("seq", items)

    def _statement(self, ts, parent, region, depth, span=None):
        t = ts.type
        if t in ("comment", "hash_bang_line"):
            return None
        if t == "statement_block":
            return self._block(ts, parent, region, depth + 1)
        if t == "ERROR" or _local_error(ts):
            return ("s", self._opaque(ts, parent, region, "parse_error"))
        if depth > MAX_NESTING:
            return ("s", self._opaque(ts, parent, region, "nesting_limit"))
        handler = getattr(self, "_st_" + t, None)
        if handler is None:
            return ("s", self._opaque(span or ts, parent, region))
        return handler(ts, parent, region, depth, span or ts)

    def _expr_stmt(self, expr, parent, region, depth, span):
        """Statement node for a bare expression (statement or arrow body)."""
        inner = _unwrap(expr)
        t = inner.type if inner is not None else ""
        if t in CALL_TYPES:
            nid, pushes = self._emit_call(inner, parent, region, None, True, span)
            self._walk(pushes, nid, region, depth)
            return nid
        if t in ASSIGN_TYPES or t == "update_expression":
            kind = "assignment"
        elif t in MEMBER_TYPES:
            kind = "member_access"
        elif t == "identifier":
            kind = "identifier"
        elif t in LITERAL_TYPES:
            kind = "literal"
        else:
            kind = "other"
        nid = self._add(span, kind, parent, region, is_statement=True)
        if kind == "member_access":
            # the statement is itself the member read
            name, idx, obj = _member_root(inner)
            pushes = [(i, nid, None) for i in idx]
            if obj is not None:
                pushes.append((obj, nid, None))
            self._walk(pushes, nid, region, depth)
        else:
            self._walk([(expr, nid, None)], nid, region, depth)
        return nid

    def _st_expression_statement(self, ts, parent, region, depth, span):
        kids = [c for c in ts.named_children if c.type != "comment"]
        if not kids:
            return ("s", self._opaque(span, parent, region))
        return ("s", self._expr_stmt(kids[0], parent, region, depth, span))

    def _declarators(self, ts, owner, region, depth):
        for d in ts.named_children:
            if d.type != "variable_declarator":
                continue
            name = d.child_by_field_name("name")
            if name is not None:
                for n in _pattern_names(name):
                    self.defs[owner].append(n)
                    self.regions[region].locals.add(n)
            value = d.child_by_field_name("value")
            if value is not None:
                self._walk([(value, owner, None)], owner, region, depth)

    def _st_lexical_declaration(self, ts, parent, region, depth, span):
        nid = self._add(span, "declaration", parent, region, is_statement=True)
        self._declarators(ts, nid, region, depth)
        return ("s", nid)

    _st_variable_declaration = _st_lexical_declaration

    def _st_function_declaration(self, ts, parent, region, depth, span):
        body = ts.child_by_field_name("body")
        nid = self._add(span, "function_def", parent, region, is_statement=True,
                        code=self._header(span, body))
        name = ts.child_by_field_name("name")
        if name is not None:
            n = name.text.decode("utf-8", "replace")
            self.defs[nid].append(n)
            self.regions[region].locals.add(n)
            self.func_decls[n].append(nid)
        self._function_body(ts, nid, nid, depth)
        return ("s", nid)

    _st_generator_function_declaration = _st_function_declaration

    def _function_body(self, ts, fid, creator, depth):
        reg = self.regions[fid] = Region(fid, creator)
        params = ts.child_by_field_name("parameters") or ts.child_by_field_name("parameter")
        if params is not None:
            reg.locals.update(_pattern_names(params))
        if ts.type in ("function_expression", "function", "generator_function"):
            name = ts.child_by_field_name("name")
            if name is not None:
                reg.locals.add(name.text.decode("utf-8", "replace"))
        body = ts.child_by_field_name("body")
        if body is None:
            reg.tree = ("seq", [])
        elif body.type == "statement_block":
            reg.tree = self._block(body, fid, fid, depth + 1)
        elif depth + 1 > MAX_NESTING:
            reg.tree = ("s", self._opaque(body, fid, fid, "nesting_limit"))
        else:
            reg.tree = ("s", self._expr_stmt(body, fid, fid, depth + 1, body))

    def _st_if_statement(self, ts, parent, region, depth, span):
        cons = ts.child_by_field_name("consequence")
        nid = self._add(span, "control", parent, region, is_statement=True,
                        code=self._header(span, cons))
        cond = ts.child_by_field_name("condition")
        if cond is not None:
            self._walk([(cond, nid, None)], nid, region, depth)
        then = self._statement(cons, nid, region, depth + 1) if cons is not None else None
        other = None
        alt = ts.child_by_field_name("alternative")
        if alt is not None:
            inner = [c for c in alt.named_children if c.type != "comment"]
            if inner:
                other = self._statement(inner[0], nid, region, depth + 1)
        return ("if", nid, then or ("seq", []), other)

    def _st_for_statement(self, ts, parent, region, depth, span):
        body = ts.child_by_field_name("body")
        nid = self._add(span, "control", parent, region, is_statement=True,
                        code=self._header(span, body))
        init = ts.child_by_field_name("initializer")
        if init is not None:
            if init.type in ("lexical_declaration", "variable_declaration"):
                self._declarators(init, nid, region, depth)
            else:
                self._walk([(init, nid, None)], nid, region, depth)
        for f in ("condition", "increment"):
            c = ts.child_by_field_name(f)
            if c is not None:
                self._walk([(c, nid, None)], nid, region, depth)
        inner = self._statement(body, nid, region, depth + 1) if body is not None else None
        return ("loop", nid, inner or ("seq", []))

    def _st_for_in_statement(self, ts, parent, region, depth, span):
        body = ts.child_by_field_name("body")
        nid = self._add(span, "control", parent, region, is_statement=True,
                        code=self._header(span, body))
        left = ts.child_by_field_name("left")
        declared = any(c.type in ("const", "let", "var") for c in ts.children)
        if left is not None:
            if left.type in MEMBER_TYPES:
                root, idx, _ = _member_root(left)
                if root:
                    self.weak_defs[nid].append(root)
            else:
                for n in _pattern_names(left):
                    self.defs[nid].append(n)
                    if declared:
                        self.regions[region].locals.add(n)
        right = ts.child_by_field_name("right")
        if right is not None:
            self._walk([(right, nid, None)], nid, region, depth)
        inner = self._statement(body, nid, region, depth + 1) if body is not None else None
        return ("loop", nid, inner or ("seq", []))

    def _st_while_statement(self, ts, parent, region, depth, span):
        body = ts.child_by_field_name("body")
        nid = self._add(span, "control", parent, region, is_statement=True,
                        code=self._header(span, body))
        cond = ts.child_by_field_name("condition")
        if cond is not None:
            self._walk([(cond, nid, None)], nid, region, depth)
        inner = self._statement(body, nid, region, depth + 1) if body is not None else None
        return ("loop", nid, inner or ("seq", []))

    def _st_try_statement(self, ts, parent, region, depth, span):
        body = ts.child_by_field_name("body")
        nid = self._add(span, "control", parent, region, is_statement=True,
                        code=self._header(span, body))
        tree_body = self._block(body, nid, region, depth + 1) if body is not None else ("seq", [])
        catch_id = catch_tree = fin_tree = None
        handler = ts.child_by_field_name("handler")
        if handler is not None:
            hbody = handler.child_by_field_name("body")
            catch_id = self._add(handler, "control", nid, region, is_statement=True,
                                 code=self._header(handler, hbody))
            param = handler.child_by_field_name("parameter")
            if param is not None:
                for n in _pattern_names(param):
                    self.defs[catch_id].append(n)
                    self.regions[region].locals.add(n)
            catch_tree = self._block(hbody, catch_id, region, depth + 1) if hbody is not None else ("seq", [])
        fin = ts.child_by_field_name("finalizer")
        if fin is not None:
            fbody = fin.child_by_field_name("body")
            if fbody is not None:
                fin_tree = self._block(fbody, nid, region, depth + 1)
        return ("try", nid, tree_body, catch_id, catch_tree, fin_tree)

    def _st_return_statement(self, ts, parent, region, depth, span):
        nid = self._add(span, "return", parent, region, is_statement=True)
        kids = [c for c in ts.named_children if c.type != "comment"]
        if kids:
            self._walk([(kids[0], nid, None)], nid, region, depth)
        return ("ret", nid)

    def _st_import_statement(self, ts, parent, region, depth, span):
        nid = self._add(span, "declaration", parent, region, is_statement=True)
        stack = [c for c in ts.named_children if c.type == "import_clause"]
        while stack:
            n = stack.pop()
            if n.type == "identifier":
                name = n.text.decode("utf-8", "replace")
                self.defs[nid].append(name)
                self.regions[region].locals.add(name)
            elif n.type == "import_specifier":
                alias = n.child_by_field_name("alias") or n.child_by_field_name("name")
                if alias is not None:
                    stack.append(alias)
            else:
                stack.extend(reversed(n.named_children))
        src = ts.child_by_field_name("source")
        if src is not None:
            spec = _string_value(src)
            if spec is not None:
                self.requires.append((nid, spec))
        return ("s", nid)

    def _st_export_statement(self, ts, parent, region, depth, span):
        decl = ts.child_by_field_name("declaration")
        if decl is not None:
            item = self._statement(decl, parent, region, depth, span=span)
        else:
            value = ts.child_by_field_name("value")
            if value is not None:
                nid = self._expr_stmt(value, parent, region, depth, span)
            else:
                nid = self._add(span, "other", parent, region, is_statement=True)
                clause = [c for c in ts.named_children if c.type == "export_clause"]
                for c in clause:
                    for spec in c.named_children:
                        name = spec.child_by_field_name("name")
                        if name is not None and name.type == "identifier":
                            self.uses[nid].append(name.text.decode("utf-8", "replace"))
                src = ts.child_by_field_name("source")
                if src is not None and _string_value(src) is not None:
                    self.requires.append((nid, _string_value(src)))
            item = ("s", nid)
        self.exports.append(self.nodes[-1].id if item is None else _entry(item))
        return item

    # -- expressions --------------------------------------------------------

    def _emit_call(self, ts, parent, region, stmt, is_statement, span):
        fn = ts.child_by_field_name("function") or ts.child_by_field_name("constructor")
        args = ts.child_by_field_name("arguments")
        name = ""
        path = None
        if fn is not None:
            path = _WS.sub("", fn.text.decode("utf-8", "replace"))
            t = fn.type
            if t == "identifier":
                name = path
            elif t == "member_expression":
                prop = fn.child_by_field_name("property")
                if prop is not None:
                    name = prop.text.decode("utf-8", "replace")
            elif t == "subscript_expression":
                idx = fn.child_by_field_name("index")
                if idx is not None:
                    name = _string_value(idx) or ""
            elif t in ("import", "super"):
                name = t
        strings = []
        if args is not None and args.type == "arguments":
            for a in args.named_children:
                s = _string_value(a)
                if s is not None:
                    strings.append(s)
        code = None
        nid = self._add(span, "call", parent, region, stmt=stmt, is_statement=is_statement,
                        code=code, callee_name=name, callee_path=path, string_args=strings)
        pushes = []
        if fn is not None:
            f = _unwrap(fn)
            if f is not None and f.type in FUNC_TYPES:
                pushes.append((f, nid, nid))
            elif fn.type == "identifier":
                self.uses[nid].append(path)
            elif fn.type == "member_expression":
                obj = fn.child_by_field_name("object")
                if obj is not None:
                    pushes.append((obj, nid, None))
            elif fn.type == "subscript_expression":
                for f2 in ("object", "index"):
                    c = fn.child_by_field_name(f2)
                    if c is not None:
                        pushes.append((c, nid, None))
            elif fn.type not in ("import", "super"):
                pushes.append((fn, nid, None))
        if args is not None:
            if args.type == "arguments":
                for a in args.named_children:
                    if a.type != "comment":
                        pushes.append((a, nid, nid))
            else:
                pushes.append((args, nid, None))
        if name == "require" and strings and fn is not None and fn.type == "identifier":
            self.requires.append((nid, strings[0]))
        pushes.reverse()
        return nid, pushes

    def _function_expr(self, ts, parent, stmt, region, depth):
        body = ts.child_by_field_name("body")
        fid = self._add(ts, "function_def", parent, region, stmt=stmt,
                        code=self._header(ts, body))
        if depth + 1 > MAX_NESTING:
            self.regions[fid] = Region(fid, stmt, tree=("seq", []))
            n = self.nodes[-1]
            self.diagnostics.append(Diagnostic(self.path, n.line, n.end_line, "nesting_limit"))
            return fid
        self._function_body(ts, fid, stmt, depth)
        return fid

    def _assignment(self, ts, own, stmt, stack):
        left = ts.child_by_field_name("left")
        right = ts.child_by_field_name("right")
        if right is not None:
            stack.append((right, own, None))
        if left is None:
            return
        left = _unwrap(left)
        if left.type == "identifier":
            name = left.text.decode("utf-8", "replace")
            self.defs[stmt].append(name)
            if ts.type == "augmented_assignment_expression":
                self.uses[own].append(name)
        elif left.type in MEMBER_TYPES:
            root, idx, obj = _member_root(left)
            if root:
                self.weak_defs[stmt].append(root)
            elif obj is not None:
                stack.append((obj, own, None))
            for i in reversed(idx):
                stack.append((i, own, None))
            path = _WS.sub("", left.text.decode("utf-8", "replace"))
            if path == "exports" or path.startswith(("module.exports", "exports.", "exports[")):
                if stmt not in self.exports:
                    self.exports.append(stmt)
        else:
            for n in _pattern_names(left):
                self.defs[stmt].append(n)

    def _walk(self, stack, stmt, region, depth):
        while stack:
            ts, own, cb = stack.pop()
            t = ts.type
            if t in FUNC_TYPES:
                fid = self._function_expr(ts, own, stmt, region, depth)
                if cb is not None:
                    self.callbacks.append((cb, fid))
            elif t in CALL_TYPES:
                _, pushes = self._emit_call(ts, own, region, stmt, False, ts)
                stack.extend(pushes)
            elif t in MEMBER_TYPES:
                mid = self._add(ts, "member_access", own, region, stmt=stmt)
                _, idx, obj = _member_root(ts)
                pushes = [(i, mid, None) for i in idx]
                if obj is not None:
                    pushes.append((obj, mid, None))
                stack.extend(pushes)
            elif t == "identifier":
                name = ts.text.decode("utf-8", "replace")
                self.uses[own].append(name)
                if cb is not None:
                    self.named_callbacks.append((cb, name))
            elif t == "shorthand_property_identifier":
                self.uses[own].append(ts.text.decode("utf-8", "replace"))
            elif t in ASSIGN_TYPES:
                self._assignment(ts, own, stmt, stack)
            elif t == "update_expression":
                arg = ts.child_by_field_name("argument")
                if arg is not None and arg.type == "identifier":
                    name = arg.text.decode("utf-8", "replace")
                    self.defs[stmt].append(name)
                    self.uses[own].append(name)
                elif arg is not None:
                    stack.append((arg, own, None))
            elif t in SKIP_TYPES or t == "ERROR":
                continue
            else:
                stack.extend((c, own, None) for c in reversed(ts.named_children))


def parse_file(path: str, text: str, first_id: int = 0) -> ParsedFile:
    """Lower one file to graph nodes with AST parents and def/use facts."""
    return _run_deep(_parse_file, path, text, first_id)


def _parse_file(path, text, first_id):
    b = _Builder(path, text, first_id)
    b.build()

    def freeze(d):
        return {k: tuple(dict.fromkeys(v)) for k, v in d.items() if v}

    return ParsedFile(
        path=path,
        text=text,
        nodes=b.nodes,
        ast_edges=b.ast_edges,
        diagnostics=b.diagnostics,
        regions=b.regions,
        defs=freeze(b.defs),
        weak_defs=freeze(b.weak_defs),
        uses=freeze(b.uses),
        callbacks=b.callbacks,
        named_callbacks=b.named_callbacks,
        func_decls={k: list(v) for k, v in b.func_decls.items()},
        requires=b.requires,
        exports=sorted(set(b.exports)),
    )


# -- control flow -------------------------------------------------------------


def _entry(item):
    if item is None:
        return None
    tag = item[0]
    if tag == "seq":
        for it in item[1]:
            e = _entry(it)
            if e is not None:
                return e
        return None
    return item[1]


def _stmts_in(item, out):
    if item is None:
        return out
    tag = item[0]
    if tag == "seq":
        for it in item[1]:
            _stmts_in(it, out)
    elif tag in ("s", "ret"):
        out.append(item[1])
    elif tag == "if":
        out.append(item[1])
        _stmts_in(item[2], out)
        _stmts_in(item[3], out)
    elif tag == "loop":
        out.append(item[1])
        _stmts_in(item[2], out)
    elif tag == "try":
        out.append(item[1])
        _stmts_in(item[2], out)
        if item[3] is not None:
            out.append(item[3])
        _stmts_in(item[4], out)
        _stmts_in(item[5], out)
    return out


def _flow(item, preds, edges):
    tag = item[0]
    if tag == "seq":
        for it in item[1]:
            preds = _flow(it, preds, edges)
        return preds
    nid = item[1]
    for p in preds:
        edges.add((p, nid))
    if tag == "s":
        return [nid]
    if tag == "ret":
        return []
    if tag == "if":
        exits = _flow(item[2], [nid], edges)
        if item[3] is not None:
            exits = exits + _flow(item[3], [nid], edges)
        else:
            exits = exits + [nid]
        return exits
    if tag == "loop":
        for x in _flow(item[2], [nid], edges):
            edges.add((x, nid))
        return [nid]
    if tag == "try":
        _, _, body, catch_id, catch_tree, fin = item
        exits = _flow(body, [nid], edges)
        if catch_id is not None:
            inside = _stmts_in(body, [])
            for s in inside or [nid]:
                edges.add((s, catch_id))
            exits = exits + _flow(catch_tree, [catch_id], edges)
        if fin is not None:
            exits = _flow(fin, exits, edges)
        return exits
    raise ValueError(tag)


def build_cfg(parsed: ParsedFile) -> set[tuple[int, int]]:
    """Statement-level CFG edges for every function body of one file."""
    return _run_deep(_build_cfg, parsed)


def _build_cfg(parsed):
    edges: set[tuple[int, int]] = set()
    for rid in sorted(parsed.regions):
        reg = parsed.regions[rid]
        if reg.tree is not None:
            _flow(reg.tree, [], edges)
    stmt_of = {n.id: n.stmt for n in parsed.nodes}
    for call, fid in parsed.callbacks:
        e = _entry(parsed.regions[fid].tree) if fid in parsed.regions else None
        if e is not None:
            edges.add((stmt_of[call], e))
    for call, name in parsed.named_callbacks:
        for fid in parsed.func_decls.get(name, ()):
            e = _entry(parsed.regions[fid].tree)
            if e is not None:
                edges.add((stmt_of[call], e))
    return edges


# -- data flow ----------------------------------------------------------------


def reaching_definitions(parsed: ParsedFile, cfg: set[tuple[int, int]]):
    """IN sets per statement as {var: set(def stmt ids)}, computed per region."""
    by_id = {n.id: n for n in parsed.nodes}
    region_stmts = defaultdict(list)
    for n in parsed.nodes:
        if n.is_statement:
            region_stmts[n.region].append(n.id)
    preds = defaultdict(list)
    for u, v in sorted(cfg):
        if by_id[u].region == by_id[v].region:
            preds[v].append(u)
    result_in: dict[int, dict[str, set]] = {}
    result_out: dict[int, dict[str, set]] = {}
    for rid in sorted(parsed.regions):
        reg = parsed.regions[rid]
        stmts = region_stmts.get(rid, [])
        if not stmts:
            continue
        # def universe as bit positions
        index: dict[tuple[str, int], int] = {}
        var_mask: dict[str, int] = defaultdict(int)

        def bit(v, d):
            k = (v, d)
            if k not in index:
                index[k] = len(index)
                var_mask[v] |= 1 << index[k]
            return 1 << index[k]

        entry_mask = 0
        if reg.creator is not None and reg.creator in result_out:
            for v, ds in sorted(result_out[reg.creator].items()):
                if v in reg.locals:
                    continue
                for d in sorted(ds):
                    entry_mask |= bit(v, d)
        gen = {}
        strong = {}
        for s in stmts:
            g = 0
            for v in parsed.defs.get(s, ()):
                g |= bit(v, s)
            for v in parsed.weak_defs.get(s, ()):
                g |= bit(v, s)
            gen[s] = g
            strong[s] = parsed.defs.get(s, ())
        kill = {s: 0 for s in stmts}
        for s in stmts:
            k = 0
            for v in strong[s]:
                k |= var_mask[v]
            kill[s] = k
        entry = _entry(reg.tree)
        IN = {s: 0 for s in stmts}
        OUT = {s: gen[s] for s in stmts}
        changed = True
        while changed:
            changed = False
            for s in stmts:
                i = entry_mask if s == entry else 0
                for p in preds.get(s, ()):
                    i |= OUT[p]
                o = gen[s] | (i & ~kill[s])
                if i != IN[s] or o != OUT[s]:
                    IN[s], OUT[s] = i, o
                    changed = True
        rev = {b: k for k, b in index.items()}

        def decode(mask):
            out = defaultdict(set)
            while mask:
                low = mask & -mask
                v, d = rev[low.bit_length() - 1]
                out[v].add(d)
                mask ^= low
            return dict(out)

        for s in stmts:
            result_in[s] = decode(IN[s])
            result_out[s] = decode(OUT[s])
    return result_in, result_out


def build_dfg(parsed: ParsedFile, cfg: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Def-use edges plus intra-statement value edges for one file."""
    rd_in, _ = reaching_definitions(parsed, cfg)
    by_id = {n.id: n for n in parsed.nodes}
    edges: set[tuple[int, int]] = set()
    for nid, names in parsed.uses.items():
        node = by_id[nid]
        reach = rd_in.get(node.stmt, {})
        for v in names:
            for d in reach.get(v, ()):
                edges.add((d, nid))
    for parent, child in parsed.ast_edges:
        c = by_id[child]
        if c.is_statement or c.kind not in ("call", "member_access"):
            continue
        p = by_id[parent]
        if p.stmt == c.stmt:
            edges.add((child, parent))
    return edges


def resolve_module(importer: str, spec: str, paths: set[str]) -> str | None:
    """Package-relative file a relative require/import specifier points at."""
    if not spec.startswith(("./", "../")):
        return None
    base = posixpath.normpath(posixpath.join(posixpath.dirname(importer), spec))
    for cand in (base, base + ".js", base + ".mjs", base + ".cjs", base + "/index.js"):
        if cand in paths:
            return cand
    return None


# -- assembled graph ----------------------------------------------------------


class Cpg:
    """Package-level graph: nodes, per-layer adjacency and per-file indexes."""

    def __init__(self, package, nodes, edges, texts, diagnostics, facts):
        self.package = package
        self.nodes: list[CpgNode] = nodes
        self._texts = texts
        self._lines: dict[str, list[str]] = {}
        self.diagnostics: list[Diagnostic] = diagnostics
        self.facts = facts
        self.out = {layer: defaultdict(list) for layer in LAYERS}
        self.inn = {layer: defaultdict(list) for layer in LAYERS}
        self._edges = {layer: sorted(set(edges.get(layer, ()))) for layer in LAYERS}
        for layer, es in self._edges.items():
            for u, v in es:
                self.out[layer][u].append(v)
                self.inn[layer][v].append(u)
        self.line_index: dict[str, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
        self._by_file: dict[str, list[int]] = defaultdict(list)
        for n in nodes:
            self._by_file[n.file].append(n.id)
            if n.is_statement:
                self.line_index[n.file][n.line].append(n.id)

    @property
    def files(self) -> list[str]:
        return sorted(self._texts)

    def text(self, file: str) -> str:
        return self._texts[file]

    def lines(self, file: str) -> list[str]:
        if file not in self._lines:
            self._lines[file] = split_lines(self._texts[file])
        return self._lines[file]

    def edges(self, layer: str) -> list[tuple[int, int]]:
        return self._edges[layer]

    def succ(self, nid: int, layer: str) -> list[int]:
        return self.out[layer].get(nid, [])

    def pred(self, nid: int, layer: str) -> list[int]:
        return self.inn[layer].get(nid, [])

    def ast_parent(self, nid: int) -> int | None:
        ps = self.inn["AST"].get(nid)
        return ps[0] if ps else None

    def ast_parents(self, nid: int) -> list[int]:
        return list(self.inn["AST"].get(nid, []))

    def file_nodes(self, file: str) -> list[CpgNode]:
        return [self.nodes[i] for i in self._by_file.get(file, [])]

    def statements(self, file: str | None = None) -> list[CpgNode]:
        ns = self.nodes if file is None else self.file_nodes(file)
        return [n for n in ns if n.is_statement]

    def statement_of(self, nid: int) -> CpgNode:
        n = self.nodes[nid]
        return self.nodes[n.stmt] if n.stmt >= 0 else n

    def owned(self, stmt_id: int) -> list[int]:
        """Ids of the statement and the expression nodes it owns."""
        return self.facts["owned"].get(stmt_id, [stmt_id])

    def verify_transpose(self) -> bool:
        for layer in LAYERS:
            fwd = sorted((u, v) for u, vs in self.out[layer].items() for v in vs)
            rev = sorted((u, v) for v, us in self.inn[layer].items() for u in us)
            if fwd != rev:
                return False
        return True

    def to_jsonl(self) -> str:
        out = []
        for n in self.nodes:
            out.append(json.dumps({"node": {
                "id": n.id, "kind": n.kind, "file": n.file, "line": n.line,
                "column": n.column, "callee_name": n.callee_name,
                "statement": n.is_statement, "synthetic": n.synthetic, "code": n.code,
            }}))
        for layer in LAYERS:
            for u, v in self._edges[layer]:
                out.append(json.dumps({"edge": {"from": u, "to": v, "layer": layer}}))
        return "\n".join(out) + "\n"

    def to_dot(self) -> str:
        style = {"AST": "dotted", "CFG": "solid", "DFG": "dashed"}
        lines = ["digraph cpg {", "  node [shape=box, fontname=monospace];"]
        for n in self.nodes:
            label = f"{n.id} {n.kind} {n.file}:{n.line}\\n" + n.code.split("\n")[0][:60]
            label = label.replace('"', '\\"')
            lines.append(f'  n{n.id} [label="{label}"];')
        for layer in LAYERS:
            for u, v in self._edges[layer]:
                lines.append(f'  n{u} -> n{v} [style={style[layer]}, label="{layer}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def assemble_cpg(files, package: PackageRef | None = None) -> Cpg:
    """Parse every file and merge the per-file graphs into one Cpg."""
    return _run_deep(_assemble, files, package)


def _assemble(files, package):
    items = []
    for f in files:
        if isinstance(f, SourceFile):
            items.append((f.path, f.text))
        else:
            items.append((f[0], f[1]))
    items.sort()
    nodes: list[CpgNode] = []
    edges = {layer: set() for layer in LAYERS}
    diagnostics = []
    texts = {}
    parsed_all = []
    facts = {"defs": {}, "weak_defs": {}, "uses": {}, "owned": defaultdict(list),
             "regions": {}, "rd_in": {}}
    next_id = 0
    for path, text in items:
        p = _parse_file(path, text, next_id)
        next_id += len(p.nodes)
        parsed_all.append(p)
        texts[path] = text
        nodes.extend(p.nodes)
        diagnostics.extend(p.diagnostics)
        edges["AST"].update(p.ast_edges)
        cfg = _build_cfg(p)
        edges["CFG"].update(cfg)
        edges["DFG"].update(build_dfg(p, cfg))
        facts["defs"].update(p.defs)
        facts["weak_defs"].update(p.weak_defs)
        facts["uses"].update(p.uses)
        facts["regions"].update(p.regions)
    for n in nodes:
        if n.stmt >= 0:
            facts["owned"][n.stmt].append(n.id)
    paths = set(texts)
    exports = {p.path: p.exports for p in parsed_all}
    for p in parsed_all:
        for nid, spec in p.requires:
            target = resolve_module(p.path, spec, paths)
            if target is None or target == p.path:
                continue
            for e in exports.get(target, ()):
                edges["DFG"].add((e, nid))
    facts["owned"] = dict(facts["owned"])
    return Cpg(package, nodes, edges, texts, diagnostics, facts)
