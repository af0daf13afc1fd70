import json
from collections import Counter

import pytest

from npmslice.cpg import KINDS, assemble_cpg, parse_file

from helpers import REVERSE_SHELL, MICRO, cpg_of, deep_nesting_package, micro_packages
from oracles import oracle_def_use, value_edges


def test_empty_file():
    cpg = cpg_of("")
    assert cpg.statements() == []
    assert cpg.diagnostics == []


def test_two_statements_call_kind():
    cpg = cpg_of("const x = 1;\nexec(x);")
    s = cpg.statements()
    assert len(s) == 2
    assert s[1].kind == "call"
    assert s[1].callee_name == "exec"


@pytest.mark.parametrize("bad", ["x = = 1;", "foo(;"])
def test_malformed_line_recovered(bad):
    cpg = cpg_of(f"a();\n{bad}\nb();")
    s = cpg.statements()
    assert [n.line for n in s] == [1, 2, 3]
    assert s[1].kind == "other"
    assert len(cpg.diagnostics) == 1
    assert cpg.diagnostics[0].line == 2


def test_parse_file_reports_diagnostics():
    parsed = parse_file("x.js", "a();\nx = = 1;\nb();")
    assert len(parsed.statements) == 3
    assert len(parsed.diagnostics) == 1


def test_callee_name_only_on_calls():
    cpg = cpg_of("const a = child_process.exec('ls');\nlet b = a.c.d;\nif (b) { x.y.z(); }")
    for n in cpg.nodes:
        assert n.kind in KINDS
        assert (n.callee_name is not None) == (n.kind == "call")
    names = {n.callee_name for n in cpg.nodes if n.kind == "call"}
    assert names == {"exec", "z"}


def test_code_at_position():
    text = "let h = os.hostname();\nif (h) {\n  cp.exec('x ' + h);\n}\n"
    cpg = cpg_of(text)
    lines = text.split("\n")
    for n in cpg.nodes:
        if n.synthetic:
            continue
        first = n.code.split("\n")[0]
        assert lines[n.line - 1][n.column - 1:].startswith(first)


def test_straight_line_chain():
    cpg = cpg_of("a();\nb();\nc();")
    ids = [n.id for n in cpg.statements()]
    assert cpg.edges("CFG") == [(ids[0], ids[1]), (ids[1], ids[2])]


def test_if_else_diamond():
    cpg = cpg_of("if (c) A(); else B();\nC();")
    cond, a, b, c = [n.id for n in cpg.statements()]
    assert cpg.nodes[cond].kind == "control"
    assert set(cpg.edges("CFG")) == {(cond, a), (cond, b), (a, c), (b, c)}


def test_loop_back_edge():
    cpg = cpg_of("while (c) {\n  a();\n}\nb();")
    loop, body, after = [n.id for n in cpg.statements()]
    assert {(loop, body), (body, loop), (loop, after)} <= set(cpg.edges("CFG"))


def test_try_links_handler():
    cpg = cpg_of("try {\n  a();\n} catch (e) {\n  b();\n}\nc();")
    ids = {n.code.rstrip(";"): n.id for n in cpg.statements()}
    succ = {}
    for u, v in cpg.edges("CFG"):
        succ.setdefault(u, []).append(v)
    # body reaches the handler body without passing the statement after the try
    seen, stack = set(), [ids["a()"]]
    while stack:
        x = stack.pop()
        if x in seen or x == ids["c()"]:
            continue
        seen.add(x)
        stack.extend(succ.get(x, ()))
    assert ids["b()"] in seen


def test_callback_edge():
    cpg = cpg_of("client.connect(p, h, function(){\n  a.pipe(b);\n  b.pipe(c);\n});")
    connect = next(n for n in cpg.nodes if n.callee_name == "connect")
    first = next(n for n in cpg.statements() if n.line == 2)
    assert (connect.id, first.id) in set(cpg.edges("CFG"))


def test_dfg_single_pair():
    cpg = cpg_of("let a = s();\nk(a);")
    d, u = cpg.statements()
    assert (d.id, u.id) in set(cpg.edges("DFG"))


def test_dfg_redefinition_kill():
    cpg = cpg_of("a = 1;\na = 2;\nk(a);")
    s1, s2, use = cpg.statements()
    dfg = set(cpg.edges("DFG"))
    assert (s2.id, use.id) in dfg
    assert (s1.id, use.id) not in dfg


def test_dfg_closure():
    cpg = cpg_of("let h = os.hostname();\ncb = () => exec(h);\ncb();")
    h = cpg.statements()[0]
    exec_node = next(n for n in cpg.nodes if n.callee_name == "exec")
    assert (h.id, exec_node.id) in set(cpg.edges("DFG"))


def test_assemble_single_file():
    cpg = cpg_of("a();\nb();")
    s = cpg.statements()
    assert len(s) == 2
    assert all(cpg.ast_parent(n.id) is not None for n in s)


def test_two_files_disjoint():
    cpg = cpg_of({"a.js": "x();\ny();", "b.js": "z();"})
    a_ids = {n.id for n in cpg.file_nodes("a.js")}
    b_ids = {n.id for n in cpg.file_nodes("b.js")}
    assert a_ids and b_ids and not a_ids & b_ids
    assert {n.file for n in cpg.file_nodes("b.js")} == {"b.js"}
    assert len(a_ids | b_ids) == len(cpg.nodes)


def test_reverse_shell_calls():
    cpg = cpg_of((REVERSE_SHELL / "pkg" / "index.js").read_text())
    connect = next(n for n in cpg.nodes if n.callee_name == "connect")
    pipes = [n for n in cpg.nodes if n.callee_name == "pipe"]
    assert len(pipes) == 3
    for p in pipes:
        cur, chain = p.id, []
        while cur is not None:
            chain.append(cur)
            cur = cpg.ast_parent(cur)
        assert connect.id in chain


def micro_cpgs():
    return [(name, cpg_of(files, name)) for name, files in micro_packages()]


@pytest.mark.parametrize("name,cpg", micro_cpgs(), ids=lambda v: v if isinstance(v, str) else "")
def test_graph_invariants(name, cpg):
    parents = Counter(v for _, v in cpg.edges("AST"))
    assert max(parents.values(), default=0) <= 1
    assert cpg.verify_transpose()
    stmt_ids = {n.id for n in cpg.statements()}
    assert all(u in stmt_ids and v in stmt_ids for u, v in cpg.edges("CFG"))
    for n in cpg.nodes:
        if not n.synthetic:
            assert n.line <= len(cpg.lines(n.file))


@pytest.mark.parametrize("name,cpg", micro_cpgs(), ids=lambda v: v if isinstance(v, str) else "")
def test_dfg_matches_def_use_oracle(name, cpg):
    # intra-file DFG minus expression value edges equals the path-search oracle
    intra = {(u, v) for u, v in cpg.edges("DFG") if cpg.nodes[u].file == cpg.nodes[v].file}
    assert intra - value_edges(cpg) == oracle_def_use(cpg)


def test_straight_line_is_exact_chain():
    cpg = cpg_of("\n".join(f"let v{i} = f{i}(v{i - 1});" for i in range(1, 15)))
    ids = [n.id for n in cpg.statements()]
    assert cpg.edges("CFG") == list(zip(ids, ids[1:]))


def test_deterministic_ids_and_edges():
    text = (MICRO / "diamond" / "index.js").read_text()
    a, b = cpg_of(text), cpg_of(text)
    assert a.to_jsonl() == b.to_jsonl()


def test_deep_nesting_parses():
    cpg = cpg_of(deep_nesting_package(depth=300, diamonds=2))
    assert cpg.statements()
    assert cpg.verify_transpose()


def test_jsonl_and_dot_dump():
    cpg = cpg_of("let a = s();\nk(a);")
    rows = [json.loads(line) for line in cpg.to_jsonl().splitlines()]
    assert sum("node" in r for r in rows) == len(cpg.nodes)
    assert {r["edge"]["layer"] for r in rows if "edge" in r} == {"AST", "CFG", "DFG"}
    dot = cpg.to_dot()
    assert dot.startswith("digraph cpg {") and "style=dashed" in dot


def test_cross_file_require_edge():
    files = {p.name: p.read_text() for p in (MICRO / "cross_file").glob("*.js")}
    cpg = cpg_of(files)
    cross = [(u, v) for u, v in cpg.edges("DFG") if cpg.nodes[u].file != cpg.nodes[v].file]
    assert cross
    assert all(cpg.nodes[u].file == "lib.js" and cpg.nodes[v].file == "index.js" for u, v in cross)


def test_assemble_accepts_tuples():
    cpg = assemble_cpg([("b.js", "b();"), ("a.js", "a();")])
    assert cpg.files == ["a.js", "b.js"]
