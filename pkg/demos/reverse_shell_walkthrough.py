"""Walk one reverse-shell sample through slicing, prompting, scoring and aggregation.

Run from the repository root:  python3 demos/reverse_shell_walkthrough.py
"""

from pathlib import Path

from npmslice import (
    PackageRef, ReplayTransport, ScorerConfig, aggregate, assemble_cpg, build_prompt, builtin_catalog,
    builtin_template, score_remote, score_stub, static_slice, taint_slice,
)
from npmslice.ingest import open_package

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "reverse_shell"


def main():
    fs = open_package(FIXTURE / "pkg", PackageRef("pkg", str(FIXTURE / "pkg"), "malware"))
    catalog = builtin_catalog()
    cpg = assemble_cpg(fs.files, fs.package)
    print(f"{len(cpg.nodes)} graph nodes, {len(cpg.edges('CFG'))} control-flow edges, "
          f"{len(cpg.edges('DFG'))} data-flow edges")

    # The socket pipes never receive data from the connect call, so there is no
    # data-flow path; the taint slicer falls back to the enclosing source call.
    print(f"static slices: {len(static_slice(cpg, catalog))}")
    slices = taint_slice(cpg, catalog)
    for s in slices:
        print(f"\n[{s.strategy}] source {s.source_anchor.to_list()} -> sink {s.sink_anchor.to_list()}")
        print(s.snippet)

    bundle = build_prompt(slices[0], builtin_template(), ("pkg", 0))
    print(f"\nsystem prompt: {len(bundle.system_text)} chars, user prompt: {len(bundle.user_text)} chars")

    cfg = ScorerConfig(endpoint_url="http://scorer.invalid/v1/chat/completions")
    recorded = score_remote(bundle, cfg, ReplayTransport.from_file(FIXTURE / "replay.json"))
    stub = score_stub(slices[0], catalog, ("pkg", 0))
    print(f"recorded reply: {recorded.values()}  ({recorded.latency_ms} ms)")
    print(f"offline stub:   {stub.values()}")

    v = aggregate([recorded], tau=0.8, package=fs.package)
    print(f"\npackage verdict: S={v.S:.2f} tau={v.tau} -> {v.label}")


if __name__ == "__main__":
    main()
