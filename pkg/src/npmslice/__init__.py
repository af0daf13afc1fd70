"""Slice npm packages down to their security-relevant code and score the slices."""

from .catalog import ApiCatalog, ApiPattern, builtin_catalog, load_catalog
from .cpg import Cpg, CpgNode, assemble_cpg
from .evaluation import aggregate, compute_metrics, roc_sweep, sfr
from .ingest import PackageRef, SourceFile, SourceFileSet, load_corpus, open_package
from .scoring import (
    ReplayTransport, ScorerConfig, build_prompt, builtin_template, parse_score, score_remote, score_stub,
)
from .slicer import Slice, SliceBudget, baseline_chunks, slice_package, static_slice, taint_slice
from .tokens import count_tokens

__version__ = "0.1.0"

__all__ = [
    "ApiCatalog", "ApiPattern", "Cpg", "CpgNode", "PackageRef", "ReplayTransport", "ScorerConfig", "Slice",
    "SliceBudget", "SourceFile", "SourceFileSet", "aggregate", "assemble_cpg", "baseline_chunks",
    "build_prompt", "builtin_catalog", "builtin_template", "compute_metrics", "count_tokens", "load_catalog",
    "load_corpus", "open_package", "parse_score", "roc_sweep", "score_remote", "score_stub", "sfr",
    "slice_package", "static_slice", "taint_slice",
]
