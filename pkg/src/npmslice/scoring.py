"""Scorer requests and responses: prompt assembly, strict verdict parsing,
an HTTP chat-completion client with replayable fixtures, and an offline
rule-based stub."""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import httpx

from .catalog import ApiCatalog
from .slicer import Slice

PLACEHOLDER = "{{SNIPPET}}"
SCORE_KEYS = ("confidence", "obfuscated", "malware", "securityRisk")
STUB_ID = "stub-1"
LATENCY_HEADER = "x-recorded-latency-ms"


class ScoringError(Exception):
    pass


class TemplateMissingPlaceholder(ScoringError):
    pass


class ScoreParseError(ScoringError, ValueError):
    pass


class NotJson(ScoreParseError):
    pass


class MultipleObjects(ScoreParseError):
    pass


class MissingKey(ScoreParseError):
    def __init__(self, name: str):
        super().__init__(f"missing key {name!r}")
        self.name = name


class UnexpectedKey(ScoreParseError):
    def __init__(self, name: str):
        super().__init__(f"unexpected key {name!r}")
        self.name = name


class NotNumeric(ScoreParseError):
    def __init__(self, name: str, value):
        super().__init__(f"{name} is not a number: {value!r}")
        self.name, self.value = name, value


class OutOfRange(ScoreParseError):
    def __init__(self, name: str, value):
        super().__init__(f"{name}={value!r} outside [0, 1]")
        self.name, self.value = name, value


class TransportFailed(ScoringError):
    pass


class ExhaustedRetries(ScoringError):
    def __init__(self, attempts: int, last: str):
        super().__init__(f"gave up after {attempts} attempts: {last}")
        self.attempts, self.last = attempts, last


def builtin_template() -> str:
    return resources.files("npmslice").joinpath("data/prompt_template.txt").read_text(encoding="utf-8")


def load_template(path: str | Path | None = None) -> str:
    if path is None:
        return builtin_template()
    return Path(path).read_text(encoding="utf-8")


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    slice_ref: tuple[str, int]


def build_prompt(slice_: Slice, template: str, slice_ref: tuple[str, int] | None = None) -> PromptBundle:
    """System text is the template minus its snippet placeholder; user text is the snippet."""
    if PLACEHOLDER not in template:
        raise TemplateMissingPlaceholder(f"template lacks {PLACEHOLDER}")
    system = template.replace(PLACEHOLDER, "").rstrip()
    return PromptBundle(system, slice_.snippet, slice_ref or (slice_.package, 0))


def render_single_prompt(bundle: PromptBundle, template: str) -> str:
    """Template with the snippet substituted, for single-message endpoints."""
    return template.replace(PLACEHOLDER, bundle.user_text)


@dataclass(frozen=True)
class ScoreRecord:
    confidence: float
    obfuscated: float
    malware: float
    securityRisk: float
    slice_ref: tuple[str, int] = ("", 0)
    scorer_id: str = ""
    latency_ms: int = 0

    def __post_init__(self):
        for k in SCORE_KEYS:
            v = getattr(self, k)
            if not 0.0 <= v <= 1.0:
                raise OutOfRange(k, v)

    @property
    def scored(self) -> bool:
        return True

    def values(self) -> dict:
        return {k: getattr(self, k) for k in SCORE_KEYS}

    def to_dict(self) -> dict:
        return {"slice_ref": list(self.slice_ref), "scorer_id": self.scorer_id, "status": "scored",
                "reason": None, **self.values(), "latency_ms": self.latency_ms}


@dataclass(frozen=True)
class Unscored:
    slice_ref: tuple[str, int]
    scorer_id: str
    reason: str
    latency_ms: int = 0

    @property
    def scored(self) -> bool:
        return False

    def to_dict(self) -> dict:
        d = {"slice_ref": list(self.slice_ref), "scorer_id": self.scorer_id, "status": "unscored",
             "reason": self.reason}
        d.update({k: None for k in SCORE_KEYS})
        d["latency_ms"] = self.latency_ms
        return d


def result_from_dict(d: dict) -> ScoreRecord | Unscored:
    ref = (d["slice_ref"][0], int(d["slice_ref"][1]))
    if d.get("status") == "unscored":
        return Unscored(ref, d.get("scorer_id", ""), d.get("reason") or "", int(d.get("latency_ms", 0)))
    return ScoreRecord(*(float(d[k]) for k in SCORE_KEYS), ref, d.get("scorer_id", ""),
                       int(d.get("latency_ms", 0)))


def results_to_jsonl(results) -> str:
    return "".join(json.dumps(r.to_dict()) + "\n" for r in results)


def read_results(path) -> list:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(result_from_dict(json.loads(line)))
    return out


_FENCE = re.compile(r"\A```[A-Za-z0-9_-]*[ \t]*\n(.*)\n[ \t]*```\Z", re.S)


def parse_score(raw_text: str) -> dict[str, float]:
    """The four scores from a reply holding exactly one JSON object.

    Surrounding whitespace and one Markdown code fence are tolerated.
    """
    text = raw_text.strip()
    m = _FENCE.match(text)
    if m:
        text = m.group(1).strip()
    if not text:
        raise NotJson("empty reply")
    dec = json.JSONDecoder()
    try:
        obj, end = dec.raw_decode(text)
    except json.JSONDecodeError as exc:
        raise NotJson(str(exc)) from None
    rest = text[end:].strip()
    if rest:
        try:
            dec.raw_decode(rest)
        except json.JSONDecodeError:
            raise NotJson(f"trailing text {rest[:40]!r}") from None
        raise MultipleObjects("more than one JSON value")
    if isinstance(obj, list):
        if len(obj) > 1 and all(isinstance(o, dict) for o in obj):
            raise MultipleObjects(f"{len(obj)} objects in an array")
        raise NotJson("expected a JSON object")
    if not isinstance(obj, dict):
        raise NotJson("expected a JSON object")
    for k in SCORE_KEYS:
        if k not in obj:
            raise MissingKey(k)
    for k in obj:
        if k not in SCORE_KEYS:
            raise UnexpectedKey(k)
    out = {}
    for k in SCORE_KEYS:
        v = obj[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise NotNumeric(k, v)
        v = float(v)
        if not math.isfinite(v) or not 0.0 <= v <= 1.0:
            raise OutOfRange(k, v)
        out[k] = v
    return out


def serialize_score(values: dict) -> str:
    return json.dumps({k: values[k] for k in SCORE_KEYS})


@dataclass(frozen=True)
class ScorerConfig:
    endpoint_url: str | None = None
    api_key_env: str = "NPMSLICE_API_KEY"
    model: str = "local-model"
    max_in_flight: int = 4
    retries: int = 3
    request_timeout: float = 60.0
    backoff_base: float = 0.5
    temperature: float = 0.0

    def __post_init__(self):
        if self.max_in_flight < 1 or self.retries < 1:
            raise ValueError("max_in_flight and retries must be at least 1")

    @property
    def scorer_id(self) -> str:
        return f"remote:{self.model}"


def request_body(bundle: PromptBundle, config: ScorerConfig) -> dict:
    return {
        "model": config.model,
        "messages": [
            {"role": "system", "content": bundle.system_text},
            {"role": "user", "content": bundle.user_text},
        ],
        "temperature": config.temperature,
        "stream": False,
    }


def request_key(body: dict) -> str:
    canon = json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class ReplayTransport(httpx.BaseTransport):
    """Serves recorded replies keyed by the hash of the canonical request body.

    Each entry is ``{"content": str}`` (wrapped as a chat completion) or
    ``{"status": int, "json": obj}``; an optional ``latency_ms`` is echoed
    so replays report the recorded latency. A list of entries is served in
    turn, the last one repeating.
    """

    def __init__(self, fixtures: dict):
        self.fixtures = fixtures
        self.calls: dict[str, int] = {}

    @classmethod
    def from_file(cls, path) -> "ReplayTransport":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        key = request_key(json.loads(request.content))
        entry = self.fixtures.get(key)
        if entry is None:
            return httpx.Response(404, json={"error": f"no recording for {key}"})
        if isinstance(entry, list):
            i = self.calls.get(key, 0)
            self.calls[key] = i + 1
            entry = entry[min(i, len(entry) - 1)]
        headers = {}
        if "latency_ms" in entry:
            headers[LATENCY_HEADER] = str(int(entry["latency_ms"]))
        if "content" in entry:
            body = {"choices": [{"index": 0, "message": {"role": "assistant", "content": entry["content"]}}]}
            return httpx.Response(int(entry.get("status", 200)), json=body, headers=headers)
        return httpx.Response(int(entry.get("status", 200)), json=entry.get("json"), headers=headers)


def fixture_entry(bundle: PromptBundle, config: ScorerConfig, content: str,
                  latency_ms: int | None = None) -> tuple[str, dict]:
    entry: dict = {"content": content}
    if latency_ms is not None:
        entry["latency_ms"] = latency_ms
    return request_key(request_body(bundle, config)), entry


def _reply_text(resp: httpx.Response) -> str:
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise NotJson(f"malformed completion payload: {exc}") from None


def score_remote(bundle: PromptBundle, config: ScorerConfig,
                 transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep) -> ScoreRecord:
    """Ask the endpoint for a verdict, retrying transport, 5xx and parse failures.

    ``config.retries`` is the total number of attempts.
    """
    if not config.endpoint_url:
        raise ValueError("remote scoring needs endpoint_url")
    headers = {}
    key = os.environ.get(config.api_key_env)
    if key:
        headers["Authorization"] = f"Bearer {key}"
    body = request_body(bundle, config)
    last = ""
    with httpx.Client(transport=transport, timeout=config.request_timeout) as client:
        for attempt in range(1, config.retries + 1):
            t0 = time.monotonic()
            try:
                resp = client.post(config.endpoint_url, json=body, headers=headers)
            except httpx.TransportError as exc:
                last = f"transport: {exc}"
            else:
                if resp.status_code >= 500 or resp.status_code == 429:
                    last = f"http {resp.status_code}"
                elif resp.status_code >= 400:
                    raise TransportFailed(f"http {resp.status_code}")
                else:
                    try:
                        values = parse_score(_reply_text(resp))
                    except ScoreParseError as exc:
                        last = f"{type(exc).__name__}: {exc}"
                    else:
                        rec = resp.headers.get(LATENCY_HEADER)
                        latency = int(rec) if rec is not None else int((time.monotonic() - t0) * 1000)
                        return ScoreRecord(**values, slice_ref=bundle.slice_ref,
                                           scorer_id=config.scorer_id, latency_ms=latency)
            if attempt < config.retries:
                sleep(config.backoff_base * 2 ** (attempt - 1))
    raise ExhaustedRetries(config.retries, last)


def score_many_remote(bundles: list[PromptBundle], config: ScorerConfig,
                      transport: httpx.BaseTransport | None = None,
                      sleep: Callable[[float], None] = time.sleep) -> list:
    """Score bundles with at most ``max_in_flight`` concurrent requests, in input order."""

    def one(b):
        try:
            return score_remote(b, config, transport, sleep)
        except ScoringError as exc:
            return Unscored(b.slice_ref, config.scorer_id, f"{type(exc).__name__}: {exc}")

    with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
        return list(pool.map(one, bundles))


_B64 = re.compile(r"""(["'`])(?:[A-Za-z0-9+/]{24,}={0,2}|(?:0[xX])?[0-9A-Fa-f]{24,})\1""")
_HEX_ESC = re.compile(r"(?:\\x[0-9A-Fa-f]{2}){6,}")


def has_encoded_literal(text: str) -> bool:
    """A quoted base64/hex literal, or a run of \\xNN escapes, of 24+ characters."""
    return bool(_B64.search(text) or _HEX_ESC.search(text))


def _snippet_roles(text: str, catalog: ApiCatalog) -> tuple[bool, bool, bool]:
    exec_or_net = any_sink = any_source = False
    for p in catalog.patterns:
        if (p.acts_as_sink and not (exec_or_net and any_sink)) or (p.acts_as_source and not any_source):
            if not p.regex.search(text):
                continue
            if p.acts_as_source:
                any_source = True
            if p.acts_as_sink:
                any_sink = True
                if p.group in ("system_execution", "network_communication"):
                    exec_or_net = True
    return exec_or_net, any_source, any_sink


def stub_values(text: str, catalog: ApiCatalog) -> dict[str, float]:
    exec_or_net, source, sink = _snippet_roles(text, catalog)
    co = source and sink
    malware = min(1.0, 0.45 * exec_or_net + 0.35 * source + 0.20 * co)
    obf = 0.9 if has_encoded_literal(text) else 0.0
    risk = max(malware, 0.5 * obf)
    fired = exec_or_net or source or co or obf > 0
    return {
        "confidence": 0.9 if fired else 0.3,
        "obfuscated": round(obf, 6),
        "malware": round(malware, 6),
        "securityRisk": round(risk, 6),
    }


def score_stub(slice_: Slice, catalog: ApiCatalog, slice_ref: tuple[str, int] | None = None) -> ScoreRecord:
    """Deterministic rule-based verdict from the snippet text alone."""
    return ScoreRecord(**stub_values(slice_.snippet, catalog),
                       slice_ref=slice_ref or (slice_.package, 0), scorer_id=STUB_ID, latency_ms=0)
