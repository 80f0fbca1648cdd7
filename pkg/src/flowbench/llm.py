"""Completion providers: a live chat-completions client and record/replay.

The harness sends exactly one request per program (no follow-ups, no
refinement turns). Live calls go to any chat-completions-compatible
endpoint; recordings persist as JSON lines keyed by a digest of the exact
prompt text, so an evaluation can later run byte-for-byte reproducibly
with no network at all.

Environment:
  FLOWBENCH_API_KEY or OPENAI_API_KEY   credentials for the live provider
  FLOWBENCH_ENDPOINT                    endpoint override
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Protocol

import httpx

from .errors import CredentialError, PersistenceError, ReplayMissError, TransportError

API_KEY_ENV_VARS = ("FLOWBENCH_API_KEY", "OPENAI_API_KEY")
ENDPOINT_ENV_VAR = "FLOWBENCH_ENDPOINT"

_RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}
_AUTH_STATUS = {401, 403}


@dataclass(frozen=True)
class ModelConfig:
    model: str
    endpoint: str = "https://api.openai.com/v1"
    temperature: float = 0.0
    max_output_tokens: int | None = None
    timeout_s: float = 60.0
    max_retries: int = 3

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


@dataclass(frozen=True)
class CompletionRecord:
    program_id: str
    prompt_sha256: str
    model: str
    response: str
    latency_s: float
    attempts: int
    timestamp: float
    truncated: bool = False


@dataclass(frozen=True)
class Completion:
    text: str
    attempts: int
    truncated: bool


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class Provider(Protocol):
    def complete(self, prompt: str, cfg: ModelConfig) -> Completion: ...


def resolve_api_key(explicit: str | None = None) -> str:
    if explicit:
        return explicit
    for var in API_KEY_ENV_VARS:
        value = os.environ.get(var, "").strip()
        if value:
            return value
    raise CredentialError(
        f"no API key configured; set {API_KEY_ENV_VARS[0]} or {API_KEY_ENV_VARS[1]}"
    )


class LiveProvider:
    """Talks to a chat-completions endpoint with exponential-backoff retries.

    Authentication failures are raised immediately and never retried.
    """

    def __init__(
        self,
        api_key: str | None = None,
        transport: httpx.BaseTransport | None = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.api_key = resolve_api_key(api_key)
        self._transport = transport
        self._sleeper = sleeper

    def complete(self, prompt: str, cfg: ModelConfig) -> Completion:
        endpoint = os.environ.get(ENDPOINT_ENV_VAR, "").strip() or cfg.endpoint
        url = endpoint.rstrip("/") + "/chat/completions"
        payload: dict = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": cfg.temperature,
        }
        if cfg.max_output_tokens is not None:
            payload["max_tokens"] = cfg.max_output_tokens
        headers = {"Authorization": f"Bearer {self.api_key}"}

        last_err: Exception | None = None
        attempts = 0
        for attempt in range(cfg.max_retries + 1):
            attempts = attempt + 1
            try:
                with httpx.Client(
                    timeout=cfg.timeout_s, transport=self._transport
                ) as client:
                    resp = client.post(url, headers=headers, json=payload)
            except httpx.HTTPError as exc:
                last_err = exc
                if attempt < cfg.max_retries:
                    self._sleeper(0.5 * (2**attempt))
                continue
            if resp.status_code in _AUTH_STATUS:
                raise CredentialError(
                    f"authentication failed ({resp.status_code}): {resp.text[:200]}"
                )
            if resp.status_code in _RETRYABLE_STATUS:
                last_err = TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
                if attempt < cfg.max_retries:
                    self._sleeper(0.5 * (2**attempt))
                continue
            if resp.status_code >= 400:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                body = resp.json()
                choice = body["choices"][0]
                text = choice["message"]["content"]
                finish = choice.get("finish_reason")
            except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
                raise TransportError(f"malformed completion response: {exc}") from exc
            return Completion(
                text=text, attempts=attempts, truncated=(finish == "length")
            )
        raise TransportError(
            f"request failed after {attempts} attempt(s): {last_err}"
        )


class ReplayStore:
    """Prompt-hash keyed recordings, persisted one JSON record per line."""

    def __init__(self, records: dict[str, dict] | None = None):
        self.records = dict(records or {})

    @classmethod
    def load(cls, path: str | Path) -> "ReplayStore":
        store = cls()
        path = Path(path)
        if path.exists():
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                store.records[record["prompt_sha256"]] = record
        return store

    def put(self, prompt: str, response: str, model: str = "") -> str:
        h = prompt_hash(prompt)
        self.records[h] = {"prompt_sha256": h, "response": response, "model": model}
        return h

    def get(self, h: str) -> dict:
        if h not in self.records:
            raise ReplayMissError(f"no recording for prompt hash {h}")
        return self.records[h]

    def save(self, path: str | Path) -> None:
        path = Path(path)
        try:
            with path.open("w", encoding="utf-8") as fh:
                for h in sorted(self.records):
                    fh.write(json.dumps(self.records[h], sort_keys=True) + "\n")
        except OSError as exc:
            raise PersistenceError(f"cannot write replay store {path}: {exc}") from exc

    def append(self, path: str | Path, h: str) -> None:
        path = Path(path)
        try:
            with path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(self.records[h], sort_keys=True) + "\n")
                fh.flush()
        except OSError as exc:
            raise PersistenceError(f"cannot write replay store {path}: {exc}") from exc


class ReplayProvider:
    """Serves completions from a store; deterministic and network-free."""

    def __init__(self, store: ReplayStore):
        self.store = store

    def complete(self, prompt: str, cfg: ModelConfig) -> Completion:
        record = self.store.get(prompt_hash(prompt))
        return Completion(text=record["response"], attempts=1, truncated=False)


def complete(prompt: str, cfg: ModelConfig, provider: Provider) -> str:
    """One prompt, one request, one assistant message."""
    return provider.complete(prompt, cfg).text


def record_session(
    prompts: Iterable[tuple[str, str]],
    cfg: ModelConfig,
    store_path: str | Path,
    provider: Provider | None = None,
) -> ReplayStore:
    """Run prompts against a live provider and persist each completion as it
    lands, so an interrupted session keeps every finished entry."""
    provider = provider if provider is not None else LiveProvider()
    store = ReplayStore.load(store_path)
    for _, prompt in prompts:
        h = prompt_hash(prompt)
        if h in store.records:
            continue
        completion = provider.complete(prompt, cfg)
        store.put(prompt, completion.text, cfg.model)
        store.append(store_path, h)
    return store


def complete_many(
    items: list[tuple[str, str]],
    cfg: ModelConfig,
    provider: Provider,
    concurrency: int = 4,
    deterministic_clock: bool = False,
) -> tuple[list[CompletionRecord], list[tuple[str, Exception]]]:
    """Complete (program id, prompt) pairs with at most ``concurrency``
    requests in flight. Records come back ordered by program id; failures
    are collected per program instead of aborting the batch.
    """
    if concurrency < 1:
        raise ValueError("concurrency must be >= 1")
    records: list[CompletionRecord] = []
    failures: list[tuple[str, Exception]] = []
    lock = threading.Lock()

    def work(item: tuple[str, str]) -> None:
        program_id, prompt = item
        started = time.perf_counter()
        try:
            completion = provider.complete(prompt, cfg)
        except Exception as exc:  # collected, reported per program
            with lock:
                failures.append((program_id, exc))
            return
        latency = 0.0 if deterministic_clock else time.perf_counter() - started
        record = CompletionRecord(
            program_id=program_id,
            prompt_sha256=prompt_hash(prompt),
            model=cfg.model,
            response=completion.text,
            latency_s=latency,
            attempts=completion.attempts,
            timestamp=0.0 if deterministic_clock else time.time(),
            truncated=completion.truncated,
        )
        with lock:
            records.append(record)

    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        list(pool.map(work, items))

    records.sort(key=lambda r: r.program_id)
    failures.sort(key=lambda f: f[0])
    return records, failures
