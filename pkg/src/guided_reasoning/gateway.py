"""Chat-completion backend abstraction.

Two backends share one interface: a live client for OpenAI-compatible HTTP
servers and a scripted deterministic backend for tests and replays. Every
request/response pair is recorded to the gateway transcript so the delivered
protocol can be audited against what the models actually said.
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
import time
from dataclasses import dataclass, field, replace

import httpx

RETRY_BACKOFF_SECONDS = (0.5, 1.0, 2.0)
MAX_ATTEMPTS = 3
RETRYABLE_STATUS = {429, 500, 502, 503, 504}

_YES_TOKENS = {"yes", "y"}
_NO_TOKENS = {"no", "n"}
_RATING_RE = re.compile(r"\b(10|[0-9])\b")

RATING_REASK = (
    "Answer the previous question with a single integer between 0 and 10, "
    "where 0 means certainly not and 10 means certainly yes. "
    "Respond with the integer only."
)


class GatewayError(Exception):
    """Base class for backend failures."""


class TransportError(GatewayError):
    """Connection-level failure (or retryable status) after all retries."""


class HTTPStatusError(GatewayError):
    def __init__(self, status_code: int, detail: str = ""):
        super().__init__(f"HTTP {status_code}: {detail}" if detail else f"HTTP {status_code}")
        self.status_code = status_code


class ScriptExhausted(GatewayError):
    """The scripted backend had no entry for a request: the workflow drifted
    from what the script was built for."""


class UnparseableRating(GatewayError):
    """No 0-10 rating could be read from the model, even after the
    constrained re-ask."""


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 1024
    want_logprobs: bool = False

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[-1].role != "user":
            raise ValueError("last message must have role user")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    @property
    def text(self) -> str:
        return "\n".join(m.content for m in self.messages)


@dataclass(frozen=True)
class ChatResponse:
    content: str
    token_logprobs: tuple[tuple[str, float], ...] | None = None
    provenance: str = ""


def user_request(
    content: str,
    system: str | None = None,
    temperature: float = 0.0,
    max_tokens: int = 1024,
) -> ChatRequest:
    messages: list[ChatMessage] = []
    if system:
        messages.append(ChatMessage("system", system))
    messages.append(ChatMessage("user", content))
    return ChatRequest(tuple(messages), temperature=temperature, max_tokens=max_tokens)


def _message_dicts(req: ChatRequest) -> list[dict]:
    return [{"role": m.role, "content": m.content} for m in req.messages]


def _request_dict(req: ChatRequest) -> dict:
    return {
        "messages": _message_dicts(req),
        "temperature": req.temperature,
        "max_tokens": req.max_tokens,
        "want_logprobs": req.want_logprobs,
    }


def _response_dict(resp: ChatResponse) -> dict:
    doc: dict = {"content": resp.content, "provenance": resp.provenance}
    if resp.token_logprobs is not None:
        doc["logprobs"] = [[t, lp] for t, lp in resp.token_logprobs]
    return doc


class ChatGateway:
    """Backend-agnostic surface. Subclasses implement `_complete`; this base
    handles transcript recording and the yes-probability elicitation."""

    def __init__(self, name: str):
        self.name = name
        self._transcript: list[dict] = []
        self._lock = threading.Lock()

    def complete(self, req: ChatRequest) -> ChatResponse:
        resp = self._complete(req)
        resp = replace(resp, provenance=self.name)
        with self._lock:
            self._transcript.append(
                {"request": _request_dict(req), "response": _response_dict(resp)}
            )
        return resp

    def _complete(self, req: ChatRequest) -> ChatResponse:
        raise NotImplementedError

    @property
    def transcript(self) -> list[dict]:
        with self._lock:
            return list(self._transcript)

    def yes_probability(self, req: ChatRequest) -> float:
        """Probability of an affirmative answer to a yes/no request.

        Reads the normalized probability mass of the affirmative first token
        when the backend exposes token logprobs; otherwise falls back to a
        0-10 integer rating (re-asked once in constrained form) divided by 10.
        """
        resp = self.complete(replace(req, want_logprobs=True))
        if resp.token_logprobs:
            p = _yes_mass(resp.token_logprobs)
            if p is not None:
                return p
        rating = _parse_rating(resp.content)
        if rating is None:
            reask = ChatRequest(
                messages=req.messages
                + (
                    ChatMessage("assistant", resp.content or "(no answer)"),
                    ChatMessage("user", RATING_REASK),
                ),
                temperature=req.temperature,
                max_tokens=8,
            )
            rating = _parse_rating(self.complete(reask).content)
        if rating is None:
            raise UnparseableRating(f"no 0-10 rating in reply to: {req.messages[-1].content[:80]}")
        return rating / 10.0


def _yes_mass(token_logprobs) -> float | None:
    yes = no = 0.0
    for token, logprob in token_logprobs:
        norm = token.strip().strip('.,:;!"').lower()
        if norm in _YES_TOKENS:
            yes += math.exp(logprob)
        elif norm in _NO_TOKENS:
            no += math.exp(logprob)
    if yes + no == 0.0:
        return None
    return yes / (yes + no)


def _parse_rating(content: str) -> int | None:
    match = _RATING_RE.search(content)
    return int(match.group(1)) if match else None


class HttpChatGateway(ChatGateway):
    """OpenAI-compatible chat-completions client.

    POSTs to `{base_url}/v1/chat/completions` with bearer auth taken from the
    named environment variable. Transport failures and retryable statuses are
    retried with 0.5s/1s exponential backoff, three attempts total.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        name: str = "client",
        api_key_env: str = "GR_API_KEY_CLIENT",
        timeout: float = 60.0,
        sleeper=time.sleep,
        transport: httpx.BaseTransport | None = None,
    ):
        super().__init__(name)
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self._sleep = sleeper
        self._http = httpx.Client(timeout=timeout, transport=transport)

    def _complete(self, req: ChatRequest) -> ChatResponse:
        body: dict = {
            "model": self.model,
            "messages": _message_dicts(req),
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if req.want_logprobs:
            body["logprobs"] = True
            body["top_logprobs"] = 5
        headers = {}
        api_key = os.environ.get(self.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_error: Exception | None = None
        for attempt in range(MAX_ATTEMPTS):
            try:
                http_resp = self._http.post(
                    f"{self.base_url}/v1/chat/completions", json=body, headers=headers
                )
            except httpx.HTTPError as exc:
                last_error = exc
            else:
                if http_resp.status_code == 200:
                    return _parse_completion(http_resp.json())
                if http_resp.status_code not in RETRYABLE_STATUS:
                    raise HTTPStatusError(http_resp.status_code, http_resp.text[:200])
                last_error = HTTPStatusError(http_resp.status_code)
            if attempt < MAX_ATTEMPTS - 1:
                self._sleep(RETRY_BACKOFF_SECONDS[attempt])
        raise TransportError(f"gave up after {MAX_ATTEMPTS} attempts: {last_error}")


def _parse_completion(doc: dict) -> ChatResponse:
    try:
        choice = doc["choices"][0]
        content = choice["message"]["content"] or ""
    except (KeyError, IndexError, TypeError) as exc:
        raise GatewayError(f"malformed completion payload: {exc}")
    logprobs = None
    lp = choice.get("logprobs")
    if lp and lp.get("content"):
        first = lp["content"][0]
        alternatives = first.get("top_logprobs") or [first]
        logprobs = tuple((alt["token"], float(alt["logprob"])) for alt in alternatives)
    return ChatResponse(content=content, token_logprobs=logprobs)


@dataclass(frozen=True)
class ScriptEntry:
    """One scripted exchange. `match` is "any", {"contains": text}, or
    {"equals": [{role, content}, ...]}."""

    match: object
    response: str
    logprobs: tuple[tuple[str, float], ...] | None = None

    def matches(self, req: ChatRequest) -> bool:
        if self.match == "any" or self.match == "*":
            return True
        if isinstance(self.match, dict):
            if "contains" in self.match:
                return self.match["contains"] in req.text
            if "equals" in self.match:
                return self.match["equals"] == _message_dicts(req)
        raise ValueError(f"unknown matcher {self.match!r}")


class ScriptedGateway(ChatGateway):
    """Deterministic backend driven by an ordered script.

    Default mode consumes the first not-yet-used entry that matches the
    request. Exact-replay mode requires every request to match the next entry
    in order. Either way, a request with no entry raises ScriptExhausted.
    """

    def __init__(self, entries, name: str = "scripted", exact_replay: bool = False):
        super().__init__(name)
        self.entries = [self._coerce(e) for e in entries]
        self.exact_replay = exact_replay
        self._used = [False] * len(self.entries)
        self._cursor = 0
        self._match_lock = threading.Lock()

    @staticmethod
    def _coerce(entry) -> ScriptEntry:
        if isinstance(entry, ScriptEntry):
            return entry
        if isinstance(entry, tuple):
            match, response = entry
            return ScriptEntry(match=match, response=response)
        if isinstance(entry, dict):
            logprobs = entry.get("logprobs")
            return ScriptEntry(
                match=entry.get("match", "any"),
                response=entry["response"],
                logprobs=tuple((t, float(lp)) for t, lp in logprobs) if logprobs else None,
            )
        raise TypeError(f"cannot build script entry from {entry!r}")

    @classmethod
    def from_file(cls, path, name: str = "scripted", exact_replay: bool = False) -> "ScriptedGateway":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh), name=name, exact_replay=exact_replay)

    def _complete(self, req: ChatRequest) -> ChatResponse:
        with self._match_lock:
            if self.exact_replay:
                if self._cursor >= len(self.entries):
                    raise ScriptExhausted(
                        f"{self.name}: script over after {self._cursor} exchanges; "
                        f"extra request: {req.messages[-1].content[:120]!r}"
                    )
                entry = self.entries[self._cursor]
                if not entry.matches(req):
                    raise ScriptExhausted(
                        f"{self.name}: request {self._cursor} does not match its "
                        f"scripted entry: {req.messages[-1].content[:120]!r}"
                    )
                self._cursor += 1
                return ChatResponse(entry.response, token_logprobs=entry.logprobs)

            while self._cursor < len(self.entries) and self._used[self._cursor]:
                self._cursor += 1
            for i in range(self._cursor, len(self.entries)):
                if not self._used[i] and self.entries[i].matches(req):
                    self._used[i] = True
                    entry = self.entries[i]
                    return ChatResponse(entry.response, token_logprobs=entry.logprobs)
        raise ScriptExhausted(
            f"{self.name}: no scripted response for: {req.messages[-1].content[:120]!r}"
        )

    @property
    def remaining(self) -> int:
        if self.exact_replay:
            return len(self.entries) - self._cursor
        return sum(1 for used in self._used if not used)


def transcript_to_script(transcript: list[dict]) -> list[dict]:
    """Turn a recorded transcript into script entries that replay it: each
    request is matched exactly by its messages."""
    entries = []
    for record in transcript:
        entry: dict = {
            "match": {"equals": record["request"]["messages"]},
            "response": record["response"]["content"],
        }
        if record["response"].get("logprobs"):
            entry["logprobs"] = record["response"]["logprobs"]
        entries.append(entry)
    return entries
