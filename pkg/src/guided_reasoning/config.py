"""Runtime configuration: one JSON document naming the client and expert
backends plus the deliberation knobs.

Shape:
    {
      "client": {"base_url": ..., "model": ..., "temperature": 0.6},
      "expert": {"base_url": ..., "model": ...},
      "branching": {"threshold": 0.5},
      "suspension": {"n_paraphrases": 3}
    }

An endpoint may name a "script" file instead of a live server; that builds a
deterministic scripted gateway (used for tests, demos, and offline runs).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .gateway import ChatGateway, HttpChatGateway, ScriptedGateway
from .guide import GuideConfig


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str = ""
    model: str = ""
    temperature: float = 0.6
    script: str | None = None

    def build(self, name: str, api_key_env: str) -> ChatGateway:
        if self.script:
            return ScriptedGateway.from_file(self.script, name=name)
        if not self.base_url:
            raise ValueError(f"{name} endpoint needs a base_url or a script file")
        return HttpChatGateway(
            base_url=self.base_url,
            model=self.model,
            name=name,
            api_key_env=api_key_env,
        )


@dataclass(frozen=True)
class AppConfig:
    client: EndpointConfig = field(default_factory=EndpointConfig)
    expert: EndpointConfig = field(default_factory=EndpointConfig)
    branching_threshold: float = 0.5
    allow_root_root_edges: bool = False
    n_paraphrases: int = 3
    data_dir: str = "gr-sessions"

    @classmethod
    def from_dict(cls, doc: dict) -> "AppConfig":
        def endpoint(key: str) -> EndpointConfig:
            raw = doc.get(key) or {}
            return EndpointConfig(
                base_url=raw.get("base_url", ""),
                model=raw.get("model", ""),
                temperature=float(raw.get("temperature", 0.6)),
                script=raw.get("script"),
            )

        branching = doc.get("branching") or {}
        suspension = doc.get("suspension") or {}
        return cls(
            client=endpoint("client"),
            expert=endpoint("expert"),
            branching_threshold=float(branching.get("threshold", 0.5)),
            allow_root_root_edges=bool(branching.get("allow_root_root_edges", False)),
            n_paraphrases=int(suspension.get("n_paraphrases", 3)),
            data_dir=doc.get("data_dir", "gr-sessions"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "AppConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def guide_config(self) -> GuideConfig:
        return GuideConfig(
            branching_threshold=self.branching_threshold,
            allow_root_root_edges=self.allow_root_root_edges,
            n_paraphrases=self.n_paraphrases,
            temperature=self.client.temperature,
        )

    def build_gateways(self) -> tuple[ChatGateway, ChatGateway]:
        return (
            self.client.build("client", "GR_API_KEY_CLIENT"),
            self.expert.build("expert", "GR_API_KEY_EXPERT"),
        )
