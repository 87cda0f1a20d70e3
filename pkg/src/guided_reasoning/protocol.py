"""Reasoning protocol: the ordered, renderable record of one deliberation.

The protocol is what makes the client's later explanations faithful by
construction: it is handed back in-context, so follow-up answers can only be
grounded in what actually happened.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum


class EventKind(str, Enum):
    BRAINSTORM = "Brainstorm"
    LEAF_ASSESSMENT = "LeafAssessment"
    CONDITIONAL_ASSESSMENT = "ConditionalAssessment"
    CENTRAL_VERDICT = "CentralVerdict"
    PRUNED = "Pruned"
    ANSWER_DRAFT = "AnswerDraft"
    FAILURE = "Failure"


@dataclass(frozen=True)
class ProtocolEvent:
    kind: EventKind
    payload: dict
    timestamp: float = field(default_factory=time.time)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "payload": self.payload, "timestamp": self.timestamp}

    @classmethod
    def from_dict(cls, doc: dict) -> "ProtocolEvent":
        return cls(
            kind=EventKind(doc["kind"]),
            payload=doc["payload"],
            timestamp=doc.get("timestamp", 0.0),
        )


@dataclass
class ReasoningProtocol:
    events: list[ProtocolEvent] = field(default_factory=list)

    def add(self, kind: EventKind, **payload) -> ProtocolEvent:
        event = ProtocolEvent(kind=kind, payload=payload)
        self.events.append(event)
        return event

    def of_kind(self, kind: EventKind) -> list[ProtocolEvent]:
        return [e for e in self.events if e.kind is kind]

    def to_dicts(self) -> list[dict]:
        return [e.to_dict() for e in self.events]

    @classmethod
    def from_dicts(cls, docs: list[dict]) -> "ReasoningProtocol":
        return cls(events=[ProtocolEvent.from_dict(d) for d in docs])
