"""Recursive argument-wise plausibility evaluation over an argument map.

Leaves are assessed unconditionally; every other claim is assessed against
exactly those of its incoming reasons that were previously judged plausible,
split into pros and cons by edge valence. Implausible claims are pruned from
all later balancing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Callable

from . import prompts
from .argmap import ArgumentMap, Claim, topological_levels, validate_map
from .gateway import ChatGateway, user_request


class Plausibility(IntEnum):
    VERY_IMPLAUSIBLE = 0
    RATHER_IMPLAUSIBLE = 1
    RATHER_PLAUSIBLE = 2
    VERY_PLAUSIBLE = 3

    @property
    def is_plausible(self) -> bool:
        return self >= Plausibility.RATHER_PLAUSIBLE

    @property
    def text(self) -> str:
        return self.name.replace("_", " ").lower()

    @classmethod
    def from_text(cls, text: str) -> "Plausibility":
        key = " ".join(text.split()).lower()
        for verdict in cls:
            if verdict.text == key:
                return verdict
        raise ValueError(f"unknown plausibility label {text!r}")


# Order matters: "very implausible" must be probed before "very plausible"
# etc. is irrelevant since the phrases don't contain each other, but bare
# "plausible"/"implausible" are deliberately not accepted.
_VERDICT_PHRASES = [(v.text, v) for v in Plausibility]


@dataclass(frozen=True)
class PlausibilityAssessment:
    """Verdict for one claim plus the evidence actually balanced for it."""

    claim: str
    verdict: Plausibility
    considered_pros: tuple[str, ...] = ()
    considered_cons: tuple[str, ...] = ()
    conditional: bool = False


Assessor = Callable[[Claim, list[Claim], list[Claim]], Plausibility]


def evaluate_map(argmap: ArgumentMap, assessor: Assessor) -> list[PlausibilityAssessment]:
    """Assess every claim once, leaves first, root claims last.

    ``assessor(claim, pros, cons)`` supplies the verdict; pros/cons are the
    claim's previously-plausible incoming reasons, ordered by claim id.
    Root-to-root attacks never feed into an assessment.
    """
    problems = validate_map(argmap)
    if problems:
        raise ValueError(f"invalid map: {problems[0]}")
    levels = topological_levels(argmap)

    claims = {c.id: c for c in argmap.claims}
    reason_ids = {c.id for c in argmap.claims if not c.is_root}
    incoming: dict[str, list] = {c.id: [] for c in argmap.claims}
    for e in argmap.edges:
        if e.source in reason_ids:
            incoming[e.target].append(e)

    verdicts: dict[str, Plausibility] = {}
    out: list[PlausibilityAssessment] = []
    for level in levels:
        for cid in sorted(level):
            claim = claims[cid]
            in_edges = sorted(incoming[cid], key=lambda e: e.source)
            pros = [
                claims[e.source]
                for e in in_edges
                if e.valence.value == "Support" and verdicts[e.source].is_plausible
            ]
            cons = [
                claims[e.source]
                for e in in_edges
                if e.valence.value == "Attack" and verdicts[e.source].is_plausible
            ]
            verdict = assessor(claim, pros, cons)
            verdicts[cid] = verdict
            out.append(
                PlausibilityAssessment(
                    claim=cid,
                    verdict=verdict,
                    considered_pros=tuple(p.id for p in pros),
                    considered_cons=tuple(c.id for c in cons),
                    conditional=bool(in_edges),
                )
            )
    return out


def parse_verdict(content: str) -> Plausibility | None:
    """Find exactly one of the four verdict phrases in a completion."""
    lowered = " ".join(content.split()).lower()
    found = {verdict for phrase, verdict in _VERDICT_PHRASES if phrase in lowered}
    if len(found) == 1:
        return found.pop()
    return None


def assess_with_model(
    claim: Claim,
    pros: list[Claim],
    cons: list[Claim],
    gateway: ChatGateway,
    problem: str = "",
    temperature: float = 0.0,
) -> Plausibility:
    """Elicit a verdict from the model; one constrained re-ask on parse
    failure, then the fail-conservative default (rather implausible)."""

    def listing(group: list[Claim]) -> str:
        return "\n".join(f"[{c.label}]: {c.statement}" for c in group) or "None."

    if pros or cons:
        prompt = prompts.render(
            "assess_conditional",
            label=claim.label,
            statement=claim.statement,
            pros=listing(pros),
            cons=listing(cons),
        )
    else:
        prompt = prompts.render(
            "assess_unconditional",
            label=claim.label,
            statement=claim.statement,
            problem=problem,
        )
    req = user_request(prompt, temperature=temperature)
    resp = gateway.complete(req)
    verdict = parse_verdict(resp.content)
    if verdict is None:
        from .gateway import ChatMessage, ChatRequest

        reask = ChatRequest(
            messages=req.messages
            + (
                ChatMessage("assistant", resp.content or "(no answer)"),
                ChatMessage("user", prompts.render("assess_reask")),
            ),
            temperature=temperature,
        )
        verdict = parse_verdict(gateway.complete(reask).content)
    return verdict if verdict is not None else Plausibility.RATHER_IMPLAUSIBLE


def model_assessor(
    gateway: ChatGateway, problem: str = "", temperature: float = 0.0
) -> Assessor:
    """Bind gateway and problem context into an evaluate_map assessor."""

    def assess(claim: Claim, pros: list[Claim], cons: list[Claim]) -> Plausibility:
        return assess_with_model(
            claim, pros, cons, gateway, problem=problem, temperature=temperature
        )

    return assess
