"""Guide-side orchestration.

Two guides are provided: the default pros/cons balancing guide (brainstorm,
argument-map reconstruction, recursive evaluation, grounded answer draft) and
a minimal self-consistency suspension guide. The guide never answers the
user's problem itself; every natural-language answer originates from a
client-gateway completion.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import prompts
from .analysts import (
    ReasoningTrace,
    build_issue,
    build_network,
    extract_reasons,
    organize_pros_cons,
)
from .argmap import ArgumentMap, Claim, map_to_dict
from .branching import BranchingConfig, augment, maximum_branching
from .evaluation import PlausibilityAssessment, evaluate_map, model_assessor
from .export import render_protocol
from .gateway import ChatGateway, ChatMessage, ChatRequest, user_request
from .protocol import EventKind, ReasoningProtocol


class ProtocolTooLarge(Exception):
    """Protocol exceeds the follow-up context budget even after truncation."""


class SessionState(str, Enum):
    RECEIVED = "Received"
    BRAINSTORMED = "Brainstormed"
    MAPPED = "Mapped"
    EVALUATED = "Evaluated"
    DRAFTED = "Drafted"
    DELIVERED = "Delivered"
    FAILED = "Failed"


class Stage(str, Enum):
    BRAINSTORM = "Brainstorm"
    ISSUE = "Issue"
    PROS_CONS = "ProsCons"
    RELEVANCE = "Relevance"
    MAPPING = "Mapping"
    EVALUATION = "Evaluation"
    DRAFT = "Draft"
    DELIVERED = "Delivered"
    FAILED = "Failed"


_NEXT_STATES: dict[SessionState, set[SessionState]] = {
    SessionState.RECEIVED: {SessionState.BRAINSTORMED},
    # The suspension guide has no mapping step and goes straight to Evaluated.
    SessionState.BRAINSTORMED: {SessionState.MAPPED, SessionState.EVALUATED},
    SessionState.MAPPED: {SessionState.EVALUATED},
    SessionState.EVALUATED: {SessionState.DRAFTED},
    SessionState.DRAFTED: {SessionState.DELIVERED},
    SessionState.DELIVERED: set(),
    SessionState.FAILED: set(),
}


@dataclass(frozen=True)
class GuideConfig:
    """Runtime configuration for a guide run.

    Temperature applies to client sampling; the branching threshold and the
    root-edge flag shape the argument map; n_paraphrases drives the
    suspension guide.
    """

    branching_threshold: float = 0.5
    allow_root_root_edges: bool = False
    n_paraphrases: int = 3
    temperature: float = 0.6
    scoring_parallelism: int = 1
    protocol_context_budget: int = 24000
    # When the guide engages: on every query, on an explicit user request, or
    # via a client tool call. The library always runs when invoked; callers
    # consult this flag.
    trigger: str = "auto"


@dataclass(frozen=True)
class FailureInfo:
    stage: Stage
    cause: str
    last_completed: Stage | None


@dataclass
class GuideSession:
    """One user query moving through the deliberation state machine."""

    problem_statement: str
    guide: str = "pros_cons"
    id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    state: SessionState = SessionState.RECEIVED
    protocol: ReasoningProtocol = field(default_factory=ReasoningProtocol)
    map: ArgumentMap | None = None
    answer: str | None = None
    assessments: list[PlausibilityAssessment] = field(default_factory=list)
    failure: FailureInfo | None = None

    def advance(self, new_state: SessionState) -> None:
        if new_state not in _NEXT_STATES[self.state]:
            raise ValueError(f"illegal transition {self.state.value} -> {new_state.value}")
        self.state = new_state

    def fail(self, stage: Stage, cause: str, last_completed: Stage | None) -> None:
        self.failure = FailureInfo(stage=stage, cause=cause, last_completed=last_completed)
        self.state = SessionState.FAILED
        self.protocol.add(
            EventKind.FAILURE,
            stage=stage.value,
            cause=cause,
            last_completed=last_completed.value if last_completed else None,
        )

    @property
    def terminal(self) -> bool:
        return self.state in (SessionState.DELIVERED, SessionState.FAILED)


OnStage = Callable[[Stage, dict], None]

# State reached once a stage has been emitted; replaying an event log through
# this mapping reconstructs the session's final state.
_STAGE_REACHES = {
    Stage.BRAINSTORM: SessionState.BRAINSTORMED,
    Stage.ISSUE: SessionState.BRAINSTORMED,
    Stage.PROS_CONS: SessionState.BRAINSTORMED,
    Stage.RELEVANCE: SessionState.BRAINSTORMED,
    Stage.MAPPING: SessionState.MAPPED,
    Stage.EVALUATION: SessionState.EVALUATED,
    Stage.DRAFT: SessionState.DRAFTED,
    Stage.DELIVERED: SessionState.DELIVERED,
    Stage.FAILED: SessionState.FAILED,
}


def state_from_stages(stages: list[Stage]) -> SessionState:
    """Session state implied by an ordered stage-event log."""
    if not stages:
        return SessionState.RECEIVED
    return _STAGE_REACHES[stages[-1]]


def _claim_payload(claim: Claim) -> dict:
    return {"label": claim.label, "statement": claim.statement}


def _record_assessments(
    session: GuideSession, argmap: ArgumentMap, assessments: list[PlausibilityAssessment]
) -> None:
    claims = {c.id: c for c in argmap.claims}
    for a in assessments:
        claim = claims[a.claim]
        payload = {
            "claim": a.claim,
            "label": claim.label,
            "statement": claim.statement,
            "verdict": a.verdict.text,
        }
        if a.conditional:
            payload["pros"] = [_claim_payload(claims[cid]) for cid in a.considered_pros]
            payload["cons"] = [_claim_payload(claims[cid]) for cid in a.considered_cons]
            session.protocol.add(EventKind.CONDITIONAL_ASSESSMENT, **payload)
        else:
            session.protocol.add(EventKind.LEAF_ASSESSMENT, **payload)
        if not a.verdict.is_plausible:
            session.protocol.add(
                EventKind.PRUNED,
                claim=a.claim,
                label=claim.label,
                statement=claim.statement,
            )
        if claim.is_root:
            session.protocol.add(
                EventKind.CENTRAL_VERDICT,
                claim=a.claim,
                label=claim.label,
                statement=claim.statement,
                verdict=a.verdict.text,
            )


def run_pros_cons_guide(
    problem: str,
    client_gateway: ChatGateway,
    expert_gateway: ChatGateway,
    cfg: GuideConfig | None = None,
    on_stage: OnStage | None = None,
    session_id: str | None = None,
) -> GuideSession:
    """Run the full pros/cons deliberation for one problem.

    Any stage error leaves the session Failed with the stage and cause
    recorded in the protocol; the session is always returned.
    """
    if not problem.strip():
        raise ValueError("problem must be non-empty")
    cfg = cfg or GuideConfig()
    session = GuideSession(problem_statement=problem, guide="pros_cons")
    if session_id:
        session.id = session_id

    last_completed: Stage | None = None
    current_stage = Stage.BRAINSTORM

    def emit(stage: Stage, payload: dict) -> None:
        nonlocal last_completed
        last_completed = stage
        if on_stage:
            on_stage(stage, payload)

    try:
        trace_text = client_gateway.complete(
            user_request(
                prompts.render("brainstorm", problem=problem),
                temperature=cfg.temperature,
            )
        ).content
        trace = ReasoningTrace(problem_statement=problem, trace_text=trace_text)
        session.protocol.add(EventKind.BRAINSTORM, text=trace_text)
        session.advance(SessionState.BRAINSTORMED)
        emit(Stage.BRAINSTORM, {"chars": len(trace_text)})

        current_stage = Stage.ISSUE
        issue = build_issue(trace, expert_gateway)
        emit(Stage.ISSUE, {"issue": issue})

        current_stage = Stage.PROS_CONS
        reasons = extract_reasons(trace, issue, expert_gateway)
        pros_cons = organize_pros_cons(reasons, issue, expert_gateway)
        emit(
            Stage.PROS_CONS,
            {
                "roots": [entry.root.statement for entry in pros_cons.roots],
                "reasons": len(reasons),
            },
        )

        current_stage = Stage.RELEVANCE
        network = build_network(
            pros_cons, expert_gateway, issue=issue, parallelism=cfg.scoring_parallelism
        )
        emit(Stage.RELEVANCE, {"edges": len(network.edges)})

        current_stage = Stage.MAPPING
        tree = maximum_branching(network)
        session.map = augment(
            network,
            tree,
            BranchingConfig(
                threshold=cfg.branching_threshold,
                allow_root_root_edges=cfg.allow_root_root_edges,
            ),
            issue=issue,
        )
        session.advance(SessionState.MAPPED)
        emit(Stage.MAPPING, {"map": map_to_dict(session.map)})

        current_stage = Stage.EVALUATION
        assessor = model_assessor(client_gateway, problem=problem, temperature=cfg.temperature)
        session.assessments = evaluate_map(session.map, assessor)
        _record_assessments(session, session.map, session.assessments)
        session.advance(SessionState.EVALUATED)
        emit(Stage.EVALUATION, {"assessed": len(session.assessments)})

        current_stage = Stage.DRAFT
        verdict_text = render_protocol(
            ReasoningProtocol(
                [e for e in session.protocol.events if e.kind is not EventKind.BRAINSTORM]
            )
        )
        session.answer = client_gateway.complete(
            user_request(
                prompts.render("draft_answer", problem=problem, verdicts=verdict_text),
                temperature=cfg.temperature,
            )
        ).content
        session.protocol.add(EventKind.ANSWER_DRAFT, text=session.answer)
        session.advance(SessionState.DRAFTED)
        emit(Stage.DRAFT, {"answer": session.answer})

        session.advance(SessionState.DELIVERED)
        emit(Stage.DELIVERED, {"answer": session.answer})
    except Exception as exc:
        session.fail(current_stage, str(exc), last_completed)
        if on_stage:
            on_stage(Stage.FAILED, {"stage": current_stage.value, "cause": str(exc)})
    return session


def _final_answer(solution: str) -> str:
    for line in reversed(solution.splitlines()):
        if line.strip().upper().startswith("ANSWER:"):
            return line.strip()[len("ANSWER:"):].strip()
    return solution.strip()


def _parse_paraphrases(content: str, n: int) -> list[str]:
    items = [
        line.strip().lstrip("-*").strip()
        for line in content.splitlines()
        if line.strip().startswith(("-", "*"))
    ]
    items = [item for item in items if item]
    if len(items) < n:
        raise ValueError(f"expected {n} paraphrases, parsed {len(items)}")
    return items[:n]


def run_suspension_guide(
    problem: str,
    client_gateway: ChatGateway,
    expert_gateway: ChatGateway,
    n_paraphrases: int = 3,
    cfg: GuideConfig | None = None,
    on_stage: OnStage | None = None,
) -> GuideSession:
    """Self-consistency guide: the client solves several equivalent problem
    formulations; divergent answers lead to a suspension reply, with every
    formulation and solution recorded in the protocol."""
    if not problem.strip():
        raise ValueError("problem must be non-empty")
    if n_paraphrases < 2:
        raise ValueError("n_paraphrases must be >= 2")
    cfg = cfg or GuideConfig()
    session = GuideSession(problem_statement=problem, guide="suspension")

    last_completed: Stage | None = None
    current_stage = Stage.BRAINSTORM

    def emit(stage: Stage, payload: dict) -> None:
        nonlocal last_completed
        last_completed = stage
        if on_stage:
            on_stage(stage, payload)

    try:
        content = expert_gateway.complete(
            user_request(prompts.render("paraphrase", problem=problem, n=n_paraphrases))
        ).content
        formulations = _parse_paraphrases(content, n_paraphrases)

        solutions: list[str] = []
        answers: list[str] = []
        for i, formulation in enumerate(formulations):
            solution = client_gateway.complete(
                user_request(
                    prompts.render("solve", problem=formulation),
                    temperature=cfg.temperature,
                )
            ).content
            answer = _final_answer(solution)
            solutions.append(solution)
            answers.append(answer)
            session.protocol.add(
                EventKind.BRAINSTORM,
                text=(
                    f"Formulation {i + 1}: {formulation}\n"
                    f"Solution {i + 1}:\n{solution}\n"
                    f"Answer {i + 1}: {answer}"
                ),
                formulation=formulation,
                answer=answer,
            )
        session.advance(SessionState.BRAINSTORMED)
        emit(Stage.BRAINSTORM, {"formulations": formulations})

        current_stage = Stage.EVALUATION
        disagreement: tuple[int, int] | None = None
        for i in range(len(answers)):
            for j in range(i + 1, len(answers)):
                verdict = expert_gateway.complete(
                    user_request(
                        prompts.render(
                            "equivalence",
                            problem=problem,
                            answer_a=answers[i],
                            answer_b=answers[j],
                        )
                    )
                ).content
                if not verdict.strip().lower().startswith("yes"):
                    disagreement = (i, j)
                    break
            if disagreement:
                break
        consistent = disagreement is None
        if consistent:
            finding = (
                f"All {len(answers)} equivalent formulations of the problem "
                f"received consistent answers."
            )
        else:
            i, j = disagreement
            finding = (
                f"Formulation {i + 1} and formulation {j + 1} of the problem "
                f"received inconsistent answers: {answers[i]!r} vs {answers[j]!r}. "
                f"The problem was not reliably understood."
            )
        session.protocol.add(EventKind.CENTRAL_VERDICT, text=finding, consistent=consistent)
        session.advance(SessionState.EVALUATED)
        emit(Stage.EVALUATION, {"consistent": consistent})

        current_stage = Stage.DRAFT
        if consistent:
            session.answer = answers[0]
        else:
            session.answer = client_gateway.complete(
                user_request(
                    prompts.render("suspend", problem=problem),
                    temperature=cfg.temperature,
                )
            ).content
        session.protocol.add(EventKind.ANSWER_DRAFT, text=session.answer)
        session.advance(SessionState.DRAFTED)
        emit(Stage.DRAFT, {"answer": session.answer})

        session.advance(SessionState.DELIVERED)
        emit(Stage.DELIVERED, {"answer": session.answer})
    except Exception as exc:
        session.fail(current_stage, str(exc), last_completed)
        if on_stage:
            on_stage(Stage.FAILED, {"stage": current_stage.value, "cause": str(exc)})
    return session


def _truncate_protocol(protocol: ReasoningProtocol, question: str, budget: int) -> str:
    """Keep central verdicts plus events mentioning claims named in the
    question; used when the full rendering exceeds the context budget."""
    lowered = question.lower()

    def mentioned(payload: dict) -> bool:
        for key in ("label", "statement"):
            value = payload.get(key, "")
            if value and value.lower() in lowered:
                return True
        for group in ("pros", "cons"):
            for item in payload.get(group, []):
                if item["label"].lower() in lowered or item["statement"].lower() in lowered:
                    return True
        return False

    kept = [
        e
        for e in protocol.events
        if e.kind is EventKind.CENTRAL_VERDICT or mentioned(e.payload)
    ]
    return render_protocol(ReasoningProtocol(kept))


def answer_followup(
    session: GuideSession,
    question: str,
    client_gateway: ChatGateway,
    cfg: GuideConfig | None = None,
) -> str:
    """Answer a follow-up question with the reasoning protocol as the only
    deliberation evidence, injected in-context."""
    cfg = cfg or GuideConfig()
    if not session.terminal:
        raise ValueError(f"session is {session.state.value}; follow-ups need a finished run")
    if not session.protocol.events:
        raise ValueError("session has no protocol to ground the follow-up")

    protocol_text = render_protocol(session.protocol)
    if len(protocol_text) > cfg.protocol_context_budget:
        protocol_text = _truncate_protocol(session.protocol, question, cfg.protocol_context_budget)
        if len(protocol_text) > cfg.protocol_context_budget:
            raise ProtocolTooLarge(
                f"protocol is {len(protocol_text)} chars even after truncation"
            )
    req = ChatRequest(
        messages=(
            ChatMessage(
                "system",
                prompts.render(
                    "followup_context",
                    problem=session.problem_statement,
                    protocol=protocol_text,
                ),
            ),
            ChatMessage("user", question),
        ),
        temperature=cfg.temperature,
    )
    return client_gateway.complete(req).content
