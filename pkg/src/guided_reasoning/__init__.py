"""Guided deliberation over pros and cons: a guide agent steers a client
chat model through brainstorming, argument-map reconstruction, recursive
plausibility balancing, and protocol-grounded answering."""

from .analysts import (
    ProsConsList,
    ProsConsRoot,
    ReasoningTrace,
    RelevanceScore,
    build_issue,
    build_network,
    check_and_revise,
    extract_reasons,
    organize_pros_cons,
    score_relevance,
)
from .argmap import (
    ArgumentMap,
    Claim,
    ClaimKind,
    CycleDetected,
    Edge,
    RelevanceNetwork,
    Valence,
    map_from_json,
    map_to_json,
    topological_levels,
    validate_map,
)
from .branching import BranchingConfig, EmptyNetwork, augment, maximum_branching
from .config import AppConfig, EndpointConfig
from .evaluation import (
    Plausibility,
    PlausibilityAssessment,
    assess_with_model,
    evaluate_map,
    model_assessor,
)
from .export import render_dot, render_protocol, render_svg
from .gateway import (
    ChatGateway,
    ChatMessage,
    ChatRequest,
    ChatResponse,
    GatewayError,
    HttpChatGateway,
    ScriptedGateway,
    ScriptExhausted,
    TransportError,
    UnparseableRating,
)
from .guide import (
    GuideConfig,
    GuideSession,
    ProtocolTooLarge,
    SessionState,
    Stage,
    answer_followup,
    run_pros_cons_guide,
    run_suspension_guide,
    state_from_stages,
)
from .protocol import EventKind, ProtocolEvent, ReasoningProtocol

__all__ = [
    "AppConfig",
    "ArgumentMap",
    "BranchingConfig",
    "ChatGateway",
    "ChatMessage",
    "ChatRequest",
    "ChatResponse",
    "Claim",
    "ClaimKind",
    "CycleDetected",
    "Edge",
    "EmptyNetwork",
    "EndpointConfig",
    "EventKind",
    "GatewayError",
    "GuideConfig",
    "GuideSession",
    "HttpChatGateway",
    "Plausibility",
    "PlausibilityAssessment",
    "ProsConsList",
    "ProsConsRoot",
    "ProtocolEvent",
    "ProtocolTooLarge",
    "ReasoningProtocol",
    "ReasoningTrace",
    "RelevanceNetwork",
    "RelevanceScore",
    "ScriptExhausted",
    "ScriptedGateway",
    "SessionState",
    "Stage",
    "TransportError",
    "UnparseableRating",
    "Valence",
    "answer_followup",
    "assess_with_model",
    "augment",
    "build_issue",
    "build_network",
    "check_and_revise",
    "evaluate_map",
    "extract_reasons",
    "map_from_json",
    "map_to_json",
    "maximum_branching",
    "model_assessor",
    "organize_pros_cons",
    "render_dot",
    "render_protocol",
    "render_svg",
    "run_pros_cons_guide",
    "run_suspension_guide",
    "score_relevance",
    "state_from_stages",
    "topological_levels",
    "validate_map",
]
