"""LLM-backed reconstruction pipeline: from a raw brainstorming trace to the
central issue, a multi-root pros/cons list, and the complete relevance
network over all claims.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import prompts
from .argmap import Claim, ClaimKind, Edge, RelevanceNetwork, Valence
from .branching import build_mutual_attacks
from .gateway import ChatGateway, GatewayError, user_request

MAX_REVISION_ROUNDS = 2
_ITEM_RE = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*\[(?P<label>[^\]\n]+)\]:\s*(?P<stmt>\S.*)$")


class AnalystError(Exception):
    pass


class EmptyCompletion(AnalystError):
    """Model returned a blank issue description three times in a row."""


class MalformedItemization(AnalystError):
    """Itemized model output stayed unparseable after the repair prompt."""


class NoRootsProposed(AnalystError):
    pass


class UnassignedReasons(AnalystError):
    """Reasons left uncovered (or duplicated) after the revision rounds."""


@dataclass(frozen=True)
class ReasoningTrace:
    """The client's raw brainstorming output for one problem."""

    problem_statement: str
    trace_text: str

    def __post_init__(self) -> None:
        if not self.problem_statement.strip():
            raise ValueError("problem_statement must be non-empty")
        if not self.trace_text.strip():
            raise ValueError("trace_text must be non-empty")


@dataclass(frozen=True)
class ProsConsRoot:
    root: Claim
    pros: tuple[Claim, ...]
    cons: tuple[Claim, ...]


@dataclass(frozen=True)
class ProsConsList:
    roots: tuple[ProsConsRoot, ...]

    @property
    def reasons(self) -> tuple[Claim, ...]:
        out = []
        for entry in self.roots:
            out.extend(entry.pros)
            out.extend(entry.cons)
        return tuple(out)

    @property
    def claims(self) -> tuple[Claim, ...]:
        return self.reasons + tuple(entry.root for entry in self.roots)


@dataclass(frozen=True)
class RelevanceScore:
    valence: Valence
    weight: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight {self.weight} outside [0, 1]")


def normalized_statement(text: str) -> str:
    """Deduplication key: case-folded, whitespace-collapsed statement."""
    return " ".join(text.split()).casefold()


def build_issue(trace: ReasoningTrace, gateway: ChatGateway) -> str:
    """Describe the central issue addressed in the trace, typically a
    reformulation of the problem statement."""
    req = user_request(
        prompts.render("issue", problem=trace.problem_statement, trace=trace.trace_text)
    )
    for _ in range(3):
        content = gateway.complete(req).content.strip()
        if content:
            return content
    raise EmptyCompletion("issue description stayed blank after 3 attempts")


def _parse_items(content: str) -> list[tuple[str, str]] | None:
    """Parse '- [Label]: statement' lines; None means unparseable, [] means
    an explicit empty itemization."""
    if content.strip().upper() == "NONE":
        return []
    items = [
        (m.group("label").strip(), m.group("stmt").strip())
        for m in (_ITEM_RE.match(line) for line in content.splitlines())
        if m
    ]
    return items or None


def extract_reasons(trace: ReasoningTrace, issue: str, gateway: ChatGateway) -> list[Claim]:
    """Pull every issue-relevant reason statement from the trace, regardless
    of valence, as single-claim renderings. Duplicates (by normalized
    statement) are dropped, trace order is preserved."""
    if not issue.strip():
        raise ValueError("issue must be non-empty")
    content = gateway.complete(
        user_request(prompts.render("extract_reasons", issue=issue, trace=trace.trace_text))
    ).content
    items = _parse_items(content)
    if items is None:
        content = gateway.complete(
            user_request(prompts.render("extract_reasons_repair", previous=content))
        ).content
        items = _parse_items(content)
    if items is None:
        raise MalformedItemization(f"could not parse reasons from: {content[:200]!r}")

    reasons: list[Claim] = []
    seen: set[str] = set()
    for label, stmt in items:
        key = normalized_statement(stmt)
        if key in seen:
            continue
        seen.add(key)
        reasons.append(
            Claim(id=f"reason-{len(reasons):03d}", label=label, statement=stmt)
        )
    return reasons


def _parse_roots_json(content: str, reasons: list[Claim]) -> ProsConsList:
    """Parse the organizer's JSON reply; reason references are 1-based
    numbers into the prompt's listing. Unknown references are dropped."""
    start, end = content.find("{"), content.rfind("}")
    if start < 0 or end <= start:
        raise NoRootsProposed(f"no JSON document in reply: {content[:200]!r}")
    try:
        doc = json.loads(content[start : end + 1])
    except json.JSONDecodeError as exc:
        raise NoRootsProposed(f"unparseable organizer reply: {exc}")
    raw_roots = doc.get("roots") or []
    if not raw_roots:
        raise NoRootsProposed("organizer proposed no root claims")

    entries = []
    for i, raw in enumerate(raw_roots):
        rid = f"root-{i:02d}"
        root = Claim(
            id=rid,
            label=str(raw.get("label", "")).strip() or rid,
            statement=str(raw.get("statement", "")).strip() or rid,
            kind=ClaimKind.ROOT_CLAIM,
        )

        def pick(numbers) -> tuple[Claim, ...]:
            chosen = []
            for n in numbers or []:
                if isinstance(n, int) and 1 <= n <= len(reasons):
                    chosen.append(reasons[n - 1])
            return tuple(chosen)

        entries.append(ProsConsRoot(root=root, pros=pick(raw.get("pros")), cons=pick(raw.get("cons"))))
    return ProsConsList(roots=tuple(entries))


def _coverage_defects(pcl: ProsConsList, reasons: list[Claim]) -> list[str]:
    counts: dict[str, int] = {r.id: 0 for r in reasons}
    for claim in pcl.reasons:
        if claim.id in counts:
            counts[claim.id] += 1
    defects = []
    for r in reasons:
        if counts[r.id] == 0:
            defects.append(f"reason {r.id} ({r.label}) is not assigned to any list")
        elif counts[r.id] > 1:
            defects.append(f"reason {r.id} ({r.label}) appears {counts[r.id]} times")
    return defects


def _numbered(reasons: list[Claim]) -> str:
    return "\n".join(f"({i + 1}) [{r.label}]: {r.statement}" for i, r in enumerate(reasons))


def _render_current(pcl: ProsConsList) -> str:
    lines = []
    for entry in pcl.roots:
        lines.append(f"Root: [{entry.root.label}]: {entry.root.statement}")
        for p in entry.pros:
            lines.append(f"  pro: [{p.label}]: {p.statement}")
        for c in entry.cons:
            lines.append(f"  con: [{c.label}]: {c.statement}")
    return "\n".join(lines)


def check_and_revise(
    pcl: ProsConsList, reasons: list[Claim], gateway: ChatGateway
) -> ProsConsList:
    """Ensure every input reason is covered exactly once; defects trigger at
    most two model-side revision rounds. A clean input is returned unchanged
    without any gateway call."""
    current = pcl
    defects = _coverage_defects(current, reasons)
    rounds = 0
    while defects and rounds < MAX_REVISION_ROUNDS:
        rounds += 1
        content = gateway.complete(
            user_request(
                prompts.render(
                    "revise_pros_cons",
                    reasons=_numbered(reasons),
                    current=_render_current(current),
                    defects="; ".join(defects),
                )
            )
        ).content
        current = _parse_roots_json(content, reasons)
        defects = _coverage_defects(current, reasons)
    if defects:
        raise UnassignedReasons("; ".join(defects))
    return current


def organize_pros_cons(
    reasons: list[Claim], issue: str, gateway: ChatGateway
) -> ProsConsList:
    """Group the reasons under newly generated root claims (rival answer
    options for the issue), then run the completeness/redundancy check."""
    if not reasons:
        raise ValueError("reasons must be non-empty")
    content = gateway.complete(
        user_request(
            prompts.render("organize_pros_cons", issue=issue, reasons=_numbered(reasons))
        )
    ).content
    return check_and_revise(_parse_roots_json(content, reasons), reasons, gateway)


def score_relevance(
    a: Claim, b: Claim, gateway: ChatGateway, issue: str = ""
) -> RelevanceScore:
    """Probabilistic relevance of claim a for claim b: two yes/no probes
    (support and attack); the stronger one fixes the valence, its probability
    the weight. Ties resolve to Attack."""
    if a.kind is not ClaimKind.REASON:
        raise ValueError(f"{a.id} is not a Reason")
    if a.id == b.id:
        raise ValueError("cannot score a claim against itself")
    claim_a = f"[{a.label}]: {a.statement}"
    claim_b = f"[{b.label}]: {b.statement}"
    p_support = gateway.yes_probability(
        user_request(prompts.render("relevance_support", issue=issue, claim_a=claim_a, claim_b=claim_b))
    )
    p_attack = gateway.yes_probability(
        user_request(prompts.render("relevance_attack", issue=issue, claim_a=claim_a, claim_b=claim_b))
    )
    if p_support > p_attack:
        return RelevanceScore(Valence.SUPPORT, p_support)
    return RelevanceScore(Valence.ATTACK, p_attack)


def build_network(
    pcl: ProsConsList,
    gateway: ChatGateway,
    issue: str = "",
    parallelism: int = 1,
) -> RelevanceNetwork:
    """Score all ordered (reason, other-claim) pairs and add the mutual
    root-claim attacks, yielding the complete relevance network.

    Pair scoring is order-independent; with parallelism > 1 the probes run
    on a thread pool while assembly stays deterministic.
    """
    claims = pcl.claims
    reasons = pcl.reasons
    pairs = [
        (a, b) for a in reasons for b in claims if b.id != a.id
    ]

    def score(pair: tuple[Claim, Claim]) -> RelevanceScore:
        a, b = pair
        try:
            return score_relevance(a, b, gateway, issue=issue)
        except GatewayError as exc:
            raise GatewayError(f"scoring pair {a.id}->{b.id} failed: {exc}") from exc

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            scores = list(pool.map(score, pairs))
    else:
        scores = [score(pair) for pair in pairs]

    edges = [
        Edge(source=a.id, target=b.id, valence=s.valence, weight=s.weight)
        for (a, b), s in zip(pairs, scores)
    ]
    edges.extend(build_mutual_attacks([entry.root for entry in pcl.roots]))
    return RelevanceNetwork(claims=claims, edges=tuple(edges))
