"""Core argumentation types: claims, valenced weighted edges, relevance
networks, and argument maps, plus structural validation and the evaluation
ordering used by the balancing step.

All types are immutable after construction and safe to share across threads;
derived structures are built as new values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum


class ClaimKind(str, Enum):
    ROOT_CLAIM = "RootClaim"
    REASON = "Reason"


class Valence(str, Enum):
    SUPPORT = "Support"
    ATTACK = "Attack"


class CycleDetected(Exception):
    """The non-root subgraph contains a cycle (corrupted map)."""


@dataclass(frozen=True)
class Claim:
    """A single-claim rendering of one argument or answer option.

    ``label`` is a short title ("Reliability"); ``statement`` is the
    one-sentence natural-language claim itself.
    """

    id: str
    label: str
    statement: str
    kind: ClaimKind = ClaimKind.REASON

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("claim id must be non-empty")
        if not self.label or "\n" in self.label:
            raise ValueError(f"claim {self.id}: label must be non-empty, single line")
        if not self.statement:
            raise ValueError(f"claim {self.id}: statement must be non-empty")

    @property
    def is_root(self) -> bool:
        return self.kind is ClaimKind.ROOT_CLAIM


@dataclass(frozen=True)
class Edge:
    """Directed, valenced relation: the source claim bears on the target
    with probabilistic relevance ``weight`` in [0, 1]."""

    source: str
    target: str
    valence: Valence
    weight: float

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"edge {self.source}: source and target must differ")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(
                f"edge {self.source}->{self.target}: weight {self.weight} outside [0, 1]"
            )

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source, self.target)


@dataclass(frozen=True)
class RelevanceNetwork:
    """Complete weighted directed graph over reasons and root claims.

    Every reason carries exactly one edge toward every other claim; root
    claims mutually attack with weight 1.0 and have no other outgoing edges.
    """

    claims: tuple[Claim, ...]
    edges: tuple[Edge, ...]

    def claim_by_id(self, claim_id: str) -> Claim:
        for claim in self.claims:
            if claim.id == claim_id:
                return claim
        raise KeyError(claim_id)

    @property
    def roots(self) -> tuple[Claim, ...]:
        return tuple(c for c in self.claims if c.is_root)

    @property
    def reasons(self) -> tuple[Claim, ...]:
        return tuple(c for c in self.claims if not c.is_root)

    def violations(self) -> list[str]:
        """Structural invariant violations, empty when the network is legal."""
        problems = _check_claims_unique(self.claims)
        ids = {c.id for c in self.claims}
        kinds = {c.id: c.kind for c in self.claims}
        by_pair: dict[tuple[str, str], int] = {}
        for e in self.edges:
            if e.source not in ids or e.target not in ids:
                problems.append(f"edge {e.source}->{e.target} references unknown claim")
                continue
            by_pair[e.pair] = by_pair.get(e.pair, 0) + 1
            if (
                kinds[e.source] is ClaimKind.ROOT_CLAIM
                and kinds[e.target] is not ClaimKind.ROOT_CLAIM
            ):
                problems.append(f"root {e.source} has outgoing edge to non-root {e.target}")
        for pair, n in by_pair.items():
            if n > 1:
                problems.append(f"pair {pair[0]}->{pair[1]} has {n} edges")
        for reason in self.reasons:
            for other in self.claims:
                if other.id == reason.id:
                    continue
                if (reason.id, other.id) not in by_pair:
                    problems.append(f"missing edge {reason.id}->{other.id}")
        for r1 in self.roots:
            for r2 in self.roots:
                if r1.id == r2.id:
                    continue
                edge = next((e for e in self.edges if e.pair == (r1.id, r2.id)), None)
                if edge is None:
                    problems.append(f"missing root attack edge {r1.id}->{r2.id}")
                elif edge.valence is not Valence.ATTACK or edge.weight != 1.0:
                    problems.append(
                        f"root edge {r1.id}->{r2.id} must be Attack with weight 1.0"
                    )
        return problems


@dataclass(frozen=True)
class ArgumentMap:
    """Fuzzy argument map: claims, valenced weighted edges, and the subset of
    edges forming the branching skeleton (one tree target per reason)."""

    claims: tuple[Claim, ...]
    edges: tuple[Edge, ...]
    tree: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    issue: str = ""

    def claim_by_id(self, claim_id: str) -> Claim:
        for claim in self.claims:
            if claim.id == claim_id:
                return claim
        raise KeyError(claim_id)

    @property
    def roots(self) -> tuple[Claim, ...]:
        return tuple(c for c in self.claims if c.is_root)

    @property
    def reasons(self) -> tuple[Claim, ...]:
        return tuple(c for c in self.claims if not c.is_root)

    @property
    def tree_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.pair in self.tree)

    def is_tree_edge(self, edge: Edge) -> bool:
        return edge.pair in self.tree


def _check_claims_unique(claims: tuple[Claim, ...]) -> list[str]:
    problems: list[str] = []
    seen: set[str] = set()
    for c in claims:
        if c.id in seen:
            problems.append(f"duplicate claim id {c.id}")
        seen.add(c.id)
    return problems


def validate_map(argmap: ArgumentMap) -> list[str]:
    """Check every ArgumentMap invariant; violations are data, not failures.

    Returns an empty list iff the map is legal. Each violation names the
    offending node or edge.
    """
    problems = _check_claims_unique(argmap.claims)
    ids = {c.id for c in argmap.claims}
    kinds = {c.id: c.kind for c in argmap.claims}

    if not any(c.is_root for c in argmap.claims):
        problems.append("map has no RootClaim")

    pairs = set()
    for e in argmap.edges:
        if e.source not in ids or e.target not in ids:
            problems.append(f"edge {e.source}->{e.target} references unknown claim")
            continue
        if e.pair in pairs:
            problems.append(f"duplicate edge {e.source}->{e.target}")
        pairs.add(e.pair)
        if (
            kinds[e.source] is ClaimKind.ROOT_CLAIM
            and kinds[e.target] is not ClaimKind.ROOT_CLAIM
        ):
            problems.append(f"root {e.source} has outgoing edge to non-root {e.target}")

    for pair in argmap.tree:
        if pair not in pairs:
            problems.append(f"tree edge {pair[0]}->{pair[1]} not in edge set")

    tree_targets: dict[str, int] = {c.id: 0 for c in argmap.claims}
    for source, _target in argmap.tree:
        if source in tree_targets:
            tree_targets[source] += 1
    for claim in argmap.claims:
        n = tree_targets[claim.id]
        if claim.is_root and n != 0:
            problems.append(f"{claim.id} is a root but has {n} tree targets")
        if not claim.is_root and n != 1:
            problems.append(f"{claim.id} has {n} tree targets")

    # Acyclicity among non-root nodes (root-root attack 2-cycles are intentional
    # and never counted).
    try:
        _reason_levels(argmap)
    except CycleDetected as exc:
        problems.append(str(exc))

    return problems


def _reason_levels(argmap: ArgumentMap) -> list[set[str]]:
    """Kahn levels over the reason subgraph; raises CycleDetected."""
    reasons = {c.id for c in argmap.claims if not c.is_root}
    out_edges: dict[str, set[str]] = {r: set() for r in reasons}
    indegree: dict[str, int] = {r: 0 for r in reasons}
    for e in argmap.edges:
        if e.source in reasons and e.target in reasons:
            if e.target not in out_edges[e.source]:
                out_edges[e.source].add(e.target)
                indegree[e.target] += 1

    levels: list[set[str]] = []
    current = {r for r in reasons if indegree[r] == 0}
    placed = 0
    while current:
        levels.append(current)
        placed += len(current)
        nxt: set[str] = set()
        for r in current:
            for t in out_edges[r]:
                indegree[t] -= 1
                if indegree[t] == 0:
                    nxt.add(t)
        current = nxt
    if placed != len(reasons):
        stuck = sorted(r for r in reasons if indegree[r] > 0)
        raise CycleDetected(f"cycle among non-root claims: {', '.join(stuck)}")
    return levels


def topological_levels(argmap: ArgumentMap) -> list[set[str]]:
    """Evaluation order as a list of claim-id sets.

    Level 0 holds the leaves (claims with no incoming reason edges); every
    claim appears after all plausibility-relevant sources targeting it, and
    the RootClaims form the final level. Root-to-root attack edges are not
    plausibility-relevant and are ignored here.
    """
    levels = _reason_levels(argmap)
    roots = {c.id for c in argmap.claims if c.is_root}
    if roots:
        levels = levels + [roots]
    return levels


# JSON interchange format shared by the CLI, service, and UI. Field names are
# fixed: {issue, claims:[{id,label,statement,kind}],
# edges:[{source,target,valence,weight,tree}]}.


def map_to_dict(argmap: ArgumentMap) -> dict:
    return {
        "issue": argmap.issue,
        "claims": [
            {"id": c.id, "label": c.label, "statement": c.statement, "kind": c.kind.value}
            for c in argmap.claims
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "valence": e.valence.value,
                "weight": e.weight,
                "tree": argmap.is_tree_edge(e),
            }
            for e in argmap.edges
        ],
    }


def map_from_dict(doc: dict) -> ArgumentMap:
    claims = tuple(
        Claim(
            id=c["id"],
            label=c["label"],
            statement=c["statement"],
            kind=ClaimKind(c["kind"]),
        )
        for c in doc["claims"]
    )
    edges = tuple(
        Edge(
            source=e["source"],
            target=e["target"],
            valence=Valence(e["valence"]),
            weight=float(e["weight"]),
        )
        for e in doc["edges"]
    )
    tree = frozenset((e["source"], e["target"]) for e in doc["edges"] if e.get("tree"))
    return ArgumentMap(claims=claims, edges=edges, tree=tree, issue=doc.get("issue", ""))


def map_to_json(argmap: ArgumentMap) -> str:
    return json.dumps(map_to_dict(argmap), indent=2) + "\n"


def map_from_json(text: str) -> ArgumentMap:
    return map_from_dict(json.loads(text))
