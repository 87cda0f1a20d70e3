"""Shared builders and independent oracles used across the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from guided_reasoning.argmap import (
    ArgumentMap,
    Claim,
    ClaimKind,
    Edge,
    RelevanceNetwork,
    Valence,
)
from guided_reasoning.branching import build_mutual_attacks


def root(cid: str, label: str | None = None, statement: str | None = None) -> Claim:
    return Claim(
        id=cid,
        label=label or cid.upper(),
        statement=statement or f"Root claim {cid}.",
        kind=ClaimKind.ROOT_CLAIM,
    )


def reason(cid: str, label: str | None = None, statement: str | None = None) -> Claim:
    return Claim(
        id=cid,
        label=label or cid.upper(),
        statement=statement or f"Reason {cid}.",
        kind=ClaimKind.REASON,
    )


def make_network(
    roots: list[Claim],
    reasons: list[Claim],
    weights: dict[tuple[str, str], float],
    valences: dict[tuple[str, str], Valence] | None = None,
) -> RelevanceNetwork:
    """Complete network from a weight table; missing pairs default to 0.0."""
    valences = valences or {}
    claims = tuple(reasons) + tuple(roots)
    edges = []
    for r in reasons:
        for other in claims:
            if other.id == r.id:
                continue
            pair = (r.id, other.id)
            edges.append(
                Edge(
                    source=r.id,
                    target=other.id,
                    valence=valences.get(pair, Valence.SUPPORT),
                    weight=weights.get(pair, 0.0),
                )
            )
    edges.extend(build_mutual_attacks(roots))
    return RelevanceNetwork(claims=claims, edges=edges and tuple(edges) or ())


def random_network(
    rng: random.Random,
    n_reasons: int | None = None,
    n_roots: int | None = None,
    dyadic: bool = True,
) -> RelevanceNetwork:
    """Random complete network. Dyadic weights (k/64) make float sums exact,
    so optimum comparisons against the oracle are exact too."""
    n_reasons = rng.randint(1, 5) if n_reasons is None else n_reasons
    n_roots = rng.randint(1, 2) if n_roots is None else n_roots
    roots = [root(f"t{i}") for i in range(n_roots)]
    reasons = [reason(f"s{i}") for i in range(n_reasons)]
    weights: dict[tuple[str, str], float] = {}
    valences: dict[tuple[str, str], Valence] = {}
    claims = reasons + roots
    for r in reasons:
        for other in claims:
            if other.id == r.id:
                continue
            w = rng.randint(0, 64) / 64.0 if dyadic else rng.random()
            weights[(r.id, other.id)] = w
            valences[(r.id, other.id)] = rng.choice([Valence.SUPPORT, Valence.ATTACK])
    return make_network(roots, reasons, weights, valences)


def enumerate_branchings(network: RelevanceNetwork):
    """Yield every feasible target assignment as a tuple of edges: one
    outgoing edge per reason, acyclic. Exhaustive; oracle only."""
    reasons = [c.id for c in network.reasons]
    index = {cid: i for i, cid in enumerate(reasons)}
    per_reason: list[list[Edge]] = [
        [e for e in network.edges if e.source == cid] for cid in reasons
    ]
    for combo in itertools.product(*per_reason):
        parent = [index.get(e.target, -1) for e in combo]
        ok = True
        for start in range(len(reasons)):
            seen = set()
            v = start
            while v != -1:
                if v in seen:
                    ok = False
                    break
                seen.add(v)
                v = parent[v]
            if not ok:
                break
        if ok:
            yield combo


def brute_force_optimum(network: RelevanceNetwork) -> tuple[Fraction, list[tuple[Edge, ...]]]:
    """Exact maximum total weight over all feasible assignments, plus every
    assignment attaining it (Fraction arithmetic, no float-order effects)."""
    best = Fraction(-1)
    argmax: list[tuple[Edge, ...]] = []
    for combo in enumerate_branchings(network):
        total = sum((Fraction(e.weight) for e in combo), Fraction(0))
        if total > best:
            best = total
            argmax = [combo]
        elif total == best:
            argmax.append(combo)
    return best, argmax


def exact_total(edges) -> Fraction:
    return sum((Fraction(e.weight) for e in edges), Fraction(0))


def fig3_map() -> ArgumentMap:
    """Seven-claim abstract map: one root A; B, C, D bear on A; E supports C;
    F attacks and G supports D."""
    claims = (
        reason("B"),
        reason("C"),
        reason("D"),
        reason("E"),
        reason("F"),
        reason("G"),
        root("A"),
    )
    edges = (
        Edge("B", "A", Valence.SUPPORT, 0.8),
        Edge("C", "A", Valence.ATTACK, 0.9),
        Edge("D", "A", Valence.SUPPORT, 0.7),
        Edge("E", "C", Valence.SUPPORT, 0.8),
        Edge("F", "D", Valence.ATTACK, 0.9),
        Edge("G", "D", Valence.SUPPORT, 0.6),
    )
    tree = frozenset(e.pair for e in edges)
    return ArgumentMap(claims=claims, edges=edges, tree=tree, issue="Is A the case?")
