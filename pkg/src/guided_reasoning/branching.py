"""Extract the maximum-weight branching skeleton from a relevance network and
augment it with above-threshold edges into a fuzzy argument map.

The skeleton assigns every reason exactly one target so that following
targets always ends at a root claim. On the reversed graph this is a maximum
spanning arborescence rooted at a virtual node above the roots, solved with
the Chu-Liu/Edmonds contraction algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

from .argmap import ArgumentMap, Claim, ClaimKind, Edge, RelevanceNetwork, Valence


class EmptyNetwork(Exception):
    """Branching requested on a network without claims."""


@dataclass(frozen=True)
class BranchingConfig:
    """Map-construction knobs: minimum weight for augmentation edges and
    whether the mutual root attacks appear in the rendered map."""

    threshold: float = 0.5
    allow_root_root_edges: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")


# Arc in the reversed graph: parent -> child, carrying the original edge key
# (source id, target id) used for tie-breaking and for mapping the solution
# back onto network edges. Nodes are small integers; 0 is the virtual root
# above the root claims, and contraction mints fresh integers.
@dataclass(frozen=True)
class _Arc:
    src: int
    dst: int
    weight: float
    key: tuple[str, str]


_VROOT = 0


def maximum_branching(network: RelevanceNetwork) -> set[Edge]:
    """Maximum-weight edge set giving every reason exactly one target.

    Root claims keep out-degree zero (their mutual attacks are never
    selected), the result is acyclic, and total weight is maximal among all
    feasible target assignments. Equal-weight alternatives resolve toward the
    lexicographically smaller (source, target) pair.
    """
    if not network.claims:
        raise EmptyNetwork("network has no claims")
    roots = network.roots
    reasons = network.reasons
    if not roots:
        raise ValueError("network has no RootClaim")
    if not reasons:
        return set()

    node_of = {c.id: i + 1 for i, c in enumerate(network.claims)}
    reason_ids = {c.id for c in reasons}
    by_pair: dict[tuple[str, str], Edge] = {}
    arcs: list[_Arc] = []
    for e in network.edges:
        if e.source in reason_ids:
            by_pair[e.pair] = e
            # Reversed: the chosen target becomes the reason's parent.
            arcs.append(_Arc(node_of[e.target], node_of[e.source], e.weight, e.pair))
    for r in roots:
        arcs.append(_Arc(_VROOT, node_of[r.id], 0.0, ("", r.id)))

    nodes = [_VROOT] + sorted(node_of.values())
    chosen = _max_arborescence(nodes, _VROOT, arcs)
    return {by_pair[a.key] for a in chosen if a.key[0]}


def _best_incoming(nodes: list[int], root: int, arcs: list[_Arc]) -> dict[int, _Arc]:
    best: dict[int, _Arc] = {}
    for arc in arcs:
        if arc.dst == root:
            continue
        cur = best.get(arc.dst)
        if cur is None or arc.weight > cur.weight or (arc.weight == cur.weight and arc.key < cur.key):
            best[arc.dst] = arc
    for v in nodes:
        if v != root and v not in best:
            raise ValueError(f"no incoming edge for node {v}: network is not complete")
    return best


def _find_cycle(best: dict[int, _Arc], root: int) -> list[int] | None:
    visited: set[int] = {root}
    for start in best:
        if start in visited:
            continue
        path: list[int] = []
        on_path: set[int] = set()
        v = start
        while v not in visited and v not in on_path and v in best:
            path.append(v)
            on_path.add(v)
            v = best[v].src
        if v in on_path:
            return path[path.index(v):]
        visited.update(on_path)
    return None


def _max_arborescence(nodes: list[int], root: int, arcs: list[_Arc]) -> list[_Arc]:
    """Chu-Liu/Edmonds, maximum variant, recursive contraction."""
    best = _best_incoming(nodes, root, arcs)
    cycle = _find_cycle(best, root)
    if cycle is None:
        return list(best.values())

    cycle_set = set(cycle)
    super_node = max(nodes) + 1
    new_nodes = [v for v in nodes if v not in cycle_set] + [super_node]

    # Adjusted weights: entering the cycle at v displaces the cycle arc into v.
    new_arcs: list[_Arc] = []
    entering: dict[tuple[str, str], tuple[_Arc, _Arc]] = {}
    for arc in arcs:
        src_in, dst_in = arc.src in cycle_set, arc.dst in cycle_set
        if src_in and dst_in:
            continue
        if dst_in:
            displaced = best[arc.dst]
            rewired = _Arc(arc.src, super_node, arc.weight - displaced.weight, arc.key)
            new_arcs.append(rewired)
            entering[rewired.key] = (arc, displaced)
        elif src_in:
            new_arcs.append(_Arc(super_node, arc.dst, arc.weight, arc.key))
        else:
            new_arcs.append(arc)

    solution = _max_arborescence(new_nodes, root, new_arcs)

    expanded: list[_Arc] = []
    displaced_arc: _Arc | None = None
    for arc in solution:
        if arc.dst == super_node:
            original, displaced = entering[arc.key]
            expanded.append(original)
            displaced_arc = displaced
        elif arc.src == super_node:
            expanded.append(next(a for a in arcs if a.key == arc.key))
        else:
            expanded.append(arc)
    for v in cycle:
        if displaced_arc is not None and best[v].key == displaced_arc.key:
            continue
        expanded.append(best[v])
    return expanded


def augment(
    network: RelevanceNetwork,
    tree: set[Edge],
    cfg: BranchingConfig,
    issue: str = "",
) -> ArgumentMap:
    """Build the fuzzy argument map: the branching skeleton plus every
    non-tree edge with weight >= cfg.threshold that keeps the non-root
    subgraph acyclic.

    Candidates are added in descending weight order (ties by source id then
    target id, ascending), so the result is deterministic and lowering the
    threshold only ever adds edges. Root-root attack edges are appended only
    when configured and never participate in the cycle check.
    """
    reason_ids = {c.id for c in network.reasons}
    tree_pairs = frozenset(e.pair for e in tree)

    accepted: list[Edge] = sorted(tree, key=lambda e: e.pair)
    reachable: dict[str, set[str]] = {r: set() for r in reason_ids}
    for e in accepted:
        if e.target in reason_ids:
            reachable[e.source].add(e.target)

    def creates_reason_cycle(e: Edge) -> bool:
        if e.target not in reason_ids:
            return False
        # Path target -> ... -> source through reason nodes?
        stack = [e.target]
        seen: set[str] = set()
        while stack:
            v = stack.pop()
            if v == e.source:
                return True
            if v in seen:
                continue
            seen.add(v)
            stack.extend(reachable[v])
        return False

    candidates = [
        e
        for e in network.edges
        if e.source in reason_ids and e.pair not in tree_pairs and e.weight >= cfg.threshold
    ]
    candidates.sort(key=lambda e: (-e.weight, e.source, e.target))
    for e in candidates:
        if creates_reason_cycle(e):
            continue
        accepted.append(e)
        if e.target in reason_ids:
            reachable[e.source].add(e.target)

    if cfg.allow_root_root_edges:
        root_ids = {c.id for c in network.roots}
        accepted.extend(
            e for e in network.edges if e.source in root_ids and e.target in root_ids
        )

    return ArgumentMap(
        claims=network.claims,
        edges=tuple(accepted),
        tree=tree_pairs,
        issue=issue,
    )


def build_mutual_attacks(roots: list[Claim]) -> list[Edge]:
    """Root claims are rival answers: each pair maximally disconfirms the
    other (Attack, weight 1.0, both directions)."""
    edges = []
    for r1 in roots:
        if r1.kind is not ClaimKind.ROOT_CLAIM:
            raise ValueError(f"{r1.id} is not a RootClaim")
        for r2 in roots:
            if r1.id != r2.id:
                edges.append(Edge(r1.id, r2.id, Valence.ATTACK, 1.0))
    return edges
