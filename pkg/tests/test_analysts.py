"""Reconstruction pipeline stages under scripted backends."""

from __future__ import annotations

import json
import math
import random

import pytest

from guided_reasoning import prompts
from guided_reasoning.analysts import (
    EmptyCompletion,
    MalformedItemization,
    NoRootsProposed,
    ProsConsList,
    ProsConsRoot,
    ReasoningTrace,
    UnassignedReasons,
    build_issue,
    build_network,
    check_and_revise,
    extract_reasons,
    organize_pros_cons,
    score_relevance,
)
from guided_reasoning.argmap import ClaimKind, Valence
from guided_reasoning.gateway import ScriptedGateway

from .helpers import reason, root


def trace(problem="Should X?", text="Thinking about X..."):
    return ReasoningTrace(problem_statement=problem, trace_text=text)


def probe(p: float, response: str = "Yes") -> dict:
    """Script entry answering a yes/no probe with logprob mass p for yes."""
    p = min(max(p, 1e-6), 1 - 1e-6)
    return {
        "match": "any",
        "response": response,
        "logprobs": [["Yes", math.log(p)], ["No", math.log(1 - p)]],
    }


def test_trace_guards():
    with pytest.raises(ValueError):
        ReasoningTrace(problem_statement="", trace_text="t")
    with pytest.raises(ValueError):
        ReasoningTrace(problem_statement="p", trace_text=" ")


def test_build_issue_scripted():
    gw = ScriptedGateway([("*", "Should Bob buy a Mercedes?")])
    assert build_issue(trace(), gw) == "Should Bob buy a Mercedes?"


def test_build_issue_echo_style():
    gw = ScriptedGateway([("*", "Should X?")])
    assert build_issue(trace(problem="Should X?", text="Should X?"), gw) == "Should X?"


def test_build_issue_blank_three_times():
    gw = ScriptedGateway([("*", ""), ("*", "  "), ("*", "")])
    with pytest.raises(EmptyCompletion):
        build_issue(trace(), gw)
    assert gw.remaining == 0


def test_extract_reasons_parses_and_orders():
    reply = (
        "- [Reliability]: Mercedes is known for producing reliable cars.\n"
        "- [Cost]: Mercedes cars are expensive.\n"
    )
    gw = ScriptedGateway([("*", reply)])
    reasons = extract_reasons(trace(), "The issue", gw)
    assert [r.label for r in reasons] == ["Reliability", "Cost"]
    assert reasons[0].id == "reason-000"
    assert reasons[0].kind is ClaimKind.REASON


def test_extract_reasons_empty_allowed():
    gw = ScriptedGateway([("*", "NONE")])
    assert extract_reasons(trace(), "The issue", gw) == []


def test_extract_reasons_dedup():
    reply = (
        "- [A]: Mercedes cars are  expensive.\n"
        "- [B]: mercedes cars are expensive.\n"
        "- [C]: Mercedes cars are reliable.\n"
    )
    gw = ScriptedGateway([("*", reply)])
    reasons = extract_reasons(trace(), "The issue", gw)
    assert [r.label for r in reasons] == ["A", "C"]


def test_extract_reasons_repair_then_malformed():
    gw = ScriptedGateway([("*", "no bullets here"), ("*", "still prose")])
    with pytest.raises(MalformedItemization):
        extract_reasons(trace(), "The issue", gw)


def test_extract_reasons_repair_recovers():
    gw = ScriptedGateway([("*", "no bullets"), ("*", "- [Fix]: Parsed after repair.")])
    reasons = extract_reasons(trace(), "The issue", gw)
    assert [r.label for r in reasons] == ["Fix"]


def _organize_reply(roots: list[dict]) -> str:
    return json.dumps({"roots": roots})


def test_organize_minimal():
    reasons = [reason("reason-000", "R", "The only reason.")]
    gw = ScriptedGateway(
        [("*", _organize_reply([{"label": "Yes", "statement": "Do X.", "pros": [1], "cons": []}]))]
    )
    pcl = organize_pros_cons(reasons, "The issue", gw)
    assert len(pcl.roots) == 1
    assert pcl.roots[0].root.kind is ClaimKind.ROOT_CLAIM
    assert [p.id for p in pcl.roots[0].pros] == ["reason-000"]


def test_organize_no_roots():
    gw = ScriptedGateway([("*", _organize_reply([]))])
    with pytest.raises(NoRootsProposed):
        organize_pros_cons([reason("reason-000")], "The issue", gw)


def test_organize_requires_reasons():
    with pytest.raises(ValueError):
        organize_pros_cons([], "The issue", ScriptedGateway([]))


def test_organize_revision_loop_gives_up():
    incomplete = _organize_reply(
        [{"label": "Yes", "statement": "Do X.", "pros": [1], "cons": []}]
    )
    reasons = [reason("reason-000"), reason("reason-001")]
    # Initial reply and both revision rounds keep omitting reason 2.
    gw = ScriptedGateway([("*", incomplete)] * 3)
    with pytest.raises(UnassignedReasons):
        organize_pros_cons(reasons, "The issue", gw)
    assert gw.remaining == 0


def test_check_and_revise_fixpoint_makes_no_calls():
    reasons = [reason("reason-000"), reason("reason-001")]
    pcl = ProsConsList(
        roots=(
            ProsConsRoot(
                root=root("root-00"), pros=(reasons[0],), cons=(reasons[1],)
            ),
        )
    )
    gw = ScriptedGateway([])  # any call would raise ScriptExhausted
    assert check_and_revise(pcl, reasons, gw) is pcl


def test_check_and_revise_scripted_repair():
    reasons = [reason("reason-000"), reason("reason-001")]
    duplicated = ProsConsList(
        roots=(
            ProsConsRoot(root=root("root-00"), pros=(reasons[0], reasons[1]), cons=()),
            ProsConsRoot(root=root("root-01", "R2", "Other root."), pros=(reasons[0],), cons=()),
        )
    )
    fixed = _organize_reply(
        [
            {"label": "A", "statement": "Root one.", "pros": [1], "cons": []},
            {"label": "B", "statement": "Root two.", "pros": [2], "cons": []},
        ]
    )
    gw = ScriptedGateway([("*", fixed)])
    result = check_and_revise(duplicated, reasons, gw)
    assert sorted(r.id for r in result.reasons) == ["reason-000", "reason-001"]


def test_check_and_revise_idempotent_on_own_output():
    reasons = [reason("reason-000")]
    pcl = ProsConsList(
        roots=(ProsConsRoot(root=root("root-00"), pros=(reasons[0],), cons=()),)
    )
    once = check_and_revise(pcl, reasons, ScriptedGateway([]))
    twice = check_and_revise(once, reasons, ScriptedGateway([]))
    assert once == twice


def test_score_relevance_argmax():
    gw = ScriptedGateway([probe(0.8), probe(0.3)])
    score = score_relevance(reason("a"), root("b"), gw)
    assert score.valence is Valence.SUPPORT
    assert math.isclose(score.weight, 0.8, abs_tol=1e-6)


def test_score_relevance_tie_goes_to_attack():
    gw = ScriptedGateway([probe(0.5), probe(0.5)])
    score = score_relevance(reason("a"), root("b"), gw)
    assert score.valence is Valence.ATTACK
    assert math.isclose(score.weight, 0.5, abs_tol=1e-6)


def test_score_relevance_guards():
    with pytest.raises(ValueError):
        score_relevance(root("b"), reason("a"), ScriptedGateway([]))
    with pytest.raises(ValueError):
        score_relevance(reason("a"), reason("a"), ScriptedGateway([]))


def _pcl(n_roots: int, n_reasons: int) -> ProsConsList:
    reasons = [reason(f"reason-{i:03d}") for i in range(n_reasons)]
    entries = []
    for i in range(n_roots):
        mine = tuple(r for j, r in enumerate(reasons) if j % n_roots == i)
        entries.append(
            ProsConsRoot(
                root=root(f"root-{i:02d}", f"R{i}", f"Root option {i}."),
                pros=mine[: len(mine) // 2 + 1],
                cons=mine[len(mine) // 2 + 1 :],
            )
        )
    return ProsConsList(roots=tuple(entries))


def test_build_network_two_roots_no_reasons():
    net = build_network(_pcl(2, 0), ScriptedGateway([]))
    assert len(net.edges) == 2
    assert all(e.valence is Valence.ATTACK and e.weight == 1.0 for e in net.edges)
    assert net.violations() == []


def test_build_network_one_root_two_reasons():
    pcl = _pcl(1, 2)
    gw = ScriptedGateway([probe(0.6), probe(0.2)] * 4)
    net = build_network(pcl, gw)
    assert len(net.edges) == 2 * (3 - 1)
    assert net.violations() == []


def test_build_network_edge_count_formula():
    rng = random.Random(11)
    for _ in range(12):
        n_roots = rng.randint(1, 3)
        n_reasons = rng.randint(0, 5)
        pcl = _pcl(n_roots, n_reasons)
        n_claims = n_roots + n_reasons
        probes = [probe(rng.random()) for _ in range(2 * n_reasons * (n_claims - 1))]
        net = build_network(pcl, ScriptedGateway(probes))
        assert len(net.edges) == n_reasons * (n_claims - 1) + n_roots * (n_roots - 1)
        assert net.violations() == []


def test_build_network_5_reasons_3_roots_is_41_edges():
    pcl = _pcl(3, 5)
    gw = ScriptedGateway([probe(0.7)] * (2 * 5 * 7))
    net = build_network(pcl, gw)
    assert len(net.edges) == 5 * 7 + 6 == 41


def test_build_network_parallel_matches_serial():
    # Entries are addressed by probe wording, not arrival order, so the
    # thread pool's scheduling cannot change the outcome.
    pcl = _pcl(2, 3)

    def probes():
        support = dict(probe(0.8), match={"contains": "evidence for"})
        attack = dict(probe(0.1), match={"contains": "evidence against"})
        return [support, attack] * (3 * 4)

    serial = build_network(pcl, ScriptedGateway(probes()))
    parallel = build_network(pcl, ScriptedGateway(probes()), parallelism=4)
    assert serial == parallel


def test_pipeline_deterministic_under_script():
    reasons_reply = "- [A]: First reason.\n- [B]: Second reason.\n"
    organize_reply = _organize_reply(
        [{"label": "Root", "statement": "The answer.", "pros": [1], "cons": [2]}]
    )

    def run():
        gw = ScriptedGateway(
            [
                ("*", "The issue."),
                ("*", reasons_reply),
                ("*", organize_reply),
            ]
            + [probe(0.9), probe(0.2)] * 4
        )
        t = trace()
        issue = build_issue(t, gw)
        reasons = extract_reasons(t, issue, gw)
        pcl = organize_pros_cons(reasons, issue, gw)
        return build_network(pcl, gw, issue=issue)

    assert run() == run()


def test_templates_render_with_hostile_text():
    hostile = 'claim with {braces} and "quotes" and \\backslashes\n'
    for name in prompts.template_names():
        text = prompts.template_text(name)
        placeholders = {
            field: hostile
            for _, field, _, _ in __import__("string").Formatter().parse(text)
            if field
        }
        rendered = prompts.render(name, **placeholders)
        for field in placeholders:
            assert f"{{{field}}}" not in rendered
        if placeholders:
            assert "braces" in rendered


def test_template_missing_placeholder_raises():
    with pytest.raises(KeyError):
        prompts.render("issue", problem="only one of two")
