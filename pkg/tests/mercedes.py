"""Scripted car-purchase deliberation used by the end-to-end tests.

Builds the full client/expert scripts for a three-root, nineteen-reason
session so the pros/cons guide runs deterministically without a live model.
The relevance probes get logprob-backed answers, so weights come out of the
affirmative-token path.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from guided_reasoning.gateway import ScriptedGateway
from guided_reasoning.guide import GuideConfig, run_pros_cons_guide

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_PROTOCOL = DATA_DIR / "mercedes_protocol.txt"

PROBLEM = "Bob needs a reliable and cheap car. Should he buy a Mercedes?"
ISSUE = "Should Bob buy a Mercedes?"
THRESHOLD = 0.6

BRAINSTORM = """\
Let's start by brainstorming relevant considerations and think through the problem I've been given.
When considering whether Bob should buy a Mercedes for his reliable and cheap car needs, it's essential to weigh the pros and cons of this decision. Here are some factors to consider:

Pros of Buying a Mercedes:

Reliability: Mercedes is known for producing reliable cars, which could make it a good choice for Bob's needs.
Luxury: Mercedes cars are luxurious and come with various features that could make Bob's driving experience more comfortable and enjoyable.
Resale Value: Mercedes cars hold their value well over time, making it a good investment for Bob if he plans to sell the car in the future.
Cons of Buying a Mercedes:

Cost: Mercedes cars are expensive, which could make it challenging for Bob to find a cheap option that meets his needs.
Maintenance: Mercedes cars require regular maintenance, which could add to the overall cost of ownership.
Insurance: Mercedes cars are expensive to insure, which could make it more expensive for Bob to protect his investment.
Alternative Solutions:

Buy a Used Mercedes: Bob could consider buying a used Mercedes instead of a new one. This could help him find a more affordable option that still meets his needs for reliability and luxury.
Buy a Different Brand: Bob could consider exploring other car brands that offer reliable and affordable options. Some popular brands for this include Toyota, Honda, and Subaru.
Lease a Car: Bob could consider leasing a car instead of buying one. This could help him save money on the upfront cost of a car and potentially lower his monthly payments.
After weighing the pros and cons and exploring alternative solutions, it's essential to make a decision that aligns with Bob's priorities and budget. While a Mercedes could be a good choice for its reliability and luxury, it may not be the most affordable option for Bob's needs. Exploring alternative solutions like buying a used Mercedes or leasing a car could help him find a more affordable option that still meets his needs. Ultimately, the decision will depend on Bob's specific circumstances and preferences."""

DRAFT_ANSWER = (
    "Bob should not buy a Mercedes. Reliability, comfort, and resale value "
    "speak for it, but the purchase price, upkeep, insurance, and the "
    "difficulty of finding a cheap option weigh heavier. Considering "
    "alternative brands such as Toyota, Honda, or Subaru, or leasing a car, "
    "are the more plausible options for his needs."
)

# (label, statement, tree target, support?, verdict); targets are reason
# indices or root keys. Index order is extraction order and fixes the ids.
REASONS = [
    ("Reliability", "Bob needs a car that is reliable.", 1, True, "very plausible"),
    ("Reliability", "Mercedes is known for producing reliable cars, which could make it a good choice for Bob's needs.", "buy", True, "rather plausible"),
    ("Luxury", "Mercedes cars are luxurious.", "buy", True, "rather plausible"),
    ("Comfort and Enjoyment", "Mercedes cars come with various features that could make Bob's driving experience more comfortable and enjoyable.", "buy", True, "rather plausible"),
    ("Resale Value", "Mercedes cars hold their value well over time.", "buy", True, "rather plausible"),
    ("Luxury", "Bob needs a car that is luxurious.", "buy", True, "rather implausible"),
    ("Affordability", "Buying a used Mercedes could be more affordable for Bob.", "buy", True, "rather plausible"),
    ("Expensiveness", "Mercedes cars are expensive.", "buy", False, "rather plausible"),
    ("Future Sale", "Bob plans to sell the car in the future.", 9, True, "rather plausible"),
    ("Alternative Brands", "Bob could consider Toyota as an alternative car brand.", 12, True, "rather plausible"),
    ("Alternative Brands", "Bob could consider Honda as an alternative car brand.", 12, True, "rather plausible"),
    ("Alternative Brands", "Bob could consider Subaru as an alternative car brand.", 12, True, "rather plausible"),
    ("Difficulty in finding a cheap option", "Bob may find it challenging to find a cheap option that meets his needs.", "buy", False, "rather plausible"),
    ("Maintenance Cost", "Mercedes cars require regular maintenance.", "buy", False, "rather plausible"),
    ("Cost of Ownership", "Regular maintenance could add to the overall cost of ownership.", "buy", False, "rather plausible"),
    ("Insurance Cost", "Mercedes cars are expensive to insure.", "buy", False, "rather plausible"),
    ("Protecting Investment", "Bob wants to protect his investment.", "buy", False, "very plausible"),
    ("Reason 1", "Leasing a car could help Bob save money on the upfront cost of a car.", "lease", True, "rather plausible"),
    ("Reason 2", "Leasing a car could help Bob potentially lower his monthly payments.", "lease", True, "rather plausible"),
]

ROOTS = {
    "buy": ("Buy a Mercedes", "Bob should buy a Mercedes.", "rather implausible"),
    "alt": (
        "Consider Alternative Brands",
        "Bob should consider exploring other car brands that offer reliable and affordable options, such as Toyota, Honda, and Subaru.",
        "rather plausible",
    ),
    "lease": ("Lease a Car", "Bob should lease a car.", "rather plausible"),
}
ROOT_IDS = {"buy": "root-00", "alt": "root-01", "lease": "root-02"}

# Organizer assignment: every reason under exactly one root (1-based indices).
ORGANIZE = {
    "roots": [
        {
            "label": ROOTS["buy"][0],
            "statement": ROOTS["buy"][1],
            "pros": [1, 2, 3, 4, 5, 6, 7],
            "cons": [8, 13, 14, 15, 16, 17],
        },
        {
            "label": ROOTS["alt"][0],
            "statement": ROOTS["alt"][1],
            "pros": [9, 10, 11, 12],
            "cons": [],
        },
        {
            "label": ROOTS["lease"][0],
            "statement": ROOTS["lease"][1],
            "pros": [18, 19],
            "cons": [],
        },
    ]
}

# Reason order inside the pros/cons list (pros then cons per root), which
# fixes the network's pair-scoring order.
_PCL_ORDER = [0, 1, 2, 3, 4, 5, 6, 7, 12, 13, 14, 15, 16, 8, 9, 10, 11, 17, 18]

STRONG, WEAK = 0.9, 0.2


def _claim_text(idx_or_root) -> str:
    if isinstance(idx_or_root, int):
        label, statement = REASONS[idx_or_root][0], REASONS[idx_or_root][1]
    else:
        label, statement = ROOTS[idx_or_root][0], ROOTS[idx_or_root][1]
    return f"[{label}]: {statement}"


def _probe_entry(a, b, kind: str, p_yes: float) -> dict:
    phrase = "Does Claim 1 provide evidence for" if kind == "support" else "Does Claim 1 provide evidence against"
    matcher = f"Claim 1: {_claim_text(a)}\nClaim 2: {_claim_text(b)}\n\n{phrase}"
    p_yes = min(max(p_yes, 1e-9), 1 - 1e-9)
    return {
        "match": {"contains": matcher},
        "response": "Yes" if p_yes >= 0.5 else "No",
        "logprobs": [["Yes", math.log(p_yes)], ["No", math.log(1 - p_yes)]],
    }


def expert_script() -> list[dict]:
    reasons_block = "\n".join(
        f"- [{label}]: {statement}" for label, statement, *_ in REASONS
    )
    entries = [
        {"match": {"contains": "state the central issue"}, "response": ISSUE},
        {"match": {"contains": "Extract every reason"}, "response": reasons_block},
        {"match": {"contains": "Organize all of these reasons"}, "response": json.dumps(ORGANIZE)},
    ]
    targets = {i: REASONS[i][2] for i in range(len(REASONS))}
    supports = {i: REASONS[i][3] for i in range(len(REASONS))}
    all_claims = _PCL_ORDER + ["buy", "alt", "lease"]
    for a in _PCL_ORDER:
        for b in all_claims:
            if b == a:
                continue
            if targets[a] == b:
                p_support = STRONG if supports[a] else 1 - STRONG
                p_attack = 1 - STRONG if supports[a] else STRONG
            else:
                p_support, p_attack = WEAK, WEAK / 2
            entries.append(_probe_entry(a, b, "support", p_support))
            entries.append(_probe_entry(a, b, "attack", p_attack))
    return entries


def client_script(followup_response: str | None = None) -> list[dict]:
    entries = [
        {"match": {"contains": "Come up with alternative answers"}, "response": BRAINSTORM}
    ]
    for key in list(range(len(REASONS))) + ["buy", "alt", "lease"]:
        verdict = REASONS[key][4] if isinstance(key, int) else ROOTS[key][2]
        entries.append(
            {
                "match": {
                    "contains": f"Assess the plausibility of the claim '{_claim_text(key)}'"
                },
                "response": verdict,
            }
        )
    entries.append({"match": {"contains": "Draft an answer"}, "response": DRAFT_ANSWER})
    if followup_response is not None:
        entries.append({"match": {"contains": "reasoning behind"}, "response": followup_response})
    return entries


def gateways(followup_response: str | None = None) -> tuple[ScriptedGateway, ScriptedGateway]:
    return (
        ScriptedGateway(client_script(followup_response), name="client"),
        ScriptedGateway(expert_script(), name="expert"),
    )


def guide_config() -> GuideConfig:
    return GuideConfig(branching_threshold=THRESHOLD, temperature=0.6)


def run_session(on_stage=None):
    client, expert = gateways()
    session = run_pros_cons_guide(
        PROBLEM, client, expert, guide_config(), on_stage=on_stage
    )
    return session, client, expert


def write_config_and_scripts(directory: Path) -> Path:
    """Materialize script files plus a config document for CLI/service runs."""
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "client_script.json").write_text(json.dumps(client_script(), indent=1))
    (directory / "expert_script.json").write_text(json.dumps(expert_script(), indent=1))
    config = {
        "client": {"script": str(directory / "client_script.json"), "temperature": 0.6},
        "expert": {"script": str(directory / "expert_script.json")},
        "branching": {"threshold": THRESHOLD},
        "suspension": {"n_paraphrases": 2},
    }
    path = directory / "config.json"
    path.write_text(json.dumps(config, indent=1))
    return path
