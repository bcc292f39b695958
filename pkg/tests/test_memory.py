from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pddl_induce.memory import LLM_FORGETTING, PRUNE_BELOW, Memory
from pddl_induce.pddl_core import PDDLError, Role, Statement

P, E = Role.PRECONDITION, Role.EFFECT
HOLD = Statement(P, "holding", ("?ob",))
CLEAR = Statement(P, "clear", ("?ob",))
ON_TABLE = Statement(E, "on-table", ("?ob",))


@pytest.fixture
def mem():
    return Memory(["put-down", "pick-up"])


def test_first_prediction_sets_one(mem):
    mem.update("put-down", P, {HOLD}, "llm")
    assert mem.probability("put-down", HOLD) == 1.0
    assert not mem.entry("put-down", HOLD).rule_confirmed


def test_unpredicted_decays_by_gamma(mem):
    mem.update("put-down", P, {HOLD}, "llm")
    mem.update("put-down", P, set(), "llm")
    assert mem.probability("put-down", HOLD) == pytest.approx(0.8)
    mem.update("put-down", P, set(), "llm")
    assert mem.probability("put-down", HOLD) == pytest.approx(0.64)


def test_repredicted_moves_towards_one(mem):
    mem.update("put-down", P, {HOLD}, "llm")
    mem.update("put-down", P, set(), "llm")
    mem.update("put-down", P, {HOLD}, "llm")
    assert mem.probability("put-down", HOLD) == pytest.approx(0.8 * 0.8 + 0.2)


def test_rule_confirmed_never_decays(mem):
    mem.update("put-down", P, {HOLD}, "rule")
    for _ in range(20):
        mem.update("put-down", P, {CLEAR}, "llm")
    assert mem.probability("put-down", HOLD) == 1.0
    assert mem.entry("put-down", HOLD).rule_confirmed


def test_rule_confirms_existing_llm_entry(mem):
    mem.update("put-down", P, {HOLD}, "llm")
    mem.update("put-down", P, set(), "llm")
    mem.update("put-down", P, {HOLD}, "rule")
    assert mem.probability("put-down", HOLD) == 1.0


def test_update_touches_only_that_role(mem):
    mem.update("put-down", E, {ON_TABLE}, "llm")
    mem.update("put-down", P, {HOLD}, "llm")
    assert mem.probability("put-down", ON_TABLE) == 1.0


def test_unknown_action(mem):
    with pytest.raises(PDDLError):
        mem.update("fly", P, {HOLD}, "llm")


def test_role_mismatch(mem):
    with pytest.raises(ValueError):
        mem.update("put-down", E, {HOLD}, "llm")


def test_pruning(mem):
    mem.update("put-down", P, {HOLD}, "llm")
    n = 0
    while mem.entry("put-down", HOLD) is not None:
        mem.update("put-down", P, set(), "llm")
        n += 1
    assert LLM_FORGETTING ** (n - 1) >= PRUNE_BELOW > LLM_FORGETTING**n


# --- beliefs


def test_all_ones_belief_is_full_memory(mem):
    mem.update("put-down", P, {HOLD, CLEAR}, "llm")
    for seed in range(5):
        assert set(mem.sample_belief(seed)["put-down"].preconditions) == {HOLD, CLEAR}


def test_empty_memory_belief():
    belief = Memory(["a"]).sample_belief(0)
    assert belief["a"].is_empty()


def test_bernoulli_frequency(mem):
    mem.update("put-down", P, {HOLD}, "llm")
    mem.update("put-down", P, set(), "llm")
    mem.update("put-down", P, set(), "llm")
    assert mem.probability("put-down", HOLD) == pytest.approx(0.64)
    rng = random.Random(12345)
    hits = sum(HOLD in mem.sample_belief(rng)["put-down"].preconditions for _ in range(10_000))
    assert abs(hits / 10_000 - 0.64) <= 0.02


def test_sample_belief_pure_in_seed(mem):
    mem.update("put-down", P, {HOLD, CLEAR}, "llm")
    mem.update("put-down", P, {CLEAR}, "llm")
    assert [mem.sample_belief(s) for s in range(20)] == [mem.sample_belief(s) for s in range(20)]


def test_snapshot_threshold_half_over_064_and_04():
    mem = Memory(["a"])
    a = Statement(P, "p")
    b = Statement(P, "q")
    mem.update("a", P, {a, b}, "llm")
    mem.entries["a"][P][a].p = 0.64
    mem.entries["a"][P][b].p = 0.4
    assert mem.snapshot_belief(0.5)["a"].preconditions == (a,)
    assert set(mem.snapshot_belief(0)["a"].preconditions) == {a, b}


def test_snapshot_one_keeps_only_rule_confirmed(mem):
    mem.update("put-down", P, {HOLD}, "rule")
    mem.update("put-down", P, {CLEAR}, "llm")
    mem.update("put-down", P, set(), "llm")
    assert mem.snapshot_belief(1.0)["put-down"].preconditions == (HOLD,)


def test_snapshot_threshold_range(mem):
    with pytest.raises(ValueError):
        mem.snapshot_belief(1.5)


def test_checkpoint_round_trip(bw_truth):
    mem = Memory.for_domain(bw_truth)
    mem.update("put-down", P, {HOLD}, "rule")
    mem.update("put-down", E, {ON_TABLE, Statement(E, "holding", ("?ob",), False)}, "llm")
    mem.update("put-down", E, {ON_TABLE}, "llm")
    again = Memory.from_json(json.loads(mem.dumps()), bw_truth)
    assert again.to_json() == mem.to_json()


# --- properties

statements = st.sampled_from([Statement(P, p) for p in "abcde"])


@settings(max_examples=300)
@given(st.lists(st.tuples(st.sets(statements), st.sampled_from(["llm", "rule"])), max_size=30))
def test_probability_in_unit_interval_and_rule_persistence(updates):
    mem = Memory(["x"])
    confirmed = set()
    for predicted, source in updates:
        mem.update("x", P, predicted, source)
        if source == "rule":
            confirmed |= predicted
        for s, e in mem.entries["x"][P].items():
            assert 0.0 <= e.p <= 1.0
        for s in confirmed:
            assert mem.probability("x", s) == 1.0


@settings(max_examples=200)
@given(st.integers(min_value=0, max_value=60), st.integers(min_value=0, max_value=10))
def test_closed_form_decay(n, warm):
    mem = Memory(["x"])
    s, other = Statement(P, "a"), Statement(P, "b")
    mem.update("x", P, {s}, "llm")
    for _ in range(warm):
        mem.update("x", P, {s, other}, "llm")
    p0 = mem.probability("x", s)
    for _ in range(n):
        mem.update("x", P, {other}, "llm")
    expected = LLM_FORGETTING**n * p0
    if expected >= PRUNE_BELOW:
        assert abs(mem.probability("x", s) - expected) <= 1e-12
