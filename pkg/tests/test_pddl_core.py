from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pddl_induce.evaluation import DOMAINS
from pddl_induce.llm import parse_semantics_response
from pddl_induce.pddl_core import (
    ActionSemantics,
    GroundAction,
    PDDLError,
    PDDLSyntaxError,
    Role,
    Statement,
    canonicalize_statement,
    ground_problem,
    parse_domain,
    parse_problem,
    render_domain,
    render_problem,
    semantics_to_text,
)

from conftest import make_problem

P, E = Role.PRECONDITION, Role.EFFECT


def pre(pred, *args, positive=True):
    return Statement(P, pred, tuple(args), positive)


def eff(pred, *args, positive=True):
    return Statement(E, pred, tuple(args), positive)


# --- parse_domain


def test_put_down_has_one_object_parameter(bw_truth):
    schema = bw_truth.schema("put-down")
    assert schema.params == (("?ob", "object"),)


def test_empty_action_body_gives_empty_semantics(noop_domain):
    assert noop_domain.schema("noop").semantics.is_empty()


def test_blocksworld_truth_has_four_schemas_and_27_statements(bw_truth):
    assert sorted(bw_truth.actions) == ["pick-up", "put-down", "stack", "unstack"]
    # hand count: pick-up 3+4, put-down 1+4, stack 2+5, unstack 3+5
    assert bw_truth.statement_count() == 27


def test_identifiers_are_lowercased():
    d = parse_domain("(define (domain D) (:predicates (P ?X)) (:action A :parameters (?X) :effect (P ?X)))")
    assert d.name == "d"
    assert d.schema("a").effects == (eff("p", "?x"),)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("(define (domain d) (:requirements :adl))", "requirement"),
        ("(define (domain d) (:predicates (p ?x - thing)))", "type"),
        ("(define (domain d) (:predicates (p)) (:action a :parameters () :effect (q)))", "predicate"),
        ("(define (domain d) (:types a - b b - a))", "cycl"),
        (
            "(define (domain d) (:predicates (p)) (:action a :parameters () :effect (and (p) (not (p)))))",
            "negation",
        ),
    ],
)
def test_domain_errors(text, fragment):
    with pytest.raises(PDDLError, match=fragment):
        parse_domain(text)


def test_syntax_error_carries_position():
    with pytest.raises(PDDLSyntaxError) as info:
        parse_domain("(define (domain d)\n  (:predicates (p)")
    assert info.value.line >= 1


# --- parse_problem


def test_two_block_problem(bw_problem):
    assert len(bw_problem.init) == 5
    assert [str(g) for g in bw_problem.goal] == ["(on b1 b2)"]


def test_goal_already_true_is_a_valid_problem(bw_truth):
    p = make_problem(bw_truth, "b1", "(on-table b1) (clear b1) (arm-empty)", "(clear b1)")
    assert p.goal_reached(p.init)


@pytest.mark.parametrize(
    "objects, init, goal",
    [
        ("ball1 - spaceship", "", "(at-robby robot1 room1)"),  # undeclared type
        ("robot1 - robot room1 - room", "(at-robby robot1 room9)", "(at-robby robot1 room1)"),  # undeclared object
        ("robot1 - robot room1 - room", "(at-robby room1 robot1)", "(at-robby robot1 room1)"),  # type mismatch
        ("robot1 - robot room1 - room", "(at-robby robot1)", "(at-robby robot1 room1)"),  # arity
        ("robot1 - robot room1 - room", "", "(flying robot1)"),  # unknown goal predicate
    ],
)
def test_problem_errors(grippers, objects, init, goal):
    with pytest.raises(PDDLError):
        make_problem(grippers[0], objects, init, goal)


# --- render_domain


def test_render_put_down_belief(bw_truth):
    belief = {
        "put-down": ActionSemantics(
            (pre("holding", "?ob"),),
            (eff("on-table", "?ob"), eff("arm-empty"), eff("clear", "?ob"), eff("holding", "?ob", positive=False)),
        )
    }
    text = render_domain(bw_truth.without_semantics(), belief)
    block = text[text.index("(:action put-down"):]
    block = block[: block.index("(:action", 1)]
    assert ":precondition (and (holding ?ob))" in block
    assert ":effect (and (arm-empty) (clear ?ob) (holding ?ob) (on-table ?ob))" not in block
    assert ":effect (and (arm-empty) (clear ?ob) (not (holding ?ob)) (on-table ?ob))" in block
    reparsed = parse_domain(text)
    assert reparsed.schema("put-down").semantics == belief["put-down"]
    assert reparsed.schema("stack").semantics.is_empty()


def test_render_empty_belief(bw_truth):
    text = render_domain(bw_truth.without_semantics(), {})
    assert text.count("(and )") == 8
    assert parse_domain(text).statement_count() == 0
    assert text.endswith("\n")


def test_render_rejects_unknown_action(bw_truth):
    with pytest.raises(PDDLError):
        render_domain(bw_truth, {"fly": ActionSemantics()})


def test_render_rejects_unknown_predicate(bw_truth):
    with pytest.raises(PDDLError):
        render_domain(bw_truth, {"pick-up": ActionSemantics((pre("flying", "?ob"),))})


def test_render_parse_render_fixpoint(bw_text):
    first = render_domain(parse_domain(bw_text))
    second = render_domain(parse_domain(first))
    third = render_domain(parse_domain(second))
    assert second == third == first


@pytest.mark.parametrize("name", DOMAINS)
def test_round_trip_all_bundled(bundled, name):
    truth, problem = bundled[name]
    again = parse_domain(render_domain(truth))
    assert again == truth
    assert again.semantics() == truth.semantics()
    assert parse_problem(render_problem(problem), again) == problem


@pytest.mark.parametrize("name", DOMAINS)
def test_no_complementary_effects_in_bundled(bundled, name):
    for schema in bundled[name][0].actions.values():
        effects = set(schema.effects)
        assert not any(s.complement() in effects for s in effects)


def test_render_sorts_statements_within_blocks(bw_truth):
    text = render_domain(bw_truth)
    assert ":precondition (and (arm-empty) (clear ?ob) (on-table ?ob))" in text


# --- grounding


def brute_force_ground(domain, problem, distinct=False):
    """Independent enumerator: walk the object list for every parameter and check types by hand."""

    def is_sub(t, sup):
        while True:
            if t == sup:
                return True
            if t not in domain.types.parent:
                return sup == "object"
            t = domain.types.parent[t]

    out = set()
    for schema in domain.actions.values():
        pools = [[o for o, t in problem.objects.items() if is_sub(t, pt)] for _, pt in schema.params]
        for combo in itertools.product(*pools):
            if distinct and len(set(combo)) < len(combo):
                continue
            out.add(GroundAction(schema.name, combo))
    return out


def test_ground_two_blocks(bw_truth, bw_problem):
    ground = ground_problem(bw_truth, bw_problem)
    counts = {n: sum(a.name == n for a in ground) for n in bw_truth.actions}
    assert counts == {"pick-up": 2, "put-down": 2, "stack": 4, "unstack": 4}
    assert ground == sorted(ground)


def test_ground_distinct_args_drops_self_stacks(bw_truth, bw_problem):
    ground = ground_problem(bw_truth, bw_problem, distinct_args=True)
    assert sum(a.name == "stack" for a in ground) == 2


def test_ground_zero_objects(bw_truth):
    p = make_problem(bw_truth, "", "(arm-empty)", "(arm-empty)")
    assert ground_problem(bw_truth, p) == []


def test_ground_grippers_one_ball_against_brute_force(grippers):
    domain = grippers[0]
    p = make_problem(
        domain,
        "robot1 - robot lgripper1 rgripper1 - gripper room1 room2 - room ball1 - obj",
        "(at-robby robot1 room1) (at ball1 room1)",
        "(at ball1 room2)",
    )
    ground = ground_problem(domain, p)
    assert set(ground) == brute_force_ground(domain, p)
    # move: 1 robot x 2 x 2 rooms; pick/drop: 1 robot x 1 ball x 2 rooms x 2 grippers
    assert len(ground) == 4 + 4 + 4


@pytest.mark.parametrize("name", DOMAINS)
@pytest.mark.parametrize("distinct", [False, True])
def test_ground_matches_brute_force_on_bundled(bundled, name, distinct):
    truth, problem = bundled[name]
    ground = ground_problem(truth, problem, distinct_args=distinct)
    assert len(ground) == len(set(ground))
    assert set(ground) == brute_force_ground(truth, problem, distinct)


# --- canonicalize_statement


def test_canonicalize_renames_by_position(bw_truth):
    s = canonicalize_statement(pre("holding", "?x"), bw_truth.schema("put-down"), ["?x"])
    assert s == pre("holding", "?ob")


def test_canonicalize_is_identity_on_canonical(bw_truth):
    s = pre("holding", "?ob")
    assert canonicalize_statement(s, bw_truth.schema("put-down")) == s


def test_canonicalize_reversed_binding(bw_truth):
    s = canonicalize_statement(eff("on", "?b", "?a"), bw_truth.schema("stack"), ["?a", "?b"])
    assert s == eff("on", "?underob", "?ob")


def test_canonicalize_rejects_foreign_variable(bw_truth):
    with pytest.raises(PDDLError):
        canonicalize_statement(pre("holding", "?zz"), bw_truth.schema("put-down"))


@given(
    st.lists(st.sampled_from(["?a", "?b"]), min_size=0, max_size=3),
    st.sampled_from(["p", "q"]),
    st.booleans(),
    st.sampled_from([P, E]),
)
def test_canonicalize_idempotent_and_injective(bw_truth, args, pred, positive, role):
    schema = bw_truth.schema("stack")
    raw = Statement(role, pred, tuple(args), positive)
    once = canonicalize_statement(raw, schema, ["?a", "?b"])
    assert canonicalize_statement(once, schema) == once
    # injective: distinct raw args give distinct canonical args
    other = Statement(role, pred, tuple("?b" if a == "?a" else "?a" for a in args), positive)
    if args:
        assert canonicalize_statement(other, schema, ["?a", "?b"]) != once


# --- semantics_to_text


def test_effects_sentence():
    sem = ActionSemantics((), (eff("on-table", "?ob"), eff("arm-empty")))
    assert semantics_to_text(sem).endswith("The effects are (on-table ?ob), (arm-empty).")


def test_unknown_preconditions_sentence():
    assert semantics_to_text(ActionSemantics()).startswith("The preconditions are unknown.")
    assert semantics_to_text(ActionSemantics()) == "The preconditions are unknown. The effects are unknown."


def test_negative_effect_renders_and_round_trips(bw_truth):
    sem = ActionSemantics((), (eff("holding", "?ob", positive=False),))
    text = semantics_to_text(sem)
    assert "(not (holding ?ob))" in text
    parsed = parse_semantics_response(text.split("The effects are ")[1], bw_truth.schema("put-down"), E, bw_truth)
    assert parsed == {eff("holding", "?ob", positive=False)}


# --- statements


@settings(max_examples=50)
@given(st.permutations(list(range(7))))
def test_semantics_equality_ignores_order(bw_truth, perm):
    stmts = sorted(bw_truth.schema("pick-up").semantics.statements())
    shuffled = [stmts[i] for i in perm]
    assert ActionSemantics.from_statements(shuffled) == bw_truth.schema("pick-up").semantics
