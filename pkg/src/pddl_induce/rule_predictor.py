"""Exact statements read off environment feedback.

Violated preconditions come from the error message; effects come from the
per-step state deltas of applied actions.
"""

from __future__ import annotations

import logging
import re
from typing import Mapping

from .pddl_core import (
    ActionSchema,
    Atom,
    Domain,
    GroundAction,
    Literal,
    PDDLError,
    Role,
    SList,
    Statement,
    Symbol,
    parse_sexpr,
)
from .simulator import REDUCED_ACTION_MESSAGE, REDUCED_GOAL_MESSAGE, TrajectoryFeedback

log = logging.getLogger(__name__)

_FAILURE_RE = re.compile(r"^action (\(.*?\)) failed: unsatisfied precondition\(s\): (.+)$")

Prediction = dict  # action name -> {Role: set[Statement]}


class MalformedFeedback(PDDLError):
    pass


def lift_literal(
    literal: Literal, action: GroundAction, schema: ActionSchema, role: Role, aliasing: str = "lowest"
) -> Statement | None:
    """Replace each object by the parameter bound to it.

    ``aliasing`` decides what happens when one object fills several
    parameters: ``"lowest"`` takes the lowest-index parameter, ``"reject"``
    refuses the literal because the lifting is ambiguous. Literals naming an
    unbound object are always rejected (``None``).
    """
    params = schema.variables
    args = []
    for obj in literal.atom.args:
        positions = [i for i, o in enumerate(action.args) if o == obj]
        if not positions:
            log.debug("rejected %s for %s: %s is not bound", literal, action, obj)
            return None
        if len(positions) > 1 and aliasing == "reject":
            log.debug("rejected %s for %s: %s fills several parameters", literal, action, obj)
            return None
        args.append(params[positions[0]])
    return Statement(role, literal.atom.predicate, tuple(args), literal.positive)


def _literal_from_tree(node) -> Literal:
    positive = True
    if isinstance(node, SList) and len(node) == 2 and node[0] == "not":
        positive = False
        node = node[1]
    if not isinstance(node, SList) or not node or not all(isinstance(t, Symbol) for t in node):
        raise MalformedFeedback(f"not a ground literal: {node!r}")
    return Literal(Atom(str(node[0]), tuple(str(t) for t in node[1:])), positive)


def parse_failure_message(message: str) -> tuple[GroundAction, list[Literal]] | None:
    """Split an action-failure message into the action and violated literals.

    Returns ``None`` for messages that carry no violation payload (goal
    failures, the reduced no-error-message strings, empty).
    """
    if not message or message == REDUCED_ACTION_MESSAGE or message.startswith(REDUCED_GOAL_MESSAGE):
        return None
    m = _FAILURE_RE.match(message)
    if m is None:
        raise MalformedFeedback(f"unrecognised error message: {message!r}")
    action = GroundAction.parse(m.group(1))
    literals = [_literal_from_tree(parse_sexpr(part.strip())) for part in m.group(2).split(";")]
    return action, literals


def empty_prediction(domain: Domain) -> Prediction:
    return {a: {Role.PRECONDITION: set(), Role.EFFECT: set()} for a in domain.actions}


def infer_from_feedback(
    feedback: TrajectoryFeedback,
    domain: Domain,
    preconditions: bool = True,
    effects: bool = True,
    aliasing: str = "reject",
) -> Prediction:
    """Lift deltas of applied steps to effects and violations to preconditions.

    Ambiguous (aliased) liftings are rejected by default so every returned
    statement is guaranteed to belong to the true semantics.
    """
    out = empty_prediction(domain)
    if effects:
        for action, outcome in zip(feedback.valid_prefix, feedback.step_outcomes):
            schema = domain.schema(action.name)
            for atom in sorted(outcome.added):
                s = lift_literal(Literal(atom, True), action, schema, Role.EFFECT, aliasing)
                if s is not None:
                    out[action.name][Role.EFFECT].add(s)
            for atom in sorted(outcome.deleted):
                s = lift_literal(Literal(atom, False), action, schema, Role.EFFECT, aliasing)
                if s is not None:
                    out[action.name][Role.EFFECT].add(s)
    if preconditions and feedback.failed_action is not None:
        parsed = parse_failure_message(feedback.error_message)
        if parsed is not None:
            action, violated = parsed
            if action != feedback.failed_action:
                raise MalformedFeedback(f"message names {action}, but {feedback.failed_action} failed")
            schema = domain.schema(action.name)
            for lit in violated:
                s = lift_literal(lit, action, schema, Role.PRECONDITION, aliasing)
                if s is not None:
                    out[action.name][Role.PRECONDITION].add(s)
    return out


def violation_literals(feedback: TrajectoryFeedback) -> list[str]:
    """Violation literals the precondition channel would see (for auditing)."""
    parsed = parse_failure_message(feedback.error_message) if feedback.failed_action else None
    return [] if parsed is None else [str(l) for l in parsed[1]]


def merge_predictions(into: Prediction, other: Mapping) -> Prediction:
    for action, roles in other.items():
        for role, stmts in roles.items():
            into[action][role] |= set(stmts)
    return into
