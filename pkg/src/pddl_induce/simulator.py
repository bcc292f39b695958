"""Ground-truth environment: executes plans and reports what happened."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .pddl_core import (
    ActionSchema,
    Atom,
    Domain,
    GroundAction,
    Literal,
    PDDLError,
    Problem,
    State,
    check_ground_action,
)

REDUCED_ACTION_MESSAGE = "action failed"
REDUCED_GOAL_MESSAGE = "plan completed without reaching the goal"


@dataclass(frozen=True)
class GroundOperator:
    """A schema instantiated with objects: ground preconditions and effects."""

    action: GroundAction
    preconditions: tuple[Literal, ...]
    add: frozenset
    delete: frozenset

    def violated(self, state: State) -> list[Literal]:
        return sorted(lit for lit in self.preconditions if not lit.holds(state))

    def applicable(self, state: State) -> bool:
        return all(lit.holds(state) for lit in self.preconditions)

    def apply(self, state: State) -> State:
        # delete-then-add
        return (state - self.delete) | self.add


def instantiate(schema: ActionSchema, action: GroundAction) -> GroundOperator:
    binding = dict(zip(schema.variables, action.args))
    pre = tuple(dict.fromkeys(s.ground(binding) for s in schema.preconditions))
    add = frozenset(s.ground(binding).atom for s in schema.effects if s.positive)
    delete = frozenset(s.ground(binding).atom for s in schema.effects if not s.positive)
    return GroundOperator(action, pre, add, delete)


@lru_cache(maxsize=65536)
def _cached_operator(schema: ActionSchema, action: GroundAction) -> GroundOperator:
    return instantiate(schema, action)


def operator_for(domain: Domain, action: GroundAction) -> GroundOperator:
    schema = domain.schema(action.name)
    if len(action.args) != len(schema.params):
        raise PDDLError(f"{action}: expected {len(schema.params)} argument(s)")
    return _cached_operator(schema, action)


@dataclass(frozen=True)
class StepOutcome:
    applied: bool
    added: frozenset = frozenset()
    deleted: frozenset = frozenset()
    violated: tuple[Literal, ...] = ()

    @property
    def status(self) -> str:
        return "applied" if self.applied else "failed"


def step(state: State, action: GroundAction, truth: Domain) -> tuple[StepOutcome, State]:
    """Try ``action`` in ``state``; returns the outcome and the successor state.

    Deltas are the actual state difference, so an atom that is both deleted
    and re-added by the same action shows up in neither set.
    """
    op = operator_for(truth, action)
    violated = op.violated(state)
    if violated:
        return StepOutcome(False, violated=tuple(violated)), state
    nxt = op.apply(state)
    return StepOutcome(True, frozenset(nxt - state), frozenset(state - nxt)), nxt


def format_action_failure(action: GroundAction, violated: Sequence[Literal]) -> str:
    lits = "; ".join(str(lit) for lit in violated)
    return f"action {action} failed: unsatisfied precondition(s): {lits}"


def format_goal_failure(unsatisfied: Sequence[Literal]) -> str:
    lits = "; ".join(str(lit) for lit in unsatisfied)
    return f"{REDUCED_GOAL_MESSAGE}: unsatisfied goal literal(s): {lits}"


@dataclass
class TrajectoryFeedback:
    plan: list[GroundAction]
    valid_prefix: list[GroundAction]
    step_outcomes: list[StepOutcome]
    failed_action: GroundAction | None
    error_message: str
    goal_reached: bool
    final_state: State
    violated: tuple[Literal, ...] = field(default=())

    @property
    def executed_steps(self) -> int:
        """Environment steps consumed, counting the failing attempt."""
        return len(self.valid_prefix) + (1 if self.failed_action is not None else 0)

    @property
    def failed_prefix(self) -> tuple[GroundAction, ...] | None:
        if self.failed_action is None:
            return None
        return (*self.valid_prefix, self.failed_action)

    def to_json(self) -> dict:
        return {
            "plan": [str(a) for a in self.plan],
            "valid_prefix": [str(a) for a in self.valid_prefix],
            "step_outcomes": [
                {
                    "action": str(a),
                    "status": o.status,
                    "added": [str(x) for x in sorted(o.added)],
                    "deleted": [str(x) for x in sorted(o.deleted)],
                }
                for a, o in zip(self.valid_prefix, self.step_outcomes)
            ],
            "failed_action": None if self.failed_action is None else str(self.failed_action),
            "error_message": self.error_message,
            "goal_reached": self.goal_reached,
            "executed_steps": self.executed_steps,
            "final_state": [str(x) for x in sorted(self.final_state)],
        }


def execute_trajectory(
    problem: Problem,
    plan: Sequence[GroundAction],
    truth: Domain,
    error_messages: bool = True,
) -> TrajectoryFeedback:
    """Run ``plan`` from the initial state until it fails or ends.

    With ``error_messages=False`` the violation payload is withheld: the
    message is reduced to a constant and ``violated`` stays empty.
    """
    state = problem.init
    prefix: list[GroundAction] = []
    outcomes: list[StepOutcome] = []
    for action in plan:
        check_ground_action(action, truth, problem)
        outcome, state = step(state, action, truth)
        if not outcome.applied:
            if error_messages:
                msg = format_action_failure(action, outcome.violated)
                violated = outcome.violated
            else:
                msg, violated = REDUCED_ACTION_MESSAGE, ()
            return TrajectoryFeedback(list(plan), prefix, outcomes, action, msg, False, state, violated)
        prefix.append(action)
        outcomes.append(outcome)
    if problem.goal_reached(state):
        return TrajectoryFeedback(list(plan), prefix, outcomes, None, "", True, state)
    msg = format_goal_failure(problem.unsatisfied_goals(state)) if error_messages else REDUCED_GOAL_MESSAGE
    return TrajectoryFeedback(list(plan), prefix, outcomes, None, msg, False, state)


def parse_plan_text(text: str) -> list[GroundAction]:
    """One ground action per line; blank lines and ``;`` comments ignored."""
    plan = []
    for line in text.splitlines():
        line = line.split(";", 1)[0].strip()
        if line:
            plan.append(GroundAction.parse(line))
    return plan
