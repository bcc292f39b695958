"""Grounded forward search over a believed domain.

Returns a solution plan when one is found; otherwise the ``k`` deepest
root paths explored before the search stopped (candidate trajectories).
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .pddl_core import Domain, GroundAction, Problem, State, ground_problem
from .simulator import instantiate, operator_for


@dataclass(frozen=True)
class SearchLimits:
    wall_time: float | None = 30.0
    max_expansions: int | None = None
    k: int = 3

    def __post_init__(self):
        if self.wall_time is not None and self.wall_time <= 0:
            raise ValueError("wall_time must be positive")
        if self.max_expansions is not None and self.max_expansions <= 0:
            raise ValueError("max_expansions must be positive")
        if self.k < 0:
            raise ValueError("k must be non-negative")


@dataclass
class PlanResult:
    kind: str  # "solution" | "candidates" | "unsolvable"
    plan: list[GroundAction] | None = None
    candidates: list[list[GroundAction]] = field(default_factory=list)
    expansions: int = 0
    generated: int = 0

    @property
    def solved(self) -> bool:
        return self.kind == "solution"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "plan": None if self.plan is None else [str(a) for a in self.plan],
            "candidates": [[str(a) for a in c] for c in self.candidates],
            "expansions": self.expansions,
            "generated": self.generated,
        }


def applicable(state: State, action: GroundAction, belief: Domain) -> bool:
    return operator_for(belief, action).applicable(state)


class PrefixTrie:
    """Set of banned action-sequence prefixes."""

    __slots__ = ("children", "terminal")

    def __init__(self, prefixes: Iterable[Sequence[GroundAction]] = ()):
        self.children: dict = {}
        self.terminal = False
        for p in prefixes:
            self.add(p)

    def add(self, prefix: Sequence[GroundAction]) -> None:
        node = self
        for a in prefix:
            node = node.children.setdefault(a, PrefixTrie())
        node.terminal = True

    def banned(self, plan: Sequence[GroundAction]) -> bool:
        """True if ``plan`` extends (or equals) a stored prefix."""
        node = self
        if node.terminal:
            return True
        for a in plan:
            node = node.children.get(a)
            if node is None:
                return False
            if node.terminal:
                return True
        return False

    def __bool__(self) -> bool:
        return self.terminal or bool(self.children)


class _Task:
    """Integer-encoded ground task for fast set-based successor generation."""

    def __init__(self, belief: Domain, problem: Problem, actions: Sequence[GroundAction]):
        self.atom_ids: dict = {}
        self.actions = list(actions)
        self.ops = []
        for ga in self.actions:
            op = instantiate(belief.schema(ga.name), ga)
            pos = frozenset(self._id(l.atom) for l in op.preconditions if l.positive)
            neg = frozenset(self._id(l.atom) for l in op.preconditions if not l.positive)
            add = frozenset(self._id(a) for a in op.add)
            delete = frozenset(self._id(a) for a in op.delete)
            self.ops.append((pos, neg, add, delete))
        self.init = frozenset(self._id(a) for a in problem.init)
        self.goal_pos = frozenset(self._id(l.atom) for l in problem.goal if l.positive)
        self.goal_neg = frozenset(self._id(l.atom) for l in problem.goal if not l.positive)

    def _id(self, atom) -> int:
        i = self.atom_ids.get(atom)
        if i is None:
            i = self.atom_ids[atom] = len(self.atom_ids)
        return i

    def is_goal(self, s: frozenset) -> bool:
        return self.goal_pos <= s and self.goal_neg.isdisjoint(s)

    def successors(self, s: frozenset):
        for i, (pos, neg, add, delete) in enumerate(self.ops):
            if pos <= s and neg.isdisjoint(s):
                yield i, (s - delete) | add

    def h_add(self, s: frozenset) -> float:
        """Additive relaxed-reachability estimate over positive preconditions."""
        cost = {a: 0 for a in s}
        changed = True
        while changed:
            changed = False
            for pos, _neg, add, _del in self.ops:
                if not pos <= cost.keys():
                    continue
                c = 1 + sum(cost[p] for p in pos)
                for a in add:
                    if cost.get(a, float("inf")) > c:
                        cost[a] = c
                        changed = True
        total = 0
        for g in self.goal_pos:
            if g not in cost:
                return float("inf")
            total += cost[g]
        return total


def plan(
    belief: Domain,
    problem: Problem,
    limits: SearchLimits = SearchLimits(),
    failed_prefixes: Iterable[Sequence[GroundAction]] = (),
    ground_actions: Sequence[GroundAction] | None = None,
    search: str = "bfs",
) -> PlanResult:
    """Search for a plan under ``belief``.

    Paths that extend a failed prefix are never generated. Successors are
    generated in lexicographic action order, so results are deterministic
    whenever the budget is ``max_expansions`` rather than wall time.
    """
    if search not in ("bfs", "gbfs"):
        raise ValueError(f"unknown search {search!r}")
    if ground_actions is None:
        ground_actions = ground_problem(belief, problem)
    task = _Task(belief, problem, sorted(ground_actions))
    trie = failed_prefixes if isinstance(failed_prefixes, PrefixTrie) else PrefixTrie(failed_prefixes)

    # node arrays
    parent = [-1]
    via = [-1]
    depth = [0]
    tnode = [trie]
    if task.is_goal(task.init) and not trie.terminal:
        return PlanResult("solution", plan=[], expansions=0, generated=1)

    # a state reached along a tracked failed prefix is distinct from the same
    # state reached elsewhere: their banned continuations differ
    seen = {(task.init, id(trie)): 0}
    states = [task.init]
    counter = 0
    if search == "bfs":
        frontier: deque | list = deque([0])
    else:
        frontier = [(task.h_add(task.init), 0, 0)]

    expansions = 0
    deadline = None if limits.wall_time is None else time.monotonic() + limits.wall_time
    stopped_early = False
    while frontier:
        if limits.max_expansions is not None and expansions >= limits.max_expansions:
            stopped_early = True
            break
        if deadline is not None and (expansions & 63) == 0 and time.monotonic() > deadline:
            stopped_early = True
            break
        node = frontier.popleft() if search == "bfs" else heapq.heappop(frontier)[2]
        expansions += 1
        s = states[node]
        tn = tnode[node]
        for op_idx, succ in task.successors(s):
            child_trie = None
            if tn is not None:
                child_trie = tn.children.get(task.actions[op_idx])
                if child_trie is not None and child_trie.terminal:
                    continue
            key = (succ, id(child_trie) if child_trie is not None else None)
            if key in seen:
                continue
            nid = len(states)
            seen[key] = nid
            states.append(succ)
            parent.append(node)
            via.append(op_idx)
            depth.append(depth[node] + 1)
            tnode.append(child_trie)
            if task.is_goal(succ):
                return PlanResult(
                    "solution", plan=_path(nid, parent, via, task.actions),
                    expansions=expansions, generated=len(states),
                )
            if search == "bfs":
                frontier.append(nid)
            else:
                counter += 1
                heapq.heappush(frontier, (task.h_add(succ), counter, nid))

    candidates = _longest_paths(limits.k, parent, via, depth, task.actions, trie)
    kind = "candidates" if stopped_early else "unsolvable"
    return PlanResult(kind, candidates=candidates, expansions=expansions, generated=len(states))


def _path(nid: int, parent: list, via: list, actions: list) -> list[GroundAction]:
    out = []
    while parent[nid] != -1:
        out.append(actions[via[nid]])
        nid = parent[nid]
    out.reverse()
    return out


def _longest_paths(k, parent, via, depth, actions, trie) -> list[list[GroundAction]]:
    """Deepest explored root paths; ties broken by lexicographic action order."""
    if k == 0:
        return []
    by_depth: dict[int, list[int]] = {}
    for nid, d in enumerate(depth):
        if d > 0:
            by_depth.setdefault(d, []).append(nid)
    out: list[list[GroundAction]] = []
    for d in sorted(by_depth, reverse=True):
        paths = sorted(_path(n, parent, via, actions) for n in by_depth[d])
        for p in paths:
            if not trie.banned(p):
                out.append(p)
                if len(out) == k:
                    return out
    return out


def replay_under(belief: Domain, problem: Problem, plan_: Sequence[GroundAction]) -> tuple[bool, State]:
    """Replay ``plan_`` with believed semantics. Returns (all steps applicable, final state)."""
    state = problem.init
    for a in plan_:
        op = operator_for(belief, a)
        if not op.applicable(state):
            return False, state
        state = op.apply(state)
    return True, state
