"""Probabilistic memory of learned action semantics with exponential forgetting."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from .pddl_core import ActionSemantics, Domain, PDDLError, Role, Statement

LLM_FORGETTING = 0.8
RULE_FORGETTING = 1.0
PRUNE_BELOW = 1e-6


@dataclass
class MemoryEntry:
    statement: Statement
    p: float = 1.0
    rule_confirmed: bool = False

    @property
    def gamma(self) -> float:
        return RULE_FORGETTING if self.rule_confirmed else LLM_FORGETTING


class Memory:
    """Per action, two ordered maps (preconditions, effects) of statement -> entry.

    Insertion order is preserved; it is the order statements appear in
    prompt text.
    """

    def __init__(self, actions: Iterable[str]):
        self.entries: dict[str, dict[Role, dict[Statement, MemoryEntry]]] = {
            a: {Role.PRECONDITION: {}, Role.EFFECT: {}} for a in actions
        }

    @classmethod
    def for_domain(cls, domain: Domain) -> "Memory":
        return cls(domain.actions)

    def _table(self, action: str, role: Role) -> dict[Statement, MemoryEntry]:
        try:
            return self.entries[action][role]
        except KeyError:
            raise PDDLError(f"memory has no action {action!r}") from None

    def update(self, action: str, role: Role, predicted: Iterable[Statement], source: str) -> None:
        """Fold one prediction for ``(action, role)`` into memory.

        Unseen predicted statements enter at p=1. Every remembered statement
        of that action and role then moves by
        ``p <- g*p + (1-g)*[predicted]`` with g=0.8, or g=1 once a rule
        prediction has confirmed it.
        """
        if source not in ("llm", "rule"):
            raise ValueError(f"unknown prediction source {source!r}")
        table = self._table(action, role)
        predicted = set(predicted)
        for s in predicted:
            if s.role is not role:
                raise ValueError(f"{s} has role {s.role.value}, expected {role.value}")
        for entry in table.values():
            hit = 1.0 if entry.statement in predicted else 0.0
            g = entry.gamma
            entry.p = g * entry.p + (1.0 - g) * hit
        for s in sorted(predicted):
            entry = table.get(s)
            if entry is None:
                entry = table[s] = MemoryEntry(s, 1.0)
            if source == "rule":
                entry.rule_confirmed = True
                entry.p = 1.0
        for s in [s for s, e in table.items() if e.p < PRUNE_BELOW]:
            del table[s]

    def probability(self, action: str, statement: Statement) -> float:
        entry = self._table(action, statement.role).get(statement)
        return 0.0 if entry is None else entry.p

    def entry(self, action: str, statement: Statement) -> MemoryEntry | None:
        return self._table(action, statement.role).get(statement)

    def rule_confirmed(self) -> dict[str, frozenset[Statement]]:
        return {
            a: frozenset(s for tbl in roles.values() for s, e in tbl.items() if e.rule_confirmed)
            for a, roles in self.entries.items()
        }

    def sample_belief(self, seed: int | random.Random) -> dict[str, ActionSemantics]:
        """Include each statement independently with probability p."""
        rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        return self._select(lambda e: rng.random() < e.p)

    def snapshot_belief(self, threshold: float) -> dict[str, ActionSemantics]:
        if not 0.0 <= threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        return self._select(lambda e: e.p >= threshold)

    def _select(self, keep) -> dict[str, ActionSemantics]:
        out = {}
        for action, roles in self.entries.items():
            pre = tuple(s for s, e in roles[Role.PRECONDITION].items() if keep(e))
            eff = tuple(s for s, e in roles[Role.EFFECT].items() if keep(e))
            out[action] = ActionSemantics(pre, eff)
        return out

    # -- checkpoints

    def to_json(self) -> dict:
        return {
            action: {
                role.value: [
                    {"statement": e.statement.literal_text(), "p": e.p, "rule_confirmed": e.rule_confirmed}
                    for e in tbl.values()
                ]
                for role, tbl in roles.items()
            }
            for action, roles in self.entries.items()
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, data: Mapping, domain: Domain) -> "Memory":
        from .llm import parse_statement_text

        mem = cls.for_domain(domain)
        for action, roles in data.items():
            schema = domain.schema(action)
            for role_name, items in roles.items():
                role = Role(role_name)
                table = mem._table(action, role)
                for item in items:
                    stmt = parse_statement_text(item["statement"], schema, role, domain)
                    if stmt is None:
                        raise PDDLError(f"checkpoint statement {item['statement']!r} is invalid for {action}")
                    table[stmt] = MemoryEntry(stmt, float(item["p"]), bool(item["rule_confirmed"]))
        return mem
