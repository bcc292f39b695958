"""Trajectory proposal: random and LLM samplers, candidate filtering, prospection."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Sequence

from .llm import LLMClient, PromptContext, build_sampler_prompt, parse_trajectory_response
from .pddl_core import Domain, GroundAction, Problem
from .planner import PrefixTrie
from .simulator import operator_for

log = logging.getLogger(__name__)

MIN_FAILED_LENGTH = 3
RESAMPLE_FACTOR = 100


@dataclass(frozen=True)
class SamplerConfig:
    v: int = 10  # prospection steps (also random-sampler length)
    l: int = 1  # trajectories per loop
    k: int = 3  # candidates passed in
    g: int = 5  # failed trajectories shown
    seed: int = 0

    def __post_init__(self):
        if self.v < 0 or self.l < 1 or self.k < 0 or self.g < 0:
            raise ValueError(f"invalid sampler config {self}")


def filter_candidates(
    candidates: Sequence[Sequence[GroundAction]], failed: PrefixTrie, k: int | None = None
) -> list[list[GroundAction]]:
    """Drop candidates that extend a failed prefix; keep at most ``k``."""
    kept = [list(c) for c in candidates if not failed.banned(c)]
    return kept if k is None else kept[:k]


def select_failed_for_prompt(
    failed: Sequence[Sequence[GroundAction]], g: int, rng: random.Random
) -> list[list[GroundAction]]:
    """Keep failed trajectories of at least 3 steps, then draw ``g`` of them."""
    pool = [list(f) for f in failed if len(f) >= MIN_FAILED_LENGTH]
    if len(pool) <= g:
        return pool
    return rng.sample(pool, g)


def sample_random(
    ground_actions: Sequence[GroundAction],
    candidates: Sequence[Sequence[GroundAction]],
    v: int,
    rng: random.Random,
) -> list[GroundAction]:
    """Longest candidate (if any) followed by ``v`` uniformly drawn actions."""
    if not ground_actions:
        raise ValueError("no ground actions to sample from")
    prefix = list(max(candidates, key=len)) if candidates else []
    return prefix + [rng.choice(ground_actions) for _ in range(v)]


def sample_llm(
    ctx: PromptContext,
    config: SamplerConfig,
    client: LLMClient,
    legal: Sequence[GroundAction],
    temperature: float | None = None,
) -> list[list[GroundAction]]:
    """Ask the model ``l`` times; each answer is parsed into a (possibly empty) plan."""
    messages = build_sampler_prompt(ctx)
    plans = []
    for i in range(config.l):
        text = client.ask(messages, temperature=temperature, kind="sampler", index=i)
        plans.append(parse_trajectory_response(text, legal))
    return plans


def prospect(
    plan: Sequence[GroundAction],
    belief: Domain,
    problem: Problem,
    v: int,
    ground_actions: Sequence[GroundAction],
    rng: random.Random,
) -> list[GroundAction]:
    """Check the first ``v`` steps of ``plan`` against the believed semantics.

    If they are all believed-applicable the plan is returned unchanged.
    Otherwise, from the first offending step on, actions are drawn uniformly
    and kept only when believed-applicable until ``v`` actions are fixed.
    When no applicable action turns up within the resampling cap, the prefix
    fixed so far is returned. Only the belief is consulted; the environment
    is never touched.
    """
    state = problem.init
    fixed: list[GroundAction] = []
    for a in plan[:v]:
        op = operator_for(belief, a)
        if not op.applicable(state):
            break
        fixed.append(a)
        state = op.apply(state)
    else:
        return list(plan)

    cap = RESAMPLE_FACTOR * len(ground_actions)
    while len(fixed) < v:
        for _ in range(cap):
            a = rng.choice(ground_actions)
            op = operator_for(belief, a)
            if op.applicable(state):
                fixed.append(a)
                state = op.apply(state)
                break
        else:
            log.info("prospection: no believed-applicable action after %d draws", cap)
            return fixed
    return fixed


def believed_valid_steps(plan: Sequence[GroundAction], belief: Domain, problem: Problem) -> int:
    """Length of the longest prefix of ``plan`` that is believed-applicable."""
    state = problem.init
    for i, a in enumerate(plan):
        op = operator_for(belief, a)
        if not op.applicable(state):
            return i
        state = op.apply(state)
    return len(plan)
