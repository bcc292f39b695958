"""The induction loop: plan under the belief, verify, sample, execute, predict, remember."""

from __future__ import annotations

import json
import logging
import random
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping

from .llm import LLMClient, PromptContext, build_semantics_prompt, parse_semantics_response
from .memory import Memory
from .metrics import accuracy
from .pddl_core import ActionSemantics, Domain, GroundAction, Problem, Role, ground_problem, parse_domain, render_domain
from .planner import PrefixTrie, SearchLimits, plan
from .rule_predictor import infer_from_feedback, violation_literals
from .samplers import (
    SamplerConfig,
    believed_valid_steps,
    filter_candidates,
    prospect,
    sample_llm,
    sample_random,
    select_failed_for_prompt,
)
from .simulator import TrajectoryFeedback, execute_trajectory

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass
class InductionConfig:
    sampler: str = "llm"  # "llm" | "random"
    llm_asp: bool = True
    rule_asp: bool = True
    prospection: bool = True
    v: int = 10
    l: int = 1
    k: int = 3
    g: int = 5
    wall_time: float | None = 30.0
    max_expansions: int | None = None
    search: str = "bfs"
    max_loops: int | None = None  # None: 1000 for random sampling, 100 with an LLM
    belief_mode: str = "bernoulli"  # "bernoulli" | "threshold"
    belief_threshold: float = 0.5
    error_messages: bool = True
    observable_deltas: bool = True
    llm_prior: bool = False
    distinct_args: bool = False
    sampler_temperature: float = 0.0
    model: str = "gpt-4"
    seed: int = 0

    @property
    def uses_llm(self) -> bool:
        return self.sampler == "llm" or self.llm_asp or self.llm_prior

    @property
    def loop_cap(self) -> int:
        if self.max_loops is not None:
            return self.max_loops
        return 100 if self.uses_llm else 1000

    def validate(self) -> None:
        if self.sampler not in ("llm", "random"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")
        if not (self.llm_asp or self.rule_asp):
            raise ConfigError("at least one semantics predictor must be enabled")
        if self.belief_mode not in ("bernoulli", "threshold"):
            raise ConfigError(f"unknown belief mode {self.belief_mode!r}")
        if self.search not in ("bfs", "gbfs"):
            raise ConfigError(f"unknown search {self.search!r}")
        if self.wall_time is None and self.max_expansions is None:
            raise ConfigError("either wall_time or max_expansions must bound the search")
        if self.loop_cap < 1:
            raise ConfigError("max_loops must be at least 1")
        SamplerConfig(self.v, self.l, self.k, self.g, self.seed)

    @property
    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(self.v, self.l, self.k, self.g, self.seed)

    @property
    def limits(self) -> SearchLimits:
        return SearchLimits(self.wall_time, self.max_expansions, self.k)

    @classmethod
    def from_dict(cls, data: Mapping) -> "InductionConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "InductionConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class RunReport:
    success: bool
    nr: int
    nes: int
    nr_without_verification: int
    nes_without_verification: int
    loops: int
    acc_trace: list[float]
    snapshot_acc_trace: list[float]
    final_acc: float
    final_belief: dict
    solution: list[str] | None
    llm_calls: int
    seed: int
    transcript: str | None = None
    wall_time_s: float = 0.0
    loop_log: list[dict] = field(default_factory=list, repr=False)

    def to_json(self, include_wall_time: bool = True, include_loops: bool = True) -> dict:
        out = asdict(self)
        if not include_wall_time:
            out.pop("wall_time_s")
        if not include_loops:
            out.pop("loop_log")
        return out


def belief_to_json(belief: Mapping[str, ActionSemantics]) -> dict:
    return {
        name: {
            "precondition": [s.literal_text() for s in sorted(sem.preconditions)],
            "effect": [s.literal_text() for s in sorted(sem.effects)],
        }
        for name, sem in belief.items()
    }


def init_prior(skeleton: Domain, problem: Problem, client: LLMClient, memory: Memory) -> dict:
    """Ask for every action's semantics before any trajectory exists."""
    ctx = PromptContext(skeleton, problem)
    predicted = {}
    for name, schema in skeleton.actions.items():
        for role in (Role.PRECONDITION, Role.EFFECT):
            text = client.ask(build_semantics_prompt(ctx, name, role), kind="prior", action=name, role=role.value)
            stmts = parse_semantics_response(text, schema, role, skeleton)
            predicted[(name, role)] = stmts
            memory.update(name, role, stmts, "llm")
    return predicted


class _Episode:
    """Bookkeeping for one induction run."""

    def __init__(self, truth: Domain, problem: Problem, config: InductionConfig):
        self.truth = truth
        self.problem = problem
        self.config = config
        self.nr = self.nes = 0
        self.nr_verify = self.nes_verify = 0

    def execute(self, plan_, verification: bool = False) -> TrajectoryFeedback:
        fb = execute_trajectory(self.problem, plan_, self.truth, error_messages=self.config.error_messages)
        self.nr += 1
        self.nes += fb.executed_steps
        if verification:
            self.nr_verify += 1
            self.nes_verify += fb.executed_steps
        return fb


def run_induction(
    truth: Domain,
    skeleton: Domain,
    problem: Problem,
    config: InductionConfig,
    client: LLMClient | None = None,
    transcript: str | Path | None = None,
    memory: Memory | None = None,
) -> RunReport:
    """Learn ``truth``'s action semantics from ``skeleton`` by interacting with the environment.

    Each loop plans under a belief sampled from memory and executes any
    solution found; on failure it samples fresh trajectories (seeded by the
    planner's candidates), executes them, and folds the predictions from
    the feedback into memory.
    """
    config.validate()
    if config.uses_llm and client is None:
        raise ConfigError("this configuration needs an LLM backend")
    if any(not a.semantics.is_empty() for a in skeleton.actions.values()):
        raise ConfigError("skeleton must not contain action semantics")
    started = time.monotonic()
    truth_sem = truth.semantics()
    if memory is None:
        memory = Memory.for_domain(skeleton)
    ground = ground_problem(skeleton, problem, distinct_args=config.distinct_args)
    scfg = config.sampler_config
    rng_sample = random.Random(f"{config.seed}:sample")
    rng_belief = random.Random(f"{config.seed}:belief")
    rng_failed = random.Random(f"{config.seed}:failed")
    limits = config.limits
    ep = _Episode(truth, problem, config)
    trie = PrefixTrie()
    failed_list: list[tuple[GroundAction, ...]] = []
    candidates: list[list[GroundAction]] = []
    acc_trace: list[float] = []
    snap_trace: list[float] = []
    loop_log: list[dict] = []
    log_fh = open(transcript, "w", encoding="utf-8") if transcript else None
    success = False
    solution = None
    belief: dict[str, ActionSemantics] = {}

    if config.llm_prior:
        init_prior(skeleton, problem, client, memory)

    def record_failure(fb: TrajectoryFeedback) -> None:
        fp = fb.failed_prefix
        if fp is not None and not trie.banned(fp):
            trie.add(fp)
            failed_list.append(fp)

    loops = 0
    try:
        for loops in range(1, config.loop_cap + 1):
            entry: dict = {"loop": loops}
            # plan under the current belief
            if config.belief_mode == "bernoulli":
                belief = memory.sample_belief(rng_belief)
            else:
                belief = memory.snapshot_belief(config.belief_threshold)
            acc_trace.append(accuracy(belief, truth_sem))
            snap_trace.append(accuracy(memory.snapshot_belief(config.belief_threshold), truth_sem))
            believed = parse_domain(render_domain(skeleton, belief))
            result = plan(believed, problem, limits, trie, ground, search=config.search)
            entry["acc"] = acc_trace[-1]
            entry["belief"] = belief_to_json(belief)
            entry["planner"] = {"kind": result.kind, "expansions": result.expansions,
                                "plan_length": None if result.plan is None else len(result.plan),
                                "candidates": [len(c) for c in result.candidates]}
            pending: list[TrajectoryFeedback] = []
            if result.solved:
                fb = ep.execute(result.plan, verification=True)
                entry["verification"] = {"plan": [str(a) for a in result.plan],
                                         "executed_steps": fb.executed_steps,
                                         "goal_reached": fb.goal_reached,
                                         "error_message": fb.error_message}
                if fb.goal_reached:
                    success = True
                    solution = result.plan
                    loop_log.append(entry)
                    if log_fh:
                        log_fh.write(json.dumps(entry) + "\n")
                    break
                record_failure(fb)
                pending.append(fb)
            else:
                candidates = result.candidates

            # sample and execute trajectories
            live = filter_candidates(candidates, trie, config.k)
            plans = _sample(config, scfg, skeleton, problem, belief, live, failed_list, ground,
                            client, rng_sample, rng_failed)
            trajectories = []
            for raw_plan in plans:
                info = {"sampled": [str(a) for a in raw_plan]}
                executed = raw_plan
                if config.prospection and config.v > 0:
                    executed = prospect(raw_plan, believed, problem, config.v, ground, rng_sample)
                    checked = min(config.v, len(executed))
                    cap_hit = executed != raw_plan and len(executed) < config.v
                    info["prospection"] = {
                        "changed": executed != raw_plan,
                        "cap_hit": cap_hit,
                        "checked": checked,
                        "believed_valid": min(checked, believed_valid_steps(executed, believed, problem)),
                    }
                fb = ep.execute(executed)
                record_failure(fb)
                info.update(executed=[str(a) for a in executed], executed_steps=fb.executed_steps,
                            goal_reached=fb.goal_reached, error_message=fb.error_message)
                trajectories.append(info)
                pending.append(fb)
            entry["trajectories"] = trajectories

            # predict and update memory: all LLM predictions first, then rule predictions
            rule_audit = []
            for fb in pending:
                if config.llm_asp:
                    _llm_predict(fb, skeleton, problem, belief, memory, client)
                if config.rule_asp:
                    rule_audit.append(_rule_predict(fb, skeleton, memory, config))
            entry["rule_channel"] = rule_audit
            loop_log.append(entry)
            if log_fh:
                log_fh.write(json.dumps(entry) + "\n")
    finally:
        if log_fh:
            log_fh.close()

    final_belief = belief
    return RunReport(
        success=success,
        nr=ep.nr,
        nes=ep.nes,
        nr_without_verification=ep.nr - ep.nr_verify,
        nes_without_verification=ep.nes - ep.nes_verify,
        loops=loops,
        acc_trace=acc_trace,
        snapshot_acc_trace=snap_trace,
        final_acc=acc_trace[-1] if acc_trace else 0.0,
        final_belief=belief_to_json(final_belief),
        solution=None if solution is None else [str(a) for a in solution],
        llm_calls=client.calls if client else 0,
        seed=config.seed,
        transcript=str(transcript) if transcript else None,
        wall_time_s=round(time.monotonic() - started, 3),
        loop_log=loop_log,
    )


def _sample(config, scfg, skeleton, problem, belief, live, failed_list, ground, client, rng_sample, rng_failed):
    if config.sampler == "random":
        return [sample_random(ground, live, config.v, rng_sample) for _ in range(config.l)]
    ctx = PromptContext(
        skeleton, problem, memory=belief, candidates=live,
        failed=select_failed_for_prompt(failed_list, config.g, rng_failed),
    )
    plans = sample_llm(ctx, scfg, client, ground, temperature=config.sampler_temperature)
    out = []
    for p in plans:
        if not p:
            log.info("empty LLM trajectory; substituting a random one")
            p = sample_random(ground, live, config.v, rng_sample)
        out.append(p)
    return out


def _llm_predict(fb, skeleton, problem, belief, memory, client) -> None:
    ctx = PromptContext(skeleton, problem, memory=belief, feedback=fb)
    for name, schema in skeleton.actions.items():
        for role in (Role.PRECONDITION, Role.EFFECT):
            text = client.ask(build_semantics_prompt(ctx, name, role), kind="semantics", action=name, role=role.value)
            memory.update(name, role, parse_semantics_response(text, schema, role, skeleton), "llm")


def _rule_predict(fb: TrajectoryFeedback, skeleton: Domain, memory: Memory, config: InductionConfig) -> dict:
    pre_channel = config.error_messages
    eff_channel = config.observable_deltas
    prediction = infer_from_feedback(fb, skeleton, preconditions=pre_channel, effects=eff_channel)
    audit = {
        "precondition_channel": pre_channel,
        "violation_literals": violation_literals(fb) if pre_channel else [],
        "message_payload": violation_literals(fb),
    }
    # touch only actions this feedback says something about
    involved = {a.name for a in fb.valid_prefix}
    if fb.failed_action is not None:
        involved.add(fb.failed_action.name)
    for name in sorted(involved):
        if eff_channel and name in {a.name for a in fb.valid_prefix}:
            memory.update(name, Role.EFFECT, prediction[name][Role.EFFECT], "rule")
        if pre_channel and fb.failed_action is not None and name == fb.failed_action.name:
            memory.update(name, Role.PRECONDITION, prediction[name][Role.PRECONDITION], "rule")
    audit["predicted"] = {
        name: {r.value: sorted(s.literal_text() for s in stmts) for r, stmts in roles.items() if stmts}
        for name, roles in prediction.items()
        if any(roles.values())
    }
    return audit
