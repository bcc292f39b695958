"""Prompt construction, chat-completion backends and response parsing."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template
from typing import Callable, Iterable, Mapping, Protocol, Sequence

import httpx

from .pddl_core import (
    ActionSchema,
    ActionSemantics,
    Domain,
    GroundAction,
    Problem,
    Role,
    Statement,
    semantics_to_text,
)
from .simulator import TrajectoryFeedback

log = logging.getLogger(__name__)

PROMPT_VERSION = "v1"
API_KEY_ENV = "PDDL_INDUCE_API_KEY"
BASE_URL_ENV = "PDDL_INDUCE_BASE_URL"
DEFAULT_BASE_URL = "https://api.openai.com/v1"


def load_asset(name: str) -> str:
    return (resources.files("pddl_induce") / "assets" / "prompts" / name).read_text(encoding="utf-8")


# ---------------------------------------------------------------------------
# prompt context and builders


@dataclass
class PromptContext:
    domain: Domain
    problem: Problem
    memory: Mapping[str, ActionSemantics] = field(default_factory=dict)
    candidates: Sequence[Sequence[GroundAction]] = ()
    failed: Sequence[Sequence[GroundAction]] = ()
    one_shot: str | None = None
    feedback: TrajectoryFeedback | None = None


def describe_domain(domain: Domain) -> str:
    lines = [f"Domain: {domain.name}"]
    lines.append("Types: " + ", ".join(sorted(domain.types.types)))
    lines.append("Predicates:")
    for sig in domain.predicates.values():
        params = " ".join(f"{v} - {t}" for v, t in sig.params)
        lines.append(f"({sig.name}{' ' + params if params else ''})")
    lines.append("Actions:")
    lines.extend(schema.header() for schema in domain.actions.values())
    return "\n".join(lines)


def describe_problem(problem: Problem) -> str:
    objects = ", ".join(f"{o} - {t}" for o, t in problem.objects.items())
    init = " ".join(str(a) for a in sorted(problem.init))
    goal = " ".join(str(g) for g in problem.goal)
    return f"Objects: {objects}\nInitial state: {init}\nGoal: {goal}"


def describe_memory(domain: Domain, memory: Mapping[str, ActionSemantics]) -> str:
    lines = []
    for name, schema in domain.actions.items():
        lines.append(f"{schema.header()}: {semantics_to_text(memory.get(name, ActionSemantics()))}")
    return "\n".join(lines)


def _numbered_plans(title: str, plans: Sequence[Sequence[GroundAction]]) -> str:
    out = []
    for i, p in enumerate(plans, 1):
        out.append(f"{title} {i}:")
        out.extend(str(a) for a in p)
    return "\n".join(out)


def _messages(user: str) -> list[dict]:
    return [
        {"role": "system", "content": load_asset(f"system_{PROMPT_VERSION}.txt").strip()},
        {"role": "user", "content": user},
    ]


def build_sampler_prompt(ctx: PromptContext) -> list[dict]:
    candidate_section = ""
    if ctx.candidates:
        candidate_section = (
            "\nThe planner explored these partial trajectories without reaching the goal:\n"
            + _numbered_plans("Candidate", ctx.candidates)
            + "\nPick one of the candidate trajectories, and generate a trajectory starting from it.\n"
        )
    failed_section = ""
    if ctx.failed:
        failed_section = (
            "\nThese trajectories failed when executed; do not begin your plan with them:\n"
            + _numbered_plans("Failed trajectory", ctx.failed)
            + "\n"
        )
    one_shot = ctx.one_shot if ctx.one_shot is not None else load_asset(f"oneshot_blocksworld_{PROMPT_VERSION}.txt")
    text = Template(load_asset(f"sampler_{PROMPT_VERSION}.txt")).substitute(
        domain_info=describe_domain(ctx.domain),
        problem_info=describe_problem(ctx.problem),
        memory_text=describe_memory(ctx.domain, ctx.memory),
        candidate_section=candidate_section,
        failed_section=failed_section,
        one_shot=one_shot.strip(),
    )
    return _messages(text)


def describe_feedback(feedback: TrajectoryFeedback | None) -> str:
    if feedback is None:
        return "No trajectory has been executed yet."
    lines = ["A trajectory was executed in the environment.", "Valid actions:"]
    if feedback.valid_prefix:
        lines.extend(f"{i}. {a}" for i, a in enumerate(feedback.valid_prefix, 1))
    else:
        lines.append("none")
    lines.append("State transitions:")
    if feedback.step_outcomes:
        for i, (a, o) in enumerate(zip(feedback.valid_prefix, feedback.step_outcomes), 1):
            added = " ".join(str(x) for x in sorted(o.added)) or "nothing"
            deleted = " ".join(str(x) for x in sorted(o.deleted)) or "nothing"
            lines.append(f"{i}. {a}: added {added}; deleted {deleted}")
    else:
        lines.append("none")
    if feedback.goal_reached:
        lines.append("Environment message: the goal was reached.")
    else:
        lines.append(f"Environment message: {feedback.error_message}")
    return "\n".join(lines)


def build_semantics_prompt(ctx: PromptContext, action: str, role: Role) -> list[dict]:
    schema = ctx.domain.schema(action)
    text = Template(load_asset(f"semantics_{PROMPT_VERSION}.txt")).substitute(
        domain_info=describe_domain(ctx.domain),
        problem_info=describe_problem(ctx.problem),
        memory_text=describe_memory(ctx.domain, ctx.memory),
        trajectory_section=describe_feedback(ctx.feedback),
        role=role.plural,
        header=schema.header(),
    )
    return _messages(text)


# ---------------------------------------------------------------------------
# completion transport


class BackendError(RuntimeError):
    pass


class TransientBackendError(BackendError):
    """Timeouts, connection failures, 429 and 5xx; worth retrying."""


class ReplayMiss(BackendError):
    pass


@dataclass
class CompletionRequest:
    messages: list[dict]
    model: str = "gpt-4"
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 60.0
    retries: int = 3
    # routing hints for scripted/oracle backends; never sent over the wire
    metadata: dict = field(default_factory=dict)


def prompt_hash(messages: Sequence[Mapping]) -> str:
    blob = json.dumps(list(messages), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Backend(Protocol):
    def complete_once(self, request: CompletionRequest) -> str: ...


class HTTPBackend:
    """OpenAI-style ``POST {base_url}/chat/completions``."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None, client: httpx.Client | None = None):
        self.base_url = (base_url or os.environ.get(BASE_URL_ENV) or DEFAULT_BASE_URL).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.client = client or httpx.Client()

    def complete_once(self, request: CompletionRequest) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        try:
            resp = self.client.post(
                f"{self.base_url}/chat/completions", json=body, headers=headers, timeout=request.timeout
            )
        except (httpx.TimeoutException, httpx.TransportError) as exc:
            raise TransientBackendError(f"{type(exc).__name__}: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientBackendError(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise BackendError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"malformed completion payload: {exc}") from exc


class ScriptedBackend:
    """Replays recorded responses keyed by prompt hash.

    Identical prompts receive the recorded responses for that hash in order.
    """

    def __init__(self, records: Iterable[Mapping]):
        self.buckets: dict[str, list[str]] = {}
        for rec in records:
            self.buckets.setdefault(rec["prompt_hash"], []).append(rec["response"])
        self.cursor: dict[str, int] = {}

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "ScriptedBackend":
        text = Path(path).read_text(encoding="utf-8")
        stripped = text.lstrip()
        if stripped.startswith("["):
            records = json.loads(text)
        else:  # a transcript log: one JSON object per line
            records = [json.loads(line) for line in text.splitlines() if line.strip()]
        return cls(records)

    def complete_once(self, request: CompletionRequest) -> str:
        h = prompt_hash(request.messages)
        bucket = self.buckets.get(h, [])
        i = self.cursor.get(h, 0)
        if i >= len(bucket):
            raise ReplayMiss(f"no recorded response #{i + 1} for prompt {h[:12]}")
        self.cursor[h] = i + 1
        return bucket[i]


def complete(
    request: CompletionRequest,
    backend: Backend,
    sleep: Callable[[float], None] = time.sleep,
    backoff: float = 1.0,
) -> str:
    """Call ``backend``; transient failures are retried ``request.retries`` times."""
    attempt = 0
    while True:
        try:
            return backend.complete_once(request)
        except TransientBackendError as exc:
            if attempt >= request.retries:
                raise BackendError(f"giving up after {attempt} retries: {exc}") from exc
            delay = backoff * (2**attempt)
            log.warning("transient backend failure (%s); retry %d in %.1fs", exc, attempt + 1, delay)
            sleep(delay)
            attempt += 1


class LLMClient:
    """Backend plus request defaults and an append-only transcript log."""

    def __init__(
        self,
        backend: Backend,
        model: str = "gpt-4",
        temperature: float = 0.0,
        retries: int = 3,
        timeout: float = 60.0,
        transcript: str | os.PathLike | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.backend = backend
        self.model = model
        self.temperature = temperature
        self.retries = retries
        self.timeout = timeout
        self.transcript = Path(transcript) if transcript else None
        self.sleep = sleep
        self.calls = 0

    def ask(self, messages: list[dict], temperature: float | None = None, **metadata) -> str:
        request = CompletionRequest(
            messages,
            model=self.model,
            temperature=self.temperature if temperature is None else temperature,
            timeout=self.timeout,
            retries=self.retries,
            metadata=metadata,
        )
        response = complete(request, self.backend, sleep=self.sleep)
        self.calls += 1
        if self.transcript is not None:
            with self.transcript.open("a", encoding="utf-8") as fh:
                record = {
                    "prompt_hash": prompt_hash(messages),
                    "metadata": metadata,
                    "messages": messages,
                    "response": response,
                }
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        return response


# ---------------------------------------------------------------------------
# response parsing

_ACTION_RE = re.compile(r"\(\s*([^()\s]+(?:\s+[^()\s]+)*)\s*\)")
_LITERAL_RE = re.compile(r"\(\s*not\s*\(\s*([^()]*?)\s*\)\s*\)|\(\s*([^()]*?)\s*\)", re.IGNORECASE)


def parse_trajectory_response(text: str, legal: Iterable[GroundAction]) -> list[GroundAction]:
    """Ground actions found in ``text``, in order; anything illegal is skipped."""
    legal = set(legal)
    plan = []
    for line in text.splitlines():
        for m in _ACTION_RE.finditer(line):
            parts = m.group(1).lower().split()
            action = GroundAction(parts[0], tuple(parts[1:]))
            if action in legal:
                plan.append(action)
            else:
                log.info("skipping unknown or ill-typed action %s", action)
    return plan


def _statement_from_parts(parts: list[str], positive: bool, schema: ActionSchema, role: Role, domain: Domain):
    if not parts:
        return None
    pred, args = parts[0], tuple(parts[1:])
    sig = domain.predicates.get(pred)
    if sig is None:
        log.info("dropping literal over undeclared predicate %s", pred)
        return None
    if sig.arity != len(args):
        log.info("dropping (%s ...): arity %d, expected %d", pred, len(args), sig.arity)
        return None
    if any(a not in schema.variables for a in args):
        log.info("dropping (%s ...): argument outside the parameters of %s", pred, schema.name)
        return None
    return Statement(role, pred, args, positive)


def parse_semantics_response(text: str, schema: ActionSchema, role: Role, domain: Domain) -> set[Statement]:
    out: set[Statement] = set()
    for m in _LITERAL_RE.finditer(text):
        if m.group(1) is not None:
            parts, positive = m.group(1).lower().split(), False
        else:
            parts, positive = m.group(2).lower().split(), True
        if parts and parts[0] == "not":
            continue
        stmt = _statement_from_parts(parts, positive, schema, role, domain)
        if stmt is not None:
            out.add(stmt)
    return out


def parse_statement_text(text: str, schema: ActionSchema, role: Role, domain: Domain) -> Statement | None:
    found = parse_semantics_response(text, schema, role, domain)
    return next(iter(found)) if len(found) == 1 else None


def render_statements(statements: Iterable[Statement]) -> str:
    """One literal per line; inverse of :func:`parse_semantics_response`."""
    return "\n".join(s.literal_text() for s in sorted(statements))
