"""Command-line entry point: parse, validate, plan, induce, sweep."""

from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys
from dataclasses import fields
from pathlib import Path
from typing import Sequence

from . import __version__
from .evaluation import DOMAINS, VARIANTS, ablation_variants, make_client, run_suite, write_outputs
from .llm import BackendError
from .memory import Memory
from .orchestrator import ConfigError, InductionConfig, run_induction
from .pddl_core import PDDLError, parse_domain, parse_problem, render_domain, render_problem
from .planner import SearchLimits, plan
from .simulator import execute_trajectory, parse_plan_text

EXIT_OK, EXIT_FAILURE, EXIT_USAGE, EXIT_BACKEND = 0, 1, 2, 3

log = logging.getLogger("pddl_induce")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep its message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load(domain_path: str, problem_path: str | None = None):
    domain = parse_domain(_read(domain_path))
    problem = parse_problem(_read(problem_path), domain) if problem_path else None
    return domain, problem


def _emit_json(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_parse(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    if args.strip_semantics:
        domain = domain.without_semantics()
    sys.stdout.write(render_domain(domain))
    if problem is not None:
        sys.stdout.write("\n" + render_problem(problem))
    return EXIT_OK


def cmd_validate(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    actions = parse_plan_text(_read(args.plan_file))
    fb = execute_trajectory(problem, actions, domain, error_messages=not args.no_error_message)
    _emit_json(fb.to_json())
    return EXIT_OK if fb.goal_reached else EXIT_FAILURE


def cmd_plan(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    limits = SearchLimits(wall_time=args.time_limit, max_expansions=args.max_expansions, k=args.k)
    result = plan(domain, problem, limits, search=args.search)
    if result.solved and not args.json:
        sys.stdout.write("".join(f"{a}\n" for a in result.plan))
    else:
        _emit_json(result.to_json())
    return EXIT_OK if result.solved else EXIT_FAILURE


def _config_from_args(args) -> InductionConfig:
    data = json.loads(_read(args.config)) if args.config else {}
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    for f in fields(InductionConfig):
        value = getattr(args, f"cfg_{f.name}", None)
        if value is not None:
            data[f.name] = None if value == _NONE else value
    if args.no_error_message:
        data["error_messages"] = False
    if args.seed is not None:
        data["seed"] = args.seed
    elif "seed" not in data:
        data["seed"] = secrets.randbelow(2**31)
        print(f"seed: {data['seed']}", file=sys.stderr)
    try:
        config = InductionConfig.from_dict(data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    config.validate()
    return config


def cmd_induce(args) -> int:
    truth, problem = _load(args.truth, args.problem)
    skeleton = parse_domain(_read(args.skeleton))
    if skeleton.name != truth.name:
        raise UsageError(f"skeleton domain {skeleton.name!r} does not match {truth.name!r}")
    problem = parse_problem(_read(args.problem), skeleton)
    config = _config_from_args(args)
    memory = Memory.for_domain(skeleton)
    if args.checkpoint and Path(args.checkpoint).exists():
        memory = Memory.from_json(json.loads(_read(args.checkpoint)), skeleton)
    client = make_client(args.backend, truth, problem, config, replay=args.replay, transcript=args.transcript) \
        if args.backend != "none" else None
    report = run_induction(truth, skeleton, problem, config, client, transcript=args.loop_log, memory=memory)
    if args.checkpoint:
        Path(args.checkpoint).write_text(memory.dumps())
    doc = report.to_json(include_wall_time=not args.no_timing, include_loops=False)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report.success else EXIT_FAILURE


def cmd_sweep(args) -> int:
    domains = args.domains or list(DOMAINS)
    unknown = set(domains) - set(DOMAINS)
    if unknown:
        raise UsageError(f"unknown domain(s): {', '.join(sorted(unknown))}")
    variants = list(args.variants or ["full"])
    if args.ablations:
        variants += list(ablation_variants(args.ablations))
    args.seed = 0 if args.seed is None else args.seed
    base = _config_from_args(args)
    seeds = args.seeds if args.seeds else [base.seed + i for i in range(args.num_seeds)]
    result = run_suite(domains, variants, seeds, base=base, backend=args.backend,
                       budget_s=args.budget, jobs=args.jobs)
    if args.out:
        paths = write_outputs(result, args.out, include_timing=not args.no_timing)
        for kind, path in paths.items():
            print(f"{kind}: {path}", file=sys.stderr)
    else:
        sys.stdout.write(result.to_csv(include_timing=not args.no_timing))
    if result.partial:
        print("budget exhausted: results are partial", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

_HELP = {
    "sampler": "trajectory sampler: llm or random",
    "llm_asp": "LLM semantics predictor",
    "rule_asp": "rule-based semantics predictor",
    "prospection": "repair sampled trajectories against the belief before execution",
    "v": "prospection steps / random trajectory length",
    "l": "trajectories sampled per loop",
    "k": "planner candidates passed to the sampler",
    "g": "failed trajectories shown to the LLM sampler",
    "wall_time": "planner wall-clock limit in seconds ('none' for no limit)",
    "max_expansions": "planner expansion limit ('none' for no limit)",
    "search": "bfs or gbfs",
    "max_loops": "loop cap (default 1000 random, 100 with an LLM)",
    "belief_mode": "bernoulli or threshold",
    "belief_threshold": "probability cut for threshold beliefs",
    "error_messages": "include violated literals in failure messages",
    "observable_deltas": "let the rule predictor see state deltas",
    "llm_prior": "ask the LLM for every action's semantics before loop 1",
    "distinct_args": "ground actions with pairwise distinct arguments only",
    "sampler_temperature": "sampling temperature for trajectory requests",
    "model": "model name sent to the backend",
}


_NONE = "none"


def _number_or_none(kind):
    def convert(text: str):
        return _NONE if text.lower() == _NONE else kind(text)
    convert.__name__ = kind.__name__
    return convert


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("induction config (overrides --config)")
    g.add_argument("--config", help="JSON file mirroring the induction config")
    for f in fields(InductionConfig):
        if f.name == "seed":
            continue
        flag = "--" + f.name.replace("_", "-")
        kw = {"dest": f"cfg_{f.name}", "default": None, "help": _HELP.get(f.name)}
        if f.default is True or f.default is False:
            g.add_argument(flag, action=argparse.BooleanOptionalAction, **kw)
        elif f.name in ("v", "l", "k", "g"):
            g.add_argument(flag, type=int, **kw)
        elif f.name in ("max_expansions", "max_loops"):
            g.add_argument(flag, type=_number_or_none(int), **kw)
        elif f.name == "wall_time":
            g.add_argument(flag, type=_number_or_none(float), **kw)
        elif f.name in ("belief_threshold", "sampler_temperature"):
            g.add_argument(flag, type=float, **kw)
        else:
            g.add_argument(flag, **kw)
    g.add_argument("--no-error-message", action="store_true",
                   help="reduce failure messages to a constant string")
    g.add_argument("--seed", type=int, help="master seed (drawn from system entropy and printed if absent)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pddl-induce", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("parse", help="type-check and pretty-print a domain (and problem)")
    p.add_argument("domain")
    p.add_argument("problem", nargs="?")
    p.add_argument("--strip-semantics", action="store_true", help="print the domain without preconditions/effects")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("validate", help="execute a plan and report feedback as JSON")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("plan_file")
    p.add_argument("--no-error-message", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="search for a plan")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--time-limit", type=float, default=30.0)
    p.add_argument("--max-expansions", type=int)
    p.add_argument("--k", type=int, default=3, help="number of candidate trajectories")
    p.add_argument("--search", choices=("bfs", "gbfs"), default="bfs")
    p.add_argument("--json", action="store_true", help="always emit the JSON result document")
    p.set_defaults(func=cmd_plan)

    backends = ("none", "oracle", "replay", "http")
    p = sub.add_parser("induce", help="learn action semantics by interaction")
    p.add_argument("truth", help="ground-truth domain (drives the simulator)")
    p.add_argument("skeleton", help="domain without preconditions/effects")
    p.add_argument("problem")
    _add_config_flags(p)
    p.add_argument("--backend", choices=backends, default="none")
    p.add_argument("--replay", help="recorded transcript for --backend replay")
    p.add_argument("--transcript", help="append LLM requests/responses here (JSONL)")
    p.add_argument("--loop-log", help="write the per-loop log here (JSONL)")
    p.add_argument("--checkpoint", help="memory snapshot to resume from and write back")
    p.add_argument("--output", help="write the report here instead of standard output")
    p.add_argument("--no-timing", action="store_true", help="omit wall-time fields from the report")
    p.set_defaults(func=cmd_induce)

    p = sub.add_parser("sweep", help="run domains x variants x seeds")
    p.add_argument("--domains", nargs="+", metavar="NAME", help=f"bundled domains (default: all of {', '.join(DOMAINS)})")
    p.add_argument("--variants", nargs="+", metavar="NAME", help=f"variants: {', '.join(VARIANTS)}")
    p.add_argument("--ablations", metavar="BASE", help="add the v/l/k/g sweep around variant BASE")
    p.add_argument("--seeds", nargs="+", type=int)
    p.add_argument("--num-seeds", type=int, default=3)
    _add_config_flags(p)
    p.add_argument("--backend", choices=("oracle", "http"), default="oracle")
    p.add_argument("--budget", type=float, help="total wall-clock budget in seconds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="directory for results.csv/.json/.dat")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (UsageError, ConfigError, PDDLError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
