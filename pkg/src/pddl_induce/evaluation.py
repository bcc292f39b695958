"""Bundled benchmark suite, ablation variants, sweeps and report files."""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .llm import BackendError, CompletionRequest, LLMClient, render_statements
from .metrics import accuracy  # noqa: F401  (re-exported)
from .orchestrator import InductionConfig, RunReport, run_induction
from .pddl_core import Domain, Problem, Role, parse_domain, parse_problem
from .planner import SearchLimits, plan

log = logging.getLogger(__name__)

DOMAINS = ("barman", "blocksworld", "floortile", "grippers", "storage", "termes", "tyreworld")
CSV_COLUMNS = ("domain", "variant", "seed", "success", "loops", "NR", "NES", "final_acc", "wall_time_s")


def asset_text(domain: str, filename: str) -> str:
    root = resources.files("pddl_induce") / "assets" / "domains"
    return (root / domain / filename).read_text(encoding="utf-8")


def load_bundled(domain: str) -> tuple[Domain, Problem]:
    """Ground-truth domain and its single problem."""
    if domain not in DOMAINS:
        raise KeyError(f"no bundled domain {domain!r}; choose from {', '.join(DOMAINS)}")
    truth = parse_domain(asset_text(domain, "domain.pddl"))
    return truth, parse_problem(asset_text(domain, "problem.pddl"), truth)


class OracleBackend:
    """Scripted stand-in for a perfect model, informed by the ground truth.

    Sampler requests get an optimal plan; semantics requests get the true
    statements of the requested action and role. Requests are routed by the
    metadata the orchestrator attaches, never by prompt text.
    """

    def __init__(self, truth: Domain, problem: Problem):
        self.truth = truth
        self.problem = problem
        self._plan: list | None = None

    def complete_once(self, request: CompletionRequest) -> str:
        kind = request.metadata.get("kind")
        if kind == "sampler":
            if self._plan is None:
                result = plan(self.truth, self.problem, SearchLimits(wall_time=None))
                self._plan = result.plan or []
            return "\n".join(str(a) for a in self._plan)
        if kind in ("semantics", "prior"):
            schema = self.truth.schema(request.metadata["action"])
            role = Role(request.metadata["role"])
            return render_statements(schema.semantics.by_role(role))
        raise BackendError(f"oracle backend cannot route request kind {kind!r}")


# ---------------------------------------------------------------------------
# variants

def _full(c: InductionConfig) -> InductionConfig:
    return replace(c, sampler="llm", llm_asp=True, rule_asp=True, prospection=True)


VARIANTS: dict[str, Callable[[InductionConfig], InductionConfig]] = {
    "full": _full,
    "w/o prospect.": lambda c: replace(_full(c), v=0),
    "w/o LLM-TS": lambda c: replace(_full(c), sampler="random"),
    "w/o LLM-ASP": lambda c: replace(_full(c), llm_asp=False),
    "w/o rule-ASP": lambda c: replace(_full(c), rule_asp=False),
    "random": lambda c: replace(c, sampler="random", llm_asp=False, rule_asp=True, prospection=True),
    "random w/o prospect.": lambda c: replace(c, sampler="random", llm_asp=False, rule_asp=True, prospection=False),
    "no error message": lambda c: replace(_full(c), error_messages=False),
    "llm prior": lambda c: replace(_full(c), llm_prior=True),
}

ABLATION_AXES = {"v": (0, 1, 5, 10), "l": (1, 3, 5), "k": (0, 1, 3), "g": (0, 1, 5)}


def ablation_variants(base: str = "full") -> dict[str, Callable[[InductionConfig], InductionConfig]]:
    """One variant per value on each ablation axis, everything else at ``base``."""
    out = {}
    for axis, values in ABLATION_AXES.items():
        for value in values:
            out[f"{base} {axis}={value}"] = (
                lambda c, axis=axis, value=value: replace(VARIANTS[base](c), **{axis: value})
            )
    return out


def resolve_variant(name: str) -> Callable[[InductionConfig], InductionConfig]:
    if name in VARIANTS:
        return VARIANTS[name]
    for base in VARIANTS:
        table = ablation_variants(base)
        if name in table:
            return table[name]
    raise KeyError(f"unknown variant {name!r}")


# ---------------------------------------------------------------------------
# suite


@dataclass
class SuiteResult:
    rows: list[dict] = field(default_factory=list)
    reports: list[dict] = field(default_factory=list)
    partial: bool = False

    def aggregates(self) -> list[dict]:
        groups: dict[tuple, list[dict]] = {}
        for row in self.rows:
            groups.setdefault((row["domain"], row["variant"]), []).append(row)
        out = []
        for (domain, variant), rows in groups.items():
            agg = {"domain": domain, "variant": variant, "seed": "mean", "runs": len(rows)}
            agg["success"] = sum(r["success"] for r in rows) / len(rows)
            for key in ("loops", "NR", "NES", "final_acc", "wall_time_s"):
                vals = [r[key] for r in rows]
                agg[key] = statistics.fmean(vals)
                agg[f"{key}_min"] = min(vals)
                agg[f"{key}_max"] = max(vals)
            out.append(agg)
        return out

    def to_csv(self, include_timing: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in [*self.rows, *self.aggregates()]:
            row = dict(row)
            for key in ("final_acc", "NR", "NES", "loops", "success"):
                if isinstance(row[key], float):
                    row[key] = f"{row[key]:.6g}"
            row["wall_time_s"] = f"{row['wall_time_s']:.3f}" if include_timing else ""
            writer.writerow(row)
        return buf.getvalue()

    def to_json(self, include_timing: bool = True) -> dict:
        reports = self.reports
        if not include_timing:
            reports = [{k: v for k, v in r.items() if k != "wall_time_s"} for r in reports]
        return {"partial": self.partial, "runs": reports, "aggregates": self.aggregates()}

    def to_gnuplot(self) -> str:
        """Whitespace-separated mean NES/NR/Acc per (domain, variant), for bar charts."""
        lines = ["# domain variant NES_mean NES_min NES_max NR_mean final_acc_mean success_rate"]
        for a in self.aggregates():
            variant = a["variant"].replace(" ", "_")
            lines.append(
                f"{a['domain']} {variant} {a['NES']:.3f} {a['NES_min']} {a['NES_max']} "
                f"{a['NR']:.3f} {a['final_acc']:.4f} {a['success']:.3f}"
            )
        return "\n".join(lines) + "\n"


def make_client(backend: str, truth: Domain, problem: Problem, config: InductionConfig,
                replay: str | None = None, transcript: str | None = None) -> LLMClient | None:
    from .llm import HTTPBackend, ScriptedBackend

    if not config.uses_llm:
        return None
    if backend == "oracle":
        impl = OracleBackend(truth, problem)
    elif backend == "replay":
        if replay is None:
            raise ValueError("replay backend needs a replay file")
        impl = ScriptedBackend.from_file(replay)
    elif backend == "http":
        impl = HTTPBackend()
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return LLMClient(impl, model=config.model, temperature=0.0, transcript=transcript)


def run_cell(domain: str, variant: str, seed: int, base: Mapping, backend: str) -> dict:
    truth, problem = load_bundled(domain)
    config = resolve_variant(variant)(replace(InductionConfig.from_dict(dict(base)), seed=seed))
    client = make_client(backend, truth, problem, config)
    report = run_induction(truth, truth.without_semantics(), problem, config, client)
    out = report.to_json(include_loops=False)
    out.update(domain=domain, variant=variant)
    return out


def _row(report: dict) -> dict:
    return {
        "domain": report["domain"],
        "variant": report["variant"],
        "seed": report["seed"],
        "success": int(report["success"]),
        "loops": report["loops"],
        "NR": report["nr"],
        "NES": report["nes"],
        "final_acc": report["final_acc"],
        "wall_time_s": report["wall_time_s"],
    }


def run_suite(
    domains: Sequence[str],
    variants: Sequence[str],
    seeds: Iterable[int],
    base: InductionConfig | Mapping | None = None,
    backend: str = "oracle",
    budget_s: float | None = None,
    jobs: int = 1,
) -> SuiteResult:
    """Run every (domain, variant, seed) cell; rows come back in matrix order.

    Cells not started before ``budget_s`` elapses are skipped and the result
    is flagged partial.
    """
    if base is None:
        base = InductionConfig()
    base_dict = base.__dict__.copy() if isinstance(base, InductionConfig) else dict(base)
    for v in variants:
        resolve_variant(v)
    cells = [(d, v, s) for d in domains for v in variants for s in seeds]
    result = SuiteResult()
    started = time.monotonic()

    def over_budget() -> bool:
        return budget_s is not None and time.monotonic() - started > budget_s

    if jobs <= 1:
        for d, v, s in cells:
            if over_budget():
                result.partial = True
                break
            result.reports.append(run_cell(d, v, s, base_dict, backend))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_cell, d, v, s, base_dict, backend) for d, v, s in cells]
            for fut in futures:
                remaining = None if budget_s is None else max(0.0, budget_s - (time.monotonic() - started))
                try:
                    result.reports.append(fut.result(timeout=remaining))
                except TimeoutError:
                    result.partial = True
                    for f in futures:
                        f.cancel()
                    break
    result.rows = [_row(r) for r in result.reports]
    return result


def write_outputs(result: SuiteResult, out_dir: str | Path, include_timing: bool = True) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "results.csv", "json": out / "results.json", "dat": out / "results.dat"}
    paths["csv"].write_text(result.to_csv(include_timing))
    paths["json"].write_text(json.dumps(result.to_json(include_timing), indent=2) + "\n")
    paths["dat"].write_text(result.to_gnuplot())
    return paths
