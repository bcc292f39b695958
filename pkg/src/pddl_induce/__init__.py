"""Induce PDDL action semantics by closed-loop interaction with a simulator."""

from .evaluation import accuracy, load_bundled, run_suite
from .memory import Memory
from .orchestrator import InductionConfig, RunReport, run_induction
from .pddl_core import (
    ActionSemantics,
    Domain,
    GroundAction,
    Problem,
    Role,
    Statement,
    parse_domain,
    parse_problem,
    render_domain,
    render_problem,
)
from .planner import SearchLimits, plan
from .simulator import execute_trajectory

__version__ = "0.1.0"

__all__ = [
    "ActionSemantics", "Domain", "GroundAction", "InductionConfig", "Memory", "Problem",
    "Role", "RunReport", "SearchLimits", "Statement", "accuracy", "execute_trajectory",
    "load_bundled", "parse_domain", "parse_problem", "plan", "render_domain",
    "render_problem", "run_induction", "run_suite",
]
