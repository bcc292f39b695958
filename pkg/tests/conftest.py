from __future__ import annotations

import pytest

from pddl_induce.evaluation import DOMAINS, asset_text, load_bundled
from pddl_induce.pddl_core import GroundAction, parse_domain, parse_problem


def ga(text: str) -> GroundAction:
    return GroundAction.parse(text)


@pytest.fixture(scope="session")
def bundled():
    return {name: load_bundled(name) for name in DOMAINS}


@pytest.fixture(scope="session")
def bw(bundled):
    return bundled["blocksworld"]


@pytest.fixture(scope="session")
def bw_truth(bw):
    return bw[0]


@pytest.fixture(scope="session")
def bw_problem(bw):
    return bw[1]


@pytest.fixture(scope="session")
def bw_text():
    return asset_text("blocksworld", "domain.pddl")


@pytest.fixture(scope="session")
def grippers(bundled):
    return bundled["grippers"]


def make_problem(domain, objects: str, init: str, goal: str, name: str = "p"):
    text = f"""
    (define (problem {name}) (:domain {domain.name})
      (:objects {objects})
      (:init {init})
      (:goal (and {goal})))
    """
    return parse_problem(text, domain)


@pytest.fixture
def noop_domain():
    return parse_domain("""
    (define (domain tiny)
      (:requirements :strips)
      (:predicates (p))
      (:action noop :parameters () :precondition (and) :effect (and)))
    """)


# acceptance summary: test_acceptance records one line per criterion here
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{n:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
