"""Typed STRIPS subset of PDDL: parsing, rendering, grounding.

Supported requirements are ``:strips``, ``:typing`` and
``:negative-preconditions``. Preconditions and effects are conjunctions of
(possibly negated) literals whose arguments are action parameters. All
identifiers are lowercased at parse time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

SUPPORTED_REQUIREMENTS = frozenset({":strips", ":typing", ":negative-preconditions"})
ROOT_TYPE = "object"


class PDDLError(ValueError):
    """Semantic error in a PDDL document (unknown names, arity, types)."""


class PDDLSyntaxError(PDDLError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# s-expressions


class Symbol(str):
    """A lowercased token that remembers where it came from."""

    line: int
    col: int

    def __new__(cls, text: str, line: int = 0, col: int = 0) -> "Symbol":
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


class SList(list):
    line: int = 0
    col: int = 0


def tokenize(text: str) -> list[Symbol]:
    tokens: list[Symbol] = []
    i, n = 0, len(text)
    line, line_start = 1, 0
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(Symbol(ch, line, i - line_start + 1))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            tokens.append(Symbol(text[i:j].lower(), line, i - line_start + 1))
            i = j
    return tokens


def parse_sexpr(text: str) -> SList:
    """Parse exactly one top-level s-expression."""
    tokens = tokenize(text)
    if not tokens:
        raise PDDLSyntaxError("empty input", 1, 1)
    pos = 0

    def read() -> SList | Symbol:
        nonlocal pos
        if pos >= len(tokens):
            last = tokens[-1]
            raise PDDLSyntaxError("unexpected end of input, missing ')'", last.line, last.col)
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            node = SList()
            node.line, node.col = tok.line, tok.col
            while True:
                if pos >= len(tokens):
                    raise PDDLSyntaxError("unbalanced '(' opened here", tok.line, tok.col)
                if tokens[pos] == ")":
                    pos += 1
                    return node
                node.append(read())
        if tok == ")":
            raise PDDLSyntaxError("unexpected ')'", tok.line, tok.col)
        return tok

    tree = read()
    if pos != len(tokens):
        extra = tokens[pos]
        raise PDDLSyntaxError("trailing content after expression", extra.line, extra.col)
    if not isinstance(tree, SList):
        raise PDDLSyntaxError("expected '('", tree.line, tree.col)
    return tree


def _where(node) -> tuple[int, int]:
    return getattr(node, "line", 0), getattr(node, "col", 0)


def _syntax(message: str, node) -> PDDLSyntaxError:
    return PDDLSyntaxError(message, *_where(node))


# ---------------------------------------------------------------------------
# data model


class Role(str, Enum):
    PRECONDITION = "precondition"
    EFFECT = "effect"

    @property
    def plural(self) -> str:
        return "preconditions" if self is Role.PRECONDITION else "effects"


@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate, *self.args)) + ")"


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"(not {self.atom})"

    def holds(self, state: "State") -> bool:
        return (self.atom in state) == self.positive


State = frozenset  # frozenset[Atom]


@dataclass(frozen=True, order=True)
class Statement:
    """One lifted literal of an action's semantics.

    Field order gives the canonical sort key (role, predicate, args, polarity).
    """

    role: Role
    predicate: str
    args: tuple[str, ...] = ()
    positive: bool = True

    def literal_text(self) -> str:
        inner = "(" + " ".join((self.predicate, *self.args)) + ")"
        return inner if self.positive else f"(not {inner})"

    def ground(self, binding: Mapping[str, str]) -> Literal:
        return Literal(Atom(self.predicate, tuple(binding[a] for a in self.args)), self.positive)

    def complement(self) -> "Statement":
        return Statement(self.role, self.predicate, self.args, not self.positive)


def _dedup(items: Iterable[Statement]) -> tuple[Statement, ...]:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True, eq=False)
class ActionSemantics:
    """Preconditions and effects of one action.

    Statement order is kept (it drives prompt text) but equality is set-based.
    """

    preconditions: tuple[Statement, ...] = ()
    effects: tuple[Statement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "preconditions", _dedup(self.preconditions))
        object.__setattr__(self, "effects", _dedup(self.effects))
        object.__setattr__(self, "_key", (frozenset(self.preconditions), frozenset(self.effects)))
        object.__setattr__(self, "_hash", hash(self._key))
        for s in self.preconditions:
            if s.role is not Role.PRECONDITION:
                raise ValueError(f"{s} is not a precondition statement")
        for s in self.effects:
            if s.role is not Role.EFFECT:
                raise ValueError(f"{s} is not an effect statement")

    @classmethod
    def from_statements(cls, statements: Iterable[Statement]) -> "ActionSemantics":
        statements = list(statements)
        return cls(
            tuple(s for s in statements if s.role is Role.PRECONDITION),
            tuple(s for s in statements if s.role is Role.EFFECT),
        )

    def statements(self) -> frozenset[Statement]:
        return frozenset(self.preconditions) | frozenset(self.effects)

    def by_role(self, role: Role) -> tuple[Statement, ...]:
        return self.preconditions if role is Role.PRECONDITION else self.effects

    def is_empty(self) -> bool:
        return not self.preconditions and not self.effects

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActionSemantics):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        pre = " ".join(s.literal_text() for s in self.preconditions)
        eff = " ".join(s.literal_text() for s in self.effects)
        return f"ActionSemantics(pre=[{pre}], eff=[{eff}])"


EMPTY_SEMANTICS = ActionSemantics()


@dataclass(frozen=True)
class TypeHierarchy:
    parent: Mapping[str, str] = field(default_factory=dict)

    @property
    def types(self) -> frozenset[str]:
        return frozenset(self.parent) | {ROOT_TYPE}

    def __contains__(self, name: str) -> bool:
        return name == ROOT_TYPE or name in self.parent

    def ancestors(self, name: str) -> list[str]:
        chain = [name]
        while chain[-1] != ROOT_TYPE:
            chain.append(self.parent[chain[-1]])
        return chain

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TypeHierarchy):
            return NotImplemented
        return dict(self.parent) == dict(other.parent)

    def __hash__(self) -> int:
        return hash(frozenset(self.parent.items()))


@dataclass(frozen=True)
class PredicateSignature:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...] = ()
    semantics: ActionSemantics = EMPTY_SEMANTICS

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)

    @property
    def preconditions(self) -> tuple[Statement, ...]:
        return self.semantics.preconditions

    @property
    def effects(self) -> tuple[Statement, ...]:
        return self.semantics.effects

    def header(self) -> str:
        params = " ".join(f"{v} - {t}" for v, t in self.params)
        return f"({self.name} {params})" if params else f"({self.name})"


@dataclass(frozen=True)
class Domain:
    name: str
    requirements: tuple[str, ...]
    types: TypeHierarchy
    predicates: Mapping[str, PredicateSignature]
    actions: Mapping[str, ActionSchema]

    def schema(self, name: str) -> ActionSchema:
        try:
            return self.actions[name]
        except KeyError:
            raise PDDLError(f"unknown action schema {name!r}") from None

    def semantics(self) -> dict[str, ActionSemantics]:
        return {name: a.semantics for name, a in self.actions.items()}

    def without_semantics(self) -> "Domain":
        return self.with_semantics({})

    def with_semantics(self, belief: Mapping[str, ActionSemantics]) -> "Domain":
        """Swap in new semantics; actions missing from ``belief`` get none."""
        for name in belief:
            if name not in self.actions:
                raise PDDLError(f"belief references unknown action {name!r}")
        actions = {}
        for name, schema in self.actions.items():
            sem = belief.get(name, EMPTY_SEMANTICS)
            for s in sem.statements():
                _check_statement(s, schema, self)
            actions[name] = ActionSchema(schema.name, schema.params, sem)
        return Domain(self.name, self.requirements, self.types, dict(self.predicates), actions)

    def statement_count(self) -> int:
        return sum(len(a.semantics.statements()) for a in self.actions.values())


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: Mapping[str, str]
    init: frozenset
    goal: tuple[Literal, ...]

    def goal_reached(self, state: State) -> bool:
        return all(lit.holds(state) for lit in self.goal)

    def unsatisfied_goals(self, state: State) -> list[Literal]:
        return sorted(lit for lit in self.goal if not lit.holds(state))


@dataclass(frozen=True, order=True)
class GroundAction:
    name: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.name, *self.args)) + ")"

    @classmethod
    def parse(cls, text: str) -> "GroundAction":
        tree = parse_sexpr(text)
        if not tree or not all(isinstance(t, Symbol) for t in tree):
            raise _syntax("ground action must be (name obj ...)", tree)
        return cls(str(tree[0]), tuple(str(t) for t in tree[1:]))


Plan = list  # list[GroundAction]


# ---------------------------------------------------------------------------
# parsing helpers


def _parse_typed_list(items: Sequence, ctx) -> list[tuple[str, str]]:
    """``a b - t c`` -> [(a, t), (b, t), (c, object)]."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        item = items[i]
        if not isinstance(item, Symbol):
            raise _syntax("nested list not allowed in typed list", item)
        if item == "-":
            if i + 1 >= len(items) or not isinstance(items[i + 1], Symbol):
                raise _syntax("'-' must be followed by a type name", item)
            if not pending:
                raise _syntax("'-' without names before it", item)
            tname = str(items[i + 1])
            out.extend((p, tname) for p in pending)
            pending = []
            i += 2
            continue
        pending.append(str(item))
        i += 1
    out.extend((p, ROOT_TYPE) for p in pending)
    return out


def _flatten_conjunction(node, ctx: str) -> list:
    if isinstance(node, Symbol):
        raise _syntax(f"{ctx}: expected a literal or (and ...)", node)
    if len(node) == 0:
        return []
    if node[0] == "and":
        out = []
        for child in node[1:]:
            out.extend(_flatten_conjunction(child, ctx))
        return out
    return [node]


def _parse_literal(node, ctx: str) -> tuple[str, tuple[str, ...], bool]:
    positive = True
    if isinstance(node, SList) and len(node) >= 1 and node[0] == "not":
        if len(node) != 2 or not isinstance(node[1], SList):
            raise _syntax(f"{ctx}: malformed (not ...)", node)
        positive = False
        node = node[1]
    if not isinstance(node, SList) or not node or not isinstance(node[0], Symbol):
        raise _syntax(f"{ctx}: malformed literal", node)
    if node[0] in ("or", "forall", "exists", "when", "imply", "="):
        raise _syntax(f"{ctx}: '{node[0]}' is outside the supported PDDL subset", node)
    for arg in node[1:]:
        if not isinstance(arg, Symbol):
            raise _syntax(f"{ctx}: literal arguments must be symbols", arg)
    return str(node[0]), tuple(str(a) for a in node[1:]), positive


def _check_statement(stmt: Statement, schema: ActionSchema, domain: Domain) -> None:
    sig = domain.predicates.get(stmt.predicate)
    if sig is None:
        raise PDDLError(f"action {schema.name}: unknown predicate {stmt.predicate!r}")
    if sig.arity != len(stmt.args):
        raise PDDLError(
            f"action {schema.name}: predicate {stmt.predicate} takes {sig.arity} "
            f"argument(s), got {len(stmt.args)}"
        )
    variables = schema.variables
    for a in stmt.args:
        if a not in variables:
            raise PDDLError(f"action {schema.name}: {a!r} is not a parameter")


def _expect_header(tree: SList, keyword: str):
    if len(tree) < 2 or tree[0] != "define":
        raise _syntax("expected (define ...)", tree)
    head = tree[1]
    if not isinstance(head, SList) or len(head) != 2 or head[0] != keyword:
        raise _syntax(f"expected ({keyword} NAME)", head)
    return str(head[1])


def parse_domain(text: str) -> Domain:
    tree = parse_sexpr(text)
    name = _expect_header(tree, "domain")
    requirements: list[str] = []
    parent: dict[str, str] = {}
    predicates: dict[str, PredicateSignature] = {}
    raw_actions: list[SList] = []
    for section in tree[2:]:
        if not isinstance(section, SList) or not section or not isinstance(section[0], Symbol):
            raise _syntax("expected a (:section ...)", section)
        key = section[0]
        if key == ":requirements":
            for req in section[1:]:
                if req not in SUPPORTED_REQUIREMENTS:
                    raise _syntax(f"unsupported requirement {req}", req)
                requirements.append(str(req))
        elif key == ":types":
            for tname, tparent in _parse_typed_list(section[1:], section):
                if tname == ROOT_TYPE:
                    continue
                parent[tname] = tparent
        elif key == ":predicates":
            for pred in section[1:]:
                if not isinstance(pred, SList) or not pred or not isinstance(pred[0], Symbol):
                    raise _syntax("malformed predicate declaration", pred)
                pname = str(pred[0])
                if pname in predicates:
                    raise _syntax(f"duplicate predicate {pname}", pred)
                predicates[pname] = PredicateSignature(pname, tuple(_parse_typed_list(pred[1:], pred)))
        elif key == ":action":
            raw_actions.append(section)
        else:
            raise _syntax(f"unsupported domain section {key}", key)

    hierarchy = TypeHierarchy(parent)
    for tname, tparent in parent.items():
        if tparent not in hierarchy:
            raise PDDLError(f"type {tname!r} has undeclared parent {tparent!r}")
    for tname in parent:
        seen = {tname}
        cur = tname
        while cur != ROOT_TYPE:
            cur = parent[cur]
            if cur in seen:
                raise PDDLError(f"cyclic type hierarchy through {tname!r}")
            seen.add(cur)
    for sig in predicates.values():
        for _, t in sig.params:
            if t not in hierarchy:
                raise PDDLError(f"predicate {sig.name}: undeclared type {t!r}")

    skeleton = Domain(name, tuple(requirements), hierarchy, predicates, {})
    actions: dict[str, ActionSchema] = {}
    for section in raw_actions:
        schema = _parse_action(section, skeleton)
        if schema.name in actions:
            raise _syntax(f"duplicate action {schema.name}", section)
        actions[schema.name] = schema
    return Domain(name, tuple(requirements), hierarchy, predicates, actions)


def _parse_action(section: SList, domain: Domain) -> ActionSchema:
    if len(section) < 2 or not isinstance(section[1], Symbol):
        raise _syntax("action needs a name", section)
    name = str(section[1])
    fields: dict[str, object] = {}
    rest = section[2:]
    if len(rest) % 2:
        raise _syntax(f"action {name}: dangling keyword", section)
    for key, value in zip(rest[::2], rest[1::2]):
        if key not in (":parameters", ":precondition", ":effect"):
            raise _syntax(f"action {name}: unsupported field {key}", key)
        fields[str(key)] = value
    params_node = fields.get(":parameters", SList())
    if not isinstance(params_node, SList):
        raise _syntax(f"action {name}: :parameters must be a list", params_node)
    params = tuple(_parse_typed_list(params_node, params_node))
    variables = [v for v, _ in params]
    if len(set(variables)) != len(variables):
        raise _syntax(f"action {name}: repeated parameter", params_node)
    for v, t in params:
        if not v.startswith("?"):
            raise _syntax(f"action {name}: parameter {v} must start with '?'", params_node)
        if t not in domain.types:
            raise PDDLError(f"action {name}: undeclared type {t!r}")
    schema = ActionSchema(name, params)

    stmts: list[Statement] = []
    for key, role in ((":precondition", Role.PRECONDITION), (":effect", Role.EFFECT)):
        node = fields.get(key)
        if node is None:
            continue
        for lit in _flatten_conjunction(node, f"action {name} {key}"):
            pred, args, positive = _parse_literal(lit, f"action {name} {key}")
            stmt = Statement(role, pred, args, positive)
            _check_statement(stmt, schema, domain)
            stmts.append(stmt)
    semantics = ActionSemantics.from_statements(stmts)
    effects = set(semantics.effects)
    for s in semantics.effects:
        if s.complement() in effects:
            raise PDDLError(f"action {name}: effect contains both {s.literal_text()} and its negation")
    return ActionSchema(name, params, semantics)


def parse_problem(text: str, domain: Domain) -> Problem:
    tree = parse_sexpr(text)
    name = _expect_header(tree, "problem")
    domain_name = None
    objects: dict[str, str] = {}
    init_nodes: list = []
    goal_node = None
    for section in tree[2:]:
        if not isinstance(section, SList) or not section:
            raise _syntax("expected a (:section ...)", section)
        key = section[0]
        if key == ":domain":
            domain_name = str(section[1])
        elif key == ":requirements":
            continue
        elif key == ":objects":
            for obj, t in _parse_typed_list(section[1:], section):
                if t not in domain.types:
                    raise PDDLError(f"object {obj!r} has undeclared type {t!r}")
                if obj in objects:
                    raise _syntax(f"duplicate object {obj}", section)
                objects[obj] = t
        elif key == ":init":
            init_nodes = list(section[1:])
        elif key == ":goal":
            if len(section) != 2:
                raise _syntax("(:goal ...) takes exactly one formula", section)
            goal_node = section[1]
        else:
            raise _syntax(f"unsupported problem section {key}", key)
    if domain_name is not None and domain_name != domain.name:
        raise PDDLError(f"problem is for domain {domain_name!r}, not {domain.name!r}")

    def ground_literal(node, ctx: str) -> Literal:
        pred, args, positive = _parse_literal(node, ctx)
        sig = domain.predicates.get(pred)
        if sig is None:
            raise PDDLError(f"{ctx}: unknown predicate {pred!r}")
        if sig.arity != len(args):
            raise PDDLError(f"{ctx}: {pred} takes {sig.arity} argument(s), got {len(args)}")
        for arg, (_, ptype) in zip(args, sig.params):
            if arg not in objects:
                raise PDDLError(f"{ctx}: undeclared object {arg!r}")
            if not domain.types.is_subtype(objects[arg], ptype):
                raise PDDLError(f"{ctx}: object {arg} of type {objects[arg]} does not fit {pred} argument type {ptype}")
        return Literal(Atom(pred, args), positive)

    init = set()
    for node in init_nodes:
        lit = ground_literal(node, "init")
        if not lit.positive:
            raise _syntax("negative literals are not allowed in :init", node)
        init.add(lit.atom)
    goal: list[Literal] = []
    if goal_node is not None:
        for node in _flatten_conjunction(goal_node, "goal"):
            goal.append(ground_literal(node, "goal"))
    return Problem(name, domain_name or domain.name, objects, frozenset(init), tuple(dict.fromkeys(goal)))


# ---------------------------------------------------------------------------
# rendering


def _render_typed(pairs: Iterable[tuple[str, str]]) -> str:
    return " ".join(f"{v} - {t}" for v, t in pairs)


def _render_conjunction(statements: Iterable[Statement]) -> str:
    lits = [s.literal_text() for s in sorted(statements)]
    return "(and " + " ".join(lits) + ")"


def render_domain(domain: Domain, belief: Mapping[str, ActionSemantics] | None = None) -> str:
    """Render ``domain`` as PDDL, optionally with ``belief`` swapped in for its semantics."""
    if belief is not None:
        domain = domain.with_semantics(belief)
    requirements = list(domain.requirements)
    has_neg_pre = any(not s.positive for a in domain.actions.values() for s in a.preconditions)
    if has_neg_pre and ":negative-preconditions" not in requirements:
        requirements.append(":negative-preconditions")
    lines = [f"(define (domain {domain.name})"]
    if requirements:
        lines.append(f"  (:requirements {' '.join(requirements)})")
    if domain.types.parent:
        by_parent: dict[str, list[str]] = {}
        for t, p in sorted(domain.types.parent.items()):
            by_parent.setdefault(p, []).append(t)
        parts = [f"{' '.join(children)} - {p}" for p, children in sorted(by_parent.items())]
        lines.append(f"  (:types {' '.join(parts)})")
    lines.append("  (:predicates")
    for sig in domain.predicates.values():
        params = _render_typed(sig.params)
        lines.append(f"    ({sig.name}{' ' + params if params else ''})")
    lines[-1] += ")"
    for schema in domain.actions.values():
        lines.append(f"  (:action {schema.name}")
        lines.append(f"    :parameters ({_render_typed(schema.params)})")
        lines.append(f"    :precondition {_render_conjunction(schema.preconditions)}")
        lines.append(f"    :effect {_render_conjunction(schema.effects)})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def render_problem(problem: Problem) -> str:
    lines = [f"(define (problem {problem.name})", f"  (:domain {problem.domain_name})"]
    lines.append(f"  (:objects {_render_typed(problem.objects.items())})")
    lines.append("  (:init")
    for atom in sorted(problem.init):
        lines.append(f"    {atom}")
    lines[-1] += ")"
    lines.append("  (:goal (and " + " ".join(str(g) for g in problem.goal) + ")))")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# grounding and canonical forms


def objects_of_type(problem: Problem, domain: Domain, type_name: str) -> list[str]:
    return sorted(o for o, t in problem.objects.items() if domain.types.is_subtype(t, type_name))


def ground_problem(domain: Domain, problem: Problem, distinct_args: bool = False) -> list[GroundAction]:
    """All type-consistent ground actions, sorted lexicographically."""
    out: list[GroundAction] = []
    for schema in domain.actions.values():
        pools = [objects_of_type(problem, domain, t) for _, t in schema.params]
        for combo in itertools.product(*pools):
            if distinct_args and len(set(combo)) != len(combo):
                continue
            out.append(GroundAction(schema.name, combo))
    out.sort()
    return out


def check_ground_action(action: GroundAction, domain: Domain, problem: Problem) -> None:
    schema = domain.schema(action.name)
    if len(action.args) != len(schema.params):
        raise PDDLError(f"{action}: expected {len(schema.params)} argument(s)")
    for obj, (_, ptype) in zip(action.args, schema.params):
        if obj not in problem.objects:
            raise PDDLError(f"{action}: undeclared object {obj!r}")
        if not domain.types.is_subtype(problem.objects[obj], ptype):
            raise PDDLError(f"{action}: {obj} is not of type {ptype}")


def canonicalize_statement(
    raw: Statement, schema: ActionSchema, raw_params: Sequence[str] | None = None
) -> Statement:
    """Rename ``raw``'s variables to ``schema``'s parameter names by position.

    ``raw_params`` is the parameter list the raw statement was written
    against; when omitted the statement must already use the schema's names.
    """
    variables = schema.variables
    if raw_params is None:
        raw_params = variables
    if len(raw_params) != len(variables):
        raise PDDLError(f"{schema.name}: expected {len(variables)} parameter names, got {len(raw_params)}")
    rename = dict(zip(raw_params, variables))
    try:
        args = tuple(rename[a] for a in raw.args)
    except KeyError as exc:
        raise PDDLError(f"{schema.name}: {exc.args[0]!r} is not a parameter") from None
    return Statement(raw.role, raw.predicate, args, raw.positive)


def semantics_to_text(semantics: ActionSemantics) -> str:
    """Sentence form of an action's semantics, as used in prompts."""
    parts = []
    for role in (Role.PRECONDITION, Role.EFFECT):
        stmts = semantics.by_role(role)
        if stmts:
            parts.append(f"The {role.plural} are {', '.join(s.literal_text() for s in stmts)}.")
        else:
            parts.append(f"The {role.plural} are unknown.")
    return " ".join(parts)
