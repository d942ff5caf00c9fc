"""Planning data model: domains, instances, states and the input format.

The input format is a typed-STRIPS subset of PDDL s-expressions extended
with integer fluents (``:functions``, ``assign/increase/decrease`` effects
and ``=/</>`` assertions).  Fluents are integer valued; boolean predicates
take values in {0,1}.  States follow the closed-world assumption: any
grounded fluent not present in the table reads 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

OBJECT_TYPE = "object"

BOOLEAN = "boolean"
NUMERIC = "numeric"

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class ParseError(Exception):
    """Syntax error with 1-based line/column position."""

    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class SemanticError(Exception):
    """Validation error naming the offending symbol."""

    def __init__(self, message, symbol=None):
        super().__init__(message)
        self.symbol = symbol


class OverflowRuntimeError(Exception):
    """Signed 64-bit overflow in a numeric effect."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class PredicateSignature:
    name: str
    argument_types: tuple[str, ...]
    kind: str = BOOLEAN  # BOOLEAN or NUMERIC

    @property
    def arity(self) -> int:
        return len(self.argument_types)


@dataclass(frozen=True)
class FluentRef:
    """A fluent applied to terms (scheme variables or object indices)."""

    pred: str
    args: tuple

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Assertion:
    """lhs <op> rhs where each side is a FluentRef or an int constant."""

    lhs: object
    op: str  # "==", "!=", "<", ">"
    rhs: object


@dataclass(frozen=True)
class Assignment:
    """target := / += / -= operand, operand read from the pre-state."""

    target: FluentRef
    op: str  # "assign", "increase", "decrease"
    operand: object  # FluentRef or int


@dataclass(frozen=True)
class ActionScheme:
    name: str
    parameters: tuple[tuple[str, str], ...]  # (variable, type) pairs
    precondition: tuple[Assertion, ...]
    effects: tuple[Assignment, ...]

    @property
    def arity(self) -> int:
        return len(self.parameters)

    @property
    def parameter_types(self) -> tuple[str, ...]:
        return tuple(t for _, t in self.parameters)


@dataclass(frozen=True)
class Domain:
    name: str
    types: tuple[str, ...]  # declaration order, always contains "object"
    predicates: tuple[PredicateSignature, ...]
    schemes: tuple[ActionScheme, ...]

    def predicate(self, name: str) -> PredicateSignature:
        for p in self.predicates:
            if p.name == name:
                return p
        raise SemanticError(f"unknown fluent '{name}'", name)

    def scheme(self, name: str) -> ActionScheme:
        for s in self.schemes:
            if s.name == name:
                return s
        raise SemanticError(f"unknown action '{name}'", name)


@dataclass(frozen=True)
class Instance:
    """Typed object set, initial assignment and goal target values.

    Object order within a type is the declaration order of the instance
    file; it defines pointer index 0..|objects of that type|-1.
    """

    name: str
    domain_name: str
    objects: dict[str, tuple[str, ...]]  # type -> ordered object names
    init: tuple[Assignment, ...]  # grounded, args are (type, index)
    goal: tuple[tuple[FluentRef, int], ...]  # grounded fluent -> target value

    def count(self, type_name: str) -> int:
        return len(self.objects.get(type_name, ()))

    def object_name(self, type_name: str, index: int) -> str:
        return self.objects[type_name][index]

    def object_index(self, type_name: str, name: str) -> int:
        return self.objects[type_name].index(name)


@dataclass(frozen=True)
class GPProblem:
    domain: Domain
    instances: tuple[Instance, ...]

    def __post_init__(self):
        if not self.instances:
            raise SemanticError("a GP problem needs at least one instance")
        for inst in self.instances:
            if inst.domain_name != self.domain.name:
                raise SemanticError(
                    f"instance '{inst.name}' references domain "
                    f"'{inst.domain_name}', not '{self.domain.name}'",
                    inst.name,
                )


class State:
    """Total assignment from grounded fluents to integers, closed world.

    Keys are (predicate name, object-index tuple); absent keys read 0 and
    writing 0 removes the entry, so the table never stores more than
    sum_k n_k * |Omega|^k entries.
    """

    __slots__ = ("table",)

    def __init__(self, table=None):
        self.table = dict(table) if table else {}

    def get(self, pred: str, idx: tuple = ()) -> int:
        return self.table.get((pred, idx), 0)

    def set(self, pred: str, idx: tuple, value: int):
        if value == 0:
            self.table.pop((pred, idx), None)
        else:
            if not (INT64_MIN <= value <= INT64_MAX):
                raise OverflowRuntimeError(f"{pred}{idx} = {value}")
            self.table[(pred, idx)] = value

    def clone(self) -> "State":
        return State(self.table)

    def __eq__(self, other):
        return isinstance(other, State) and self.table == other.table

    def __len__(self):
        return len(self.table)

    def __repr__(self):
        items = ", ".join(
            f"{p}{list(i)}={v}" for (p, i), v in sorted(self.table.items())
        )
        return f"State({items})"


# ---------------------------------------------------------------------------
# s-expression reader


_TOKEN = re.compile(r"""\(|\)|[^\s();]+""")


def _tokenize(text):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            col += 1
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"stray character {c!r}", line, col)
        tok = m.group(0)
        yield tok, line, col
        col += len(tok)
        i = m.end()


def _read_sexpr(text):
    """Parse one s-expression; returns nested lists of (token, line, col)."""
    stack = [[]]
    last = (1, 1)
    for tok, line, col in _tokenize(text):
        last = (line, col)
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append((tok, line, col))
    if len(stack) != 1:
        raise ParseError("unbalanced '('", *last)
    top = stack[0]
    if len(top) != 1 or not isinstance(top[0], list):
        raise ParseError("expected a single top-level form", *last)
    return top[0]


def _sym(node):
    if not isinstance(node, tuple):
        raise ParseError("expected a symbol, found a list", *_pos(node))
    return node[0]


def _pos(node):
    while isinstance(node, list):
        if not node:
            return (0, 0)
        node = node[0]
    return node[1], node[2]


def _parse_typed_list(nodes, default_type=OBJECT_TYPE):
    """Parse ``a b - t c d - u`` into [(a,t),(b,t),(c,u),(d,u)]."""
    out = []
    pending = []
    it = iter(nodes)
    for node in it:
        tok = _sym(node)
        if tok == "-":
            try:
                tnode = next(it)
            except StopIteration:
                raise ParseError("dangling '-' in typed list", *_pos(node))
            tname = _sym(tnode)
            out.extend((name, tname) for name in pending)
            pending = []
        else:
            pending.append(tok)
    out.extend((name, default_type) for name in pending)
    return out


def _is_int(tok):
    return re.fullmatch(r"-?\d+", tok) is not None


# ---------------------------------------------------------------------------
# domain parsing


def _parse_term(node, pred_table, params, what):
    """A term in a precondition/effect: fluent ref, variable or int."""
    if isinstance(node, tuple):
        tok = _sym(node)
        if _is_int(tok):
            return int(tok)
        raise ParseError(f"expected fluent or integer in {what}, got '{tok}'",
                         *_pos(node))
    head = _sym(node[0])
    if head not in pred_table:
        raise SemanticError(f"undeclared fluent '{head}' in {what}", head)
    sig = pred_table[head]
    args = []
    for argnode in node[1:]:
        v = _sym(argnode)
        if v not in params:
            raise SemanticError(
                f"variable '{v}' of fluent '{head}' not in parameters", v)
        args.append(v)
    if len(args) != sig.arity:
        raise SemanticError(
            f"fluent '{head}' used with {len(args)} args, arity is {sig.arity}",
            head)
    for v, t in zip(args, (p for p in sig.argument_types)):
        if params[v] != t:
            raise SemanticError(
                f"argument '{v}' of '{head}' has type '{params[v]}', "
                f"expected '{t}'", v)
    return FluentRef(head, tuple(args))


def _flatten_and(node):
    if isinstance(node, list) and node and not isinstance(node[0], list) \
            and _sym(node[0]) == "and":
        out = []
        for sub in node[1:]:
            out.extend(_flatten_and(sub))
        return out
    return [node]


_CMP = {"=": "==", "<": "<", ">": ">"}


def _parse_assertion(node, pred_table, params):
    if isinstance(node, tuple):
        raise ParseError("expected an assertion", *_pos(node))
    head = _sym(node[0])
    if head == "not":
        inner = node[1]
        ihead = _sym(inner[0])
        if ihead == "=":
            lhs = _parse_term(inner[1], pred_table, params, "precondition")
            rhs = _parse_term(inner[2], pred_table, params, "precondition")
            return Assertion(lhs, "!=", rhs)
        ref = _parse_term(inner, pred_table, params, "precondition")
        _require_boolean(pred_table, ref)
        return Assertion(ref, "==", 0)
    if head in _CMP:
        lhs = _parse_term(node[1], pred_table, params, "precondition")
        rhs = _parse_term(node[2], pred_table, params, "precondition")
        return Assertion(lhs, _CMP[head], rhs)
    ref = _parse_term(node, pred_table, params, "precondition")
    _require_boolean(pred_table, ref)
    return Assertion(ref, "==", 1)


def _require_boolean(pred_table, ref):
    if pred_table[ref.pred].kind != BOOLEAN:
        raise SemanticError(
            f"numeric fluent '{ref.pred}' used as a literal", ref.pred)


def _parse_effect(node, pred_table, params):
    head = _sym(node[0])
    if head == "not":
        ref = _parse_term(node[1], pred_table, params, "effect")
        _require_boolean(pred_table, ref)
        return Assignment(ref, "assign", 0)
    if head in ("assign", "increase", "decrease"):
        target = _parse_term(node[1], pred_table, params, "effect")
        if not isinstance(target, FluentRef):
            raise SemanticError(f"'{head}' target must be a fluent")
        operand = _parse_term(node[2], pred_table, params, "effect")
        return Assignment(target, head, operand)
    ref = _parse_term(node, pred_table, params, "effect")
    _require_boolean(pred_table, ref)
    return Assignment(ref, "assign", 1)


def _parse_scheme(node, pred_table, types):
    if _sym(node[0]) != ":action":
        raise ParseError("expected (:action ...)", *_pos(node))
    name = _sym(node[1])
    sections = {}
    i = 2
    while i < len(node):
        key = _sym(node[i])
        sections[key] = node[i + 1]
        i += 2
    raw_params = sections.get(":parameters", [])
    params = []
    for var, tname in _parse_typed_list(raw_params):
        if not var.startswith("?"):
            raise SemanticError(f"parameter '{var}' must start with '?'", var)
        if tname not in types:
            raise SemanticError(
                f"action '{name}' parameter '{var}' has undeclared type "
                f"'{tname}'", tname)
        params.append((var, tname))
    if len({v for v, _ in params}) != len(params):
        raise SemanticError(f"duplicate parameter in action '{name}'", name)
    ptable = dict(params)

    precond = []
    if ":precondition" in sections:
        for sub in _flatten_and(sections[":precondition"]):
            precond.append(_parse_assertion(sub, pred_table, ptable))
    effects = []
    if ":effect" in sections:
        for sub in _flatten_and(sections[":effect"]):
            effects.append(_parse_effect(sub, pred_table, ptable))
    seen = set()
    for eff in effects:
        if eff.target in seen:
            raise SemanticError(
                f"action '{name}' assigns '{eff.target}' twice", name)
        seen.add(eff.target)
    return ActionScheme(name, tuple(params), tuple(precond), tuple(effects))


def parse_domain(text: str) -> Domain:
    """Parse and validate a domain document."""
    root = _read_sexpr(text)
    if _sym(root[0]) != "define":
        raise ParseError("expected (define (domain ...) ...)", *_pos(root))
    head = root[1]
    if _sym(head[0]) != "domain":
        raise ParseError("expected (domain NAME)", *_pos(head))
    name = _sym(head[1])

    types = [OBJECT_TYPE]
    predicates = []
    schemes = []
    pred_table = {}

    for section in root[2:]:
        key = _sym(section[0])
        if key == ":types":
            for tnode in section[1:]:
                tname = _sym(tnode)
                if tname in types:
                    raise SemanticError(f"duplicate type '{tname}'", tname)
                types.append(tname)
        elif key in (":predicates", ":functions"):
            kind = BOOLEAN if key == ":predicates" else NUMERIC
            for pnode in section[1:]:
                pname = _sym(pnode[0])
                if pname in pred_table:
                    raise SemanticError(f"duplicate fluent '{pname}'", pname)
                args = _parse_typed_list(pnode[1:])
                for var, tname in args:
                    if tname not in types:
                        raise SemanticError(
                            f"fluent '{pname}' argument type '{tname}' "
                            f"undeclared", tname)
                sig = PredicateSignature(
                    pname, tuple(t for _, t in args), kind)
                predicates.append(sig)
                pred_table[pname] = sig
        elif key == ":action":
            schemes.append(_parse_scheme(section, pred_table, set(types)))
        else:
            raise ParseError(f"unknown domain section '{key}'",
                             *_pos(section[0]))

    names = [s.name for s in schemes]
    if len(set(names)) != len(names):
        raise SemanticError(f"duplicate action name in domain '{name}'", name)
    return Domain(name, tuple(types), tuple(predicates), tuple(schemes))


# ---------------------------------------------------------------------------
# instance parsing


def _ground_ref(node, dom: Domain, obj_type, obj_index, what):
    head = _sym(node[0])
    sig = dom.predicate(head)
    args = []
    for argnode in node[1:]:
        oname = _sym(argnode)
        if oname not in obj_type:
            raise SemanticError(f"unknown object '{oname}' in {what}", oname)
        args.append(oname)
    if len(args) != sig.arity:
        raise SemanticError(
            f"fluent '{head}' used with {len(args)} objects, arity is "
            f"{sig.arity}", head)
    idx = []
    for oname, t in zip(args, sig.argument_types):
        if obj_type[oname] != t:
            raise SemanticError(
                f"object '{oname}' has type '{obj_type[oname]}', fluent "
                f"'{head}' expects '{t}'", oname)
        idx.append(obj_index[oname])
    return FluentRef(head, tuple(idx)), sig


def parse_instance(text: str, dom: Domain) -> Instance:
    """Parse and validate an instance document against ``dom``."""
    root = _read_sexpr(text)
    if _sym(root[0]) != "define":
        raise ParseError("expected (define (problem ...) ...)", *_pos(root))
    head = root[1]
    if _sym(head[0]) != "problem":
        raise ParseError("expected (problem NAME)", *_pos(head))
    name = _sym(head[1])

    domain_name = None
    objects: dict[str, list[str]] = {t: [] for t in dom.types}
    obj_type: dict[str, str] = {}
    obj_index: dict[str, int] = {}
    init: list[Assignment] = []
    goal: list[tuple[FluentRef, int]] = []

    def ground_value(node, what):
        tok = _sym(node)
        if not _is_int(tok):
            raise ParseError(f"expected integer in {what}", *_pos(node))
        return int(tok)

    for section in root[2:]:
        key = _sym(section[0])
        if key == ":domain":
            domain_name = _sym(section[1])
        elif key == ":objects":
            for oname, tname in _parse_typed_list(section[1:]):
                if tname not in objects:
                    raise SemanticError(
                        f"object '{oname}' has undeclared type '{tname}'",
                        tname)
                if oname in obj_type:
                    raise SemanticError(f"duplicate object '{oname}'", oname)
                obj_type[oname] = tname
                obj_index[oname] = len(objects[tname])
                objects[tname].append(oname)
        elif key == ":init":
            for node in section[1:]:
                ihead = _sym(node[0])
                if ihead == "=":
                    ref, sig = _ground_ref(node[1], dom, obj_type, obj_index,
                                           "init")
                    value = ground_value(node[2], "init")
                    if sig.kind == BOOLEAN and value not in (0, 1):
                        raise SemanticError(
                            f"boolean fluent '{ref.pred}' set to {value}",
                            ref.pred)
                    init.append(Assignment(ref, "assign", value))
                else:
                    ref, sig = _ground_ref(node, dom, obj_type, obj_index,
                                           "init")
                    _require_boolean({sig.name: sig}, ref)
                    init.append(Assignment(ref, "assign", 1))
        elif key == ":goal":
            for node in _flatten_and(section[1]):
                ihead = _sym(node[0])
                if ihead == "not":
                    ref, sig = _ground_ref(node[1], dom, obj_type, obj_index,
                                           "goal")
                    _require_boolean({sig.name: sig}, ref)
                    goal.append((ref, 0))
                elif ihead == "=":
                    ref, sig = _ground_ref(node[1], dom, obj_type, obj_index,
                                            "goal")
                    goal.append((ref, ground_value(node[2], "goal")))
                else:
                    ref, sig = _ground_ref(node, dom, obj_type, obj_index,
                                           "goal")
                    _require_boolean({sig.name: sig}, ref)
                    goal.append((ref, 1))
        else:
            raise ParseError(f"unknown problem section '{key}'",
                             *_pos(section[0]))

    if domain_name != dom.name:
        raise SemanticError(
            f"instance '{name}' references domain '{domain_name}', "
            f"expected '{dom.name}'", name)
    return Instance(
        name, dom.name, {t: tuple(v) for t, v in objects.items()},
        tuple(init), tuple(goal))


# ---------------------------------------------------------------------------
# printing (round-trip partners of the parsers)


def _fmt_typed(pairs):
    out = []
    for name, tname in pairs:
        out.append(f"{name} - {tname}")
    return " ".join(out)


def _fmt_term(term):
    if isinstance(term, FluentRef):
        if term.args:
            return f"({term.pred} {' '.join(str(a) for a in term.args)})"
        return f"({term.pred})"
    return str(term)


def _fmt_assertion(a: Assertion) -> str:
    if a.op == "==" and a.rhs == 1 and isinstance(a.lhs, FluentRef):
        return _fmt_term(a.lhs)
    if a.op == "==" and a.rhs == 0 and isinstance(a.lhs, FluentRef):
        return f"(not {_fmt_term(a.lhs)})"
    op = {"==": "=", "<": "<", ">": ">"}.get(a.op)
    if a.op == "!=":
        return f"(not (= {_fmt_term(a.lhs)} {_fmt_term(a.rhs)}))"
    return f"({op} {_fmt_term(a.lhs)} {_fmt_term(a.rhs)})"


def _fmt_effect(e: Assignment) -> str:
    if e.op == "assign" and e.operand == 1:
        return _fmt_term(e.target)
    if e.op == "assign" and e.operand == 0:
        return f"(not {_fmt_term(e.target)})"
    return f"({e.op} {_fmt_term(e.target)} {_fmt_term(e.operand)})"


def print_domain(dom: Domain) -> str:
    """Render a domain in the input format (parse/print round trip)."""
    lines = [f"(define (domain {dom.name})"]
    user_types = [t for t in dom.types if t != OBJECT_TYPE]
    if user_types:
        lines.append(f"  (:types {' '.join(user_types)})")
    for kind, key in ((BOOLEAN, ":predicates"), (NUMERIC, ":functions")):
        sigs = [p for p in dom.predicates if p.kind == kind]
        if not sigs:
            continue
        decls = []
        for p in sigs:
            args = _fmt_typed(
                (f"?x{i}", t) for i, t in enumerate(p.argument_types))
            decls.append(f"({p.name} {args})" if args else f"({p.name})")
        lines.append(f"  ({key} {' '.join(decls)})")
    for s in dom.schemes:
        lines.append(f"  (:action {s.name}")
        lines.append(f"    :parameters ({_fmt_typed(s.parameters)})")
        pre = " ".join(_fmt_assertion(a) for a in s.precondition)
        lines.append(f"    :precondition (and {pre})")
        eff = " ".join(_fmt_effect(e) for e in s.effects)
        lines.append(f"    :effect (and {eff}))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def print_instance(inst: Instance, dom: Domain) -> str:
    """Render an instance in the input format."""
    lines = [f"(define (problem {inst.name})", f"  (:domain {inst.domain_name})"]
    parts = []
    for tname in dom.types:
        names = inst.objects.get(tname, ())
        if names:
            parts.append(f"{' '.join(names)} - {tname}")
    lines.append(f"  (:objects {' '.join(parts)})")

    def named(ref: FluentRef) -> str:
        sig = dom.predicate(ref.pred)
        names = [inst.object_name(t, i)
                 for t, i in zip(sig.argument_types, ref.args)]
        return f"({ref.pred} {' '.join(names)})" if names else f"({ref.pred})"

    init_parts = []
    for a in inst.init:
        sig = dom.predicate(a.target.pred)
        if sig.kind == BOOLEAN and a.operand == 1:
            init_parts.append(named(a.target))
        else:
            init_parts.append(f"(= {named(a.target)} {a.operand})")
    lines.append(f"  (:init {' '.join(init_parts)})")
    goal_parts = []
    for ref, target in inst.goal:
        sig = dom.predicate(ref.pred)
        if sig.kind == BOOLEAN and target == 1:
            goal_parts.append(named(ref))
        elif sig.kind == BOOLEAN and target == 0:
            goal_parts.append(f"(not {named(ref)})")
        else:
            goal_parts.append(f"(= {named(ref)} {target})")
    lines.append(f"  (:goal (and {' '.join(goal_parts)}))")
    lines.append(")")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# state construction and goals


def initial_state(inst: Instance) -> State:
    """State holding exactly the init assignments; everything else reads 0."""
    s = State()
    for a in inst.init:
        s.set(a.target.pred, a.target.args, a.operand)
    return s


def goals_hold(s: State, inst: Instance) -> bool:
    """True iff every goal pair (fluent, value) is met in ``s``."""
    return all(s.get(ref.pred, ref.args) == target for ref, target in inst.goal)


def goal_distance(s: State, inst: Instance) -> int:
    """Sum of squared distances from goal values; 0 iff goals hold.

    On purely boolean goal sets this is the number of unsatisfied goals.
    """
    total = 0
    for ref, target in inst.goal:
        d = s.get(ref.pred, ref.args) - target
        total += d * d
    return total


def state_capacity(dom: Domain, inst: Instance) -> int:
    """Upper bound on stored entries: sum over fluents of prod of ranges."""
    total = 0
    for p in dom.predicates:
        cells = 1
        for t in p.argument_types:
            cells *= inst.count(t)
        total += cells
    return total
