"""Structured pointer programs: instructions, partial programs, candidates.

A program is a fixed-length vector of lines programmed strictly left to
right.  Control flow is line-based: ``ForStart``/``ForEnd`` and
``IfStart``/``IfEnd`` pairs carry each other's line numbers once matched,
``End`` halts execution.  A program is complete once ``End`` is programmed
at top level; any trailing lines stay undefined and unreachable.

Pointers are per-type bounded variables over an instance's objects.
``inc``/``dec`` saturate at the range edges, which keeps the range
invariant total and subsumes the guarded steps used by hand-written
programs (``if (b>0) b--`` becomes a plain ``dec``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from .model import BOOLEAN, NUMERIC, Domain, FluentRef, GPProblem, SemanticError

ASC = "asc"
DESC = "desc"


@dataclass(frozen=True)
class Pointer:
    name: str
    type: str


@dataclass(frozen=True)
class ProgramLimits:
    """Search bounds: total lines and per-type pointer budget."""

    n: int
    pointer_budget: dict[str, int]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a program needs at least one line")
        if any(v < 0 for v in self.pointer_budget.values()):
            raise ValueError("pointer budgets must be nonnegative")

    def pointers(self, dom: Domain) -> tuple[Pointer, ...]:
        """Pointer set in canonical order (type declaration order, ordinal).

        Single-type domains use z1..zk; otherwise names are derived from
        the type name (first letter when unambiguous).
        """
        used = [t for t in dom.types if self.pointer_budget.get(t, 0) > 0]
        for t in self.pointer_budget:
            if t not in dom.types:
                raise SemanticError(f"pointer budget for unknown type '{t}'", t)
        single = len(used) == 1
        letters = [t[0] for t in used]
        unique_letters = len(set(letters)) == len(letters)
        out = []
        for t in used:
            prefix = "z" if single else (t[0] if unique_letters else t)
            for k in range(self.pointer_budget[t]):
                out.append(Pointer(f"{prefix}{k + 1}", t))
        return tuple(out)


# --- conditions ------------------------------------------------------------


@dataclass(frozen=True)
class CmpConst:
    ref: FluentRef  # args are pointer names
    op: str  # "==", "!="
    value: int

    def __str__(self):
        return f"{_ref_text(self.ref)}{self.op}{self.value}"


@dataclass(frozen=True)
class CmpPointer:
    left: str
    right: str
    op: str  # "<", "==", ">"

    def __str__(self):
        return f"{self.left}{self.op}{self.right}"


@dataclass(frozen=True)
class CmpFluent:
    left: FluentRef
    right: FluentRef
    op: str  # "<", "==", ">"

    def __str__(self):
        return f"{_ref_text(self.left)}{self.op}{_ref_text(self.right)}"


def _ref_text(ref: FluentRef) -> str:
    return f"{ref.pred}[{','.join(ref.args)}]"


# --- instructions ----------------------------------------------------------


@dataclass(frozen=True)
class ActionCall:
    scheme: str
    args: tuple[str, ...]  # pointer names

    def __str__(self):
        return f"act {self.scheme}({','.join(self.args)})"


@dataclass(frozen=True)
class PointerInc:
    ptr: str

    def __str__(self):
        return f"inc({self.ptr})"


@dataclass(frozen=True)
class PointerDec:
    ptr: str

    def __str__(self):
        return f"dec({self.ptr})"


@dataclass(frozen=True)
class ForStart:
    ptr: str
    direction: str  # ASC or DESC
    end_line: int | None = None  # matched ForEnd, None while open

    def __str__(self):
        return f"for({self.ptr},{self.direction})"


@dataclass(frozen=True)
class ForEnd:
    start_line: int

    def __str__(self):
        return "endfor"


@dataclass(frozen=True)
class IfStart:
    cond: object  # CmpConst | CmpPointer | CmpFluent
    end_line: int | None = None

    def __str__(self):
        return f"if({self.cond})"


@dataclass(frozen=True)
class IfEnd:
    start_line: int

    def __str__(self):
        return "endif"


@dataclass(frozen=True)
class End:
    def __str__(self):
        return "end"


Instruction = (ActionCall, PointerInc, PointerDec, ForStart, ForEnd,
               IfStart, IfEnd, End)


class IllegalInstruction(Exception):
    pass


@dataclass(frozen=True)
class PartialProgram:
    """Lines 0..next_line are defined, the rest undefined.

    ``open_stack`` holds line numbers of unclosed ForStart/IfStart in
    nesting order.  Values are immutable; ``program_line`` returns a new
    program with the closer's partner back-patched.
    """

    lines: tuple
    next_line: int
    open_stack: tuple[int, ...]

    @staticmethod
    def empty(n: int) -> "PartialProgram":
        return PartialProgram((None,) * n, 0, ())

    @property
    def n(self) -> int:
        return len(self.lines)

    @property
    def is_complete(self) -> bool:
        return (self.next_line > 0
                and isinstance(self.lines[self.next_line - 1], End))

    @property
    def defined(self) -> tuple:
        return self.lines[: self.next_line]

    def loop_count(self) -> int:
        return sum(isinstance(ins, ForStart) for ins in self.defined)

    def enclosing_for_pointers(self) -> frozenset:
        """Pointers iterated by the currently open for loops."""
        out = set()
        for i in self.open_stack:
            ins = self.lines[i]
            if isinstance(ins, ForStart):
                out.add(ins.ptr)
        return frozenset(out)


def program_line(p: PartialProgram, ins) -> PartialProgram:
    """Program instruction ``ins`` at the first undefined line."""
    i = p.next_line
    if i >= p.n:
        raise IllegalInstruction("no undefined line left")
    if p.is_complete:
        raise IllegalInstruction("program already ends; End is terminal")
    lines = list(p.lines)
    stack = list(p.open_stack)
    if isinstance(ins, (ForStart, IfStart)):
        if i == p.n - 1:
            raise IllegalInstruction(
                "control structure at the last line would have an empty body")
        lines[i] = ins
        stack.append(i)
    elif isinstance(ins, ForEnd):
        if not stack or not isinstance(lines[stack[-1]], ForStart):
            raise IllegalInstruction("endfor without a matching open for")
        start = stack.pop()
        opener = lines[start]
        lines[start] = ForStart(opener.ptr, opener.direction, end_line=i)
        lines[i] = ForEnd(start_line=start)
    elif isinstance(ins, IfEnd):
        if not stack or not isinstance(lines[stack[-1]], IfStart):
            raise IllegalInstruction("endif without a matching open if")
        start = stack.pop()
        opener = lines[start]
        lines[start] = IfStart(opener.cond, end_line=i)
        lines[i] = IfEnd(start_line=start)
    elif isinstance(ins, End):
        if stack:
            raise IllegalInstruction("End inside an open structure")
        lines[i] = ins
    else:
        lines[i] = ins
    return PartialProgram(tuple(lines), i + 1, tuple(stack))


# --- candidate generation ---------------------------------------------------


class CandidateSpace:
    """Grammar-legal instructions per line, with the pruning rules.

    The enumeration order is fixed and deterministic: structure closers,
    action calls, pointer steps, loop opens, conditionals, End.  Closers
    come first so FIFO tie-breaking explores loop closures (where the
    distance signal lives) before sibling bodies.
    """

    def __init__(self, dom: Domain, limits: ProgramLimits, prob: GPProblem):
        self.dom = dom
        self.limits = limits
        self.prob = prob
        self.pointers = limits.pointers(dom)
        self.by_type = {}
        for z in self.pointers:
            self.by_type.setdefault(z.type, []).append(z)
        # rule (b): never loop a type with <= 1 object in every instance
        self.loopable = {
            t: any(inst.count(t) > 1 for inst in prob.instances)
            for t in dom.types
        }
        self.actions = self._enumerate_actions()
        self.conditions = self._enumerate_conditions()
        self._tail_cache: dict = {}

    def _tuples(self, type_names):
        pools = []
        for t in type_names:
            pool = [z.name for z in self.by_type.get(t, [])]
            if not pool:
                return
            pools.append(pool)
        yield from product(*pools)

    def _enumerate_actions(self):
        out = []
        for scheme in self.dom.schemes:
            for args in self._tuples(scheme.parameter_types):
                out.append(ActionCall(scheme.name, args))
        return out

    def _enumerate_conditions(self):
        out = []
        ptr_index = {z.name: k for k, z in enumerate(self.pointers)}
        for sig in self.dom.predicates:
            for args in self._tuples(sig.argument_types):
                ref = FluentRef(sig.name, args)
                out.append(CmpConst(ref, "==", 0))
                out.append(CmpConst(ref, "!=", 0))
        for t, ptrs in self.by_type.items():
            for a, b in product(ptrs, ptrs):
                if ptr_index[a.name] < ptr_index[b.name]:
                    for op in ("<", "==", ">"):
                        out.append(CmpPointer(a.name, b.name, op))
        # three-way fluent comparisons: numeric fluents, same predicate,
        # canonically ordered operand tuples (mirrors are redundant)
        for sig in self.dom.predicates:
            if sig.kind != NUMERIC:
                continue
            refs = [FluentRef(sig.name, args)
                    for args in self._tuples(sig.argument_types)]
            for i, left in enumerate(refs):
                for right in refs[i + 1:]:
                    for op in ("<", "==", ">"):
                        out.append(CmpFluent(left, right, op))
        return out

    def _tail(self, allow_plain: bool, allow_open: bool, allow_end: bool,
              banned: frozenset):
        """Context-independent candidate suffix, cached per context key."""
        key = (allow_plain, allow_open, allow_end, banned)
        cached = self._tail_cache.get(key)
        if cached is not None:
            return cached
        out = []
        if allow_plain:
            out.extend(self.actions)
            for z in self.pointers:
                if z.name not in banned:
                    out.append(PointerInc(z.name))
            for z in self.pointers:
                if z.name not in banned:
                    out.append(PointerDec(z.name))
        if allow_open:
            for z in self.pointers:
                if z.name not in banned and self.loopable.get(z.type, False):
                    out.append(ForStart(z.name, ASC))
                    out.append(ForStart(z.name, DESC))
            out.extend(IfStart(c) for c in self.conditions)
        if allow_end:
            out.append(End())
        self._tail_cache[key] = out
        return out

    def candidates(self, p: PartialProgram):
        """Legal instructions for p's first undefined line.

        Beyond the grammar, an instruction is offered only when the lines
        after it still fit every pending closer plus End (structures that
        can never be closed are as meaningless as empty-bodied ones), and
        a closer never directly follows its opener (no empty bodies).
        """
        i = p.next_line
        if i >= p.n or p.is_complete:
            return []
        depth = len(p.open_stack)
        avail = p.n - i - 1  # lines after this one
        tail = self._tail(avail >= depth + 1, avail >= depth + 2,
                          depth == 0, p.enclosing_for_pointers())
        if not p.open_stack:
            return tail
        start = p.open_stack[-1]
        if start == i - 1 or avail < depth:
            # closing now would leave an empty body, or no closer helps
            return tail
        top = p.lines[start]
        closer = ForEnd(start) if isinstance(top, ForStart) else IfEnd(start)
        return [closer] + tail


def candidate_instructions(p: PartialProgram, dom: Domain,
                           limits: ProgramLimits, prob: GPProblem):
    """One-shot entry point; prefer a shared CandidateSpace in loops."""
    return CandidateSpace(dom, limits, prob).candidates(p)


def random_program(space: CandidateSpace, rng) -> PartialProgram:
    """Uniform random walk over the candidate space until End; retries on
    dead ends (e.g. structures still open at the final line)."""
    while True:
        p = PartialProgram.empty(space.limits.n)
        while not p.is_complete:
            cands = space.candidates(p)
            if not cands:
                break
            p = program_line(p, rng.choice(cands))
        if p.is_complete:
            return p


# --- structural validation and abstraction ----------------------------------


def structural_validate(p: PartialProgram) -> list[str]:
    """Violations of the termination obligations; empty list means ok.

    Checks matched, properly nested structures, loop-index immutability
    inside each loop body, and a terminal End.
    """
    violations = []
    if not p.is_complete:
        violations.append("program does not end with End")
    stack = []  # (line, ForStart|IfStart)
    for i, ins in enumerate(p.defined):
        if isinstance(ins, End):
            if i != p.next_line - 1:
                violations.append(f"line {i}: instruction follows End")
            if stack:
                violations.append(f"line {i}: End inside an open structure")
        elif isinstance(ins, ForStart):
            for j, opener in stack:
                if isinstance(opener, ForStart) and opener.ptr == ins.ptr:
                    violations.append(
                        f"line {i}: nested loop reuses index '{ins.ptr}' "
                        f"of the loop at line {j}")
            stack.append((i, ins))
        elif isinstance(ins, IfStart):
            stack.append((i, ins))
        elif isinstance(ins, ForEnd):
            if not stack or not isinstance(stack[-1][1], ForStart):
                violations.append(f"line {i}: endfor without open for")
            else:
                j, opener = stack.pop()
                if opener.end_line != i or ins.start_line != j:
                    violations.append(f"line {i}: mismatched for/endfor links")
        elif isinstance(ins, IfEnd):
            if not stack or not isinstance(stack[-1][1], IfStart):
                violations.append(f"line {i}: endif without open if")
            else:
                j, opener = stack.pop()
                if opener.end_line != i or ins.start_line != j:
                    violations.append(f"line {i}: mismatched if/endif links")
        elif isinstance(ins, (PointerInc, PointerDec)):
            for j, opener in stack:
                if isinstance(opener, ForStart) and opener.ptr == ins.ptr:
                    violations.append(
                        f"line {i}: step of '{ins.ptr}' inside its own loop "
                        f"(opened at line {j})")
    for j, _ in stack:
        violations.append(f"line {j}: structure never closed")
    return violations


def loop_abstraction(p: PartialProgram, pointer_types: dict[str, str]
                     ) -> frozenset:
    """(type, direction, start, end) per for loop, 0-indexed lines.

    Pointer identity and non-loop instructions are abstracted away; open
    loops use end = -1.  Invariant under bijective renaming of same-type
    pointers.
    """
    out = set()
    for i, ins in enumerate(p.defined):
        if isinstance(ins, ForStart):
            end = ins.end_line if ins.end_line is not None else -1
            out.add((pointer_types[ins.ptr], ins.direction, i, end))
    return frozenset(out)


# --- canonical text form -----------------------------------------------------

_FOR_RE = re.compile(r"for\((\w+),(asc|desc)\)$")
_STEP_RE = re.compile(r"(inc|dec)\((\w+)\)$")
_ACT_RE = re.compile(r"act\s+([\w-]+)\(([\w,]*)\)$")
_IF_RE = re.compile(r"if\((.+)\)$")
_REF_RE = re.compile(r"([\w-]+)\[([\w,]*)\]$")


def print_program(p: PartialProgram) -> str:
    """One instruction per line; undefined trailing lines are omitted."""
    return "\n".join(str(ins) for ins in p.defined) + "\n"


def _parse_ref(text, dom, ptr_types):
    m = _REF_RE.match(text)
    if not m:
        raise SemanticError(f"bad fluent reference '{text}'")
    pred = dom.predicate(m.group(1))
    args = tuple(a for a in m.group(2).split(",") if a)
    if len(args) != pred.arity:
        raise SemanticError(
            f"fluent '{pred.name}' takes {pred.arity} pointers", pred.name)
    for a, t in zip(args, pred.argument_types):
        if ptr_types.get(a) != t:
            raise SemanticError(f"pointer '{a}' is not of type '{t}'", a)
    return FluentRef(pred.name, args)


def _parse_condition(text, dom, ptr_types):
    for op in ("!=", "==", "<", ">"):
        if op in text:
            left, right = text.split(op, 1)
            left, right = left.strip(), right.strip()
            if left in ptr_types and right in ptr_types:
                if op in ("!=",):
                    raise SemanticError("pointer conditions use <, ==, >")
                return CmpPointer(left, right, op)
            if right.lstrip("-").isdigit():
                if op not in ("==", "!="):
                    raise SemanticError(
                        "fluent/constant conditions use == or !=")
                return CmpConst(_parse_ref(left, dom, ptr_types), op,
                                int(right))
            if op == "!=":
                raise SemanticError("fluent comparisons use <, ==, >")
            return CmpFluent(_parse_ref(left, dom, ptr_types),
                             _parse_ref(right, dom, ptr_types), op)
    raise SemanticError(f"bad condition '{text}'")


def parse_program(text: str, dom: Domain, limits: ProgramLimits,
                  n: int | None = None) -> PartialProgram:
    """Parse the canonical text form.

    ``n`` pads the program to a fixed length; by default it is the number
    of instruction lines in the text.
    """
    ptr_types = {z.name: z.type for z in limits.pointers(dom)}
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith(";")]
    total = n if n is not None else len(rows)
    if total < len(rows):
        raise SemanticError(f"program has {len(rows)} lines, limit is {total}")
    p = PartialProgram.empty(total)
    for row in rows:
        if row == "end":
            ins = End()
        elif row == "endfor":
            ins = ForEnd(-1)
        elif row == "endif":
            ins = IfEnd(-1)
        elif m := _FOR_RE.match(row):
            ptr, direction = m.group(1), m.group(2)
            if ptr not in ptr_types:
                raise SemanticError(f"unknown pointer '{ptr}'", ptr)
            ins = ForStart(ptr, direction)
        elif m := _STEP_RE.match(row):
            kind, ptr = m.group(1), m.group(2)
            if ptr not in ptr_types:
                raise SemanticError(f"unknown pointer '{ptr}'", ptr)
            ins = PointerInc(ptr) if kind == "inc" else PointerDec(ptr)
        elif m := _ACT_RE.match(row):
            scheme = dom.scheme(m.group(1))
            args = tuple(a for a in m.group(2).split(",") if a)
            if len(args) != scheme.arity:
                raise SemanticError(
                    f"action '{scheme.name}' takes {scheme.arity} pointers",
                    scheme.name)
            for a, t in zip(args, scheme.parameter_types):
                if ptr_types.get(a) != t:
                    raise SemanticError(
                        f"pointer '{a}' is not of type '{t}'", a)
            ins = ActionCall(scheme.name, args)
        elif m := _IF_RE.match(row):
            ins = IfStart(_parse_condition(m.group(1), dom, ptr_types))
        else:
            raise SemanticError(f"bad program line '{row}'")
        try:
            p = program_line(p, ins)
        except IllegalInstruction as exc:
            raise SemanticError(f"line {p.next_line}: {exc}") from exc
    return p
