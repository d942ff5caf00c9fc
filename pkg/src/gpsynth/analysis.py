"""Termination certificates and asymptotic-complexity reports.

A complete program terminates when (i) control structures are matched and
properly nested and (ii) no instruction inside a loop body modifies the
index iterated by that loop.  Both are purely structural, so the
certificate is machine-checkable without executing anything.  The
complexity of a certified program is the product of the ranges iterated
by the deepest loop nesting; ranges are object counts of the loop types.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import Instance
from .program import (ActionCall, ForEnd, ForStart, PartialProgram,
                      PointerDec, PointerInc, ProgramLimits,
                      structural_validate)


@dataclass
class LoopNode:
    start: int
    end: int
    ptr: str
    type: str
    direction: str
    children: list = field(default_factory=list)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


@dataclass
class TerminationCertificate:
    structured: bool
    loop_index_immutable: dict[int, bool]  # ForStart line -> obligation met
    nesting: list[LoopNode]  # top-level loops
    violations: list[str]

    @property
    def valid(self) -> bool:
        return self.structured and all(self.loop_index_immutable.values())

    @property
    def depth(self) -> int:
        return max((n.depth() for n in self.nesting), default=0)


def _loop_forest(p: PartialProgram, ptr_types):
    roots, stack = [], []
    for i, ins in enumerate(p.defined):
        if isinstance(ins, ForStart):
            node = LoopNode(i, ins.end_line if ins.end_line is not None else -1,
                            ins.ptr, ptr_types[ins.ptr], ins.direction)
            (stack[-1].children if stack else roots).append(node)
            stack.append(node)
        elif stack and i == stack[-1].end:
            stack.pop()
    return roots


def certify_termination(p: PartialProgram,
                        limits_or_types) -> TerminationCertificate:
    """Check the structural termination obligations of a complete program."""
    ptr_types = _pointer_types(limits_or_types, p)
    violations = structural_validate(p)
    # immutability violations are reported per loop below; "structured"
    # covers matching, nesting and End placement only
    immut_markers = ("inside its own loop", "reuses index")
    structured = all(any(m in v for m in immut_markers) for v in violations)
    immutable: dict[int, bool] = {}
    stack: list[tuple[int, str]] = []  # (ForStart line, pointer)
    for i, ins in enumerate(p.defined):
        if isinstance(ins, ForStart):
            immutable.setdefault(i, True)
            for j, ptr in stack:
                if ptr == ins.ptr:
                    immutable[j] = False
            stack.append((i, ins.ptr))
        elif isinstance(ins, ForEnd):
            if stack and ins.start_line == stack[-1][0]:
                stack.pop()
        elif isinstance(ins, (PointerInc, PointerDec)):
            for j, ptr in stack:
                if ptr == ins.ptr:
                    immutable[j] = False
    nesting = _loop_forest(p, ptr_types)
    return TerminationCertificate(structured, immutable, nesting, violations)


@dataclass
class ComplexityReport:
    degree: int
    factors: tuple[str, ...]  # type names along the deepest nesting
    expression: str  # e.g. O(|block|^3)

    def numeric_bound(self, inst: Instance) -> int:
        bound = 1
        for t in self.factors:
            bound *= inst.count(t)
        return bound


def _deepest_path(nodes) -> list[LoopNode]:
    best: list[LoopNode] = []
    for node in nodes:
        path = [node] + _deepest_path(node.children)
        if len(path) > len(best):
            best = path
    return best


def _expression(factors) -> str:
    if not factors:
        return "O(1)"
    parts = []
    seen: list[str] = []
    for t in factors:
        if t not in seen:
            seen.append(t)
    for t in seen:
        k = factors.count(t)
        parts.append(f"|{t}|^{k}" if k > 1 else f"|{t}|")
    return f"O({'*'.join(parts)})"


def asymptotic_complexity(p: PartialProgram, limits_or_types
                          ) -> ComplexityReport:
    """Dominant loop-range product of a certified program (leftmost-deepest)."""
    cert = certify_termination(p, limits_or_types)
    if not cert.valid:
        raise ValueError("program has no valid termination certificate: "
                         + "; ".join(cert.violations))
    path = _deepest_path(cert.nesting)
    factors = tuple(node.type for node in path)
    return ComplexityReport(len(path), factors, _expression(factors))


def plan_length_bound(p: PartialProgram, inst: Instance,
                      limits_or_types) -> int:
    """Action attempts of a full run with every If taken (worst case).

    Conditionals only prune, so this bounds attempted (hence applied)
    actions of any execution on ``inst``.
    """
    ptr_types = _pointer_types(limits_or_types, p)
    total = 0
    mult_stack = [1]
    for ins in p.defined:
        if isinstance(ins, ForStart):
            mult_stack.append(mult_stack[-1] * inst.count(ptr_types[ins.ptr]))
        elif isinstance(ins, ForEnd):
            mult_stack.pop()
        elif isinstance(ins, ActionCall):
            total += mult_stack[-1]
    return total


def termination_fuel(p: PartialProgram, inst: Instance,
                     limits_or_types) -> int:
    """Instruction-visit budget n * prod(loop ranges); executions stay under it."""
    ptr_types = _pointer_types(limits_or_types, p)
    fuel = p.n
    for ins in p.defined:
        if isinstance(ins, ForStart):
            fuel *= max(inst.count(ptr_types[ins.ptr]), 1)
    return fuel


def _pointer_types(limits_or_types, p: PartialProgram) -> dict[str, str]:
    if isinstance(limits_or_types, dict):
        return limits_or_types
    if isinstance(limits_or_types, ProgramLimits):
        raise TypeError("pass {pointer: type} or (limits, domain)")
    limits, dom = limits_or_types
    return {z.name: z.type for z in limits.pointers(dom)}
