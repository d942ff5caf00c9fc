"""Deterministic, grounding-free execution of (partial) programs.

``execute`` runs through the selected kernel (compiled or pure) and
returns a full :class:`Trace`.  ``validate_plan`` replays a ground action
sequence at the object level with :func:`apply_action`, independently of
the kernels, so engine results can always be cross-checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .model import (Assertion, Domain, FluentRef, Instance,
                    OverflowRuntimeError, SemanticError, State, goals_hold,
                    initial_state)
from .packing import (HALT_NAMES, PackedDomain, PackedInstance, PackedProgram)
from .program import (ActionCall, End, PartialProgram, PointerDec, PointerInc,
                      ProgramLimits, program_line)

GroundAction = tuple[str, tuple[str, ...]]  # scheme name, object names


@dataclass
class Trace:
    """Result of one execution: the induced plan plus bookkeeping."""

    applied_actions: list[GroundAction]
    attempted_count: int
    final_state: State
    halt_reason: str  # end | undefined_line | fuel_exhausted | runtime_error
    goal_ok: bool
    visits: int

    def plan_lines(self) -> list[str]:
        return [f"({name} {' '.join(objs)})" if objs else f"({name})"
                for name, objs in self.applied_actions]

    def text(self) -> str:
        lines = self.plan_lines()
        lines.append(f"attempted={self.attempted_count}")
        lines.append(f"goal={'true' if self.goal_ok else 'false'}")
        lines.append(f"halt={self.halt_reason}")
        return "\n".join(lines) + "\n"


# --- object-level action application (kernel-independent oracle) -----------


def _subst(ref: FluentRef, binding: dict) -> tuple[str, tuple]:
    return ref.pred, tuple(binding[v] for v in ref.args)


def _term_value(term, binding, s: State) -> int:
    if isinstance(term, FluentRef):
        pred, idx = _subst(term, binding)
        return s.get(pred, idx)
    return term


def _holds(a: Assertion, binding, s: State) -> bool:
    lhs = _term_value(a.lhs, binding, s)
    rhs = _term_value(a.rhs, binding, s)
    if a.op == "==":
        return lhs == rhs
    if a.op == "!=":
        return lhs != rhs
    if a.op == "<":
        return lhs < rhs
    return lhs > rhs


def apply_action(s: State, scheme, objs: tuple[int, ...]):
    """Try a ground action; returns (applied, successor state).

    Effects are simultaneous: every operand is read from the pre-state,
    then writes are applied in declaration order.  The input state is
    never mutated.
    """
    binding = {v: o for (v, _), o in zip(scheme.parameters, objs)}
    if not all(_holds(a, binding, s) for a in scheme.precondition):
        return False, s
    operands = [_term_value(e.operand, binding, s) for e in scheme.effects]
    out = s.clone()
    for e, operand in zip(scheme.effects, operands):
        pred, idx = _subst(e.target, binding)
        if e.op == "assign":
            value = operand
        elif e.op == "increase":
            value = s.get(pred, idx) + operand
        else:
            value = s.get(pred, idx) - operand
        out.set(pred, idx, value)  # raises OverflowRuntimeError on overflow
    return True, out


def ground(dom: Domain, inst: Instance, name: str,
           obj_names: tuple[str, ...]):
    """Resolve (scheme, object indices) for a named ground action."""
    scheme = dom.scheme(name)
    if len(obj_names) != scheme.arity:
        raise SemanticError(
            f"action '{name}' takes {scheme.arity} objects", name)
    idx = tuple(inst.object_index(t, o)
                for o, t in zip(obj_names, scheme.parameter_types))
    return scheme, idx


def validate_plan(plan: list[GroundAction], dom: Domain,
                  inst: Instance) -> bool:
    """Replay: every action applicable in sequence and goals hold at the end."""
    s = initial_state(inst)
    try:
        for name, obj_names in plan:
            scheme, idx = ground(dom, inst, name, obj_names)
            applied, s = apply_action(s, scheme, idx)
            if not applied:
                return False
    except (OverflowRuntimeError, SemanticError, ValueError):
        return False
    return goals_hold(s, inst)


# --- kernel-backed execution -------------------------------------------------


class ExecutionContext:
    """Packs a (domain, instances, limits) triple once, executes many times."""

    def __init__(self, dom: Domain, instances, limits: ProgramLimits,
                 compiled: bool | None = None):
        self.dom = dom
        self.limits = limits
        self.pointers = limits.pointers(dom)
        self.pdom = PackedDomain(dom)
        self.kernel = _engine.pick(compiled)
        self.instances = list(instances)
        self.packed = [PackedInstance(self.pdom, inst)
                       for inst in self.instances]
        self.executors = [self.kernel.Executor(pi) for pi in self.packed]
        self.ptr_type = np.asarray(
            [self.pdom.type_index[z.type] for z in self.pointers],
            dtype=np.int32)
        for ex in self.executors:
            ex.bind_pointers(self.ptr_type)

    def pack(self, p: PartialProgram) -> PackedProgram:
        return PackedProgram(p, self.pdom, self.pointers)

    def run(self, p: PartialProgram, k: int = 0, fuel: int | None = None,
            record: bool = True, want_state: bool = True):
        return self.executors[k].run(self.pack(p), fuel=fuel or 0,
                                     record=record, want_state=want_state)

    def evaluate(self, packed: PackedProgram, fuel: int | None = None):
        """Summed goal distance and solved/errored flags over all instances."""
        return self.kernel.evaluate_all(self.executors, packed.mat,
                                        packed.cond_const, fuel or 0)

    def evaluate_arrays(self, mat, cond_const, fuel: int | None = None):
        """Fast path for the search: raw line matrix, no program object."""
        return self.kernel.evaluate_all(self.executors, mat, cond_const,
                                        fuel or 0)

    def trace(self, res, k: int = 0) -> Trace:
        inst = self.instances[k]
        dom = self.dom
        applied = []
        for scheme_id, idx in (res.applied or []):
            scheme = dom.schemes[scheme_id]
            names = tuple(inst.object_name(t, i)
                          for t, i in zip(scheme.parameter_types, idx))
            applied.append((scheme.name, names))
        final = State()
        if res.state is not None:
            pinst = self.packed[k]
            for off in res.state.nonzero()[0]:
                ref = pinst.decode(int(off))
                final.set(ref.pred, ref.args, int(res.state[off]))
        return Trace(applied, int(res.attempted), final,
                     HALT_NAMES[res.halt], bool(res.goals_ok),
                     int(res.visits))


def execute(p: PartialProgram, dom: Domain, inst: Instance,
            limits: ProgramLimits, fuel: int | None = None) -> Trace:
    """Run the line-based semantics on one instance and trace it."""
    ctx = ExecutionContext(dom, [inst], limits)
    res = ctx.run(p, 0, fuel=fuel)
    return ctx.trace(res, 0)


# --- sequential plans as programs (round-trip witness) -----------------------


def plan_from_actions(plan: list[GroundAction], dom: Domain, inst: Instance,
                      limits: ProgramLimits) -> PartialProgram:
    """Loop-free program whose execution applies exactly ``plan``.

    Pointer k of a type serves the k-th parameter of that type within each
    scheme; pointers step to the required object indices before each call.
    """
    pointers = limits.pointers(dom)
    by_type: dict[str, list] = {}
    for z in pointers:
        by_type.setdefault(z.type, []).append(z)

    steps = []
    position = {z.name: 0 for z in pointers}
    for name, obj_names in plan:
        scheme, idx = ground(dom, inst, name, obj_names)
        seen: dict[str, int] = {}
        args = []
        for t, target in zip(scheme.parameter_types, idx):
            k = seen.get(t, 0)
            seen[t] = k + 1
            if k >= len(by_type.get(t, [])):
                raise SemanticError(
                    f"pointer budget for type '{t}' too small for action "
                    f"'{name}'", t)
            z = by_type[t][k]
            delta = target - position[z.name]
            step = PointerInc(z.name) if delta > 0 else PointerDec(z.name)
            steps.extend([step] * abs(delta))
            position[z.name] = target
            args.append(z.name)
        steps.append(ActionCall(name, tuple(args)))
    steps.append(End())

    p = PartialProgram.empty(len(steps))
    for ins in steps:
        p = program_line(p, ins)
    return p
