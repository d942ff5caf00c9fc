"""Frontier best-first search over partially specified programs.

Nodes are partial programs; the open list is ordered lexicographically by
(summed goal distance after executing the defined prefix on every
instance, tie-breaker, insertion counter) and no closed list is kept.
The tie-breaker is -#loops by default (prefer loop-rich programs) or
+#loops for the baseline contrast.  A tabu set of loop abstractions
prunes loop-order symmetries of already expanded programs.
"""

from __future__ import annotations

import gc
import heapq
import time
from dataclasses import dataclass, field

import numpy as np

from .interpreter import ExecutionContext, validate_plan
from .model import GPProblem
from .packing import (OP_ENDFOR as OP_ENDFOR_CODE, OP_ENDIF as OP_ENDIF_CODE,
                      OP_FOR as OP_FOR_CODE, PROG_COLS, encode_row)
from .program import (CandidateSpace, ForEnd, ForStart, IfEnd, IfStart,
                      PartialProgram, ProgramLimits, loop_abstraction,
                      print_program, program_line, structural_validate)

TIE_MAX_LOOPS = "max-loops"
TIE_MIN_LOOPS = "min-loops"


def f_min_loops(p: PartialProgram) -> int:
    """Number of loop instructions programmed so far."""
    return p.loop_count()


def f_max_loops(p: PartialProgram) -> int:
    return -p.loop_count()


@dataclass(frozen=True)
class SynthesisConfig:
    limits: ProgramLimits
    tie: str = TIE_MAX_LOOPS
    time_limit: float = 3600.0
    node_limit: int = 10_000_000
    open_limit: int | None = None  # crude memory cap (open-list size)
    compiled: bool | None = None  # force an engine; None = auto


@dataclass(slots=True)
class SearchNode:
    program: PartialProgram
    key: tuple  # (primary, secondary, counter)
    solved: bool  # prefix execution reached End with goals on all instances
    distance: int

    def __lt__(self, other):  # heapq safety; keys are unique anyway
        return self.key < other.key


@dataclass
class SynthesisResult:
    status: str  # "solution" | "exhausted" | "resource_limit"
    program: PartialProgram | None
    stats: dict
    config: SynthesisConfig
    per_instance: list[dict] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.status == "solution"

    def to_report(self) -> dict:
        cfg = self.config
        return {
            "solved": self.solved,
            "status": self.status,
            "program": (print_program(self.program)
                        if self.program is not None else None),
            "stats": self.stats,
            "per_instance": self.per_instance,
            "config": {
                "lines": cfg.limits.n,
                "pointers": dict(cfg.limits.pointer_budget),
                "tie": cfg.tie,
                "time_limit": cfg.time_limit,
                "node_limit": cfg.node_limit,
            },
        }


def record_stats(result: SynthesisResult) -> dict:
    """Counters of a finished search (expanded <= evaluated always)."""
    return dict(result.stats)


class TabuList:
    """Loop abstractions of expanded programs; grows monotonically."""

    def __init__(self):
        self.entries: set[frozenset] = set()

    def add(self, abstraction: frozenset):
        if abstraction:
            self.entries.add(abstraction)

    def __contains__(self, abstraction: frozenset) -> bool:
        return abstraction in self.entries

    def __len__(self):
        return len(self.entries)


class Synthesizer:
    """One search run; keeps the packed instances and candidate space."""

    def __init__(self, prob: GPProblem, cfg: SynthesisConfig):
        self.prob = prob
        self.cfg = cfg
        self.space = CandidateSpace(prob.domain, cfg.limits, prob)
        self.ctx = ExecutionContext(prob.domain, prob.instances, cfg.limits,
                                    compiled=cfg.compiled)
        self.ptr_types = {z.name: z.type for z in self.space.pointers}
        self.ptr_index = {z.name: k for k, z in enumerate(self.space.pointers)}
        self.tie = f_max_loops if cfg.tie == TIE_MAX_LOOPS else f_min_loops
        self.tabu = TabuList()
        self.counter = 0
        self.evaluated = 0
        self.expanded = 0
        self.peak_open = 0
        n = cfg.limits.n
        # shared scratch buffers: children are evaluated by toggling the
        # parent's rows in place, nothing program-sized is kept per node
        self._mat = np.zeros((n, PROG_COLS), dtype=np.int32)
        self._const = np.zeros(n, dtype=np.int64)
        self._rows: dict = {}  # id(shared instruction) -> (row, const, ref)

    def _encode(self, ins):
        """(16-int row, condition constant); id-cached for shared objects."""
        cached = self._rows.get(id(ins))
        if cached is None:
            row, const = encode_row(ins, self.ctx.pdom, self.ptr_index)
            cached = (np.asarray(row, dtype=np.int32), const, ins)
            self._rows[id(ins)] = cached
        return cached

    def _fill(self, p: PartialProgram):
        """Load the scratch buffers with p's lines."""
        self._mat[:] = 0
        self._const[:] = 0
        for i, ins in enumerate(p.defined):
            if isinstance(ins, ForEnd):
                self._mat[i, 0] = OP_ENDFOR_CODE
                self._mat[i, 1] = ins.start_line
            elif isinstance(ins, IfEnd):
                self._mat[i, 0] = OP_ENDIF_CODE
                self._mat[i, 1] = ins.start_line
            elif isinstance(ins, ForStart):
                self._mat[i, 0] = OP_FOR_CODE
                self._mat[i, 1] = self.ptr_index[ins.ptr]
                self._mat[i, 2] = 0 if ins.direction == "asc" else 1
                self._mat[i, 3] = -1 if ins.end_line is None else ins.end_line
            elif isinstance(ins, IfStart):
                row, const, _ = self._encode(
                    ins if ins.end_line is None else IfStart(ins.cond))
                self._mat[i] = row
                self._mat[i, 3] = -1 if ins.end_line is None else ins.end_line
                self._const[i] = const
            else:
                row, const, _ = self._encode(ins)
                self._mat[i] = row
                self._const[i] = const

    def _evaluate(self, p: PartialProgram, loops: int):
        distance, solved, errored = self.ctx.evaluate_arrays(
            self._mat, self._const)
        if errored:
            return None  # the prefix replays identically in any completion
        self.evaluated += 1
        tie = -loops if self.tie is f_max_loops else loops
        key = (distance, tie, self.counter)
        self.counter += 1
        return SearchNode(p, key, solved, distance)

    def _make_node(self, p: PartialProgram):
        self._fill(p)
        return self._evaluate(p, p.loop_count())

    def expand(self, node: SearchNode):
        """Successors of a node, tabu inserted and consulted on the way."""
        p = node.program
        abstraction = loop_abstraction(p, self.ptr_types)
        self.tabu.add(abstraction)
        self._fill(p)
        mat = self._mat
        const = self._const
        loops = p.loop_count()
        i = p.next_line
        out = []
        for ins in self.space.candidates(p):
            kind = type(ins)
            child_loops = loops
            if kind is ForStart:
                child_loops += 1
                succ_abs = abstraction | {
                    (self.ptr_types[ins.ptr], ins.direction, i, -1)}
                if succ_abs in self.tabu:
                    continue
            child_prog = program_line(p, ins)
            start = -1
            if kind is ForEnd or kind is IfEnd:
                mat[i, 0] = OP_ENDFOR_CODE if kind is ForEnd else OP_ENDIF_CODE
                start = p.open_stack[-1]
                mat[i, 1] = start
                mat[start, 3] = i  # back-patch the opener
            else:
                row, c, _ = self._encode(ins)
                mat[i] = row
                const[i] = c
            child = self._evaluate(child_prog, child_loops)
            if child is not None:
                out.append(child)
            # restore the undefined line and the opener link
            mat[i] = 0
            const[i] = 0
            if start >= 0:
                mat[start, 3] = -1
        self.expanded += 1
        return out

    def is_solution(self, node: SearchNode) -> bool:
        return (node.program.is_complete and node.solved
                and not structural_validate(node.program))

    def run(self) -> SynthesisResult:
        # node structures are acyclic; cycle collection only slows the search
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            return self._run()
        finally:
            if gc_was_enabled:
                gc.enable()

    def _run(self) -> SynthesisResult:
        cfg = self.cfg
        t0 = time.monotonic()
        status = "exhausted"
        solution = None
        root = self._make_node(PartialProgram.empty(cfg.limits.n))
        heap = []
        if root is not None:
            heapq.heappush(heap, (root.key, root))
        while heap:
            if time.monotonic() - t0 > cfg.time_limit:
                status = "resource_limit"
                break
            if self.evaluated > cfg.node_limit:
                status = "resource_limit"
                break
            if cfg.open_limit is not None and len(heap) > cfg.open_limit:
                status = "resource_limit"
                break
            _, node = heapq.heappop(heap)
            if self.is_solution(node):
                solution = node
                status = "solution"
                break
            for child in self.expand(node):
                heapq.heappush(heap, (child.key, child))
            if len(heap) > self.peak_open:
                self.peak_open = len(heap)
        wall = time.monotonic() - t0
        stats = {
            "expanded": self.expanded,
            "evaluated": self.evaluated,
            "wall_time": wall,
            "peak_open_size": self.peak_open,
            "tabu_size": len(self.tabu),
        }
        per_instance = []
        if solution is not None:
            per_instance = self._verify(solution.program)
        return SynthesisResult(status,
                               solution.program if solution else None,
                               stats, cfg, per_instance)

    def _verify(self, p: PartialProgram):
        """Independent replay of the returned program on every instance."""
        out = []
        for k, inst in enumerate(self.prob.instances):
            res = self.ctx.run(p, k, record=True, want_state=False)
            trace = self.ctx.trace(res, k)
            ok = (trace.halt_reason == "end" and trace.goal_ok
                  and validate_plan(trace.applied_actions, self.prob.domain,
                                    inst))
            if not ok:
                raise AssertionError(
                    f"solution failed post-hoc replay on '{inst.name}'")
            out.append({
                "instance": inst.name,
                "plan_length": len(trace.applied_actions),
                "attempted": trace.attempted_count,
            })
        return out


def f_euclidean(p: PartialProgram, prob: GPProblem,
                limits: ProgramLimits) -> int:
    """Summed squared goal distance of the prefix execution on all instances.

    Convenience entry point; the search computes this through its shared
    ExecutionContext instead.
    """
    ctx = ExecutionContext(prob.domain, prob.instances, limits)
    distance, _, errored = ctx.evaluate(ctx.pack(p))
    if errored:
        raise OverflowError("runtime error while evaluating the prefix")
    return distance


def expand(node: SearchNode, prob: GPProblem, cfg: SynthesisConfig,
           tabu: TabuList):
    """One-shot expansion (testing aid); shares the tabu passed in."""
    syn = Synthesizer(prob, cfg)
    syn.tabu = tabu
    return syn.expand(node)


def is_solution(node: SearchNode, prob: GPProblem,
                cfg: SynthesisConfig) -> bool:
    syn = Synthesizer(prob, cfg)
    return syn.is_solution(node)


def synthesize(prob: GPProblem, cfg: SynthesisConfig) -> SynthesisResult:
    """Search for a program solving every instance of ``prob``."""
    return Synthesizer(prob, cfg).run()
