"""Packed, array-based encodings of instances and programs.

Both execution kernels (the compiled one in ``_kernel`` and the pure
Python twin in ``_pykernel``) consume these encodings.  States are dense
int64 vectors: one cell per grounded fluent, row-major over typed object
indices, absent-by-default semantics becoming an explicit 0.

Layout constants here are the single source of truth; the kernels mirror
them and the differential tests keep both honest.
"""

from __future__ import annotations

import numpy as np

from .model import (BOOLEAN, Assertion, Domain, FluentRef, Instance,
                    SemanticError)
from .program import (ASC, ActionCall, End, ForEnd, ForStart, IfEnd, IfStart,
                      CmpConst, CmpFluent, CmpPointer, PartialProgram,
                      PointerDec, PointerInc, Pointer)

MAXAR = 4  # max fluent/scheme arity supported by the packed layout

# program opcodes
OP_UNDEF = 0
OP_ACT = 1
OP_INC = 2
OP_DEC = 3
OP_FOR = 4
OP_ENDFOR = 5
OP_IF = 6
OP_ENDIF = 7
OP_END = 8

# comparison codes
CMP_EQ = 0
CMP_NE = 1
CMP_LT = 2
CMP_GT = 3

# if-condition kinds
COND_CONST = 0
COND_PTR = 1
COND_FLUENT = 2

# halt reasons
HALT_END = 0
HALT_UNDEFINED = 1
HALT_FUEL = 2
HALT_OVERFLOW = 3

HALT_NAMES = {HALT_END: "end", HALT_UNDEFINED: "undefined_line",
              HALT_FUEL: "fuel_exhausted", HALT_OVERFLOW: "runtime_error"}

_CMP_CODE = {"==": CMP_EQ, "!=": CMP_NE, "<": CMP_LT, ">": CMP_GT}

PROG_COLS = 16


class PackedDomain:
    """Domain tables shared by every instance of the same domain."""

    def __init__(self, dom: Domain):
        self.dom = dom
        self.type_index = {t: k for k, t in enumerate(dom.types)}
        self.pred_index = {p.name: k for k, p in enumerate(dom.predicates)}
        self.scheme_index = {s.name: k for k, s in enumerate(dom.schemes)}
        np_ = len(dom.predicates)
        self.pred_arity = np.zeros(np_, dtype=np.int32)
        self.pred_types = np.zeros((np_, MAXAR), dtype=np.int32)
        for k, p in enumerate(dom.predicates):
            if p.arity > MAXAR:
                raise SemanticError(
                    f"fluent '{p.name}' arity {p.arity} exceeds {MAXAR}")
            self.pred_arity[k] = p.arity
            for j, t in enumerate(p.argument_types):
                self.pred_types[k, j] = self.type_index[t]

        ns = len(dom.schemes)
        self.scheme_arity = np.zeros(ns, dtype=np.int32)
        self.scheme_param_type = np.zeros((ns, MAXAR), dtype=np.int32)
        pre_rows, pre_lconst, pre_rconst = [], [], []
        eff_rows, eff_const = [], []
        self.pre_off = np.zeros(ns + 1, dtype=np.int32)
        self.eff_off = np.zeros(ns + 1, dtype=np.int32)
        for k, s in enumerate(dom.schemes):
            if s.arity > MAXAR:
                raise SemanticError(
                    f"action '{s.name}' arity {s.arity} exceeds {MAXAR}")
            self.scheme_arity[k] = s.arity
            pslot = {v: j for j, (v, _) in enumerate(s.parameters)}
            for j, t in enumerate(s.parameter_types):
                self.scheme_param_type[k, j] = self.type_index[t]
            for a in s.precondition:
                row = np.zeros(13, dtype=np.int32)
                lc = rc = 0
                if isinstance(a.lhs, FluentRef):
                    row[0] = 1
                    row[1] = self.pred_index[a.lhs.pred]
                    for j, v in enumerate(a.lhs.args):
                        row[2 + j] = pslot[v]
                else:
                    lc = int(a.lhs)
                row[6] = _CMP_CODE[a.op]
                if isinstance(a.rhs, FluentRef):
                    row[7] = 1
                    row[8] = self.pred_index[a.rhs.pred]
                    for j, v in enumerate(a.rhs.args):
                        row[9 + j] = pslot[v]
                else:
                    rc = int(a.rhs)
                pre_rows.append(row)
                pre_lconst.append(lc)
                pre_rconst.append(rc)
            self.pre_off[k + 1] = len(pre_rows)
            for e in s.effects:
                row = np.zeros(12, dtype=np.int32)
                row[0] = self.pred_index[e.target.pred]
                for j, v in enumerate(e.target.args):
                    row[1 + j] = pslot[v]
                row[5] = {"assign": 0, "increase": 1, "decrease": 2}[e.op]
                c = 0
                if isinstance(e.operand, FluentRef):
                    row[6] = 1
                    row[7] = self.pred_index[e.operand.pred]
                    for j, v in enumerate(e.operand.args):
                        row[8 + j] = pslot[v]
                else:
                    c = int(e.operand)
                eff_rows.append(row)
                eff_const.append(c)
            self.eff_off[k + 1] = len(eff_rows)
        self.pre_mat = (np.stack(pre_rows) if pre_rows
                        else np.zeros((0, 13), dtype=np.int32))
        self.pre_lconst = np.asarray(pre_lconst, dtype=np.int64)
        self.pre_rconst = np.asarray(pre_rconst, dtype=np.int64)
        self.eff_mat = (np.stack(eff_rows) if eff_rows
                        else np.zeros((0, 12), dtype=np.int32))
        self.eff_const = np.asarray(eff_const, dtype=np.int64)


class PackedInstance:
    """Dense state image, goal table and fluent addressing for one instance."""

    def __init__(self, pdom: PackedDomain, inst: Instance):
        self.pdom = pdom
        self.inst = inst
        dom = pdom.dom
        self.type_count = np.zeros(len(dom.types), dtype=np.int64)
        for t, k in pdom.type_index.items():
            self.type_count[k] = inst.count(t)
        np_ = len(dom.predicates)
        self.pred_base = np.zeros(np_, dtype=np.int64)
        self.pred_stride = np.zeros((np_, MAXAR), dtype=np.int64)
        offset = 0
        for k, p in enumerate(dom.predicates):
            counts = [inst.count(t) for t in p.argument_types]
            cells = 1
            for c in counts:
                cells *= c
            self.pred_base[k] = offset
            stride = 1
            for j in range(p.arity - 1, -1, -1):
                self.pred_stride[k, j] = stride
                stride *= counts[j]
            offset += cells
        self.size = offset
        self.state0 = np.zeros(offset, dtype=np.int64)
        for a in inst.init:
            self.state0[self.address(a.target)] = a.operand
        self.goal_off = np.zeros(len(inst.goal), dtype=np.int64)
        self.goal_target = np.zeros(len(inst.goal), dtype=np.int64)
        for j, (ref, target) in enumerate(inst.goal):
            self.goal_off[j] = self.address(ref)
            self.goal_target[j] = target

    def address(self, ref: FluentRef) -> int:
        k = self.pdom.pred_index[ref.pred]
        off = int(self.pred_base[k])
        for j, idx in enumerate(ref.args):
            off += int(idx) * int(self.pred_stride[k, j])
        return off

    def decode(self, offset: int) -> FluentRef:
        """Inverse of :meth:`address`, for reporting."""
        pdom = self.pdom
        k = int(np.searchsorted(pdom.pred_base if False else self.pred_base,
                                offset, side="right")) - 1
        # pred_base is nondecreasing but zero-cell fluents share offsets;
        # scan for the fluent whose cell range contains the offset
        for k, p in enumerate(pdom.dom.predicates):
            cells = 1
            for t in p.argument_types:
                cells *= self.inst.count(t)
            base = int(self.pred_base[k])
            if cells and base <= offset < base + cells:
                rem = offset - base
                idx = []
                for j in range(p.arity):
                    s = int(self.pred_stride[k, j])
                    idx.append(rem // s)
                    rem %= s
                return FluentRef(p.name, tuple(idx))
        raise IndexError(offset)


def encode_row(ins, pdom: PackedDomain, ptr_index: dict[str, int]):
    """One instruction as (PROG_COLS ints, int64 condition constant)."""
    row = [0] * PROG_COLS
    const = 0
    if ins is None:
        row[0] = OP_UNDEF
    elif isinstance(ins, ActionCall):
        row[0] = OP_ACT
        row[1] = pdom.scheme_index[ins.scheme]
        for j, a in enumerate(ins.args):
            row[2 + j] = ptr_index[a]
    elif isinstance(ins, PointerInc):
        row[0] = OP_INC
        row[1] = ptr_index[ins.ptr]
    elif isinstance(ins, PointerDec):
        row[0] = OP_DEC
        row[1] = ptr_index[ins.ptr]
    elif isinstance(ins, ForStart):
        row[0] = OP_FOR
        row[1] = ptr_index[ins.ptr]
        row[2] = 0 if ins.direction == ASC else 1
        row[3] = -1 if ins.end_line is None else ins.end_line
    elif isinstance(ins, ForEnd):
        row[0] = OP_ENDFOR
        row[1] = ins.start_line
    elif isinstance(ins, IfStart):
        row[0] = OP_IF
        row[3] = -1 if ins.end_line is None else ins.end_line
        c = ins.cond
        if isinstance(c, CmpConst):
            row[1] = COND_CONST
            row[2] = _CMP_CODE[c.op]
            row[4] = pdom.pred_index[c.ref.pred]
            for j, a in enumerate(c.ref.args):
                row[5 + j] = ptr_index[a]
            const = c.value
        elif isinstance(c, CmpPointer):
            row[1] = COND_PTR
            row[2] = _CMP_CODE[c.op]
            row[4] = ptr_index[c.left]
            row[5] = ptr_index[c.right]
        elif isinstance(c, CmpFluent):
            row[1] = COND_FLUENT
            row[2] = _CMP_CODE[c.op]
            row[4] = pdom.pred_index[c.left.pred]
            for j, a in enumerate(c.left.args):
                row[5 + j] = ptr_index[a]
            row[9] = pdom.pred_index[c.right.pred]
            for j, a in enumerate(c.right.args):
                row[10 + j] = ptr_index[a]
        else:
            raise TypeError(c)
    elif isinstance(ins, IfEnd):
        row[0] = OP_ENDIF
        row[1] = ins.start_line
    elif isinstance(ins, End):
        row[0] = OP_END
    else:
        raise TypeError(ins)
    return row, const


class PackedProgram:
    """Line matrix + int64 condition constants for one (partial) program."""

    def __init__(self, p: PartialProgram, pdom: PackedDomain,
                 pointers: tuple[Pointer, ...]):
        self.n = p.n
        ptr_index = {z.name: k for k, z in enumerate(pointers)}
        self.ptr_type = np.asarray(
            [pdom.type_index[z.type] for z in pointers], dtype=np.int32)
        mat = np.zeros((p.n, PROG_COLS), dtype=np.int32)
        cond_const = np.zeros(p.n, dtype=np.int64)
        for i, ins in enumerate(p.lines):
            if ins is None:
                continue
            row, const = encode_row(ins, pdom, ptr_index)
            mat[i] = row
            cond_const[i] = const
        self.mat = mat
        self.cond_const = cond_const


class RawResult:
    """Kernel output: halt code, counters, distance and optional extras."""

    __slots__ = ("halt", "attempted", "visits", "distance", "goals_ok",
                 "applied", "state")

    def __init__(self, halt, attempted, visits, distance, goals_ok,
                 applied=None, state=None):
        self.halt = halt
        self.attempted = attempted
        self.visits = visits
        self.distance = distance
        self.goals_ok = goals_ok
        self.applied = applied  # list of (scheme_id, (obj indices...))
        self.state = state  # int64 vector or None
