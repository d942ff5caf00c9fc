"""Pure-Python execution kernel (fallback twin of ``_kernel``).

Same packed encodings, same semantics, no compilation requirement.  The
compiled kernel is selected at import time by ``_engine`` when available;
this module keeps every feature reachable without a C toolchain and
anchors the differential tests.
"""

from __future__ import annotations

import numpy as np

from .packing import (CMP_EQ, CMP_GT, CMP_LT, CMP_NE, COND_CONST, COND_FLUENT,
                      COND_PTR, HALT_END, HALT_FUEL, HALT_OVERFLOW,
                      HALT_UNDEFINED, OP_ACT, OP_DEC, OP_END, OP_ENDFOR,
                      OP_ENDIF, OP_FOR, OP_IF, OP_INC, OP_UNDEF, MAXAR,
                      PackedInstance, PackedProgram, RawResult)

COMPILED = False

I64_MIN = -(2**63)
I64_MAX = 2**63 - 1
_BIG = 2**30  # exact squared distances below this magnitude
_SAT = 2**62  # saturation ceiling for degenerate value ranges


def _cmp(a, b, code):
    if code == CMP_EQ:
        return a == b
    if code == CMP_NE:
        return a != b
    if code == CMP_LT:
        return a < b
    return a > b


class Executor:
    """Executes packed programs on one packed instance."""

    def __init__(self, pinst: PackedInstance):
        self.pinst = pinst
        pdom = pinst.pdom
        self.pred_base = pinst.pred_base.tolist()
        self.pred_stride = pinst.pred_stride.tolist()
        self.pred_arity = pdom.pred_arity.tolist()
        self.type_count = pinst.type_count.tolist()
        self.state0 = pinst.state0.tolist()
        self.goal_off = pinst.goal_off.tolist()
        self.goal_target = pinst.goal_target.tolist()
        self.scheme_arity = pdom.scheme_arity.tolist()
        self.scheme_param_type = pdom.scheme_param_type.tolist()
        self.pre_off = pdom.pre_off.tolist()
        self.pre_mat = pdom.pre_mat.tolist()
        self.pre_lconst = pdom.pre_lconst.tolist()
        self.pre_rconst = pdom.pre_rconst.tolist()
        self.eff_off = pdom.eff_off.tolist()
        self.eff_mat = pdom.eff_mat.tolist()
        self.eff_const = pdom.eff_const.tolist()

    # -- helpers ------------------------------------------------------------

    def _addr(self, pred, objs):
        off = self.pred_base[pred]
        stride = self.pred_stride[pred]
        for j in range(self.pred_arity[pred]):
            off += objs[j] * stride[j]
        return off

    def _fluent_ok(self, pred, ptrs, ptrval, ptr_range, nargs):
        """False when any addressing pointer ranges over an empty type."""
        for j in range(nargs):
            if ptr_range[ptrs[j]] <= 0:
                return False
        return True

    def _try_action(self, scheme, objs, state):
        """Returns (applied, overflow)."""
        for r in range(self.pre_off[scheme], self.pre_off[scheme + 1]):
            row = self.pre_mat[r]
            if row[0]:
                lhs = state[self._addr(row[1], [objs[j] for j in row[2:2 + MAXAR]])]
            else:
                lhs = self.pre_lconst[r]
            if row[7]:
                rhs = state[self._addr(row[8], [objs[j] for j in row[9:9 + MAXAR]])]
            else:
                rhs = self.pre_rconst[r]
            if not _cmp(lhs, rhs, row[6]):
                return False, False
        lo, hi = self.eff_off[scheme], self.eff_off[scheme + 1]
        operands = []
        for r in range(lo, hi):
            row = self.eff_mat[r]
            if row[6]:
                operands.append(
                    state[self._addr(row[7], [objs[j] for j in row[8:8 + MAXAR]])])
            else:
                operands.append(self.eff_const[r])
        for k, r in enumerate(range(lo, hi)):
            row = self.eff_mat[r]
            addr = self._addr(row[0], [objs[j] for j in row[1:1 + MAXAR]])
            op = row[5]
            if op == 0:
                value = operands[k]
            elif op == 1:
                value = state[addr] + operands[k]
            else:
                value = state[addr] - operands[k]
            if value < I64_MIN or value > I64_MAX:
                return True, True
            state[addr] = value
        return True, False

    def _distance(self, state):
        total = 0
        for off, target in zip(self.goal_off, self.goal_target):
            s = state[off]
            if -_BIG < s < _BIG and -_BIG < target < _BIG:
                d = s - target
                dd = d * d
            else:
                dd = _SAT
            if dd >= _SAT - total:
                return _SAT
            total += dd
        return total

    # -- main entry ----------------------------------------------------------

    def run(self, prog: PackedProgram, fuel: int = 0,
            record: bool = False, want_state: bool = False) -> RawResult:
        mat = prog.mat.tolist()
        cond_const = prog.cond_const.tolist()
        n = prog.n
        ptr_range = [self.type_count[t] for t in prog.ptr_type.tolist()]
        nptr = len(ptr_range)
        ptrval = [0] * nptr
        state = list(self.state0)
        type_count = self.type_count

        pc = 0
        visits = 0
        attempted = 0
        applied = [] if record else None
        halt = HALT_UNDEFINED
        while True:
            if pc >= n:
                halt = HALT_UNDEFINED
                break
            row = mat[pc]
            op = row[0]
            visits += 1
            if fuel > 0 and visits > fuel:
                halt = HALT_FUEL
                break
            if op == OP_UNDEF:
                halt = HALT_UNDEFINED
                break
            if op == OP_END:
                halt = HALT_END
                break
            if op == OP_ACT:
                attempted += 1
                scheme = row[1]
                arity = self.scheme_arity[scheme]
                ok = True
                objs = [0] * MAXAR
                for j in range(arity):
                    z = row[2 + j]
                    if ptr_range[z] <= 0:
                        ok = False
                        break
                    objs[j] = ptrval[z]
                if ok:
                    did, overflow = self._try_action(scheme, objs, state)
                    if overflow:
                        halt = HALT_OVERFLOW
                        break
                    if did and record:
                        applied.append((scheme, tuple(objs[:arity])))
                pc += 1
            elif op == OP_INC:
                z = row[1]
                if ptrval[z] + 1 < ptr_range[z]:
                    ptrval[z] += 1
                pc += 1
            elif op == OP_DEC:
                z = row[1]
                if ptrval[z] > 0:
                    ptrval[z] -= 1
                pc += 1
            elif op == OP_FOR:
                z = row[1]
                rng = ptr_range[z]
                if rng <= 0:
                    end = row[3]
                    if end < 0:
                        halt = HALT_UNDEFINED
                        break
                    pc = end + 1
                else:
                    ptrval[z] = 0 if row[2] == 0 else rng - 1
                    pc += 1
            elif op == OP_ENDFOR:
                s = row[1]
                srow = mat[s]
                z = srow[1]
                if srow[2] == 0:
                    if ptrval[z] + 1 < ptr_range[z]:
                        ptrval[z] += 1
                        pc = s + 1
                    else:
                        pc += 1
                else:
                    if ptrval[z] > 0:
                        ptrval[z] -= 1
                        pc = s + 1
                    else:
                        pc += 1
            elif op == OP_IF:
                kind = row[1]
                truth = False
                if kind == COND_PTR:
                    truth = _cmp(ptrval[row[4]], ptrval[row[5]], row[2])
                elif kind == COND_CONST:
                    pred = row[4]
                    nargs = self.pred_arity[pred]
                    if self._fluent_ok(pred, row[5:5 + MAXAR], ptrval,
                                       ptr_range, nargs):
                        objs = [ptrval[row[5 + j]] for j in range(nargs)]
                        value = state[self._addr(pred, objs + [0] * (MAXAR - nargs))]
                        truth = _cmp(value, cond_const[pc], row[2])
                else:
                    predl = row[4]
                    predr = row[9]
                    nl = self.pred_arity[predl]
                    nr = self.pred_arity[predr]
                    if (self._fluent_ok(predl, row[5:5 + MAXAR], ptrval,
                                        ptr_range, nl)
                            and self._fluent_ok(predr, row[10:10 + MAXAR],
                                                ptrval, ptr_range, nr)):
                        lobjs = [ptrval[row[5 + j]] for j in range(nl)]
                        robjs = [ptrval[row[10 + j]] for j in range(nr)]
                        lv = state[self._addr(predl, lobjs + [0] * (MAXAR - nl))]
                        rv = state[self._addr(predr, robjs + [0] * (MAXAR - nr))]
                        truth = _cmp(lv, rv, row[2])
                if truth:
                    pc += 1
                else:
                    end = row[3]
                    if end < 0:
                        halt = HALT_UNDEFINED
                        break
                    pc = end + 1
            elif op == OP_ENDIF:
                pc += 1
            else:
                raise AssertionError(f"bad opcode {op}")

        distance = self._distance(state)
        goals_ok = all(state[off] == t
                       for off, t in zip(self.goal_off, self.goal_target))
        out_state = np.asarray(state, dtype=np.int64) if want_state else None
        return RawResult(halt, attempted, visits, distance,
                         goals_ok, applied, out_state)

    def evaluate(self, prog: PackedProgram, fuel: int = 0):
        """(distance, solved, errored) without trace materialization."""
        res = self.run(prog, fuel=fuel, record=False, want_state=False)
        if res.halt == HALT_OVERFLOW or res.halt == HALT_FUEL:
            return res.distance, False, True
        return res.distance, res.goals_ok and res.halt == HALT_END, False

    def bind_pointers(self, ptr_type):
        self._bound_types = np.asarray(ptr_type, dtype=np.int32)


class _ArrayProgram:
    """Adapter so run() accepts raw (mat, const) arrays."""

    def __init__(self, mat, cond_const, ptr_type):
        self.mat = np.asarray(mat, dtype=np.int32)
        self.cond_const = np.asarray(cond_const, dtype=np.int64)
        self.n = self.mat.shape[0]
        self.ptr_type = ptr_type


def evaluate_all(execs, mat, cond_const, fuel=0):
    """(total distance, solved on all, errored) for one packed program."""
    total = 0
    solved = True
    for ex in execs:
        prog = _ArrayProgram(mat, cond_const, ex._bound_types)
        res = ex.run(prog, fuel=fuel, record=False, want_state=False)
        if res.halt in (HALT_OVERFLOW, HALT_FUEL):
            return res.distance, False, True
        if res.distance >= _SAT - total:
            total = _SAT
        else:
            total += res.distance
        if not res.goals_ok or res.halt != HALT_END:
            solved = False
    return total, solved, False
