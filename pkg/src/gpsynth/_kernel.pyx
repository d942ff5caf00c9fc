# cython: language_level=3, boundscheck=False, wraparound=False
# cython: initializedcheck=False, nonecheck=False, cdivision=True
"""Compiled execution kernel.

Semantics mirror ``_pykernel`` exactly (the differential tests enforce
it); only the representation is C-level: dense int64 state vectors, flat
scheme tables, a switch-dispatch program loop.
"""

import numpy as np

from libc.limits cimport LLONG_MAX, LLONG_MIN
from libc.string cimport memcpy

from .packing import RawResult

COMPILED = True

cdef enum:
    MAXAR = 4
    OP_UNDEF = 0
    OP_ACT = 1
    OP_INC = 2
    OP_DEC = 3
    OP_FOR = 4
    OP_ENDFOR = 5
    OP_IF = 6
    OP_ENDIF = 7
    OP_END = 8
    CMP_EQ = 0
    CMP_NE = 1
    CMP_LT = 2
    CMP_GT = 3
    COND_CONST = 0
    COND_PTR = 1
    COND_FLUENT = 2
    HALT_END = 0
    HALT_UNDEFINED = 1
    HALT_FUEL = 2
    HALT_OVERFLOW = 3
    MAX_EFFECTS = 64
    MAX_PTRS = 64

cdef long long BIG = 1073741824          # 2**30
cdef long long SAT = 4611686018427387904  # 2**62


cdef inline bint _cmp(long long a, long long b, int code) nogil:
    if code == CMP_EQ:
        return a == b
    if code == CMP_NE:
        return a != b
    if code == CMP_LT:
        return a < b
    return a > b


cdef class Executor:
    """Executes packed programs on one packed instance."""

    cdef long long[::1] pred_base
    cdef long long[:, ::1] pred_stride
    cdef int[::1] pred_arity
    cdef long long[::1] type_count
    cdef long long[::1] state0
    cdef long long[::1] goal_off
    cdef long long[::1] goal_target
    cdef int[::1] scheme_arity
    cdef int[:, ::1] scheme_param_type
    cdef int[::1] pre_off
    cdef int[:, ::1] pre_mat
    cdef long long[::1] pre_lconst
    cdef long long[::1] pre_rconst
    cdef int[::1] eff_off
    cdef int[:, ::1] eff_mat
    cdef long long[::1] eff_const
    cdef long long[::1] work  # reusable state buffer
    cdef long long bound_range[MAX_PTRS]
    cdef int bound_nptr
    cdef public object pinst

    def __init__(self, pinst):
        pdom = pinst.pdom
        self.pinst = pinst
        self.pred_base = pinst.pred_base
        self.pred_stride = pinst.pred_stride
        self.pred_arity = pdom.pred_arity
        self.type_count = pinst.type_count
        self.state0 = pinst.state0
        self.goal_off = pinst.goal_off
        self.goal_target = pinst.goal_target
        self.scheme_arity = pdom.scheme_arity
        self.scheme_param_type = pdom.scheme_param_type
        self.pre_off = pdom.pre_off
        self.pre_mat = pdom.pre_mat
        self.pre_lconst = pdom.pre_lconst
        self.pre_rconst = pdom.pre_rconst
        self.eff_off = pdom.eff_off
        self.eff_mat = pdom.eff_mat
        self.eff_const = pdom.eff_const
        self.work = np.empty(pinst.size, dtype=np.int64)
        self.bound_nptr = 0

    cdef inline long long _addr(self, int pred, long long* objs) nogil:
        cdef long long off = self.pred_base[pred]
        cdef int j
        for j in range(self.pred_arity[pred]):
            off += objs[j] * self.pred_stride[pred, j]
        return off

    cdef inline bint _try_action(self, int scheme, long long* objs,
                                 long long* state, bint* overflow) nogil:
        cdef int r, j, k, op
        cdef long long lhs, rhs, value, addr
        cdef long long fobjs[MAXAR]
        cdef long long operands[MAX_EFFECTS]
        for r in range(self.pre_off[scheme], self.pre_off[scheme + 1]):
            if self.pre_mat[r, 0]:
                for j in range(MAXAR):
                    fobjs[j] = objs[self.pre_mat[r, 2 + j]]
                lhs = state[self._addr(self.pre_mat[r, 1], fobjs)]
            else:
                lhs = self.pre_lconst[r]
            if self.pre_mat[r, 7]:
                for j in range(MAXAR):
                    fobjs[j] = objs[self.pre_mat[r, 9 + j]]
                rhs = state[self._addr(self.pre_mat[r, 8], fobjs)]
            else:
                rhs = self.pre_rconst[r]
            if not _cmp(lhs, rhs, self.pre_mat[r, 6]):
                return False
        cdef int lo = self.eff_off[scheme]
        cdef int hi = self.eff_off[scheme + 1]
        for r in range(lo, hi):
            k = r - lo
            if self.eff_mat[r, 6]:
                for j in range(MAXAR):
                    fobjs[j] = objs[self.eff_mat[r, 8 + j]]
                operands[k] = state[self._addr(self.eff_mat[r, 7], fobjs)]
            else:
                operands[k] = self.eff_const[r]
        for r in range(lo, hi):
            k = r - lo
            for j in range(MAXAR):
                fobjs[j] = objs[self.eff_mat[r, 1 + j]]
            addr = self._addr(self.eff_mat[r, 0], fobjs)
            op = self.eff_mat[r, 5]
            if op == 0:
                value = operands[k]
            elif op == 1:
                if (operands[k] > 0 and state[addr] > LLONG_MAX - operands[k]) \
                        or (operands[k] < 0 and state[addr] < LLONG_MIN - operands[k]):
                    overflow[0] = True
                    return True
                value = state[addr] + operands[k]
            else:
                if (operands[k] > 0 and state[addr] < LLONG_MIN + operands[k]) \
                        or (operands[k] < 0 and state[addr] > LLONG_MAX + operands[k]):
                    overflow[0] = True
                    return True
                value = state[addr] - operands[k]
            state[addr] = value
        return True

    cdef long long _distance(self, long long* state) nogil:
        cdef long long total = 0
        cdef long long s, target, d, dd
        cdef Py_ssize_t j
        for j in range(self.goal_off.shape[0]):
            s = state[self.goal_off[j]]
            target = self.goal_target[j]
            if -BIG < s < BIG and -BIG < target < BIG:
                d = s - target
                dd = d * d
            else:
                dd = SAT
            if dd >= SAT - total:
                return SAT
            total += dd
        return total

    def run(self, prog, long long fuel=0, bint record=False,
            bint want_state=False):
        cdef int[:, ::1] mat = prog.mat
        cdef long long[::1] cond_const = prog.cond_const
        cdef int[::1] ptr_type = prog.ptr_type
        cdef int n = prog.n
        cdef int nptr = ptr_type.shape[0]
        cdef long long ptr_range[MAX_PTRS]
        cdef long long ptrval[MAX_PTRS]
        cdef int j
        if nptr > MAX_PTRS:
            raise ValueError("more than 64 pointers")
        for j in range(nptr):
            ptr_range[j] = self.type_count[ptr_type[j]]
            ptrval[j] = 0

        cdef long long[::1] work = self.work
        cdef Py_ssize_t size = self.state0.shape[0]
        cdef long long* state = NULL
        if size > 0:
            work[:] = self.state0
            state = &work[0]

        cdef int pc = 0
        cdef long long visits = 0
        cdef long long attempted = 0
        cdef int halt = HALT_UNDEFINED
        cdef int op, z, scheme, arity, kind, nargs, s_line, end
        cdef bint ok, truth, did, overflow
        cdef long long rng, value, lv, rv
        cdef long long objs[MAXAR]
        cdef long long lobjs[MAXAR]
        applied = [] if record else None

        while True:
            if pc >= n:
                halt = HALT_UNDEFINED
                break
            op = mat[pc, 0]
            visits += 1
            if fuel > 0 and visits > fuel:
                halt = HALT_FUEL
                break
            if op == OP_UNDEF:
                halt = HALT_UNDEFINED
                break
            elif op == OP_END:
                halt = HALT_END
                break
            elif op == OP_ACT:
                attempted += 1
                scheme = mat[pc, 1]
                arity = self.scheme_arity[scheme]
                ok = True
                for j in range(arity):
                    z = mat[pc, 2 + j]
                    if ptr_range[z] <= 0:
                        ok = False
                        break
                    objs[j] = ptrval[z]
                for j in range(arity, MAXAR):
                    objs[j] = 0
                if ok:
                    overflow = False
                    did = self._try_action(scheme, objs, state, &overflow)
                    if overflow:
                        halt = HALT_OVERFLOW
                        break
                    if did and record:
                        applied.append(
                            (scheme, tuple(objs[j] for j in range(arity))))
                pc += 1
            elif op == OP_INC:
                z = mat[pc, 1]
                if ptrval[z] + 1 < ptr_range[z]:
                    ptrval[z] += 1
                pc += 1
            elif op == OP_DEC:
                z = mat[pc, 1]
                if ptrval[z] > 0:
                    ptrval[z] -= 1
                pc += 1
            elif op == OP_FOR:
                z = mat[pc, 1]
                rng = ptr_range[z]
                if rng <= 0:
                    end = mat[pc, 3]
                    if end < 0:
                        halt = HALT_UNDEFINED
                        break
                    pc = end + 1
                else:
                    ptrval[z] = 0 if mat[pc, 2] == 0 else rng - 1
                    pc += 1
            elif op == OP_ENDFOR:
                s_line = mat[pc, 1]
                z = mat[s_line, 1]
                if mat[s_line, 2] == 0:
                    if ptrval[z] + 1 < ptr_range[z]:
                        ptrval[z] += 1
                        pc = s_line + 1
                    else:
                        pc += 1
                else:
                    if ptrval[z] > 0:
                        ptrval[z] -= 1
                        pc = s_line + 1
                    else:
                        pc += 1
            elif op == OP_IF:
                kind = mat[pc, 1]
                truth = False
                if kind == COND_PTR:
                    truth = _cmp(ptrval[mat[pc, 4]], ptrval[mat[pc, 5]],
                                 mat[pc, 2])
                elif kind == COND_CONST:
                    scheme = mat[pc, 4]  # predicate id
                    nargs = self.pred_arity[scheme]
                    ok = True
                    for j in range(nargs):
                        z = mat[pc, 5 + j]
                        if ptr_range[z] <= 0:
                            ok = False
                            break
                        objs[j] = ptrval[z]
                    if ok:
                        value = state[self._addr(scheme, objs)]
                        truth = _cmp(value, cond_const[pc], mat[pc, 2])
                else:
                    scheme = mat[pc, 4]
                    nargs = self.pred_arity[scheme]
                    ok = True
                    for j in range(nargs):
                        z = mat[pc, 5 + j]
                        if ptr_range[z] <= 0:
                            ok = False
                            break
                        lobjs[j] = ptrval[z]
                    if ok:
                        kind = mat[pc, 9]  # right predicate id
                        nargs = self.pred_arity[kind]
                        for j in range(nargs):
                            z = mat[pc, 10 + j]
                            if ptr_range[z] <= 0:
                                ok = False
                                break
                            objs[j] = ptrval[z]
                        if ok:
                            lv = state[self._addr(scheme, lobjs)]
                            rv = state[self._addr(kind, objs)]
                            truth = _cmp(lv, rv, mat[pc, 2])
                if truth:
                    pc += 1
                else:
                    end = mat[pc, 3]
                    if end < 0:
                        halt = HALT_UNDEFINED
                        break
                    pc = end + 1
            elif op == OP_ENDIF:
                pc += 1
            else:
                raise AssertionError(f"bad opcode {op}")

        cdef long long distance = self._distance(state)
        cdef bint goals_ok = True
        cdef Py_ssize_t g
        for g in range(self.goal_off.shape[0]):
            if state[self.goal_off[g]] != self.goal_target[g]:
                goals_ok = False
                break
        out_state = np.asarray(work).copy() if want_state else None
        return RawResult(halt, attempted, visits, distance,
                         bool(goals_ok), applied, out_state)

    def evaluate(self, prog, long long fuel=0):
        """(distance, solved, errored) without trace materialization."""
        res = self.run(prog, fuel=fuel, record=False, want_state=False)
        if res.halt == HALT_OVERFLOW or res.halt == HALT_FUEL:
            return res.distance, False, True
        return res.distance, res.goals_ok and res.halt == HALT_END, False


    def bind_pointers(self, ptr_type):
        """Cache pointer ranges for the fast evaluation path."""
        cdef int[::1] pt = np.ascontiguousarray(ptr_type, dtype=np.int32)
        cdef int nptr = pt.shape[0]
        if nptr > MAX_PTRS:
            raise ValueError("more than 64 pointers")
        cdef int j
        for j in range(nptr):
            self.bound_range[j] = self.type_count[pt[j]]
        self.bound_nptr = nptr

    cdef void _eval_core(self, const int[:, ::1] mat,
                         const long long[::1] cond_const, long long fuel,
                         long long* out) nogil:
        """out[0] = halt code, out[1] = distance, out[2] = goals ok."""
        cdef int n = <int> mat.shape[0]
        cdef long long ptrval[MAX_PTRS]
        cdef int j
        for j in range(self.bound_nptr):
            ptrval[j] = 0
        cdef long long* ptr_range = self.bound_range
        cdef Py_ssize_t size = self.state0.shape[0]
        cdef long long* state = NULL
        if size > 0:
            memcpy(&self.work[0], &self.state0[0],
                   size * sizeof(long long))
            state = &self.work[0]

        cdef int pc = 0
        cdef long long visits = 0
        cdef int halt = HALT_UNDEFINED
        cdef int op, z, scheme, arity, kind, nargs, s_line, end
        cdef bint ok, truth, did, overflow
        cdef long long rng, value, lv, rv
        cdef long long objs[MAXAR]
        cdef long long lobjs[MAXAR]

        while True:
            if pc >= n:
                halt = HALT_UNDEFINED
                break
            op = mat[pc, 0]
            visits += 1
            if fuel > 0 and visits > fuel:
                halt = HALT_FUEL
                break
            if op == OP_UNDEF:
                halt = HALT_UNDEFINED
                break
            elif op == OP_END:
                halt = HALT_END
                break
            elif op == OP_ACT:
                scheme = mat[pc, 1]
                arity = self.scheme_arity[scheme]
                ok = True
                for j in range(arity):
                    z = mat[pc, 2 + j]
                    if ptr_range[z] <= 0:
                        ok = False
                        break
                    objs[j] = ptrval[z]
                for j in range(arity, MAXAR):
                    objs[j] = 0
                if ok:
                    overflow = False
                    did = self._try_action(scheme, objs, state, &overflow)
                    if overflow:
                        halt = HALT_OVERFLOW
                        break
                pc += 1
            elif op == OP_INC:
                z = mat[pc, 1]
                if ptrval[z] + 1 < ptr_range[z]:
                    ptrval[z] += 1
                pc += 1
            elif op == OP_DEC:
                z = mat[pc, 1]
                if ptrval[z] > 0:
                    ptrval[z] -= 1
                pc += 1
            elif op == OP_FOR:
                z = mat[pc, 1]
                rng = ptr_range[z]
                if rng <= 0:
                    end = mat[pc, 3]
                    if end < 0:
                        halt = HALT_UNDEFINED
                        break
                    pc = end + 1
                else:
                    ptrval[z] = 0 if mat[pc, 2] == 0 else rng - 1
                    pc += 1
            elif op == OP_ENDFOR:
                s_line = mat[pc, 1]
                z = mat[s_line, 1]
                if mat[s_line, 2] == 0:
                    if ptrval[z] + 1 < ptr_range[z]:
                        ptrval[z] += 1
                        pc = s_line + 1
                    else:
                        pc += 1
                else:
                    if ptrval[z] > 0:
                        ptrval[z] -= 1
                        pc = s_line + 1
                    else:
                        pc += 1
            elif op == OP_IF:
                kind = mat[pc, 1]
                truth = False
                if kind == COND_PTR:
                    truth = _cmp(ptrval[mat[pc, 4]], ptrval[mat[pc, 5]],
                                 mat[pc, 2])
                elif kind == COND_CONST:
                    scheme = mat[pc, 4]
                    nargs = self.pred_arity[scheme]
                    ok = True
                    for j in range(nargs):
                        z = mat[pc, 5 + j]
                        if ptr_range[z] <= 0:
                            ok = False
                            break
                        objs[j] = ptrval[z]
                    if ok:
                        value = state[self._addr(scheme, objs)]
                        truth = _cmp(value, cond_const[pc], mat[pc, 2])
                else:
                    scheme = mat[pc, 4]
                    nargs = self.pred_arity[scheme]
                    ok = True
                    for j in range(nargs):
                        z = mat[pc, 5 + j]
                        if ptr_range[z] <= 0:
                            ok = False
                            break
                        lobjs[j] = ptrval[z]
                    if ok:
                        kind = mat[pc, 9]
                        nargs = self.pred_arity[kind]
                        for j in range(nargs):
                            z = mat[pc, 10 + j]
                            if ptr_range[z] <= 0:
                                ok = False
                                break
                            objs[j] = ptrval[z]
                        if ok:
                            lv = state[self._addr(scheme, lobjs)]
                            rv = state[self._addr(kind, objs)]
                            truth = _cmp(lv, rv, mat[pc, 2])
                if truth:
                    pc += 1
                else:
                    end = mat[pc, 3]
                    if end < 0:
                        halt = HALT_UNDEFINED
                        break
                    pc = end + 1
            elif op == OP_ENDIF:
                pc += 1
            else:
                halt = HALT_OVERFLOW  # unreachable; defensive
                break

        out[0] = halt
        out[1] = self._distance(state)
        out[2] = 1
        cdef Py_ssize_t g
        for g in range(self.goal_off.shape[0]):
            if state[self.goal_off[g]] != self.goal_target[g]:
                out[2] = 0
                break


def evaluate_all(list execs, mat, cond_const, long long fuel=0):
    """(total distance, solved on all, errored) for one packed program."""
    cdef const int[:, ::1] m = mat
    cdef const long long[::1] cc = cond_const
    cdef long long total = 0
    cdef bint solved = True
    cdef long long out[3]
    cdef Executor ex
    for obj in execs:
        ex = <Executor> obj
        ex._eval_core(m, cc, fuel, out)
        if out[0] == HALT_OVERFLOW or out[0] == HALT_FUEL:
            return out[1], False, True
        if out[1] >= SAT - total:
            total = SAT
        else:
            total += out[1]
        if out[2] == 0 or out[0] != HALT_END:
            solved = False
    return total, solved, False
