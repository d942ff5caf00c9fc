"""Translation of (domain, instance, program) into a standalone validator.

The output is a single C++17 translation unit over the runtime header
(``gp_runtime.hpp``): one associative container per fluent, one boolean
function per action scheme (guarded precondition, simultaneous effects
via hoisted pre-state temporaries), init/goal functions for the instance
and the program body as structured for/if statements with compile-time
loop bounds.  Emission is a pure function of its inputs: emitting twice
yields byte-identical source.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import BOOLEAN, Domain, FluentRef, Instance
from .program import (ActionCall, CmpConst, CmpFluent, CmpPointer, End,
                      ForEnd, ForStart, IfEnd, IfStart, PartialProgram,
                      PointerDec, PointerInc, ProgramLimits)

RUNTIME_HEADER = "gp_runtime.hpp"
COMPILE_FLAGS = ("-O2", "-std=c++17")


@dataclass
class EmittedBundle:
    source_text: str
    manifest: dict


def _sanitize(name: str) -> str:
    return re.sub(r"[^0-9A-Za-z_]", "_", name)


class _Names:
    """Deterministic identifier mangling; collisions get ordinal suffixes."""

    def __init__(self, dom: Domain):
        self.fluent = {}
        self.scheme = {}
        taken = set()

        def claim(base):
            name = base
            k = 2
            while name in taken:
                name = f"{base}_{k}"
                k += 1
            taken.add(name)
            return name

        for p in dom.predicates:
            prefix = "pred_" if p.kind == BOOLEAN else "fn_"
            self.fluent[p.name] = claim(prefix + _sanitize(p.name))
        for s in dom.schemes:
            self.scheme[s.name] = claim("act_" + _sanitize(s.name))


def _key(args) -> str:
    return "{" + ", ".join(args) + "}"


def _term_cpp(term, names, argvars) -> str:
    if isinstance(term, FluentRef):
        return (f"{names.fluent[term.pred]}.get("
                f"{_key(argvars[v] for v in term.args)})")
    return f"{term}LL"


_CPP_OP = {"==": "==", "!=": "!=", "<": "<", ">": ">"}


def emit_state_decls(dom: Domain, names: _Names | None = None) -> str:
    """One integer-tuple-keyed container per fluent."""
    names = names or _Names(dom)
    lines = []
    for p in dom.predicates:
        args = ", ".join(p.argument_types) if p.arity else ""
        lines.append(f"gp::Table {names.fluent[p.name]};  // ({args})")
    return "\n".join(lines) + ("\n" if lines else "")


def emit_action_fns(dom: Domain, names: _Names | None = None) -> str:
    """Boolean function per scheme: guard, hoisted simultaneous effects."""
    names = names or _Names(dom)
    out = []
    for s in dom.schemes:
        argvars = {v: f"x{k}" for k, (v, _) in enumerate(s.parameters)}
        params = ", ".join(f"int {argvars[v]}" for v, _ in s.parameters)
        guard = " && ".join(
            f"({_term_cpp(a.lhs, names, argvars)} {_CPP_OP[a.op]} "
            f"{_term_cpp(a.rhs, names, argvars)})"
            for a in s.precondition) or "true"
        body = []
        for k, e in enumerate(s.effects):
            pre = (f"{names.fluent[e.target.pred]}.get("
                   f"{_key(argvars[v] for v in e.target.args)})")
            operand = _term_cpp(e.operand, names, argvars)
            if e.op == "assign":
                body.append(f"    const long long t{k} = {operand};")
            elif e.op == "increase":
                body.append(f"    const long long t{k} = {pre} + {operand};")
            else:
                body.append(f"    const long long t{k} = {pre} - {operand};")
        for k, e in enumerate(s.effects):
            target = (f"{names.fluent[e.target.pred]}.set("
                      f"{_key(argvars[v] for v in e.target.args)}, t{k});")
            body.append(f"    {target}")
        fn = [f"bool {names.scheme[s.name]}({params}) {{",
              f"  if ({guard}) {{"]
        fn.extend(body)
        fn.extend(["    return true;", "  }", "  return false;", "}"])
        out.append("\n".join(fn))
    return "\n\n".join(out) + ("\n" if out else "")


def emit_instance_fns(inst: Instance, dom: Domain,
                      names: _Names | None = None) -> str:
    """Write-only init procedure and read-only goal predicate."""
    names = names or _Names(dom)
    lines = ["void init() {"]
    for a in inst.init:
        key = _key(str(i) for i in a.target.args)
        lines.append(f"  {names.fluent[a.target.pred]}.set({key}, "
                     f"{a.operand});")
    lines.append("}")
    lines.append("")
    lines.append("bool goals() {")
    if inst.goal:
        conds = []
        for ref, target in inst.goal:
            key = _key(str(i) for i in ref.args)
            conds.append(f"({names.fluent[ref.pred]}.get({key}) == {target})")
        joined = "\n      && ".join(conds)
        lines.append(f"  return {joined};")
    else:
        lines.append("  return true;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cond_cpp(cond, names) -> str:
    if isinstance(cond, CmpPointer):
        return f"{cond.left} {_CPP_OP[cond.op]} {cond.right}"
    if isinstance(cond, CmpConst):
        ref = (f"{names.fluent[cond.ref.pred]}.get("
               f"{_key(cond.ref.args)})")
        return f"{ref} {_CPP_OP[cond.op]} {cond.value}"
    if isinstance(cond, CmpFluent):
        left = f"{names.fluent[cond.left.pred]}.get({_key(cond.left.args)})"
        right = f"{names.fluent[cond.right.pred]}.get({_key(cond.right.args)})"
        return f"{left} {_CPP_OP[cond.op]} {right}"
    raise TypeError(cond)


def emit_program_fn(p: PartialProgram, dom: Domain, inst: Instance,
                    limits: ProgramLimits,
                    names: _Names | None = None) -> str:
    """The program body as structured statements with instance bounds."""
    names = names or _Names(dom)
    pointers = limits.pointers(dom)
    ptr_type = {z.name: z.type for z in pointers}
    size_of = {z.name: f"SIZE_{_sanitize(z.type)}" for z in pointers}
    obj_of = {t: f"obj_{_sanitize(t)}" for t in dom.types}
    scheme_of = {s.name: s for s in dom.schemes}

    lines = ["void run_program() {"]
    decl = ", ".join(f"{z.name} = 0" for z in pointers)
    if decl:
        lines.append(f"  int {decl};")
    depth = 1

    def pad():
        return "  " * depth

    for ins in p.defined:
        if isinstance(ins, ForStart):
            size = size_of[ins.ptr]
            if ins.direction == "asc":
                header = (f"for ({ins.ptr} = 0; {ins.ptr} < {size}; "
                          f"{ins.ptr}++) {{")
            else:
                header = (f"for ({ins.ptr} = {size} - 1; {ins.ptr} >= 0; "
                          f"{ins.ptr}--) {{")
            lines.append(pad() + header)
            depth += 1
        elif isinstance(ins, (ForEnd, IfEnd)):
            depth -= 1
            lines.append(pad() + "}")
        elif isinstance(ins, IfStart):
            lines.append(pad() + f"if ({_cond_cpp(ins.cond, names)}) {{")
            depth += 1
        elif isinstance(ins, PointerInc):
            lines.append(pad() + f"{ins.ptr} = gp::sat_inc({ins.ptr}, "
                         f"{size_of[ins.ptr]});")
        elif isinstance(ins, PointerDec):
            lines.append(pad() + f"{ins.ptr} = gp::sat_dec({ins.ptr});")
        elif isinstance(ins, ActionCall):
            scheme = scheme_of[ins.scheme]
            call = f"{names.scheme[ins.scheme]}({', '.join(ins.args)})"
            objs = ", ".join(
                f"{obj_of[t]}[{z}]"
                for z, t in zip(ins.args, scheme.parameter_types))
            lines.append(pad() + "gp::attempted += 1;")
            lines.append(pad() + f"if ({call}) gp::record(\"{ins.scheme}\", "
                         f"{{{objs}}});")
        elif isinstance(ins, End):
            lines.append(pad() + "return;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_bundle(p: PartialProgram, dom: Domain, inst: Instance,
                limits: ProgramLimits) -> EmittedBundle:
    """Assemble the full validator translation unit plus its manifest."""
    names = _Names(dom)
    pointers = limits.pointers(dom)
    used_types = sorted({z.type for z in pointers} |
                        {t for s in dom.schemes for t in s.parameter_types})

    parts = [
        f"// {dom.name} / {inst.name}: standalone plan validator",
        f'#include "{RUNTIME_HEADER}"',
        "",
        "// state",
        emit_state_decls(dom, names),
        "// objects",
    ]
    for t in used_types:
        objs = inst.objects.get(t, ())
        quoted = ", ".join(f'"{o}"' for o in objs)
        parts.append(f"static const char* const obj_{_sanitize(t)}[] = "
                     f"{{{quoted}}};" if objs else
                     f"static const char* const obj_{_sanitize(t)}[] = "
                     f"{{\"\"}};  // empty type")
        parts.append(f"static const int SIZE_{_sanitize(t)} = {len(objs)};")
    parts.extend([
        "",
        "// actions",
        emit_action_fns(dom, names),
        "// instance",
        emit_instance_fns(inst, dom, names),
        "// program",
        emit_program_fn(p, dom, inst, limits, names),
        "int main() {",
        "  const auto start = std::chrono::steady_clock::now();",
        "  init();",
        "  run_program();",
        "  const bool ok = goals();",
        "  const auto elapsed = std::chrono::duration_cast"
        "<std::chrono::milliseconds>(",
        "      std::chrono::steady_clock::now() - start).count();",
        "  gp::report(ok, static_cast<long long>(elapsed));",
        "  return ok ? 0 : 1;",
        "}",
    ])
    source = "\n".join(parts)
    manifest = {
        "domain": dom.name,
        "instance": inst.name,
        "header": RUNTIME_HEADER,
        "compile_flags": list(COMPILE_FLAGS),
        "fluents": dict(names.fluent),
        "schemes": dict(names.scheme),
        "pointers": {z.name: z.type for z in pointers},
        "objects": {t: list(inst.objects.get(t, ())) for t in used_types},
        "program_lines": p.next_line,
    }
    return EmittedBundle(source, manifest)
