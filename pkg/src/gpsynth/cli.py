"""Command-line surface: synth, run, validate, emit, complexity, gen."""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from . import generators
from .analysis import asymptotic_complexity, certify_termination
from .codegen import emit_bundle
from .interpreter import ExecutionContext, validate_plan
from .model import (Domain, GPProblem, SemanticError, parse_domain,
                    parse_instance, print_instance)
from .program import ProgramLimits, parse_program, print_program
from .synthesis import (SynthesisConfig, TIE_MAX_LOOPS, TIE_MIN_LOOPS,
                        synthesize)

_PTR_TOKEN = re.compile(r"\b(for|inc|dec)\(\s*([A-Za-z_]\w*)")
_ARGS_TOKEN = re.compile(r"\(([\w,\s]*)\)")


def parse_pointer_spec(spec: str, dom: Domain) -> dict[str, int]:
    """``3`` (single user type) or ``ball=1,room=2,gripper=1``."""
    spec = spec.strip()
    if "=" not in spec:
        count = int(spec)
        user_types = [t for t in dom.types if t != "object"]
        if len(user_types) == 1:
            return {user_types[0]: count}
        if not user_types:
            return {"object": count}
        raise SemanticError(
            "a bare pointer count needs a single-type domain; use "
            "type=count,... for " + dom.name)
    out = {}
    for part in spec.split(","):
        t, _, c = part.partition("=")
        out[t.strip()] = int(c)
    return out


def infer_limits(text: str, dom: Domain) -> ProgramLimits:
    """Recover pointer budgets from a program text's pointer names.

    Names follow the printer's convention: z<k> for single-type domains,
    <type-prefix><k> otherwise.
    """
    names = set(_PTR_TOKEN.findall(text))
    names = {n for _, n in names}
    for m in _ARGS_TOKEN.finditer(text):
        for tok in m.group(1).split(","):
            tok = tok.strip()
            if tok:
                names.add(tok)
    user_types = [t for t in dom.types if t != "object"]
    budgets: dict[str, int] = {}
    for name in names:
        m = re.fullmatch(r"([A-Za-z_]+?)(\d+)", name)
        if not m:
            continue
        prefix, ordinal = m.group(1), int(m.group(2))
        if prefix == "z" and len(user_types) == 1:
            t = user_types[0]
        elif prefix == "z" and not user_types:
            t = "object"
        else:
            matches = [t for t in dom.types
                       if t == prefix or t.startswith(prefix)]
            if len(matches) != 1:
                continue
            t = matches[0]
        budgets[t] = max(budgets.get(t, 0), ordinal)
    lines = len([ln for ln in text.splitlines()
                 if ln.strip() and not ln.strip().startswith(";")])
    return ProgramLimits(max(lines, 1), budgets)


def _load_program(path: str, dom: Domain, pointers: str | None):
    text = Path(path).read_text()
    if pointers:
        budgets = parse_pointer_spec(pointers, dom)
        lines = len([ln for ln in text.splitlines()
                     if ln.strip() and not ln.strip().startswith(";")])
        limits = ProgramLimits(max(lines, 1), budgets)
    else:
        limits = infer_limits(text, dom)
    return parse_program(text, dom, limits), limits


def _emit_doc(doc: dict, as_json: bool, human: str):
    if as_json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(human, end="")


# --- subcommands -------------------------------------------------------------


def cmd_synth(args) -> int:
    dom = parse_domain(Path(args.domain).read_text())
    instances = [parse_instance(Path(f).read_text(), dom)
                 for f in args.instances]
    prob = GPProblem(dom, tuple(instances))
    budgets = parse_pointer_spec(args.pointers, dom)
    cfg = SynthesisConfig(
        limits=ProgramLimits(args.lines, budgets),
        tie=TIE_MIN_LOOPS if args.tie == "min-loops" else TIE_MAX_LOOPS,
        time_limit=args.time_limit,
        node_limit=args.node_limit,
    )
    result = synthesize(prob, cfg)
    report = result.to_report()
    human = []
    human.append(f"status: {result.status}\n")
    if result.program is not None:
        human.append(print_program(result.program))
    stats = result.stats
    human.append(f"expanded={stats['expanded']} evaluated={stats['evaluated']}"
                 f" wall_time={stats['wall_time']:.3f}s"
                 f" peak_open={stats['peak_open_size']}\n")
    for row in result.per_instance:
        human.append(f"  {row['instance']}: plan_length={row['plan_length']}"
                     f" attempted={row['attempted']}\n")
    _emit_doc(report, args.json, "".join(human))
    if args.out and result.program is not None:
        Path(args.out).write_text(print_program(result.program))
    return {"solution": 0, "exhausted": 2, "resource_limit": 3}[result.status]


def cmd_run(args) -> int:
    dom = parse_domain(Path(args.domain).read_text())
    inst = parse_instance(Path(args.instance).read_text(), dom)
    prog, limits = _load_program(args.program, dom, args.pointers)
    ctx = ExecutionContext(dom, [inst], limits)
    res = ctx.run(prog, 0, fuel=args.fuel)
    trace = ctx.trace(res, 0)
    doc = {
        "instance": inst.name,
        "plan": trace.plan_lines(),
        "attempted": trace.attempted_count,
        "goal": trace.goal_ok,
        "halt": trace.halt_reason,
    }
    _emit_doc(doc, args.json, trace.text())
    return 0 if trace.goal_ok and trace.halt_reason == "end" else 1


def cmd_validate(args) -> int:
    dom = parse_domain(Path(args.domain).read_text())
    prog, limits = _load_program(args.program, dom, args.pointers)
    rows = []
    all_ok = True
    for f in args.instances:
        inst = parse_instance(Path(f).read_text(), dom)
        ctx = ExecutionContext(dom, [inst], limits)
        res = ctx.run(prog, 0, record=True, want_state=False)
        trace = ctx.trace(res, 0)
        ok = trace.halt_reason == "end" and trace.goal_ok
        if ok and args.replay:
            ok = validate_plan(trace.applied_actions, dom, inst)
        rows.append({"instance": inst.name, "solved": ok,
                     "plan_length": len(trace.applied_actions),
                     "attempted": trace.attempted_count})
        all_ok = all_ok and ok
    human = "".join(
        f"{r['instance']}: {'ok' if r['solved'] else 'FAIL'} "
        f"plan_length={r['plan_length']} attempted={r['attempted']}\n"
        for r in rows)
    _emit_doc({"instances": rows, "all_solved": all_ok}, args.json, human)
    return 0 if all_ok else 1


def cmd_emit(args) -> int:
    dom = parse_domain(Path(args.domain).read_text())
    inst = parse_instance(Path(args.instance).read_text(), dom)
    prog, limits = _load_program(args.program, dom, args.pointers)
    cert = certify_termination(
        prog, {z.name: z.type for z in limits.pointers(dom)})
    if not cert.valid:
        print("program has no valid termination certificate:",
              "; ".join(cert.violations), file=sys.stderr)
        return 1
    bundle = emit_bundle(prog, dom, inst, limits)
    out = Path(args.out)
    out.write_text(bundle.source_text)
    manifest_path = out.with_suffix(".manifest.json")
    manifest_path.write_text(json.dumps(bundle.manifest, indent=2,
                                        sort_keys=True))
    if args.json:
        print(json.dumps({"source": str(out), "manifest": str(manifest_path)},
                         indent=2))
    else:
        print(f"wrote {out} and {manifest_path}")
    return 0


def cmd_complexity(args) -> int:
    dom = parse_domain(Path(args.domain).read_text())
    prog, limits = _load_program(args.program, dom, args.pointers)
    ptr_types = {z.name: z.type for z in limits.pointers(dom)}
    cert = certify_termination(prog, ptr_types)
    doc = {
        "terminates": cert.valid,
        "violations": cert.violations,
    }
    human = []
    if cert.valid:
        report = asymptotic_complexity(prog, ptr_types)
        doc.update({"degree": report.degree,
                    "factors": list(report.factors),
                    "expression": report.expression})
        human.append(f"{report.expression}\n")
        if args.instance:
            inst = parse_instance(Path(args.instance).read_text(), dom)
            bound = report.numeric_bound(inst)
            doc["numeric_bound"] = bound
            human.append(f"numeric bound on {inst.name}: {bound}\n")
    else:
        human.append("no termination certificate: "
                     + "; ".join(cert.violations) + "\n")
    _emit_doc(doc, args.json, "".join(human))
    return 0 if cert.valid else 1


def _parse_size(text: str):
    if "x" in text:
        return tuple(int(p) for p in text.split("x"))
    if "," in text:
        return tuple(int(p) for p in text.split(","))
    return int(text)


def cmd_gen(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    dom = generators.load_domain(args.domain_id)
    (outdir / f"{args.domain_id}-domain.pddl").write_text(
        generators.domain_text(args.domain_id))
    written = []
    if args.train:
        instances = generators.training_instances(args.domain_id, args.seed)
    elif args.heldout:
        instances = generators.heldout_instances(args.domain_id, args.seed)
    else:
        if args.size is None:
            print("--size is required without --train/--heldout",
                  file=sys.stderr)
            return 1
        instances = [generators.generate_instance(
            generators.GeneratorSpec(args.domain_id, _parse_size(args.size),
                                     args.seed + k))
            for k in range(args.count)]
    for inst in instances:
        path = outdir / f"{inst.name}.pddl"
        path.write_text(print_instance(inst, dom))
        written.append(str(path))
    if args.json:
        print(json.dumps({"domain": str(outdir / f'{args.domain_id}-domain.pddl'),
                          "instances": written}, indent=2))
    else:
        print(f"wrote {len(written)} instance(s) to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gpsynth",
        description="synthesize, run, validate and compile pointer programs "
                    "for planning domains")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true",
                       help="structured output")

    p = sub.add_parser("synth", help="search for a generalized plan")
    p.add_argument("domain")
    p.add_argument("instances", nargs="+")
    p.add_argument("--lines", type=int, required=True)
    p.add_argument("--pointers", required=True,
                   help="count or type=count,...")
    p.add_argument("--tie", choices=["max-loops", "min-loops"],
                   default="max-loops")
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.add_argument("--node-limit", type=int, default=10_000_000)
    p.add_argument("--out", help="write the solution program here")
    common(p)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("run", help="execute a program on one instance")
    p.add_argument("program")
    p.add_argument("domain")
    p.add_argument("instance")
    p.add_argument("--fuel", type=int, default=None)
    p.add_argument("--pointers", default=None)
    common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("validate", help="check a program on many instances")
    p.add_argument("program")
    p.add_argument("domain")
    p.add_argument("instances", nargs="+")
    p.add_argument("--pointers", default=None)
    p.add_argument("--replay", action="store_true",
                   help="re-check the induced plan action by action")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("emit", help="emit a compilable validator")
    p.add_argument("program")
    p.add_argument("domain")
    p.add_argument("instance")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--pointers", default=None)
    common(p)
    p.set_defaults(fn=cmd_emit)

    p = sub.add_parser("complexity", help="termination + asymptotic report")
    p.add_argument("program")
    p.add_argument("domain")
    p.add_argument("--instance", default=None,
                   help="also report the numeric bound on this instance")
    p.add_argument("--pointers", default=None)
    common(p)
    p.set_defaults(fn=cmd_complexity)

    p = sub.add_parser("gen", help="generate benchmark instances")
    p.add_argument("domain_id", choices=generators.domain_ids())
    p.add_argument("--size", default=None,
                   help="size parameter; ROWSxCOLS or L,S,N for tuples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--train", action="store_true",
                   help="write the training set")
    p.add_argument("--heldout", action="store_true",
                   help="write the held-out set")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SemanticError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64


if __name__ == "__main__":
    sys.exit(main())
