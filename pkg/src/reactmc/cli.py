"""Command line: ``reactmc check|explore|validate|oracle``.

Exit status 0 means the judgement holds (or validation passed), 1 that it
fails, 2 a usage or model error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ccs, petri
from .checker import Verdict, check
from .criteria import BlockSet, CompletenessCriterion, TaskSet, load_tasks, tasks_by_label
from .errors import ReactmcError
from .logic import parse_formula, read_formula_file
from .lts import Ltsc, LtsPath, dump_ltsc, load_ltsc, to_dot, validate_ltsc
from .oracle import oracle_check

DEFAULT_MAX_STATES = 100_000


class UsageError(Exception):
    pass


def model_type(path: str, given: str | None) -> str:
    if given:
        return given
    name = Path(path).name
    if name.endswith(".ccs"):
        return "ccs"
    if name.endswith(".net.json"):
        return "net"
    if name.endswith(".json"):
        return "lts"
    raise UsageError(f"cannot infer the model type of {path}; pass --type")


def load_model(path: str, kind: str | None = None, process: str | None = None,
               max_states: int = DEFAULT_MAX_STATES) -> Ltsc:
    kind = model_type(path, kind)
    if kind == "ccs":
        spec = ccs.load_ccs(path)
        return ccs.explore_ccs(spec.process(process), spec.definitions, max_states)
    if kind == "net":
        return petri.explore_net(petri.load_net(path), max_states)
    if kind == "lts":
        return load_ltsc(path)
    raise UsageError(f"unknown model type {kind!r}")


def build_criterion(ltsc: Ltsc, name: str, tasks_file=None, by_label=False, default_task=False):
    if name in ("wf", "sf"):
        if tasks_file:
            tasks = load_tasks(ltsc, tasks_file)
            if default_task:
                tasks = tasks.with_task("*all*", range(len(ltsc.transitions)))
        elif by_label or default_task:
            if by_label:
                tasks = tasks_by_label(ltsc, default_task)
            else:
                tasks = TaskSet().with_task("*all*", range(len(ltsc.transitions)))
        else:
            raise UsageError(f"--cc {name} needs --tasks FILE or --tasks-by-label")
        return CompletenessCriterion(name, tasks)
    return CompletenessCriterion(name)


def _steps_json(ltsc: Ltsc, start: int, steps) -> list[dict]:
    out = []
    for t in steps:
        tr = ltsc.transitions[t]
        out.append({"state": ltsc.states[tr.source], "action": tr.label, "transition": t})
    return out


def witness_json(ltsc: Ltsc, w) -> dict | None:
    if w is None:
        return None
    if isinstance(w, LtsPath):
        return {"kind": "finite", "prefix": _steps_json(ltsc, w.start, w.steps), "cycle": [],
                "end_state": ltsc.states[w.end(ltsc)]}
    return {"kind": "lasso", "prefix": _steps_json(ltsc, w.prefix.start, w.prefix.steps),
            "cycle": _steps_json(ltsc, w.prefix.end(ltsc), w.cycle)}


def witness_text(ltsc: Ltsc, w) -> str:
    def walk(start, steps):
        parts = [ltsc.states[start]]
        for t in steps:
            tr = ltsc.transitions[t]
            parts.append(f"--{tr.label}-->")
            parts.append(ltsc.states[tr.target])
        return " ".join(parts)

    if isinstance(w, LtsPath):
        return f"finite path, stops at {ltsc.states[w.end(ltsc)]}:\n    {walk(w.start, w.steps)}"
    lines = ["lasso:", f"    prefix: {walk(w.prefix.start, w.prefix.steps)}",
             f"    cycle:  {walk(w.prefix.end(ltsc), w.cycle)}"]
    return "\n".join(lines)


def _formulas(args) -> list[tuple[str, object]]:
    if args.formula and args.formula_file:
        raise UsageError("give either --formula or --formula-file")
    if args.formula:
        return [("formula", parse_formula(args.formula, args.logic))]
    if args.formula_file:
        return read_formula_file(args.formula_file, args.logic)
    raise UsageError("a formula is required (--formula or --formula-file)")


def _load(args) -> Ltsc:
    return load_model(args.model, args.type, getattr(args, "process", None), args.max_states)


def cmd_check(args, out) -> int:
    ltsc = _load(args)
    b = BlockSet.parse(args.block)
    cc = build_criterion(ltsc, args.cc, args.tasks, args.tasks_by_label, args.default_task)
    results = []
    status = 0
    for name, phi in _formulas(args):
        verdict: Verdict = check(ltsc, phi, cc, b, args.logic)
        if not verdict.holds:
            status = 1
        results.append((name, phi, verdict))
    if args.json:
        docs = [{
            "name": name, "formula": str(phi),
            "verdict": "holds" if v.holds else "fails",
            "criterion": args.cc, "block": sorted(b),
            "counterexample": witness_json(ltsc, v.counterexample),
            "stats": v.stats,
        } for name, phi, v in results]
        json.dump(docs[0] if len(docs) == 1 else docs, out, indent=1, sort_keys=True)
        out.write("\n")
    else:
        for name, phi, v in results:
            print(f"{name}: {'holds' if v.holds else 'FAILS'}  [{args.cc}, B={{{','.join(sorted(b))}}}]  {phi}",
                  file=out)
            if v.counterexample is not None:
                print("  counterexample " + witness_text(ltsc, v.counterexample), file=out)
    return status


def cmd_explore(args, out) -> int:
    ltsc = _load(args)
    if args.out:
        dump_ltsc(ltsc, args.out)
    if args.dot:
        Path(args.dot).write_text(to_dot(ltsc))
    print(f"{ltsc.num_states} states, {len(ltsc.transitions)} transitions, "
          f"{len(ltsc.concurrency)} concurrent pairs", file=out)
    if not args.out and not args.dot:
        for t in ltsc.transitions:
            print(f"  {t.id}: {ltsc.states[t.source]} --{t.label}--> {ltsc.states[t.target]}", file=out)
    return 0


def cmd_validate(args, out) -> int:
    kind = model_type(args.model, args.type)
    if kind == "net":
        net = petri.load_net(args.model)
        violations = petri.validate_structural_conflict(net, args.max_states)
        for v in violations:
            print(f"structural conflict: step {{{v.t}, {v.u}}} enabled at {v.marking!r}", file=out)
        if violations:
            return 1
    ltsc = _load(args)
    problems = validate_ltsc(ltsc, args.depth)
    for p in problems:
        print(f"{p.kind} violation: transition {p.transition} along {list(p.path)}", file=out)
    if not problems:
        print(f"ok: {ltsc.num_states} states, no violations up to depth {args.depth}", file=out)
    return 1 if problems else 0


def cmd_oracle(args, out) -> int:
    ltsc = _load(args)
    b = BlockSet.parse(args.block)
    cc = build_criterion(ltsc, args.cc, args.tasks, args.tasks_by_label, args.default_task)
    try:
        p, c = (int(x) for x in args.bounds.split(","))
    except ValueError:
        raise UsageError("--bounds expects two integers, e.g. 4,4") from None
    status = 0
    for name, phi in _formulas(args):
        res = oracle_check(ltsc, phi, cc, b, p, c)
        if res.holds:
            print(f"{name}: no violation within bounds ({p},{c})  {phi}", file=out)
        else:
            status = 1
            print(f"{name}: FAILS  {phi}", file=out)
            print("  counterexample " + witness_text(ltsc, res.witness), file=out)
    return status


def _add_model_args(p):
    p.add_argument("--model", required=True, help="model file (.ccs, .net.json, .lts.json)")
    p.add_argument("--type", choices=["ccs", "net", "lts"], help="model type (default: from extension)")
    p.add_argument("--process", help="CCS identifier to check instead of main")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)


def _add_judgement_args(p):
    p.add_argument("--formula")
    p.add_argument("--formula-file")
    p.add_argument("--logic", choices=["ltl", "ctl"], default="ltl")
    p.add_argument("--cc", choices=["top", "progress", "justness", "wf", "sf"], default="progress")
    p.add_argument("--block", default="", help="comma separated blockable actions")
    p.add_argument("--tasks", help="task file (JSON)")
    p.add_argument("--tasks-by-label", action="store_true", help="one task per visible label")
    p.add_argument("--default-task", action="store_true", help="add a task holding every transition")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reactmc", description="reactive LTL/CTL model checker")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", help="decide a judgement")
    _add_model_args(p)
    _add_judgement_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("explore", help="explore a model into an explicit LTS")
    _add_model_args(p)
    p.add_argument("--out", help="write explicit-LTS JSON here")
    p.add_argument("--dot", help="write Graphviz here")
    p.set_defaults(func=cmd_explore)
    p = sub.add_parser("validate", help="check structural conflict and the concurrency axioms")
    _add_model_args(p)
    p.add_argument("--depth", type=int, default=3)
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("oracle", help="bounded brute-force check")
    _add_model_args(p)
    _add_judgement_args(p)
    p.add_argument("--bounds", default="4,4", help="prefix,cycle length bounds")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (ReactmcError, UsageError, ValueError, OSError) as exc:
        print(f"reactmc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
