"""Command-line frontend.

Commands
    parse            list subprograms and their rules
    instantiate      print the union program or the modular program dump
    solve            print answer sets, one per line, atoms sorted
    check-coherence  report coherence; exit 0 iff coherent
    compare          compare modular and union answer sets; exit 0 iff equal
    check-model      membership of a given atom set under the chosen semantics

Exit codes: 0 success/true, 1 false/violation, 2 usage or parse error,
3 capacity exceeded.  Diagnostics go to standard error; results to standard
output, byte-identical across runs on identical inputs.
"""

import argparse
import json
import sys
from typing import Optional

from .engine import (
    Interpretation,
    enumerate_kappa_stable,
    is_kappa_stable,
)
from .errors import CapacityError, ModaspError, RequirementError
from .grounding import Domain
from .instantiation import collective_modular, collective_union
from .intensionality import IntensionalityStatement, pattern_str
from .modular import (
    closure_holds,
    is_coherent,
    is_model_of_module,
    modular_answer_sets,
    theorem1_check,
)
from .parsing import parse_control, parse_ground_atom, parse_program
from .program import Program, atom_order_key
from .subprograms import ClingoProgram, ControlPlan

UNION_ENGINES = ("brute", "reduct", "fixpoint")
MODULAR_ENGINES = ("brute", "reduct", "topo")


class _UsageError(ModaspError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="modasp",
        description="Answer sets for clingo-style programs with collective control.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, control_required=True, solverish=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("program", help="program file (.lp)")
        p.add_argument("--control", help="control file (.ctl)")
        p.add_argument(
            "-c",
            "--const",
            action="append",
            default=[],
            metavar="NAME=INT",
            help="override a constant of the control file (repeatable)",
        )
        p.add_argument(
            "--output", choices=("text", "machine"), default="text",
            help="output format (default text)",
        )
        if solverish:
            p.add_argument(
                "--mode", choices=("union", "modular"), default="union",
                help="semantics to use (default union)",
            )
            p.add_argument(
                "--engine",
                choices=("brute", "reduct", "fixpoint", "topo"),
                default="reduct",
                help="model engine (default reduct)",
            )
            p.add_argument(
                "--cap", type=int, default=24,
                help="relevant atom base cap for enumeration (default 24)",
            )
        return p

    add("parse", "list subprograms and their rules", control_required=False)
    add("instantiate", "print the instantiated program", solverish=True)
    add("solve", "compute and print answer sets", solverish=True)
    add("check-coherence", "check the modular program for coherence")
    compare = add("compare", "compare modular and union answer sets", solverish=True)
    check_model = add("check-model", "check a candidate model", solverish=True)
    check_model.add_argument(
        "--model", required=True, metavar="ATOMS",
        help='candidate atoms, space-separated, e.g. "q(0,0) q(1,1)"',
    )
    return parser


def _parse_overrides(pairs) -> dict[str, int]:
    out = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise _UsageError(f"expected NAME=INT, got {pair!r}")
        try:
            out[name] = int(value)
        except ValueError:
            raise _UsageError(f"constant {name!r} needs an integer, got {value!r}")
    return out


def _load_program(path: str) -> ClingoProgram:
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_program(handle.read())
    except OSError as err:
        raise _UsageError(f"cannot read {path}: {err.strerror}")


def _load_control(args, prog: ClingoProgram) -> ControlPlan:
    if not args.control:
        raise _UsageError(f"command {args.command!r} needs --control")
    try:
        with open(args.control, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise _UsageError(f"cannot read {args.control}: {err.strerror}")
    return parse_control(text, prog, _parse_overrides(args.const))


def _domain_of(plan: ControlPlan, union: Program) -> Domain:
    if plan.domain is None:
        raise _UsageError(
            "the control file must declare a domain, e.g. `domain 0..10.`"
        )
    lo, hi = plan.domain
    return Domain.build([union], lo, hi)


def _global_kappa(plan: ControlPlan, union: Program) -> IntensionalityStatement:
    patterns = plan.global_kappa_dict()
    if patterns is not None:
        return IntensionalityStatement.of(patterns)
    return IntensionalityStatement.purely_intensional(union.signature().predicates)


def _kappa_json(kappa: IntensionalityStatement) -> dict:
    out = {}
    for (name, arity), patterns in kappa.entries:
        out[f"{name}/{arity}"] = [f"{name}{pattern_str(p)}" for p in patterns]
    return out


def _models_json(models) -> list[list[str]]:
    return [[str(a) for a in I.sorted_atoms()] for I in models]


def _sorted_models(models) -> list[Interpretation]:
    return sorted(
        models, key=lambda I: [atom_order_key(a) for a in I.sorted_atoms()]
    )


def _emit(args, text_lines, machine_doc) -> None:
    if args.output == "machine":
        print(json.dumps(machine_doc, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _cmd_parse(args) -> int:
    prog = _load_program(args.program)
    decls = prog.declarations()
    names = ["base"] + [n for n in decls if n != "base"]
    lines = []
    doc = {"command": "parse", "subprograms": []}
    for name in names:
        params = decls[name]
        heading = f"#program {name}." if not params else (
            f"#program {name}({','.join(params)})."
        )
        rules = prog.subprogram(name).rules
        lines.append(heading)
        lines += [str(r) for r in rules]
        doc["subprograms"].append(
            {"name": name, "params": list(params), "rules": [str(r) for r in rules]}
        )
    _emit(args, lines, doc)
    return 0


def _cmd_instantiate(args) -> int:
    prog = _load_program(args.program)
    plan = _load_control(args, prog)
    if args.mode == "union":
        union = collective_union(prog, plan.specs)
        _emit(
            args,
            [str(r) for r in union.rules],
            {
                "command": "instantiate",
                "mode": "union",
                "rules": [str(r) for r in union.rules],
            },
        )
        return 0
    modular = collective_modular(prog, plan)
    lines = [f"kappa: {modular.kappa}"]
    doc_modules = []
    for index, module in enumerate(modular.modules):
        lines.append(f"module {index}:")
        lines.append(f"  kappa: {module.kappa}")
        lines += [f"  {r}" for r in module.pi.rules]
        doc_modules.append(
            {
                "index": index,
                "kappa": _kappa_json(module.kappa),
                "rules": [str(r) for r in module.pi.rules],
            }
        )
    _emit(
        args,
        lines,
        {
            "command": "instantiate",
            "mode": "modular",
            "kappa": _kappa_json(modular.kappa),
            "modules": doc_modules,
        },
    )
    return 0


def _solve_models(args, prog, plan):
    union = collective_union(prog, plan.specs)
    dom = _domain_of(plan, union)
    if args.mode == "union":
        if args.engine not in UNION_ENGINES:
            raise _UsageError(
                f"engine {args.engine!r} is not available in union mode; "
                f"choose one of {', '.join(UNION_ENGINES)}"
            )
        kappa = _global_kappa(plan, union)
        return enumerate_kappa_stable(kappa, union, dom, args.engine, args.cap)
    if args.engine not in MODULAR_ENGINES:
        raise _UsageError(
            f"engine {args.engine!r} is not available in modular mode; "
            f"choose one of {', '.join(MODULAR_ENGINES)}"
        )
    modular = collective_modular(prog, plan)
    return modular_answer_sets(modular, dom, args.engine, args.cap)


def _cmd_solve(args) -> int:
    prog = _load_program(args.program)
    plan = _load_control(args, prog)
    models = _sorted_models(_solve_models(args, prog, plan))
    _emit(
        args,
        [str(I) for I in models],
        {
            "command": "solve",
            "mode": args.mode,
            "engine": args.engine,
            "answer_sets": _models_json(models),
            "count": len(models),
        },
    )
    return 0 if models else 1


def _cmd_check_coherence(args) -> int:
    prog = _load_program(args.program)
    plan = _load_control(args, prog)
    modular = collective_modular(prog, plan)
    report = is_coherent(modular)
    _emit(
        args,
        [str(report)],
        {
            "command": "check-coherence",
            "coherent": report.coherent,
            "violations": [
                {"kind": v.kind, "detail": v.detail} for v in report.violations
            ],
        },
    )
    return 0 if report.coherent else 1


def _cmd_compare(args) -> int:
    prog = _load_program(args.program)
    plan = _load_control(args, prog)
    union = collective_union(prog, plan.specs)
    dom = _domain_of(plan, union)
    modular = collective_modular(prog, plan)
    if args.engine not in MODULAR_ENGINES:
        raise _UsageError(
            f"engine {args.engine!r} is not available for compare; "
            f"choose one of {', '.join(MODULAR_ENGINES)}"
        )
    report = theorem1_check(modular, dom, args.engine, args.cap)
    _emit(
        args,
        [str(report)],
        {
            "command": "compare",
            "equal": report.equal,
            "modular": _models_json(report.modular_sets),
            "union": _models_json(report.union_sets),
            "only_modular": _models_json(report.only_modular),
            "only_union": _models_json(report.only_union),
        },
    )
    return 0 if report.equal else 1


def _cmd_check_model(args) -> int:
    prog = _load_program(args.program)
    plan = _load_control(args, prog)
    union = collective_union(prog, plan.specs)
    dom = _domain_of(plan, union)
    atoms = [parse_ground_atom(part) for part in args.model.split()]
    candidate = Interpretation.of(atoms)
    if args.mode == "union":
        if args.engine not in ("brute", "reduct"):
            raise _UsageError(
                "check-model supports engines brute and reduct"
            )
        kappa = _global_kappa(plan, union)
        verdict = is_kappa_stable(candidate, kappa, union, dom, args.engine)
        text = "kappa-stable model" if verdict else "not a kappa-stable model"
    else:
        if args.engine not in ("brute", "reduct"):
            raise _UsageError(
                "check-model supports engines brute and reduct"
            )
        modular = collective_modular(prog, plan)
        verdict = all(
            is_model_of_module(candidate, m, dom, args.engine)
            for m in modular.modules
        ) and closure_holds(candidate, modular.kappa, [m.kappa for m in modular.modules])
        text = "answer set" if verdict else "not an answer set"
    _emit(
        args,
        [text],
        {
            "command": "check-model",
            "mode": args.mode,
            "is_model": verdict,
            "model": [str(a) for a in candidate.sorted_atoms()],
        },
    )
    return 0 if verdict else 1


_COMMANDS = {
    "parse": _cmd_parse,
    "instantiate": _cmd_instantiate,
    "solve": _cmd_solve,
    "check-coherence": _cmd_check_coherence,
    "compare": _cmd_compare,
    "check-model": _cmd_check_model,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except CapacityError as err:
        print(f"capacity error: {err}", file=sys.stderr)
        return 3
    except RequirementError as err:
        print(f"modular construction error: {err}", file=sys.stderr)
        return 1
    except ModaspError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
