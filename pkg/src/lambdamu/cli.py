"""Command-line front end.

Exit status: 0 success or a definite yes, 1 a definite no (untypable,
not a member, suite violations), 2 parse error, 3 fuel exhausted or
unknown, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from lambdamu.concrete import ParseError, parse_term, parse_type, print_type
from lambdamu.harness import default_config, run_suite, suite_names
from lambdamu.realizability import (
    CompletenessModel,
    build_example_model,
    example_sampler,
    interp_type,
    membership,
)
from lambdamu.reduction import STRATEGIES, FuelExhausted, NormalForm, normalize, path_str
from lambdamu.syntax import complexity, free_vars
from lambdamu.tristate import Answer
from lambdamu.typecheck import UnboundVariable, check, infer, principal_typing

EXIT_OK, EXIT_NO, EXIT_PARSE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3, 4

_ANSWER_EXIT = {Answer.YES: EXIT_OK, Answer.NO: EXIT_NO, Answer.UNKNOWN: EXIT_UNKNOWN}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _source(arg: str) -> str:
    return sys.stdin.read() if arg == "-" else arg


def _context(spec: Optional[str]) -> dict:
    """``"x: A, y: B -> C"`` to a dict of parsed types."""
    out = {}
    if not spec:
        return out
    for item in spec.split(","):
        if not item.strip():
            continue
        name, sep, ty = item.partition(":")
        if not sep:
            raise UsageError(f"context entry {item.strip()!r} is not of the form name: type")
        out[name.strip()] = parse_type(ty)
    return out


def _emit(args, text: str, data) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


def cmd_parse(args) -> int:
    if args.as_type:
        a = parse_type(_source(args.src))
        _emit(args, print_type(a), {"type": print_type(a)})
        return EXIT_OK
    t = parse_term(_source(args.src))
    lv, mv = free_vars(t)
    _emit(args, str(t), {
        "term": str(t),
        "complexity": complexity(t),
        "free_lambda": sorted(lv),
        "free_mu": sorted(mv),
    })
    return EXIT_OK


def cmd_infer(args) -> int:
    t = parse_term(_source(args.src))
    gamma, delta = _context(args.gamma), _context(args.delta)
    if gamma or delta:
        r = infer(gamma, delta, t)
    else:
        pt = principal_typing(t)
        r = None if pt is None else infer(pt[0], pt[1], t)
    if r is None:
        _emit(args, "untypable", {"typable": False})
        return EXIT_NO
    ty, d = r
    text = print_type(ty)
    if args.derivation:
        text += "\n" + d.pretty()
    _emit(args, text, {"typable": True, "type": print_type(ty), "derivation": d.to_json()})
    return EXIT_OK


def cmd_check(args) -> int:
    t = parse_term(_source(args.src))
    goal = parse_type(args.type)
    gamma, delta = _context(args.gamma), _context(args.delta)
    ok = check(gamma, delta, t, goal)
    _emit(args, "yes" if ok else "no", {"result": ok})
    return EXIT_OK if ok else EXIT_NO


def _outcome(r) -> str:
    if isinstance(r, NormalForm):
        return "normal_form"
    if isinstance(r, FuelExhausted):
        return "fuel_exhausted"
    return "head_normal_form"


def cmd_reduce(args) -> int:
    t = parse_term(_source(args.src))
    r = normalize(t, args.strategy, args.fuel)
    if args.trace:
        text = r.trace.to_text()
    else:
        lines = [f"{s.position.rule} @{path_str(s.position.path)}: {s.term}" for s in r.trace.steps]
        text = "\n".join(lines) if lines else str(r.term)
    if isinstance(r, FuelExhausted):
        text += "\n# fuel exhausted"
    _emit(args, text, {"outcome": _outcome(r), "final": str(r.term), "trace": r.trace.to_json()})
    return EXIT_UNKNOWN if isinstance(r, FuelExhausted) else EXIT_OK


def cmd_normalize(args) -> int:
    t = parse_term(_source(args.src))
    r = normalize(t, args.strategy, args.fuel)
    text = str(r.term) if not isinstance(r, FuelExhausted) else f"{r.term}\n# fuel exhausted"
    _emit(args, text, {"outcome": _outcome(r), "final": str(r.term), "steps": len(r.trace)})
    return EXIT_UNKNOWN if isinstance(r, FuelExhausted) else EXIT_OK


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_member(args) -> int:
    t = parse_term(_source(args.src))
    goal = parse_type(args.type)
    conf = _load_config(args.config)
    witness = None
    if args.model == "completeness":
        cm = CompletenessModel.from_json(conf) if conf else CompletenessModel()
        res = cm.star(t, goal, args.fuel)
        answer, witness = res.answer, res.witness
    else:
        x = conf.get("x", "x")
        ys = tuple(conf.get("ys", ("y1", "y2")))
        m, interp = build_example_model(x, ys)
        answer = membership(m, interp_type(interp, goal), t, args.fuel, example_sampler(x, ys))
    data = {"model": args.model, "answer": answer.value}
    if witness is not None:
        data["witness"] = str(witness)
    text = answer.value + (f"\nwitness: {witness}" if witness is not None else "")
    _emit(args, text, data)
    return _ANSWER_EXIT[answer]


def cmd_suite(args) -> int:
    if args.name not in suite_names():
        raise UsageError(f"unknown suite {args.name!r}; choose from {', '.join(suite_names())}")
    over = {}
    if args.size is not None:
        over["max_term_size"] = args.size
    if args.fuel is not None:
        over["fuel"] = args.fuel
    over["seed"] = args.seed
    if args.samples is not None:
        over["samples"] = args.samples
    try:
        cfg = default_config(args.name, **over)
    except ValueError as e:
        raise UsageError(str(e)) from None
    report = run_suite(args.name, cfg)
    if args.json:
        print(report.dumps(timing=args.timing))
    else:
        print(report.table())
    return EXIT_OK if report.passed else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    fuel = _env_int("LAMBDAMU_FUEL", 1000)
    seed = _env_int("LAMBDAMU_SEED", 0)
    p = _Parser(prog="lambdamu", description="Simply typed lambda-mu calculus toolkit.")
    p.add_argument("--json", action="store_true", help="structured output")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def with_src(sp):
        sp.add_argument("src", help="term source text, or - for stdin")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    sp = with_src(sub.add_parser("parse", help="parse and pretty-print"))
    sp.add_argument("--as-type", action="store_true", help="parse a type instead of a term")
    sp.set_defaults(func=cmd_parse)

    for name, func, hint in (("infer", cmd_infer, "principal type"), ("check", cmd_check, "check against a type")):
        sp = with_src(sub.add_parser(name, help=hint))
        sp.add_argument("--gamma", help="lambda context, e.g. \"x: A, y: bot\"")
        sp.add_argument("--delta", help="mu context, e.g. \"'a: A\"")
        if name == "check":
            sp.add_argument("--type", required=True)
        else:
            sp.add_argument("--derivation", action="store_true", help="also print the derivation")
        sp.set_defaults(func=func)

    for name, func in (("reduce", cmd_reduce), ("normalize", cmd_normalize)):
        sp = with_src(sub.add_parser(name))
        sp.add_argument("--strategy", choices=[s for s in STRATEGIES if s != "positional"], default="leftmost")
        sp.add_argument("--fuel", type=int, default=fuel)
        if name == "reduce":
            sp.add_argument("--trace", action="store_true", help="full trace format with header and start line")
        sp.set_defaults(func=func)

    sp = with_src(sub.add_parser("member", help="membership in the interpretation of a type"))
    sp.add_argument("--model", choices=("completeness", "example"), default="completeness")
    sp.add_argument("--type", required=True)
    sp.add_argument("--fuel", type=int, default=min(fuel, 200))
    sp.add_argument("--config", help="model config JSON")
    sp.set_defaults(func=cmd_member)

    sp = sub.add_parser("suite", help="run a property suite")
    sp.add_argument("name")
    sp.add_argument("--size", type=int)
    sp.add_argument("--fuel", type=int)
    sp.add_argument("--seed", type=int, default=seed)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--timing", action="store_true", help="include wall time in JSON output")
    sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a command is required")
        if getattr(args, "fuel", None) is not None and args.fuel < 1:
            raise UsageError("--fuel must be positive")
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except UnboundVariable as e:
        print(f"usage error: unbound variable {e.args[0]} (declare it with --gamma/--delta)", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
