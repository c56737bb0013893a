"""Command-line interface.

Exit codes: 0 success, 1 diagnostics (invalid input or a failed check),
2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import DawnetError, ValidationErrors
from .io import parse_model, parse_trace, write_model
from .model import ValueMode, expand_intervals
from .net import SafenessStatus, check_k_safe, validate_wfnet
from .search import Dedupe, SearchConfig, enumerate_repairs
from .trace import inject, normalize


def _model_stem(path: str) -> str:
    name = Path(path).name
    for suffix in (".json", ".model"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return name or "model"


def cmd_validate(args) -> int:
    w = parse_model(args.model)
    report = validate_wfnet(w.net, w.meta)
    print(report)
    if not report.ok:
        return 1
    verdict = check_k_safe(w.net, w.meta, 1, args.max_states)
    print(verdict)
    return 1 if verdict.status is SafenessStatus.UNSAFE else 0


def cmd_inject(args) -> int:
    w = parse_model(args.model)
    trace = parse_trace(args.trace, args.trace_format)
    wt = inject(normalize(w), trace)
    write_model(wt, args.output)
    print(f"wrote {args.output}: {len(wt.net.places)} places, {len(wt.net.transitions)} transitions")
    return 0


def _firing_json(rec) -> dict:
    out: dict = {"t": rec.transition}
    if rec.written:
        out["w"] = dict(rec.written.items_sorted())
    if rec.deleted:
        out["d"] = sorted(rec.deleted)
    return out


def cmd_repair(args) -> int:
    w = parse_model(args.model)
    trace = parse_trace(args.trace, args.trace_format)
    cfg = SearchConfig(
        value_mode=ValueMode(args.mode),
        max_depth=args.max_depth,
        max_states=args.max_states,
        max_solutions=args.max_solutions,
        dedupe=Dedupe(args.dedupe),
    )
    result = enumerate_repairs(w, trace, cfg)
    if args.json:
        doc = {
            "repairs": [
                {
                    "control_flow": list(r.control_flow),
                    "firings": [_firing_json(rec) for rec in r.case.records],
                    "alignment": list(r.trace_alignment.gamma),
                }
                for r in result
            ],
            "truncated": result.truncated,
        }
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        if not result.repairs:
            print("no repair within the search bounds" if result.truncated else "no repair exists")
        for i, r in enumerate(result, start=1):
            print(f"repair {i}: " + " ".join(str(rec) for rec in r.case.records))
            marks = ", ".join(f"e{k + 1}->{j + 1}" for k, j in enumerate(r.trace_alignment.gamma))
            if marks:
                print(f"  alignment: {marks}")
        if result.truncated:
            print("(search bounds reached; the list may be incomplete)")
    return 0


def cmd_encode(args) -> int:
    from .planning.encoder import encode
    from .planning.syntax import serialize_domain, serialize_problem

    w = parse_model(args.model)
    pd = encode(expand_intervals(w, ValueMode(args.mode)))
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    stem = _model_stem(args.model)
    (out / f"{stem}.dom.k").write_text(serialize_domain(pd, stem), encoding="utf-8")
    (out / f"{stem}.prob.k").write_text(serialize_problem(pd), encoding="utf-8")
    print(f"wrote {out / (stem + '.dom.k')} and {out / (stem + '.prob.k')}")
    return 0


def cmd_interp(args) -> int:
    from .planning.encoder import encode
    from .planning.interp import goal_holds, ground, trajectories
    from .planning.syntax import demangle

    w = expand_intervals(parse_model(args.model), ValueMode(args.mode))
    gp = ground(encode(w))
    total = plans = 0
    for _, steps in trajectories(gp, args.depth):
        total += 1
        final_goal = bool(steps) and goal_holds(gp, steps[-1][1])
        if final_goal:
            plans += 1
        if final_goal or args.all:
            parts = [demangle(a) for a, _ in steps]
            tag = "plan" if final_goal else "trajectory"
            print(f"{tag}: " + " ".join(parts))
    print(f"{total} trajectories up to depth {args.depth}, {plans} reach the goal")
    return 0


def cmd_check_equiv(args) -> int:
    from .planning.interp import check_equivalence

    w = parse_model(args.model)
    if args.mode == ValueMode.REGIONS.value:
        w = expand_intervals(w, ValueMode.REGIONS)
    report = check_equivalence(w, args.depth)
    print(report)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dawnet", description="Repair partial traces of data-aware workflow nets.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the workflow-net conditions and 1-safeness")
    v.add_argument("model")
    v.add_argument("--max-states", type=int, default=10**6)
    v.set_defaults(func=cmd_validate)

    def trace_args(sp):
        sp.add_argument("model")
        sp.add_argument("trace")
        sp.add_argument("--trace-format", choices=["auto", "json", "xes"], default="auto")

    i = sub.add_parser("inject", help="write the trace workflow as a model file")
    trace_args(i)
    i.add_argument("-o", "--output", required=True)
    i.set_defaults(func=cmd_inject)

    r = sub.add_parser("repair", help="enumerate repairs of a partial trace")
    trace_args(r)
    r.add_argument("--dedupe", choices=["none", "cf"], default="none")
    r.add_argument("--mode", choices=[m.value for m in ValueMode], default=ValueMode.REGIONS.value)
    r.add_argument("--max-depth", type=int, default=64)
    r.add_argument("--max-states", type=int, default=10**6)
    r.add_argument("--max-solutions", type=int, default=1000)
    fmt = r.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--text", action="store_true")
    r.set_defaults(func=cmd_repair)

    e = sub.add_parser("encode", help="emit the K planning domain and problem")
    e.add_argument("model")
    e.add_argument("-o", "--output", required=True)
    e.add_argument("--mode", choices=[m.value for m in ValueMode], default=ValueMode.REGIONS.value)
    e.set_defaults(func=cmd_encode)

    it = sub.add_parser("interp", help="enumerate trajectories of the encoded domain")
    it.add_argument("model")
    it.add_argument("--depth", type=int, required=True)
    it.add_argument("--mode", choices=[m.value for m in ValueMode], default=ValueMode.REGIONS.value)
    it.add_argument("--all", action="store_true", help="print every trajectory, not only plans")
    it.set_defaults(func=cmd_interp)

    c = sub.add_parser("check-equiv", help="compare net cases with planning trajectories")
    c.add_argument("model")
    c.add_argument("--depth", type=int, required=True)
    c.add_argument("--mode", choices=[m.value for m in ValueMode], default=ValueMode.ENUMERATE.value)
    c.set_defaults(func=cmd_check_equiv)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationErrors as exc:
        for loc, msg in exc.diagnostics:
            print(f"error: {loc}: {msg}", file=sys.stderr)
        return 1
    except DawnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
