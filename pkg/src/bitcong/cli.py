"""Command-line driver.

Exit status: 0 on success, 1 on usage or parse errors, 2 when the SAT
conflict budget runs out.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from .blast import blast_program, relation_dimacs
from .cnf import DimacsError, parse_dimacs
from .fixpoint import analyze, state_names
from .inference import infer, infer_io
from .machine import Cfg, ParseError, Program, parse_program
from .sat import DEFAULT_MAX_CONFLICTS, SatBudgetExceeded, Solver


class UsageError(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load(path, want):
    p = parse_program(_read(path))
    if not isinstance(p, want):
        kind = "straight-line program" if want is Program else "CFG (labels, .edge, .entry)"
        raise UsageError(f"{path}: expected a {kind}")
    return p


def _solver_kw(args):
    return {"decision_order": args.seed_order, "max_conflicts": args.max_conflicts}


def cmd_infer(args, out):
    prog = _load(args.file, Program)
    rel = blast_program(prog)
    res = infer(rel, **_solver_kw(args)) if args.keep_intermediates else infer_io(rel, **_solver_kw(args))
    system, stats = res.system, res.stats.as_dict()
    if args.json:
        obj = system.to_json_obj()
        obj["stats"] = stats
        out.write(json.dumps(obj, indent=2) + "\n")
        return
    if len(system):
        out.write(system.format(with_modulus=False) + "\n")
    out.write(f"mod 2^{system.width}\n")
    for k in ("iterations", "sat_calls", "conflicts", "clauses"):
        out.write(f"{k}={stats[k]}\n")


def cmd_analyze(args, out):
    cfg = _load(args.file, Cfg)
    res = analyze(cfg, **_solver_kw(args))
    labels = sorted(cfg.labels)
    if args.json:
        obj = {
            "width": cfg.width,
            "vars": state_names(cfg.registers, cfg.width),
            "blocks": [
                {"label": l, "rows": res.system(l).to_json_obj()["rows"], "updates": res.updates[l]}
                for l in labels
            ],
        }
        out.write(json.dumps(obj, indent=2) + "\n")
        return
    for l in labels:
        out.write(f"{l}:\n")
        text = res.system(l).format(with_modulus=False)
        for line in text.splitlines():
            out.write(f"  {line}\n")
    out.write(f"mod 2^{cfg.width}\n")


def cmd_blast(args, out):
    rel = blast_program(_load(args.file, Program))
    text = relation_dimacs(rel)
    if args.emit_cnf:
        with open(args.emit_cnf, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_sat(args, out):
    try:
        formula, _ = parse_dimacs(_read(args.file))
    except DimacsError as e:
        raise UsageError(f"{args.file}: {e}") from None
    solver = Solver(formula, order=args.seed_order, max_conflicts=args.max_conflicts)
    res = solver.solve()
    if not res:
        out.write("UNSAT\n")
        return
    out.write("SAT\n")
    lits = [str(v if res.model[v] else -v) for v in range(1, formula.num_vars + 1)]
    for i in range(0, len(lits), 10):
        out.write("v " + " ".join(lits[i:i + 10]) + "\n")
    out.write("v 0\n")


def build_parser():
    ap = argparse.ArgumentParser(prog="bitcong", description="Congruence invariants of bit-blasted instruction sequences.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-conflicts", type=int, default=DEFAULT_MAX_CONFLICTS, metavar="N")
    common.add_argument("--seed-order", choices=("asc", "desc"), default="asc",
                        help="SAT decision order over variable indices")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", parents=[common], help="input/output congruences of a straight-line program")
    p.add_argument("file")
    p.add_argument("--keep-intermediates", action="store_true", help="skip projection of intermediate bits")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("analyze", parents=[common], help="per-block entry invariants of a CFG")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("blast", parents=[common], help="emit the program's relation as DIMACS")
    p.add_argument("file")
    p.add_argument("--emit-cnf", metavar="OUT")
    p.set_defaults(func=cmd_blast)

    p = sub.add_parser("sat", parents=[common], help="solve a DIMACS CNF file")
    p.add_argument("file")
    p.set_defaults(func=cmd_sat)
    return ap


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    if args.max_conflicts < 1:
        stderr.write("error: --max-conflicts must be positive\n")
        return 1
    # buffer so nothing reaches stdout when the command fails
    buf = io.StringIO()
    try:
        args.func(args, buf)
    except (ParseError, UsageError) as e:
        stderr.write(f"error: {e}\n")
        return 1
    except SatBudgetExceeded as e:
        stderr.write(f"error: {e}\n")
        return 2
    stdout.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
