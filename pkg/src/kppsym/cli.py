"""Command-line front end: ``python3 -m kppsym <command> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors.  ``--output json`` prints one sorted JSON document per invocation.
"""

import argparse
import json
import os
import sys
from dataclasses import replace
from fractions import Fraction

from . import detsys, liealg, perturb, solutions
from .errors import KppSymError
from .expr import Rational, Symbol, to_text
from .jet import parse_vector_field


class UsageError(Exception):
    pass


def _load_system(spec):
    if spec.startswith("builtin:"):
        name = spec[len("builtin:") :]
    elif not os.path.exists(spec) and spec in perturb.BUILTIN_SYSTEMS:
        name = spec
    else:
        try:
            with open(spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read equation file {spec!r}: {exc.strerror}") from None
        return spec, detsys.parse_system(text)
    if name not in perturb.BUILTIN_SYSTEMS:
        raise UsageError(f"unknown builtin equation {name!r}; choose from {', '.join(perturb.BUILTIN_SYSTEMS)}")
    return "builtin:" + name, perturb.builtin_system(name)


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{what} must be a comma-separated list of numbers") from None


def _grid(args, entry):
    if not args.grid:
        return entry.grid
    vals = _floats(args.grid, "--grid")
    if len(vals) not in (4, 6):
        raise UsageError("--grid takes x0,x1,t0,t1[,nx,nt]")
    nx, nt = (int(vals[4]), int(vals[5])) if len(vals) == 6 else (entry.grid.nx, entry.grid.nt)
    try:
        return solutions.Grid((vals[0], vals[1]), (vals[2], vals[3]), nx, nt, entry.grid.excluded)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _entry(args):
    params = {}
    for item in args.param or []:
        k, sep, v = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects name=value, got {item!r}")
        try:
            params[k.strip()] = Fraction(v.strip())
        except ValueError:
            raise UsageError(f"bad value in --param {item!r}") from None
    try:
        return solutions.get_entry(args.entry, **params)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


# ------------------------------------------------------------------ commands


def cmd_verify(args):
    name, system = _load_system(args.equation)
    X = parse_vector_field(args.generator, system.space)
    result = detsys.verify_generator(X, system, args.trials, args.seed)
    residuals = detsys.symmetry_residual(X, system)
    doc = {
        "command": "verify",
        "equation": name,
        "generator": X.to_text(),
        "residuals": [to_text(r) for r in residuals],
        "symbolic": result.symbolic,
        "numeric": result.numeric.as_dict(),
        "verdict": "pass" if result.passed else "fail",
    }
    lines = [
        f"equation:  {name}",
        f"generator: {doc['generator']}",
    ]
    for r, s in zip(doc["residuals"], doc["symbolic"]):
        lines.append(f"residual:  {r}   [{s}]")
    n = result.numeric
    lines.append(f"numeric:   max |residual| = {n.max_abs_residual:.3e} over {n.trials} trials -> {n.verdict}")
    lines.append(f"verdict:   {doc['verdict']}")
    return doc, "\n".join(lines), 0 if result.passed else 1


def cmd_determining(args):
    name, system = _load_system(args.equation)
    dset = detsys.generate_determining(system)
    doc = {
        "command": "determining",
        "equation": name,
        "unknowns": {k: list(v) for k, v in dset.unknowns.items()},
        "constraints": [to_text(c) for c in dset.constraints],
    }
    lines = [f"equation: {name}", f"{len(dset.constraints)} determining equations"]
    lines.append(dset.to_text())
    return doc, "\n".join(lines), 0


def cmd_split(args):
    split = perturb.split_order1(perturb.builtin_equation(args.builtin))
    eqs = [(to_text(l), to_text(r)) for l, r in split.system.equations]
    doc = {
        "command": "split",
        "equation": args.builtin,
        "order0": f"{eqs[0][0]} = {eqs[0][1]}",
        "order1": f"{eqs[1][0]} = {eqs[1][1]}",
        "parameters": list(split.system.parameters),
        "notes": split.notes,
    }
    lines = [f"O(eps^0): {doc['order0']}", f"O(eps^1): {doc['order1']}"]
    lines += [f"note: {n}" for n in split.notes]
    return doc, "\n".join(lines), 0


def cmd_algebra(args):
    alg = liealg.BUILTIN_ALGEBRAS[args.builtin]()
    names = alg.names
    s = Symbol("s")
    comm = liealg.commutator_table(alg)
    adj = liealg.adjoint_table(alg, s)
    mats = {f"M{i}": alg.adjoint_matrix(i, Symbol(f"s{i - 1}")) for i in range(1, alg.dim + 1)}
    doc = {
        "command": "algebra",
        "algebra": args.builtin,
        "basis": {n: X.to_text() for n, X in zip(names, alg.basis)},
        "commutators": [[liealg.format_element(c, names) for c in row] for row in comm],
        "adjoint": [[liealg.format_element(c, names, j) for j, c in enumerate(row)] for row in adj],
        "matrices": {k: [[to_text(v) for v in row] for row in M] for k, M in mats.items()},
    }
    lines = [f"{n} = {X.to_text()}" for n, X in zip(names, alg.basis)]
    lines += ["", liealg.render_table("[Xi,Xj]", comm, names), ""]
    lines += [liealg.render_table("Ad(exp(s Xi)) Xj", adj, names, lead_diagonal=True), ""]
    for k, M in mats.items():
        lines += [f"{k}:", liealg.render_matrix(M)]
    return doc, "\n".join(lines), 0


def cmd_canonicalize(args):
    parts = [p.strip() for p in args.coeffs.split(",")]
    if len(parts) != 3:
        raise UsageError("--coeffs takes exactly three values a1,a2,a3")
    try:
        a = [Fraction(p) for p in parts]
    except ValueError:
        raise UsageError("--coeffs values must be integers, decimals or p/q") from None
    alg = liealg.kpp3()
    if args.convention == "orbit":
        form = liealg.classify_orbit(a)
        back = liealg.replay(alg, a, form, liealg.row_action)
    else:
        form = liealg.canonicalize(a)
        back = liealg.replay(alg, a, form)
    ok = back == [Rational(q) for q in form.canonical]
    doc = form.as_dict(alg.names)
    doc.update({"command": "canonicalize", "input": [str(v) for v in a], "convention": args.convention})
    doc["replay"] = [to_text(v) for v in back]
    doc["replay_ok"] = ok
    steps = " then ".join(f"Ad(exp({s} X{i}))" for i, s in form.witness) or "no adjoint step"
    lines = [
        f"case {form.case}: {doc['canonical']}",
        f"witness: {steps}, scale by {form.scale}",
        f"replay: ({', '.join(doc['replay'])}) {'matches' if ok else 'DOES NOT match'}",
    ]
    return doc, "\n".join(lines), 0 if ok else 1


def _report_lines(entry, rep):
    lines = [
        f"entry:      {entry.id} ({entry.provenance})",
        f"equation:   {entry.equation}",
        f"epsilon:    {rep.epsilon}",
        f"points:     {rep.n_points} (skipped {rep.skipped})",
    ]
    width = max(len(k) for k in rep.components)
    for k, v in sorted(rep.components.items()):
        lines.append(f"  {k.ljust(width)}  sup {v['sup_norm']:.3e}  l2 {v['l2_norm']:.3e}")
    lines.append(f"sup_norm:   {rep.sup_norm:.3e}")
    lines.append(f"l2_norm:    {rep.l2_norm:.3e}")
    lines.append(f"verdict:    {rep.verdict()}")
    return lines


def _residual_doc(entry, grid, rep):
    doc = {
        "entry_id": entry.id,
        "equation": entry.equation,
        "epsilon": rep.epsilon,
        "grid": grid.as_dict(),
        "sup_norm": rep.sup_norm,
        "l2_norm": rep.l2_norm,
        "n_points": rep.n_points,
        "skipped": rep.skipped,
        "components": rep.as_dict()["components"],
        "verdict": rep.verdict(),
        "provenance": entry.provenance,
    }
    return doc


def cmd_residual(args):
    entry = _entry(args)
    grid = _grid(args, entry)
    eps = entry.epsilon if args.eps is None else args.eps
    if not 0 < eps <= 1:
        raise UsageError("--eps must lie in (0, 1]")
    rep = solutions.residual(entry, grid, eps)
    doc = _residual_doc(entry, grid, rep)
    doc["command"] = "residual"
    return doc, "\n".join(_report_lines(entry, rep)), 0 if rep.verdict() == "pass" else 1


def cmd_order_scaling(args):
    entry = _entry(args)
    grid = _grid(args, entry)
    eps = _floats(args.eps_list, "--eps-list")
    try:
        res = solutions.order_scaling(entry, grid, eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = res.as_dict()
    doc.update({"command": "order-scaling", "entry_id": entry.id, "provenance": entry.provenance})
    lines = [f"entry: {entry.id} ({entry.provenance})", "      eps     sup_norm"]
    for e, s in zip(res.eps_list, res.sup_norms):
        lines.append(f"  {e:8.1e}  {s:.6e}")
    if res.status == "exact":
        lines.append("exact: defect vanishes for every eps")
        code = 0
    else:
        lines.append("slopes: " + ", ".join(f"{v:.4f}" for v in res.slopes))
        lines.append(f"fitted exponent: {res.fitted_exponent:.4f}")
        lines.append(f"eps^2 coefficient sup: {res.oracle_sup:.6e}")
        code = 0 if abs(res.fitted_exponent - 2.0) <= 0.2 else 1
    return doc, "\n".join(lines), code


def cmd_transform(args):
    entry = _entry(args)
    try:
        new = solutions.transform_solution(entry, args.flow, args.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.grid:
        new = replace(new, grid=_grid(args, new))
    rep = solutions.residual(new)
    doc = _residual_doc(new, new.grid, rep)
    doc.update({"command": "transform", "flow": args.flow, "s": args.s, "transformed": new.as_dict()})
    if new.is_exact:
        lines = [f"u = {to_text(new.order0)}"]
    else:
        lines = [f"v = {to_text(new.order0)}", f"w = {to_text(new.order1)}"]
    lines += _report_lines(new, rep)
    return doc, "\n".join(lines), 0 if rep.verdict() == "pass" else 1


# ------------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--output", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="kppsym", description="approximate symmetries of perturbed KPP equations")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="check a generator against an equation")
    v.add_argument("--equation", required=True, help="equation file or builtin:NAME")
    v.add_argument("--generator", required=True, help='e.g. "x*dx + 2*t*dt"')
    v.add_argument("--trials", type=int, default=100)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("determining", parents=[common], help="list determining equations")
    d.add_argument("--equation", required=True)
    d.set_defaults(func=cmd_determining)

    s = sub.add_parser("split", parents=[common], help="order-0/order-1 system")
    s.add_argument("--builtin", required=True, choices=("fisher", "zeldovich", "nws", "heat"))
    s.set_defaults(func=cmd_split)

    a = sub.add_parser("algebra", parents=[common], help="commutator and adjoint tables")
    a.add_argument("--builtin", required=True, choices=sorted(liealg.BUILTIN_ALGEBRAS))
    a.set_defaults(func=cmd_algebra)

    c = sub.add_parser("canonicalize", parents=[common], help="optimal-system representative")
    c.add_argument("--coeffs", required=True, help="a1,a2,a3")
    c.add_argument("--convention", choices=("column", "orbit"), default="column")
    c.set_defaults(func=cmd_canonicalize)

    ids = sorted(solutions.CATALOG)
    for cmd, fn, helptext in (
        ("residual", cmd_residual, "PDE residual of a catalog entry"),
        ("order-scaling", cmd_order_scaling, "eps-scaling of the full-equation defect"),
        ("transform", cmd_transform, "apply a one-parameter group to an entry"),
    ):
        r = sub.add_parser(cmd, parents=[common], help=helptext)
        r.add_argument("--entry", required=True, choices=ids)
        r.add_argument("--grid", help="x0,x1,t0,t1[,nx,nt]")
        r.add_argument("--param", action="append", help="override a parameter, name=value")
        if cmd == "residual":
            r.add_argument("--eps", type=float)
        if cmd == "order-scaling":
            r.add_argument("--eps-list", default="1e-1,1e-2,1e-3")
        if cmd == "transform":
            r.add_argument("--flow", type=int, choices=(1, 2, 3), required=True)
            r.add_argument("--s", type=float, required=True)
        r.set_defaults(func=fn)
    return p


_LIST_FLAGS = ("--grid", "--coeffs", "--eps-list")


def _attach_list_values(argv):
    # argparse reads "-1,2,3" as an option; glue such values to their flag
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _LIST_FLAGS:
            val = next(it, None)
            if val is not None and val.startswith("-"):
                out.append(f"{tok}={val}")
                continue
            out.append(tok)
            if val is not None:
                out.append(val)
            continue
        out.append(tok)
    return out


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    argv = _attach_list_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc, text, code = args.func(args)
    except (UsageError, KppSymError) as exc:
        print(f"kppsym: error: {exc}", file=sys.stderr)
        return 2
    if args.output == "json":
        doc["seed"] = args.seed
        stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        stdout.write(text + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
