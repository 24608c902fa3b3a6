"""Command-line front end.

Exit codes: 0 success (or PASS verdicts), 1 domain failure (invalid measure,
FAIL verdicts, invariant violations), 2 usage/parse/config errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from asmlab import asm, jsonio, measures, quantization, spin
from asmlab.config import Tolerances, active_tolerances
from asmlab.linalg import operator_norm

_TOL_FLAGS = (
    "hermiticity", "psd", "trace", "normalization",
    "projectivity", "support", "spin", "stochastic",
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    for name in _TOL_FLAGS:
        parser.add_argument(f"--tol-{name}", type=float, default=None,
                            help=f"override the {name} tolerance")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for random banks (default 0)")


def _add_net(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--net-start", type=float, default=1.0,
                        help="largest hbar of the geometric net (default 1.0)")
    parser.add_argument("--net-ratio", type=float, default=0.75,
                        help="geometric ratio in (0,1) (default 0.75)")
    parser.add_argument("--net-count", type=int, default=40,
                        help="number of net points (default 40)")


def _add_rule(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tail-len", type=int, default=5)
    parser.add_argument("--rule-slack", type=float, default=0.10)
    parser.add_argument("--defect-floor", type=float, default=0.05)
    parser.add_argument("--bound-tol", type=float, default=1e-8)


def _tolerances(args) -> Tolerances:
    t = active_tolerances()
    overrides = {
        name: getattr(args, f"tol_{name}")
        for name in _TOL_FLAGS
        if getattr(args, f"tol_{name}") is not None
    }
    return replace(t, **overrides) if overrides else t


def _net(args) -> asm.HbarNet:
    return asm.HbarNet.geometric(args.net_start, args.net_ratio, args.net_count)


def _rule(args) -> asm.PassRule:
    return asm.PassRule(tail_len=args.tail_len, slack=args.rule_slack,
                        defect_floor=args.defect_floor, bound_tol=args.bound_tol)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _write_csv(path: str, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["hbar", "set_pair", "defect", "norm_AX"])
        for row in rows:
            writer.writerow([repr(row.hbar), row.set_pair,
                             repr(row.defect), repr(row.norm_ax)])


def cmd_validate(args) -> int:
    tol = _tolerances(args)
    p = jsonio.load_povm(args.povm, tol)
    report = measures.validate_povm(p, tol)
    _emit(report.to_json())
    return 0 if report.valid else 1


def cmd_sweep(args) -> int:
    tol = _tolerances(args)
    try:
        net = _net(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    rule = _rule(args)
    family = jsonio.load_family(args.family, tol)
    if args.mode == "asm":
        report = asm.check_asm(family, net, rule, tol)
    else:
        report = quantization.check_positive_asymptotic_morphism(
            family, net=net, rule=rule, seed=args.seed, tol=tol
        )
    if args.out:
        _write_csv(args.out, report.rows)
    _emit(report.to_json())
    return 0 if report.passed else 1


def cmd_spin(args) -> int:
    tol = _tolerances(args)
    if args.spin_command == "classify":
        p = jsonio.load_povm(args.povm, tol)
        x = spin.classify_spin_povm(p, tol)
        r, u = spin.sharpness(x, tol)
        _emit({
            "bloch": [float(v) for v in x],
            "norm": float(np.linalg.norm(x)),
            "reality": r,
            "unsharpness": u,
            "projective": measures.is_projective(p, tolerances=tol),
        })
        return 0
    x = np.array([args.x, args.y, args.z])
    p = spin.spin_povm_from_bloch(x, tol)
    doc = jsonio.povm_to_json(p)
    if args.out:
        jsonio.save_povm(args.out, p)
        _emit({"written": args.out, "norm": float(np.linalg.norm(x))})
    else:
        _emit(doc)
    return 0


def cmd_bell(args) -> int:
    tol = _tolerances(args)
    h = args.hbar
    if not 0.0 < h <= 1.0:
        print(f"error: --hbar must lie in (0, 1], got {h!r}", file=sys.stderr)
        return 2
    settings = spin.chsh_optimal_settings(scale=1.0 - h)
    s = spin.chsh_value(*settings, tol)
    threshold = spin.bell_threshold_constant()
    _emit({
        "hbar": h,
        "chsh": s,
        "classical_bound": 2.0,
        "threshold": threshold,
        "hbar_minus_threshold": h - threshold,
        "settings": {k: [float(v) for v in vec]
                     for k, vec in zip(("a", "a'", "b", "b'"), settings)},
    })
    return 0


def cmd_dilate(args) -> int:
    tol = _tolerances(args)
    p = jsonio.load_povm(args.povm, tol)
    v, q = measures.naimark_dilate(p, tol)
    iso_residual = operator_norm(v.conj().T @ v - np.eye(p.dim), tol)
    comp_residuals = [
        operator_norm(v.conj().T @ q.effects[i] @ v - p.effects[i], tol)
        for i in range(len(p.space))
    ]
    doc = {
        "isometry": jsonio.encode_matrix(v),
        "pvm": jsonio.povm_to_json(q),
        "isometry_residual": iso_residual,
        "compression_residuals": comp_residuals,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        _emit({"written": args.out, "isometry_residual": iso_residual,
               "compression_residuals": comp_residuals})
    else:
        _emit(doc)
    return 0


def cmd_quantize(args) -> int:
    tol = _tolerances(args)
    p = jsonio.load_povm(args.povm, tol)
    try:
        spec = json.loads(args.function)
    except json.JSONDecodeError as e:
        raise jsonio.FormatError(f"--function: {e.msg}") from None
    values = jsonio.function_values_from_json(spec, p.space)
    q = quantization.quantize(p, values)
    _emit({
        "operator": jsonio.encode_matrix(q),
        "norm": operator_norm(q, tol),
        "bound_margin": quantization.norm_bound_margin(p, values, tol),
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asmlab",
        description="Finite-dimensional POVM diagnostics and hbar-family sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the POVM axioms of a measure file")
    p.add_argument("povm", help="POVM JSON file")
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="run an hbar sweep over a family file")
    p.add_argument("family", help="family JSON file")
    p.add_argument("--mode", choices=("asm", "morphism"), default="asm")
    p.add_argument("--out", help="write per-pair rows to this CSV path")
    _add_net(p)
    _add_rule(p)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spin", help="classify or build spin measurements")
    spin_sub = p.add_subparsers(dest="spin_command", required=True)
    pc = spin_sub.add_parser("classify", help="ball point of a spin POVM file")
    pc.add_argument("povm")
    _add_common(pc)
    pc.set_defaults(func=cmd_spin)
    pb = spin_sub.add_parser("build", help="spin POVM from a ball point")
    pb.add_argument("x", type=float)
    pb.add_argument("y", type=float)
    pb.add_argument("z", type=float)
    pb.add_argument("--out", help="write the POVM JSON here instead of stdout")
    _add_common(pb)
    pb.set_defaults(func=cmd_spin)

    p = sub.add_parser("bell", help="CHSH value of the noise-scaled optimal settings")
    p.add_argument("--hbar", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("dilate", help="Naimark dilation of a normalized POVM file")
    p.add_argument("povm")
    p.add_argument("--out", help="write the dilation JSON here")
    _add_common(p)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("quantize", help="apply the measure's positive map to a function")
    p.add_argument("povm")
    p.add_argument("--function", required=True,
                   help='function spec JSON, e.g. {"type":"indicator","set":["+1/2"]}')
    _add_common(p)
    p.set_defaults(func=cmd_quantize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        active_tolerances()
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (jsonio.FormatError, FileNotFoundError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
