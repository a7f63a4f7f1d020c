"""Command line front end: ``fannmcu {convert,codegen,simulate,bench,infer}``.

Exit codes: 0 success, 2 usage error, 3 domain error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bench as benchmod
from .codegen import generate
from .codegen.emitter import Flavor
from .costsim import format_table, reports_to_csv, simulate
from .engine.interpreter import batch_evaluate
from .errors import FannMcuError, FormatMismatch
from .memplan import BUILTIN_TARGETS, get_target, plan_placement, read_target
from .model import read_dataset, read_network, write_network
from .quantize import plan_fixed, to_fixed, to_float

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3
DTYPE_BYTES = 4


class UsageError(Exception):
    pass


def _target(args):
    if getattr(args, "target_file", None):
        t = read_target(args.target_file)
    elif os.path.isfile(args.platform):
        t = read_target(args.platform)
    elif args.platform in BUILTIN_TARGETS:
        t = get_target(args.platform)
    else:
        raise UsageError(f"unknown platform {args.platform!r} (choose from "
                         f"{', '.join(BUILTIN_TARGETS)} or give a target file)")
    if getattr(args, "cores", None):
        t = t.with_cores(args.cores)
    return t


def _load_net(path, dtype=None, input_range=1.0):
    net = read_network(path)
    if dtype == "fixed" and not net.is_fixed:
        net = to_fixed(net, plan_fixed(net, input_range=input_range))
    elif dtype == "float" and net.is_fixed:
        net = to_float(net)
    return net


def cmd_convert(args) -> int:
    net = read_network(args.net_file)
    if args.to_float:
        out = to_float(net)
    else:
        if net.is_fixed:
            raise FormatMismatch(f"{args.net_file} is already fixed point")
        plan = plan_fixed(net, max_dp=args.max_dp, input_range=args.input_range)
        out = to_fixed(net, plan)
        print(f"decimal point: {plan.dp}")
        print(f"accumulator bound: {plan.worst_case_acc_bound}")
    write_network(out, args.output)
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_codegen(args) -> int:
    target = _target(args)
    net = _load_net(args.net_file, args.dtype)
    plan = plan_placement(net, target, DTYPE_BYTES, net.num_inputs)
    ds = read_dataset(args.data) if args.data else None
    flavor = Flavor(args.flavor) if args.flavor else None
    src = generate(net, target, plan, name=args.name, flavor=flavor, dataset=ds,
                   max_samples=args.max_samples)
    paths = src.write(args.output)
    print(plan.summary())
    print(f"flavor: {src.flavor.value}")
    print(f"entry: {src.entry_symbol}")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    target = _target(args)
    net = _load_net(args.net_file, args.dtype)
    plan = plan_placement(net, target, DTYPE_BYTES, net.num_inputs)
    rep = simulate(net, target, plan, args.n, include_activation=not args.no_activation)
    one = rep.per_inference()
    if args.csv:
        sys.stdout.write(reports_to_csv([rep]))
        return EXIT_OK
    print(plan.summary())
    print(format_table([rep]))
    print(f"per inference: {one.total_cycles} cycles, {one.time * 1e3:.4f} ms, {one.energy * 1e6:.3f} uJ")
    print(f"batch overhead: {rep.overhead_cycles} cycles, {rep.overhead_time * 1e3:.4f} ms")
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.targets == "all":
        targets = list(BUILTIN_TARGETS.values())
    else:
        targets = []
        for name in args.targets.split(","):
            if name not in BUILTIN_TARGETS and not os.path.isfile(name):
                raise UsageError(f"unknown target {name!r}")
            targets.append(get_target(name) if name in BUILTIN_TARGETS else read_target(name))
    try:
        layers = benchmod.parse_range(args.layers)
    except ValueError:
        raise UsageError(f"bad --layers value {args.layers!r}") from None
    if args.grid:
        try:
            ins, outs = (benchmod.parse_range(v) for v in args.grid.split("x"))
        except ValueError:
            raise UsageError("--grid expects INPUTSxOUTPUTS, e.g. 10..100x10..100") from None
        text = benchmod.rows_to_csv(benchmod.layer_sweep(targets, ins, outs, args.dtype),
                                    benchmod.LAYER_COLUMNS)
    else:
        rows = benchmod.sweep(targets, layers, args.d, args.dtype,
                              include_activation=args.activation, workers=args.jobs)
        text = benchmod.rows_to_csv(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_infer(args) -> int:
    net = read_network(args.net_file)
    ds = read_dataset(args.data_file)
    outputs, acc = batch_evaluate(net, ds)
    if args.outputs:
        np.savetxt(sys.stdout, outputs, fmt="%.9g")
    print(f"samples: {ds.num_samples}")
    print(f"accuracy: {acc:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fannmcu", description="FANN network deployment toolkit for microcontrollers")
    sub = p.add_subparsers(dest="command", required=True)

    def platform_opts(sp):
        sp.add_argument("--platform", default="generic",
                        help=f"{' | '.join(BUILTIN_TARGETS)} | <target file>")
        sp.add_argument("--target-file", help="custom target descriptor (overrides --platform)")
        sp.add_argument("--cores", type=int, help="override the number of cores")
        sp.add_argument("--dtype", choices=("float", "fixed"), default="fixed")

    sp = sub.add_parser("convert", help="quantize a float .net file to fixed point")
    sp.add_argument("net_file")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--fixed", dest="to_float", action="store_false", help="float to fixed (default)")
    g.add_argument("--float", dest="to_float", action="store_true", help="fixed back to float")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--max-dp", type=int, default=30)
    sp.add_argument("--input-range", type=float, default=1.0,
                    help="magnitude bound of the inputs (default 1.0)")
    sp.set_defaults(func=cmd_convert, to_float=False)

    sp = sub.add_parser("codegen", help="emit C sources for a target")
    sp.add_argument("net_file")
    platform_opts(sp)
    sp.add_argument("-o", "--output", default=".", help="output directory")
    sp.add_argument("--name", default="network", help="C symbol prefix")
    sp.add_argument("--flavor", choices=[f.value for f in Flavor], help="force a code flavor")
    sp.add_argument("--data", help="dataset to embed in a test harness")
    sp.add_argument("--max-samples", type=int, default=100)
    sp.set_defaults(func=cmd_codegen)

    sp = sub.add_parser("simulate", help="predict runtime and energy")
    sp.add_argument("net_file")
    platform_opts(sp)
    sp.add_argument("-n", type=int, default=1, help="inferences per batch")
    sp.add_argument("--no-activation", action="store_true", help="leave activation cost out")
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("bench", help="sweep the benchmark network family")
    sp.add_argument("--d", type=int, default=8)
    sp.add_argument("--layers", default="1..24", help="e.g. 1..24 or 1,4,8")
    sp.add_argument("--targets", default="all", help="'all' or comma-separated names/files")
    sp.add_argument("--dtype", choices=("float", "fixed"), default="fixed")
    sp.add_argument("--grid", help="single-layer sweep INPUTSxOUTPUTS instead of the family")
    sp.add_argument("--activation", action="store_true", help="include activation cost")
    sp.add_argument("--jobs", type=int, default=None)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("infer", help="run a dataset through a network")
    sp.add_argument("net_file")
    sp.add_argument("data_file")
    sp.add_argument("--outputs", action="store_true", help="print every output row")
    sp.set_defaults(func=cmd_infer)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad usage
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fannmcu: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"fannmcu: error: {exc.filename}: no such file", file=sys.stderr)
        return EXIT_USAGE
    except FannMcuError as exc:
        print(f"fannmcu: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
