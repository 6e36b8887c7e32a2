"""Command-line entry point: ``mcsort {gen,sim,stats,export,verify}``.

Exit status is 0 on success, 1 when a verification finds failures and 2 for
usage, input or file-format errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .gray import MAX_WIDTH
from .netlist import (
    Netlist,
    NetlistError,
    collect_words,
    export_structural_hdl,
    from_json,
    metrics,
    simulate,
    to_json,
    word_assignment,
)
from .networks import ComparatorSchedule, Variant, build_n_sort
from .synth import build_two_sort
from .ternary import Trit
from .verify import run_property_suites, verify_network, verify_two_sort

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)


def _load_netlist(path: str) -> Netlist:
    return from_json(Path(path).read_text())


def _load_schedule(path: str) -> ComparatorSchedule:
    try:
        return ComparatorSchedule.from_json(Path(path).read_text())
    except (ValueError, TypeError, KeyError) as exc:
        raise UsageError(f"{path}: bad schedule: {exc}") from None


def _variant(channels: int, variant: str | None) -> Variant:
    if channels == 4:
        return Variant.SORT4
    if channels == 7:
        return Variant.SORT7
    return Variant.SORT10_DEPTH if variant == "depth" else Variant.SORT10_SIZE


def _network_source(args) -> Variant | ComparatorSchedule:
    if args.schedule:
        s = _load_schedule(args.schedule)
        if args.channels is not None and args.channels != s.channels:
            raise UsageError(f"--channels {args.channels} does not match schedule ({s.channels} channels)")
        return s
    if args.channels is None:
        raise UsageError("give --channels or --schedule")
    if args.variant and args.channels != 10:
        raise UsageError("--variant only applies to 10 channels")
    return _variant(args.channels, args.variant)


def _width(value: str) -> int:
    b = int(value)
    if not 1 <= b <= MAX_WIDTH:
        raise argparse.ArgumentTypeError(f"bits must be in [1, {MAX_WIDTH}]")
    return b


def _positive(value: str) -> int:
    k = int(value)
    if k < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return k


# --- commands -------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.target == "two-sort":
        n = build_two_sort(args.bits)
    else:
        n = build_n_sort(_network_source(args), args.bits, ascending=args.ascending)
    m = metrics(n)
    doc = to_json(n)
    if args.out:
        Path(args.out).write_text(doc)
    elif not args.json:
        print(doc)
    payload = {"name": n.name, "out": args.out, "metrics": m.as_dict()}
    if not args.out and args.json:
        payload["netlist"] = json.loads(doc)
    text = f"wrote {args.out}\ngates: {m.total}\ndepth: {m.depth}"
    if args.out or args.json:
        _emit(args, payload, text)
    else:
        print(f"gates: {m.total}", file=sys.stderr)
    return EXIT_OK


def _parse_assign(items: Sequence[str], n: Netlist) -> dict[str, Trit]:
    words: dict[str, str] = {}
    single: dict[str, Trit] = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--assign expects name=word, got {item!r}")
        if name in n.inputs:
            if len(value) != 1:
                raise UsageError(f"input {name} takes one trit, got {value!r}")
            single[name] = Trit.parse(value)
        else:
            words[name] = value
    out = word_assignment(words)
    out.update(single)
    return out


def cmd_sim(args) -> int:
    n = _load_netlist(args.netlist)
    if args.assign:
        if args.g or args.h:
            raise UsageError("use either --g/--h or --assign")
        assignment = _parse_assign(args.assign, n)
    else:
        if not (args.g and args.h):
            raise UsageError("give both --g and --h, or --assign")
        assignment = word_assignment({"g": args.g, "h": args.h})
    unknown = sorted(set(assignment) - set(n.inputs))
    if unknown:
        raise UsageError(f"not an input of {n.name}: {', '.join(unknown)}")
    outs = collect_words(simulate(n, assignment))
    words = {k: str(w) for k, w in outs.items()}
    _emit(args, {"netlist": n.name, "outputs": words}, " ".join(f"{k}={w}" for k, w in words.items()))
    return EXIT_OK


def cmd_stats(args) -> int:
    n = _load_netlist(args.netlist)
    m = metrics(n)
    text = "\n".join(f"{k}: {v}" for k, v in m.as_dict().items())
    _emit(args, {"name": n.name, "inputs": len(n.inputs), "outputs": len(n.outputs), "metrics": m.as_dict()}, text)
    return EXIT_OK


def cmd_export(args) -> int:
    n = _load_netlist(args.netlist)
    text = export_structural_hdl(n) if args.format == "hdl" else to_json(n)
    if args.out:
        Path(args.out).write_text(text)
        _emit(args, {"name": n.name, "format": args.format, "out": args.out}, f"wrote {args.out}")
    elif args.json:
        print(json.dumps({"name": n.name, "format": args.format, "text": text}, indent=2))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.exhaustive and args.samples is not None:
        raise UsageError("--exhaustive and --samples are mutually exclusive")
    netlist = _load_netlist(args.netlist) if getattr(args, "netlist", None) else None
    threads = args.threads or os.cpu_count() or 1
    if args.target == "two-sort":
        if args.bits is None:
            raise UsageError("verify two-sort needs --bits")
        report = verify_two_sort(args.bits, samples=args.samples, seed=args.seed, netlist=netlist, threads=threads)
    elif args.target == "network":
        if args.bits is None:
            raise UsageError("verify network needs --bits")
        report = verify_network(
            _network_source(args),
            args.bits,
            samples=args.samples,
            seed=args.seed,
            netlist=netlist,
            ascending=args.ascending,
            threads=threads,
        )
    else:
        report = run_property_suites()
    if args.report:
        Path(args.report).write_text(report.to_json())
    if args.json:
        print(report.to_json())
    else:
        print(report.summary())
        if report.failures:
            f = report.failures[0]
            print("first failure: " + json.dumps(f))
    return EXIT_OK if report.passed else EXIT_FAIL


# --- parser ---------------------------------------------------------------------


def _network_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--channels", type=int, choices=(4, 7, 10))
    p.add_argument("--variant", choices=("size", "depth"), help="10-channel network optimised for size or depth")
    p.add_argument("--schedule", metavar="FILE", help="comparator schedule JSON instead of a built-in network")
    p.add_argument("--ascending", action="store_true", help="route the minimum to the lower channel")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="mcsort", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a netlist")
    gen_sub = gen.add_subparsers(dest="target", required=True)
    g2 = gen_sub.add_parser("two-sort", parents=[common], help="2-sort(B) comparator")
    g2.add_argument("--bits", type=_width, required=True)
    g2.add_argument("--out", metavar="FILE")
    gn = gen_sub.add_parser("n-sort", parents=[common], help="sorting network of 2-sort(B) comparators")
    gn.add_argument("--bits", type=_width, required=True)
    gn.add_argument("--out", metavar="FILE")
    _network_flags(gn)
    gen.set_defaults(func=cmd_gen)

    sim = sub.add_parser("sim", parents=[common], help="simulate one ternary input assignment")
    sim.add_argument("--netlist", required=True, metavar="FILE")
    sim.add_argument("--g", metavar="WORD")
    sim.add_argument("--h", metavar="WORD")
    sim.add_argument("--assign", nargs="+", metavar="NAME=WORD")
    sim.set_defaults(func=cmd_sim)

    stats = sub.add_parser("stats", parents=[common], help="gate counts and depth")
    stats.add_argument("--netlist", required=True, metavar="FILE")
    stats.set_defaults(func=cmd_stats)

    export = sub.add_parser("export", parents=[common], help="write structural HDL or canonical JSON")
    export.add_argument("--netlist", required=True, metavar="FILE")
    export.add_argument("--format", choices=("hdl", "json"), required=True)
    export.add_argument("--out", metavar="FILE")
    export.set_defaults(func=cmd_export)

    verify = sub.add_parser("verify", help="check circuits against their oracles")
    v_sub = verify.add_subparsers(dest="target", required=True)
    vflags = argparse.ArgumentParser(add_help=False, parents=[common])
    vflags.add_argument("--exhaustive", action="store_true", help="every input (the default without --samples)")
    vflags.add_argument("--samples", type=_positive, metavar="N")
    vflags.add_argument("--seed", type=int, default=0)
    vflags.add_argument("--threads", type=_positive, default=None, help="worker threads (default: all CPUs)")
    vflags.add_argument("--report", metavar="FILE", help="also write the JSON report here")
    v2 = v_sub.add_parser("two-sort", parents=[vflags])
    v2.add_argument("--bits", type=_width)
    v2.add_argument("--netlist", metavar="FILE", help="verify this netlist instead of a fresh build")
    vn = v_sub.add_parser("network", parents=[vflags])
    vn.add_argument("--bits", type=_width)
    vn.add_argument("--netlist", metavar="FILE")
    _network_flags(vn)
    v_sub.add_parser("properties", parents=[vflags], help="structural property suites")
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, NetlistError, ValueError, OSError) as exc:
        print(f"mcsort: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
