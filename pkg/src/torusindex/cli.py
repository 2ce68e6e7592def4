"""Command-line front end.

Exit codes: 0 success, 1 input errors (I/O, schema, invalid chamber or
flags), 2 singularities that did not cancel (the report names the surviving
denominator factors).  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .algebra import format_fraction
from .averaging import (
    ChamberError,
    SingularityNotCancelled,
    as_chamber,
    auto_nodes,
    chamber_validate,
    index_compute,
    nclass_contributions,
)
from .characteristic import OperatorKind
from .datasets import BUILTINS, builtin_datasets
from .localization import Dataset, DatasetError, dataset_validate, format_monomial, load_dataset

EXIT_OK, EXIT_INPUT, EXIT_SINGULAR = 0, 1, 2
MIN_NODES, MAX_NODES = 64, 1 << 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


@dataclass
class RunConfig:
    builtin: str | None = None
    dataset: str | None = None
    operator: str | None = None
    engine: str = "both"
    chamber: str = "auto"
    nodes: int | None = None
    report: str = "text"
    trunc: int | None = None

    def __post_init__(self):
        if (self.builtin is None) == (self.dataset is None):
            raise UsageError("exactly one of --builtin and --dataset is required")
        if self.nodes is not None:
            n = self.nodes
            if n < MIN_NODES or n > MAX_NODES or n & (n - 1):
                raise UsageError(f"--nodes must be a power of two in [{MIN_NODES}, {MAX_NODES}], got {n}")

    def load(self) -> Dataset:
        if self.builtin is not None:
            try:
                d = builtin_datasets(self.builtin)
            except KeyError as exc:
                raise UsageError(exc.args[0]) from None
        else:
            d = load_dataset(self.dataset)
        if self.operator is not None:
            d = d.with_operator(self.operator)
        problems = dataset_validate(d)
        if problems:
            raise DatasetError("; ".join(problems))
        return d

    def resolve_chamber(self, d: Dataset):
        ch = as_chamber(self.chamber, d)
        problems = chamber_validate(ch, d)
        if problems:
            raise ChamberError(problems)
        return ch


def _config(args) -> RunConfig:
    return RunConfig(builtin=args.builtin, dataset=args.dataset, operator=args.operator,
                     engine=getattr(args, "engine", "both"), chamber=args.chamber, nodes=args.nodes,
                     report=args.report, trunc=args.trunc)


def cmd_index(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    d = cfg.load()
    try:
        report = index_compute(d, cfg.engine, cfg.chamber, cfg.nodes, order=cfg.trunc)
    except SingularityNotCancelled as exc:
        report = exc.report
        _emit(report.to_dict() if cfg.report == "json" else report.to_text(), cfg.report, out)
        print(f"singularities did not cancel: surviving denominator {exc.denominator}", file=sys.stderr)
        return EXIT_SINGULAR
    _emit(report.to_dict() if cfg.report == "json" else report.to_text(), cfg.report, out)
    return EXIT_OK


def cmd_nclass(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    d = cfg.load()
    ch = cfg.resolve_chamber(d)
    n = cfg.nodes or auto_nodes(d, ch)
    rows = nclass_contributions(d, ch, n, order=cfg.trunc)
    comps = []
    for name, series, integral in rows:
        names = [r.id for r in series.roots]
        coeffs = {format_monomial(dict(zip(names, mono)), names): val
                  for mono, val in sorted(series.terms.items())}
        comps.append({"name": name, "coefficients": coeffs, "integral": integral})
    total = sum(c["integral"] for c in comps)
    if cfg.report == "json":
        _emit({"dataset": d.name, "operator": d.operator.value, "chamber": [format_fraction(x) for x in ch.q],
               "nodes": n, "components": comps, "total": total}, "json", out)
    else:
        lines = [f"dataset   {d.name}", f"operator  {d.operator.value}", f"chamber   Q = ({ch}), N = {n}"]
        for c in comps:
            terms = ", ".join(f"{k}: {v:.12g}" for k, v in c["coefficients"].items())
            lines.append(f"  {c['name']}: N = {{{terms}}}  integral {c['integral']:.12g}")
        lines.append(f"total     {total:.15g}")
        _emit("\n".join(lines), "text", out)
    return EXIT_OK


def cmd_selftest(pattern: str | None = None, out=None) -> int:
    out = out or sys.stdout
    from .acceptance import run_checks

    results = run_checks(pattern)
    for r in results:
        print(r.line(), file=out)
    if not results:
        print(f"no checks match {pattern!r}", file=sys.stderr)
        return EXIT_INPUT
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=out)
    return EXIT_INPUT if failed else EXIT_OK


def cmd_list(out=None) -> int:
    out = out or sys.stdout
    for name in sorted(BUILTINS):
        info = BUILTINS[name]
        d = info.build()
        expected = ", ".join(f"{k}={v}" for k, v in info.expected.items())
        print(f"{name:20s} k={d.rank} {d.operator.value:10s} {info.description}"
              + (f"  [{expected}]" if expected else ""), file=out)
    return EXIT_OK


def _emit(payload, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(payload + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="torusindex", description="Invariant index from torus fixed-point data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_flags(p, engine=True):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--builtin", metavar="NAME")
        src.add_argument("--dataset", metavar="PATH")
        p.add_argument("--operator", choices=[o.value for o in OperatorKind])
        if engine:
            p.add_argument("--engine", choices=["exact", "numeric", "both"], default="both")
        p.add_argument("--chamber", default="auto", metavar="q1,q2,...|auto")
        p.add_argument("--nodes", type=int, metavar="N")
        p.add_argument("--trunc", type=int, metavar="M")
        p.add_argument("--report", choices=["text", "json"], default="text")

    data_flags(sub.add_parser("index", help="compute the invariant index"))
    data_flags(sub.add_parser("nclass", help="renormalized class per component"), engine=False)
    st = sub.add_parser("selftest", help="run the acceptance checks")
    st.add_argument("--filter", metavar="PATTERN")
    sub.add_parser("list", help="list built-in datasets")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "index":
            return cmd_index(_config(args))
        if args.command == "nclass":
            return cmd_nclass(_config(args))
        if args.command == "selftest":
            return cmd_selftest(args.filter)
        return cmd_list()
    except (UsageError, DatasetError, ChamberError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
