"""Command-line front end: ``polyspace <subcommand> [flags]``.

Subcommands
    exact        short-subset profile, Betti numbers, Poincare polynomial
    mc           permutation Monte Carlo profile, or mean Betti/Poincare values
    tau-stats    stopping-time summary for a fixed vector or a random model
    verify       run an experiment config, write ``<output>.json`` and ``.csv``
    calpha       critical-regime constant C(alpha)
    equilateral  closed forms for equal side lengths (odd n)

Lengths are given inline (``--lengths 1,1,1,2``) or read from a file
(``--lengths @path``, separators: commas or whitespace).  All-integer input
is EXACT, input with decimal points is FLOAT, and a mix is rejected.

Exit status: 0 on success; 1 when ``verify`` ran but a check failed; otherwise
the code of the error (PARSE_ERROR 2, CONFIG_INVALID 3, IO_ERROR 4,
CAP_EXCEEDED 5, NON_GENERIC 6, TOLERANCE_AMBIGUOUS 7, EVEN_N 8,
T_NONPOSITIVE 9, DIVISION_REMAINDER 10).  Errors go to stderr only.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import exact as ex
from .asymptotics import compute_c_alpha, run_experiment
from .core import Kind, LengthVector, is_generic
from .diagnostics import ks_normal
from .errors import EXIT_CHECK_FAILED, IOFailure, ParseError, PolyspaceError
from .experiment import SCHEMA_VERSION, load_config
from .stochastic import (
    UNIFORM01,
    RandomModel,
    mc_mean_betti,
    mc_mean_poincare,
    mc_short_profile,
    permutation_taus,
    poincare_normalizer,
    tau_samples,
)


def parse_lengths(text: str) -> LengthVector:
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text(encoding="utf-8")
        except OSError as exc:
            raise IOFailure(f"cannot read lengths file: {exc}") from None
    tokens = [t for t in text.replace(",", " ").split() if t]
    if not tokens:
        raise ParseError("no lengths given")
    decimal = ["." in t or "e" in t.lower() for t in tokens]
    try:
        if all(decimal):
            return LengthVector.floating([float(t) for t in tokens])
        if not any(decimal):
            return LengthVector.exact([int(t) for t in tokens])
    except ValueError as exc:
        raise ParseError(f"bad lengths: {exc}") from None
    raise ParseError("mixed integer and decimal lengths; use one arithmetic mode")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="polyspace", description="Polygon space invariants and limit laws.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def common(p, seed=False):
        p.add_argument("--json", action="store_true", help="print JSON instead of a table")
        p.add_argument("--csv", metavar="PATH", help="also write flat CSV rows to PATH")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("exact", help="exact invariants by enumeration")
    p.add_argument("--lengths")
    p.add_argument("--equilateral", type=int, metavar="N")
    p.add_argument("--kind", default="planar")
    p.add_argument("--cap", type=int)
    common(p)

    p = sub.add_parser("mc", help="Monte Carlo estimates")
    p.add_argument("--lengths")
    p.add_argument("--equilateral", type=int, metavar="N")
    p.add_argument("--model")
    p.add_argument("--kind", default="planar")
    p.add_argument("--perms", type=int, default=100_000)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--p", type=int, help="Betti degree index (2p for spatial)")
    common(p, seed=True)

    p = sub.add_parser("tau-stats", help="stopping-time statistics")
    p.add_argument("--lengths")
    p.add_argument("--model")
    p.add_argument("--n", type=int)
    p.add_argument("--perms", type=int, default=100_000)
    p.add_argument("--samples", type=int, default=10_000)
    common(p, seed=True)

    p = sub.add_parser("verify", help="run an experiment config")
    p.add_argument("--config", required=True)
    common(p)

    p = sub.add_parser("calpha", help="critical-regime constant C(alpha)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--model", default=UNIFORM01.spec())
    common(p)

    p = sub.add_parser("equilateral", help="closed forms for equal sides, odd n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", default="planar")
    common(p)
    return parser


def _one_source(args, allowed):
    given = [name for name in allowed if getattr(args, name, None) is not None]
    if len(given) != 1:
        flags = ", ".join("--" + a for a in allowed)
        raise ParseError(f"give exactly one input source among {flags}")
    return given[0]


def _lengths_from(args) -> LengthVector:
    if args.equilateral is not None:
        if args.equilateral < 3:
            raise ParseError("--equilateral needs n >= 3")
        return LengthVector.equilateral(args.equilateral)
    return parse_lengths(args.lengths)


def _counts(values):
    return [str(int(v)) for v in values]


class Report:
    """Accumulates result records, rendered as a table, JSON or CSV."""

    def __init__(self, command, args, seed=None):
        self.command = command
        self.invocation = {"command": command, "args": {
            k: v for k, v in sorted(vars(args).items())
            if k not in ("command", "json", "csv", "threads") and v is not None
        }}
        self.seed = seed
        self.results = []
        self.diagnostics = []
        self.passed = True

    def add(self, name, value, std_error=None, index=None):
        rec = {"name": name}
        if index is not None:
            rec["index"] = index
        rec["value"] = value
        if std_error is not None:
            rec["std_error"] = std_error
        self.results.append(rec)

    def diag(self, name, value):
        self.diagnostics.append({"name": name, "value": value})

    def payload(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "invocation": self.invocation,
            "seed": self.seed,
            "results": self.results,
            "diagnostics": self.diagnostics,
            "pass": self.passed,
        }

    def json(self):
        return json.dumps(self.payload(), indent=2)

    def table(self):
        out = io.StringIO()
        if self.seed is not None:
            out.write(f"seed: {self.seed}\n")
        for rec in self.results:
            label = rec["name"] if "index" not in rec else f"{rec['name']}[{rec['index']}]"
            value = rec["value"]
            if isinstance(value, list):
                value = "[" + ", ".join(str(v) for v in value) + "]"
            line = f"{label:<28} {value}"
            if "std_error" in rec:
                line += f" +/- {rec['std_error']:.6g}"
            out.write(line + "\n")
        for d in self.diagnostics:
            out.write(f"{'# ' + d['name']:<28} {d['value']}\n")
        return out.getvalue()

    def write_csv(self, path):
        try:
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["name", "index", "value", "std_error"])
                for rec in self.results:
                    values = rec["value"] if isinstance(rec["value"], list) else [rec["value"]]
                    for i, v in enumerate(values):
                        index = rec.get("index", i if len(values) > 1 or isinstance(rec["value"], list) else "")
                        writer.writerow([rec["name"], index, v, rec.get("std_error", "")])
        except OSError as exc:
            raise IOFailure(f"cannot write {path}: {exc}") from None


def cmd_exact(args) -> Report:
    _one_source(args, ("lengths", "equilateral"))
    ell = _lengths_from(args)
    kind = Kind.parse(args.kind)
    report = Report("exact", args)
    profile = ex.short_profile(ell, kind, cap=args.cap, threads=args.threads)
    report.add("kind", kind.value)
    report.add("mode", ell.mode.value)
    report.add("short_counts", _counts(profile.counts))
    report.add("median_counts", _counts(profile.median_counts))
    if kind is Kind.PLANAR:
        b = ex.planar_betti_from_profile(profile)
        poly = ex.planar_poincare_from_profile(profile)
        generic = is_generic(ell, cap=args.cap, threads=args.threads)
    else:
        b = ex.spatial_betti_from_profile(profile)
        poly = ex.spatial_poincare_from_profile(profile)
        generic = True
    report.add("betti", _counts(b.values))
    report.add("betti_degrees", b.degrees())
    report.add("poincare", _counts(poly.coefficients))
    report.add("total", str(poly.total()))
    report.add("generic", generic)
    return report


def cmd_mc(args) -> Report:
    source = _one_source(args, ("lengths", "equilateral", "model"))
    kind = Kind.parse(args.kind)
    report = Report("mc", args, seed=args.seed)
    if source != "model":
        ell = _lengths_from(args)
        estimates = mc_short_profile(ell, kind, args.perms, args.seed, threads=args.threads)
        for p, est in enumerate(estimates):
            report.add("a", est.value, est.std_error, index=p)
        report.diag("perms", args.perms)
        return report
    model = RandomModel.parse(args.model)
    if args.n is None or args.n < 3:
        raise ParseError("--model needs --n >= 3")
    if (args.t is None) == (args.p is None):
        raise ParseError("--model needs exactly one of --t (mean Poincare) or --p (mean Betti)")
    if args.t is not None:
        est = mc_mean_poincare(model, args.n, args.t, args.samples, args.seed, kind=kind, threads=args.threads)
        report.add("normalized_mean_poincare", est.value, est.std_error)
        report.diag("normalizer", poincare_normalizer(kind, args.n, args.t))
    else:
        est = mc_mean_betti(model, args.n, args.p, args.samples, args.seed, kind=kind, threads=args.threads)
        report.add("mean_betti", est.value, est.std_error, index=args.p)
    report.diag("samples", args.samples)
    return report


def cmd_tau_stats(args) -> Report:
    source = _one_source(args, ("lengths", "model"))
    report = Report("tau-stats", args, seed=args.seed)
    if source == "lengths":
        ell = parse_lengths(args.lengths)
        taus = permutation_taus(ell, args.perms, args.seed, threads=args.threads)
        hist = np.bincount(taus, minlength=ell.n)
        report.add("histogram", _counts(hist))
        report.add("mean", float(taus.mean()))
        return report
    if args.n is None or args.n < 3:
        raise ParseError("--model needs --n >= 3")
    model = RandomModel.parse(args.model)
    n = args.n
    report.diag("sigma_tau_sq", model.sigma_tau ** 2)
    for use_tilde, label in ((False, "tau"), (True, "tau_tilde")):
        taus = tau_samples(model, n, args.samples, args.seed, use_tilde=use_tilde, threads=args.threads)
        x = (taus - n / 2) / np.sqrt(n)
        report.add(f"{label}_mean", float(taus.mean()))
        report.add(f"{label}_normalized_var", float(x.var(ddof=1)))
        report.add(f"{label}_ks_normal", ks_normal(x, model.sigma_tau))
    return report


def cmd_verify(args) -> Report:
    config = load_config(args.config)
    if args.threads and config.threads == 1:
        config = config.with_overrides(threads=args.threads)
    output = config.output or str(Path(args.config).with_suffix(""))
    result = run_experiment(config)
    json_path, csv_path = result.write(output)
    report = Report("verify", args, seed=config.seed)
    report.invocation["config"] = config.snapshot()
    for row in result.rows:
        report.add(row["statistic"], row["value"], row["std_error"], index=row["n"])
    report.diagnostics = [dict(d) for d in result.diagnostics]
    for c in result.checks:
        report.diag(f"check {c.name}", f"{c.value:.6g} {c.relation} {c.threshold:g}: "
                    + ("PASS" if c.passed else "FAIL"))
    report.diag("written", [str(json_path), str(csv_path)])
    report.passed = result.passed
    return report


def cmd_calpha(args) -> Report:
    model = RandomModel.parse(args.model)
    report = Report("calpha", args)
    report.add("c_alpha", compute_c_alpha(args.alpha, model))
    return report


def cmd_equilateral(args) -> Report:
    kind = Kind.parse(args.kind)
    report = Report("equilateral", args)
    if kind is Kind.PLANAR:
        form = ex.equilateral_planar(args.n)
        report.add("betti", _counts(form.betti.values))
        report.add("total", str(form.total))
    else:
        form = ex.equilateral_spatial(args.n)
        report.add("betti", _counts(form.betti.values))
        report.add("betti_total", str(form.total))
        report.add("closed_form_total", str(ex.equilateral_spatial_total(args.n)))
    report.add("betti_degrees", form.betti.degrees())
    return report


COMMANDS = {
    "exact": cmd_exact,
    "mc": cmd_mc,
    "tau-stats": cmd_tau_stats,
    "verify": cmd_verify,
    "calpha": cmd_calpha,
    "equilateral": cmd_equilateral,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        report = COMMANDS[args.command](args)
        if args.csv:
            report.write_csv(args.csv)
    except PolyspaceError as exc:
        stderr.write(f"error: {exc.code}: {exc}\n")
        return exc.exit_code
    except ValueError as exc:
        stderr.write(f"error: PARSE_ERROR: {exc}\n")
        return ParseError.exit_code
    stdout.write(report.json() + "\n" if args.json else report.table())
    return 0 if report.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
