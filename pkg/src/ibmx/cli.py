"""Command-line front end: ``ibmx limits | survival | fit | verify | rerun``.

Exit codes: 0 success, 2 configuration or input error, 3 numerical non-convergence,
4 expectation or check failure. Option values resolve as command-line flags, then a
``--config`` file of ``key = value`` lines (``#`` starts a comment), then built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, interval
from .analysis import FitError, QuadratureError, TailFunction, fit_tail, log_quadrature_ibm, run_check
from .domains import IntervalDomain, parse_domain
from .limits import (
    AmpVariant,
    LimitReport,
    ParabolaSpec,
    TailLaw,
    TwistedSpec,
    brownian_parabola_tail,
    integrability_threshold,
    iterated_bracket,
    iterated_limit,
    iterated_parabola_limit,
    iterated_twisted_limit,
    twisted_tail,
)
from .montecarlo import SimConfig, ibm_survival_conditional, ibm_survival_direct, survival_curve_bm
from .specfun import BesselZeroError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_EXPECT = 4

CSV_HEADER = ["t", "estimate", "stderr", "n"]
MODES = ("interval-exact", "ibm-quadrature", "bm-mc", "ibm-mc-conditional", "ibm-mc-direct")
MC_MODES = ("bm-mc", "ibm-mc-conditional", "ibm-mc-direct")
THRESHOLD_NOTE = "integrability threshold b*: finite below, infinite above; critical case b = b* undetermined"


class ConfigError(ValueError):
    """Bad flags, config file or input file (exit code 2)."""


# ---------------------------------------------------------------- parsing helpers


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def parse_grid(text) -> list[float]:
    """``1,5,10`` or ``lo..hi:log:n`` / ``lo..hi:lin:n``."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    s = str(text).strip()
    if ".." not in s:
        return parse_floats(s)
    try:
        span, kind, count = s.split(":")
        lo, hi = (float(v) for v in span.split(".."))
        n = int(count)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must look like lo..hi:log:n, got {text!r}") from exc
    if n < 1 or not lo < hi or (n == 1 and lo != hi):
        if n == 1:
            return [lo]
        raise argparse.ArgumentTypeError(f"grid needs lo < hi and n >= 1, got {text!r}")
    if kind == "log":
        if lo <= 0:
            raise argparse.ArgumentTypeError("log grid needs lo > 0")
        return [float(v) for v in np.geomspace(lo, hi, n)]
    if kind == "lin":
        return [float(v) for v in np.linspace(lo, hi, n)]
    raise argparse.ArgumentTypeError(f"grid spacing must be 'log' or 'lin', got {kind!r}")


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` comments; keys use the flag names (``-`` or ``_``)."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _fmt(x) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- parser


def _add_common_output(p):
    p.add_argument("--out", default=None, help="output file (default: stdout, no manifest)")
    p.add_argument("--json", action="store_true", help="JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ibmx", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"ibmx {__version__}")
    parser.add_argument("--config", default=None, help="key = value config file")
    parser.add_argument("--dry-run", action="store_true", help="print the resolved config and stop")
    sub = parser.add_subparsers(dest="command", required=True)

    lim = sub.add_parser("limits", allow_abbrev=False, help="closed-form tail constants")
    lim_sub = lim.add_subparsers(dest="kind", required=True)
    par = lim_sub.add_parser("parabola", allow_abbrev=False, help="parabola-shaped domain")
    par.add_argument("--alpha", type=float, required=False)
    par.add_argument("--amp", type=float, default=1.0)
    par.add_argument("--dim", type=int, default=2)
    par.add_argument("--variant", choices=[v.value for v in AmpVariant], default=AmpVariant.AS_PRINTED.value)
    par.add_argument("--iterated", action="store_true", help="iterated Brownian motion limit")
    par.add_argument("--threshold", action="store_true", help="exponential-moment integrability threshold")
    tw = lim_sub.add_parser("twisted", allow_abbrev=False, help="twisted domain")
    tw.add_argument("--p", type=float, required=False)
    tw.add_argument("--gamma", type=float, default=1.0)
    tw.add_argument("--iterated", action="store_true")
    mp = lim_sub.add_parser("map", allow_abbrev=False, help="iterated limit of a Brownian tail law (beta, c)")
    br = lim_sub.add_parser("bracket", allow_abbrev=False, help="liminf/limsup bracket for beta > 1")
    for p in (mp, br):
        p.add_argument("--beta", type=float, required=False)
        p.add_argument("--c", type=float, required=False)
    for p in (par, tw, mp, br):
        p.add_argument("--json", action="store_true")
    lim.set_defaults(handler=cmd_limits)

    sv = sub.add_parser("survival", allow_abbrev=False, help="survival curves P[tau > t]")
    sv.add_argument("--mode", choices=MODES, default="interval-exact")
    sv.add_argument("--domain", default=None, help="interval:a,b | ball:r[,c..] | parabola:alpha[,amp[,dim]] | "
                                                   "twisted:p[,gamma[,r1]]")
    sv.add_argument("--curve-file", default=None, help="tabulated generating curve for twisted domains")
    sv.add_argument("--z", type=parse_floats, default=None, help="start point, comma-separated")
    sv.add_argument("--u", type=float, default=None, help="interval-exact: distance to the left end")
    sv.add_argument("--v", type=float, default=None, help="interval-exact: distance to the right end")
    sv.add_argument("--t", type=parse_grid, default=None, help="times: 1,5,10 or lo..hi:log:n")
    sv.add_argument("--samples", type=int, default=10_000)
    sv.add_argument("--seed", type=int, default=0)
    sv.add_argument("--step", type=float, default=1e-3)
    sv.add_argument("--horizon", type=float, default=None,
                    help="path horizon (bm-mc default: max t; IBM modes default 1e4)")
    sv.add_argument("--streams", type=int, default=1)
    sv.add_argument("--bridge", type=parse_bool, default=True, help="Brownian-bridge crossing correction")
    sv.add_argument("--adaptive", type=parse_bool, default=False)
    sv.add_argument("--min-fraction", type=float, default=1e-2)
    sv.add_argument("--inner-step", type=float, default=None, help="ibm-mc-direct inner Euler step")
    sv.add_argument("--rtol", type=float, default=1e-8, help="ibm-quadrature refinement tolerance")
    sv.add_argument("--out", default=None, help="CSV path (default: stdout, no manifest)")
    sv.set_defaults(handler=cmd_survival)

    ft = sub.add_parser("fit", allow_abbrev=False, help="fit -log p = c t**beta to a survival CSV")
    ft.add_argument("input", nargs="?", default=None, help="CSV with header t,estimate,stderr,n")
    ft.add_argument("--t-lo", type=float, default=None)
    ft.add_argument("--t-hi", type=float, default=None)
    ft.add_argument("--expect", type=parse_floats, default=None, help="exponent,constant")
    ft.add_argument("--rtol", type=float, default=0.1)
    _add_common_output(ft)
    ft.set_defaults(handler=cmd_fit)

    vf = sub.add_parser("verify", allow_abbrev=False, help="named numerical checks")
    vf.add_argument("check", nargs="?", default=None)
    vf.add_argument("--beta", type=float, default=None)
    vf.add_argument("--c", type=float, default=None)
    vf.add_argument("--samples", type=int, default=None)
    vf.add_argument("--seed", type=int, default=None)
    vf.add_argument("--tol", type=float, default=None)
    vf.add_argument("--details", action="store_true", help="include per-point details in the JSON")
    vf.add_argument("--out", default=None, help="JSON path (default: stdout, no manifest)")
    vf.set_defaults(handler=cmd_verify)

    rr = sub.add_parser("rerun", allow_abbrev=False, help="repeat a survival run from its manifest")
    rr.add_argument("manifest")
    rr.add_argument("--out", default=None, help="new CSV path (default: the recorded one)")
    rr.set_defaults(handler=cmd_rerun)
    return parser


def _leaf_parser(parser, argv):
    """The subparser that will handle ``argv`` (so config values land on it)."""
    node = parser
    rest = list(argv)
    while True:
        subs = [a for a in node._actions if isinstance(a, argparse._SubParsersAction)]
        if not subs:
            return node
        choices = subs[0].choices
        pick = next((i for i, a in enumerate(rest) if a in choices), None)
        if pick is None:
            return node
        node = choices[rest[pick]]
        rest = rest[pick + 1:]


def resolve_args(argv) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config:
        values = read_config(known.config)
        leaf = _leaf_parser(parser, argv)
        dests = {a.dest: a for a in leaf._actions}
        unknown = sorted(k for k in values if k not in dests or k in ("help", "handler"))
        if unknown:
            raise ConfigError(f"unknown config keys for this command: {', '.join(unknown)}")
        conv = {}
        for key, raw in values.items():
            act = dests[key]
            try:
                if isinstance(act, argparse._StoreTrueAction):
                    conv[key] = parse_bool(raw)
                elif act.type is not None:
                    conv[key] = act.type(raw)
                else:
                    conv[key] = raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise ConfigError(f"config key {key}: {exc}") from exc
            if act.choices is not None and conv[key] not in act.choices:
                raise ConfigError(f"config key {key}: {raw!r} not in {sorted(act.choices)}")
        leaf.set_defaults(**conv)
    return parser.parse_args(argv)  # argparse exits with code 2 on bad flags


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _snapshot(args) -> dict:
    snap = {}
    for k, v in sorted(vars(args).items()):
        if k == "handler":
            continue
        snap[k] = v
    return snap


def _now():
    return datetime.now(timezone.utc).isoformat()


def write_manifest(path, argv, snapshot, seed, started, artifacts) -> Path:
    manifest = {
        "command": " ".join(["ibmx", *argv]),
        "argv": list(argv),
        "config_snapshot": snapshot,
        "seed": seed,
        "started": started,
        "finished": _now(),
        "artifact_paths": [str(p) for p in artifacts],
        "code_version": __version__,
    }
    side = Path(str(path) + ".manifest.json")
    side.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return side


def _emit(text, out):
    """Write ``text`` to ``out`` atomically (or to stdout)."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------- limits


def _print_report(rep: LimitReport, as_json, label=None):
    if as_json:
        print(json.dumps(rep.to_json(), indent=2))
        return
    print(f"formula_id: {rep.formula_id}")
    if label:
        print(f"label:      {label}")
    print(f"exponent:   {rep.exponent!r}")
    print(f"constant:   {rep.constant!r}")
    print(f"variant:    {'-' if rep.variant is None else rep.variant.value}")
    for note in rep.notes:
        print(f"note:       {note}")


def _tail_report(law: TailLaw, formula_id, variant=None, notes=()):
    return LimitReport(exponent=law.beta, constant=law.c, formula_id=formula_id, variant=variant, notes=tuple(notes))


def cmd_limits(args, argv):
    if args.dry_run:
        return _dry(args)
    if args.kind == "parabola":
        _require(args, "alpha")
        spec = ParabolaSpec(args.alpha, args.amp, args.dim)
        variant = AmpVariant(args.variant)
        if args.threshold:
            base = iterated_parabola_limit(spec, variant)
            rep = LimitReport(exponent=base.exponent, constant=integrability_threshold(spec, variant),
                              formula_id="ibm-parabola-threshold", variant=variant, notes=(THRESHOLD_NOTE,))
            label = "integrability threshold"
        elif args.iterated:
            rep, label = iterated_parabola_limit(spec, variant), None
        else:
            rep, label = _tail_report(brownian_parabola_tail(spec, variant), "bm-parabola", variant), None
    elif args.kind == "twisted":
        _require(args, "p")
        spec = TwistedSpec(args.p, args.gamma)
        rep = iterated_twisted_limit(spec) if args.iterated else _tail_report(twisted_tail(spec), "bm-twisted")
        label = None
    else:
        _require(args, "beta", "c")
        law = TailLaw(args.beta, args.c)
        label = None
        if args.kind == "map" and law.beta <= 1:
            rep = iterated_limit(law)
        else:
            lower, upper = iterated_bracket(law)
            note = (f"beta > 1: liminf t^(-e) log P >= -{lower!r}, limsup <= -{upper!r}; "
                    "constant reports the lower-bound magnitude")
            rep = LimitReport(exponent=law.beta / (2.0 + law.beta), constant=lower, formula_id="ibm-bracket",
                              notes=(note, f"upper_mag={upper!r}"))
    _print_report(rep, args.json, label)
    return EXIT_OK


# ---------------------------------------------------------------- survival


def _interval_uv(args):
    if args.u is not None or args.v is not None:
        _require(args, "u", "v")
        return args.u, args.v
    _require(args, "domain", "z")
    dom = parse_domain(args.domain)
    if not isinstance(dom, IntervalDomain):
        raise ConfigError(f"mode {args.mode} needs an interval domain or --u/--v")
    if len(args.z) != 1:
        raise ConfigError("interval start point --z must be a single number")
    z = args.z[0]
    if not dom.a < z < dom.b:
        raise ConfigError(f"start point {z} is not inside {args.domain}")
    return z - dom.a, dom.b - z


def _sim_config(args, horizon):
    return SimConfig(step=args.step, horizon=horizon, samples=args.samples, seed=args.seed, streams=args.streams,
                     bridge_correction=args.bridge, adaptive=args.adaptive, min_fraction=args.min_fraction)


def _check_survival_args(args):
    _require(args, "t")
    ts = np.asarray(args.t, dtype=float)
    if ts.size == 0 or np.any(~np.isfinite(ts)) or np.any(ts < 0) or np.any(np.diff(ts) <= 0):
        raise ConfigError("--t must be nonnegative, finite and strictly increasing")
    if args.mode in MC_MODES:
        _require(args, "domain", "z")
        if args.samples < 1 or args.streams < 1:
            raise ConfigError("--samples and --streams must be positive")
        if args.mode == "bm-mc" and args.horizon is not None and args.horizon < ts[-1]:
            raise ConfigError(f"--horizon {args.horizon} is below the largest time {ts[-1]}")
    return ts


def compute_survival(args):
    """Rows ``(t, estimate, stderr | None, n | None)`` and a metadata dict."""
    ts = _check_survival_args(args)
    if args.mode == "interval-exact":
        u, v = _interval_uv(args)
        vals = np.atleast_1d(interval.survival_uv(u, v, ts))
        return [(t, p, None, None) for t, p in zip(ts, vals)], {"u": u, "v": v}
    if args.mode == "ibm-quadrature":
        u, v = _interval_uv(args)
        tail = TailFunction.interval_exit(u, v)
        vals = [math.exp(log_quadrature_ibm(tail, float(t), rtol=args.rtol)) for t in ts]
        return [(t, p, None, None) for t, p in zip(ts, vals)], {"u": u, "v": v}
    dom = parse_domain(args.domain, args.curve_file)
    z = tuple(args.z)
    if args.mode == "bm-mc":
        curve = survival_curve_bm(dom, z, ts, _sim_config(args, ts[-1] if args.horizon is None else args.horizon))
    elif args.mode == "ibm-mc-conditional":
        curve = ibm_survival_conditional(dom, z, ts, _sim_config(args, args.horizon or 1e4))
    else:
        curve = ibm_survival_direct(dom, z, ts, _sim_config(args, args.horizon or 1e4), inner_step=args.inner_step)
    return [(t, p, s, n) for t, p, s, n in curve.rows()], curve.metadata


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for t, p, s, n in rows:
        w.writerow([_fmt(t), _fmt(p), "" if s is None else _fmt(s), "" if n is None else str(int(n))])
    return buf.getvalue()


def _dry(args):
    print(json.dumps(_snapshot(args), indent=2, sort_keys=True, default=str))
    return EXIT_OK


def cmd_survival(args, argv):
    if args.dry_run:
        _check_survival_args(args)
        return _dry(args)
    started = _now()
    rows, meta = compute_survival(args)
    _emit(format_csv(rows), args.out)
    if args.out is not None:
        snap = _snapshot(args)
        snap["result_metadata"] = meta
        write_manifest(args.out, argv, snap, args.seed if args.mode in MC_MODES else None, started, [args.out])
    return EXIT_OK


def cmd_rerun(args, argv):
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        snap = dict(manifest["config_snapshot"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read manifest {args.manifest}: {exc}") from exc
    if snap.get("command") != "survival":
        raise ConfigError("only survival manifests can be rerun")
    snap.pop("result_metadata", None)
    out = args.out if args.out is not None else snap.get("out")
    snap.update(out=out, dry_run=args.dry_run)
    ns = argparse.Namespace(**snap)
    new_argv = ["rerun", args.manifest] + ([] if args.out is None else ["--out", args.out])
    return cmd_survival(ns, new_argv)


# ---------------------------------------------------------------- fit


def read_curve_csv(path):
    """Parse a canonical survival CSV; returns (t, p, stderr or None)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise ConfigError(f"{path}:1: header must be exactly {','.join(CSV_HEADER)}")
    t, p, se = [], [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise ConfigError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        try:
            t.append(float(row[0]))
            p.append(float(row[1]))
            se.append(float(row[2]) if row[2].strip() else None)
            if row[3].strip():
                int(row[3])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
        if not (math.isfinite(t[-1]) and math.isfinite(p[-1])):
            raise ConfigError(f"{path}:{lineno}: t and estimate must be finite")
    if not t:
        raise ConfigError(f"{path}: no data rows")
    have = [s is not None for s in se]
    if any(have) and not all(have):
        raise ConfigError(f"{path}: stderr must be given on every row or on none")
    return np.array(t), np.array(p), (np.array(se, dtype=float) if all(have) else None)


def cmd_fit(args, argv):
    _require(args, "input")
    if args.expect is not None and len(args.expect) != 2:
        raise ConfigError("--expect takes exponent,constant")
    t, p, se = read_curve_csv(args.input)
    if args.dry_run:
        return _dry(args)
    started = _now()
    window = None
    if args.t_lo is not None or args.t_hi is not None:
        window = (-math.inf if args.t_lo is None else args.t_lo, math.inf if args.t_hi is None else args.t_hi)
    if np.any(np.diff(t) <= 0):
        raise ConfigError(f"{args.input}: t must be strictly increasing")
    res = fit_tail(t, p, stderr=se, window=window)
    report = res.to_json()
    status = EXIT_OK
    if args.expect is not None:
        e, c = args.expect
        d_e = abs(res.beta_hat - e) / abs(e) if e else abs(res.beta_hat)
        d_c = abs(res.c_hat - c) / abs(c) if c else abs(res.c_hat)
        ok = d_e <= args.rtol and d_c <= args.rtol
        report["expect"] = {"exponent": e, "constant": c, "rtol": args.rtol, "exponent_rel": d_e,
                            "constant_rel": d_c, "passed": ok}
        status = EXIT_OK if ok else EXIT_EXPECT
    if args.json or args.out is not None:
        text = json.dumps(report, indent=2) + "\n"
    else:
        text = (f"beta_hat:  {res.beta_hat!r} (se {res.beta_se:.3g})\n"
                f"c_hat:     {res.c_hat!r}\n"
                f"window:    [{res.window[0]!r}, {res.window[1]!r}] ({res.n_points} points)\n"
                f"r_squared: {res.r_squared!r}\n")
        if "expect" in report:
            x = report["expect"]
            text += (f"expect:    exponent {x['exponent']} constant {x['constant']} rtol {x['rtol']} -> "
                     f"{'PASS' if x['passed'] else 'FAIL'}\n")
    _emit(text, args.out)
    if args.out is not None:
        write_manifest(args.out, argv, _snapshot(args), None, started, [args.out])
    return status


# ---------------------------------------------------------------- verify

_VERIFY_KWARGS = {
    "sum-tail": {"beta": "beta", "c": "c", "samples": "samples", "seed": "seed", "tol": "tol"},
    "lemma23": {"beta": "beta", "c": "c", "tol": "tol"},
    "lemma24": {"beta": "beta", "c": "acoef", "tol": "tol"},
    "lemma44": {"tol": "tol"},
    "mixed-partial-fd": {"tol": "tol"},
    "series-crossover": {"tol": "tol"},
    "mixed-partial-positive": {"samples": "n", "seed": "seed"},
}


def cmd_verify(args, argv):
    _require(args, "check")
    if args.check not in _VERIFY_KWARGS:
        raise ConfigError(f"unknown check {args.check!r}; choose from {', '.join(_VERIFY_KWARGS)}")
    accepted = _VERIFY_KWARGS[args.check]
    kwargs = {}
    for flag in ("beta", "c", "samples", "seed", "tol"):
        val = getattr(args, flag)
        if val is None:
            continue
        if flag not in accepted:
            raise ConfigError(f"check {args.check} does not take --{flag}")
        kwargs[accepted[flag]] = val
    if args.dry_run:
        return _dry(args)
    started = _now()
    res = run_check(args.check, **kwargs)
    report = res.to_json()
    if not args.details:
        report.pop("details", None)
    _emit(json.dumps(report, indent=2, default=float) + "\n", args.out)
    if args.out is not None:
        write_manifest(args.out, argv, _snapshot(args), kwargs.get("seed"), started, [args.out])
    return EXIT_OK if res.passed else EXIT_EXPECT


# ---------------------------------------------------------------- entry point


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = resolve_args(argv)
        return args.handler(args, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigError, FitError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"ibmx: error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, BesselZeroError) as exc:
        print(f"ibmx: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
