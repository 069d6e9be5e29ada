"""weblin command line: web invariants, rigidity and linearizability reports."""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import mpmath
from mpmath import mpf

from . import exprlang as el
from . import obstruction as ob
from . import webcalc as wc
from .jets import jet_lift, jet_partial
from .mpnum import PolyError, precision, to_big

EXIT_OK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 2, 3, 4
SCHEMA_VERSION = 1


class UsageError(ValueError):
    pass


# -- argument parsing --------------------------------------------------------

def parse_number(text):
    """Exact rational from "3/7", "-0.25" or "1e-3"."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def parse_point(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"point must be X,Y: {text!r}")
    return tuple(parse_number(p) for p in parts)


def parse_axis(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid axis must be lo:hi:n: {text!r}")
    lo, hi = parse_number(parts[0]), parse_number(parts[1])
    try:
        n = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"grid count must be an integer: {parts[2]!r}") from exc
    if n < 1:
        raise UsageError("grid count must be >= 1")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def parse_grid(text):
    axes = text.split(",")
    if len(axes) != 2:
        raise UsageError(f"grid must be x0:x1:n,y0:y1:m: {text!r}")
    xs, ys = parse_axis(axes[0]), parse_axis(axes[1])
    return [(x, y) for x in xs for y in ys]


def points_from(args):
    pts = []
    if getattr(args, "point", None):
        for p in args.point:
            pts.append(parse_point(p))
    if getattr(args, "grid", None):
        pts.extend(parse_grid(args.grid))
    if not pts:
        raise UsageError("give --point or --grid")
    return pts


def check_config(args):
    if not 64 <= args.precision <= 4096:
        raise UsageError("--precision must be in [64, 4096]")
    if not 8 <= args.jet_order <= 16:
        raise UsageError("--jet-order must be in [8, 16]")


# -- JSON encoding -------------------------------------------------------------

DOUBLE_MAX = mpf("1e300")
DOUBLE_MIN = mpf("1e-300")


def encode(v):
    """Deterministic JSON-ready form of mpf/mpc/Fraction values."""
    if isinstance(v, mpmath.mpc):
        return {"re": encode(v.real), "im": encode(v.imag)}
    if isinstance(v, mpf):
        if v == 0 or DOUBLE_MIN <= abs(v) <= DOUBLE_MAX:
            return float(v)
        if mpmath.isinf(v) or mpmath.isnan(v):
            return str(v)
        e = int(mpmath.floor(mpmath.log10(abs(v))))
        m = v / mpf(10) ** e
        if abs(m) >= 10:
            m, e = m / 10, e + 1
        return {"mantissa": mpmath.nstr(m, 17, min_fixed=-1, max_fixed=2), "exp10": e}
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode(x) for x in v]
    return v


def dumps(payload):
    return json.dumps(encode(payload), indent=2, sort_keys=True)


# -- per-point work ------------------------------------------------------------------

def frame_summary(frame):
    return {
        "f": frame.f.value, "fx": frame.fx.value, "fy": frame.fy.value,
        "H": frame.H.value, "K": frame.K.value,
        "fx_nonzero": frame.fx_nonzero, "fy_nonzero": frame.fy_nonzero,
        "K_nonzero": frame.K_nonzero, "K_positive": frame.K_positive,
    }


def rigidity_summary(r: wc.RigidityReport):
    return {
        "a1": r.a1, "a2": r.a2, "a1a2": r.a1 * r.a2,
        "normalization_residual": r.normalization_residual,
        "jacobian_xy": r.jacobian_xy, "J": r.J,
        "functionally_dependent": r.functionally_dependent,
        "relation_residuals": list(r.relation_residuals),
        "classification": r.classification, "threshold": r.threshold,
    }


def verdict_summary(r: ob.LinearizabilityReport):
    return {
        "verdict": r.verdict, "reason": r.reason,
        "roots": r.roots, "root_count": r.root_count, "bound": r.bound,
        "gcd": r.gcd, "gcd_degree": r.gcd_degree,
        "degrees": r.degrees, "weights": r.weights,
        "L_degree": r.L_degree, "S_degree": r.S_degree,
        "leading": {n: c[-1] for n, c in r.Q.items()},
        "Q": r.Q,
        "resultants": {k: {"value": v, "relative": rel} for k, (v, rel) in r.resultants.items()},
        "invariant_count": len(r.invariants),
        "invariants_max_relative": r.invariants_relative,
        "precision_trail": r.precision_trail,
        "tolerances": r.tolerances,
    }


def _failure(exc):
    if isinstance(exc, (el.LexError, el.ParseError, el.ArityError)):
        code = EXIT_PARSE
    elif isinstance(exc, (wc.DegenerateWeb, ob.Parallelizable)):
        code = EXIT_DEGENERATE
    else:
        code = EXIT_NUMERIC
    return {"error": type(exc).__name__, "message": str(exc)}, code


NUMERIC_ERRORS = (ArithmeticError, el.EvalDomainError, PolyError, ValueError)


def run_point(task):
    """One point of one subcommand; returns (result dict, exit code)."""
    cmd, src, point, cfg = task
    t0 = time.perf_counter()
    with precision(cfg["precision"]):
        try:
            f = el.parse(src)
            res, code = _COMMANDS[cmd](f, point, cfg)
        except NUMERIC_ERRORS as exc:
            res, code = _failure(exc)
    res = {"point": [str(point[0]), str(point[1])], **res}
    if cfg.get("timing"):
        res["seconds"] = round(time.perf_counter() - t0, 3)
    return res, code


def do_linearizability(f, point, cfg):
    r = ob.linearizability_verdict(f, point, cfg["precision"], cfg["jet_order"], cfg["tol"],
                                   cfg["invariants"], escalate=True)
    code = EXIT_NUMERIC if r.verdict == "Indeterminate" else EXIT_OK
    return {"linearizability": verdict_summary(r)}, code


def do_analyze(f, point, cfg):
    frame = wc.web_frame(f, point, cfg["jet_order"])
    out = {"frame": frame_summary(frame)}
    if not frame.K_nonzero:
        raise ob.Parallelizable("K vanishes at the point: the web is parallelizable")
    kd = wc.k_table(frame, 6)
    out["K_table"] = {"K" + w: v.value for w, v in kd.items()}
    if frame.K_positive:
        out["rigidity"] = rigidity_summary(wc.rigidity_report(f, point, cfg["jet_order"]))
    else:
        out["rigidity"] = {"skipped": "K is negative at the point"}
    lin, code = do_linearizability(f, point, cfg)
    out.update(lin)
    return out, code


def do_rigidity(f, point, cfg):
    r = wc.rigidity_report(f, point, cfg["jet_order"])
    return {"rigidity": rigidity_summary(r)}, EXIT_OK


def do_linear_check(f, point, cfg):
    j = jet_lift(f, point, 2)
    fx, fy = jet_partial(j, "x"), jet_partial(j, "y")
    second = [abs(jet_partial(fx, "x").value), abs(jet_partial(fx, "y").value),
              abs(jet_partial(fy, "y").value)]
    res = wc.linearity_residual_jet(j).value
    scale = (fx.value ** 2 + fy.value ** 2) * max(second + [mpf(1)])
    return {"residual": res, "normalized": abs(res) / scale}, EXIT_OK


_COMMANDS = {
    "linearizability": do_linearizability,
    "analyze": do_analyze,
    "rigidity": do_rigidity,
    "linear-check": do_linear_check,
}


def run_grid(cmd, args, cfg):
    pts = points_from(args)
    tasks = [(cmd, args.f, p, cfg) for p in pts]
    if args.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(run_point, tasks))
    else:
        results = [run_point(t) for t in tasks]
    return [r for r, _ in results], max(c for _, c in results)


# -- text output ------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, mpf):
        return mpmath.nstr(v, 12)
    return str(v)


def text_lines(cmd, results, summary):
    lines = []
    for r in results:
        head = f"point ({r['point'][0]}, {r['point'][1]})"
        if "error" in r:
            lines.append(f"{head}: {r['error']}: {r['message']}")
            continue
        if "linearizability" in r:
            v = r["linearizability"]
            roots = ", ".join(_fmt(x) for x in v["roots"]) or "none"
            lines.append(f"{head}: {v['verdict']}; gcd degree {v['gcd_degree']}; roots {roots}")
            for n in ob.Q_NAMES:
                lines.append(f"  {n}: degree {v['degrees'][n]}, leading {_fmt(v['leading'][n])}")
            for k, d in v["resultants"].items():
                lines.append(f"  R({k}) = {_fmt(d['value'])} (relative {_fmt(d['relative'])})")
        if "rigidity" in r and "a1" in r["rigidity"]:
            g = r["rigidity"]
            lines.append(f"{head}: {g['classification']}; a1 = {_fmt(g['a1'])}, a2 = {_fmt(g['a2'])}, "
                         f"a1*a2 = {_fmt(g['a1a2'])}, J = {_fmt(g['J'])}")
        if "residual" in r:
            lines.append(f"{head}: residual {_fmt(r['residual'])} (normalized {_fmt(r['normalized'])})")
        if "frame" in r:
            fr = r["frame"]
            lines.append(f"{head}: H = {_fmt(fr['H'])}, K = {_fmt(fr['K'])}")
    for k, v in summary.items():
        lines.append(f"{k}: {_fmt(v)}")
    return lines


# -- commands ---------------------------------------------------------------------------

def config_of(args):
    check_config(args)
    tol = None if args.tol is None else to_big(parse_number(args.tol))
    return {
        "precision": args.precision, "jet_order": args.jet_order, "tol": tol,
        "invariants": getattr(args, "invariants", "none"), "timing": args.timing,
    }


def emit(args, payload, lines):
    if args.format == "json":
        text = dumps(payload)
    else:
        text = "\n".join(lines)
    if args.out:
        p = Path(args.out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(dumps(payload) + "\n", encoding="utf-8")
    print(text)


def header(args, cmd, cfg):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": cmd,
        "argv": list(getattr(args, "_argv", [])),
        "config": {k: v for k, v in cfg.items() if k != "timing"},
        "table_sha256": ob.load_table().sha256,
    }


def cmd_points(args, cmd):
    cfg = config_of(args)
    el.parse(args.f)  # report parse errors before any work
    results, code = run_grid(cmd, args, cfg)
    summary = {}
    if cmd == "linear-check":
        ok = [r["normalized"] for r in results if "normalized" in r]
        if ok:
            summary["max_normalized_residual"] = max(ok)
    payload = {**header(args, cmd, cfg), "results": results, "summary": summary}
    emit(args, payload, text_lines(cmd, results, summary))
    return code


def cmd_euler_web(args):
    cfg = config_of(args)
    w0 = el.parse(args.w0)
    F = el.parse(args.F) if args.F else None
    window = None
    if args.window:
        lo, hi = args.window.split(":")
        window = (parse_number(lo), parse_number(hi))
    results, code = [], EXIT_OK
    with precision(cfg["precision"]):
        for point in points_from(args):
            entry = {"point": [str(point[0]), str(point[1])]}
            try:
                value = wc.euler_web_eval(w0, F, point, args.branch, window)
                jet = wc.euler_web_jet(w0, F, point, 3, args.branch, window)
                fx, fy = jet_partial(jet, "x").value, jet_partial(jet, "y").value
                entry.update({
                    "f": value,
                    "linearity_residual": wc.linearity_residual_jet(jet).value,
                })
                if F is None:
                    entry["euler_residual"] = fx - jet.value * fy
            except wc.CausticAmbiguity as exc:
                entry.update({"error": "CausticAmbiguity", "message": str(exc),
                              "roots": [{"lambda": lam, "f": v} for lam, v in exc.roots]})
                code = max(code, EXIT_NUMERIC)
            except NUMERIC_ERRORS as exc:
                err, c = _failure(exc)
                entry.update(err)
                code = max(code, c)
            results.append(entry)
    payload = {**header(args, "euler-web", cfg), "results": results}
    lines = []
    for r in results:
        head = f"point ({r['point'][0]}, {r['point'][1]})"
        if "error" in r:
            lines.append(f"{head}: {r['error']}: {r['message']}")
            for rr in r.get("roots", []):
                lines.append(f"  lambda = {_fmt(rr['lambda'])}: f = {_fmt(rr['f'])}")
        else:
            lines.append(f"{head}: f = {_fmt(r['f'])}, linearity residual {_fmt(r['linearity_residual'])}")
    emit(args, payload, lines)
    return code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weblin",
        description="Differential invariants, rigidity and linearizability of planar 3-webs "
                    "given by a web function f(x, y).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_f=True):
        if needs_f:
            p.add_argument("--f", required=True, help="web function, e.g. \"x^2+x*y+y^2\"")
        p.add_argument("--point", action="append", help="X,Y (exact rationals allowed, e.g. 1/10,1)")
        p.add_argument("--grid", help="x0:x1:n,y0:y1:m")
        p.add_argument("--precision", type=int, default=256, help="working precision in bits")
        p.add_argument("--jet-order", type=int, default=12, help="Taylor order of the lifted web function")
        p.add_argument("--tol", help="relative zero tolerance (default 2^(-precision/2))")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="also write the JSON report here")
        p.add_argument("--workers", type=int, default=1, help="processes for grid points")
        p.add_argument("--timing", action="store_true", help="include wall-clock seconds (non-deterministic)")

    p = sub.add_parser("linearizability", help="obstruction polynomials and verdict")
    common(p)
    p.add_argument("--invariants", choices=("none", "order8", "full"), default="none")
    p = sub.add_parser("analyze", help="frame, K-derivatives, rigidity and linearizability")
    common(p)
    p.add_argument("--invariants", choices=("none", "order8", "full"), default="none")
    common(sub.add_parser("rigidity", help="a-invariants and automorphism diagnostics"))
    common(sub.add_parser("linear-check", help="linearity residual of the web function"))
    p = sub.add_parser("euler-web", help="web function of a linear web from Euler Cauchy data")
    common(p, needs_f=False)
    p.add_argument("--w0", required=True, help="Cauchy data w0, written in the variable y")
    p.add_argument("--F", help="function applied to w, written in the variable y (default identity)")
    p.add_argument("--branch", help="root choice when several exist: min, max or an index")
    p.add_argument("--window", help="lambda search window lo:hi")
    return parser


VALUE_OPTIONS = {"--f", "--point", "--grid", "--tol", "--w0", "--F", "--window", "--branch"}


def _glue_negative_values(argv):
    # argparse reads "-0.5:..." or "-2*sqrt(-y)" as an option; pass it as --opt=value
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(argv))
    args._argv = argv
    try:
        if args.command == "euler-web":
            return cmd_euler_web(args)
        return cmd_points(args, args.command)
    except UsageError as exc:
        print(f"weblin: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (el.LexError, el.ParseError, el.ArityError) as exc:
        print(f"weblin: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
