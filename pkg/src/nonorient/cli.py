"""Command line front door: ``nonorient <subcommand> [flags]``.

Every subcommand writes ``<subcommand>.csv`` (plot-ready table) and
``<subcommand>.json`` (report) to the output directory and prints the report.
Options may also come from a key=value file given with --config; flags on
the command line win. Exit codes: 0 success, 1 a built-in check failed,
2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import traceback
from fractions import Fraction
from pathlib import Path

from . import __version__

OUTPUT_ENV = "NONORIENT_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _params(items) -> dict[str, float]:
    out = {}
    for item in items or ():
        for part in str(item).split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise UsageError(f"model parameter {part!r} is not key=value")
            k, v = part.split("=", 1)
            out[k.strip()] = float(v)
    return out


# ---- parser ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; flags override its values")
    p.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or .)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonorient", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collar", help="collar self-intersection inequality on one (core, width)")
    p.add_argument("--core", type=float, help="core geodesic length (default 1)")
    p.add_argument("--width", type=float, help="collar width (default 0.5)")
    p.add_argument("--kmax", type=int, help="check |k| <= kmax (default 30)")

    p = sub.add_parser("markoff", help="Markoff-Hurwitz tuples up to a bound")
    p.add_argument("--arity", type=int, help="3 or 4 (default 3)")
    p.add_argument("--bound", type=int, help="largest coordinate (default 1000)")
    p.add_argument("--seed", help="seed tuple, comma separated (default the standard one)")
    p.add_argument("--emit", choices=("csv", "json"), help="what to print (default json)")

    p = sub.add_parser("enumerate", help="simple closed geodesics of a builtin model")
    p.add_argument("--model", help="N3, N21, N12 or N13 (default N21)")
    p.add_argument("--param", action="append", help="model parameter key=value")
    p.add_argument("--sided", choices=("any", "one_sided", "two_sided"))
    p.add_argument("--lmax", type=float, help="length cutoff (default 10)")
    p.add_argument("--budget", type=int, help="word length / tree depth budget")
    p.add_argument("--mode", choices=("auto", "structured", "brute"))

    for name, text in (("count", "N(L) and nu^L on a geometric grid"),
                       ("fit", "growth exponent of a length series")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--input", help="CSV with a length column (instead of a model)")
        p.add_argument("--model", help="builtin model to enumerate (default N21)")
        p.add_argument("--param", action="append", help="model parameter key=value")
        p.add_argument("--sided", choices=("any", "one_sided", "two_sided"))
        p.add_argument("--lmax", type=float, help="length cutoff (default 100)")
        p.add_argument("--d", type=int, help="normalizing exponent (default dim ML)")
        p.add_argument("--decades", type=float, help="fit window in decades below the top")
        if name == "fit":
            p.add_argument("--expect", help="lo,hi: fail unless the slope lies inside")

    p = sub.add_parser("bx-identity", help="b_X(1) identity on the two-holed projective plane")
    p.add_argument("--l1", type=float, help="first one-sided length (default 1)")
    p.add_argument("--l2", type=float, help="second one-sided length (default 2)")
    p.add_argument("--L", dest="L", type=float, help="count cutoff (default 1e4 max(l1, l2))")
    p.add_argument("--tol", type=float, help="allowed relative error (default 1e-3)")

    p = sub.add_parser("pml-orbit", help="orbit closures in the symbolic PML models")
    p.add_argument("--model", help="N21 (circle) or N13 (quadruple tree); default N21")
    p.add_argument("--start", help="N21 point: inf, n or n:t (default 0)")
    p.add_argument("--depth", type=int, help="orbit depth (default 10)")
    p.add_argument("--emit", choices=("json",))

    p = sub.add_parser("volume", help="Norbury volume of {sys- >= eps}")
    p.add_argument("--model", help="builtin model (default N21)")
    p.add_argument("--eps", help="one or more comma separated eps (default 0.1)")
    p.add_argument("--cap", type=float, help="chart cap standing in for the Bers constant")
    p.add_argument("--method", choices=("importance", "quadrature"),
                   help="importance sampling of the sys- region or the bare chart box")
    p.add_argument("--samples", type=int, help="sample count (default 20000)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--budget", type=int, help="word budget for sys- (default 5)")

    for action in sub.choices.values():
        _common(action)
        action.set_defaults(**{a.dest: None for a in action._actions
                               if a.dest not in ("help", "command")})
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {raw!r} is not key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def parse_config(argv: list[str]) -> dict:
    """Merge defaults, the config file and flags (flags win)."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = {k: v for k, v in vars(ns).items()}
    if ns.config:
        action = parser._subparsers._group_actions[0].choices[ns.command]
        types = {a.dest: a.type for a in action._actions}
        file_vals = read_config(ns.config)
        unknown = set(file_vals) - set(types) - {"command", "help", "config"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for k, v in file_vals.items():
            if k == "command" or cfg.get(k) is not None:
                continue
            conv = types[k]
            cfg[k] = [v] if k == "param" else (conv(v) if conv else v)
    return cfg


# ---- reports ----------------------------------------------------------------

def _outdir(cfg) -> Path:
    d = Path(cfg.get("out") or os.environ.get(OUTPUT_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _clean(x):
    if hasattr(x, "item") and not isinstance(x, (list, tuple, dict)):
        x = x.item()  # numpy scalars
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


def emit(cfg: dict, claim: str, inputs: dict, outputs: dict, checks: dict,
         header: list[str], rows: list, seed=None) -> dict:
    report = {"command": cfg["command"], "claim": claim, "version": __version__,
              "inputs": inputs, "outputs": outputs, "checks": checks, "seed": seed,
              "ok": all(checks.values())}
    report = _clean(report)
    out = _outdir(cfg)
    with open(out / f"{cfg['command']}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    text = json.dumps(report, indent=2, sort_keys=True)
    (out / f"{cfg['command']}.json").write_text(text + "\n")
    if cfg.get("emit") == "csv":
        sys.stdout.write((out / f"{cfg['command']}.csv").read_text())
    else:
        print(text)
    return report


def _or(x, default):
    return default if x is None else x


# ---- subcommands ----------------------------------------------------------------

def run_collar(cfg):
    from .collar import CollarParams, verify_collar_inequality
    params = CollarParams(_or(cfg["core"], 1.0), _or(cfg["width"], 0.5))
    kmax = _or(cfg["kmax"], 30)
    rep = verify_collar_inequality(params, (-kmax, kmax))
    rows = [(r.k, r.i_closed, r.i_geom, repr(r.length), repr(r.margin)) for r in rep.rows]
    checks = {"margins_nonnegative": rep.min_margin >= 0,
              "closed_form_matches_geometry": all(r.i_closed == r.i_geom for r in rep.rows)}
    return emit(cfg, "collar-lemma",
                {"core": params.core_length, "width": params.width, "kmax": kmax},
                {"min_margin": rep.min_margin, "calibration": rep.calibration._asdict()},
                checks, ["k", "i_closed", "i_geom", "length", "margin"], rows)


def run_markoff(cfg):
    from .counting import fit_exponent
    from .markoff import BRUTE_GUARD, MarkoffConfig, markoff_bruteforce, markoff_orbit, orbit_lengths, tuple_length
    arity = _or(cfg["arity"], 3)
    bound = _or(cfg["bound"], 1000)
    seeds = (_ints(cfg["seed"]),) if cfg["seed"] else ()
    conf = MarkoffConfig(arity, seeds=seeds)
    orbit = markoff_orbit(conf, bound)
    checks, outputs = {}, {"count": len(orbit), "k": conf.k, "trace_scale": conf.trace_scale}
    if bound <= BRUTE_GUARD and not seeds:
        checks["orbit_equals_bruteforce"] = set(orbit) == set(markoff_bruteforce(conf, bound))
    try:
        f = fit_exponent(orbit_lengths(conf, bound))
        outputs["fit"] = {"slope": f.slope, "r2": f.r2, "window": list(f.window),
                          "points": f.points}
    except ValueError as exc:
        outputs["fit"] = str(exc)
    rows = [t + (repr(tuple_length(t, conf.trace_scale)),) for t in orbit]
    header = [f"x{i + 1}" for i in range(arity)] + ["length"]
    return emit(cfg, "markoff-growth", {"arity": arity, "bound": bound, "seeds": conf.seeds},
                outputs, checks, header, rows)


def _model_series(cfg, default_lmax):
    from .geodesics import enumerate_simple
    from .surface import builtin_model
    rep = builtin_model(_or(cfg.get("model"), "N21"), _params(cfg.get("param")))
    sided = _or(cfg.get("sided"), "one_sided" if rep.model == "N21" else "two_sided")
    mode = _or(cfg.get("mode"), "auto")
    series = enumerate_simple(rep, sided, _or(cfg.get("lmax"), default_lmax), cfg.get("budget"),
                              mode)
    return rep, sided, series


def run_enumerate(cfg):
    rep, sided, s = _model_series(cfg, 10.0)
    rows = [(r.word, r.sided, repr(r.length)) for r in s.records]
    return emit(cfg, "simple-geodesics",
                {"model": rep.model, "params": dict(rep.params), "sided": sided,
                 "lmax": s.complete_to, "budget": cfg["budget"], "mode": _or(cfg["mode"], "auto")},
                {"count": len(s.lengths)}, {"certified": s.certified},
                ["word", "sided", "length"], rows)


def _series_from_input(path: str):
    from .geodesics import CountSeries
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        head = next(reader)
        col = head.index("length") if "length" in head else 0
        try:
            first = [float(head[col])]  # headerless file
        except ValueError:
            first = []
        vals = first + [float(r[col]) for r in reader if r]
    vals = sorted(v for v in vals if v > 0)
    return CountSeries(tuple(vals), Path(path).stem, True, vals[-1] if vals else None)


def _series(cfg):
    if cfg.get("input"):
        s = _series_from_input(cfg["input"])
        return s, None, {"input": cfg["input"]}
    rep, sided, s = _model_series(cfg, 100.0)
    return s, rep, {"model": rep.model, "params": dict(rep.params), "sided": sided,
                    "lmax": s.complete_to}


def run_count(cfg):
    from .counting import ball_counts, nonincreasing_decay, top_window
    s, rep, inputs = _series(cfg)
    d = cfg["d"] or (rep.surface.dim_ml if rep is not None else 1)
    window = top_window(s, _or(cfg["decades"], 1.0))
    bc = ball_counts(s, d, window)
    rows = [(repr(L), n, repr(nu)) for L, n, nu in zip(bc.grid, bc.counts, bc.nu)]
    checks = {"certified": bool(s.certified)}
    if rep is not None:
        checks["nu_decays"] = bool(nonincreasing_decay(bc.nu))
    return emit(cfg, "thm1-deficiency", dict(inputs, d=d),
                {"window": list(window), "final_nu": bc.nu[-1], "initial_nu": bc.nu[0]},
                checks, ["L", "N", "nu"], rows)


def run_fit(cfg):
    from .counting import ball_counts, fit_exponent, top_window
    s, rep, inputs = _series(cfg)
    window = top_window(s, _or(cfg["decades"], 2.0))
    f = fit_exponent(s, window=window)
    checks = {"certified": s.certified}
    if cfg["expect"]:
        lo, hi = _floats(cfg["expect"])
        checks["slope_in_range"] = lo < f.slope < hi
    d = cfg["d"] or (rep.surface.dim_ml if rep is not None else 1)
    bc = ball_counts(s, d, f.window)
    rows = [(repr(L), n, repr(nu)) for L, n, nu in zip(bc.grid, bc.counts, bc.nu)]
    return emit(cfg, "growth-exponent", dict(inputs, d=d),
                {"slope": f.slope, "intercept": f.intercept, "r2": f.r2,
                 "window": list(f.window), "points": f.points},
                checks, ["L", "N", "nu"], rows)


def run_bx(cfg):
    from .counting import bx_identity_check_n12
    l1, l2 = _or(cfg["l1"], 1.0), _or(cfg["l2"], 2.0)
    L = _or(cfg["L"], 1e4 * max(l1, l2))
    tol = _or(cfg["tol"], 1e-3)
    err = bx_identity_check_n12(l1, l2, L)
    direct = math.floor(L / l1) + math.floor(L / l2)
    return emit(cfg, "bx-identity", {"l1": l1, "l2": l2, "L": L, "tol": tol},
                {"relative_error": err, "direct_count": direct,
                 "predicted": L * (1 / l1 + 1 / l2)},
                {"within_tol": err <= tol}, ["L", "direct", "predicted", "relative_error"],
                [(repr(L), direct, repr(L * (1 / l1 + 1 / l2)), repr(err))])


def _parse_point(text: str):
    from .pml import PmlN21Point
    text = str(text).strip()
    if text in ("inf", "gamma_inf"):
        return PmlN21Point.infinity()
    if ":" in text:
        n, t = text.split(":", 1)
        return PmlN21Point(int(n), Fraction(t))
    return PmlN21Point.gamma(int(text))


def run_pml(cfg):
    from .pml import is_connected, n13_orbit, n21_orbit_closure, tangency_graph
    model = _or(cfg["model"], "N21")
    depth = _or(cfg["depth"], 10)
    if model == "N21":
        start = _parse_point(_or(cfg["start"], "0"))
        c = n21_orbit_closure(start, depth)
        pts = sorted(c.points, key=lambda p: (p.is_infinity, p.n or 0, p.t))
        rows = [(str(p), "orbit") for p in pts] + [(str(p), "accumulation")
                                                   for p in c.accumulation]
        checks = {"gamma_inf_fixed": (start.is_infinity
                                      or all(not p.is_infinity for p in c.points))}
        return emit(cfg, "pml-closure", {"model": model, "start": str(start), "depth": depth},
                    {"kind": c.kind, "orbit_size": len(c.points),
                     "accumulation": sorted(str(p) for p in c.accumulation)},
                    checks, ["point", "role"], rows)
    if model == "N13":
        orbit = n13_orbit(depth)
        adj = tangency_graph(orbit)
        rows = [(i, ",".join(map(str, q)), ",".join(map(str, orbit.quadruple_values(q))))
                for i, q in enumerate(orbit.quads)]
        return emit(cfg, "pml-tangency", {"model": model, "depth": depth},
                    {"curves": len(orbit.values), "quadruples": len(orbit.quads)},
                    {"tangency_graph_connected": is_connected(adj)},
                    ["node", "labels", "values"], rows)
    raise UsageError(f"pml-orbit supports N21 and N13, not {model!r}")


def run_volume(cfg):
    from .volume import default_cap, divergence_order, integrate_chart, model_chart, sys_region_volumes
    model = _or(cfg["model"], "N21")
    eps = _floats(_or(cfg["eps"], "0.1"))
    cap = cfg["cap"] if cfg["cap"] is not None else default_cap(model)
    method = _or(cfg["method"], "importance")
    samples, seed = _or(cfg["samples"], 20_000), _or(cfg["seed"], 0)
    if method == "importance":
        ests = sys_region_volumes(model, eps, cap, samples, seed, _or(cfg["budget"], 5))
    else:
        ests = [integrate_chart(model_chart(model, e, cap), "quadrature") for e in eps]
    results = [{"eps": e, "value": v.value, "error": v.error, "method": v.method,
                "seed": v.seed, "certified": v.certified} for e, v in zip(eps, ests)]
    order = sorted(zip(eps, (v.value for v in ests)))
    checks = {"finite": all(math.isfinite(r["value"]) for r in results),
              "nonincreasing_in_eps": all(b[1] <= a[1] for a, b in zip(order, order[1:]))}
    outputs = {"results": results, "cap": cap}
    if len(eps) >= 2:
        prof = sorted(((e, v.value) for e, v in zip(eps, ests)), reverse=True)
        outputs["divergence_order"] = divergence_order(prof, cap)
    rows = [(repr(r["eps"]), repr(r["value"]), repr(r["error"]), r["certified"]) for r in results]
    return emit(cfg, "norbury-finite" if len(eps) == 1 else "norbury-divergence",
                {"model": model, "eps": eps, "cap": cap, "method": method, "samples": samples},
                outputs, checks, ["eps", "value", "error", "certified"], rows, seed)


COMMANDS = {"collar": run_collar, "markoff": run_markoff, "enumerate": run_enumerate,
            "count": run_count, "fit": run_fit, "bx-identity": run_bx, "pml-orbit": run_pml,
            "volume": run_volume}


def run(cfg: dict) -> int:
    report = COMMANDS[cfg["command"]](cfg)
    return 0 if report["ok"] else 1


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"nonorient: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, ArithmeticError) as exc:
        where = traceback.extract_tb(exc.__traceback__)[-1]
        print(f"nonorient {argv[0] if argv else ''}: {type(exc).__name__} in "
              f"{Path(where.filename).stem}.{where.name}: {exc}", file=sys.stderr)
        return 1
