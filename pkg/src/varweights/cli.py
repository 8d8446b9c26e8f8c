"""Command-line interface.

``varweights <command> --config <path> [--out <dir>] [--format json|csv|svg]``

Every command reads one JSON config, runs the corresponding library
operation, writes a report into the output directory, and prints a
one-line outcome.  Exit codes: 0 every asserted invariant held, 1 a
verification came back false (or a library error produced a witness),
2 the config or invocation was invalid.

The ``report`` command composes the scalar workflow (characteristic,
openness sweep, reverse Holder search) and always renders the sweep
figures next to the delimited rows.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import config as cfgmod
from .errors import (ConfigError, InfiniteModularError, NonIntegrableError,
                     QuadratureError, VarweightsError)
from .norms import luxemburg_norm, modular
from .report import Report, report_to_json, rows_to_csv
from .scalar import (classical_ap_characteristic, fit_ainfty_constants,
                     muckenhoupt_characteristic, openness_sweep,
                     reverse_holder_exponent, search_reverse_holder_exponent,
                     verify_average_reverse_holder, verify_norm_reverse_holder,
                     verify_weight_lemma, LEMMA_IDS)

__all__ = ["main", "run_command", "COMMANDS"]

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_USAGE = 2


def _cube_cols(cube) -> dict:
    return {"center": list(cube.center), "side": cube.side}


def _char_rows(report) -> list:
    rows = []
    for r in report.rows:
        rows.append({**_cube_cols(r.cube),
                     "value": None if not r.finite else r.value,
                     "divergent": math.isinf(r.value),
                     "note": r.note})
    return rows


def _char_summary(report) -> dict:
    return {
        "characteristic": None if report.divergent else report.value,
        "divergent": report.divergent,
        "cap": report.cap,
        "failed_cubes": report.failed_cubes,
        "cubes": len(report.rows),
        "shrink_divergent": {str(list(k)): v
                             for k, v in report.shrink_divergent.items()},
    }


def _weight_singular_points(w) -> tuple:
    return tuple(s.point for s in w.singularities)


def _cmd_norm(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    cube = cfgmod.build_cube(cfg)
    plan = cfgmod.build_plan(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    res = luxemburg_norm(w.restrict(cube), p, cube, plan, tol)
    row = {"value": res.value, "bracket_lo": res.bracket[0],
           "bracket_hi": res.bracket[1],
           "modular_at_value": res.modular_at_value,
           "iterations": res.iterations, "samples": res.sample_count}
    normalized = res.value == 0.0 or abs(res.modular_at_value - 1.0) <= 1e-3
    return Report(command="norm", config=cfg, columns=list(row), rows=[row],
                  summary={"norm": res.value},
                  verdicts={"modular_normalized": normalized})


def _cmd_modular(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    cube = cfgmod.build_cube(cfg)
    plan = cfgmod.build_plan(cfg)
    try:
        value = modular(w.restrict(cube), p, cube, plan)
        divergent = False
    except InfiniteModularError:
        value, divergent = None, True
    row = {"value": value, "divergent": divergent}
    return Report(command="modular", config=cfg, columns=list(row), rows=[row],
                  summary={"modular": value, "divergent": divergent},
                  verdicts={})


def _cmd_char(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(w))
    plan = cfgmod.build_plan(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    cap = cfgmod.optional(cfg, "cap", 1e12, float)
    rep = muckenhoupt_characteristic(w, p, family, plan, tol, cap)
    rows = _char_rows(rep)
    return Report(command="char", config=cfg,
                  columns=["center", "side", "value", "divergent", "note"],
                  rows=rows, summary=_char_summary(rep),
                  verdicts={"no_quadrature_failures": rep.failed_cubes == 0})


def _cmd_classical_char(cfg: dict) -> Report:
    v = cfgmod.build_weight(cfg)
    p0 = cfgmod.require(cfg, "params.p0", float)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(v))
    plan = cfgmod.build_plan(cfg)
    cap = cfgmod.optional(cfg, "cap", 1e12, float)
    rep = classical_ap_characteristic(v, p0, family, plan, cap)
    rows = _char_rows(rep)
    return Report(command="classical-char", config=cfg,
                  columns=["center", "side", "value", "divergent", "note"],
                  rows=rows, summary=_char_summary(rep),
                  verdicts={"no_quadrature_failures": rep.failed_cubes == 0})


def _cmd_ainfty(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(w))
    plan = cfgmod.build_plan(cfg)
    seed = cfgmod.config_seed(cfg)
    subs = cfgmod.optional(cfg, "params.random_subcubes", 8, int)
    est = fit_ainfty_constants(w, p, family, plan, random_subcubes=subs,
                               seed=seed)
    r = reverse_holder_exponent(est.delta, est.c1, p.dim)
    rows = [{**_cube_cols(cube), "worst_ratio": worst, "samples": count}
            for cube, worst, count in est.per_cube]
    return Report(command="ainfty", config=cfg,
                  columns=["center", "side", "worst_ratio", "samples"],
                  rows=rows,
                  summary={"delta": est.delta, "c1": est.c1,
                           "pairs": est.pair_count, "rh_exponent": r},
                  verdicts={"c1_finite": math.isfinite(est.c1)})


def _cmd_rh_exponent(cfg: dict) -> Report:
    delta = cfgmod.require(cfg, "params.delta", float)
    c1 = cfgmod.require(cfg, "params.c1", float)
    dim = cfgmod.config_dimension(cfg)
    r = reverse_holder_exponent(delta, c1, dim)
    row = {"delta": delta, "c1": c1, "dimension": dim, "r": r}
    return Report(command="rh-exponent", config=cfg, columns=list(row),
                  rows=[row], summary={"r": r}, verdicts={"r_above_one": r > 1.0})


def _cmd_rh_verify(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(w))
    plan = cfgmod.build_plan(cfg)
    r = cfgmod.require(cfg, "params.r", float)
    mode = cfgmod.optional(cfg, "params.mode", "average", str)
    if mode == "average":
        factor = cfgmod.optional(cfg, "params.budget", 2.0, float)
        cert = verify_average_reverse_holder(w, r, family, plan, factor)
    elif mode == "norm":
        p = cfgmod.build_exponent(cfg)
        budget = cfgmod.require(cfg, "params.budget", float)
        tol = cfgmod.norm_tolerance(cfg)
        cert = verify_norm_reverse_holder(w, p, r, family, budget, plan, tol)
    else:
        raise ConfigError("params.mode", "must be 'average' or 'norm'")
    rows = [{**_cube_cols(c.cube),
             "ratio": None if not c.finite else c.value,
             "divergent": math.isinf(c.value),
             "passed": c.finite and c.value <= cert.budget}
            for c in cert.rows]
    summary = {"r": r, "mode": mode, "budget": cert.budget,
               "minimal_c": None if not math.isfinite(cert.minimal_c)
               else cert.minimal_c,
               "divergent": cert.divergent, "verified": cert.verified}
    return Report(command="rh-verify", config=cfg,
                  columns=["center", "side", "ratio", "divergent", "passed"],
                  rows=rows, summary=summary,
                  verdicts={"reverse_holder": cert.verified})


def _cmd_rh_search(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(w))
    plan = cfgmod.build_plan(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    budget = cfgmod.require(cfg, "params.budget", float)
    r_cap = cfgmod.optional(cfg, "params.r_cap", 4.0, float)
    iters = cfgmod.optional(cfg, "params.iterations", 20, int)
    res = search_reverse_holder_exponent(w, p, family, budget, r_cap, iters,
                                         plan, tol)
    rows = [{"r": r, "minimal_c": None if not math.isfinite(c) else c,
             "passed": ok} for r, c, ok in res.trace]
    return Report(command="rh-search", config=cfg,
                  columns=["r", "minimal_c", "passed"], rows=rows,
                  summary={"r_star": res.r_star, "budget": res.budget,
                           "r_cap": res.r_cap, "monotone": res.monotone},
                  verdicts={"pass_region_is_interval": res.monotone,
                            "found_exponent": res.r_star > 1.0})


def _sweep_rows(sweep) -> list:
    return [{"s": row.s, "value": row.value, "divergent": row.divergent,
             "note": row.note} for row in sweep.rows]


def _cmd_openness(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(w))
    plan = cfgmod.build_plan(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    cap = cfgmod.optional(cfg, "cap", 1e12, float)
    s_grid = cfgmod.require(cfg, "params.s_grid", list)
    side = cfgmod.optional(cfg, "params.side", "right", str)
    sweep = openness_sweep(w, p, family, s_grid, side, plan, tol, cap)
    return Report(command="openness", config=cfg,
                  columns=["s", "value", "divergent", "note"],
                  rows=_sweep_rows(sweep),
                  summary={"side": sweep.side, "boundary": sweep.boundary},
                  verdicts={})


def _cmd_matrix_char(cfg: dict) -> Report:
    from .matrices import matrix_app_characteristic
    weight = cfgmod.build_matrix_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    family = cfgmod.build_family_from_config(cfg, weight.singular_points())
    tol = cfgmod.norm_tolerance(cfg)
    cap = cfgmod.optional(cfg, "cap", 1e12, float)
    rep = matrix_app_characteristic(weight, p, family, tol=tol, cap=cap)
    rows = _char_rows(rep)
    summary = _char_summary(rep)
    summary["inner_resolution"] = rep.inner_resolution
    return Report(command="matrix-char", config=cfg,
                  columns=["center", "side", "value", "divergent", "note"],
                  rows=rows, summary=summary,
                  verdicts={"no_quadrature_failures": rep.failed_cubes == 0})


def _cmd_reduce(cfg: dict) -> Report:
    from .errors import DomainError
    from .matrices import reducing_operator
    weight = cfgmod.build_matrix_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    cube = cfgmod.build_cube(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    m = cfgmod.optional(cfg, "params.directions", None, int)
    holdout = cfgmod.optional(cfg, "params.holdout", 64, int)
    try:
        red = reducing_operator(weight, p, cube, m, tol=tol, holdout=holdout)
    except DomainError as exc:
        row = {"error": str(exc)}
        return Report(command="reduce", config=cfg, columns=["error"],
                      rows=[row], summary={"error": str(exc)},
                      verdicts={"sandwich": False})
    rows = [{"row": i, "entries": list(map(float, r))}
            for i, r in enumerate(red.matrix)]
    limit = math.sqrt(weight.size) * (1.0 + 1e-4)
    return Report(command="reduce", config=cfg, columns=["row", "entries"],
                  rows=rows,
                  summary={"sandwich_factor": red.sandwich_factor,
                           "lower_margin": red.lower_margin,
                           "method": red.method,
                           "held_out_directions": red.direction_samples},
                  verdicts={"sandwich": red.lower_margin >= 1.0 - 1e-4
                            and red.sandwich_factor <= limit})


def _cmd_avg_norm(cfg: dict) -> Report:
    from .matrices import averaging_ratio_rows
    weight = cfgmod.build_matrix_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    cube = cfgmod.build_cube(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    aux = cfgmod.optional(cfg, "params.aux", False, bool)
    seed = cfgmod.config_seed(cfg)
    pairs = averaging_ratio_rows(weight, cube, p, tol=tol, aux=aux, seed=seed)
    rows = [{"direction": list(tf.direction),
             "sub_center": list(tf.subcube.center),
             "sub_side": tf.subcube.side, "ratio": ratio}
            for tf, ratio in pairs]
    best = max((r["ratio"] for r in rows), default=0.0)
    return Report(command="avg-norm", config=cfg,
                  columns=["direction", "sub_center", "sub_side", "ratio"],
                  rows=rows,
                  summary={"lower_bound": best, "auxiliary": aux,
                           "test_fields": len(rows)},
                  verdicts={"nonzero_test_set": bool(rows)})


def _cmd_verify_lemma(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(w))
    plan = cfgmod.build_plan(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    lemma = cfgmod.require(cfg, "params.lemma", str)
    if lemma not in LEMMA_IDS:
        raise ConfigError("params.lemma",
                          f"must be one of {', '.join(LEMMA_IDS)}")
    seed = cfgmod.config_seed(cfg)
    extra = cfgmod.optional(cfg, "params.lemma_params", {}, dict)
    rep = verify_weight_lemma(lemma, w, p, family, plan, tol, seed, extra)
    row = {"lemma": rep.lemma_id, "fitted": rep.fitted,
           "structural": rep.structural, "passed": rep.passed,
           "samples": rep.sample_count}
    return Report(command="verify-lemma", config=cfg, columns=list(row),
                  rows=[row],
                  summary={"lemma": rep.lemma_id, "fitted": rep.fitted,
                           "structural": rep.structural,
                           "samples": rep.sample_count},
                  verdicts={"lemma_holds": rep.passed})


def _cmd_report(cfg: dict) -> Report:
    w = cfgmod.build_weight(cfg)
    p = cfgmod.build_exponent(cfg)
    family = cfgmod.build_family_from_config(cfg, _weight_singular_points(w))
    plan = cfgmod.build_plan(cfg)
    tol = cfgmod.norm_tolerance(cfg)
    cap = cfgmod.optional(cfg, "cap", 1e12, float)
    s_grid = cfgmod.optional(cfg, "params.s_grid",
                             [1.0, 1.05, 1.1, 1.2, 1.3, 1.4], list)
    side = cfgmod.optional(cfg, "params.side", "right", str)
    budget = cfgmod.optional(cfg, "params.budget", 2.0, float)
    r_cap = cfgmod.optional(cfg, "params.r_cap", 2.0, float)
    iters = cfgmod.optional(cfg, "params.iterations", 12, int)

    char = muckenhoupt_characteristic(w, p, family, plan, tol, cap)
    sweep = openness_sweep(w, p, family, s_grid, side, plan, tol, cap)
    search = search_reverse_holder_exponent(w, p, family, budget, r_cap,
                                            iters, plan, tol)

    rows = []
    for r in _char_rows(char):
        rows.append({"section": "characteristic", **r, "s": None,
                     "r": None, "minimal_c": None, "passed": None})
    for r in _sweep_rows(sweep):
        rows.append({"section": "openness", "center": None, "side": None,
                     "value": r["value"], "divergent": r["divergent"],
                     "note": r["note"], "s": r["s"], "r": None,
                     "minimal_c": None, "passed": None})
    for r_val, c_val, ok in search.trace:
        rows.append({"section": "rh-search", "center": None, "side": None,
                     "value": None, "divergent": None, "note": "",
                     "s": None, "r": r_val,
                     "minimal_c": None if not math.isfinite(c_val) else c_val,
                     "passed": ok})
    summary = {
        "characteristic": _char_summary(char),
        "openness": {"side": sweep.side, "boundary": sweep.boundary},
        "rh_search": {"r_star": search.r_star, "budget": search.budget,
                      "monotone": search.monotone},
    }
    return Report(command="report", config=cfg,
                  columns=["section", "center", "side", "value", "divergent",
                           "note", "s", "r", "minimal_c", "passed"],
                  rows=rows, summary=summary,
                  verdicts={"no_quadrature_failures": char.failed_cubes == 0,
                            "pass_region_is_interval": search.monotone})


COMMANDS = {
    "norm": _cmd_norm,
    "modular": _cmd_modular,
    "char": _cmd_char,
    "classical-char": _cmd_classical_char,
    "ainfty": _cmd_ainfty,
    "rh-exponent": _cmd_rh_exponent,
    "rh-verify": _cmd_rh_verify,
    "rh-search": _cmd_rh_search,
    "openness": _cmd_openness,
    "matrix-char": _cmd_matrix_char,
    "reduce": _cmd_reduce,
    "avg-norm": _cmd_avg_norm,
    "verify-lemma": _cmd_verify_lemma,
    "report": _cmd_report,
}


def run_command(command: str, cfg: dict) -> Report:
    """Dispatch one command on a parsed config; returns the full report."""
    start = time.perf_counter()
    report = COMMANDS[command](cfg)
    report.wall_clock = time.perf_counter() - start
    return report


def _emit(report: Report, out_dir: str, fmt: str) -> list:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def path(ext: str, stem: str | None = None) -> str:
        return os.path.join(out_dir, f"{stem or report.command}.{ext}")

    if fmt in ("json", "all"):
        with open(path("json"), "w", encoding="utf-8") as fh:
            fh.write(report_to_json(report))
        written.append(path("json"))
    if fmt in ("csv", "all"):
        with open(path("csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(report.columns, report.rows))
        written.append(path("csv"))
    if fmt in ("svg", "all"):
        written.extend(_emit_svg(report, out_dir))
    return written


def _emit_svg(report: Report, out_dir: str) -> list:
    from .plots import render_sweep_svg, render_trace_svg

    def path(stem: str) -> str:
        return os.path.join(out_dir, f"{stem}.svg")

    written = []
    if report.command in ("openness", "matrix-char-sweep"):
        render_sweep_svg(report.rows, path(report.command))
        written.append(path(report.command))
    elif report.command == "rh-search":
        render_trace_svg(report.rows, path(report.command),
                         budget=report.summary.get("budget"))
        written.append(path(report.command))
    elif report.command == "report":
        sweep_rows = [r for r in report.rows if r["section"] == "openness"]
        trace_rows = [r for r in report.rows if r["section"] == "rh-search"]
        render_sweep_svg(sweep_rows, path("report_openness"))
        written.append(path("report_openness"))
        render_trace_svg(trace_rows, path("report_rh_search"),
                         budget=report.summary["rh_search"]["budget"])
        written.append(path("report_rh_search"))
    else:
        # generic fallback: plot per-row values against the row index
        rows = [{"s": i, "value": r.get("value", r.get("ratio")),
                 "divergent": r.get("divergent", False)}
                for i, r in enumerate(report.rows)]
        render_sweep_svg(rows, path(report.command), x_label="row",
                         y_label="value", title=report.command)
        written.append(path(report.command))
    return written


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varweights",
        description="Variable-exponent Muckenhoupt weight toolkit")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True,
                        help="path to the JSON run configuration")
    parser.add_argument("--out", default=os.environ.get("VARWEIGHTS_OUT", "."),
                        help="output directory (default: . or $VARWEIGHTS_OUT)")
    parser.add_argument("--format", default="json",
                        choices=["json", "csv", "svg", "all"],
                        help="report format(s) to write")
    return parser


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = cfgmod.load_config(args.config)
        report = run_command(args.command, cfg)
    except ConfigError as exc:
        print(f"config error at {exc.path}: {exc.reason}", file=sys.stderr)
        return EXIT_USAGE
    except (NonIntegrableError, QuadratureError, VarweightsError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED

    # the report command always renders figures beside the delimited rows
    fmt = "all" if args.command == "report" else args.format
    files = _emit(report, args.out, fmt)
    verdict_text = "pass" if report.passed else "FALSIFIED"
    failed = [k for k, v in report.verdicts.items() if not v]
    detail = f" (failed: {', '.join(failed)})" if failed else ""
    print(f"{args.command}: {verdict_text}{detail}; "
          f"wrote {', '.join(files)} in {report.wall_clock:.2f}s")
    return EXIT_OK if report.passed else EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())
