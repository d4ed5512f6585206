"""Command-line interface.

Subcommands: analyze, verify, survey, hessian, fit, discrepancy.
Exit codes: 0 success, 1 verification failures present, 2 domain
error, 3 precision error.  The default digit budget can be set via
the ARTIFACT_PRECISION environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__
from .contfrac import cf_expand, quotient_sum_bound, resonance
from .digits import (benford_joint, count_triples_geometric,
                     count_triples_recurrence)
from .errors import DomainError, PrecisionError, ArtifactError
from .fitting import fit_power_law, n_threshold
from .infocore import (cmi, cmi_gradient, cmi_hessian_spectrum, i_infinity,
                       markov_projection, star_discrepancy)
from .precision import DEFAULT_DIGITS, log10_int
from .survey import (BASELINE_GRID, EXTENDED_GRID, analyze_base, load_records,
                     resolve_transitional, run_survey, summarize,
                     write_summary_csv, _orbit_points_float)

#: Expected CMI values (bits) for the verification command: six
#: benchmark sequences at three sample sizes, reproducible to 1e-6.
VERIFICATION_CMI: dict[str, dict[int, float]] = {
    "2^n": {1000: 0.369142, 5000: 0.018635, 10000: 0.005599},
    "3^n": {1000: 0.696186, 5000: 0.025245, 10000: 0.009748},
    "5^n": {1000: 0.379500, 5000: 0.018412, 10000: 0.005698},
    "7^n": {1000: 0.692305, 5000: 0.685589, 10000: 0.682545},
    "fibonacci": {1000: 0.367187, 5000: 0.014169, 10000: 0.004167},
    "n!": {1000: 0.578676, 5000: 0.115195, 10000: 0.055104},
}

#: Expected quotient prefixes of log10(b) for the verification command.
VERIFICATION_CF: dict[int, tuple[int, ...]] = {
    2: (0, 3, 3, 9, 2, 2, 4, 6),
    3: (0, 2, 10, 2, 2, 1, 13, 1),
    4: (0, 1, 1, 1, 1, 18, 1, 4),
    5: (0, 1, 2, 3, 9, 2, 2, 4),
    6: (0, 1, 3, 1, 1, 32, 1, 1),
    7: (0, 1, 5, 2, 5, 6, 1, 4813),
    8: (0, 1, 9, 3, 7, 2, 1, 19),
    9: (0, 1, 20, 1, 5, 1, 6, 2),
}

VERIFICATION_MAX_PQ: dict[int, int] = {
    2: 18, 3: 18, 4: 18, 5: 18, 6: 278, 7: 4813, 8: 19, 9: 20,
}

Q_STAR_7 = 2_454_630


def _default_digits(args) -> int:
    if getattr(args, "precision", None):
        return args.precision
    env = os.environ.get("ARTIFACT_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise DomainError(f"ARTIFACT_PRECISION must be an integer: {env!r}") from exc
    return DEFAULT_DIGITS


def _parse_grid(text: str | None, default: tuple[int, ...]) -> tuple[int, ...]:
    if not text:
        return default
    try:
        return tuple(sorted({int(tok) for tok in text.replace(" ", "").split(",") if tok}))
    except ValueError as exc:
        raise DomainError(f"bad sample grid: {text!r}") from exc


def cmd_analyze(args) -> int:
    grid = _parse_grid(args.n_grid, BASELINE_GRID)
    record = analyze_base(args.base, grid, digits=_default_digits(args))
    if args.json:
        print(record.to_json())
        return 0
    print(f"base {record.base}")
    print(f"  cf prefix      {list(record.cf)}")
    print(f"  Q*             {record.q_star:,}")
    cf = cf_expand(log10_int(record.base, _default_digits(args)), max_terms=60)
    for n in grid:
        rep = resonance(cf, n)
        print(f"  R(b,{n:>7,})  {rep.ratio:.3f}  [{rep.label}]")
    print("  CMI series     " +
          "  ".join(f"{n}:{v:.6f}" for n, v in zip(record.grid, record.cmi)))
    print(f"  fit            c={record.c:.4g}  beta={record.beta:.3f}  "
          f"r2={record.r2:.3f}  dropped={list(record.dropped)}")
    print(f"  label          {record.label} "
          f"(resonance {record.resonance_label}, "
          f"{'agrees' if record.resonance_agrees else 'disagrees'})")
    print(f"  diagnostics    quad={record.quad_ratio:.1f}  "
          f"linear={record.linear_ratio:.3f}  D*={record.dstar:.3e}")
    return 0


def _verify_line(name: str, ok: bool, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def cmd_verify(args) -> int:
    digits = _default_digits(args)
    tol = 1e-6
    all_ok = True
    sizes = (1000, 5000, 10000)

    series: dict[str, dict[int, float]] = {}
    for b, key in ((2, "2^n"), (3, "3^n"), (5, "5^n"), (7, "7^n")):
        snaps = count_triples_geometric(b, sizes[-1], snapshots=sizes)
        series[key] = {n: cmi(snaps[n]) for n in sizes}
    snaps = count_triples_recurrence("fibonacci", sizes[-1], snapshots=sizes)
    series["fibonacci"] = {n: cmi(snaps[n]) for n in sizes}
    snaps = count_triples_recurrence("factorial", sizes[-1], snapshots=sizes)
    series["n!"] = {n: cmi(snaps[n]) for n in sizes}

    for key, cells in VERIFICATION_CMI.items():
        for n, expected in cells.items():
            got = series[key][n]
            ok = abs(got - expected) <= tol
            all_ok &= _verify_line(f"cmi {key} N={n}", ok,
                                   f"got {got:.6f}, expected {expected:.6f}")

    for b, prefix in VERIFICATION_CF.items():
        cf = cf_expand(log10_int(b, digits), max_terms=15)
        got = cf.quotients[:len(prefix)]
        ok = got == prefix
        all_ok &= _verify_line(f"cf log10({b})", ok, f"{list(got)}")
        mx = cf.max_partial_quotient(16)
        ok = mx == VERIFICATION_MAX_PQ[b]
        all_ok &= _verify_line(f"max quotient log10({b})", ok,
                               f"got {mx}, expected {VERIFICATION_MAX_PQ[b]}")

    cf7 = cf_expand(log10_int(7, digits), max_terms=60)
    q_star = resonance(cf7, 10_000).q_star
    all_ok &= _verify_line("Q*(7)", q_star == Q_STAR_7,
                           f"got {q_star:,}, expected {Q_STAR_7:,}")

    inf = i_infinity()
    ok = 3.370e-5 <= inf <= 3.380e-5
    all_ok &= _verify_line("I_inf", ok, f"got {inf:.6e}")

    print("verification " + ("PASSED" if all_ok else "FAILED"))
    return 0 if all_ok else 1


def cmd_survey(args) -> int:
    lo, _, hi = args.range.partition(":")
    try:
        b_lo, b_hi = int(lo), int(hi)
    except ValueError as exc:
        raise DomainError(f"bad --range {args.range!r}; expected lo:hi") from exc
    digits = _default_digits(args)

    records, summary = run_survey(b_lo, b_hi, BASELINE_GRID,
                                  parallelism=args.jobs, out=args.out,
                                  force=args.force, digits=digits)
    print(f"baseline: {len(records)} bases -> " +
          ", ".join(f"{k}={v}" for k, v in sorted(summary.counts.items())))

    if args.grid == "extended":
        ext_out = args.extended_out
        if ext_out is None and args.out is not None:
            root, ext = os.path.splitext(args.out)
            ext_out = f"{root}.extended{ext or '.jsonl'}"
        updated, report = resolve_transitional(records, EXTENDED_GRID,
                                               parallelism=args.jobs,
                                               out=ext_out, force=args.force,
                                               digits=digits)
        summary = summarize(updated)
        print(f"extended: {len(report.flagged)} flagged; moves " +
              (", ".join(f"{k}={v}" for k, v in sorted(report.moves.items()))
               or "none"))
        print(f"newly persistent: {list(report.newly_pers)}")
        print("final: " +
              ", ".join(f"{k}={v}" for k, v in sorted(summary.counts.items())))

    if args.summary_csv:
        write_summary_csv(summary, args.summary_csv)
        print(f"summary csv -> {args.summary_csv}")
    return 0


def cmd_hessian(args) -> int:
    if args.eps_eig is not None:
        spectrum = cmi_hessian_spectrum(eps_eig=args.eps_eig)
    else:
        spectrum = cmi_hessian_spectrum()
    grad = cmi_gradient(benford_joint())
    _, markov_dist = markov_projection(benford_joint())
    payload = {
        "op_norm": spectrum.op_norm,
        "op_norm_full": spectrum.op_norm_full,
        "lambda_max": spectrum.lambda_max,
        "lambda_min": spectrum.lambda_min,
        "n_pos": spectrum.n_pos,
        "n_neg": spectrum.n_neg,
        "n_null": spectrum.n_null,
        "eps_eig": spectrum.eps_eig,
        "projected_gradient_norm": grad.projected_norm,
        "gradient_component_mean": grad.component_mean,
        "gradient_component_sd": grad.component_sd,
        "markov_distance": markov_dist,
    }
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for k, v in payload.items():
            print(f"{k:26s} {v}")
    return 0


def cmd_fit(args) -> int:
    samples = []
    with open(args.input, newline="", encoding="utf-8") as f:
        for row in csv.reader(f):
            if not row or row[0].strip().lower() in ("n", "#n", "# n"):
                continue
            samples.append((int(float(row[0])), float(row[1])))
    i_inf = args.i_inf if args.i_inf is not None else i_infinity()
    fit = fit_power_law(samples, i_inf)
    thr = n_threshold(fit, args.target)
    thr_text = "inf" if thr == float("inf") else f"{thr:.0f}"
    print(f"c={fit.c:.6g} beta={fit.beta:.4f} r2={fit.r2:.4f} "
          f"points={fit.n_points_used} dropped={list(fit.dropped)} "
          f"N(I<{args.target})={thr_text}")
    return 0


def cmd_discrepancy(args) -> int:
    digits = _default_digits(args)
    alpha = log10_int(args.base, digits)
    points = _orbit_points_float(args.base, args.n)
    dstar = star_discrepancy(points)
    cf = cf_expand(alpha, max_terms=60)
    bound = quotient_sum_bound(cf, args.n)
    print(f"D*_N            {dstar:.6e}")
    print(f"(3/N) sum a_k+1 {bound:.6e}")
    print(f"bound satisfied {dstar <= bound}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="artifact",
        description="Leading-digit-triple correlation analysis of integer "
                    "base powers and recurrence sequences.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="single-base analysis")
    pa.add_argument("--base", type=int, required=True)
    pa.add_argument("--n-grid", help="comma-separated sample sizes")
    pa.add_argument("--precision", type=int, help="digit budget")
    pa.add_argument("--json", action="store_true")
    pa.set_defaults(func=cmd_analyze)

    pv = sub.add_parser("verify", help="recompute benchmark values")
    pv.add_argument("--precision", type=int)
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("survey", help="multi-base survey")
    ps.add_argument("--range", default="2:1000", help="lo:hi inclusive")
    ps.add_argument("--grid", choices=("baseline", "extended"),
                    default="baseline")
    ps.add_argument("--out", help="JSONL output path (enables resume)")
    ps.add_argument("--extended-out", help="JSONL path for extended records")
    ps.add_argument("--summary-csv", help="write the class summary CSV here")
    ps.add_argument("--jobs", type=int, default=None)
    ps.add_argument("--force", action="store_true",
                    help="truncate a corrupt output tail and continue")
    ps.add_argument("--precision", type=int)
    ps.set_defaults(func=cmd_survey)

    ph = sub.add_parser("hessian", help="curvature at the Benford point")
    ph.add_argument("--at", choices=("benford",), default="benford")
    ph.add_argument("--eps-eig", type=float, default=None)
    ph.add_argument("--json", action="store_true")
    ph.set_defaults(func=cmd_hessian)

    pf = sub.add_parser("fit", help="power-law fit of (N, I) csv data")
    pf.add_argument("--input", required=True)
    pf.add_argument("--i-inf", type=float, default=None)
    pf.add_argument("--target", type=float, default=0.01)
    pf.set_defaults(func=cmd_fit)

    pd = sub.add_parser("discrepancy", help="star discrepancy vs CF bound")
    pd.add_argument("--base", type=int, required=True)
    pd.add_argument("--n", type=int, required=True)
    pd.add_argument("--precision", type=int)
    pd.set_defaults(func=cmd_discrepancy)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PrecisionError as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return 3
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
