"""Base-range survey: per-base digit-correlation analysis, persisted
as line-delimited JSON with resume, plus transitional re-resolution at
an extended sample range.

Classification is by fitted CMI decay, cross-checked against the
continued-fraction resonance label (which is recorded alongside, with
a disagreement flag, but does not drive the class):

* baseline (N <= 10^4): CONV when the fitted exponent clears
  BETA_CONV; otherwise PERS when the CMI at the grid maximum still
  sits above I_PERS_FLOOR (a plateau, not noise — the Benford floor is
  3.4e-5 bits); otherwise TRANS.
* extended (N <= 2*10^5), applied to flagged bases only: a base is
  PERS when its tail-window exponent has stalled while the CMI remains
  far above the floor and the resonance parameter is large; it is CONV
  when either the cumulative or the tail-window exponent shows clear
  collapse; otherwise it stays TRANS.

Flagging for the extended pass: every TRANS base, plus borderline
cases — any base with Q* above QSTAR_BORDERLINE (resonance strong
enough to fool the baseline range) and PERS-labeled bases whose
baseline fit is poor (r2 below R2_BORDERLINE).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from statistics import median
from typing import Iterable, Sequence

import numpy as np

from .contfrac import CONV, PERS, TRANS, cf_expand, resonance
from .digits import count_triples_geometric
from .errors import DomainError, InsufficientDataError, ResumeError
from .fitting import PowerLawFit, fit_power_law
from .infocore import cmi, i_infinity, quadratic_ratios, star_discrepancy
from .precision import DEFAULT_DIGITS, log10_int

BASELINE_GRID: tuple[int, ...] = (500, 1000, 2000, 5000, 10000)
EXTENDED_GRID: tuple[int, ...] = BASELINE_GRID + (20000, 40000, 100000, 200000)

#: Exponent above which baseline decay counts as convergent.
BETA_CONV = 1.3
#: CMI (bits) at the baseline grid maximum above which a non-convergent
#: base counts as a persistent plateau.
I_PERS_FLOOR = 0.1
#: Resonance parameter marking a base as borderline for the extended pass.
QSTAR_BORDERLINE = 1_200_000
#: Baseline-fit quality under which a PERS label is treated as borderline.
R2_BORDERLINE = 0.84
#: Tail-window exponent below which extended decay counts as stalled.
SEG_BETA_STALL = 0.45
#: Tail-window exponent that certifies collapse even when the
#: cumulative fit is dragged down by the plateau prefix.
SEG_BETA_CONV = 1.5
#: Stalled bases must also hold the CMI this many times above the floor.
I_OVER_FLOOR_STALL = 10.0
#: Tail window of the extended grid used for the segment fit.
SEG_WINDOW = 5


@dataclass(frozen=True)
class SurveyRecord:
    """One base's analysis: the JSON line schema of survey output."""

    base: int
    cf: tuple[int, ...]
    q_star: int
    grid: tuple[int, ...]
    cmi: tuple[float, ...]
    beta: float
    c: float
    r2: float
    label: str
    quad_ratio: float
    linear_ratio: float
    dstar: float
    resonance_label: str
    resonance_agrees: bool
    dropped: tuple[int, ...] = ()
    stage: str = "baseline"
    seg_beta: float | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "SurveyRecord":
        d = json.loads(line)
        for key in ("cf", "grid", "cmi", "dropped"):
            d[key] = tuple(d[key])
        return cls(**d)


@dataclass(frozen=True)
class SurveySummary:
    """Fold of a record set into per-class counts and CONV-beta stats."""

    counts: dict[str, int]
    pct: dict[str, float]
    beta_mean: float
    beta_sd: float
    beta_median: float
    persistence_rate: float
    beta_histogram: tuple[tuple[float, float, int], ...]
    total: int

    def count(self, label: str) -> int:
        return self.counts.get(label, 0)


def is_power_of_10(b: int) -> bool:
    while b % 10 == 0:
        b //= 10
    return b == 1


def classify_decay(beta: float, i_last: float) -> str:
    """Baseline three-way label from fit exponent and final CMI."""
    if beta > BETA_CONV:
        return CONV
    if i_last >= I_PERS_FLOOR:
        return PERS
    return TRANS


def _fit_series(grid: Sequence[int], cmis: Sequence[float]) -> PowerLawFit:
    try:
        return fit_power_law(zip(grid, cmis), i_infinity())
    except InsufficientDataError:
        return PowerLawFit(c=0.0, beta=0.0, r2=0.0, n_points_used=0,
                           dropped=tuple(int(n) for n in grid))


def _orbit_points_float(b: int, N: int) -> np.ndarray:
    """Float64 orbit {n*alpha} for the discrepancy diagnostic.

    Diagnostic-grade only: the rounding error ~N*1e-16 is far below the
    discrepancy magnitudes of interest (>= 1/(2N))."""
    alpha = log10_int(b).to_float()
    return (np.arange(1, N + 1, dtype=np.float64) * alpha) % 1.0


def analyze_base(b: int, grid: Sequence[int] = BASELINE_GRID,
                 digits: int = DEFAULT_DIGITS, stage: str = "baseline"
                 ) -> SurveyRecord:
    """Full single-base record over a sample-size grid.

    One orbit pass accumulates counts with snapshots at each grid N;
    the CMI series, decay fit, resonance data, curvature ratios at the
    grid maximum, and star discrepancy all derive from that pass.
    """
    grid = tuple(sorted(set(int(n) for n in grid)))
    if not grid:
        raise DomainError("empty sample grid")
    alpha = log10_int(b, digits)
    if alpha.is_rational:
        raise DomainError(f"base {b} is a power of 10: digit triples are "
                          "constant and the orbit is degenerate")
    cf = cf_expand(alpha, max_terms=60)
    n_max = grid[-1]

    snaps = count_triples_geometric(b, n_max, snapshots=grid)
    cmis = tuple(cmi(snaps[n]) for n in grid)
    fit = _fit_series(grid, cmis)
    label = classify_decay(fit.beta, cmis[-1])

    res = resonance(cf, n_max)
    ratios = quadratic_ratios(snaps[n_max].to_probs())
    dstar = star_discrepancy(_orbit_points_float(b, n_max))

    return SurveyRecord(
        base=b, cf=cf.quotients[:15], q_star=res.q_star, grid=grid, cmi=cmis,
        beta=fit.beta, c=fit.c, r2=fit.r2, label=label,
        quad_ratio=ratios["quad_ratio"], linear_ratio=ratios["linear_ratio"],
        dstar=dstar, resonance_label=res.label,
        resonance_agrees=(res.label == label), dropped=fit.dropped,
        stage=stage,
    )


def _analyze_worker(args: tuple[int, tuple[int, ...], int, str]) -> SurveyRecord:
    b, grid, digits, stage = args
    return analyze_base(b, grid, digits, stage)


def _load_existing(path: str, force: bool) -> dict[int, SurveyRecord]:
    """Parse an existing output file for resume; truncate tail damage
    only under ``force``, otherwise refuse."""
    records: dict[int, SurveyRecord] = {}
    if not os.path.exists(path):
        return records
    good = 0
    with open(path, "rb") as f:
        raw = f.read()
    for line in raw.splitlines(keepends=True):
        try:
            if not line.endswith(b"\n"):
                raise ValueError("truncated final line")
            rec = SurveyRecord.from_json(line.decode("utf-8"))
        except (ValueError, KeyError, TypeError) as exc:
            if not force:
                raise ResumeError(
                    f"corrupt record at byte {good} of {path!r} ({exc}); "
                    "pass force=True/--force to truncate and continue"
                ) from exc
            with open(path, "r+b") as f:
                f.truncate(good)
            break
        records[rec.base] = rec
        good += len(line)
    return records


def run_survey(b_lo: int, b_hi: int, grid: Sequence[int] = BASELINE_GRID,
               parallelism: int | None = None, out: str | None = None,
               force: bool = False, digits: int = DEFAULT_DIGITS
               ) -> tuple[list[SurveyRecord], "SurveySummary"]:
    """Analyze every non-power-of-10 base in [b_lo, b_hi].

    Records append to ``out`` (one JSON object per line) as they
    complete, parent process as the single writer, in base order; on
    restart, bases already present in the file are skipped.  Returns
    all records (resumed + fresh) with the folded summary.
    """
    if b_lo < 2 or b_hi < b_lo:
        raise DomainError(f"bad base range [{b_lo}, {b_hi}]")
    bases = [b for b in range(b_lo, b_hi + 1) if not is_power_of_10(b)]
    grid = tuple(sorted(set(int(n) for n in grid)))

    done: dict[int, SurveyRecord] = {}
    if out is not None:
        done = _load_existing(out, force)
        done = {b: r for b, r in done.items() if r.grid == grid}
    todo = [b for b in bases if b not in done]

    if parallelism is None:
        parallelism = os.cpu_count() or 1
    jobs = [(b, grid, digits, "baseline" if grid == BASELINE_GRID else "extended")
            for b in todo]

    sink = open(out, "ab") if out is not None else None
    try:
        if parallelism > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                for rec in pool.map(_analyze_worker, jobs, chunksize=8):
                    done[rec.base] = rec
                    if sink:
                        sink.write(rec.to_json().encode("utf-8") + b"\n")
                        sink.flush()
        else:
            for job in jobs:
                rec = _analyze_worker(job)
                done[rec.base] = rec
                if sink:
                    sink.write(rec.to_json().encode("utf-8") + b"\n")
                    sink.flush()
    finally:
        if sink:
            sink.close()

    records = [done[b] for b in bases if b in done]
    return records, summarize(records)


@dataclass(frozen=True)
class ResolutionReport:
    """Outcome of the extended-range reclassification pass."""

    flagged: tuple[int, ...]
    moves: dict[str, int]
    newly_pers: tuple[int, ...]
    counts: dict[str, int]


def flag_for_extension(records: Iterable[SurveyRecord]) -> list[int]:
    """Bases needing the extended range: all TRANS plus borderline ones."""
    out = []
    for r in records:
        borderline = (r.q_star > QSTAR_BORDERLINE
                      or (r.label == PERS and r.r2 < R2_BORDERLINE))
        if r.label == TRANS or borderline:
            out.append(r.base)
    return sorted(out)


def relabel_extended(record: SurveyRecord) -> tuple[str, float]:
    """Final label of an extended-grid record; returns (label, seg_beta).

    The cumulative fit spans the whole 9-point grid; the segment fit
    spans the last SEG_WINDOW points, isolating the tail behavior from
    any early plateau.
    """
    grid, cmis = record.grid, record.cmi
    if len(grid) < SEG_WINDOW + 1:
        raise DomainError("extended relabeling expects the 9-point grid")
    cum_beta = record.beta
    seg_fit = _fit_series(grid[-SEG_WINDOW:], cmis[-SEG_WINDOW:])
    seg_beta = seg_fit.beta
    i_last = cmis[-1]
    stalled = (seg_beta < SEG_BETA_STALL
               and i_last > I_OVER_FLOOR_STALL * i_infinity()
               and record.q_star > QSTAR_BORDERLINE)
    if stalled:
        return PERS, seg_beta
    if cum_beta > BETA_CONV or seg_beta > SEG_BETA_CONV:
        return CONV, seg_beta
    return TRANS, seg_beta


def resolve_transitional(records: Sequence[SurveyRecord],
                         extended_grid: Sequence[int] = EXTENDED_GRID,
                         parallelism: int | None = None,
                         out: str | None = None, force: bool = False,
                         digits: int = DEFAULT_DIGITS
                         ) -> tuple[list[SurveyRecord], ResolutionReport]:
    """Re-analyze flagged bases at the extended grid and relabel them.

    Unflagged bases keep their baseline records and labels.  Returns
    the updated record set (in base order) and a move report.
    """
    by_base = {r.base: r for r in records}
    flagged = flag_for_extension(records)
    grid = tuple(sorted(set(int(n) for n in extended_grid)))

    done: dict[int, SurveyRecord] = {}
    if out is not None:
        flagged_set = set(flagged)
        done = {b: r for b, r in _load_existing(out, force).items()
                if r.grid == grid and b in flagged_set}
    todo = [b for b in flagged if b not in done]

    if parallelism is None:
        parallelism = os.cpu_count() or 1
    jobs = [(b, grid, digits, "extended") for b in todo]

    def finalize(rec: SurveyRecord) -> SurveyRecord:
        new_label, seg_beta = relabel_extended(rec)
        return replace(rec, label=new_label, seg_beta=seg_beta,
                       resonance_agrees=(rec.resonance_label == new_label))

    sink = open(out, "ab") if out is not None else None
    try:
        if parallelism > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                for rec in pool.map(_analyze_worker, jobs, chunksize=2):
                    rec = finalize(rec)
                    done[rec.base] = rec
                    if sink:
                        sink.write(rec.to_json().encode("utf-8") + b"\n")
                        sink.flush()
        else:
            for job in jobs:
                rec = finalize(_analyze_worker(job))
                done[rec.base] = rec
                if sink:
                    sink.write(rec.to_json().encode("utf-8") + b"\n")
                    sink.flush()
    finally:
        if sink:
            sink.close()

    moves: dict[str, int] = {}
    newly_pers: list[int] = []
    updated: dict[int, SurveyRecord] = dict(by_base)
    for b in flagged:
        ext = finalize(done[b])
        old_label = by_base[b].label
        updated[b] = ext
        if old_label != ext.label:
            key = f"{old_label}->{ext.label}"
            moves[key] = moves.get(key, 0) + 1
        if ext.label == PERS and old_label != PERS:
            newly_pers.append(b)

    final = [updated[b] for b in sorted(updated)]
    counts: dict[str, int] = {}
    for r in final:
        counts[r.label] = counts.get(r.label, 0) + 1
    report = ResolutionReport(flagged=tuple(flagged), moves=moves,
                              newly_pers=tuple(sorted(newly_pers)),
                              counts=counts)
    return final, report


def summarize(records: Sequence[SurveyRecord]) -> SurveySummary:
    """Per-class counts plus decay-exponent statistics over CONV bases."""
    total = len(records)
    counts: dict[str, int] = {}
    for r in records:
        counts[r.label] = counts.get(r.label, 0) + 1
    pct = {k: 100.0 * v / total for k, v in counts.items()} if total else {}
    conv_betas = [r.beta for r in records if r.label == CONV]
    if conv_betas:
        mean = sum(conv_betas) / len(conv_betas)
        sd = math.sqrt(sum((x - mean) ** 2 for x in conv_betas) / len(conv_betas))
        med = float(median(conv_betas))
    else:
        mean = sd = med = float("nan")
    edges = [0.0 + 0.3 * i for i in range(11)]
    hist: list[tuple[float, float, int]] = []
    betas = [r.beta for r in records]
    for lo, hi in zip(edges[:-1], edges[1:]):
        hist.append((lo, hi, sum(1 for x in betas if lo <= x < hi)))
    return SurveySummary(
        counts=counts, pct=pct, beta_mean=mean, beta_sd=sd, beta_median=med,
        persistence_rate=pct.get(PERS, 0.0),
        beta_histogram=tuple(hist), total=total,
    )


def write_summary_csv(summary: SurveySummary, path: str,
                      per_label_beta: dict[str, tuple[float, float]] | None = None
                      ) -> None:
    """CSV summary: label,count,pct,beta_mean,beta_sd (one row per label).

    Exponent statistics are only meaningful for CONV (they are the
    headline survey numbers); other labels carry empty cells unless
    provided explicitly.
    """
    with open(path, "w", encoding="utf-8") as f:
        f.write("label,count,pct,beta_mean,beta_sd\n")
        for label in (CONV, TRANS, PERS):
            count = summary.counts.get(label, 0)
            pct = summary.pct.get(label, 0.0)
            if label == CONV:
                bm, bs = summary.beta_mean, summary.beta_sd
                f.write(f"{label},{count},{pct:.1f},{bm:.3f},{bs:.3f}\n")
            elif per_label_beta and label in per_label_beta:
                bm, bs = per_label_beta[label]
                f.write(f"{label},{count},{pct:.1f},{bm:.3f},{bs:.3f}\n")
            else:
                f.write(f"{label},{count},{pct:.1f},,\n")


def load_records(path: str) -> list[SurveyRecord]:
    """Read a survey output file (strict: corrupt lines raise)."""
    return [r for r in _load_existing(path, force=False).values()]
