"""Leading-digit-triple correlation analysis for orbits of n*log10(b).

The package measures how quickly the empirical joint distribution of
the first three significant decimal digits of b^n (and of linear
recurrences such as the Fibonacci numbers) converges to its limiting
Benford form, quantified by the conditional mutual information
I(D1; D3 | D2) of the digit triple.  Supporting machinery covers
high-precision logarithm orbits, continued-fraction diagnostics,
curvature analysis of the CMI functional at the Benford point,
power-law decay fits, and a resumable multi-base survey driver.
"""

from .errors import (ArtifactError, AmbiguityError, BudgetError, DomainError,
                     InsufficientDataError, PrecisionError, ResumeError,
                     UndefinedRatioError)
from .precision import (DEFAULT_DIGITS, FixedReal, PrecisionBudget,
                        log10_int, orbit_fracs)
from .contfrac import (CONV, PERS, TRANS, CFExpansion, ResonanceReport,
                       cf_expand, convergents_upto, q_star,
                       quotient_sum_bound, resonance)
from .digits import (TripleCounts, SignificandTracker, benford_joint,
                     count_triples_geometric, count_triples_recurrence,
                     lead3_of_int, triple_of_frac)
from .infocore import (GradientReport, HessianSpectrum, DEFAULT_EPS_EIG,
                       cmi, cmi_gradient, cmi_hessian, cmi_hessian_spectrum,
                       i_infinity, l2_distance, markov_projection,
                       quadratic_ratios, star_discrepancy, tangent_basis)
from .fitting import (PowerLawFit, beta_eff_predicted, fit_power_law,
                      n_threshold)
from .survey import (BASELINE_GRID, EXTENDED_GRID, ResolutionReport,
                     SurveyRecord, SurveySummary, analyze_base, load_records,
                     resolve_transitional, run_survey, summarize,
                     write_summary_csv)

__version__ = "0.1.0"

__all__ = [
    "ArtifactError", "AmbiguityError", "BudgetError", "DomainError",
    "InsufficientDataError", "PrecisionError", "ResumeError",
    "UndefinedRatioError",
    "DEFAULT_DIGITS", "FixedReal", "PrecisionBudget", "log10_int",
    "orbit_fracs",
    "CONV", "PERS", "TRANS", "CFExpansion", "ResonanceReport", "cf_expand",
    "convergents_upto", "q_star", "quotient_sum_bound", "resonance",
    "TripleCounts", "SignificandTracker", "benford_joint",
    "count_triples_geometric", "count_triples_recurrence", "lead3_of_int",
    "triple_of_frac",
    "GradientReport", "HessianSpectrum", "DEFAULT_EPS_EIG", "cmi",
    "cmi_gradient", "cmi_hessian", "cmi_hessian_spectrum", "i_infinity",
    "l2_distance", "markov_projection", "quadratic_ratios",
    "star_discrepancy", "tangent_basis",
    "PowerLawFit", "beta_eff_predicted", "fit_power_law", "n_threshold",
    "BASELINE_GRID", "EXTENDED_GRID", "ResolutionReport", "SurveyRecord",
    "SurveySummary", "analyze_base", "load_records", "resolve_transitional",
    "run_survey", "summarize", "write_summary_csv",
    "__version__",
]
