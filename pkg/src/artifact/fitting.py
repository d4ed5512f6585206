"""Power-law fits of CMI decay, I_N - I_inf ~ c * N^-beta.

Ordinary least squares on (ln N, ln(I_N - I_inf)).  Samples at or below
the floor I_inf have no defined logarithm and are dropped — but always
recorded, so the dropping policy is auditable.  Also provides the
threshold solver N(I < target) and the second-order effective-exponent
prediction used as a cross-check on fitted exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InsufficientDataError


@dataclass(frozen=True)
class PowerLawFit:
    """OLS fit I_N - i_inf = c * N^-beta."""

    c: float
    beta: float
    r2: float
    n_points_used: int
    dropped: tuple[int, ...] = field(default_factory=tuple)

    def predict(self, n: float, i_inf: float = 0.0) -> float:
        return self.c * n ** (-self.beta) + i_inf


def fit_power_law(samples, i_inf: float) -> PowerLawFit:
    """Fit (N, I_N) pairs to a shifted power law.

    Samples with I_N <= i_inf are dropped (and listed); fewer than
    three usable points raise.  beta is reported positive for decay.
    """
    samples = list(samples)
    usable = [(n, i) for n, i in samples if i > i_inf]
    dropped = tuple(int(n) for n, i in samples if i <= i_inf)
    if len(usable) < 3:
        raise InsufficientDataError(
            f"power-law fit needs >= 3 samples above the floor, got {len(usable)}"
        )
    x = np.log([float(n) for n, _ in usable])
    y = np.log([i - i_inf for _, i in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    centered = y - y.mean()
    ss_tot = float(centered @ centered)
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-20 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    r2 = min(max(r2, 0.0), 1.0)
    return PowerLawFit(c=float(math.exp(intercept)), beta=float(-slope), r2=r2,
                       n_points_used=len(usable), dropped=dropped)


def n_threshold(fit: PowerLawFit, i_target: float) -> float:
    """Smallest integer N with c * N^-beta < i_target.

    Exponents beta <= 0.05 mean no practical decay: returns inf.
    """
    if i_target <= 0:
        raise DomainError("threshold target must be positive")
    if fit.beta <= 0.05:
        return math.inf
    x = (fit.c / i_target) ** (1.0 / fit.beta)
    return float(math.floor(x) + 1)


def beta_eff_predicted(N: int, c_sub: float) -> float:
    """Second-order effective decay exponent at finite N:

        beta_eff(N) = 2 - 2 ln ln N / ln N + c_sub / ln N.

    Tends to 2 as N grows; the c_sub constant absorbs the
    O(1/log N) term.
    """
    if N < 100:
        raise DomainError("effective exponent needs N >= 100")
    ln_n = math.log(N)
    return 2.0 - 2.0 * math.log(ln_n) / ln_n + c_sub / ln_n
