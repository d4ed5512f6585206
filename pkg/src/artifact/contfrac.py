"""Continued fractions of log10(b) and the resonance classification.

A base b whose log10 admits an exceptionally good rational
approximation p_k/q_k (equivalently, a huge partial quotient a_{k+1})
has an orbit {n*log10(b)} that nearly repeats with period q_k.  Digit
statistics then stall inside a quasi-period instead of equidistributing.
This module extracts the expansion with a certified stable prefix,
builds convergents, and evaluates the resonance ratio

    R(b, N) = a_{k(N)+1} * q_{k(N)} / N,   k(N) = max{k : q_k <= N},

together with the summary parameter Q* = max_{q_k <= N} a_{k+1}*q_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PrecisionError
from .precision import DEFAULT_DIGITS, FixedReal, log10_int

#: Class labels (shared vocabulary with the survey module).
CONV = "CONV"
TRANS = "TRANS"
PERS = "PERS"


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients with convergents and a certified stable prefix.

    quotients[k] is a_k (a_0 = floor(alpha));  convergents[k] = (p_k, q_k)
    from the usual recurrence with seeds (1, 0), (0, 1).  stable_prefix
    counts how many leading quotients were identical when the expansion
    was recomputed at twice the digit budget; only those are returned.
    """

    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    stable_prefix: int
    digits: int
    exact: bool = False

    def __len__(self) -> int:
        return len(self.quotients)

    def max_partial_quotient(self, upto: int | None = None) -> int:
        """Largest a_k for k >= 1 within the first ``upto`` quotients."""
        qs = self.quotients[1:upto]
        if not qs:
            raise DomainError("no partial quotients beyond a_0")
        return max(qs)


@dataclass(frozen=True)
class ResonanceReport:
    """Resonance data of one base at one sample size."""

    N: int
    k_of_N: int
    ratio_fraction: Fraction
    ratio: float
    q_star: int
    label: str


def _cf_of_fraction(x: Fraction, max_terms: int) -> list[int]:
    """Exact Euclidean expansion of a rational, truncated to max_terms."""
    out: list[int] = []
    p, q = x.numerator, x.denominator
    while q and len(out) < max_terms:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def _convergents(quotients: list[int] | tuple[int, ...]) -> list[tuple[int, int]]:
    p_prev, p_prev2 = 1, 0   # p_{k-1}, p_{k-2}
    q_prev, q_prev2 = 0, 1
    out = []
    for a in quotients:
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        out.append((p, q))
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q
    return out


def cf_expand(alpha: FixedReal, max_terms: int = 15) -> CFExpansion:
    """Continued fraction of alpha with a doubling stability certificate.

    The expansion is computed from the fixed-point value at its native
    digit budget D and again at 2D (recomputed from source when alpha
    records one, otherwise from the certified interval endpoints); the
    longest common prefix is stable.  Too short a stable prefix raises
    rather than returning uncertified quotients.
    """
    if alpha.is_rational:
        quotients = _cf_of_fraction(alpha.as_fraction(), max_terms)
        return CFExpansion(tuple(quotients), tuple(_convergents(quotients)),
                           stable_prefix=len(quotients), digits=alpha.digits,
                           exact=True)

    digits = alpha.digits
    current = alpha
    stable = 0
    base_cf: list[int] = []
    for _ in range(4):
        if current.source is not None:
            base_cf = _cf_of_fraction(current.as_fraction(), max_terms + 1)
            doubled = log10_int(current.source, 2 * digits)
            check_cf = _cf_of_fraction(doubled.as_fraction(), max_terms + 1)
        else:
            # No recomputation route: certify from the error interval.
            scale = current.scale
            lo = Fraction(max(current.mantissa - current.err_ulp, 0), scale)
            hi = Fraction(current.mantissa + current.err_ulp, scale)
            base_cf = _cf_of_fraction(lo, max_terms + 1)
            check_cf = _cf_of_fraction(hi, max_terms + 1)

        stable = 0
        for u, v in zip(base_cf, check_cf):
            if u != v:
                break
            stable += 1
        if stable >= min(max_terms, len(base_cf)):
            break
        if current.source is None:
            break
        digits *= 2
        current = log10_int(current.source, digits)

    if stable == 0:
        raise PrecisionError("no stable partial quotients; raise the digit budget")
    quotients = base_cf[:min(stable, max_terms)]
    return CFExpansion(tuple(quotients), tuple(_convergents(quotients)),
                       stable_prefix=stable, digits=digits)


def convergents_upto(cf: CFExpansion, N: int) -> list[tuple[int, int, int, int]]:
    """All (k, p_k, q_k, a_{k+1}) with q_k <= N.

    Raises when the needed successor quotient a_{k+1} lies beyond the
    certified prefix (the caller must re-expand deeper).
    """
    out = []
    for k, (p, q) in enumerate(cf.convergents):
        if q > N:
            break
        if k + 1 >= len(cf.quotients):
            raise PrecisionError(
                f"successor quotient a_{k + 1} beyond certified prefix; "
                "re-expand with more terms"
            )
        out.append((k, p, q, cf.quotients[k + 1]))
    return out


def resonance(cf: CFExpansion, N: int) -> ResonanceReport:
    """Resonance ratio, Q*, and the three-way label at sample size N.

    Labels (natural log; ties fall to TRANS):
      CONV  iff  Q*              <  N / ln N
      PERS  iff  some a_{k+1}q_k >  N * ln N
      TRANS otherwise.
    """
    if N < 1:
        raise DomainError(f"sample size must be positive, got {N}")
    usable = convergents_upto(cf, N)
    if not usable:
        raise DomainError(f"no convergent denominator <= {N}; report degenerate")
    k, p, q, a_next = usable[-1]
    products = [a1 * q1 for (_, _, q1, a1) in usable]
    q_star = max(products)
    ratio_fraction = Fraction(a_next * q, N)
    log_n = math.log(N)
    if any(prod > N * log_n for prod in products):
        label = PERS
    elif q_star < N / log_n:
        label = CONV
    else:
        label = TRANS
    return ResonanceReport(N=N, k_of_N=k, ratio_fraction=ratio_fraction,
                           ratio=float(ratio_fraction), q_star=q_star, label=label)


def q_star(b: int, N: int, digits: int = DEFAULT_DIGITS) -> int:
    """Convenience: Q* of base b at sample size N."""
    cf = cf_expand(log10_int(b, digits), max_terms=60)
    return resonance(cf, N).q_star


def quotient_sum_bound(cf: CFExpansion, N: int) -> float:
    """Discrepancy bound (3/N) * sum of a_{k+1} over q_k <= N.

    The effective-constant form of the classical partial-quotient bound
    on the star discrepancy of {n*alpha}.
    """
    usable = convergents_upto(cf, N)
    return 3.0 * sum(a for (_, _, _, a) in usable) / N
