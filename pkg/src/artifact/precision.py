"""Fixed-point decimal arithmetic with certified error bounds.

The central object is :class:`FixedReal`, an integer mantissa scaled by
10^-D together with an error bound counted in units of the last place
(ulp).  It is just enough arbitrary-precision machinery to

* compute alpha = log10(b) of an integer base to a requested digit
  budget with a certified error of at most 2 ulp, and
* stream the orbit fractional parts {n*alpha} for n = 1..N by
  incremental addition mod 1, cheap enough to sweep hundreds of bases.

Everything downstream (digit triples, continued fractions) consumes
these certified values, so correctness here is load-bearing: the digit
of a power b^n is read off from {n*alpha}, and a wrong ulp bound would
silently corrupt digit statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from mpmath import mp

from .errors import BudgetError, DomainError, PrecisionError

#: Default working precision in decimal digits.  500 digits keeps the
#: accumulated orbit error below 1e-490 even at N = 10^6, i.e. absurdly
#: far below the narrowest digit-triple cell (width ~ 4.3e-4).
DEFAULT_DIGITS = 500

#: Hard floor on the digit budget; smaller scales cannot certify
#: digit-triple extraction.
MIN_DIGITS = 50

#: Minimum certified distance from a cylinder boundary (absolute units)
#: before a digit-triple decision is declared ambiguous.
DEFAULT_SAFETY_MARGIN = 1e-20


@dataclass(frozen=True)
class FixedReal:
    """A real number mantissa * 10^-digits, known to +/- err_ulp ulp.

    ``source`` optionally records the integer whose log10 this value
    is; it lets consumers recompute the same quantity at a different
    digit budget (used by the continued-fraction stability test).
    """

    mantissa: int
    digits: int
    err_ulp: int = 0
    is_rational: bool = False
    source: int | None = None

    def __post_init__(self):
        if self.digits < MIN_DIGITS:
            raise BudgetError(f"digit budget {self.digits} below hard floor {MIN_DIGITS}")
        if self.err_ulp < 0:
            raise DomainError("negative error bound")

    @property
    def scale(self) -> int:
        """10**digits, the denominator of the fixed-point representation."""
        return 10 ** self.digits

    def as_fraction(self) -> Fraction:
        return Fraction(self.mantissa, self.scale)

    def to_float(self) -> float:
        """Nearest-double approximation (top 18 digits only, so large
        mantissas never overflow the float range)."""
        shift = self.digits - 18
        if shift <= 0:
            return self.mantissa / self.scale
        return float(self.mantissa // 10**shift) * 10.0 ** (shift - self.digits)

    def frac(self) -> "FixedReal":
        """Fractional part; error bound is preserved."""
        return FixedReal(self.mantissa % self.scale, self.digits, self.err_ulp,
                         self.is_rational, None)

    def __float__(self) -> float:  # pragma: no cover - convenience
        return self.to_float()


@dataclass(frozen=True)
class PrecisionBudget:
    """How far an orbit may run at a given digit budget.

    Invariant (checked at construction): the worst-case accumulated
    orbit error max_n * (err0 + 1) ulp stays below 1e-10, far under the
    narrowest cylinder width.  ``safety_margin`` is the certified
    distance from a cell boundary below which digit extraction refuses
    to decide.
    """

    digits: int = DEFAULT_DIGITS
    max_n: int = 10**6
    safety_margin: float = DEFAULT_SAFETY_MARGIN
    initial_err_ulp: int = 2

    def __post_init__(self):
        if self.digits < MIN_DIGITS:
            raise BudgetError(f"digit budget {self.digits} below hard floor {MIN_DIGITS}")
        worst = self.max_n * (self.initial_err_ulp + 1)
        if worst >= 10 ** max(self.digits - 10, 0):
            raise BudgetError(
                f"budget cannot certify {self.max_n} orbit steps at {self.digits} digits"
            )

    @property
    def margin_ulp(self) -> int:
        """Safety margin converted to ulp at this budget's scale."""
        # Fraction keeps 10**digits out of float range.
        return int(Fraction(self.safety_margin) * 10**self.digits)

    @classmethod
    def for_orbit(cls, max_n: int, digits: int | None = None,
                  safety_margin: float = DEFAULT_SAFETY_MARGIN) -> "PrecisionBudget":
        """Budget for an orbit of length ``max_n``.

        The default 500 digits already keeps N*ulp below 1e-20 for any
        realistic N; the digit count is raised automatically in the
        (theoretical) regime where it would not.
        """
        if digits is None:
            digits = DEFAULT_DIGITS
            needed = 25 + math.ceil(math.log10(max(max_n, 1) + 1))
            if needed > digits:
                digits = needed
        return cls(digits=digits, max_n=max_n, safety_margin=safety_margin)


def _is_power_of_10(b: int) -> bool:
    while b % 10 == 0:
        b //= 10
    return b == 1


@lru_cache(maxsize=4096)
def log10_int(b: int, digits: int = DEFAULT_DIGITS) -> FixedReal:
    """log10 of an integer base as a FixedReal with err_ulp <= 2.

    Exact powers of ten come back flagged rational with zero error;
    every other base is irrational (a power b = 10^(p/q) would force
    b^q = 10^p, impossible unless b is itself a power of ten).

    The value is evaluated twice at staggered guard precisions and the
    two floors must agree to within 1 ulp, which certifies the bound.
    """
    if not isinstance(b, int) or b < 2:
        raise DomainError(f"base must be an integer >= 2, got {b!r}")
    if digits < MIN_DIGITS:
        raise BudgetError(f"digit budget {digits} below hard floor {MIN_DIGITS}")
    scale = 10**digits
    if _is_power_of_10(b):
        k = len(str(b)) - 1
        return FixedReal(k * scale, digits, 0, is_rational=True, source=b)

    guard = 15
    for _ in range(6):
        with mp.workdps(digits + guard):
            m1 = int(mp.floor(mp.log(b) / mp.ln10 * scale))
        with mp.workdps(digits + guard + 25):
            m2 = int(mp.floor(mp.log(b) / mp.ln10 * scale))
        if abs(m1 - m2) <= 1:
            return FixedReal(m2, digits, 2, is_rational=False, source=b)
        guard *= 2
    raise PrecisionError(f"log10({b}) failed to stabilize at {digits} digits")


def orbit_mantissas(alpha: FixedReal, N: int) -> Iterator[int]:
    """Raw integer mantissas of {n*alpha} for n = 1..N.

    This is the allocation-free inner loop behind :func:`orbit_fracs`;
    digit binning iterates it directly for speed.  One add and at most
    one subtract per step, deterministic.
    """
    scale = alpha.scale
    step = alpha.mantissa % scale
    v = 0
    for _ in range(N):
        v += step
        if v >= scale:
            v -= scale
        yield v


def orbit_fracs(alpha: FixedReal, N: int,
                budget: PrecisionBudget | None = None) -> Iterator[FixedReal]:
    """Stream {n*alpha} for n = 1..N as certified FixedReal values.

    The error bound grows additively: err_n <= n*(err_0 + 1).  The
    accumulated bound is asserted against the budget's safety margin
    when the stream completes, so a consumer that exhausts the stream
    has a certificate that every point it saw was good.
    """
    if alpha.is_rational:
        raise DomainError(
            f"rational rotation number (base {alpha.source}): orbit is periodic "
            "and excluded from digit analysis"
        )
    if budget is None:
        budget = PrecisionBudget.for_orbit(N, digits=alpha.digits)
    if N > budget.max_n:
        raise BudgetError(f"N={N} exceeds budget max_n={budget.max_n}")
    per_step = alpha.err_ulp + 1
    err = 0
    n = 0
    for v in orbit_mantissas(alpha, N):
        n += 1
        err += per_step
        yield FixedReal(v, alpha.digits, err)
    if n == N and err > budget.margin_ulp:
        raise PrecisionError(
            f"accumulated orbit error {err} ulp breaches safety margin at n={n}"
        )
