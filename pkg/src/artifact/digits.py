"""Leading digit triples of big-number sequences.

The first three significant digits of x form delta = floor(100 * m)
with m in [1, 10) the significand; equivalently delta = floor(10^(f+2))
with f = frac(log10 x).  Three independent routes produce triples here:

* exact integers (small powers, oracle checks): decimal string,
* orbit binning: binary search of {n*alpha} against the 900 cylinder
  boundaries log10(delta), with a certified ambiguity margin,
* significand trackers for recurrences (Fibonacci, factorial) that
  carry a guarded fixed-point significand instead of a logarithm.

A point too close to a boundary is never guessed: it is either
resolved exactly from the defining integer or raises AmbiguityError.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import AmbiguityError, DomainError
from .precision import DEFAULT_DIGITS, FixedReal, PrecisionBudget, log10_int

#: Number of digit-triple cells: delta = 100..999.
N_CELLS = 900

#: Guard digits for significand trackers.
DEFAULT_GUARD_DIGITS = 50

#: Tracker checkpoint spacing (steps between recovery snapshots).
CHECKPOINT_EVERY = 1000


_LOG10_2 = math.log10(2)


def _decimal_digits(x: int) -> int:
    """Exact decimal digit count of a positive integer (string-free, so
    million-digit factorials do not trip the int->str conversion cap)."""
    d = int(x.bit_length() * _LOG10_2) + 1
    while 10 ** (d - 1) > x:
        d -= 1
    while 10**d <= x:
        d += 1
    return d


def lead3_of_int(x: int) -> int:
    """First three significant digits of a positive integer, as an
    integer in 100..999 (short numbers pad with zeros: 64 -> 640)."""
    if x <= 0:
        raise DomainError("leading digits need a positive integer")
    d = _decimal_digits(x)
    if d >= 3:
        return x // 10 ** (d - 3)
    return x * 10 ** (3 - d)


@dataclass
class TripleCounts:
    """Empirical counts over the 900 digit-triple cells."""

    counts: np.ndarray       # shape (900,), integer dtype
    total: int

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (N_CELLS,):
            raise DomainError(f"expected {N_CELLS} cells, got {self.counts.shape}")
        if int(self.counts.sum()) != self.total:
            raise DomainError("cell counts do not sum to the stated total")

    def to_probs(self) -> np.ndarray:
        if self.total == 0:
            raise DomainError("empty counts have no distribution")
        return self.counts.astype(np.float64) / float(self.total)

    def __add__(self, other: "TripleCounts") -> "TripleCounts":
        return TripleCounts(self.counts + other.counts, self.total + other.total)


class CylinderTable:
    """Exact decimal boundaries of the 900 digit-triple cylinders.

    boundaries[j] is the mantissa of frac(log10(100 + j)) at the given
    digit budget (so boundaries[0] = 0 for delta = 100); a trailing
    sentinel 10^D closes the last cell.  Widths telescope to 1 exactly.
    """

    def __init__(self, digits: int = DEFAULT_DIGITS,
                 safety_margin: float | None = None):
        self.digits = digits
        scale = 10**digits
        two_scale = 2 * scale
        bounds = []
        for delta in range(100, 1000):
            alpha = log10_int(delta, digits)
            bounds.append(alpha.mantissa - two_scale)
        self.boundaries: list[int] = bounds
        self.sentinel: int = scale
        if safety_margin is None:
            safety_margin = PrecisionBudget().safety_margin
        # Fraction sidesteps float overflow for scale = 10**digits.
        self.margin_ulp: int = max(int(Fraction(safety_margin) * scale), 1)

    def widths(self) -> np.ndarray:
        """Cell widths log10(1 + 1/delta); exact last-entry telescoping."""
        return benford_joint()

    def lookup(self, mantissa: int, err_ulp: int) -> int:
        """Cell index of an orbit mantissa, or -1 when ambiguous.

        A decision is certified only when the point sits more than
        err_ulp + margin away from both enclosing boundaries.
        """
        j = bisect_right(self.boundaries, mantissa) - 1
        margin = err_ulp + self.margin_ulp
        lo_gap = mantissa - self.boundaries[j]
        hi_bound = self.boundaries[j + 1] if j + 1 < N_CELLS else self.sentinel
        hi_gap = hi_bound - mantissa
        if lo_gap <= margin or hi_gap <= margin:
            return -1
        return j


@lru_cache(maxsize=8)
def _table(digits: int) -> CylinderTable:
    return CylinderTable(digits)


def triple_of_frac(theta: FixedReal, table: CylinderTable | None = None) -> int:
    """Digit triple of the point with log10-fractional part theta.

    Binary search over the cylinder boundaries; a point within the
    safety margin of a boundary raises AmbiguityError rather than
    guessing (the caller can resolve the source number exactly or
    raise precision).
    """
    if table is None:
        table = _table(theta.digits)
    if theta.digits != table.digits:
        raise DomainError("theta and table disagree on digit budget")
    mantissa = theta.mantissa % theta.scale
    j = table.lookup(mantissa, theta.err_ulp)
    if j < 0:
        raise AmbiguityError(
            "orbit point within safety margin of a cylinder boundary", None
        )
    return 100 + j


def _exact_prefix_length(b: int) -> int:
    """Largest n for which b^n can have at most 3 significant digits.

    Stripping powers of ten, b = c * 10^w with c coprime to 10 in the
    sense min(v2, v5) = 0; then b^n has <= 3 significant digits iff
    c^n < 1000.  Beyond that index no exact boundary hit can occur and
    orbit binning is provably unambiguous for well-separated points.
    """
    c = b
    while c % 10 == 0:
        c //= 10
    n = 0
    p = 1
    while p * c < 1000:
        p *= c
        n += 1
    return max(n, 12)


def count_triples_geometric(b: int, N: int,
                            budget: PrecisionBudget | None = None,
                            snapshots: Iterable[int] | None = None
                            ) -> TripleCounts | dict[int, TripleCounts]:
    """Digit-triple counts of b^n for n = 1..N via orbit binning.

    Small n (where an exact boundary hit is possible) use exact integer
    powers; the rest stream the certified orbit.  The rare point that
    falls inside the ambiguity margin is resolved exactly from b^n.
    With ``snapshots`` (sorted sample sizes), returns a dict of counts
    at each requested N from a single pass.
    """
    if not isinstance(b, int) or b < 2:
        raise DomainError(f"base must be an integer >= 2, got {b!r}")
    alpha = log10_int(b, budget.digits if budget else DEFAULT_DIGITS)
    if alpha.is_rational:
        raise DomainError(f"base {b} is a power of 10; digit triples are constant")
    if budget is None:
        budget = PrecisionBudget.for_orbit(N, digits=alpha.digits)

    snap_list = sorted(set(snapshots)) if snapshots is not None else [N]
    if snap_list[-1] != N or any(s < 1 for s in snap_list):
        raise DomainError("snapshots must be positive and end at N")

    counts = np.zeros(N_CELLS, dtype=np.int64)
    out: dict[int, TripleCounts] = {}
    snap_iter = iter(snap_list)
    next_snap = next(snap_iter)

    table = _table(alpha.digits)
    boundaries = table.boundaries
    sentinel = table.sentinel
    margin = table.margin_ulp + (alpha.err_ulp + 1) * N

    n_exact = min(_exact_prefix_length(b), N)
    power = 1
    for n in range(1, n_exact + 1):
        power *= b
        counts[lead3_of_int(power) - 100] += 1
        while n == next_snap:
            out[n] = TripleCounts(counts.copy(), n)
            next_snap = next(snap_iter, None)
            if next_snap is None:
                break

    if n_exact < N:
        scale = alpha.scale
        step = alpha.mantissa % scale
        v = (step * n_exact) % scale
        n = n_exact
        for _ in range(N - n_exact):
            n += 1
            v += step
            if v >= scale:
                v -= scale
            j = bisect_right(boundaries, v) - 1
            hi_bound = boundaries[j + 1] if j + 1 < N_CELLS else sentinel
            if v - boundaries[j] <= margin or hi_bound - v <= margin:
                # Certify the straggler from the exact integer power.
                j = lead3_of_int(pow(b, n)) - 100
            counts[j] += 1
            while n == next_snap:
                out[n] = TripleCounts(counts.copy(), n)
                next_snap = next(snap_iter, None)
                if next_snap is None:
                    break

    if snapshots is None:
        return out[N]
    return out


class SignificandTracker:
    """Fixed-point significand in [1, 10) with guard digits.

    The significand is stored as an integer ``mantissa`` in
    [10^G, 10^(G+1)), value = mantissa * 10^-G, together with the
    decimal exponent and an error bound in ulp.  Updates renormalize
    back into [1, 10) and accumulate error conservatively.  When the
    bound can no longer certify a digit triple the tracker signals, and
    the driver re-seeds it exactly from the last checkpoint.
    """

    __slots__ = ("guard", "mantissa", "exponent", "err_ulp", "renorm_count")

    def __init__(self, guard: int = DEFAULT_GUARD_DIGITS):
        if guard < 10:
            raise DomainError("tracker needs at least 10 guard digits")
        self.guard = guard
        self.mantissa = 10**guard
        self.exponent = 0
        self.err_ulp = 0
        self.renorm_count = 0

    def seed_from_int(self, x: int) -> None:
        """Set the tracker to the exact significand of a positive integer."""
        if x <= 0:
            raise DomainError("tracker seed must be positive")
        digits = _decimal_digits(x)
        self.exponent = digits - 1
        if digits - 1 <= self.guard:
            self.mantissa = x * 10 ** (self.guard - digits + 1)
            self.err_ulp = 0
        else:
            shift = digits - 1 - self.guard
            self.mantissa = x // 10**shift
            self.err_ulp = 1

    def _renormalize(self) -> None:
        top = 10 ** (self.guard + 1)
        while self.mantissa >= top:
            self.mantissa //= 10
            self.err_ulp = self.err_ulp // 10 + 1
            self.exponent += 1
            self.renorm_count += 1

    def mul_int(self, k: int) -> None:
        """Multiply by a positive integer and renormalize."""
        self.mantissa *= k
        self.err_ulp *= k
        self._renormalize()

    def add_tracker(self, other: "SignificandTracker") -> None:
        """Add another tracked value of equal or smaller exponent."""
        shift = self.exponent - other.exponent
        if shift < 0:
            raise DomainError("addend must not exceed the tracked exponent")
        self.mantissa += other.mantissa // 10**shift if shift else other.mantissa
        self.err_ulp += (other.err_ulp // 10**shift if shift else other.err_ulp) + 1
        self._renormalize()

    def copy(self) -> "SignificandTracker":
        t = SignificandTracker(self.guard)
        t.mantissa, t.exponent = self.mantissa, self.exponent
        t.err_ulp, t.renorm_count = self.err_ulp, self.renorm_count
        return t

    def certified_triple(self) -> int:
        """Digit triple floor(100 * significand), or -1 when the error
        bound reaches the nearest triple boundary.

        The true value v satisfies |mantissa - v| <= err_ulp, so the
        triple is certain iff no cell boundary lies in [mantissa -
        err_ulp, mantissa + err_ulp); an exactly tracked value
        (err_ulp = 0) always certifies.
        """
        unit = 10 ** (self.guard - 2)
        j, rem = divmod(self.mantissa, unit)
        if rem < self.err_ulp or unit - rem <= self.err_ulp:
            return -1
        return int(j)

    def error_exceeds_margin(self) -> bool:
        """True once the certified error reaches 10^-(guard-5), i.e.
        err_ulp >= 10^5; the driver must re-seed at higher guard."""
        return self.err_ulp >= 10**5


def _fib_exact(n: int) -> int:
    """n-th Fibonacci number, F_1 = F_2 = 1 (fast doubling)."""
    def fd(m: int) -> tuple[int, int]:
        if m == 0:
            return (0, 1)
        a, b = fd(m >> 1)
        c = a * ((b << 1) - a)
        d = a * a + b * b
        return (d, c + d) if m & 1 else (c, d)
    return fd(n)[0]


def _seed_trackers(kind: str, n: int, guard: int
                   ) -> tuple[SignificandTracker, SignificandTracker | None]:
    """Exactly seeded tracker state for term n of the recurrence."""
    cur = SignificandTracker(guard)
    if kind == "fibonacci":
        prev = SignificandTracker(guard)
        cur.seed_from_int(_fib_exact(n))
        prev.seed_from_int(_fib_exact(n - 1))
        return cur, prev
    cur.seed_from_int(math.factorial(n))
    return cur, None


def count_triples_recurrence(kind: str, N: int,
                             guard: int = DEFAULT_GUARD_DIGITS,
                             snapshots: Iterable[int] | None = None
                             ) -> TripleCounts | dict[int, TripleCounts]:
    """Digit-triple counts of Fibonacci numbers or factorials, n = 1..N.

    Fibonacci uses F_1 = F_2 = 1 and starts counting at F_1 (terms
    below 100 pad by the significand convention, e.g. F_1 = 1 -> 100).
    Factorial multiplies and renormalizes every step.  Both maintain a
    guarded significand tracker, checkpointed every 10^3 steps; a
    triple the tracker cannot certify is resolved from the exact
    bignum, and when the tracker's accumulated drift crosses its own
    margin (error >= 10^-(guard-5)) the guard is doubled and the state
    is re-seeded exactly at the last checkpoint.
    """
    kind = kind.lower()
    if kind not in ("fibonacci", "factorial"):
        raise DomainError(f"unknown recurrence kind: {kind!r}")
    if N < 3:
        raise DomainError("recurrence counting needs N >= 3")

    snap_list = sorted(set(snapshots)) if snapshots is not None else [N]
    if snap_list[-1] != N or any(s < 1 for s in snap_list):
        raise DomainError("snapshots must be positive and end at N")

    counts = np.zeros(N_CELLS, dtype=np.int64)
    out: dict[int, TripleCounts] = {}
    snap_idx = 0
    exact_value = _fib_exact if kind == "fibonacci" else math.factorial

    def emit(n: int, triple: int) -> None:
        nonlocal snap_idx
        counts[triple - 100] += 1
        while snap_idx < len(snap_list) and snap_list[snap_idx] == n:
            out[n] = TripleCounts(counts.copy(), n)
            snap_idx += 1

    # Exact integer prefix: covers every n where the term can have
    # <= 3 significant digits, so later boundary hits are impossible.
    prefix = min(N, 30)
    if kind == "fibonacci":
        a, nxt = 1, 1
        for n in range(1, prefix + 1):
            emit(n, lead3_of_int(a))
            a, nxt = nxt, a + nxt
    else:
        fact = 1
        for n in range(1, prefix + 1):
            fact *= n
            emit(n, lead3_of_int(fact))
    if N <= prefix:
        return out[N] if snapshots is None else out

    cur, prev = _seed_trackers(kind, prefix, guard)
    checkpoint = (prefix, counts.copy(), snap_idx)
    n = prefix
    while n < N:
        n += 1
        if kind == "fibonacci":
            stepped = cur.copy()
            stepped.add_tracker(prev)
            prev, cur = cur, stepped
        else:
            cur.mul_int(n)

        if cur.err_ulp >= 10**5:
            # Drift margin breached: double guard, rewind to checkpoint.
            guard *= 2
            n, saved_counts, snap_idx = checkpoint
            counts[:] = saved_counts
            out = {k: v for k, v in out.items() if k <= n}
            cur, prev = _seed_trackers(kind, n, guard)
            continue

        triple = cur.certified_triple()
        if triple < 0:
            triple = lead3_of_int(exact_value(n))
        emit(n, triple)

        if n % CHECKPOINT_EVERY == 0:
            checkpoint = (n, counts.copy(), snap_idx)

    return out[N] if snapshots is None else out


@lru_cache(maxsize=1)
def benford_joint() -> np.ndarray:
    """Limiting joint law over digit triples: P(delta) = log10(1+1/delta).

    The last entry is taken as one minus the partial sum, so the vector
    lies on the simplex exactly in floating point.
    """
    delta = np.arange(100, 1000, dtype=np.float64)
    p = np.log10(1.0 + 1.0 / delta)
    p[-1] = 1.0 - p[:-1].sum()
    p.setflags(write=False)
    return p
