"""Exact lattice-point counts for degree constraint systems and exponent fits.

A constraint system bounds integer pairs ``(a, b)`` by

    |a| <= L^ell,   |b| <= L^m,   |a|^p |b|^q <= L^n

(the last bound optional).  Counting is exact big-integer arithmetic; floating
point only enters in :func:`fit_growth`, downstream of the counts.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np

DEFAULT_BUDGET = 50_000_000

#: power_log must cut the pure-power residual by this factor to be selected
LOG_MODEL_GAIN = 0.8
#: residuals below this are treated as an exact fit
RESIDUAL_FLOOR = 1e-9
#: smallest fitted log-exponent accepted as a real log factor (rounds to >= 1)
MIN_LOG_EXPONENT = 0.5


class BudgetExceeded(RuntimeError):
    """Raised when a plain count would take more iterations than allowed."""


@dataclass(frozen=True)
class ConstraintSystem:
    ell: int
    m: int
    p: Optional[int] = None
    q: Optional[int] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.ell < 1 or self.m < 1:
            raise ValueError(f"box exponents must be >= 1, got ({self.ell}, {self.m})")
        mono = (self.p, self.q, self.n)
        if any(v is None for v in mono) and any(v is not None for v in mono):
            raise ValueError("monomial constraint needs all of p, q, n")
        if self.has_monomial:
            if self.p < 0 or self.q < 0 or self.p + self.q < 1:
                raise ValueError(f"need p, q >= 0 with p + q >= 1, got p={self.p}, q={self.q}")
            if self.n < 0:
                raise ValueError(f"n must be >= 0, got {self.n}")

    @property
    def has_monomial(self) -> bool:
        return self.n is not None

    def to_json(self) -> dict:
        return asdict(self)


def integer_root(N: int, q: int) -> int:
    """Largest integer t with t**q <= N."""
    if q < 1:
        raise ValueError("q must be positive")
    if N < 0:
        raise ValueError("N must be nonnegative")
    if q == 2:
        return math.isqrt(N)
    return int(gmpy2.iroot(N, q)[0])


def _reduced_monomial(sys: ConstraintSystem, L: int) -> Tuple[int, int, int]:
    """(p', q', N) with |a|^p |b|^q <= L^n  <=>  |a|^p' |b|^q' <= N.

    Dividing out g = gcd(p, q) replaces L^n by its floor g-th root, which is
    exact for integer left-hand sides.
    """
    p, q = sys.p, sys.q
    g = math.gcd(p, q)
    return p // g, q // g, integer_root(L ** sys.n, g)


def _limit(p: int, q: int, N: int, B: int, a: int) -> int:
    """Largest admissible |b| given |a| (box cap B), or -1 if none."""
    ap = a ** p
    if q == 0:
        return B if ap <= N else -1
    if ap == 0:
        return B
    if ap > N:
        return 0
    return min(B, integer_root(N // ap, q))


def _dense_sum(p: int, q: int, N: int, lo: int, hi: int) -> int:
    """sum of the uncapped limits over lo <= a <= hi, all with 0 < a^p <= N."""
    if q == 1:
        if p == 1:
            return sum(N // a for a in range(lo, hi + 1))
        if p == 2:
            return sum(N // (a * a) for a in range(lo, hi + 1))
        return sum(N // a ** p for a in range(lo, hi + 1))
    if q == 2:
        isqrt = math.isqrt
        return sum(isqrt(N // a ** p) for a in range(lo, hi + 1))
    return sum(integer_root(N // a ** p, q) for a in range(lo, hi + 1))


def count_pairs(sys: ConstraintSystem, L: int, *, budget: int = DEFAULT_BUDGET,
                blocked: bool = False) -> int:
    """Number of integer pairs (a, b) satisfying ``sys`` at scale ``L``.

    The plain path walks every a in [0, L^ell] and refuses to start when that
    exceeds ``budget`` iterations.  ``blocked`` additionally collapses runs of
    consecutive a sharing one b-limit, and is not budget-limited.  Both are
    exact; a != 0 is counted twice for the sign of a, and each limit t
    contributes the 2t + 1 values of b.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    A, B = L ** sys.ell, L ** sys.m
    if not sys.has_monomial:
        return (2 * A + 1) * (2 * B + 1)
    if not blocked and A + 1 > budget:
        raise BudgetExceeded(
            f"L^ell = {A} exceeds the iteration budget {budget}; use blocked mode"
        )
    p, q, N = _reduced_monomial(sys, L)
    total = 2 * _limit(p, q, N, B, 0) + 1
    if p == 0 or q == 0:
        if p == 0:
            return (2 * A + 1) * (2 * _limit(p, q, N, B, 1) + 1)
        # q == 0: a ranges up to the p-th root of N, every b allowed
        amax = min(A, integer_root(N, p))
        return total + 2 * amax * (2 * B + 1)
    # a <= a_cap: the box bound on b is the binding one
    a_cap = min(A, integer_root(N // B ** q, p))
    total += 2 * a_cap * (2 * B + 1)
    # a > a_zero: only b = 0 survives
    a_zero = min(A, integer_root(N, p))
    total += 2 * (A - a_zero)
    lo, hi = a_cap + 1, a_zero
    if lo > hi:
        return total
    if not blocked:
        return total + 2 * (2 * _dense_sum(p, q, N, lo, hi) + (hi - lo + 1))
    a = lo
    s = 0
    while a <= hi:
        t = integer_root(N // a ** p, q)
        run_end = min(hi, integer_root(N // t ** q, p))
        if run_end - a >= 8:
            s += t * (run_end - a + 1)
            a = run_end + 1
        else:
            stop = min(hi, a + 4095)
            s += _dense_sum(p, q, N, a, stop)
            a = stop + 1
    return total + 2 * (2 * s + (hi - lo + 1))


def brute_force_count(sys: ConstraintSystem, L: int) -> int:
    """Double loop over the whole box; for cross-checking small cases only."""
    A, B = L ** sys.ell, L ** sys.m
    top = L ** sys.n if sys.has_monomial else None
    count = 0
    for a in range(-A, A + 1):
        for b in range(-B, B + 1):
            if top is None or abs(a) ** sys.p * abs(b) ** sys.q <= top:
                count += 1
    return count


# -- closed form ---------------------------------------------------------------


def closed_form_exponent(sys: ConstraintSystem) -> Tuple[Fraction, bool]:
    """Growth exponent of the lattice count, and whether a log factor appears."""
    ell, m = sys.ell, sys.m
    if not sys.has_monomial:
        return Fraction(ell + m), False
    p, q, n = sys.p, sys.q, sys.n
    if p < 1 or q < 1:
        raise ValueError("closed form needs p, q >= 1")
    if n >= p * ell + q * m:
        return Fraction(ell + m), False
    e1 = ell + Fraction(n - p * ell, q)
    e2 = m + Fraction(n - q * m, p)
    area = max(e1, e2)
    r = max(area, Fraction(ell), Fraction(m))
    return r, (e1 == e2 and area == r)


# -- sampling and fits ---------------------------------------------------------


@dataclass(frozen=True)
class GrowthSample:
    L: int
    count: int


def sample_grid(lmin: int, lmax: int, points: int, spacing: str = "log") -> List[int]:
    """Distinct integer L values between lmin and lmax (inclusive)."""
    if points < 1 or lmin < 1 or lmax < lmin:
        raise ValueError("bad grid")
    if spacing == "log":
        raw = np.geomspace(lmin, lmax, points)
    elif spacing == "linear":
        raw = np.linspace(lmin, lmax, points)
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    return sorted({int(round(v)) for v in raw})


def collect_samples(sys: ConstraintSystem, Ls: Iterable[int], **kw) -> List[GrowthSample]:
    return [GrowthSample(L, count_pairs(sys, L, **kw)) for L in Ls]


def samples_to_csv(samples: Sequence[GrowthSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["L", "count"])
    for s in samples:
        w.writerow([s.L, str(s.count)])
    return buf.getvalue()


def samples_from_csv(text: str) -> List[GrowthSample]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [GrowthSample(int(r["L"]), int(r["count"])) for r in rows]


@dataclass(frozen=True)
class FitResult:
    model: str  # "pure_power" or "power_log"
    r_hat: float
    gamma_hat: float
    residual: float
    n_samples: int
    residual_pure: float
    residual_log: float

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "r_hat": self.r_hat,
            "gamma_hat": self.gamma_hat,
            "residual": self.residual,
            "n_samples": self.n_samples,
        }


def _lstsq(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    rms = float(np.sqrt(np.mean((X @ coef - y) ** 2)))
    return coef, rms


def _log_count(c: int) -> float:
    # counts can exceed float range
    if c <= 0:
        raise ValueError("counts must be positive")
    shift = max(c.bit_length() - 900, 0)
    return math.log(c >> shift) + shift * math.log(2)


def fit_growth(samples: Sequence[GrowthSample]) -> FitResult:
    """Fit log count ~ c + r log L (+ gamma log log L) and pick a model.

    power_log is chosen only when it cuts the RMS residual of the pure power
    fit by at least 20% (``LOG_MODEL_GAIN``) and its gamma rounds to a
    positive integer (``MIN_LOG_EXPONENT``).  Crossovers produce whole powers
    of log L, while power-law finite-size corrections such as 1 - c/sqrt(L)
    also bend the log-log curve but fit a small fractional gamma.  An exact
    pure-power fit always wins.
    """
    if len(samples) < 4:
        raise ValueError(f"need at least 4 samples, got {len(samples)}")
    Ls = [s.L for s in samples]
    if min(Ls) < 2:
        raise ValueError("all L must be >= 2")
    if len(set(Ls)) != len(Ls):
        raise ValueError("L values must be distinct")
    logL = np.log(np.array(Ls, dtype=float))
    y = np.array([_log_count(s.count) for s in samples])
    ones = np.ones_like(logL)
    (c0, r0), res_pure = _lstsq(np.column_stack([ones, logL]), y)
    (c1, r1, g1), res_log = _lstsq(np.column_stack([ones, logL, np.log(logL)]), y)
    use_log = (res_pure > RESIDUAL_FLOOR and res_log < LOG_MODEL_GAIN * res_pure
               and g1 >= MIN_LOG_EXPONENT)
    if use_log:
        return FitResult("power_log", float(r1), float(g1), res_log, len(samples), res_pure, res_log)
    return FitResult("pure_power", float(r0), 0.0, res_pure, len(samples), res_pure, res_log)
