"""Critical offspring distributions and exact laws of their partial sums.

Every distribution here has mean exactly 1 (criticality), p_0 > 0 and finite
positive variance.  The finite-table families and Geometric(1/2) carry exact
rational probabilities; Poisson(1) is evaluated in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import MissingZero, NonCritical, TruncationNeeded, ZeroVariance

HALF = Fraction(1, 2)

# |mean - 1| gate for float-valued custom tables; rational tables are checked exactly.
CRITICALITY_TOL = 1e-9


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class OffspringDistribution:
    """Immutable critical offspring law; shareable across workers.

    ``table`` is the full pmf for finite-support families and ``None`` for the
    named unbounded families (``poisson_one``, ``geometric_half``), whose pmf
    and partial-sum laws are evaluated from closed forms.
    """

    name: str
    family: str  # poisson_one | geometric_half | binomial_two_half | full_rary | custom
    table: tuple[tuple[int, Fraction], ...] | None
    mean: Fraction | float
    variance: Fraction | float
    span: int
    third_cumulant: Fraction | float | None = None  # reserved; no formula here uses it
    exact: bool = True
    rary: int | None = None
    _probs: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.table is not None:
            object.__setattr__(self, "_probs", dict(self.table))

    # -- pmf ---------------------------------------------------------------

    def pmf(self, k: int):
        """P(xi = k); exact rational where available, 0 outside the support."""
        if k < 0:
            return Fraction(0) if self.exact else 0.0
        if self.table is not None:
            return self._probs.get(k, Fraction(0))
        if self.family == "poisson_one":
            return math.exp(-1.0) / math.factorial(k) if k <= 170 else 0.0
        if self.family == "geometric_half":
            return Fraction(1, 2 ** (k + 1))
        raise AssertionError(f"unknown family {self.family}")

    def support(self, upto: int) -> list[int]:
        """Support points k <= upto with pmf(k) > 0."""
        if self.table is not None:
            return sorted(k for k, p in self.table if p > 0 and k <= upto)
        return list(range(upto + 1))

    def max_degree(self) -> int | None:
        """Largest supported outdegree, or None for unbounded families."""
        if self.table is not None:
            return max(k for k, p in self.table if p > 0)
        return None

    # -- partial sums --------------------------------------------------------

    def sum_pmf(self, n: int, m: int):
        """P(S_n = m) for S_n the sum of n independent copies of xi.

        Closed forms: Poisson sums are Poisson(n), Geometric(1/2) sums are
        negative binomial, Binomial(2,1/2) sums are Binomial(2n,1/2), full
        r-ary sums are scaled binomial.  Finite custom tables are convolved
        exactly.  n = 0 is allowed and gives the unit mass at 0.
        """
        if n < 0:
            raise ValueError("n must be >= 0")
        zero = Fraction(0) if self.exact else 0.0
        if n == 0:
            one = Fraction(1) if self.exact else 1.0
            return one if m == 0 else zero
        if m < 0:
            return zero
        if self.family == "poisson_one":
            # Poisson(n) pmf, in log space for large arguments
            return math.exp(m * math.log(n) - n - math.lgamma(m + 1))
        if self.family == "geometric_half":
            # negative binomial: m failures before the n-th success at p=1/2
            return Fraction(math.comb(n + m - 1, m), 2 ** (n + m))
        if self.family == "binomial_two_half":
            if m > 2 * n:
                return zero
            return Fraction(math.comb(2 * n, m), 4**n)
        if self.family == "full_rary":
            r = self.rary
            if m % r != 0 or m // r > n:
                return zero
            j = m // r
            return math.comb(n, j) * self.pmf(r) ** j * self.pmf(0) ** (n - j)
        if self.family == "custom":
            return _convolve_table(self.table, n, m)
        raise TruncationNeeded(f"no convolution rule for family {self.family}")

    # -- sampling ------------------------------------------------------------

    def sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized i.i.d. draws of xi."""
        if self.family == "poisson_one":
            return rng.poisson(1.0, size)
        if self.family == "geometric_half":
            return rng.geometric(0.5, size) - 1
        if self.family == "binomial_two_half":
            return rng.binomial(2, 0.5, size)
        if self.family == "full_rary":
            r = self.rary
            return np.where(rng.random(size) < 1.0 / r, r, 0).astype(np.int64)
        ks, cum = self._sampling_tables()
        return ks[np.searchsorted(cum, rng.random(size), side="right")]

    def sample(self, rng: np.random.Generator) -> int:
        return int(self.sample_array(rng, 1)[0])

    def _sampling_tables(self):
        # cached on the mutable side dict, which is excluded from eq/hash
        if "sampling" not in self._probs:
            ks = np.array([k for k, p in self.table if p > 0], dtype=np.int64)
            ps = np.array([float(p) for k, p in self.table if p > 0])
            cum = np.cumsum(ps)
            cum[-1] = 1.0
            self._probs["sampling"] = (ks, cum)
        return self._probs["sampling"]

    def size_biased_sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized draws of the size-biased law P(k) = k*p_k (valid since E xi = 1)."""
        if self.family == "poisson_one":
            return rng.poisson(1.0, size) + 1
        if self.family == "geometric_half":
            # k*2^-(k+1) for k>=1 is 1 + (sum of two geometric(1/2) failure counts)
            return rng.geometric(0.5, size) + rng.geometric(0.5, size) - 1
        key = "size_biased"
        if key not in self._probs:
            ks = np.array([k for k, p in self.table if p > 0 and k > 0], dtype=np.int64)
            ps = np.array([float(k * p) for k, p in self.table if p > 0 and k > 0])
            cum = np.cumsum(ps)
            cum[-1] = 1.0
            self._probs[key] = (ks, cum)
        ks, cum = self._probs[key]
        return ks[np.searchsorted(cum, rng.random(size), side="right")]


def _convolve_table(table, n: int, m: int):
    """Exact n-fold convolution of a finite pmf table, evaluated at m."""
    maxdeg = max(k for k, p in table if p > 0)
    if m > n * maxdeg:
        return Fraction(0)
    return _convolution_row(table, n)[m]


@lru_cache(maxsize=512)
def _convolution_row(table: tuple, n: int) -> tuple:
    """Full pmf of S_n on [0, n*maxdeg] for a finite table."""
    probs = {k: p for k, p in table if p > 0}
    if n == 1:
        upto = max(probs)
        return tuple(probs.get(j, Fraction(0)) for j in range(upto + 1))
    prev = _convolution_row(table, n - 1)
    upto = n * max(probs)
    row = [Fraction(0)] * (upto + 1)
    for k, p in probs.items():
        for j, q in enumerate(prev):
            if q:
                row[j + k] += p * q
    return tuple(row)


# -- construction -------------------------------------------------------------


def _validate_table(table: dict[int, Fraction]) -> None:
    if any(p < 0 for p in table.values()):
        raise ValueError("negative probability in table")
    total = sum(table.values())
    mean = sum(k * p for k, p in table.items())
    if total != 1:
        raise ValueError(f"probabilities sum to {total}, expected 1")
    if mean != 1:
        raise NonCritical(f"mean is {mean}, expected exactly 1")
    if table.get(0, Fraction(0)) == 0:
        raise MissingZero("p_0 must be positive")
    if all(p == 0 for k, p in table.items() if k != 1):
        raise ZeroVariance("distribution is degenerate at 1")


def _table_stats(table: dict[int, Fraction]):
    mean = sum(k * p for k, p in table.items())
    variance = sum(p * (k - mean) ** 2 for k, p in table.items())
    kappa3 = sum(p * (k - mean) ** 3 for k, p in table.items())
    span = 0
    for k, p in table.items():
        if k > 0 and p > 0:
            span = math.gcd(span, k)
    return variance, kappa3, span


def geometric_half() -> OffspringDistribution:
    """Geometric(1/2) on {0,1,2,...}: the law of uniform random ordered trees."""
    return OffspringDistribution(
        name="geometric_half",
        family="geometric_half",
        table=None,
        mean=Fraction(1),
        variance=Fraction(2),
        span=1,
        third_cumulant=Fraction(6),
        exact=True,
    )


def poisson_one() -> OffspringDistribution:
    """Poisson(1): the law of uniform random labelled trees."""
    return OffspringDistribution(
        name="poisson_one",
        family="poisson_one",
        table=None,
        mean=1.0,
        variance=1.0,
        span=1,
        third_cumulant=1.0,
        exact=False,
    )


def binomial_two_half() -> OffspringDistribution:
    """Binomial(2,1/2): the law of uniform random binary trees."""
    table = {0: Fraction(1, 4), 1: HALF, 2: Fraction(1, 4)}
    _validate_table(table)
    variance, kappa3, span = _table_stats(table)
    return OffspringDistribution(
        name="binomial_two_half",
        family="binomial_two_half",
        table=tuple(sorted(table.items())),
        mean=Fraction(1),
        variance=variance,
        span=span,
        third_cumulant=kappa3,
        exact=True,
    )


def full_rary(r: int) -> OffspringDistribution:
    """p_0 = 1 - 1/r, p_r = 1/r: full r-ary trees, span r."""
    if r < 2:
        raise ValueError("r must be >= 2")
    table = {0: 1 - Fraction(1, r), r: Fraction(1, r)}
    _validate_table(table)
    variance, kappa3, span = _table_stats(table)
    return OffspringDistribution(
        name=f"full_rary_{r}",
        family="full_rary",
        table=tuple(sorted(table.items())),
        mean=Fraction(1),
        variance=variance,
        span=span,
        third_cumulant=kappa3,
        exact=True,
        rary=r,
    )


def custom(table: dict, name: str = "custom", check_criticality: bool = True) -> OffspringDistribution:
    """Finite pmf table with exact rational entries.

    Float entries are accepted and converted via ``Fraction(float)`` after a
    |mean - 1| <= 1e-9 gate; rational entries are validated exactly.  The
    ``check_criticality`` bypass exists only so degenerate laws can be fed to
    the sampler layer in tests.
    """
    has_floats = any(isinstance(p, float) for p in table.values())
    if has_floats:
        fmean = sum(k * float(p) for k, p in table.items())
        ftotal = sum(float(p) for p in table.values())
        if check_criticality and abs(fmean - 1.0) > CRITICALITY_TOL:
            raise NonCritical(f"mean is {fmean}, |mean-1| > {CRITICALITY_TOL}")
        if abs(ftotal - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {ftotal}")
        # renormalize exactly so downstream rational arithmetic stays consistent
        frac = {int(k): Fraction(p).limit_denominator(10**15) for k, p in table.items()}
        total = sum(frac.values())
        frac = {k: p / total for k, p in frac.items()}
    else:
        frac = {int(k): _as_fraction(p) for k, p in table.items()}
    frac = {k: p for k, p in frac.items() if p > 0}
    if check_criticality:
        _validate_table(frac)
    elif frac.get(0, Fraction(0)) == 0 and len(frac) == 1 and 0 in frac:
        pass
    variance, kappa3, span = _table_stats(frac)
    mean = sum(k * p for k, p in frac.items())
    return OffspringDistribution(
        name=name,
        family="custom",
        table=tuple(sorted(frac.items())),
        mean=mean,
        variance=variance,
        span=span if span > 0 else 1,
        third_cumulant=kappa3,
        exact=True,
    )


_NAMED = {
    "geometric_half": geometric_half,
    "poisson_one": poisson_one,
    "binomial_two_half": binomial_two_half,
}


def make_distribution(spec: str) -> OffspringDistribution:
    """Parse a distribution spec string.

    Accepts a family name (``geometric_half``, ``poisson_one``,
    ``binomial_two_half``, ``full_rary:R``) or an inline table
    ``custom:0=1/4,1=1/2,2=1/4`` with decimal or ``p/q`` values.
    """
    spec = spec.strip()
    if spec in _NAMED:
        return _NAMED[spec]()
    if spec.startswith("full_rary"):
        sep = ":" if ":" in spec else "_"
        try:
            r = int(spec.split(sep)[-1])
        except ValueError:
            raise ValueError(f"cannot parse r-ary spec {spec!r}") from None
        return full_rary(r)
    if spec.startswith("custom:"):
        body = spec[len("custom:"):]
        table = {}
        for item in body.split(","):
            k, _, v = item.partition("=")
            value = Fraction(v.strip()) if "/" in v or "." not in v else float(v)
            table[int(k.strip())] = value
        return custom(table)
    raise ValueError(f"unknown distribution spec {spec!r}")
