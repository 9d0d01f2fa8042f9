"""Inferential statistics for paired mitigation benchmarks.

Paired differences are ``delta_i = |eps_raw,i| - |eps_mit,i|``; positive values
mean mitigation reduced the error.  All p-values are two-sided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import special
from scipy.stats import rankdata

from ._validation import check_finite_1d, check_p_values, check_positive_int, check_probability
from .exceptions import DegenerateSampleError, InvalidArgumentError

EXACT_WILCOXON_MAX_N = 25


@dataclass(frozen=True, eq=False)
class PairedSample:
    deltas: np.ndarray

    def __post_init__(self):
        arr = check_finite_1d(self.deltas, "deltas")
        arr.setflags(write=False)
        object.__setattr__(self, "deltas", arr)

    @classmethod
    def from_errors(cls, raw_errors: Sequence[float], mitigated_errors: Sequence[float]) -> "PairedSample":
        raw = check_finite_1d(raw_errors, "raw_errors")
        mit = check_finite_1d(mitigated_errors, "mitigated_errors")
        if raw.size != mit.size:
            raise InvalidArgumentError(f"paired lists differ in length: {raw.size} != {mit.size}")
        return cls(np.abs(raw) - np.abs(mit))

    @property
    def n(self) -> int:
        return int(self.deltas.size)

    @property
    def mean(self) -> float:
        return float(np.mean(self.deltas))

    @property
    def sd(self) -> float:
        return float(np.std(self.deltas, ddof=1)) if self.n > 1 else 0.0


def _as_sample(sample) -> PairedSample:
    return sample if isinstance(sample, PairedSample) else PairedSample(np.asarray(sample, dtype=float))


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    df: Optional[float]
    method: str

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class EffectSizes:
    cohens_d: float
    cliffs_delta: float


def _require_spread(sample: PairedSample) -> None:
    if sample.n < 2:
        raise DegenerateSampleError(f"need at least 2 paired differences, got {sample.n}")
    d = sample.deltas
    if np.all(d == d[0]) or sample.sd <= 1e-15 * max(1.0, abs(sample.mean)):
        raise DegenerateSampleError("paired differences have zero variance")


def t_sf_two_sided(t: float, df: float) -> float:
    """Two-sided tail probability ``P(|T_df| >= |t|)``."""
    return float(min(1.0, 2.0 * special.stdtr(df, -abs(t))))


def paired_t_test(sample) -> TestResult:
    """``t = mean / (sd / sqrt(n))`` with ``n - 1`` degrees of freedom."""
    sample = _as_sample(sample)
    _require_spread(sample)
    t = sample.mean / (sample.sd / math.sqrt(sample.n))
    df = sample.n - 1
    return TestResult(statistic=float(t), p_value=t_sf_two_sided(t, df), df=float(df), method="paired t-test")


def _exact_signed_rank_pmf(doubled_ranks: np.ndarray) -> np.ndarray:
    """Null distribution of twice the positive rank sum under random signs.

    Ranks are doubled so that midranks from ties stay integral.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1)
    counts[0] = 1.0
    for r in doubled_ranks.astype(int):
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    return counts / counts.sum()


def wilcoxon_signed_rank(sample) -> TestResult:
    """Signed-rank test on the nonzero differences; the statistic is ``W+``.

    Exact (tie-aware) null distribution up to 25 nonzero differences, normal
    approximation with tie and continuity correction above.
    """
    sample = _as_sample(sample)
    d = sample.deltas[sample.deltas != 0]
    if d.size == 0:
        raise DegenerateSampleError("all paired differences are zero")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    n = d.size
    if n <= EXACT_WILCOXON_MAX_N:
        doubled = np.rint(2 * ranks).astype(int)
        pmf = _exact_signed_rank_pmf(doubled)
        w2 = int(round(2 * w_plus))
        lower = pmf[: w2 + 1].sum()
        upper = pmf[w2:].sum()
        p = min(1.0, 2.0 * min(lower, upper))
        return TestResult(w_plus, float(p), None, "wilcoxon signed-rank (exact)")
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts**3 - tie_counts) / 48.0
    if var <= 0:
        raise DegenerateSampleError("signed-rank variance is zero")
    diff = w_plus - mean
    z = (diff - math.copysign(0.5, diff)) / math.sqrt(var) if abs(diff) > 0.5 else 0.0
    p = min(1.0, 2.0 * special.ndtr(-abs(z)))
    return TestResult(w_plus, float(p), None, "wilcoxon signed-rank (normal approximation)")


def cohens_d(sample) -> float:
    """Mean paired difference over its sample standard deviation (n - 1 denominator)."""
    sample = _as_sample(sample)
    _require_spread(sample)
    return sample.mean / sample.sd


def cliffs_delta(sample) -> float:
    """``(N_> - N_<) / n``; zero differences count only in the denominator."""
    d = _as_sample(sample).deltas
    return float((np.count_nonzero(d > 0) - np.count_nonzero(d < 0)) / d.size)


def effect_sizes(sample) -> EffectSizes:
    return EffectSizes(cohens_d(sample), cliffs_delta(sample))


def mean_confidence_interval(values: Sequence[float], level: float = 0.95) -> tuple[float, float]:
    """t-based interval on the mean; collapses to the mean for zero spread."""
    arr = check_finite_1d(values, "values")
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, mean
    half = special.stdtrit(arr.size - 1, 0.5 + level / 2) * arr.std(ddof=1) / math.sqrt(arr.size)
    return mean - float(half), mean + float(half)


# -- multiplicity -------------------------------------------------------------


def bonferroni(p_values: Sequence[float]) -> np.ndarray:
    p = check_p_values(p_values)
    return np.minimum(1.0, p * p.size)


def benjamini_hochberg(p_values: Sequence[float]) -> np.ndarray:
    """Step-up adjusted p-values: ``q_(i) = min_{j >= i} m p_(j) / j``."""
    p = check_p_values(p_values)
    m = p.size
    if m == 0:
        return p
    order = np.argsort(p, kind="mergesort")
    scaled = p[order] * m / np.arange(1, m + 1)
    q_sorted = np.minimum(1.0, np.minimum.accumulate(scaled[::-1])[::-1])
    q = np.empty(m)
    q[order] = q_sorted
    return q


# -- power --------------------------------------------------------------------


@dataclass(frozen=True)
class PowerCurve:
    n_grid: tuple[int, ...]
    power: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]
    alpha: float
    n_boot: int

    def smallest_n(self, target: float = 0.8) -> Optional[int]:
        for n, p in zip(self.n_grid, self.power):
            if p >= target:
                return n
        return None


def _wilson(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def bootstrap_power(
    sample,
    n_grid: Iterable[int],
    alpha: float = 0.05,
    n_boot: int = 1000,
    rng: Optional[np.random.Generator] = None,
) -> PowerCurve:
    """Fraction of size-``n`` resamples (with replacement) whose paired t-test
    rejects at ``alpha``.  Zero-variance resamples count as non-rejections."""
    sample = _as_sample(sample)
    check_probability(alpha, "alpha")
    n_boot = check_positive_int(n_boot, "n_boot", minimum=100)
    if rng is None:
        raise InvalidArgumentError("bootstrap_power needs an explicit random generator")
    grid = tuple(check_positive_int(n, "n", minimum=2) for n in n_grid)
    if not grid:
        raise InvalidArgumentError("n_grid is empty")
    d = sample.deltas
    powers, lows, highs = [], [], []
    for n in grid:
        draws = d[rng.integers(0, d.size, size=(n_boot, n))]
        mean = draws.mean(axis=1)
        sd = draws.std(axis=1, ddof=1)
        ok = sd > 1e-15 * np.maximum(1.0, np.abs(mean))
        t = np.zeros(n_boot)
        t[ok] = mean[ok] / (sd[ok] / math.sqrt(n))
        p = np.ones(n_boot)
        p[ok] = 2.0 * special.stdtr(n - 1, -np.abs(t[ok]))
        k = int(np.count_nonzero(ok & (p < alpha)))
        powers.append(k / n_boot)
        lo, hi = _wilson(k, n_boot)
        lows.append(lo)
        highs.append(hi)
    return PowerCurve(grid, tuple(powers), tuple(lows), tuple(highs), alpha, n_boot)


# -- drift severity -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Replicate values grouped by time point, in time order."""

    times: tuple[float, ...]
    groups: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.times) != len(self.groups):
            raise InvalidArgumentError("times and groups differ in length")
        groups = tuple(check_finite_1d(g, "replicate values") for g in self.groups)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, Sequence[float]]]) -> "TimeSeries":
        pairs = list(pairs)
        return cls(tuple(t for t, _ in pairs), tuple(np.asarray(v, dtype=float) for _, v in pairs))

    def means(self) -> np.ndarray:
        return np.array([g.mean() for g in self.groups])


def _anova_sums(series: TimeSeries) -> tuple[float, float, int, int]:
    if len(series.groups) < 2:
        raise InvalidArgumentError("need at least 2 time points")
    values = np.concatenate(series.groups)
    grand = values.mean()
    ss_between = float(sum(g.size * (g.mean() - grand) ** 2 for g in series.groups))
    ss_within = float(sum(np.sum((g - g.mean()) ** 2) for g in series.groups))
    return ss_between, ss_within, len(series.groups), values.size


def eta_squared(series: TimeSeries) -> float:
    """Share of replicate-level variance explained by the time point (one-way ANOVA)."""
    ss_between, ss_within, _, _ = _anova_sums(series)
    total = ss_between + ss_within
    if total <= 0:
        raise DegenerateSampleError("zero total variance")
    return min(1.0, max(0.0, ss_between / total))


def lag1_autocorr(values: Sequence[float]) -> float:
    x = check_finite_1d(values, "values", min_length=3)
    dev = x - x.mean()
    denom = float(np.sum(dev**2))
    if denom <= 0:
        raise DegenerateSampleError("constant series has no autocorrelation")
    return float(np.sum(dev[:-1] * dev[1:]) / denom)


def icc_oneway(series: TimeSeries) -> float:
    """One-way random-effects ICC(1), clamped to [0, 1].

    Unequal group sizes use the usual adjusted size
    ``k0 = (N - sum n_i^2 / N) / (g - 1)``.
    """
    if any(g.size < 2 for g in series.groups):
        raise InvalidArgumentError("ICC needs at least 2 replicates per time point")
    ss_between, ss_within, g, n_total = _anova_sums(series)
    ms_between = ss_between / (g - 1)
    ms_within = ss_within / (n_total - g)
    sizes = np.array([grp.size for grp in series.groups])
    k0 = (n_total - np.sum(sizes**2) / n_total) / (g - 1)
    denom = ms_between + (k0 - 1) * ms_within
    if denom <= 0:
        raise DegenerateSampleError("zero variance between and within time points")
    return float(min(1.0, max(0.0, (ms_between - ms_within) / denom)))


def kish_neff(n: int, icc: float) -> float:
    """Kish design effect: ``n / (1 + (n - 1) ICC)``."""
    n = check_positive_int(n, "n")
    icc = check_probability(icc, "icc")
    return n / (1.0 + (n - 1) * icc)


def estimate_d_from_summary(e_raw: float, e_mit: float, sigma_improvement: float) -> float:
    """Effect size from reported means when paired data are unavailable."""
    if not sigma_improvement > 0:
        raise InvalidArgumentError(f"sigma_improvement must be > 0, got {sigma_improvement}")
    return (e_mit - e_raw) / sigma_improvement


def circuit_fidelity_bound(p: float, m: int) -> float:
    """``(1 - p)^m`` for ``m`` gates of error ``p``."""
    p = check_probability(p, "p")
    m = check_positive_int(m, "m", minimum=0)
    return (1.0 - p) ** m
