"""Empirical tail-risk metrics for pooled annual loss series.

All quantities condition on the empirical tail of a series of N annual
losses: the k = ceil((1 - alpha) * N) largest years, with ties broken toward
the smaller year index. Making the conditioning event concrete as a fixed
set of k year indices keeps every metric deterministic and makes the
decomposition of a pool's expected shortfall into member contributions exact
(both sides average the same k rows).

Definitions, for a series L and tail count k:

* value at risk: the k-th largest annual loss (empirical upper quantile);
* expected shortfall: the mean of the k largest annual losses;
* marginal expected shortfall of a member: the mean of the member's losses
  over the *pool's* tail years;
* risk concentration of a pool: pooled expected shortfall divided by the sum
  of the members' standalone expected shortfalls;
* risk diversification: one minus risk concentration;
* share of a member: marginal expected shortfall divided by the member's
  standalone expected shortfall.

Every operation here is a pure function over immutable inputs and safe for
concurrent evaluation of many member sets against one shared matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._validation import as_series, check_probability
from .data import AnnualLossMatrix
from .errors import DataValidationError

# Guards the ceiling against binary representation of decimal alphas,
# e.g. (1 - 0.995) * 10000 evaluates to slightly above 50.
_CEIL_GUARD = 1e-9

PAIR_POLICIES = ("censored", "union")


@dataclass(frozen=True)
class TailSpec:
    """Tail threshold probability and the derived tail count for a series."""

    alpha: float
    k: int

    def __post_init__(self) -> None:
        check_probability(self.alpha)
        if self.k < 1:
            raise DataValidationError(f"tail count must be >= 1, got {self.k}")

    @classmethod
    def from_alpha(cls, alpha: float, n_years: int) -> "TailSpec":
        return cls(alpha=alpha, k=tail_count(alpha, n_years))


def tail_count(alpha: float, n_years: int) -> int:
    """Number of tail years: ceil((1 - alpha) * N), clamped to [1, N]."""
    check_probability(alpha)
    if n_years < 1:
        raise DataValidationError(f"series length must be >= 1, got {n_years}")
    k = math.ceil((1.0 - alpha) * n_years - _CEIL_GUARD)
    return min(n_years, max(1, k))


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise DataValidationError(f"tail count {k} exceeds series length {n}")


def tail_years(losses, k: int) -> np.ndarray:
    """Indices of the k largest values, ties to the smaller index, ascending."""
    x = as_series(losses)
    _check_k(k, x.size)
    # stable sort on the negated series keeps the smaller index first on ties
    order = np.argsort(-x, kind="stable")[:k]
    order.sort()
    return order


def var(losses, spec: TailSpec) -> float:
    """Value at risk: the k-th largest value of the series."""
    x = as_series(losses)
    _check_k(spec.k, x.size)
    return float(np.partition(x, x.size - spec.k)[x.size - spec.k])


def es(losses, spec: TailSpec) -> float:
    """Expected shortfall: the mean of the k largest values."""
    x = as_series(losses)
    _check_k(spec.k, x.size)
    return float(x[tail_years(x, spec.k)].mean())


def mes(member_losses, pool_tail) -> float:
    """Marginal expected shortfall: member mean over the pool's tail years."""
    x = as_series(member_losses, name="member losses")
    idx = np.asarray(sorted(int(i) for i in pool_tail), dtype=np.intp)
    if idx.size == 0:
        raise DataValidationError("pool tail set must not be empty")
    if idx[0] < 0 or idx[-1] >= x.size:
        raise DataValidationError("pool tail indices out of range")
    return float(x[idx].mean())


@dataclass(frozen=True)
class PoolMetrics:
    """Tail metrics of one pool; ``rd`` is defined as exactly ``1 - rc``."""

    var: float
    es: float
    rc: float
    rd: float
    tail_years: tuple[int, ...]
    degenerate: bool = False


@dataclass(frozen=True)
class MemberMetrics:
    """Per-member tail contribution within a pool.

    ``zero_es`` flags members whose standalone expected shortfall is zero
    (an all-zero loss column); their share is undefined and reported as 0,
    and they are excluded from the concentration denominator.
    """

    iso3: str
    mes: float
    es_individual: float
    share: float
    zero_es: bool = False


def pool_metrics(
    matrix: AnnualLossMatrix, members: Iterable[str], spec: TailSpec
) -> tuple[PoolMetrics, list[MemberMetrics]]:
    """Pool and per-member tail metrics for one member set.

    The pooled series is the row sum over the member columns. Member
    results follow matrix column order. The member marginal shortfalls sum
    to the pool's expected shortfall up to summation-order rounding.
    """
    idx = matrix.indices_for(members)
    if idx.size == 0:
        raise DataValidationError("pool member set must not be empty")
    _check_k(spec.k, matrix.n_years)

    pooled = matrix.losses[:, idx].sum(axis=1)
    tail = tail_years(pooled, spec.k)
    es_pool = float(pooled[tail].mean())
    var_pool = var(pooled, spec)

    member_rows: list[MemberMetrics] = []
    es_sum = 0.0
    for i in idx:
        col = matrix.losses[:, i]
        es_ind = float(col[tail_years(col, spec.k)].mean())
        mes_i = float(col[tail].mean())
        if es_ind > 0.0:
            share = mes_i / es_ind
            zero = False
            es_sum += es_ind
        else:
            share = 0.0
            zero = True
        member_rows.append(
            MemberMetrics(
                iso3=matrix.countries[i], mes=mes_i, es_individual=es_ind, share=share, zero_es=zero
            )
        )

    if es_sum > 0.0:
        rc = min(1.0, es_pool / es_sum)
        degenerate = False
    else:
        # every member column is all-zero: pooling is vacuous
        rc = 1.0
        degenerate = True
    pool = PoolMetrics(
        var=var_pool,
        es=es_pool,
        rc=rc,
        rd=1.0 - rc,
        tail_years=tuple(int(t) for t in tail),
        degenerate=degenerate,
    )
    return pool, member_rows


@dataclass(frozen=True, eq=False)
class CorrelationResult:
    """Tail correlation matrix with flags for degenerate entries.

    ``flagged`` lists country pairs whose correlation was reported as 0
    because a conditioned series had zero variance (or, under the ``union``
    policy, fewer than two conditioning years).
    """

    countries: tuple[str, ...]
    values: np.ndarray
    flagged: tuple[tuple[str, str], ...]
    policy: str


def tail_correlation(
    matrix: AnnualLossMatrix, spec: TailSpec, pair_policy: str = "censored"
) -> CorrelationResult:
    """Pearson correlation of per-country tail losses.

    ``censored`` (default): each country keeps its value in its own k worst
    years and 0 elsewhere; Pearson over all N years. Symmetric, always
    defined, and reduces to ordinary Pearson for comonotone pairs.

    ``union``: Pearson of the raw series restricted to the union of the two
    countries' own tail years; needs at least two conditioning years.
    """
    if pair_policy not in PAIR_POLICIES:
        raise DataValidationError(f"unknown pair policy '{pair_policy}', expected one of {PAIR_POLICIES}")
    _check_k(spec.k, matrix.n_years)
    n = matrix.n_countries
    values = matrix.losses
    tails = [tail_years(values[:, i], spec.k) for i in range(n)]

    corr = np.zeros((n, n), dtype=np.float64)
    flagged: list[tuple[str, str]] = []

    if pair_policy == "censored":
        censored = np.zeros_like(values)
        for i in range(n):
            censored[tails[i], i] = values[tails[i], i]
        centered = censored - censored.mean(axis=0)
        cov = centered.T @ centered
        std = np.sqrt(np.diag(cov))
        ok = std > 0.0
        denom = np.outer(std, std)
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.where(np.outer(ok, ok), cov / np.where(denom == 0.0, 1.0, denom), 0.0)
        corr = np.clip(corr, -1.0, 1.0)
        for i in range(n):
            for j in range(i + 1, n):
                if not (ok[i] and ok[j]):
                    flagged.append((matrix.countries[i], matrix.countries[j]))
    else:
        for i in range(n):
            for j in range(i + 1, n):
                idx = np.union1d(tails[i], tails[j])
                r = 0.0
                if idx.size >= 2:
                    x = values[idx, i]
                    y = values[idx, j]
                    xm = x - x.mean()
                    ym = y - y.mean()
                    sx = float(np.sqrt((xm * xm).sum()))
                    sy = float(np.sqrt((ym * ym).sum()))
                    if sx > 0.0 and sy > 0.0:
                        r = float(np.clip((xm * ym).sum() / (sx * sy), -1.0, 1.0))
                    else:
                        flagged.append((matrix.countries[i], matrix.countries[j]))
                else:
                    flagged.append((matrix.countries[i], matrix.countries[j]))
                corr[i, j] = corr[j, i] = r

    np.fill_diagonal(corr, 1.0)
    corr.setflags(write=False)
    return CorrelationResult(
        countries=matrix.countries, values=corr, flagged=tuple(flagged), policy=pair_policy
    )
