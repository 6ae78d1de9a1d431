"""Two-step evolutionary search for pool compositions.

Step 1 allocates countries to pools (or to none) so that each pool's risk
concentration is minimal: a plain generational genetic algorithm with
elitism for a single pool, and non-dominated sorting with reference-direction
niching for two or more pools. Allocations are integer vectors with one gene
per country restricted to that country's allowed pool set, so uniform
crossover and random-reset mutation preserve feasibility by construction.
The search is repeated over several independently seeded runs and the final
front is the non-dominated set across all runs.

Step 2 shrinks one pool to the smallest member subset that still attains the
step-1 concentration, using a binary-encoded genetic algorithm with
feasibility-first tournament selection.

An exhaustive oracle enumerates small instances exactly for verification.

Determinism: identical inputs and seed produce identical results regardless
of evaluation parallelism. Fitness evaluation is a pure function computed
independently per individual; selection uses only the gathered fitness table
and the run's own random stream. Run r of a multi-run search draws its
stream from ``rng_seed + r`` (seed sequences make nearby seeds independent).
"""

from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .data import AnnualLossMatrix, CountryMeta
from .errors import DataValidationError, InfeasibleError, InternalInvariantError
from .metrics import TailSpec, tail_count
from ._validation import as_loss_array

#: absolute tolerance for deduplicating objective vectors within a front
DEDUP_TOL = 1e-12
#: tolerance for risk concentration comparisons (step-2 feasibility, etc.)
RC_TOL = 1e-9

DEFAULT_POPULATION = 100
DEFAULT_GENERATIONS = 200

#: when True, every generation re-checks that all individuals respect their
#: allowed/pinned gene domains (slow; intended for tests)
DEBUG_FEASIBILITY = False


@dataclass(frozen=True)
class OptimizerConfig:
    """Evolutionary search settings.

    ``mutation_rate=None`` uses one expected reset per genome (rate 1/n).
    ``reference_direction_partitions=None`` picks the smallest partition
    count whose direction count reaches the population size.
    """

    population_size: int = DEFAULT_POPULATION
    generations: int = DEFAULT_GENERATIONS
    crossover_rate: float = 0.9
    mutation_rate: float | None = None
    seeds: int = 15
    rng_seed: int = 0
    reference_direction_partitions: int | None = None

    def __post_init__(self) -> None:
        if self.population_size < 4 or self.population_size % 2:
            raise DataValidationError(
                f"population size must be even and >= 4, got {self.population_size}"
            )
        if self.generations < 1:
            raise DataValidationError(f"generations must be >= 1, got {self.generations}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise DataValidationError(f"crossover rate must lie in [0, 1], got {self.crossover_rate}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise DataValidationError(f"mutation rate must lie in [0, 1], got {self.mutation_rate}")
        if self.seeds < 1:
            raise DataValidationError(f"seed count must be >= 1, got {self.seeds}")


@dataclass(frozen=True)
class FrontEntry:
    """One allocation with its per-pool risk concentrations."""

    allocation: tuple[int, ...]
    objectives: tuple[float, ...]


@dataclass(frozen=True)
class ParetoFront:
    """Mutually non-dominated allocations, canonically ordered.

    Entries are sorted by objective vector then allocation, contain no
    dominated entry, and are deduplicated by objective vector within an
    absolute tolerance of ``DEDUP_TOL``.
    """

    n_pools: int
    entries: tuple[FrontEntry, ...]

    @classmethod
    def from_candidates(
        cls, n_pools: int, candidates: Iterable[tuple[Sequence[int], Sequence[float]]]
    ) -> "ParetoFront":
        unique: dict[tuple[int, ...], tuple[float, ...]] = {}
        for allocation, objectives in candidates:
            key = tuple(int(v) for v in allocation)
            if key not in unique:
                unique[key] = tuple(float(v) for v in objectives)
        if not unique:
            return cls(n_pools=n_pools, entries=())
        allocs = list(unique.keys())
        objs = np.array([unique[a] for a in allocs], dtype=np.float64)
        if objs.shape[1] != n_pools:
            raise DataValidationError(
                f"objective vectors have {objs.shape[1]} entries, expected {n_pools}"
            )
        keep = _nondominated_mask(objs)
        survivors = sorted(
            ((unique[a], a) for a, ok in zip(allocs, keep) if ok), key=lambda item: (item[0], item[1])
        )
        entries: list[FrontEntry] = []
        last: tuple[float, ...] | None = None
        for objectives, allocation in survivors:
            if last is not None and max(abs(a - b) for a, b in zip(objectives, last)) <= DEDUP_TOL:
                continue
            entries.append(FrontEntry(allocation=allocation, objectives=objectives))
            last = objectives
        return cls(n_pools=n_pools, entries=tuple(entries))

    def objective_array(self) -> np.ndarray:
        return np.array([e.objectives for e in self.entries], dtype=np.float64)


@dataclass(frozen=True)
class SelectionVector:
    """Binary keep/drop vector over the step-1 members of one pool."""

    members: tuple[str, ...]
    z: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.members) != len(self.z):
            raise DataValidationError("selection vector length does not match member count")
        if not any(self.z):
            raise DataValidationError("selection vector must keep at least one member")

    @property
    def selected(self) -> tuple[str, ...]:
        return tuple(m for m, flag in zip(self.members, self.z) if flag)


@dataclass(frozen=True)
class Step1Result:
    front: ParetoFront
    convergence: tuple[tuple[tuple[float, ...], ...], ...]  # per run, per generation


@dataclass(frozen=True)
class Step2Result:
    selection: SelectionVector
    rc: float
    rc_star_input: float
    rc_star: float  # best concentration observed (may undercut the input)
    improved: bool
    cardinality: int


def _nondominated_mask(objs: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row (minimization)."""
    p = objs.shape[0]
    if p <= 1:
        return np.ones(p, dtype=bool)
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dominates = le & lt
    return ~dominates.any(axis=0)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True if objective vector ``a`` dominates ``b`` under minimization."""
    a_arr = np.asarray(a, dtype=np.float64)
    b_arr = np.asarray(b, dtype=np.float64)
    return bool((a_arr <= b_arr).all() and (a_arr < b_arr).any())


def merge_fronts(fronts: Sequence[ParetoFront]) -> ParetoFront:
    """Union of fronts filtered to the non-dominated set."""
    if not fronts:
        raise DataValidationError("no fronts to merge")
    n_pools = fronts[0].n_pools
    if any(f.n_pools != n_pools for f in fronts):
        raise DataValidationError("fronts disagree on pool count")
    return ParetoFront.from_candidates(
        n_pools, ((e.allocation, e.objectives) for f in fronts for e in f.entries)
    )


def resolve_domains(
    countries: Sequence[str], meta: Mapping[str, CountryMeta] | None, n_pools: int
) -> tuple[tuple[int, ...], ...]:
    """Per-country allowed gene values, honoring pins and allowed sets.

    Pool 0 ("no pool") is always allowed unless the country is pinned.
    """
    if n_pools < 1:
        raise DataValidationError(f"pool count must be >= 1, got {n_pools}")
    domains: list[tuple[int, ...]] = []
    for iso3 in countries:
        cm = meta.get(iso3) if meta else None
        if cm is None:
            domains.append(tuple(range(n_pools + 1)))
            continue
        if cm.pinned_pool is not None:
            if cm.pinned_pool > n_pools:
                raise InfeasibleError(
                    f"country {iso3} is pinned to pool {cm.pinned_pool} but only {n_pools} pools exist"
                )
            domains.append((cm.pinned_pool,))
        elif cm.allowed_pools is None:
            domains.append(tuple(range(n_pools + 1)))
        else:
            allowed = {p for p in cm.allowed_pools if 0 <= p <= n_pools}
            allowed.add(0)
            domains.append(tuple(sorted(allowed)))
    return tuple(domains)


def is_feasible(x: Sequence[int], domains: Sequence[Sequence[int]]) -> bool:
    return len(x) == len(domains) and all(v in dom for v, dom in zip(x, domains))


def empty_pools(x: Sequence[int], n_pools: int) -> list[bool]:
    """Flag, per pool, whether the allocation leaves it without members."""
    values = set(int(v) for v in x)
    return [j not in values for j in range(1, n_pools + 1)]


# ---------------------------------------------------------------------------
# allocation evaluation
# ---------------------------------------------------------------------------


class _EvalContext:
    """Precomputed matrix state shared by all allocation evaluations.

    Pooled series are computed as matrix-vector products against a 0/1
    membership weight vector. The routine is fixed, so results are
    bit-identical however the evaluations are scheduled.
    """

    __slots__ = ("values", "es_individual", "k", "n_pools", "_n")

    def __init__(self, values: np.ndarray, k: int, n_pools: int):
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        self.k = k
        self.n_pools = n_pools
        self._n = values.shape[1]
        self.es_individual = np.array(
            [_topk_mean(self._pooled(self._weights([i])), k) for i in range(self._n)],
            dtype=np.float64,
        )

    def _weights(self, idx) -> np.ndarray:
        w = np.zeros(self._n, dtype=np.float64)
        w[idx] = 1.0
        return w

    def _pooled(self, weights: np.ndarray) -> np.ndarray:
        return self.values @ weights

    def rc_vector(self, x: np.ndarray) -> np.ndarray:
        rcs = np.ones(self.n_pools, dtype=np.float64)
        for j in range(1, self.n_pools + 1):
            w = (x == j).astype(np.float64)
            if w.any():
                rcs[j - 1] = self._rc_of_weights(w)
        return rcs

    def subset_rc(self, idx: np.ndarray) -> float:
        """Risk concentration of the pool formed by the given columns."""
        return self._rc_of_weights(self._weights(idx))

    def _rc_of_weights(self, w: np.ndarray) -> float:
        denom = float(self.es_individual @ w)
        if denom <= 0.0:
            return 1.0
        return min(1.0, _topk_mean(self._pooled(w), self.k) / denom)


def _topk_mean(x: np.ndarray, k: int) -> float:
    n = x.shape[0]
    if k >= n:
        return float(x.mean())
    part = np.partition(x, n - k)
    return float(part[n - k :].mean())


def _context_for(matrix: AnnualLossMatrix, spec: TailSpec, n_pools: int) -> _EvalContext:
    if spec.k > matrix.n_years:
        raise DataValidationError(f"tail count {spec.k} exceeds series length {matrix.n_years}")
    return _EvalContext(matrix.losses, spec.k, n_pools)


def evaluate_allocation(
    x: Sequence[int], matrix: AnnualLossMatrix, spec: TailSpec, n_pools: int
) -> np.ndarray:
    """Per-pool risk concentrations of one allocation vector.

    Pools left empty by the allocation score 1.0, the worst value (use
    :func:`empty_pools` to tell empty pools apart from fully concentrated
    ones). Feasibility against allowed/pinned sets is the caller's concern.
    """
    arr = np.asarray(x, dtype=np.int64)
    if arr.ndim != 1 or arr.size != matrix.n_countries:
        raise DataValidationError(
            f"allocation length {arr.size} does not match {matrix.n_countries} countries"
        )
    if arr.min(initial=0) < 0 or arr.max(initial=0) > n_pools:
        raise DataValidationError(f"allocation values must lie in 0..{n_pools}")
    ctx = _context_for(matrix, spec, n_pools)
    return ctx.rc_vector(arr)


class _Evaluator:
    """Caching population evaluator; optionally parallel across individuals.

    Results are bit-identical whether evaluation runs sequentially or in a
    thread pool: each individual is evaluated by the same pure function and
    results are gathered by position.
    """

    def __init__(self, ctx: _EvalContext, n_jobs: int | None = None):
        self._ctx = ctx
        self._cache: dict[bytes, np.ndarray] = {}
        self._n_jobs = n_jobs if n_jobs and n_jobs > 1 else None
        self._executor: ThreadPoolExecutor | None = None

    def __call__(self, pop: np.ndarray) -> np.ndarray:
        keys = [pop[i].tobytes() for i in range(pop.shape[0])]
        missing: list[tuple[bytes, np.ndarray]] = []
        seen: set[bytes] = set()
        for key, row in zip(keys, pop):
            if key not in self._cache and key not in seen:
                missing.append((key, row))
                seen.add(key)
        if missing:
            if self._n_jobs is not None and len(missing) > 1:
                if self._executor is None:
                    self._executor = ThreadPoolExecutor(max_workers=self._n_jobs)
                results = list(self._executor.map(self._ctx.rc_vector, (row for _, row in missing)))
            else:
                results = [self._ctx.rc_vector(row) for _, row in missing]
            for (key, _), rcs in zip(missing, results):
                self._cache[key] = rcs
        return np.stack([self._cache[key] for key in keys])

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None


# ---------------------------------------------------------------------------
# genetic operators
# ---------------------------------------------------------------------------


def _init_population(
    domains: Sequence[Sequence[int]], size: int, rng: np.random.Generator, baseline: np.ndarray
) -> np.ndarray:
    pop = np.empty((size, len(domains)), dtype=np.int16)
    for i, dom in enumerate(domains):
        values = np.asarray(dom, dtype=np.int16)
        pop[:, i] = values[rng.integers(0, len(values), size=size)]
    pop[0] = baseline  # pins-only allocation: always feasible, anchors the search
    return pop


def _baseline_allocation(domains: Sequence[Sequence[int]]) -> np.ndarray:
    # first domain value is the pin for pinned countries and 0 otherwise
    return np.array([dom[0] for dom in domains], dtype=np.int16)


def _uniform_crossover(parents: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    half = parents.shape[0] // 2
    p1 = parents[:half]
    p2 = parents[half:]
    do_cx = rng.random(half) < rate
    mask = (rng.random((half, parents.shape[1])) < 0.5) & do_cx[:, None]
    c1 = np.where(mask, p2, p1)
    c2 = np.where(mask, p1, p2)
    return np.concatenate([c1, c2], axis=0)


def _reset_mutation(
    pop: np.ndarray, domains: Sequence[Sequence[int]], rate: float, rng: np.random.Generator
) -> np.ndarray:
    hits = rng.random(pop.shape) < rate
    out = pop.copy()
    for i, dom in enumerate(domains):
        rows = np.flatnonzero(hits[:, i])
        if rows.size:
            values = np.asarray(dom, dtype=np.int16)
            out[rows, i] = values[rng.integers(0, len(values), size=rows.size)]
    return out


def _assert_feasible(pop: np.ndarray, domains: Sequence[Sequence[int]]) -> None:
    for i, dom in enumerate(domains):
        if not np.isin(pop[:, i], np.asarray(dom)).all():
            raise InternalInvariantError(f"infeasible gene value produced at position {i}")


# ---------------------------------------------------------------------------
# non-dominated sorting and reference-direction niching
# ---------------------------------------------------------------------------


def _nd_rank(objs: np.ndarray) -> np.ndarray:
    """Front index (0 is best) per row, via fast non-dominated sorting."""
    p = objs.shape[0]
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dominates_m = le & lt
    counts = dominates_m.sum(axis=0).astype(np.int64)
    rank = np.full(p, -1, dtype=np.int64)
    current = np.flatnonzero(counts == 0)
    level = 0
    while current.size:
        rank[current] = level
        counts = counts - dominates_m[current].sum(axis=0)
        counts[rank >= 0] = -1
        level += 1
        current = np.flatnonzero(counts == 0)
    return rank


def reference_directions(n_obj: int, partitions: int) -> np.ndarray:
    """Uniform simplex lattice directions (Das and Dennis construction)."""
    if partitions < 1:
        raise DataValidationError(f"partition count must be >= 1, got {partitions}")
    out = []
    for dividers in itertools.combinations(range(partitions + n_obj - 1), n_obj - 1):
        parts = []
        prev = -1
        for d in dividers:
            parts.append(d - prev - 1)
            prev = d
        parts.append(partitions + n_obj - 2 - prev)
        out.append(parts)
    return np.asarray(out, dtype=np.float64) / partitions


def _auto_partitions(n_obj: int, population: int) -> int:
    p = 1
    while math.comb(p + n_obj - 1, n_obj - 1) < population:
        p += 1
    return p


def _associate(norm_objs: np.ndarray, unit_dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest reference direction per point, by perpendicular distance."""
    proj = norm_objs @ unit_dirs.T
    sq = (norm_objs * norm_objs).sum(axis=1, keepdims=True) - proj * proj
    dist = np.sqrt(np.clip(sq, 0.0, None))
    return dist.argmin(axis=1), dist.min(axis=1)


def _normalize(objs: np.ndarray, member_idx: np.ndarray) -> np.ndarray:
    """Translate by the ideal point and scale by hyperplane intercepts."""
    zmin = objs.min(axis=0)
    translated = objs - zmin
    m = objs.shape[1]
    weights = np.maximum(np.eye(m), 1e-6)
    cand = translated[member_idx]
    extremes = np.empty(m, dtype=np.intp)
    for j in range(m):
        asf = (cand / weights[j]).max(axis=1)
        extremes[j] = member_idx[int(asf.argmin())]
    intercepts = None
    try:
        plane = np.linalg.solve(translated[extremes], np.ones(m))
        if np.isfinite(plane).all() and (plane > 1e-12).all():
            intercepts = 1.0 / plane
    except np.linalg.LinAlgError:
        intercepts = None
    if intercepts is None or not np.isfinite(intercepts).all():
        intercepts = cand.max(axis=0)
    intercepts = np.where(intercepts > 1e-12, intercepts, 1.0)
    return translated / intercepts


def _environment_select(
    pop: np.ndarray,
    objs: np.ndarray,
    unit_dirs: np.ndarray,
    size: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reference-direction niched truncation of a combined population."""
    ranks = _nd_rank(objs)
    selected: list[int] = []
    level = 0
    while True:
        front = np.flatnonzero(ranks == level)
        if len(selected) + front.size > size:
            break
        selected.extend(int(i) for i in front)
        if len(selected) == size:
            sel = np.asarray(selected, dtype=np.intp)
            return pop[sel], objs[sel], ranks[sel]
        level += 1
    last_front = np.flatnonzero(ranks == level)
    need = size - len(selected)

    consider = np.concatenate([np.asarray(selected, dtype=np.intp), last_front])
    norm = _normalize(objs, consider)
    assoc, dist = _associate(norm[consider], unit_dirs)
    n_dirs = unit_dirs.shape[0]
    n_sel = len(selected)
    rho = np.bincount(assoc[:n_sel], minlength=n_dirs)

    candidates: dict[int, list[int]] = {}
    for pos in range(n_sel, consider.size):
        candidates.setdefault(int(assoc[pos]), []).append(pos)

    chosen: list[int] = []
    active = np.array([d in candidates for d in range(n_dirs)])
    while need > 0:
        counts = np.where(active, rho, np.iinfo(np.int64).max)
        best = counts.min()
        options = np.flatnonzero(counts == best)
        d = int(options[rng.integers(options.size)])
        pool = candidates[d]
        if rho[d] == 0:
            pick = min(range(len(pool)), key=lambda i: (dist[pool[i]], pool[i]))
        else:
            pick = int(rng.integers(len(pool)))
        pos = pool.pop(pick)
        if not pool:
            del candidates[d]
            active[d] = False
        chosen.append(int(consider[pos]))
        rho[d] += 1
        need -= 1
    sel = np.asarray(selected + chosen, dtype=np.intp)
    return pop[sel], objs[sel], ranks[sel]


# ---------------------------------------------------------------------------
# step-1 runs
# ---------------------------------------------------------------------------


def _tournament_pick(keys: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Binary tournament on precomputed comparison keys (lower wins)."""
    a = rng.integers(0, keys.shape[0], size=size)
    b = rng.integers(0, keys.shape[0], size=size)
    coin = rng.random(size) < 0.5
    take_a = (keys[a] < keys[b]) | ((keys[a] == keys[b]) & coin)
    return np.where(take_a, a, b)


def _run_single_objective(
    domains: Sequence[Sequence[int]],
    config: OptimizerConfig,
    rng: np.random.Generator,
    evaluator: _Evaluator,
) -> tuple[tuple[tuple[int, ...], tuple[float, ...]], list[tuple[float, ...]]]:
    n = len(domains)
    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / max(1, n)
    baseline = _baseline_allocation(domains)
    pop = _init_population(domains, config.population_size, rng, baseline)
    obj = evaluator(pop)[:, 0]

    best_i = int(obj.argmin())
    best_val = float(obj[best_i])
    best_x = pop[best_i].copy()
    convergence: list[tuple[float, ...]] = []

    for _ in range(config.generations):
        parents = pop[_tournament_pick(obj, config.population_size, rng)]
        off = _uniform_crossover(parents, config.crossover_rate, rng)
        off = _reset_mutation(off, domains, rate, rng)
        if DEBUG_FEASIBILITY:
            _assert_feasible(off, domains)
        off_obj = evaluator(off)[:, 0]
        # elitism: the best parent survives into the next generation
        bi = int(obj.argmin())
        wi = int(off_obj.argmax())
        if obj[bi] < off_obj.min():
            off[wi] = pop[bi]
            off_obj[wi] = obj[bi]
        pop, obj = off, off_obj
        gi = int(obj.argmin())
        if obj[gi] < best_val:
            best_val = float(obj[gi])
            best_x = pop[gi].copy()
        convergence.append((best_val,))
    return (tuple(int(v) for v in best_x), (best_val,)), convergence


def _run_many_objective(
    domains: Sequence[Sequence[int]],
    n_pools: int,
    config: OptimizerConfig,
    rng: np.random.Generator,
    evaluator: _Evaluator,
) -> tuple[list[tuple[tuple[int, ...], tuple[float, ...]]], list[tuple[float, ...]]]:
    n = len(domains)
    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / max(1, n)
    partitions = config.reference_direction_partitions or _auto_partitions(
        n_pools, config.population_size
    )
    dirs = reference_directions(n_pools, partitions)
    unit_dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)

    baseline = _baseline_allocation(domains)
    pop = _init_population(domains, config.population_size, rng, baseline)
    objs = evaluator(pop)
    rank = _nd_rank(objs)
    convergence: list[tuple[float, ...]] = []

    for _ in range(config.generations):
        parents = pop[_tournament_pick(rank, config.population_size, rng)]
        off = _uniform_crossover(parents, config.crossover_rate, rng)
        off = _reset_mutation(off, domains, rate, rng)
        if DEBUG_FEASIBILITY:
            _assert_feasible(off, domains)
        off_objs = evaluator(off)
        pop, objs, rank = _environment_select(
            np.concatenate([pop, off], axis=0),
            np.concatenate([objs, off_objs], axis=0),
            unit_dirs,
            config.population_size,
            rng,
        )
        convergence.append(tuple(float(v) for v in objs.min(axis=0)))
    keep = np.flatnonzero(rank == 0)
    return [
        (tuple(int(v) for v in pop[i]), tuple(float(v) for v in objs[i])) for i in keep
    ], convergence


def run_step1(
    matrix: AnnualLossMatrix,
    meta: Mapping[str, CountryMeta] | None,
    n_pools: int,
    spec: TailSpec,
    config: OptimizerConfig,
    n_jobs: int | None = None,
) -> Step1Result:
    """Multi-run allocation search; returns the merged front and run logs."""
    domains = resolve_domains(matrix.countries, meta, n_pools)
    ctx = _context_for(matrix, spec, n_pools)
    evaluator = _Evaluator(ctx, n_jobs=n_jobs)
    candidates: list[tuple[tuple[int, ...], tuple[float, ...]]] = []
    logs: list[tuple[tuple[float, ...], ...]] = []
    try:
        # the pins-only allocation is always feasible; keeping it as an
        # explicit candidate makes the front at least match any pinned or
        # previously known composition
        baseline = _baseline_allocation(domains)
        baseline_obj = evaluator(baseline[None, :])[0]
        candidates.append(
            (tuple(int(v) for v in baseline), tuple(float(v) for v in baseline_obj))
        )
        for r in range(config.seeds):
            rng = np.random.default_rng(config.rng_seed + r)
            if n_pools == 1:
                best, log = _run_single_objective(domains, config, rng, evaluator)
                candidates.append(best)
            else:
                entries, log = _run_many_objective(domains, n_pools, config, rng, evaluator)
                candidates.extend(entries)
            logs.append(tuple(log))
    finally:
        evaluator.close()
    front = ParetoFront.from_candidates(n_pools, candidates)
    if not front.entries:
        raise InternalInvariantError("allocation search produced an empty front")
    return Step1Result(front=front, convergence=tuple(logs))


def optimize_step1(
    matrix: AnnualLossMatrix,
    meta: Mapping[str, CountryMeta] | None,
    n_pools: int,
    spec: TailSpec,
    config: OptimizerConfig,
    n_jobs: int | None = None,
) -> ParetoFront:
    """Step 1: minimize each pool's risk concentration over allocations."""
    return run_step1(matrix, meta, n_pools, spec, config, n_jobs=n_jobs).front


# ---------------------------------------------------------------------------
# step-2 subset minimization
# ---------------------------------------------------------------------------


def run_step2(
    matrix: AnnualLossMatrix,
    pool_members: Iterable[str],
    rc_star: float,
    spec: TailSpec,
    config: OptimizerConfig,
    n_jobs: int | None = None,
) -> Step2Result:
    """Smallest member subset whose concentration stays within ``rc_star``.

    Feasibility means concentration at most ``rc_star + RC_TOL``. Among
    feasible subsets the smallest wins, then the lowest concentration, then
    the lexicographically smallest member codes. If the search encounters a
    subset strictly below ``rc_star - RC_TOL`` it reports the improvement as
    a diagnostic (the step-1 result was suboptimal) but keeps selecting
    against the input threshold.
    """
    member_idx = matrix.indices_for(pool_members)
    if member_idx.size == 0:
        raise DataValidationError("pool member set must not be empty")
    members = tuple(matrix.countries[i] for i in member_idx)
    nj = len(members)
    rc_star = float(rc_star)

    ctx = _context_for(matrix, spec, 1)
    full_rc = ctx.subset_rc(member_idx)
    if full_rc > rc_star + RC_TOL:
        raise InfeasibleError(
            f"target concentration {rc_star!r} is not achieved by the full member set (rc={full_rc!r})"
        )

    cache: dict[bytes, float] = {}

    def evaluate(bits: np.ndarray) -> np.ndarray:
        out = np.empty(bits.shape[0], dtype=np.float64)
        for i in range(bits.shape[0]):
            key = bits[i].tobytes()
            rc = cache.get(key)
            if rc is None:
                idx = member_idx[bits[i].astype(bool)]
                rc = ctx.subset_rc(idx) if idx.size else math.inf
                cache[key] = rc
            out[i] = rc
        return out

    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / nj
    size = config.population_size

    for r in range(config.seeds):
        rng = np.random.default_rng(config.rng_seed + r)
        pop = (rng.random((size, nj)) < 0.5).astype(np.int8)
        pop[0] = 1  # the full set is always feasible
        _repair_empty(pop, rng)
        rc = evaluate(pop)
        keys = _step2_keys(pop, rc, rc_star)
        for _ in range(config.generations):
            parents = pop[_tournament_pick(keys, size, rng)]
            half = size // 2
            do_cx = rng.random(half) < config.crossover_rate
            mask = (rng.random((half, nj)) < 0.5) & do_cx[:, None]
            off = np.concatenate(
                [np.where(mask, parents[half:], parents[:half]), np.where(mask, parents[:half], parents[half:])],
                axis=0,
            )
            flips = rng.random(off.shape) < rate
            off = np.where(flips, 1 - off, off).astype(np.int8)
            _repair_empty(off, rng)
            off_rc = evaluate(off)
            off_keys = _step2_keys(off, off_rc, rc_star)
            # elitism on the composite key
            bi = int(keys.argmin())
            wi = int(off_keys.argmax())
            if keys[bi] < off_keys.min():
                off[wi] = pop[bi]
                off_rc[wi] = rc[bi]
                off_keys[wi] = keys[bi]
            pop, rc, keys = off, off_rc, off_keys

    best_rc = min(v for v in cache.values() if math.isfinite(v))
    improved = best_rc < rc_star - RC_TOL
    if improved:
        warnings.warn(
            f"subset search reached concentration {best_rc!r}, below the step-1 value {rc_star!r}; "
            "the step-1 result may be suboptimal",
            stacklevel=2,
        )

    best: tuple[int, float, tuple[str, ...], bytes] | None = None
    for key, rc_val in cache.items():
        if not math.isfinite(rc_val) or rc_val > rc_star + RC_TOL:
            continue
        bits = np.frombuffer(key, dtype=np.int8)
        card = int(bits.sum())
        if card == 0:
            continue
        names = tuple(sorted(m for m, b in zip(members, bits) if b))
        cand = (card, rc_val, names, key)
        if best is None or cand[:3] < best[:3]:
            best = cand
    if best is None:
        raise InternalInvariantError("subset search lost the always-feasible full set")

    bits = np.frombuffer(best[3], dtype=np.int8)
    selection = SelectionVector(members=members, z=tuple(int(b) for b in bits))
    return Step2Result(
        selection=selection,
        rc=best[1],
        rc_star_input=rc_star,
        rc_star=min(rc_star, best_rc),
        improved=improved,
        cardinality=best[0],
    )


def _repair_empty(pop: np.ndarray, rng: np.random.Generator) -> None:
    empty = np.flatnonzero(pop.sum(axis=1) == 0)
    for i in empty:
        pop[i, rng.integers(pop.shape[1])] = 1


def _step2_keys(pop: np.ndarray, rc: np.ndarray, rc_star: float) -> np.ndarray:
    """Total-order rank: feasible first, then cardinality, then concentration."""
    feasible = rc <= rc_star + RC_TOL
    card = pop.sum(axis=1)
    card_key = np.where(feasible, card, 0)
    order = np.lexsort((rc, card_key, ~feasible))
    keys = np.empty(pop.shape[0], dtype=np.int64)
    keys[order] = np.arange(pop.shape[0])
    return keys


def optimize_step2(
    matrix: AnnualLossMatrix,
    pool_members: Iterable[str],
    rc_star: float,
    spec: TailSpec,
    config: OptimizerConfig,
    n_jobs: int | None = None,
) -> SelectionVector:
    """Step 2: minimal-cardinality subset preserving the optimal concentration."""
    return run_step2(matrix, pool_members, rc_star, spec, config, n_jobs=n_jobs).selection


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

ORACLE_LIMIT = 10_000_000


def exhaustive_oracle(
    matrix: AnnualLossMatrix,
    meta: Mapping[str, CountryMeta] | None,
    n_pools: int,
    spec: TailSpec,
    limit: int = ORACLE_LIMIT,
) -> ParetoFront:
    """Exact non-dominated front by full enumeration of feasible allocations."""
    domains = resolve_domains(matrix.countries, meta, n_pools)
    total = math.prod(len(d) for d in domains)
    if total > limit:
        raise DataValidationError(f"search space of {total} allocations exceeds the oracle limit {limit}")
    ctx = _context_for(matrix, spec, n_pools)

    best_allocs: list[tuple[int, ...]] = []
    best_objs = np.empty((0, n_pools), dtype=np.float64)
    batch: list[tuple[int, ...]] = []

    def flush() -> None:
        nonlocal best_allocs, best_objs, batch
        if not batch:
            return
        objs = np.stack([ctx.rc_vector(np.asarray(x, dtype=np.int16)) for x in batch])
        allocs = best_allocs + batch
        objs_all = np.concatenate([best_objs, objs], axis=0)
        keep = _nondominated_mask(objs_all)
        best_allocs = [a for a, ok in zip(allocs, keep) if ok]
        best_objs = objs_all[keep]
        batch = []

    for x in itertools.product(*domains):
        batch.append(x)
        if len(batch) >= 2048:
            flush()
    flush()
    return ParetoFront.from_candidates(
        n_pools, ((a, tuple(float(v) for v in o)) for a, o in zip(best_allocs, best_objs))
    )


# ---------------------------------------------------------------------------
# estimator wrapper
# ---------------------------------------------------------------------------


def _synthetic_codes(n: int) -> tuple[str, ...]:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    codes = []
    for i in range(n):
        codes.append(letters[i // (26 * 26) % 26] + letters[i // 26 % 26] + letters[i % 26])
    return tuple(codes)


def _coerce_matrix(X, countries: Sequence[str] | None) -> AnnualLossMatrix:
    if isinstance(X, AnnualLossMatrix):
        return X
    values = as_loss_array(X, name="X")
    cols = tuple(countries) if countries is not None else _synthetic_codes(values.shape[1])
    return AnnualLossMatrix(years=tuple(range(values.shape[0])), countries=cols, losses=values)


class PoolOptimizer(BaseEstimator):
    """Assigns loss-series columns to risk pools minimizing concentration.

    Scikit-learn style estimator over a matrix of shape (n_years,
    n_countries). After ``fit``, ``front_`` holds the merged non-dominated
    front; with a single pool, ``allocation_`` and ``labels_`` hold the best
    membership vector and ``rc_``/``rd_`` its concentration/diversification.

    Parameters mirror :class:`OptimizerConfig`; ``random_state`` seeds the
    independent runs, ``n_jobs`` parallelizes fitness evaluation without
    changing any result.
    """

    def __init__(
        self,
        n_pools: int = 1,
        alpha: float = 0.995,
        population_size: int = DEFAULT_POPULATION,
        generations: int = DEFAULT_GENERATIONS,
        crossover_rate: float = 0.9,
        mutation_rate: float | None = None,
        n_seeds: int = 15,
        reference_partitions: int | None = None,
        random_state: int = 0,
        n_jobs: int | None = None,
    ):
        self.n_pools = n_pools
        self.alpha = alpha
        self.population_size = population_size
        self.generations = generations
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.n_seeds = n_seeds
        self.reference_partitions = reference_partitions
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(
            population_size=self.population_size,
            generations=self.generations,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate,
            seeds=self.n_seeds,
            rng_seed=self.random_state,
            reference_direction_partitions=self.reference_partitions,
        )

    def fit(self, X, y=None, *, countries: Sequence[str] | None = None, meta=None):
        matrix = _coerce_matrix(X, countries)
        spec = TailSpec.from_alpha(self.alpha, matrix.n_years)
        result = run_step1(matrix, meta, self.n_pools, spec, self._config(), n_jobs=self.n_jobs)
        self.front_ = result.front
        self.convergence_ = result.convergence
        self.countries_ = matrix.countries
        self.n_features_in_ = matrix.n_countries
        self._matrix = matrix
        self._spec = spec
        if self.n_pools == 1:
            entry = result.front.entries[0]
            self.allocation_ = np.asarray(entry.allocation, dtype=np.int64)
            self.labels_ = self.allocation_
            self.rc_ = entry.objectives[0]
            self.rd_ = 1.0 - self.rc_
        return self

    def minimal_members(self, pool: int = 1, entry: int = 0) -> Step2Result:
        """Step-2 shrink of one pool from a fitted front entry."""
        if not hasattr(self, "front_"):
            raise DataValidationError("estimator is not fitted")
        chosen = self.front_.entries[entry]
        members = [c for c, v in zip(self.countries_, chosen.allocation) if v == pool]
        if not members:
            raise DataValidationError(f"pool {pool} is empty in front entry {entry}")
        return run_step2(
            self._matrix,
            members,
            chosen.objectives[pool - 1],
            self._spec,
            self._config(),
            n_jobs=self.n_jobs,
        )
