"""Command line pipeline for sampling, metrics, and pool optimization.

Subcommands::

    riskpools metrics            --config cfg.json [--out DIR] [--seed N]
    riskpools optimize-regional  --config cfg.json [--out DIR] [--seed N]
    riskpools optimize-global    --config cfg.json [--out DIR] [--seed N]
    riskpools expand-existing    --config cfg.json [--out DIR] [--seed N]
    riskpools sample             --config cfg.json [--out DIR] [--seed N]

The config file is JSON mirroring the run settings; relative paths inside it
resolve against the config file's directory. ``--seed`` overrides both the
optimizer and sampler seeds. All tabular outputs are UTF-8 CSV with ``\\n``
line endings and shortest round-trip number formatting. Every run writes a
``manifest.json`` recording config and input digests, seeds, timings, and
output digests; outputs are byte-identical across reruns of one manifest.

Exit codes: 0 success, 1 input or validation error, 2 infeasible
optimization, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
import traceback
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .data import (
    AnnualLossMatrix,
    CountryMeta,
    load_annual_losses,
    load_country_meta,
    load_event_catalogue,
    write_annual_losses,
)
from .errors import DataValidationError, InternalInvariantError, RiskPoolsError
from .metrics import TailSpec, pool_metrics, tail_correlation
from .optimize import OptimizerConfig, ParetoFront, run_step1, run_step2
from .sampling import (
    SamplerConfig,
    build_scenarios,
    classify_year_types,
    expected_annual_count,
    load_seasonal_labels,
)

MODES = ("metrics", "optimize-regional", "optimize-global", "expand-existing", "sample")
EXPANSION_SCOPES = ("regional", "global")


@dataclass(frozen=True)
class PoolSpecCfg:
    name: str
    region_filter: str | None = None
    pinned_members: tuple[str, ...] = ()


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    pools: tuple[PoolSpecCfg, ...]
    optimizer: OptimizerConfig
    sampler: SamplerConfig | None
    inputs: dict[str, str]
    output_dir: str | None
    mode: str | None
    expansion: str


def load_run_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataValidationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataValidationError(f"{path}: config must be a JSON object")

    alpha = float(raw.get("alpha", 0.995))
    mode = raw.get("mode")
    if mode is not None and mode not in MODES:
        raise DataValidationError(f"unknown mode '{mode}', expected one of {MODES}")
    expansion = raw.get("expansion", "regional")
    if expansion not in EXPANSION_SCOPES:
        raise DataValidationError(f"unknown expansion scope '{expansion}', expected one of {EXPANSION_SCOPES}")

    pools: list[PoolSpecCfg] = []
    names: set[str] = set()
    for rec in raw.get("pools", []):
        if not isinstance(rec, dict) or "name" not in rec:
            raise DataValidationError("each pool needs at least a 'name' field")
        name = str(rec["name"])
        if name in names:
            raise DataValidationError(f"duplicate pool name '{name}'")
        names.add(name)
        pools.append(
            PoolSpecCfg(
                name=name,
                region_filter=rec.get("region_filter"),
                pinned_members=tuple(rec.get("pinned_members", ())),
            )
        )

    optimizer = OptimizerConfig(**raw.get("optimizer", {}))
    sampler_raw = raw.get("sampler")
    sampler = None
    if sampler_raw is not None:
        if "window" in sampler_raw:
            sampler_raw = dict(sampler_raw)
            sampler_raw["window"] = tuple(sampler_raw["window"])
        sampler = SamplerConfig(**sampler_raw)

    base = path.parent
    inputs = {}
    for key, value in raw.get("inputs", {}).items():
        inputs[str(key)] = str((base / str(value)).resolve()) if value else ""

    return RunConfig(
        alpha=alpha,
        pools=tuple(pools),
        optimizer=optimizer,
        sampler=sampler,
        inputs=inputs,
        output_dir=raw.get("output_dir"),
        mode=mode,
        expansion=expansion,
    )


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _safe_name(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in label)


class _Run:
    """Collects manifest material while a command executes."""

    def __init__(self, command: str, cfg: RunConfig, outdir: Path):
        self.command = command
        self.cfg = cfg
        self.outdir = outdir
        self.inputs: dict[str, str] = {}
        self.outputs: list[Path] = []
        self.stats: dict = {}
        self.timings: dict[str, float] = {}
        self._t0 = time.perf_counter()
        self._stage_start = self._t0

    def require_input(self, key: str, *, directory: bool = False) -> Path:
        value = self.cfg.inputs.get(key)
        if not value:
            raise DataValidationError(f"config is missing required input '{key}'")
        path = Path(value)
        if not path.exists():
            raise DataValidationError(f"input file for '{key}' not found: {path}")
        if not directory:
            self.inputs[key] = _sha256(path)
        return path

    def stage(self, name: str) -> None:
        now = time.perf_counter()
        self.timings[name] = now - self._stage_start
        self._stage_start = now

    def emit(self, name: str, writer) -> Path:
        path = self.outdir / name
        writer(path)
        self.outputs.append(path)
        return path

    def write_manifest(self) -> None:
        self.timings["total"] = time.perf_counter() - self._t0
        seeds = {"optimizer": self.cfg.optimizer.rng_seed}
        if self.cfg.sampler is not None:
            seeds["sampler"] = self.cfg.sampler.rng_seed
        config_payload = {
            "alpha": self.cfg.alpha,
            "pools": [dataclasses.asdict(p) for p in self.cfg.pools],
            "optimizer": dataclasses.asdict(self.cfg.optimizer),
            "sampler": dataclasses.asdict(self.cfg.sampler) if self.cfg.sampler else None,
            "expansion": self.cfg.expansion,
        }
        digest = hashlib.sha256(
            json.dumps(config_payload, sort_keys=True, default=str).encode()
        ).hexdigest()
        manifest = {
            "version": __version__,
            "command": self.command,
            "config_digest": digest,
            "input_digests": dict(sorted(self.inputs.items())),
            "rng_seeds": seeds,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
            "outputs": {p.name: _sha256(p) for p in sorted(self.outputs)},
            "stats": self.stats,
        }
        _write_json(self.outdir / "manifest.json", manifest)


# ---------------------------------------------------------------------------
# shared command plumbing
# ---------------------------------------------------------------------------


def _load_matrix(run: _Run) -> AnnualLossMatrix:
    return load_annual_losses(run.require_input("annual_losses"))


def _load_meta(run: _Run, matrix: AnnualLossMatrix) -> dict[str, CountryMeta]:
    meta = load_country_meta(run.require_input("country_meta"))
    missing = [c for c in matrix.countries if c not in meta]
    if missing:
        raise DataValidationError(f"countries missing from metadata: {', '.join(missing[:8])}")
    return meta


def _user_allows(meta: Mapping[str, CountryMeta] | None, iso3: str, pool_index: int) -> bool:
    if meta is None:
        return True
    cm = meta.get(iso3)
    return cm is None or cm.allowed_pools is None or pool_index in cm.allowed_pools


def _check_pins(matrix: AnnualLossMatrix, pools: Sequence[PoolSpecCfg]) -> dict[str, int]:
    """Map pinned member to 1-based pool index; reject conflicts."""
    pinned: dict[str, int] = {}
    for j, pool in enumerate(pools, start=1):
        for iso3 in pool.pinned_members:
            matrix.index_of(iso3)
            if iso3 in pinned and pinned[iso3] != j:
                raise DataValidationError(f"country {iso3} is pinned to more than one pool")
            pinned[iso3] = j
    return pinned


def _member_rows(matrix, members, spec, pool_name):
    pool, rows = pool_metrics(matrix, members, spec)
    csv_rows = [
        (pool_name, m.iso3, m.mes, m.es_individual, m.share, int(m.zero_es)) for m in rows
    ]
    return pool, rows, csv_rows


def _pool_csv_row(name, pool):
    return (name, pool.var, pool.es, pool.rc, pool.rd)


MEMBER_HEADER = ("pool", "iso3", "mes", "es_individual", "share", "zero_es")
POOL_HEADER = ("pool", "var", "es", "rc", "rd")


def _write_front_outputs(
    run: _Run,
    front: ParetoFront,
    matrix: AnnualLossMatrix,
    spec: TailSpec,
    pool_names: Sequence[str],
) -> None:
    """Front CSV plus one membership/shares JSON per configuration."""
    m = len(pool_names)
    objs = front.objective_array()
    best_for = {j: int(objs[:, j].argmin()) for j in range(m)}

    header = (
        ["config_id"]
        + [f"rc_{_safe_name(n)}" for n in pool_names]
        + [f"rd_{_safe_name(n)}" for n in pool_names]
        + [f"best_for_{_safe_name(n)}" for n in pool_names]
    )
    rows = []
    for i, entry in enumerate(front.entries):
        config_id = f"cfg_{i:03d}"
        rows.append(
            [config_id]
            + list(entry.objectives)
            + [1.0 - rc for rc in entry.objectives]
            + [int(best_for[j] == i) for j in range(m)]
        )
    run.emit("pareto_front.csv", lambda p: _write_csv(p, header, rows))

    for i, entry in enumerate(front.entries):
        config_id = f"cfg_{i:03d}"
        payload = {
            "config_id": config_id,
            "allocation": {
                iso3: (pool_names[v - 1] if v else None)
                for iso3, v in zip(matrix.countries, entry.allocation)
            },
            "pools": {},
        }
        for j, name in enumerate(pool_names, start=1):
            members = [c for c, v in zip(matrix.countries, entry.allocation) if v == j]
            if members:
                pool, member_rows_, _ = _member_rows(matrix, members, spec, name)
                payload["pools"][name] = {
                    "members": members,
                    "rc": pool.rc,
                    "rd": pool.rd,
                    "member_shares": {r.iso3: r.share for r in member_rows_},
                }
            else:
                payload["pools"][name] = {"members": [], "rc": 1.0, "rd": 0.0, "member_shares": {}}
        run.emit(f"pools_{config_id}.json", lambda p, payload=payload: _write_json(p, payload))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_metrics(run: _Run) -> None:
    matrix = _load_matrix(run)
    spec = TailSpec.from_alpha(run.cfg.alpha, matrix.n_years)
    if not run.cfg.pools:
        raise DataValidationError("metrics mode needs at least one pool with members")
    run.stage("load")

    pool_rows = []
    member_rows = []
    for pool_cfg in run.cfg.pools:
        if not pool_cfg.pinned_members:
            raise DataValidationError(f"pool '{pool_cfg.name}' has no members configured")
        pool, _, csv_rows = _member_rows(matrix, pool_cfg.pinned_members, spec, pool_cfg.name)
        pool_rows.append(_pool_csv_row(pool_cfg.name, pool))
        member_rows.extend(csv_rows)
    corr = tail_correlation(matrix, spec)
    if corr.flagged:
        warnings.warn(f"{len(corr.flagged)} country pairs had zero-variance tail series", stacklevel=2)
    run.stage("compute")

    run.emit("pool_metrics.csv", lambda p: _write_csv(p, POOL_HEADER, pool_rows))
    run.emit("member_shares.csv", lambda p: _write_csv(p, MEMBER_HEADER, member_rows))
    corr_rows = [(c, *corr.values[i]) for i, c in enumerate(corr.countries)]
    run.emit(
        "tail_correlation.csv",
        lambda p: _write_csv(p, ("iso3", *corr.countries), corr_rows),
    )
    run.stage("write")


def _cmd_optimize_regional(run: _Run, n_jobs: int | None = None) -> None:
    matrix = _load_matrix(run)
    meta = _load_meta(run, matrix)
    spec = TailSpec.from_alpha(run.cfg.alpha, matrix.n_years)
    if not run.cfg.pools:
        raise DataValidationError("optimize-regional needs at least one pool definition")
    _check_pins(matrix, run.cfg.pools)
    run.stage("load")

    for j, pool_cfg in enumerate(run.cfg.pools, start=1):
        region = pool_cfg.region_filter
        if not region:
            raise DataValidationError(f"pool '{pool_cfg.name}' needs a region_filter in regional mode")
        pins = set(pool_cfg.pinned_members)
        candidates = [
            c
            for c in matrix.countries
            if c in pins
            or (
                meta[c].region == region
                and _user_allows(meta, c, j)
                and meta[c].pinned_pool in (None, j)
            )
        ]
        if not candidates:
            raise DataValidationError(f"region '{region}' has no candidate countries")

        notes: list[str] = []
        if len(candidates) == 1:
            only = candidates[0]
            notes.append(f"region '{region}' has a single candidate; pooling cannot diversify")
            warnings.warn(notes[-1], stacklevel=2)
            members = [only]
            step1_rc = 1.0
            convergence = ()
            improved = False
        else:
            constraint = {}
            for c in matrix.countries:
                if c in pins:
                    constraint[c] = CountryMeta(iso3=c, region=region, pinned_pool=1)
                elif meta[c].pinned_pool is not None:
                    # user pins name global pool indices; inside this
                    # single-pool subproblem they mean "in" or "out"
                    constraint[c] = CountryMeta(
                        iso3=c, region=region, pinned_pool=1 if meta[c].pinned_pool == j else 0
                    )
                else:
                    constraint[c] = CountryMeta(
                        iso3=c,
                        region=region,
                        allowed_pools=frozenset({0, 1} if c in candidates else {0}),
                    )
            result = run_step1(matrix, constraint, 1, spec, run.cfg.optimizer, n_jobs=n_jobs)
            entry = result.front.entries[0]
            step1_rc = entry.objectives[0]
            convergence = result.convergence
            members = [c for c, v in zip(matrix.countries, entry.allocation) if v == 1]
            improved = False
            if not members:
                members = [min(candidates)]
                notes.append(
                    f"no allocation in region '{region}' diversifies risk; reporting a singleton pool"
                )
                warnings.warn(notes[-1], stacklevel=2)
            else:
                step2 = run_step2(matrix, members, step1_rc, spec, run.cfg.optimizer, n_jobs=n_jobs)
                members = list(step2.selection.selected)
                improved = step2.improved

        pool, member_detail, _ = _member_rows(matrix, members, spec, pool_cfg.name)
        payload = {
            "pool": pool_cfg.name,
            "region": region,
            "step1_rc": step1_rc,
            "rc": pool.rc,
            "rd": pool.rd,
            "var": pool.var,
            "es": pool.es,
            "members": sorted(members),
            "cardinality": len(members),
            "member_shares": {r.iso3: r.share for r in member_detail},
            "step1_suboptimal": improved,
            "notes": notes,
        }
        safe = _safe_name(region)
        run.emit(f"optimal_pool_{safe}.json", lambda p, payload=payload: _write_json(p, payload))
        conv_rows = [
            (r, g + 1, values[0])
            for r, gens in enumerate(convergence)
            for g, values in enumerate(gens)
        ]
        run.emit(
            f"convergence_{safe}.csv",
            lambda p, rows=conv_rows: _write_csv(p, ("run", "generation", "best_rc"), rows),
        )
    run.stage("optimize")


def _cmd_optimize_global(run: _Run, n_jobs: int | None = None) -> None:
    matrix = _load_matrix(run)
    spec = TailSpec.from_alpha(run.cfg.alpha, matrix.n_years)
    if not run.cfg.pools:
        raise DataValidationError("optimize-global needs the pool definitions")
    regional_dir = run.require_input("regional_results", directory=True)
    meta = load_country_meta(run.cfg.inputs["country_meta"]) if run.cfg.inputs.get("country_meta") else None

    pinned: dict[str, int] = {}
    for j, pool_cfg in enumerate(run.cfg.pools, start=1):
        if not pool_cfg.region_filter:
            raise DataValidationError(f"pool '{pool_cfg.name}' needs a region_filter to locate regional results")
        result_path = Path(regional_dir) / f"optimal_pool_{_safe_name(pool_cfg.region_filter)}.json"
        if not result_path.exists():
            raise DataValidationError(f"missing regional result for '{pool_cfg.region_filter}': {result_path}")
        run.inputs[f"regional:{pool_cfg.region_filter}"] = _sha256(result_path)
        regional = json.loads(result_path.read_text(encoding="utf-8"))
        for iso3 in regional["members"]:
            matrix.index_of(iso3)
            if iso3 in pinned:
                raise DataValidationError(f"country {iso3} appears in more than one regional pool")
            pinned[iso3] = j
    run.stage("load")

    m = len(run.cfg.pools)
    constraint = {}
    for c in matrix.countries:
        if c in pinned:
            constraint[c] = CountryMeta(iso3=c, region="any", pinned_pool=pinned[c])
        elif meta is not None and meta.get(c) is not None and meta[c].pinned_pool is not None:
            constraint[c] = CountryMeta(iso3=c, region="any", pinned_pool=meta[c].pinned_pool)
        else:
            allowed = frozenset({0} | {j for j in range(1, m + 1) if _user_allows(meta, c, j)})
            constraint[c] = CountryMeta(iso3=c, region="any", allowed_pools=allowed)
    result = run_step1(matrix, constraint, m, spec, run.cfg.optimizer, n_jobs=n_jobs)
    run.stage("optimize")

    _write_front_outputs(run, result.front, matrix, spec, [p.name for p in run.cfg.pools])
    run.stage("write")


def _cmd_expand_existing(run: _Run, n_jobs: int | None = None) -> None:
    matrix = _load_matrix(run)
    spec = TailSpec.from_alpha(run.cfg.alpha, matrix.n_years)
    if not run.cfg.pools:
        raise DataValidationError("expand-existing needs the pool definitions")
    for pool_cfg in run.cfg.pools:
        if not pool_cfg.pinned_members:
            raise DataValidationError(f"pool '{pool_cfg.name}' has no current members to expand")
    pinned = _check_pins(matrix, run.cfg.pools)
    scope = run.cfg.expansion
    meta = None
    if scope == "regional" or run.cfg.inputs.get("country_meta"):
        meta = _load_meta(run, matrix)
    run.stage("load")

    pool_rows = []
    member_rows = []
    for pool_cfg in run.cfg.pools:
        pool, _, csv_rows = _member_rows(matrix, pool_cfg.pinned_members, spec, pool_cfg.name)
        pool_rows.append(_pool_csv_row(pool_cfg.name, pool))
        member_rows.extend(csv_rows)
    run.emit("original_pools.csv", lambda p: _write_csv(p, POOL_HEADER, pool_rows))
    run.emit("original_member_shares.csv", lambda p: _write_csv(p, MEMBER_HEADER, member_rows))

    m = len(run.cfg.pools)
    constraint = {}
    for c in matrix.countries:
        if c in pinned:
            constraint[c] = CountryMeta(iso3=c, region="any", pinned_pool=pinned[c])
            continue
        if meta is not None and meta.get(c) is not None and meta[c].pinned_pool is not None:
            constraint[c] = CountryMeta(iso3=c, region="any", pinned_pool=meta[c].pinned_pool)
            continue
        if scope == "global":
            allowed = {j for j in range(1, m + 1) if _user_allows(meta, c, j)}
        else:
            allowed = set()
            for j, pool_cfg in enumerate(run.cfg.pools, start=1):
                if not pool_cfg.region_filter:
                    raise DataValidationError(
                        f"pool '{pool_cfg.name}' needs a region_filter for regional expansion"
                    )
                if meta is not None and meta[c].region == pool_cfg.region_filter and _user_allows(meta, c, j):
                    allowed.add(j)
        constraint[c] = CountryMeta(iso3=c, region="any", allowed_pools=frozenset({0} | allowed))
    result = run_step1(matrix, constraint, m, spec, run.cfg.optimizer, n_jobs=n_jobs)
    run.stage("optimize")

    _write_front_outputs(run, result.front, matrix, spec, [p.name for p in run.cfg.pools])
    run.stage("write")


def _cmd_sample(run: _Run, n_jobs: int | None = None) -> None:
    if run.cfg.sampler is None:
        raise DataValidationError("sample mode needs a 'sampler' section in the config")
    sampler_cfg = run.cfg.sampler
    cat = load_event_catalogue(run.require_input("event_catalogue"), window=sampler_cfg.window)
    labels = load_seasonal_labels(run.require_input("seasonal_labels"))
    model = classify_year_types(labels)
    run.stage("load")

    result = build_scenarios(cat, model, sampler_cfg, n_jobs=n_jobs)
    run.stage("sample")

    run.emit("annual_losses.csv", lambda p: write_annual_losses(result.matrix, p))
    mean_count = float(result.event_counts.mean())
    expected = expected_annual_count(cat, model, sampler_cfg)
    bound = 3.0 * (expected / sampler_cfg.n_years) ** 0.5 if expected > 0 else 0.0
    type_shares = {
        t: sum(1 for yt in result.year_types if yt == t) / sampler_cfg.n_years
        for t in sorted(set(result.year_types))
    }
    run.stats = {
        "n_years": sampler_cfg.n_years,
        "n_countries": result.matrix.n_countries,
        "mean_annual_event_count": mean_count,
        "expected_annual_event_count": expected,
        "count_three_sigma_bound": bound,
        "mean_count_within_three_sigma": bool(abs(mean_count - expected) <= bound) if expected > 0 else True,
        "year_type_shares": type_shares,
    }
    run.stage("write")


_COMMANDS = {
    "metrics": _cmd_metrics,
    "optimize-regional": _cmd_optimize_regional,
    "optimize-global": _cmd_optimize_global,
    "expand-existing": _cmd_expand_existing,
    "sample": _cmd_sample,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskpools",
        description="Tail-risk diversification of catastrophe risk pools",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in MODES:
        p = sub.add_parser(name, help=f"run the {name} workflow")
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, help="override optimizer and sampler seeds")
        p.add_argument("--jobs", type=int, default=None, help="parallel evaluation threads")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args.config)
        if cfg.mode is not None and cfg.mode != args.command:
            raise DataValidationError(
                f"config declares mode '{cfg.mode}' but the '{args.command}' command was invoked"
            )
        if args.seed is not None:
            cfg = dataclasses.replace(
                cfg,
                optimizer=dataclasses.replace(cfg.optimizer, rng_seed=args.seed),
                sampler=dataclasses.replace(cfg.sampler, rng_seed=args.seed) if cfg.sampler else None,
            )
        out = args.out or cfg.output_dir
        if not out:
            raise DataValidationError("no output directory: set 'output_dir' in the config or pass --out")
        outdir = Path(out) if args.out else (Path(args.config).parent / out)
        outdir.mkdir(parents=True, exist_ok=True)

        run = _Run(args.command, cfg, outdir)
        command = _COMMANDS[args.command]
        if args.command == "metrics":
            command(run)
        else:
            command(run, n_jobs=args.jobs)
        run.write_manifest()
        return 0
    except RiskPoolsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return InternalInvariantError.exit_code


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
