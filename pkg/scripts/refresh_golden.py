"""Regenerate the golden example inputs and re-record expected output digests.

Run from the repository root after an intentional change to the golden
fixtures or to any code that alters the golden pipeline's outputs:

    python3 scripts/refresh_golden.py

The golden scenario is synthetic: four regions of six countries each, with
region-local storm corridors so that pooling within a region diversifies
some risk and pooling across regions diversifies more.
"""

from __future__ import annotations

import csv
import hashlib
import json
import shutil
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "configs" / "golden"

REGIONS = {
    "NORTHWEST": ["QAA", "QAB", "QAC", "QAD", "QAE", "QAF"],
    "NORTHEAST": ["RAA", "RAB", "RAC", "RAD", "RAE", "RAF"],
    "SOUTHWEST": ["SAA", "SAB", "SAC", "SAD", "SAE", "SAF"],
    "SOUTHEAST": ["TAA", "TAB", "TAC", "TAD", "TAE", "TAF"],
}
WINDOW = (1979, 2019)


def write_event_catalogue(rng: np.random.Generator) -> None:
    rows = [("event_id", "year", "iso3", "loss")]
    eid = 0
    for year in range(WINDOW[0], WINDOW[1] + 1):
        for region, codes in REGIONS.items():
            for _ in range(int(rng.poisson(4))):
                # storms track a corridor: a country and possibly a neighbor
                center = int(rng.integers(len(codes)))
                hit = [center]
                if rng.random() < 0.55:
                    hit.append((center + 1) % len(codes))
                if rng.random() < 0.2:
                    hit.append((center + 2) % len(codes))
                scale = 1.0 + center * 0.7
                for c in sorted(set(hit)):
                    loss = float(rng.lognormal(np.log(scale), 1.1))
                    rows.append((f"e{eid:05d}", year, codes[c], repr(loss)))
                eid += 1
    with open(GOLDEN / "event_catalogue.csv", "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def write_seasonal_labels(rng: np.random.Generator) -> None:
    rows = [("year", "season_index", "label")]
    for j, year in enumerate(range(WINDOW[0], WINDOW[1] + 1)):
        phase = j % 5
        if phase == 0:
            labels = ["warm"] * 8 + ["neutral"] * 4
        elif phase == 1:
            labels = ["cold"] * 7 + ["neutral"] * 5
        else:
            labels = ["neutral"] * 7 + ["warm"] * 3 + ["cold"] * 2
        for s, label in enumerate(labels, start=1):
            rows.append((year, s, label))
    with open(GOLDEN / "seasonal_labels.csv", "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def write_country_meta() -> None:
    records = [
        {"iso3": c, "region": region} for region, codes in REGIONS.items() for c in codes
    ]
    (GOLDEN / "country_meta.json").write_text(
        json.dumps(records, indent=1) + "\n", encoding="utf-8"
    )


def write_configs() -> None:
    base = {
        "alpha": 0.995,
        "pools": [{"name": r, "region_filter": r} for r in REGIONS],
        "optimizer": {
            "population_size": 48,
            "generations": 60,
            "seeds": 5,
            "rng_seed": 7,
        },
        "sampler": {
            "n_years": 2000,
            "window": list(WINDOW),
            "lambda_mode": "per-year",
            "rng_seed": 11,
        },
        "inputs": {
            "annual_losses": "out/annual_losses.csv",
            "event_catalogue": "event_catalogue.csv",
            "seasonal_labels": "seasonal_labels.csv",
            "country_meta": "country_meta.json",
            "regional_results": "out",
        },
        "output_dir": "out",
    }
    (GOLDEN / "config.json").write_text(json.dumps(base, indent=1) + "\n", encoding="utf-8")

    metrics_cfg = dict(base)
    metrics_cfg["pools"] = [
        {"name": r, "region_filter": r, "pinned_members": codes} for r, codes in REGIONS.items()
    ]
    (GOLDEN / "config_metrics.json").write_text(
        json.dumps(metrics_cfg, indent=1) + "\n", encoding="utf-8"
    )


def run_pipeline() -> dict[str, str]:
    from riskpools.cli import main

    out = GOLDEN / "out"
    if out.exists():
        shutil.rmtree(out)
    stages = [
        ("sample", "config.json"),
        ("optimize-regional", "config.json"),
        ("optimize-global", "config.json"),
        ("metrics", "config_metrics.json"),
    ]
    for command, cfg in stages:
        code = main([command, "--config", str(GOLDEN / cfg)])
        if code != 0:
            raise SystemExit(f"golden stage {command} failed with exit code {code}")
    digests = {}
    for path in sorted(out.iterdir()):
        if path.name == "manifest.json":  # timings vary run to run
            continue
        digests[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    return digests


def main() -> int:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20250801)
    write_event_catalogue(rng)
    write_seasonal_labels(rng)
    write_country_meta()
    write_configs()
    digests = run_pipeline()
    (GOLDEN / "expected_digests.json").write_text(
        json.dumps(digests, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"recorded {len(digests)} output digests")
    return 0


if __name__ == "__main__":
    sys.exit(main())
