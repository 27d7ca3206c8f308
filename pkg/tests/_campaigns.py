"""Cached campaign results shared by the acceptance suite and scripts/run_campaigns.py."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

import sdc_res
from sdc_res.harness import CampaignConfig, read_trials, run_campaign

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "scripts" / "configs"
CAMPAIGNS = {"lorenz": "lorenz.json", "nls": "nls.json", "allen_cahn": "allen_cahn.json",
             "lorenz_subset": "lorenz_subset.json"}


@dataclass
class Loaded:
    config: CampaignConfig
    records: list
    details: dict
    manifest: dict
    out_dir: Path


def source_fingerprint() -> str:
    h = hashlib.sha256()
    pkg = Path(sdc_res.__file__).resolve().parent
    for path in sorted(pkg.rglob("*.py")):
        h.update(path.relative_to(pkg).as_posix().encode())
        h.update(path.read_bytes())
    return h.hexdigest()


def config_for(name: str) -> CampaignConfig:
    cfg = CampaignConfig.from_json(CONFIGS / CAMPAIGNS[name])
    cfg.output_dir = str(ROOT / cfg.output_dir)
    return cfg


def fingerprint(cfg: CampaignConfig) -> str:
    d = cfg.to_dict()
    d.pop("output_dir"), d.pop("workers")
    return hashlib.sha256((json.dumps(d, sort_keys=True) + source_fingerprint()).encode()).hexdigest()


def _details(path: Path) -> dict:
    with open(path, newline="") as fh:
        return {(row["seed"], row["strategy"]): row for row in csv.DictReader(fh)}


def load_or_run(name: str, workers: int | None = None, force: bool = False, progress=None) -> Loaded:
    cfg = config_for(name)
    cfg.workers = workers or int(os.environ.get("SDC_RES_WORKERS", os.cpu_count() or 1))
    out = Path(cfg.output_dir)
    fp = fingerprint(cfg)
    stamp = out / "fingerprint.txt"
    fresh = not force and stamp.exists() and stamp.read_text().strip() == fp and (out / "trials.csv").exists()
    if not fresh:
        run_campaign(cfg, progress=progress)
        stamp.write_text(fp + "\n")
    manifest = json.loads((out / "manifest.json").read_text())
    return Loaded(cfg, read_trials(out / "trials.csv"), _details(out / "trial_details.csv"), manifest, out)
