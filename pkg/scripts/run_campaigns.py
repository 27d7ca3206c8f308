"""Run the fault-injection campaigns behind the acceptance checks.

Each campaign is described by a JSON config in scripts/configs/. Results go
to the config's output directory together with a fingerprint of the config
and the library source, so the acceptance suite can reuse them as long as
neither changes.

    python scripts/run_campaigns.py lorenz nls allen_cahn --workers 4
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from _campaigns import CAMPAIGNS, load_or_run  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=list(CAMPAIGNS), choices=list(CAMPAIGNS))
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--force", action="store_true", help="rerun even if cached results match")
    args = ap.parse_args(argv)
    for name in args.names:
        t0 = time.perf_counter()
        res = load_or_run(name, workers=args.workers, force=args.force,
                          progress=lambda msg: print(f"[{name}] {msg}", flush=True))
        print(f"[{name}] {len(res.records)} trials, {time.perf_counter() - t0:.0f}s", flush=True)
        for kind, s in res.manifest["summary"].items():
            print(f"  {kind:14s} recovery {s['recovery_rate']}  recoverable {s['recoverable_recovery_rate']}",
                  flush=True)


if __name__ == "__main__":
    main()
