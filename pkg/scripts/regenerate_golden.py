"""Rewrite tests/golden/offline_db.json from the default demo configuration.

Run only after an intentional change to the models or the dispatcher, and
review the diff before committing it.
"""
from pathlib import Path

from flexdr.config import RunConfig
from flexdr.demo import demo_targets, simulate_baselines
from flexdr.offline_db import build_database, save

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden" / "offline_db.json"


def golden_database():
    cfg = RunConfig()
    baselines = simulate_baselines(cfg)
    ref = baselines["H"]
    return build_database(baselines, cfg.dispatch_params(), demo_targets(cfg, len(ref), ref.step), seed=cfg.seed)


if __name__ == "__main__":
    save(golden_database(), GOLDEN)
    print(f"wrote {GOLDEN}")
