"""Hermitian-conic intersection survey with a compact summary; the full report
can be written to a file."""

from __future__ import annotations

import argparse
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass

from normtrace.conics import survey_for_q


@dataclass
class Config:
    q: int = 3
    mode: str = "exhaustive"
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    validate: bool = False


def run(cfg: Config) -> tuple[dict, dict]:
    start = time.perf_counter()
    rep = survey_for_q(cfg.q, mode=cfg.mode, samples=cfg.samples, seed=cfg.seed,
                       workers=cfg.workers, validate_prop53=cfg.validate)
    by_kind = Counter()
    for row in rep["histogram"]:
        by_kind[row["kind"]] += row["count"]
    summary = {
        "config": asdict(cfg),
        "classes_surveyed": rep["classes_surveyed"],
        "by_kind": dict(sorted(by_kind.items())),
        "max_irreducible_size": rep["max_irreducible_size"],
        "violations": len(rep["violations"]),
        "violation_sizes": dict(Counter(f"{v['kind']}:{v['projective_size']}" for v in rep["violations"])),
        "seconds": round(time.perf_counter() - start, 2),
    }
    if cfg.validate:
        summary["agreement"] = rep["prop53"]["agreement_rate"]
        summary["agreement_affine_sizes"] = rep["prop53_affine_sizes"]["agreement_rate"]
    return summary, rep


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--validate", action="store_true")
    ap.add_argument("--out", help="write the full report here")
    args = ap.parse_args(argv)
    out = args.__dict__.pop("out")
    summary, rep = run(Config(**vars(args)))
    print(json.dumps(summary, indent=1))
    if out:
        with open(out, "w") as fh:
            json.dump(rep, fh, indent=1, sort_keys=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
