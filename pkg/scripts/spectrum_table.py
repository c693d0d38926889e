"""Exact minimum weight of small codes next to each classical lower bound."""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass, field

from normtrace.code import classical_bound_value, code_for, weight_spectrum


@dataclass
class Config:
    keys: list[tuple[int, int, int, int]] = field(
        default_factory=lambda: [(2, 1, 2, 1), (3, 1, 2, 1), (3, 1, 2, 2), (2, 1, 3, 1), (2, 1, 3, 3), (2, 2, 2, 3)])
    workers: int = 1


def run(cfg: Config) -> list[dict]:
    rows = []
    for p, m, r, k in cfg.keys:
        code = code_for(p, m, r, k)
        spectrum = weight_spectrum(code, workers=cfg.workers)
        d_min = min(w for w in spectrum if w > 0)
        q = code.q
        rows.append({
            "q": q, "r": r, "k": k, "n": code.n, "dimension": code.measured_dimension,
            "min_weight": d_min,
            "bezout_s_eq_k": classical_bound_value(q, r, k, k, "bezout"),
            "as_printed": float(classical_bound_value(q, r, k, None, "corollary_ii_as_printed")),
            "cm_derived": float(classical_bound_value(q, r, k, None, "corollary_ii_cm_derived")),
        })
    return rows


def parse_key(text: str) -> tuple[int, int, int, int]:
    p, m, r, k = (int(v) for v in text.split(","))
    return p, m, r, k


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--key", type=parse_key, action="append", help="p,m,r,k (repeatable)")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    cfg = Config(workers=args.workers) if args.key is None else Config(args.key, args.workers)
    print(json.dumps(run(cfg), indent=1))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
