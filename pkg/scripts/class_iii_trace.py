"""Split constant-shift messages (b=1, a=(a0,0,...,0)) by the trace of a0 and
compare each half with the kernel minimality oracle."""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from normtrace.code import Message, code_for
from normtrace.minimal import kernel_minimal_many


@dataclass
class Config:
    p: int = 5
    m: int = 1
    r: int = 2
    k: int = 4


def run(cfg: Config) -> dict:
    code = code_for(cfg.p, cfg.m, cfg.r, cfg.k)
    ctx = code.ctx
    msgs = [Message(1, (a0,) + (0,) * cfg.k).vector for a0 in range(ctx.Q)]
    verdicts = kernel_minimal_many(code, msgs)
    table = {"trace_zero": {"minimal": 0, "not_minimal": 0}, "trace_nonzero": {"minimal": 0, "not_minimal": 0}}
    for a0, ok in enumerate(verdicts):
        row = table["trace_zero" if ctx.trace_table[a0] == 0 else "trace_nonzero"]
        row["minimal" if ok else "not_minimal"] += 1
    return {"config": asdict(cfg), "table": table}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(Config()).items():
        ap.add_argument(f"--{name}", type=int, default=default)
    cfg = Config(**vars(ap.parse_args(argv)))
    print(json.dumps(run(cfg), indent=1))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
