"""Command-line entry point.

Every command prints one report. JSON reports share the envelope
{config, results, violations, timing}; the timing block is the only part that
depends on the machine or the worker count, and --no-timing nulls it.

Exit status: 0 when every check passed, 1 when a mathematical check found a
violation, 2 for invalid parameters or exceeded caps.

Field elements on the command line are hex integers: an element of F_{p^n}
with coordinates c_0..c_{n-1} in the modulus basis is the integer
sum c_i p^i, written in hex. Coefficient vectors are comma-separated, e.g.
`--message 1,0,2a` for b=1, a_0=0, a_1=0x2a.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import code as code_mod
from . import conics, minimal, variety
from .curve import contains, enumerate_affine, hermitian_equation_holds, trace_fibers
from .fields import FieldError, build_tower, matrix_M_row_identity_check, prime_power

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID = 0, 1, 2


class InvalidParameters(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    subcommand: str | None = None
    q: int | None = None
    r: int | None = None
    k: int | None = None
    p: int | None = None
    m: int | None = None
    mode: str | None = None
    samples: int | None = None
    seed: int | None = None
    format: str = "json"
    cap: int | None = None
    options: dict = field(default_factory=dict)
    workers: int = 1

    def replayable(self) -> dict:
        """The config as embedded in reports; the worker count never changes results."""
        out = asdict(self)
        out.pop("workers")
        return out


@dataclass
class Outcome:
    results: dict
    violations: list = field(default_factory=list)
    csv_rows: list | None = None
    csv_header: tuple[str, ...] | None = None


def parse_hex_list(text: str) -> list[int]:
    try:
        return [int(tok, 16) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise InvalidParameters(f"bad hex coefficient list {text!r}") from exc


def _hex(v: int) -> str:
    return format(int(v), "x")


def _tower(cfg: RunConfig):
    try:
        p, m = prime_power(cfg.q)
    except (FieldError, ValueError) as exc:
        raise InvalidParameters(str(exc)) from exc
    if cfg.r is None or cfg.r < 2:
        raise InvalidParameters("r must be at least 2")
    return build_tower(p, m, cfg.r)


def _code(cfg: RunConfig):
    ctx = _tower(cfg)
    try:
        return code_mod.code_for(ctx.p, ctx.m, ctx.r, cfg.k)
    except ValueError as exc:
        raise InvalidParameters(str(exc)) from exc


def _check_elements(values, Q: int) -> None:
    bad = [v for v in values if not 0 <= v < Q]
    if bad:
        raise InvalidParameters(f"coefficients {bad} are not elements of a field of order {Q}")


# -- commands ---------------------------------------------------------------------------------

def cmd_field_info(cfg: RunConfig) -> Outcome:
    try:
        ctx = build_tower(cfg.p, cfg.m, cfg.r)
    except FieldError as exc:
        raise InvalidParameters(str(exc)) from exc
    q, Q = ctx.q, ctx.Q
    fibers = trace_fibers(ctx)
    trace_sizes = {_hex(c): int(len(v)) for c, v in sorted(fibers.items())}
    norm_values, norm_counts = np.unique(ctx.norm_table[1:], return_counts=True)
    norm_sizes = {_hex(c): int(n) for c, n in zip(norm_values, norm_counts)}
    mcheck = matrix_M_row_identity_check(ctx)
    violations = []
    if sorted(trace_sizes.values()) != [q ** (ctx.r - 1)] * q:
        violations.append({"check": "trace fibers", "sizes": trace_sizes})
    if sorted(norm_sizes.values()) != [(Q - 1) // (q - 1)] * (q - 1):
        violations.append({"check": "norm fibers", "sizes": norm_sizes})
    if not mcheck.passed:
        violations.append({"check": "matrix M row identity", "counterexample": mcheck.counterexample})
    results = {
        "q": q, "Q": Q, "r": ctx.r,
        "base_modulus": list(ctx.base.modulus),
        "ext_modulus": list(ctx.ext.modulus),
        "embedding": [_hex(v) for v in ctx.embed_table],
        "alpha": _hex(ctx.alpha),
        "normal_basis": [_hex(b) for b in ctx.basis],
        "trace_fiber_sizes": trace_sizes,
        "norm_fiber_sizes": norm_sizes,
        "matrix_M_identity": {"passed": mcheck.passed, "checked": mcheck.checked},
        "provenance": "measured",
    }
    return Outcome(results, violations)


def cmd_curve_points(cfg: RunConfig) -> Outcome:
    ctx = _tower(cfg)
    curve = enumerate_affine(ctx)
    pts = curve.affine_points
    violations = []
    expected = ctx.q ** (2 * ctx.r - 1)
    if len(pts) != expected:
        violations.append({"check": "point count", "expected": expected, "found": len(pts)})
    bad = [(x, y) for x, y in pts if not contains(curve, x, y)]
    if bad:
        violations.append({"check": "membership", "points": bad[:20]})
    if ctx.r == 2:
        agree = hermitian_equation_holds(ctx, curve.xs, curve.ys)
        if not agree.all():
            violations.append({"check": "hermitian equation", "failures": int((~agree).sum())})
    results = {"count": len(pts), "expected": expected, "order": "x then y",
               "points": [[_hex(x), _hex(y)] for x, y in pts],
               "provenance": {"count": "measured", "expected": "paper_formula"}}
    rows = [(_hex(x), _hex(y)) for x, y in pts]
    return Outcome(results, violations, rows, ("x", "y"))


def cmd_code_spectrum(cfg: RunConfig) -> Outcome:
    code = _code(cfg)
    cap = cfg.cap or code_mod.SPECTRUM_CAP
    try:
        spec = code_mod.weight_spectrum(code, cfg.mode, cfg.samples, cfg.seed, cfg.workers, cap)
    except code_mod.CapExceeded as exc:
        raise InvalidParameters(str(exc)) from exc
    violations = []
    Q = code.field.order
    if cfg.mode == "exhaustive":
        if sum(spec.values()) != Q ** code.message_length:
            violations.append({"check": "total", "found": sum(spec.values())})
        odd = {w: c for w, c in spec.items() if w and c % (Q - 1)}
        if odd:
            violations.append({"check": "scalar orbits", "weights": odd})
    results = {"q": code.q, "r": code.r, "k": code.k, "n": code.n, "mode": cfg.mode,
               "spectrum": [{"weight": w, "count": c} for w, c in sorted(spec.items())],
               "min_nonzero_weight": min((w for w in spec if w), default=None),
               "provenance": "measured"}
    rows = sorted(spec.items())
    return Outcome(results, violations, rows, ("weight", "count"))


def cmd_code_dim(cfg: RunConfig) -> Outcome:
    code = _code(cfg)
    rep = code_mod.dimension_report(code)
    violations = []
    try:
        oracle = code_mod.rank_by_enumeration(code)
        rep["enumeration_oracle"] = oracle
        if oracle != code.measured_dimension:
            violations.append({"check": "rank vs enumeration", "rank": code.measured_dimension,
                               "enumeration": oracle})
    except code_mod.CapExceeded:
        rep["enumeration_oracle"] = None
    return Outcome(rep, violations)


def cmd_minimal_enumerate(cfg: RunConfig) -> Outcome:
    code = _code(cfg)
    try:
        rows = minimal.enumerate_minimal(code, cfg.workers)
    except code_mod.CapExceeded as exc:
        raise InvalidParameters(str(exc)) from exc
    n_min = sum(r["minimal"] for r in rows)
    weights = [r["weight"] for r in rows]
    dmin = min(weights) if weights else None
    violations = [{"check": "minimum weight codeword not minimal", "message": [_hex(v) for v in r["message"]]}
                  for r in rows if r["weight"] == dmin and not r["minimal"]]
    results = {"classes": len(rows), "minimal": n_min, "min_weight": dmin,
               "rows": [{"message": [_hex(v) for v in r["message"]], "weight": r["weight"],
                         "minimal": r["minimal"]} for r in rows],
               "provenance": "measured"}
    return Outcome(results, violations)


def cmd_minimal_check(cfg: RunConfig) -> Outcome:
    code = _code(cfg)
    vec = parse_hex_list(cfg.options["message"])
    if len(vec) != code.message_length:
        raise InvalidParameters(f"message needs {code.message_length} entries b,a_0..a_k")
    _check_elements(vec, code.field.order)
    msg = code_mod.Message.from_vector(vec)
    if msg.is_zero():
        raise InvalidParameters("the zero message has no minimality verdict")
    verdict = minimal.is_minimal(code, msg, "kernel")
    pred = minimal.predicted_class(msg, code)
    results = {"message": [_hex(v) for v in vec],
               "weight": code_mod.encode(code, msg).weight,
               "minimal": verdict.is_minimal,
               "kernel_witness": verdict.witness,
               "predicted": pred.label, "predicted_corrected": pred.corrected_label,
               "provenance": {"minimal": "measured", "predicted": "paper_formula"}}
    violations = []
    Q = code.field.order
    if (Q ** code.message_length - 1) // (Q - 1) <= minimal.PROJECTIVE_CAP // 64:
        scan = minimal.is_minimal(code, msg, "scan")
        results["scan_minimal"] = scan.is_minimal
        if scan.is_minimal != verdict.is_minimal:
            violations.append({"check": "kernel vs scan", "kernel": verdict.is_minimal,
                               "scan": scan.is_minimal})
    return Outcome(results, violations)


def cmd_minimal_compare(cfg: RunConfig) -> Outcome:
    code = _code(cfg)
    try:
        rep = minimal.classification_report(code, cfg.mode, cfg.samples, cfg.seed, cfg.workers)
    except code_mod.CapExceeded as exc:
        raise InvalidParameters(str(exc)) from exc
    violations = [{"check": "predicted minimal but not minimal", "message": [_hex(v) for v in row["message"]],
                   "predicted": row["predicted"]}
                  for row in rep["rows"] if row["predicted"] in ("class_ii", "class_iii") and not row["oracle"]]
    rep["provenance"] = {"oracle": "measured", "predicted": "paper_formula",
                         "inequality_printed": "bound_variant", "inequality_corrected": "bound_variant"}
    for row in rep["rows"]:
        row["message"] = [_hex(v) for v in row["message"]]
    return Outcome(rep, violations)


def cmd_variety_count(cfg: RunConfig) -> Outcome:
    ctx = _tower(cfg)
    coeffs = parse_hex_list(cfg.options["coeffs"])
    if not coeffs:
        raise InvalidParameters("--coeffs needs at least a_0")
    _check_elements(coeffs, ctx.Q)
    spec = variety.make_spec(ctx, coeffs)
    rep = variety.equivalence_check(spec)
    rep["coeffs"] = [_hex(c) for c in coeffs]
    rep["orbit_identity"] = variety.orbit_identity_check(spec)
    rep["provenance"] = "measured"
    violations = [] if rep["passed"] and not rep["orbit_identity"]["failures"] else [
        {"check": "equivalence", "report": {k: v for k, v in rep.items() if k != "provenance"}}]
    return Outcome(rep, violations)


def cmd_variety_verify(cfg: RunConfig) -> Outcome:
    ctx = _tower(cfg)
    k = cfg.k
    if k is None or k < 0:
        raise InvalidParameters("k must be non-negative")
    rep = variety.verify_random(ctx.p, ctx.m, ctx.r, k, cfg.options["trials"], cfg.seed, cfg.workers)
    for row in rep["rows"]:
        row["coeffs"] = [_hex(c) for c in row["coeffs"]]
    rep["provenance"] = "measured"
    violations = [{"check": "equivalence", "coeffs": row["coeffs"]} for row in rep["rows"] if not row["passed"]]
    return Outcome(rep, violations)


_THEOREMS = {"cm": "cafure_matera", "lw": "lang_weil", "general": "prop_general"}


def cmd_bounds(cfg: RunConfig) -> Outcome:
    ctx = _tower(cfg)
    k = cfg.k
    if k is None or k < 1:
        raise InvalidParameters("k must be positive")
    theorem = _THEOREMS[cfg.options["theorem"]]
    kw = {}
    if theorem == "lang_weil":
        if cfg.options.get("C") is None:
            raise InvalidParameters("--theorem lw needs --C")
        kw["C"] = cfg.options["C"]
    if theorem == "prop_general":
        kw["variant"] = cfg.options["variant"]
    if cfg.options.get("coeffs"):
        coeff_rows = [parse_hex_list(cfg.options["coeffs"])]
        for row in coeff_rows:
            _check_elements(row, ctx.Q)
    else:
        rng = np.random.default_rng(cfg.seed)
        coeff_rows = rng.integers(0, ctx.Q, size=(cfg.options["trials"], k + 1))
        coeff_rows[:, -1] = rng.integers(1, ctx.Q, size=len(coeff_rows))
        coeff_rows = coeff_rows.tolist()
    checks = []
    violations = []
    window = None
    for coeffs in coeff_rows:
        spec = variety.make_spec(ctx, coeffs)
        rep = variety.bound_window(ctx.q, ctx.r, spec.f.degree, theorem, **kw)
        rep.with_count(variety.count_S_points(spec))
        window = window or rep
        row = {"coeffs": [_hex(c) for c in coeffs], "degree": spec.f.degree, "count": rep.count,
               "lower": rep.lower, "upper": rep.upper, "holds": rep.holds}
        checks.append(row)
        asserted = theorem != "lang_weil" and rep.hypothesis_met and rep.irreducibility_case is not None
        if theorem == "prop_general" and cfg.options["variant"] == "printed":
            asserted = False
        if asserted and not rep.holds:
            violations.append({"check": "count outside window", **row})
    results = {"window": window.to_dict(), "checks": checks,
               "provenance": {"count": "measured", "lower": "bound_variant", "upper": "bound_variant",
                              "hypothesis_met": "paper_formula"}}
    return Outcome(results, violations)


def cmd_conics_survey(cfg: RunConfig) -> Outcome:
    try:
        p, m = prime_power(cfg.q)
    except (FieldError, ValueError) as exc:
        raise InvalidParameters(str(exc)) from exc
    if p == 2:
        raise InvalidParameters("conic classification needs q odd")
    validate = cfg.options["validate_prop53"]
    if validate and cfg.q <= 7:
        raise InvalidParameters("--validate-prop53 needs q > 7")
    ctx = build_tower(p, m, 2)
    try:
        rep = conics.survey(ctx, cfg.mode, cfg.samples, cfg.seed, cfg.workers, validate,
                            cfg.cap or conics.SURVEY_CAP)
    except conics.ConicError as exc:
        raise InvalidParameters(str(exc)) from exc
    violations = rep.pop("violations")
    if validate:
        violations += [{"check": "prop53 predicate vs kernel oracle", **d} for d in rep["prop53"]["disagreements"]]
    rep["provenance"] = {"histogram": "measured", "catalog": "paper_formula", "prop53": "measured"}
    return Outcome(rep, violations)


COMMANDS: dict[tuple[str, str | None], Callable[[RunConfig], Outcome]] = {
    ("field-info", None): cmd_field_info,
    ("curve", "points"): cmd_curve_points,
    ("code", "spectrum"): cmd_code_spectrum,
    ("code", "dim"): cmd_code_dim,
    ("minimal", "enumerate"): cmd_minimal_enumerate,
    ("minimal", "check"): cmd_minimal_check,
    ("minimal", "compare"): cmd_minimal_compare,
    ("variety", "count"): cmd_variety_count,
    ("variety", "verify"): cmd_variety_verify,
    ("bounds", None): cmd_bounds,
    ("conics", "survey"): cmd_conics_survey,
}


# -- rendering ----------------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def render(cfg: RunConfig, out: Outcome, elapsed: float | None) -> str:
    if cfg.format == "csv":
        if out.csv_rows is None:
            raise InvalidParameters(f"{cfg.command} has no CSV form")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(out.csv_header)
        writer.writerows(out.csv_rows)
        return buf.getvalue()
    timing = None if elapsed is None else {"seconds": round(elapsed, 3), "workers": cfg.workers}
    envelope = {"config": cfg.replayable(), "results": out.results,
                "violations": out.violations, "timing": timing}
    return json.dumps(_jsonable(envelope), indent=1, sort_keys=True) + "\n"


def run(cfg: RunConfig, stdout=None, no_timing: bool = False) -> int:
    stdout = stdout or sys.stdout
    handler = COMMANDS.get((cfg.command, cfg.subcommand))
    if handler is None:
        print(f"unknown command {cfg.command} {cfg.subcommand or ''}", file=sys.stderr)
        return EXIT_INVALID
    start = time.perf_counter()
    try:
        out = handler(cfg)
        text = render(cfg, out, None if no_timing else time.perf_counter() - start)
    except (InvalidParameters, FieldError, code_mod.CapExceeded, conics.ConicError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    stdout.write(text)
    if out.violations:
        print(f"{len(out.violations)} violation(s) found", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=_positive, default=1, help="worker processes")
    common.add_argument("--no-timing", action="store_true", help="null the timing block")
    common.add_argument("--cap", type=_positive, default=None, help="override the enumeration cap")

    qr = argparse.ArgumentParser(add_help=False)
    qr.add_argument("--q", type=int, required=True)
    qr.add_argument("--r", type=int, required=True)

    qrk = argparse.ArgumentParser(add_help=False, parents=[qr])
    qrk.add_argument("--k", type=int, required=True)

    def sampling(p, samples, modes=True):
        if modes:
            p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
        p.add_argument("--samples", type=_positive, default=samples)
        p.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="normtrace", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field-info", parents=[common], help="tower data and fiber tables")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)

    curve = sub.add_parser("curve").add_subparsers(dest="subcommand", required=True)
    p = curve.add_parser("points", parents=[common, qr], help="ordered affine points")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    code = sub.add_parser("code").add_subparsers(dest="subcommand", required=True)
    p = code.add_parser("spectrum", parents=[common, qrk], help="weight spectrum")
    sampling(p, 10_000)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    code.add_parser("dim", parents=[common, qrk], help="measured dimension vs the k+1 claim")

    mini = sub.add_parser("minimal").add_subparsers(dest="subcommand", required=True)
    mini.add_parser("enumerate", parents=[common, qrk], help="kernel verdict for every class")
    p = mini.add_parser("check", parents=[common, qrk], help="verdict for one message")
    p.add_argument("--message", required=True, help="hex list b,a_0,...,a_k")
    p = mini.add_parser("compare", parents=[common, qrk],
                        help="predicted class vs oracle; sampled per class when --samples is given")
    p.add_argument("--mode", choices=("exhaustive", "sampled"), default=None)
    p.add_argument("--samples", type=_positive, default=None)
    p.add_argument("--seed", type=int, default=0)

    var = sub.add_parser("variety").add_subparsers(dest="subcommand", required=True)
    p = var.add_parser("count", parents=[common, qr], help="S points and intersections for one f")
    p.add_argument("--coeffs", required=True, help="hex list a_0,...,a_k")
    p = var.add_parser("verify", parents=[common, qrk], help="equivalence checks on random f")
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bounds", parents=[common, qrk], help="point-count windows")
    p.add_argument("--theorem", choices=tuple(_THEOREMS), default="cm")
    p.add_argument("--variant", choices=("printed", "corrected"), default="corrected")
    p.add_argument("--C", type=float, default=None, help="constant for --theorem lw")
    p.add_argument("--coeffs", default=None, help="hex list a_0,...,a_k; default: random f of degree k")
    p.add_argument("--trials", type=_positive, default=10)
    p.add_argument("--seed", type=int, default=0)

    con = sub.add_parser("conics").add_subparsers(dest="subcommand", required=True)
    p = con.add_parser("survey", parents=[common], help="conic intersection patterns")
    p.add_argument("--q", type=int, required=True)
    sampling(p, 100_000)
    p.add_argument("--validate-prop53", action="store_true",
                   help="check the minimality criterion against the kernel oracle (q > 7)")
    return parser


_SHARED = ("command", "subcommand", "q", "r", "k", "p", "m", "mode", "samples", "seed", "format", "cap", "workers")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ns = vars(args).copy()
    ns.pop("no_timing", None)
    shared = {key: ns.pop(key) for key in _SHARED if key in ns}
    if shared.get("format") is None:
        shared.pop("format", None)
    if args.command == "minimal" and args.subcommand == "compare" and shared["mode"] is None:
        shared["mode"] = "exhaustive" if shared["samples"] is None else "sampled"
    if shared.get("samples") is None and shared.get("mode") == "sampled":
        shared["samples"] = 1000
    return RunConfig(**shared, options=ns)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    return run(cfg, no_timing=args.no_timing)


if __name__ == "__main__":
    sys.exit(main())
