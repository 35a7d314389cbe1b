"""Command-line entry point: ``sparse-series <command> [options]``.

Commands: classify, sieve, build-seq, stats, check, witness, eval, digits.
Exit status is 0 when a run completes (whatever the verdicts), 1 on usage
errors and 2 when a computation cannot be completed (horizon, majorant,
refinement budget).

Every option may also come from a JSON file given with ``--config``; the
keys are the option names with dashes replaced by underscores, and flags on
the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .algebraic import AlgebraicField, build_field
from .criteria import (
    CheckpointSchedule,
    CriterionReport,
    check_theorem_main,
    check_theorem_prepared,
    check_theorem_rational,
    witness_search,
)
from .errors import ComputationError, InvalidInput, NoWitnessFound, SparseSeriesError
from .intervals import parse_rational, rational_to_str
from .report import FORMATS, render_report
from .sequences import (
    CoefficientSequence,
    explicit_support,
    fiber_sequence,
    indicator_sequence,
    ones_sequence,
    power_support,
    read_jsonl,
    stats,
    write_jsonl,
    zero_sequence,
)
from .series_eval import digit_stream, evaluate_series, nonzero_digit_density
from .sieve import ArithTable, PowerMap, required_horizon, sieve

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2
THREADS_ENV = "SPARSE_SERIES_THREADS"

DEFAULTS = {
    "precision": 128,
    "eta": "1/2",
    "z": "const:1",
    "format": "json",
    "cap": "10",
    "mode": None,
    "guard": 64,
    "ell": 3,
    "f": "1",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return max(1, min(4, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


# ---------------------------------------------------------------------------
# spec strings
# ---------------------------------------------------------------------------

def parse_base(args) -> AlgebraicField:
    t, minpoly = getattr(args, "t", None), getattr(args, "minpoly", None)
    if (t is None) == (minpoly is None):
        raise UsageError("give exactly one of --t and --minpoly")
    if t is not None:
        return build_field([-int(t), 1])
    return build_field(minpoly, assume_irreducible=bool(getattr(args, "assume_irreducible", False)))


class _Tables:
    """Sieve tables shared by the sequences of one run."""

    def __init__(self):
        self._tables = {}
        self._lock = threading.Lock()

    def get(self, fid: str, horizon: int) -> ArithTable:
        with self._lock:
            have = self._tables.get(fid)
            if have is None or have.horizon < horizon:
                have = sieve(fid, horizon)
                self._tables[fid] = have
            return have


def _weight(text: str, tables: _Tables, horizon: int):
    if text.lstrip("-").isdigit():
        return int(text)
    name, _, power = text.partition("^")
    table = tables.get(name, horizon)
    return (table, int(power)) if power else table


def build_sequence(spec: str, field: AlgebraicField, H: int, tables: _Tables | None = None) -> CoefficientSequence:
    """Sequence from a spec string.

    zero | ones | cubes | power:k | support:alpha | explicit:n1,n2,... |
    fiber:g[:f] with g in {sigma, phi, power:k} and f an integer constant,
    an arithmetic function name or name^k | file:path.jsonl
    """
    tables = tables or _Tables()
    kind, _, rest = spec.partition(":")
    if kind == "zero":
        return zero_sequence(field, H)
    if kind == "ones":
        return ones_sequence(field, H)
    if kind == "cubes":
        return indicator_sequence(field, power_support(3, H), H)
    if kind == "power":
        return indicator_sequence(field, power_support(int(rest), H), H)
    if kind == "support":
        return indicator_sequence(field, power_support(parse_rational(rest), H), H)
    if kind == "explicit":
        els = [int(v) for v in rest.split(",") if v.strip()]
        return indicator_sequence(field, explicit_support(els, H), H)
    if kind == "file":
        return read_jsonl(Path(rest).read_text(), field)
    if kind == "fiber":
        parts = rest.split(":")
        if parts[0] == "power":
            if len(parts) < 2:
                raise UsageError("fiber:power needs an exponent, e.g. fiber:power:3")
            g = PowerMap(int(parts[1]))
            ftext = parts[2] if len(parts) > 2 else "1"
            gh = int(math.isqrt(H)) + 2
        elif parts[0] in ("sigma", "phi"):
            need = required_horizon(parts[0], H)
            g = tables.get(parts[0], need)
            ftext = parts[1] if len(parts) > 1 else "1"
            gh = g.horizon
        else:
            raise UsageError(f"unsupported index map {parts[0]!r} in {spec!r}")
        f = _weight(ftext, tables, gh)
        return fiber_sequence(f, g, field, H)
    raise UsageError(f"unknown sequence spec {spec!r}")


def _schedule(args, **kw) -> CheckpointSchedule:
    if not args.schedule:
        raise UsageError("--schedule is required, e.g. geometric:1e3:1e6")
    z = args.z
    if z and "," in z and not z.startswith(("const", "loglog")):
        z = tuple(parse_rational(v) for v in z.split(","))
    y = tuple(parse_rational(v) for v in args.y.split(",")) if args.y else None
    delta = parse_rational(args.delta) if args.delta else None
    L = parse_rational(args.L) if args.L else None
    return CheckpointSchedule.parse(args.schedule, y=y, z=z, eta=parse_rational(args.eta), Delta=delta, L=L, **kw)


def _emit(text: str | bytes, out) -> None:
    data = text.encode() if isinstance(text, str) else text
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _interval(v) -> list:
    return [rational_to_str(v.lo), rational_to_str(v.hi)]


def _horizon_for(args, fallback=None) -> int:
    if getattr(args, "horizon", None) is not None:
        return int(args.horizon)
    if fallback is None:
        raise UsageError("--horizon is required")
    return fallback


def _pair(args, field, H):
    tables = _Tables()
    specs = [args.a, args.b or "zero"]
    if not args.a:
        raise UsageError("--a is required")
    # a and b are built side by side; a table needed by both is sieved once
    with ThreadPoolExecutor(max_workers=min(2, thread_cap())) as pool:
        futs = [pool.submit(build_sequence, s, field, H, tables) for s in specs]
        return [f.result() for f in futs]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    field = parse_base(args)
    out = field.to_dict()
    out["kind"] = field.classification.kind
    out["principal_root"] = _interval(field.principal_interval(args.precision))
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_sieve(args) -> int:
    X = _horizon_for(args)
    table = sieve(args.function, X)
    if args.out:
        if args.csv:
            Path(args.out).write_text(table.to_csv())
        else:
            table.write_binary(args.out)
    summary = {"function": table.function_id, "horizon": table.horizon, "out": args.out,
               "max_value": int(table.values.max())}
    sys.stdout.write(_json(summary))
    return EXIT_OK


def cmd_build_seq(args) -> int:
    field = parse_base(args)
    H = _horizon_for(args)
    seq = build_sequence(args.seq, field, H)
    _emit(write_jsonl(seq), args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    field = parse_base(args)
    x = parse_rational(args.x)
    H = _horizon_for(args, math.ceil(x) + 1)
    seq = build_sequence(args.seq, field, H)
    z = args.z[len("const:"):] if args.z.startswith("const:") else args.z
    z = parse_rational(z)
    st = stats(seq, x, z, parse_rational(args.eta), args.precision)
    _emit(_json(st.to_dict()), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    field = parse_base(args)
    theorem = args.theorem
    schedule = _schedule(args)
    H = _horizon_for(args, math.ceil(schedule.points[-1]) + 1)
    a, b = _pair(args, field, H)
    cap = parse_rational(args.cap)
    if theorem == "main":
        report = check_theorem_main(field, a, b, schedule, cap)
    elif theorem == "prepared":
        report = check_theorem_prepared(field, a, b, schedule, cap)
    elif theorem in ("rational", "theorem-A"):
        mode = args.mode or ("theorem-A" if theorem == "theorem-A" else "rational")
        report = check_theorem_rational(field, a, b, schedule, mode)
    else:
        raise UsageError(f"unknown theorem {theorem!r}")
    _emit(render_report(report, args.format), args.out)
    return EXIT_OK


def cmd_witness(args) -> int:
    field = parse_base(args)
    H = _horizon_for(args, 4 * int(args.N_max) + 64)
    a, b = _pair(args, field, H)
    failing = []
    try:
        ws = witness_search(field, a, b, args.u_max, args.N_max, args.precision)
    except NoWitnessFound as exc:
        ws, failing = list(exc.witnesses), list(exc.failing)
    md = {
        "field": field.to_dict(),
        "a": a.to_dict(),
        "b": b.to_dict(),
        "u_max": args.u_max,
        "N_max": args.N_max,
        "failing_u": failing[:1000],
        "failing_count": len(failing),
    }
    report = CriterionReport("norm-witness", (), tuple(ws), md)
    _emit(render_report(report, args.format), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    field = parse_base(args)
    H = _horizon_for(args)
    a, b = _pair(args, field, H)
    v = evaluate_series(field, a, b, args.precision)
    out = {"value": _interval(v), "approx": format(float(v.mid), ".17g"), "precision": args.precision,
           "horizon": H}
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_digits(args) -> int:
    if args.t is None:
        raise UsageError("--t is required")
    t, P = int(args.t), int(args.P)
    tables = _Tables()
    gtext = args.g
    if gtext.startswith("power:"):
        g = PowerMap(int(gtext.split(":")[1]))
        gh = int(math.isqrt(P + args.guard)) + 2
    elif gtext in ("sigma", "phi"):
        g = tables.get(gtext, required_horizon(gtext, P + args.guard + 1))
        gh = g.horizon
    else:
        raise UsageError(f"unsupported index map {gtext!r}")
    f = _weight(args.f, tables, gh)
    stream = digit_stream(f, g, t, P, args.guard)
    if args.out:
        Path(args.out).write_text(stream.to_rle())
    rows = nonzero_digit_density(stream, args.ell)
    summary = {
        "base": t,
        "P": P,
        "nonzero_digits": len(stream.nonzero_positions),
        "carries": stream.carries,
        "carry_overflow": stream.carry_overflow,
        "reliable_limit": stream.reliable_limit,
        "density": [
            {"x": r.x, "count": r.count, "normalized": None if r.normalized is None else _interval(r.normalized)}
            for r in rows
        ],
    }
    sys.stdout.write(_json(summary))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _base_options(p, need_t_only=False):
    p.add_argument("--t", type=int, help="integer base t >= 2")
    if not need_t_only:
        p.add_argument("--minpoly", help='minimal polynomial, e.g. "x^2-2x-1"')
        p.add_argument("--assume-irreducible", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparse-series", description="Experiments with sparse power series in Pisot and Salem bases.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--precision", type=int)

    p = sub.add_parser("classify", help="classify a base as Pisot, Salem or neither")
    _base_options(p)
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sieve", help="tabulate an arithmetic function")
    p.add_argument("--function", required=True, help="sigma, phi, d, omega or Omega")
    p.add_argument("--horizon", type=int)
    p.add_argument("--csv", action="store_true", default=None)
    common(p)
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("build-seq", help="build a coefficient sequence and write it as JSON lines")
    _base_options(p)
    p.add_argument("--seq")
    p.add_argument("--horizon", type=int)
    common(p)
    p.set_defaults(func=cmd_build_seq)

    p = sub.add_parser("stats", help="N(x), S(x) and R(q, eta x, z) for one sequence")
    _base_options(p)
    p.add_argument("--seq")
    p.add_argument("--horizon", type=int)
    p.add_argument("--x")
    p.add_argument("--z")
    p.add_argument("--eta")
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("check", help="evaluate the conditions of a criterion on a schedule")
    _base_options(p)
    p.add_argument("--theorem", choices=("main", "prepared", "rational", "theorem-A"))
    p.add_argument("--mode", choices=("rational", "theorem-A"))
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--schedule", help="geometric:start:stop[:ratio] or list:x1,x2,...")
    p.add_argument("--y", help="comma separated y values, one per checkpoint")
    p.add_argument("--z", help="const:c, sqrt-u, loglog:delta, sqrt-x-over-log or a list")
    p.add_argument("--eta")
    p.add_argument("--delta", help="Delta of the interlacing condition")
    p.add_argument("--L", help="L of the interlacing condition")
    p.add_argument("--cap", help="cap of the O() rule")
    p.add_argument("--horizon", type=int)
    p.add_argument("--format", choices=FORMATS)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("witness", help="search norm witnesses for denominators u <= u_max")
    _base_options(p)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--u-max", dest="u_max", type=int)
    p.add_argument("--N-max", dest="N_max", type=int)
    p.add_argument("--horizon", type=int)
    p.add_argument("--format", choices=FORMATS)
    common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("eval", help="enclose sum (a(n) + b(n)) / q^n")
    _base_options(p)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--horizon", type=int)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("digits", help="base-t digits of sum f(m) t^-g(m)")
    _base_options(p, need_t_only=True)
    p.add_argument("--f", help="integer constant or arithmetic function name")
    p.add_argument("--g", help="sigma, phi or power:k")
    p.add_argument("--P", type=int)
    p.add_argument("--guard", type=int)
    p.add_argument("--ell", type=int)
    common(p)
    p.set_defaults(func=cmd_digits)
    return parser


_REQUIRED = {
    "sieve": ("horizon",),
    "build-seq": ("seq", "horizon"),
    "stats": ("seq", "x"),
    "check": ("theorem", "a", "schedule"),
    "witness": ("a", "u_max", "N_max"),
    "eval": ("a", "horizon"),
    "digits": ("t", "g", "P"),
}


def _apply_config(args) -> None:
    if not getattr(args, "config", None):
        return
    try:
        conf = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(conf, dict):
        raise UsageError("config file must hold a JSON object")
    for key, value in conf.items():
        key = key.replace("-", "_")
        if not hasattr(args, key) or key in ("func", "command", "config"):
            raise UsageError(f"config key {key!r} is not an option of {args.command}")
        if getattr(args, key) is None:
            setattr(args, key, value if not isinstance(value, (int, float)) or key in _INT_KEYS else str(value))


_INT_KEYS = {"t", "horizon", "precision", "u_max", "N_max", "P", "guard", "ell"}


def _apply_defaults(args) -> None:
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    for key in _REQUIRED.get(args.command, ()):
        if getattr(args, key, None) is None:
            raise UsageError(f"{args.command}: --{key.replace('_', '-')} is required")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        _apply_config(args)
        _apply_defaults(args)
        return args.func(args)
    except UsageError as exc:
        print(f"sparse-series {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"sparse-series {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (InvalidInput, ValueError) as exc:
        print(f"sparse-series {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SparseSeriesError as exc:
        print(f"sparse-series {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
