"""Finite-scale evaluation of the irrationality criteria and their proof devices.

Nothing here proves irrationality.  Each condition is sampled at a schedule
of checkpoints and turned into a ratio series; a fixed, configurable rule
turns the series into a verdict (PASS-trend, FAIL-trend or INCONCLUSIVE).
Comparisons are made only when the interval enclosures decide them.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import reduce

from .algebraic import AlgebraicField, FieldElement
from .errors import (
    EmptySupport,
    HorizonInsufficient,
    InvalidInput,
    NoWitnessFound,
    NonRationalField,
    TooFewElements,
    UnresolvedIntervals,
)
from .intervals import Interval, as_fraction, exp_interval, log_interval, rational_to_str
from .sequences import (
    CoefficientSequence,
    SupportSet,
    _ceil_fraction,
    _range_fixed,
    _resolve_bits,
    add_sequences,
    house_sum,
    r_value,
    xi_tail,
    zero_sequence,
)

__all__ = [
    "PASS",
    "FAIL",
    "INCONCLUSIVE",
    "CheckpointSchedule",
    "Checkpoint",
    "ConditionRow",
    "CriterionReport",
    "NormWitness",
    "InterlacingResult",
    "CensusResult",
    "o_verdict",
    "big_o_verdict",
    "check_theorem_main",
    "check_theorem_prepared",
    "check_theorem_rational",
    "check_interlacing",
    "window_hits",
    "degree_ell_ratio",
    "liouville_gap",
    "good_N_census",
    "dominance_census",
    "witness_search",
    "r_decomposition_check",
    "SCHEMA",
]

PASS = "PASS-trend"
FAIL = "FAIL-trend"
INCONCLUSIVE = "INCONCLUSIVE"
SCHEMA = "sparse-series-report/1"
DEFAULT_CAP = 10
DEFAULT_ETA = Fraction(1, 2)
REPORT_BITS = 64
CENSUS_DOUBLINGS = 3


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckpointSchedule:
    """Checkpoints x_1 < ... < x_m with companions y_i, a z rule and eta.

    ``z`` is either a list of values (rationals or intervals) or a rule:
    ``"const:c"``, ``"sqrt-u"`` (z = u^(1/2), u = x / max(1, #N_a(x), #N_b(x))),
    ``"loglog:delta"`` (z = (2 + delta)/log q * log log x, and 1 while
    x < e^q) or ``"sqrt-x-over-log"``.  Rule values below 1 are raised to 1.
    """

    points: tuple
    y: tuple | None = None
    z: object = "const:1"
    eta: Fraction = DEFAULT_ETA
    Delta: Fraction | None = None
    L: Fraction | None = None

    def __post_init__(self):
        pts = tuple(as_fraction(p) for p in self.points)
        if not pts:
            raise InvalidInput("schedule needs at least one checkpoint")
        if any(p < 1 for p in pts):
            raise InvalidInput("checkpoints must be >= 1")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise InvalidInput("checkpoints must be strictly increasing")
        object.__setattr__(self, "points", pts)
        y = pts if self.y is None else tuple(as_fraction(v) for v in self.y)
        if len(y) != len(pts) or any(v < 1 for v in y):
            raise InvalidInput("y needs one entry >= 1 per checkpoint")
        object.__setattr__(self, "y", y)
        if not isinstance(self.z, str):
            zs = tuple(v if isinstance(v, Interval) else Interval(as_fraction(v)) for v in self.z)
            if len(zs) != len(pts) or any(v.lo < 1 for v in zs):
                raise InvalidInput("z needs one entry >= 1 per checkpoint")
            object.__setattr__(self, "z", zs)
        else:
            _check_rule(self.z)
        eta = as_fraction(self.eta)
        if not 0 < eta <= 1:
            raise InvalidInput("eta must lie in (0, 1]")
        object.__setattr__(self, "eta", eta)
        if self.Delta is not None:
            if as_fraction(self.Delta) <= 1:
                raise InvalidInput("Delta must be > 1")
            object.__setattr__(self, "Delta", as_fraction(self.Delta))
        if self.L is not None:
            if as_fraction(self.L) < 1:
                raise InvalidInput("L must be >= 1")
            object.__setattr__(self, "L", as_fraction(self.L))

    @classmethod
    def geometric(cls, start, stop, ratio=10, **kw) -> "CheckpointSchedule":
        start, stop, ratio = as_fraction(start), as_fraction(stop), as_fraction(ratio)
        if ratio <= 1:
            raise InvalidInput("ratio must be > 1")
        pts = []
        x = start
        while x <= stop:
            pts.append(x)
            x *= ratio
        return cls(tuple(pts), **kw)

    @classmethod
    def parse(cls, text: str, **kw) -> "CheckpointSchedule":
        """``geometric:start:stop[:ratio]`` or ``list:x1,x2,...``."""
        kind, _, rest = text.partition(":")
        if kind == "geometric":
            parts = rest.split(":")
            if len(parts) not in (2, 3):
                raise InvalidInput(f"bad schedule {text!r}")
            return cls.geometric(*(Fraction(p) for p in parts), **kw)
        if kind == "list":
            return cls(tuple(Fraction(p) for p in rest.split(",")), **kw)
        raise InvalidInput(f"unknown schedule kind {kind!r}")

    def resolve_z(self, q: Interval, a: CoefficientSequence, b: CoefficientSequence) -> tuple:
        if not isinstance(self.z, str):
            return self.z
        kind, _, arg = self.z.partition(":")
        out = []
        for x in self.points:
            if kind == "const":
                v = Interval(Fraction(arg))
            elif kind == "sqrt-u":
                u = x / max(1, a.count_below(x), b.count_below(x))
                v = Interval(u).sqrt(96)
            elif kind == "loglog":
                delta = Fraction(arg)
                lnq = log_interval(q, 96)
                if x <= 2 or Interval(x).certainly_lt(exp_interval(q, 96)):
                    v = Interval(1)
                else:
                    v = (Interval(2 + delta) / lnq) * log_interval(log_interval(x, 96), 96)
            else:  # sqrt-x-over-log
                v = Interval(x).sqrt(96) / log_interval(x, 96) if x > 1 else Interval(1)
            if v.hi < 1:
                v = Interval(1)
            elif v.lo < 1:
                v = Interval(1, v.hi)
            out.append(v.round_out(REPORT_BITS))
        return tuple(out)

    def to_dict(self) -> dict:
        z = self.z if isinstance(self.z, str) else [_iv(v) for v in self.z]
        return {
            "points": [rational_to_str(p) for p in self.points],
            "y": [rational_to_str(v) for v in self.y],
            "z": z,
            "eta": rational_to_str(self.eta),
            "Delta": None if self.Delta is None else rational_to_str(self.Delta),
            "L": None if self.L is None else rational_to_str(self.L),
        }


def _check_rule(rule: str):
    kind, _, arg = rule.partition(":")
    if kind == "const":
        if Fraction(arg) < 1:
            raise InvalidInput("constant z must be >= 1")
    elif kind == "loglog":
        if Fraction(arg) <= 0:
            raise InvalidInput("loglog rule needs delta > 0")
    elif kind not in ("sqrt-u", "sqrt-x-over-log"):
        raise InvalidInput(f"unknown z rule {rule!r}")


def _iv(v: Interval) -> list:
    return [rational_to_str(v.lo), rational_to_str(v.hi)]


# ---------------------------------------------------------------------------
# report types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Checkpoint:
    x: Fraction
    ratio: Interval | None
    values: tuple = ()  # sorted (name, value) pairs

    def to_dict(self) -> dict:
        out = {"x": rational_to_str(self.x), "ratio": None if self.ratio is None else _iv(self.ratio)}
        out["values"] = {k: _encode(v) for k, v in self.values}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Checkpoint":
        ratio = None if d["ratio"] is None else Interval(Fraction(d["ratio"][0]), Fraction(d["ratio"][1]))
        values = tuple(sorted((k, _decode(v)) for k, v in d.get("values", {}).items()))
        return cls(Fraction(d["x"]), ratio, values)


def _encode(v):
    if isinstance(v, Interval):
        return {"interval": _iv(v)}
    if isinstance(v, Fraction):
        return {"rational": rational_to_str(v)}
    return v


def _decode(v):
    if isinstance(v, dict) and "interval" in v:
        lo, hi = v["interval"]
        return Interval(Fraction(lo), Fraction(hi))
    if isinstance(v, dict) and "rational" in v:
        return Fraction(v["rational"])
    if isinstance(v, list):
        return tuple(_decode(x) for x in v)
    return v


@dataclass(frozen=True)
class ConditionRow:
    condition_id: str
    description: str
    rule: str
    checkpoints: tuple
    verdict: str
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "condition_id": self.condition_id,
            "description": self.description,
            "rule": self.rule,
            "verdict": self.verdict,
            "note": self.note,
            "checkpoints": [c.to_dict() for c in self.checkpoints],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionRow":
        return cls(d["condition_id"], d["description"], d["rule"],
                   tuple(Checkpoint.from_dict(c) for c in d["checkpoints"]), d["verdict"], d.get("note", ""))


@dataclass(frozen=True)
class NormWitness:
    u: int
    N: int
    value_interval: Interval
    conjugate_product: Interval
    conclusion: str

    def to_dict(self) -> dict:
        return {
            "kind": "norm",
            "u": self.u,
            "N": self.N,
            "value_interval": _iv(self.value_interval),
            "conjugate_product": _iv(self.conjugate_product),
            "conclusion": self.conclusion,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormWitness":
        return cls(d["u"], d["N"], Interval(*map(Fraction, d["value_interval"])),
                   Interval(*map(Fraction, d["conjugate_product"])), d["conclusion"])


@dataclass(frozen=True)
class InterlacingViolation:
    m: int
    m_next: int
    mu: Fraction
    window: tuple  # (lo, hi) of [m + mu, m + Delta mu)

    def to_dict(self) -> dict:
        return {
            "kind": "interlacing",
            "m": self.m,
            "m_next": self.m_next,
            "mu": rational_to_str(self.mu),
            "window": [rational_to_str(self.window[0]), rational_to_str(self.window[1])],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InterlacingViolation":
        return cls(d["m"], d["m_next"], Fraction(d["mu"]), tuple(Fraction(v) for v in d["window"]))


def _witness_from_dict(d: dict):
    return NormWitness.from_dict(d) if d["kind"] == "norm" else InterlacingViolation.from_dict(d)


def _witness_key(w):
    if isinstance(w, NormWitness):
        return (0, w.u, w.N, 0)
    return (1, w.m, w.m_next, w.mu)


@dataclass(frozen=True)
class CriterionReport:
    theorem: str
    rows: tuple
    witnesses: tuple = ()
    metadata: dict = dc_field(default_factory=dict)
    schema: str = SCHEMA

    def __post_init__(self):
        ids = [r.condition_id for r in self.rows]
        if len(ids) != len(set(ids)):
            raise InvalidInput("each condition may appear only once in a report")
        object.__setattr__(self, "witnesses", tuple(sorted(self.witnesses, key=_witness_key)))

    def row(self, condition_id: str) -> ConditionRow:
        for r in self.rows:
            if r.condition_id == condition_id:
                return r
        raise KeyError(condition_id)

    def verdicts(self) -> dict:
        return {r.condition_id: r.verdict for r in self.rows}

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "theorem": self.theorem,
            "rows": [r.to_dict() for r in self.rows],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionReport":
        if d.get("schema") != SCHEMA:
            raise InvalidInput(f"unsupported report schema {d.get('schema')!r}")
        return cls(d["theorem"], tuple(ConditionRow.from_dict(r) for r in d["rows"]),
                   tuple(_witness_from_dict(w) for w in d["witnesses"]), d.get("metadata", {}), d["schema"])


# ---------------------------------------------------------------------------
# verdict rules
# ---------------------------------------------------------------------------

def o_verdict(series) -> str:
    """o(.) evidence: PASS when last <= first / 2 with at least ceil((m-1)/2)
    certain decreases, FAIL when the series certainly has no net decrease."""
    series = [r for r in series if r is not None]
    if not series:
        return INCONCLUSIVE
    if all(r.hi == 0 for r in series):
        return PASS
    m = len(series)
    if m < 2:
        return INCONCLUSIVE
    need = -(-(m - 1) // 2)
    sure_dec = sum(1 for a, b in zip(series, series[1:]) if b.hi < a.lo)
    first, last = series[0], series[-1]
    if 2 * last.hi <= first.lo and sure_dec >= need:
        return PASS
    if last.lo >= first.hi:
        return FAIL
    return INCONCLUSIVE


def big_o_verdict(series, cap=DEFAULT_CAP) -> str:
    series = [r for r in series if r is not None]
    if not series:
        return INCONCLUSIVE
    cap = as_fraction(cap)
    if all(r.hi <= cap for r in series):
        return PASS
    if any(r.lo > cap for r in series):
        return FAIL
    return INCONCLUSIVE


def _rnd(v: Interval) -> Interval:
    return v.round_out(REPORT_BITS)


def _hull_max(a: Interval, b: Interval) -> Interval:
    return a.max(b)


# ---------------------------------------------------------------------------
# shared row builders
# ---------------------------------------------------------------------------

def _validate_pair(field: AlgebraicField, a: CoefficientSequence, b: CoefficientSequence | None):
    if a.field != field:
        raise InvalidInput("sequence a lives in a different field")
    if b is None:
        b = zero_sequence(field, a.horizon)
    if b.field != field:
        raise InvalidInput("sequence b lives in a different field")
    if not a.support:
        raise InvalidInput("a must have infinite support; the stored support is empty")
    if not a.nonnegative:
        raise InvalidInput("a must be non-negative")
    return b


def _check_horizon(schedule: CheckpointSchedule, *seqs):
    top = schedule.points[-1]
    for s in seqs:
        if top > s.horizon:
            raise HorizonInsufficient(f"checkpoint {top} beyond sequence horizon {s.horizon}",
                                      required=_ceil_fraction(top))


def _row_x_infinity(schedule: CheckpointSchedule, cid="(i)") -> ConditionRow:
    cps = tuple(Checkpoint(x, None) for x in schedule.points)
    ok = len(schedule.points) >= 2
    return ConditionRow(cid, "x_n -> infinity", "schedule", cps, PASS if ok else INCONCLUSIVE,
                        "checkpoints strictly increasing" if ok else "single checkpoint")


def _row_house_sum(schedule, a, b, cap) -> ConditionRow:
    cps, series = [], []
    for x, y in zip(schedule.points, schedule.y):
        Sa, Sb = house_sum(a, x), house_sum(b, x)
        r = _rnd(_hull_max(Sa, Sb) / y)
        series.append(r)
        cps.append(Checkpoint(x, r, (("S_a", _rnd(Sa)), ("S_b", _rnd(Sb)), ("y", y))))
    return ConditionRow("(ii)", "S_a(x), S_b(x) = O(y)", f"O:cap={cap}", tuple(cps), big_o_verdict(series, cap))


def _row_sparsity(schedule, zs, a, b, cid="(iii)") -> ConditionRow:
    cps, series = [], []
    for x, z in zip(schedule.points, zs):
        na, nb = a.count_below(x), b.count_below(x)
        r = _rnd(Interval(max(na, nb)) * z / x)
        series.append(r)
        cps.append(Checkpoint(x, r, (("N_a", na), ("N_b", nb), ("z", z))))
    return ConditionRow(cid, "#N_a(x), #N_b(x) = o(x/z)", "o", tuple(cps), o_verdict(series))


def _r_enclosure(seq, x, z: Interval, eta, precision=64) -> Interval:
    lo_j, hi_j = _ceil_fraction(z.lo), _ceil_fraction(z.hi)
    big = r_value(seq, x, lo_j, eta, precision)
    if hi_j == lo_j:
        return big
    small = r_value(seq, x, hi_j, eta, precision)
    return Interval(small.lo, big.hi)


def _row_average_decay(schedule, zs, field, a, b) -> ConditionRow:
    d = field.degree
    cps, series = [], []
    for x, y, z in zip(schedule.points, schedule.y, zs):
        Ra = _r_enclosure(a, x, z, schedule.eta)
        Rb = _r_enclosure(b, x, z, schedule.eta)
        r = _rnd(_hull_max(Ra, Rb) * (Fraction(y) ** (d - 1)) / x)
        series.append(r)
        cps.append(Checkpoint(x, r, (("R_a", _rnd(Ra)), ("R_b", _rnd(Rb)), ("y", y), ("z", z))))
    return ConditionRow("(iv)", "R(q, eta x, z) = o(x / y^(d-1))", "o", tuple(cps), o_verdict(series))


def _row_interlacing(schedule, a, b, cid="(v)") -> tuple:
    if b.majorant[0] == 0:
        return ConditionRow(cid, "interlacing of N_a between points of N_b", "vacuous", (), PASS,
                            "N_b is finite, the condition is not required"), ()
    if schedule.Delta is None or schedule.L is None:
        return ConditionRow(cid, "interlacing of N_a between points of N_b", "exact", (), INCONCLUSIVE,
                            "Delta and L not supplied"), ()
    horizon = min(a.horizon, b.horizon)
    res = check_interlacing(a.support_set(), b.support_set(), schedule.Delta, schedule.L, horizon)
    note = f"{res.pairs_checked} consecutive pairs below {horizon}"
    cps = (Checkpoint(Fraction(horizon), None, (("violations", len(res.violations)),)),)
    return ConditionRow(cid, "interlacing of N_a between points of N_b", "exact", cps,
                        PASS if res.verdict == "PASS" else FAIL, note), res.violations


def _rho_hat(seq: CoefficientSequence, start) -> tuple:
    """(enclosure of max house(c(n))^(1/n) over stored n >= start, argmax)."""
    idx = bisect_left(seq.support, math.ceil(start))
    if idx >= len(seq.support):
        return None, None
    houses = seq.house_upper_values()
    vals = []
    for i in range(idx, len(seq.support)):
        h = houses[i]
        lh = math.log2(h.numerator) - math.log2(h.denominator) if h else float("-inf")
        vals.append(lh / seq.support[i])
    best = max(vals)
    margin = 1e-9 * max(1.0, abs(best)) + 1e-12
    result = None
    for k, v in enumerate(vals):
        if v >= best - margin:
            i = idx + k
            n = seq.support[i]
            if seq.is_rational_valued():
                h = Interval(abs(seq.coords[i][0]))
            else:
                h = seq.house_values()[i]
            if h.lo <= 0:
                enc = Interval(0, exp_interval(log_interval(h.hi, 80) / n, 80).hi)
            else:
                enc = exp_interval(log_interval(h, 80) / n, 80)
            if result is None or enc.hi > result[0].hi:
                result = (enc, n)
    return _rnd(result[0]), result[1]


def _row_pointwise(q: Interval, a, b, start, cid="(iv-1)", label="rho = limsup max house^(1/n) < q"):
    ra, na = _rho_hat(a, start)
    rb, nb = _rho_hat(b, start)
    cands = [(r, n) for r, n in ((ra, na), (rb, nb)) if r is not None]
    if not cands:
        return ConditionRow(cid, label, "lt", (), INCONCLUSIVE, "no stored support in the window"), None
    rho, n = max(cands, key=lambda t: t[0].hi)
    if rho.hi < q.lo:
        verdict = PASS
    elif rho.lo >= q.hi:
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE
    cps = (Checkpoint(Fraction(n), rho, (("q", _rnd(q)), ("window_start", Fraction(start)))),)
    return ConditionRow(cid, label, "lt", cps, verdict, "rho estimated on stored coefficients"), rho


def _principal_sum(seq: CoefficientSequence, x) -> Interval:
    k = seq.count_below(x)
    if seq.is_rational_valued():
        return Interval(sum(abs(c[0]) for c in seq.coords[:k]))
    bits = 64
    lo = hi = 0
    for c in seq.coords[:k]:
        a, b = seq.field.eval_fixed(FieldElement(c), bits)
        if a >= 0:
            lo, hi = lo + a, hi + b
        elif b <= 0:
            lo, hi = lo - b, hi - a
        else:
            hi += max(-a, b)
    return Interval.from_fixed(lo, hi, bits)


def _q_pow(q: Interval, z: Interval) -> Interval:
    return exp_interval(z * log_interval(q, 96), 96)


def _row_moderate_growth(schedule, zs, q, d, a, b, cid="(iv-3)") -> ConditionRow:
    cps, series = [], []
    for x, y, z in zip(schedule.points, schedule.y, zs):
        Sa, Sb = _principal_sum(a, x), _principal_sum(b, x)
        r = _rnd(_hull_max(Sa, Sb) * (Fraction(y) ** (d - 1)) / (_q_pow(q, z) * x))
        series.append(r)
        cps.append(Checkpoint(x, r, (("sum_a", _rnd(Sa)), ("sum_b", _rnd(Sb)), ("y", y), ("z", z))))
    desc = "sum a(m), sum |b(m)| = o(q^z x / y^(d-1))"
    return ConditionRow(cid, desc, "o", tuple(cps), o_verdict(series))


def _row_y_bound(schedule, q, d, rho) -> ConditionRow:
    if d == 1:
        cps = tuple(Checkpoint(x, Interval(1)) for x in schedule.points)
        return ConditionRow("(iv-2)", "limsup y^((d-1)/x) < q / rho", "lt", cps, PASS, "d = 1, the series is 1")
    cps, series = [], []
    for x, y in zip(schedule.points, schedule.y):
        v = _rnd(exp_interval(log_interval(y, 96) * (d - 1) / x, 96))
        series.append(v)
        cps.append(Checkpoint(x, v, (("y", y),)))
    if rho is None:
        return ConditionRow("(iv-2)", "limsup y^((d-1)/x) < q / rho", "lt", tuple(cps), INCONCLUSIVE, "rho unknown")
    bound = q / rho if rho.lo > 0 else None
    tail = series[len(series) // 2 :]
    top = reduce(_hull_max, tail)
    if bound is None:
        verdict = PASS  # rho = 0: q / rho is infinite
    elif top.hi < bound.lo:
        verdict = PASS
    elif top.lo >= bound.hi:
        verdict = FAIL
    else:
        verdict = INCONCLUSIVE
    return ConditionRow("(iv-2)", "limsup y^((d-1)/x) < q / rho", "lt", tuple(cps), verdict,
                        "compared on the upper half of the schedule")


def _metadata(field, a, b, schedule, zs, theorem, extra=None) -> dict:
    md = {
        "theorem": theorem,
        "field": field.to_dict(),
        "a": a.to_dict(),
        "b": b.to_dict(),
        "schedule": schedule.to_dict(),
        "z_values": [_iv(z) for z in zs],
    }
    if extra:
        md.update(extra)
    return md


def _sorted_rows(rows) -> tuple:
    order = ["(i)", "(ii)", "(iii)", "(iv)", "(iv-1)", "(iv-2)", "(iv-3)", "(v)"]
    return tuple(sorted(rows, key=lambda r: order.index(r.condition_id) if r.condition_id in order else 99))


# ---------------------------------------------------------------------------
# theorem checkers
# ---------------------------------------------------------------------------

def check_theorem_main(field: AlgebraicField, a: CoefficientSequence, b: CoefficientSequence | None,
                       schedule: CheckpointSchedule, cap=DEFAULT_CAP) -> CriterionReport:
    """Conditions (i) to (v) of the general criterion at every checkpoint."""
    b = _validate_pair(field, a, b)
    _check_horizon(schedule, a, b)
    q = field.principal_interval(96)
    zs = schedule.resolve_z(q, a, b)
    v_row, violations = _row_interlacing(schedule, a, b)
    rows = [
        _row_x_infinity(schedule),
        _row_house_sum(schedule, a, b, cap),
        _row_sparsity(schedule, zs, a, b),
        _row_average_decay(schedule, zs, field, a, b),
        v_row,
    ]
    md = _metadata(field, a, b, schedule, zs, "main", {"cap": rational_to_str(as_fraction(cap))})
    return CriterionReport("main", _sorted_rows(rows), tuple(violations[:100]), md)


def check_theorem_prepared(field: AlgebraicField, a: CoefficientSequence, b: CoefficientSequence | None,
                           schedule: CheckpointSchedule, cap=DEFAULT_CAP) -> CriterionReport:
    """Conditions (i)-(iii), (iv-1)-(iv-3) and (v)."""
    b = _validate_pair(field, a, b)
    _check_horizon(schedule, a, b)
    q = field.principal_interval(96)
    zs = schedule.resolve_z(q, a, b)
    d = field.degree
    p_row, rho = _row_pointwise(q, a, b, schedule.points[0])
    v_row, violations = _row_interlacing(schedule, a, b)
    rows = [
        _row_x_infinity(schedule),
        _row_house_sum(schedule, a, b, cap),
        _row_sparsity(schedule, zs, a, b),
        p_row,
        _row_y_bound(schedule, q, d, rho),
        _row_moderate_growth(schedule, zs, q, d, a, b),
        v_row,
    ]
    md = _metadata(field, a, b, schedule, zs, "prepared", {"cap": rational_to_str(as_fraction(cap))})
    return CriterionReport("prepared", _sorted_rows(rows), tuple(violations[:100]), md)


def check_theorem_rational(t_or_field, a: CoefficientSequence, b: CoefficientSequence | None,
                           schedule: CheckpointSchedule, mode: str = "rational") -> CriterionReport:
    """The integer-base criterion: pointwise growth, x -> infinity,
    S = o(t^z x), #N = o(x/z), and (v).

    ``mode="theorem-A"`` replaces the z rule by z = u^(1/2) with
    u = x / max(1, #N_a(x), #N_b(x)).
    """
    field = t_or_field if isinstance(t_or_field, AlgebraicField) else None
    if field is None:
        t = int(t_or_field)
        if t < 2:
            raise InvalidInput("the base t must be an integer >= 2")
        field = a.field
        if field.degree != 1 or field.rational_base != t:
            raise NonRationalField(f"sequence field is not Q with q = {t}")
    if field.degree != 1:
        raise NonRationalField(f"base has degree {field.degree}; the rational criterion needs d = 1")
    if mode not in ("rational", "theorem-A"):
        raise InvalidInput(f"unknown mode {mode!r}")
    if mode == "theorem-A":
        schedule = CheckpointSchedule(schedule.points, schedule.y, "sqrt-u", schedule.eta, schedule.Delta, schedule.L)
    b = _validate_pair(field, a, b)
    _check_horizon(schedule, a, b)
    q = field.principal_interval(96)
    zs = schedule.resolve_z(q, a, b)
    p_row, _ = _row_pointwise(q, a, b, schedule.points[0], label="limsup max(a(n), |b(n)|)^(1/n) < t")
    v_row, violations = _row_interlacing(schedule, a, b)
    growth = _row_moderate_growth(schedule, zs, q, 1, a, b)
    growth = ConditionRow(growth.condition_id, "S_a(x), S_b(x) = o(t^z x)", growth.rule, growth.checkpoints,
                          growth.verdict)
    rows = [_row_x_infinity(schedule), _row_sparsity(schedule, zs, a, b), p_row, growth, v_row]
    md = _metadata(field, a, b, schedule, zs, mode)
    return CriterionReport(mode, _sorted_rows(rows), tuple(violations[:100]), md)


# ---------------------------------------------------------------------------
# interlacing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterlacingResult:
    verdict: str  # "PASS" or "FAIL"
    violations: tuple
    pairs_checked: int


def window_hits(A: SupportSet, m: int, mu, Delta) -> bool:
    """Whether A meets [m + mu, m + Delta mu)."""
    lo, hi = m + as_fraction(mu), m + as_fraction(Delta) * as_fraction(mu)
    i = bisect_left(A.elements, _ceil_fraction(lo))
    return i < len(A.elements) and A.elements[i] < hi


def check_interlacing(A: SupportSet, B: SupportSet, Delta, L, horizon: int, limit: int = 100) -> InterlacingResult:
    """Condition (v) between consecutive points of B below the horizon.

    An element a of A with s = a - m > 0 serves exactly the mu in (s/Delta, s].
    The condition for a pair m < m+ asks these half-open intervals to cover
    [L, (m+ - m)/Delta); the sweep below decides that exactly and reports one
    uncovered mu per gap.
    """
    Delta, L = as_fraction(Delta), as_fraction(L)
    if Delta <= 1 or L < 1:
        raise InvalidInput("need Delta > 1 and L >= 1")
    bs = [m for m in B.elements if m < horizon]
    A_el = A.elements
    violations = []
    pairs = 0
    for m, m_next in zip(bs, bs[1:]):
        pairs += 1
        U = Fraction(m_next - m) / Delta
        if U <= L:
            continue
        i = bisect_right(A_el, m + math.floor(L) - 1)
        end = bisect_left(A_el, m_next)
        c, closed = L, True  # points >= c (closed) or > c (open) still need cover
        j = i
        best = None
        while c < U:
            # extend with every interval whose left end admits the current point
            while j < end:
                s = A_el[j] - m
                left = Fraction(s) / Delta
                if left < c or (not closed and left == c):
                    if best is None or s > best:
                        best = s
                    j += 1
                else:
                    break
            if best is not None and (best > c or (closed and best == c)):
                c, closed = Fraction(best), False
                continue
            # uncovered: mu = c if closed, else just above c
            if closed:
                mu = c
            else:
                nxt = Fraction(A_el[j] - m) / Delta if j < end else U
                mu = (c + min(nxt, U)) / 2
            violations.append(InterlacingViolation(m, m_next, mu, (m + mu, m + Delta * mu)))
            if len(violations) >= limit:
                return InterlacingResult("FAIL", tuple(violations), pairs)
            # skip to the next interval's left end
            if j < end:
                c, closed = Fraction(A_el[j] - m) / Delta, False
            else:
                break
    return InterlacingResult("FAIL" if violations else "PASS", tuple(violations), pairs)


# ---------------------------------------------------------------------------
# sparsity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllRow:
    k: int
    n_k: int
    Q: Interval
    ratio: Interval | None  # None when log Q = 0


def degree_ell_ratio(a: CoefficientSequence, ell: int, horizon: int | None = None) -> list:
    """Rows (k, n_k, Q(n_k), n_k / (k^ell log Q(n_k))) over the support."""
    ell = int(ell)
    if ell < 1:
        raise InvalidInput("ell must be >= 1")
    H = a.horizon if horizon is None else min(int(horizon), a.horizon)
    sup = [n for n in a.support if n < H]
    if not sup:
        raise EmptySupport("the sequence has no support below the horizon")
    houses = a.house_values()
    rows = []
    run_lo = run_hi = Fraction(0)
    for k, n in enumerate(sup, start=1):
        h = houses[k - 1]
        run_lo, run_hi = max(run_lo, h.lo), max(run_hi, h.hi)
        Q = Interval(max(n, run_lo), max(n, run_hi))
        if Q.hi <= 1:
            rows.append(EllRow(k, n, Q, None))
            continue
        lq = log_interval(Q, 96)
        if lq.lo <= 0:
            rows.append(EllRow(k, n, Q, None))
            continue
        rows.append(EllRow(k, n, Q, _rnd(Interval(n) / (lq * (k**ell)))))
    return rows


def liouville_gap(support) -> tuple:
    """(max n_{k+1}/n_k, k, n_k, n_{k+1}) with k counted from 1."""
    els = support.elements if isinstance(support, SupportSet) else tuple(support)
    els = [e for e in els if e > 0]
    if len(els) < 2:
        raise TooFewElements("need at least two positive support elements")
    best = None
    for k, (u, v) in enumerate(zip(els, els[1:]), start=1):
        r = Fraction(v, u)
        if best is None or r > best[0]:
            best = (r, k, u, v)
    return best


# ---------------------------------------------------------------------------
# censuses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusResult:
    count: int
    total: int
    unresolved: tuple = ()


def _census(decide, refine, total: int):
    """decide(i) -> True/False/None on the coarse pass; refine(N, k) for straddlers."""
    count = 0
    pending = []
    for N, v in decide:
        if v is None:
            pending.append(N)
        elif v:
            count += 1
    for k in range(1, CENSUS_DOUBLINGS + 1):
        still = []
        for N in pending:
            v = refine(N, k)
            if v is None:
                still.append(N)
            elif v:
                count += 1
        pending = still
        if not pending:
            break
    return count, tuple(pending)


def good_N_census(field: AlgebraicField, c: CoefficientSequence, w, delta, eta, x,
                  precision: int = 64, strict: bool = True) -> CensusResult:
    """#{N in [1, eta x) : w xi_N(|c|) < delta}."""
    w, delta, eta, x = (as_fraction(v) for v in (w, delta, eta, x))
    if delta <= 0:
        raise InvalidInput("delta must be > 0")
    if w < 1:
        raise InvalidInput("w must be >= 1")
    if not 0 < eta <= 1:
        raise InvalidInput("eta must lie in (0, 1]")
    if c.field != field:
        raise InvalidInput("sequence lives in a different field")
    stop = _ceil_fraction(eta * x)
    total = max(0, stop - 1)
    W = _resolve_bits(c, precision, 8)
    lo_l, hi_l = _range_fixed(c, 1, stop, W, True)
    scale = 1 << W
    # w xi < delta  <=>  w * xi_fixed < delta * 2^W
    dw = delta * scale / w

    def coarse():
        for N, lo, hi in zip(range(1, stop), lo_l, hi_l):
            yield N, (True if hi < dw else False if lo >= dw else None)

    def refine(N, k):
        v = xi_tail(c, N, precision << k, absolute=True) * w
        return True if v.hi < delta else False if v.lo >= delta else None

    count, pending = _census(coarse(), refine, total)
    if pending and strict:
        raise UnresolvedIntervals(f"{len(pending)} N remain undecided after refinement", indices=pending)
    return CensusResult(count, total, pending)


def dominance_census(field: AlgebraicField, a: CoefficientSequence, b: CoefficientSequence, eta, x,
                     precision: int = 64, strict: bool = True) -> CensusResult:
    """#{N in [1, eta x) : xi_N(|a|) > xi_N(|b|)}."""
    eta, x = as_fraction(eta), as_fraction(x)
    if not a.support:
        raise InvalidInput("a must have infinite support; the stored support is empty")
    if a.field != field or b.field != field:
        raise InvalidInput("sequences live in a different field")
    if not 0 < eta <= 1:
        raise InvalidInput("eta must lie in (0, 1]")
    stop = _ceil_fraction(eta * x)
    total = max(0, stop - 1)
    W = max(_resolve_bits(a, precision, 8), _resolve_bits(b, precision, 8))
    alo, ahi = _range_fixed(a, 1, stop, W, True)
    blo, bhi = _range_fixed(b, 1, stop, W, True)

    def coarse():
        for N in range(1, stop):
            i = N - 1
            yield N, (True if alo[i] > bhi[i] else False if ahi[i] <= blo[i] else None)

    def refine(N, k):
        p = precision << k
        va, vb = xi_tail(a, N, p, absolute=True), xi_tail(b, N, p, absolute=True)
        return True if va.lo > vb.hi else False if va.hi <= vb.lo else None

    count, pending = _census(coarse(), refine, total)
    if pending and strict:
        raise UnresolvedIntervals(f"{len(pending)} N remain undecided after refinement", indices=pending)
    return CensusResult(count, total, pending)


# ---------------------------------------------------------------------------
# norm witnesses
# ---------------------------------------------------------------------------

CONTRADICTION = "ContradictionDemonstrated"
INDETERMINATE = "Indeterminate"


def witness_search(field: AlgebraicField, a: CoefficientSequence, b: CoefficientSequence | None,
                   u_max: int, N_max: int, precision: int = 64, raise_on_missing: bool = True) -> list:
    """Smallest N <= N_max, per denominator u <= u_max, at which the norm
    argument fires: xi_N(a) > xi_N(|b|), and u xi_N(|a+b|) lies in (0, 1) with
    u xi_N(|a+b|) * max(1, u S_{a+b}(N))^(d-1) < 1.

    The conjugate factor omits the house of the unknown numerator, so for
    d > 1 a witness certifies the inequality only up to that constant.
    """
    u_max, N_max = int(u_max), int(N_max)
    if u_max < 1 or N_max < 1:
        raise InvalidInput("u_max and N_max must be >= 1")
    b = zero_sequence(field, a.horizon) if b is None else b
    if a.field != field or b.field != field:
        raise InvalidInput("sequences live in a different field")
    c = add_sequences(a, b)
    d = field.degree
    W = max(_resolve_bits(s, precision, 8) for s in (a, b, c))
    stop = N_max + 1
    alo, ahi = _range_fixed(a, 1, stop, W, False)
    blo, bhi = _range_fixed(b, 1, stop, W, True)
    clo, chi = _range_fixed(c, 1, stop, W, True)
    houses = c.house_upper_values()
    scale = Fraction(1, 1 << W)

    # per N, the largest u for which the certificate holds
    thresholds = []
    for N in range(1, stop):
        i = N - 1
        if not (alo[i] > bhi[i] and clo[i] > 0):
            thresholds.append(0)
            continue
        v_hi = chi[i] * scale
        S = sum(houses[: c.count_below(N)], Fraction(0))

        def ok(u, v_hi=v_hi, S=S):
            return u * v_hi * max(Fraction(1), u * S) ** (d - 1) < 1

        if not ok(1):
            thresholds.append(0)
            continue
        lo_u, hi_u = 1, 2
        while hi_u <= u_max and ok(hi_u):
            lo_u, hi_u = hi_u, hi_u * 2
        if hi_u > u_max and ok(u_max):
            thresholds.append(u_max)
            continue
        hi_u = min(hi_u, u_max)
        while hi_u - lo_u > 1:
            mid = (lo_u + hi_u) // 2
            if ok(mid):
                lo_u = mid
            else:
                hi_u = mid
        thresholds.append(lo_u)

    witnesses, failing = [], []
    best = 0
    first_at = []  # (threshold reached, N) as the running maximum grows
    for N, th in enumerate(thresholds, start=1):
        if th > best:
            first_at.append((th, N))
            best = th
    keys = [th for th, _ in first_at]
    for u in range(1, u_max + 1):
        k = bisect_left(keys, u)
        if k == len(keys):
            failing.append(u)
            continue
        N = first_at[k][1]
        i = N - 1
        value = Interval(u * clo[i] * scale, u * chi[i] * scale)
        S = sum(houses[: c.count_below(N)], Fraction(0))
        conj = Interval(max(Fraction(1), u * S) ** (d - 1))
        witnesses.append(NormWitness(u, N, _rnd(value), _rnd(conj), CONTRADICTION))
    if failing and raise_on_missing:
        raise NoWitnessFound(failing, tuple(witnesses))
    return witnesses


# ---------------------------------------------------------------------------
# R decomposition
# ---------------------------------------------------------------------------

def r_decomposition_check(field: AlgebraicField, c: CoefficientSequence, eta, x, z, precision: int = 96):
    """(R, R1, R2) with R1 over z <= j < x - N and R2 over j >= max(z, x - N)."""
    if c.field != field:
        raise InvalidInput("sequence lives in a different field")
    eta, x, z = as_fraction(eta), as_fraction(x), as_fraction(z)
    if not 0 < eta <= 1:
        raise InvalidInput("eta must lie in (0, 1]")
    n_stop = _ceil_fraction(eta * x)
    X = _ceil_fraction(x)  # N + j < x  <=>  N + j <= X - 1
    j0 = max(0, _ceil_fraction(z))
    R = r_value(c, x, z, eta, precision)
    W = _resolve_bits(c, precision, max(8, X.bit_length() + 8))
    if n_stop <= 1:
        zero = Interval(0)
        return R, zero, zero
    lo_v, hi_v, _ = c._fixed(W, True)
    plo, phi = field.inverse_powers_fixed(W, max(X, j0) + 1)
    # prefix sums of the table for geometric blocks
    pre_lo, pre_hi = [0], [0]
    for a_, b_ in zip(plo, phi):
        pre_lo.append(pre_lo[-1] + a_)
        pre_hi.append(pre_hi[-1] + b_)
    r1_lo = r1_hi = 0
    sup = c.support
    for i in range(bisect_left(sup, 1 + j0), bisect_left(sup, X)):
        m = sup[i]
        n_top = min(n_stop - 1, m - j0)
        if n_top < 1:
            continue
        k_lo, k_hi = m - n_top, m - 1  # k = m - N
        r1_lo += lo_v[i] * (pre_lo[k_hi + 1] - pre_lo[k_lo])
        r1_hi += hi_v[i] * (pre_hi[k_hi + 1] - pre_hi[k_lo])
    R1 = Interval.from_fixed(r1_lo >> W, -((-r1_hi) >> W), W)
    # R2: for each N the tail starts at M_N = max(N + j0, X), weighted by q^-(M_N - N)
    lo_M = min(1 + j0, X)
    hi_M = max(n_stop - 1 + j0, X)
    xlo, xhi = _range_fixed(c, lo_M, hi_M + 1, W, True)
    r2_lo = r2_hi = 0
    for N in range(1, n_stop):
        M = max(N + j0, X)
        k = M - N
        r2_lo += xlo[M - lo_M] * plo[k]
        r2_hi += xhi[M - lo_M] * phi[k]
    R2 = Interval.from_fixed(r2_lo >> W, -((-r2_hi) >> W), W)
    return R, R1, R2
