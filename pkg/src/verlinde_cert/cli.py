"""Command-line front end.

Exit codes: 0 success or identity holds, 1 identity violated, 2 usage error,
3 precision exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from decimal import ROUND_CEILING, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from pathlib import Path

from .certball import MAX_PREC, Ball, ComplexBall, PrecisionExhausted
from .theta import (
    ModulusPoint,
    addition_residual,
    duality_matrix_rk1,
    theta00,
    theta_half_half,
)
from .verlinde import (
    ArbDegreeParams,
    FormulaInconsistency,
    ParameterTooLarge,
    RankLevelParams,
    check_arbitrary_quot_sides,
    check_prop31,
    check_prop52,
    check_rank_level_symmetry,
    check_st_symmetry,
    check_vi_forms,
    conformal_block_dim,
    quot_intersection,
    quot_intersection_roots,
    verlinde_arbitrary,
    verlinde_su,
)

ENV_PRECISION = "VERLINDE_PRECISION_BITS"
DEFAULT_PRECISION = 128
DEFAULT_TOLERANCE = "1e-20"

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3

RKG = ("r", "k", "g")
HKRDG = ("h", "k", "r", "d", "g")

# integer-parameter commands usable in `table` sweeps, with canonical param order
SWEEPABLE = {
    "su-verlinde": RKG,
    "quot": RKG,
    "quot-roots": RKG,
    "arb-degree": HKRDG,
    "conformal-block": HKRDG,
    "check-prop31": RKG,
    "check-st-sym": RKG,
    "check-rank-level": RKG,
    "check-vi-forms": RKG,
    "check-prop52": HKRDG,
    "check-quot-sides": HKRDG,
}

CHECKS = {
    "prop31": RKG,
    "st-sym": RKG,
    "rank-level": RKG,
    "vi-forms": RKG,
    "prop52": HKRDG,
    "quot-sides": HKRDG,
}

RECORD_KEYS = ("command", "params", "value", "certified", "precision_bits", "error_radius", "elapsed_ms", "report")


class UsageError(Exception):
    pass


@dataclass
class Options:
    precision_bits: int = DEFAULT_PRECISION
    max_precision_bits: int = MAX_PREC
    tolerance: Fraction = Fraction(DEFAULT_TOLERANCE)


@dataclass
class ResultRecord:
    command: str
    params: dict
    value: object
    certified: bool
    precision_bits: int
    error_radius: str
    elapsed_ms: int
    report: str = ""

    def key(self) -> tuple:
        return (self.command,) + tuple(str(v) for v in self.params.values())


# -- decimal formatting ---------------------------------------------------------------


def _decimal(x: Fraction, digits: int, rounding) -> Decimal:
    ctx = Context(prec=digits, rounding=rounding)
    return ctx.divide(Decimal(x.numerator), Decimal(x.denominator))


def ball_decimal(b: Ball) -> tuple[str, Fraction]:
    """Midpoint as a decimal string and a radius widened to cover the rounding."""
    digits = max(6, int(b.prec * 0.30103) + 2)
    mid = b.mid_fraction()
    dec = _decimal(mid, digits, ROUND_HALF_EVEN)
    return str(dec), b.rad_fraction() + abs(Fraction(dec) - mid)


def radius_str(rad: Fraction) -> str:
    if rad == 0:
        return "0"
    return str(_decimal(rad, 6, ROUND_CEILING))


def complex_pair(z: ComplexBall) -> dict:
    re, re_rad = ball_decimal(z.re)
    im, im_rad = ball_decimal(z.im)
    return {"re": re, "im": im, "rad": radius_str(max(re_rad, im_rad))}


def _complex_rad(z: ComplexBall) -> Fraction:
    return max(z.re.rad_fraction(), z.im.rad_fraction())


# -- evaluation -----------------------------------------------------------------------


def _integer_record(command, params, cert) -> tuple[dict, int]:
    return {
        "value": cert.value,
        "certified": True,
        "precision_bits": cert.precision_bits,
        "error_radius": radius_str(cert.source.rad_fraction()),
        "report": "",
    }, EXIT_OK


def _check_record(rep) -> tuple[dict, int]:
    return {
        "value": rep.holds,
        "certified": True,
        "precision_bits": rep.precision_bits,
        "error_radius": "0",
        "report": str(rep),
    }, EXIT_OK if rep.holds else EXIT_VIOLATION


def _rkg(params) -> RankLevelParams:
    return RankLevelParams(params["r"], params["k"], params["g"])


def _hkrdg(params) -> ArbDegreeParams:
    return ArbDegreeParams(params["h"], params["k"], params["r"], params["d"], params["g"])


def _with_tolerance(compute, opts: Options, radius):
    """Double precision until ``radius(result) <= tolerance``."""
    prec = opts.precision_bits
    while True:
        result = compute(prec)
        if radius(result) <= opts.tolerance:
            return result, prec
        if prec >= opts.max_precision_bits:
            raise PrecisionExhausted("precision exhausted")
        prec = min(2 * prec, opts.max_precision_bits)


def _evaluate(command: str, params: dict, opts: Options) -> tuple[dict, int]:
    pr, cap = opts.precision_bits, opts.max_precision_bits
    if command == "su-verlinde":
        return _integer_record(command, params, verlinde_su(_rkg(params), pr, cap))
    if command == "quot":
        return _integer_record(command, params, quot_intersection(_rkg(params), pr, cap))
    if command == "quot-roots":
        return _integer_record(command, params, quot_intersection_roots(_rkg(params), pr, cap))
    if command == "arb-degree":
        return _integer_record(command, params, verlinde_arbitrary(_hkrdg(params), pr, cap))
    if command == "conformal-block":
        return _integer_record(command, params, conformal_block_dim(_hkrdg(params), pr, cap))
    if command.startswith("check-"):
        which = command[len("check-"):]
        if which == "prop31":
            return _check_record(check_prop31(_rkg(params), pr, cap))
        if which == "st-sym":
            return _check_record(check_st_symmetry(params["r"], params["k"], params["g"], pr, cap))
        if which == "rank-level":
            return _check_record(check_rank_level_symmetry(params["r"], params["k"], params["g"], pr, cap))
        if which == "vi-forms":
            return _check_record(check_vi_forms(_rkg(params), pr, cap))
        if which == "prop52":
            return _check_record(check_prop52(_hkrdg(params), pr, cap))
        if which == "quot-sides":
            return _check_record(check_arbitrary_quot_sides(_hkrdg(params), pr, cap))
    if command == "theta-eval":
        point = ModulusPoint(params["tau"], params["z"])
        fn = theta_half_half if params.get("function") == "theta-half-half" else theta00
        tv, prec = _with_tolerance(lambda p: fn(point, p), opts, lambda t: _complex_rad(t.value))
        pair = complex_pair(tv.value)
        return {
            "value": pair,
            "certified": True,
            "precision_bits": prec,
            "error_radius": pair["rad"],
            "report": f"truncation N={tv.truncation_N}",
        }, EXIT_OK
    if command == "theta-addition":
        res, prec = _with_tolerance(
            lambda p: addition_residual(params["tau"], params["z"], params["w"], p),
            opts,
            _complex_rad,
        )
        holds = res.contains_zero()
        pair = complex_pair(res)
        return {
            "value": pair,
            "certified": holds,
            "precision_bits": prec,
            "error_radius": pair["rad"],
            "report": "residual contains 0" if holds else "residual excludes 0",
        }, EXIT_OK if holds else EXIT_VIOLATION
    if command == "duality-matrix":
        def worst(m):
            return max(_complex_rad(m[0][1]), _complex_rad(m[1][0]))

        m, prec = _with_tolerance(lambda p: duality_matrix_rk1(params["tau"], p), opts, worst)
        off_zero = m[0][1].contains_zero() and m[1][0].contains_zero()
        diag_equal = m[0][0].overlaps(m[1][1])
        holds = off_zero and diag_equal
        pairs = [[complex_pair(m[a][b]) for b in range(2)] for a in range(2)]
        rad = max((Decimal(pairs[a][b]["rad"]) for a in range(2) for b in range(2)))
        return {
            "value": pairs,
            "certified": holds,
            "precision_bits": prec,
            "error_radius": str(rad),
            "report": "diagonal, equal diagonal entries" if holds else
            f"off-diagonal contains 0: {off_zero}; diagonal entries overlap: {diag_equal}",
        }, EXIT_OK if holds else EXIT_VIOLATION
    raise UsageError(f"unknown command {command!r}")


def evaluate(command: str, params: dict, opts: Options | None = None) -> tuple[ResultRecord, int]:
    opts = opts or Options()
    start = time.perf_counter()
    fields, code = _evaluate(command, params, opts)
    elapsed = int(round((time.perf_counter() - start) * 1000))
    return ResultRecord(command=command, params=dict(params), elapsed_ms=elapsed, **fields), code


# -- output ---------------------------------------------------------------------------


def record_json(rec: ResultRecord) -> str:
    return json.dumps(asdict(rec), sort_keys=False)


def csv_header(param_names) -> list[str]:
    return ["command", *param_names, "value", "certified", "precision_bits", "error_radius", "elapsed_ms"]


def _csv_value(v) -> str:
    return json.dumps(v) if isinstance(v, (dict, list)) else str(v)


def record_csv_row(rec: ResultRecord) -> list[str]:
    return [
        rec.command,
        *(str(v) for v in rec.params.values()),
        _csv_value(rec.value),
        str(rec.certified).lower(),
        str(rec.precision_bits),
        rec.error_radius,
        str(rec.elapsed_ms),
    ]


def record_plain(rec: ResultRecord) -> str:
    args = " ".join(f"{k}={v}" for k, v in rec.params.items())
    value = rec.value
    if isinstance(value, dict):
        value = f"{value['re']} + {value['im']}i +/- {value['rad']}"
    extra = f" [{rec.report}]" if rec.report else ""
    status = "certified" if rec.certified else "NOT certified"
    return f"{rec.command} {args}: {value} ({status}, {rec.precision_bits} bits, radius {rec.error_radius}){extra}"


def format_record(rec: ResultRecord, fmt: str) -> str:
    if fmt == "json":
        return record_json(rec)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(csv_header(rec.params.keys()))
        w.writerow(record_csv_row(rec))
        return buf.getvalue().rstrip("\n")
    return record_plain(rec)


def _parse_scalar(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def read_records(path: Path) -> list[ResultRecord]:
    """Load a results file written by ``table`` (JSON lines or CSV)."""
    path = Path(path)
    if not path.exists():
        return []
    text = path.read_text()
    if not text.strip():
        return []
    if text.lstrip().startswith("{"):
        out = []
        for line in text.splitlines():
            if line.strip():
                data = json.loads(line)
                out.append(ResultRecord(**{k: data.get(k, "") for k in RECORD_KEYS}))
        return out
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    names = header[1:-5]
    out = []
    for row in body:
        if not row or row == header:
            continue
        params = {n: _parse_scalar(v) for n, v in zip(names, row[1:1 + len(names)])}
        value, certified, bits, radius, elapsed = row[1 + len(names):]
        out.append(ResultRecord(row[0], params, _parse_scalar(value), certified == "true", int(bits), radius, int(elapsed)))
    return out


# -- sweeps ---------------------------------------------------------------------------


def parse_sweep(spec: str) -> tuple[str, list[dict]]:
    """'su-verlinde:r=1..5,k=0..5,g=1..4' -> command and parameter tuples.

    Each parameter takes ``a..b`` (inclusive) or a single integer; tuples are
    produced in the command's canonical parameter order, last one fastest.
    """
    if ":" not in spec:
        raise UsageError("sweep spec must look like COMMAND:name=a..b,...")
    command, _, body = spec.partition(":")
    command = command.strip()
    if command not in SWEEPABLE:
        raise UsageError(f"command {command!r} cannot be swept; choose from {', '.join(SWEEPABLE)}")
    ranges = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        name, eq, rng = part.partition("=")
        if not eq:
            raise UsageError(f"bad sweep term {part!r}")
        lo, dots, hi = rng.partition("..")
        try:
            lo_i = int(lo)
            hi_i = int(hi) if dots else lo_i
        except ValueError:
            raise UsageError(f"bad range {rng!r}") from None
        ranges[name.strip()] = range(lo_i, hi_i + 1)
    names = SWEEPABLE[command]
    if set(ranges) != set(names):
        raise UsageError(f"{command} sweeps need exactly the parameters {', '.join(names)}")
    tuples = [dict(zip(names, combo)) for combo in itertools.product(*(ranges[n] for n in names))]
    return command, tuples


def _valid(command: str, params: dict) -> bool:
    try:
        (_rkg if SWEEPABLE[command] == RKG else _hkrdg)(params)
    except ValueError:
        return False
    return True


def run_table(spec: str, opts: Options, fmt: str, output: Path | None, jobs: int, out) -> int:
    command, tuples = parse_sweep(spec)
    tuples = [t for t in tuples if _valid(command, t)]
    done = set()
    existing = output is not None and output.exists() and output.stat().st_size > 0
    if output is not None:
        done = {r.key() for r in read_records(output)}
    pending = [t for t in tuples if ResultRecord(command, t, None, False, 0, "", 0).key() not in done]

    def work(params):
        try:
            return evaluate(command, params, opts)
        except PrecisionExhausted:
            return ResultRecord(command, params, None, False, opts.max_precision_bits, "", 0, "precision exhausted"), EXIT_PRECISION

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(work, pending))

    sink = open(output, "a", newline="") if output is not None else None
    try:
        target = sink or out
        writer = csv.writer(target, lineterminator="\n") if fmt == "csv" else None
        if writer is not None and not existing:
            writer.writerow(csv_header(SWEEPABLE[command]))
        for rec, _ in results:
            if writer is not None:
                writer.writerow(record_csv_row(rec))
            elif fmt == "json" or sink is not None:
                target.write(record_json(rec) + "\n")
            else:
                target.write(record_plain(rec) + "\n")
    finally:
        if sink is not None:
            sink.close()
    codes = {code for _, code in results}
    if EXIT_VIOLATION in codes:
        return EXIT_VIOLATION
    if EXIT_PRECISION in codes:
        return EXIT_PRECISION
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("precision must be at least 2 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    env = os.environ.get(ENV_PRECISION)
    default_prec = int(env) if env and env.strip().isdigit() else DEFAULT_PRECISION

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=_positive_int, default=default_prec,
                        help=f"initial working precision (env {ENV_PRECISION}, default {DEFAULT_PRECISION})")
    common.add_argument("--max-precision-bits", type=_positive_int, default=MAX_PREC)
    common.add_argument("--format", choices=("json", "csv", "plain"), default="plain")
    common.add_argument("--tolerance", default=DEFAULT_TOLERANCE,
                        help="radius bound for theta residual checks")

    parser = _Parser(prog="verlinde-cert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ints(p, names):
        for n in names:
            p.add_argument(f"--{n}", type=int, required=True)

    p = sub.add_parser("su-verlinde", parents=[common], help="degree-zero Verlinde number")
    ints(p, RKG)
    p = sub.add_parser("quot", parents=[common], help="Quot-scheme intersection number")
    ints(p, RKG)
    p.add_argument("--roots-form", action="store_true", help="sum over roots of unity instead of subsets")
    p = sub.add_parser("arb-degree", parents=[common], help="Verlinde number of SU(hr, hd)")
    ints(p, HKRDG)
    p = sub.add_parser("conformal-block", parents=[common], help="conformal-block dimension")
    ints(p, HKRDG)

    p = sub.add_parser("check", parents=[common], help="verify an identity exactly")
    p.add_argument("identity", choices=tuple(CHECKS))
    for n in ("h", "r", "k", "d", "g"):
        p.add_argument(f"--{n}", type=int)

    p = sub.add_parser("theta-eval", parents=[common], help="evaluate theta00 or theta_half_half")
    p.add_argument("--tau", required=True)
    p.add_argument("--z", default="0")
    p.add_argument("--function", choices=("theta00", "theta-half-half"), default="theta00")
    p = sub.add_parser("theta-addition", parents=[common], help="addition-formula residual")
    p.add_argument("--tau", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--w", required=True)
    p = sub.add_parser("duality-matrix", parents=[common], help="rank-one duality matrix")
    p.add_argument("--tau", required=True)

    p = sub.add_parser("table", parents=[common], help="sweep a parameter range")
    p.add_argument("--sweep", required=True, help="e.g. su-verlinde:r=1..5,k=0..5,g=1..4")
    p.add_argument("--output", type=Path, help="results file; existing tuples are skipped")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _params_from_args(ns) -> tuple[str, dict]:
    if ns.command in ("su-verlinde", "quot"):
        command = "quot-roots" if ns.command == "quot" and ns.roots_form else ns.command
        return command, {n: getattr(ns, n) for n in RKG}
    if ns.command in ("arb-degree", "conformal-block"):
        return ns.command, {n: getattr(ns, n) for n in HKRDG}
    if ns.command == "check":
        names = CHECKS[ns.identity]
        missing = [n for n in names if getattr(ns, n) is None]
        if missing:
            raise UsageError(f"check {ns.identity} needs --{' --'.join(missing)}")
        return f"check-{ns.identity}", {n: getattr(ns, n) for n in names}
    if ns.command == "theta-eval":
        return ns.command, {"tau": ns.tau, "z": ns.z, "function": ns.function}
    if ns.command == "theta-addition":
        return ns.command, {"tau": ns.tau, "z": ns.z, "w": ns.w}
    return ns.command, {"tau": ns.tau}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        opts = Options(ns.precision_bits, ns.max_precision_bits, Fraction(ns.tolerance))
        if ns.command == "table":
            return run_table(ns.sweep, opts, ns.format, ns.output, ns.jobs, out)
        command, params = _params_from_args(ns)
        rec, code = evaluate(command, params, opts)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except ParameterTooLarge as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except PrecisionExhausted as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PRECISION
    except FormulaInconsistency as exc:
        print(f"error: {exc}", file=err)
        return EXIT_VIOLATION
    print(format_record(rec, ns.format), file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
