"""Command-line interface.

    ordsearch params --q 18.3 --t 8 --u 4
    ordsearch attack --n 4096 --algorithm truncated-bs:1 --v-override 4 --out trace.json
    ordsearch attack --n 8 --algorithm lifted-bs --pair 5
    ordsearch verify --n 512 --count 20 --v-override 3
    ordsearch sweep --q 10,18.3,25 --t 4,8,16 --u 2,3,4,5

Exit codes: 0 success, 1 inequality violation, 2 configuration error,
3 algorithm outside the regime of the construction.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from itertools import product

from .adversary import (
    check_step_invariant,
    construct_hard_input,
    derive_params,
    plan_schedule,
    params_to_dict,
    record_to_dict,
    trace_to_dict,
)
from .algorithms import parse_algorithm_spec, random_algorithm
from .checks import run_suite
from .errors import ConfigError, RegimeError
from .query_model import DEFAULT_SUCCESS_THRESHOLD, ThresholdInput
from .verifier import (
    DEFAULT_BV_CONSTANT,
    hybrid_profile,
    hybrid_to_dict,
    verdict,
    verdict_to_dict,
)

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_REGIME = 0, 1, 2, 3


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".15g")
    return "" if x is None else str(x)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _emit(args, doc, rows=None):
    fmt = args.format or ("csv" if args.command == "sweep" else "json")
    if fmt == "csv":
        text = _csv(rows if rows is not None else [doc])
    else:
        text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _single(value: str, cast, flag: str):
    try:
        return cast(value)
    except ValueError:
        raise ConfigError(f"{flag} expects a single {cast.__name__}, got {value!r}") from None


def _params_row(q, t, u) -> dict:
    row = {"q": q, "t": t, "u": u, "q_prime": None, "q_qprime_u": None, "v": None,
           "coefficient": None, "coefficient_value": None, "accepted": False, "reason": ""}
    try:
        p = derive_params(q, t, u)
    except ConfigError as exc:
        row["reason"] = str(exc)
        if t >= 2 and not t & (t - 1) and u >= 1 and q > 1:
            qp = 1 / t**0.5 + 2 / (q - 1)
            row.update(q_prime=qp, q_qprime_u=q * qp**u)
            c = 1 / (u * (t.bit_length() - 1))
            row.update(coefficient=f"1/{u * (t.bit_length() - 1)}", coefficient_value=c)
        return row
    row.update(
        q_prime=p.q_prime,
        q_qprime_u=p.contraction,
        v=p.v,
        coefficient=str(p.coefficient),
        coefficient_value=float(p.coefficient),
        accepted=True,
        threshold=p.threshold,
        qprime_v=p.q_prime**p.v,
    )
    return row


def cmd_params(args) -> int:
    q = _single(args.q, float, "--q")
    t = _single(args.t, int, "--t")
    u = _single(args.u, int, "--u")
    row = _params_row(q, t, u)
    _emit(args, row)
    return EXIT_OK if row["accepted"] else EXIT_CONFIG


def cmd_sweep(args) -> int:
    try:
        qs = [float(x) for x in args.q.split(",") if x]
        ts = [int(x) for x in args.t.split(",") if x]
        us = [int(x) for x in args.u.split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"sweep grids are comma-separated numbers: {exc}") from None
    if not (qs and ts and us):
        raise ConfigError("empty sweep grid")
    rows = [_params_row(q, t, u) for q, t, u in product(qs, ts, us)]
    for r in rows:
        r.pop("threshold", None)
        r.pop("qprime_v", None)
    rows.sort(key=lambda r: (-(r["coefficient_value"] or 0.0), r["q"], r["t"], r["u"]))
    _emit(args, {"command": "sweep", "rows": rows}, rows)
    return EXIT_OK


def cmd_attack(args) -> int:
    n = args.n
    spec = parse_algorithm_spec(args.algorithm, n, args.seed)
    if args.pair is None:
        # reject out-of-regime algorithms before building possibly huge unitaries
        params = derive_params(_single(args.q, float, "--q"), _single(args.t, int, "--t"), _single(args.u, int, "--u"))
        schedule = plan_schedule(n, params, args.v_override)
        if spec.queries > schedule.final_s:
            raise RegimeError(
                f"algorithm exceeds the regime of the lower-bound construction: T={spec.queries} queries "
                f"but the schedule controls only {schedule.final_s} (n={n}, t={params.t}, u={params.u}, "
                f"v={schedule.v_used})"
            )
    alg = spec.build()
    threshold, bv_c = args.success_threshold, args.bv_constant
    if args.pair is not None:
        k = args.pair
        if not 1 <= k <= n - 1:
            raise ConfigError(f"--pair needs 1 <= k <= n-1, got {k}")
        v = verdict(alg, ThresholdInput(k - 1, n), ThresholdInput(k, n), threshold, bv_c)
        doc = {"command": "attack", "mode": "direct", "n": n, "algorithm": alg.name,
               "pair": [k - 1, k], "verdict": verdict_to_dict(v)}
        _emit(args, doc, [doc["verdict"]])
        return EXIT_OK if v.consistent else EXIT_VIOLATION

    trace = construct_hard_input(alg, params, n, args.v_override)
    inv = check_step_invariant(trace)
    h = hybrid_profile(alg, trace.final_interval, trace.final_s, params.q)
    lo = ThresholdInput(h.k_late, n)
    hi = ThresholdInput(h.k_early, n)
    vd = verdict(alg, lo, hi, threshold, bv_c)

    problems = list(inv.violations())
    if not h.triangle_ok:
        problems.append("triangle inequality")
    if not h.perturbation_ok:
        problems.append("per-step perturbation bound")
    if inv.psi_bound_holds and not (h.step_bounds_ok and h.total_ok):
        problems.append("hybrid bounds despite per-step psi bound")
    if not vd.consistent:
        problems.append("both answers succeed on states closer than the minimum distance bound allows")
    if inv.target_met and min(vd.success_lo, vd.success_hi) >= threshold:
        problems.append("hard pair answered correctly although the potential is below target")

    doc = trace_to_dict(trace)
    doc["invariant"] = {
        "start": [{"s": s, "S": S, "bound": b, "ok": ok} for s, S, b, ok in inv.start_checks],
        "end": [{"s": s, "S": S, "bound": b, "ok": ok} for s, S, b, ok in inv.end_checks],
        "final_S": inv.final_S,
        "final_bound": inv.final_bound,
        "final_target": inv.final_target,
        "target_met": inv.target_met,
        "target_guaranteed": inv.target_guaranteed,
        "psi_bound_holds": inv.psi_bound_holds,
        "violations": problems,
    }
    doc["hybrid"] = hybrid_to_dict(h)
    doc["hybrid"]["verdict"] = verdict_to_dict(vd)
    _emit(args, doc, [record_to_dict_flat(r) for r in doc["records"]] or [{"records": 0}])
    return EXIT_VIOLATION if problems else EXIT_OK


def record_to_dict_flat(rec: dict) -> dict:
    row = {"s": rec["s"], "parent_l": rec["parent"]["l"], "parent_m": rec["parent"]["m"],
           "child_l": rec["child"]["l"], "child_m": rec["child"]["m"], "chosen_r": rec["chosen_r"],
           "S_before": rec["S_before"], "S_after": rec["S_after"]}
    for r, x in enumerate(rec["S_values"], start=1):
        row[f"S_{r}"] = x
    return row


def cmd_verify(args) -> int:
    params = derive_params(_single(args.q, float, "--q"), _single(args.t, int, "--t"), _single(args.u, int, "--u"))
    spec = parse_algorithm_spec(args.algorithm, args.n, args.seed)
    if spec.kind != "random":
        raise ConfigError("verify draws a seeded corpus; use --algorithm random:T=...,w=...")
    suite = run_suite(
        params,
        n=args.n,
        count=args.count,
        T=spec.T,
        workspace_bits=spec.workspace_bits or 0,
        seed=spec.seed,
        bv_constant=args.bv_constant,
        lifted_n=min(64, args.n),
    )
    traces = 0
    try:
        schedule = plan_schedule(args.n, params, args.v_override)
    except ConfigError as exc:
        schedule = None
        suite.extras["trace_note"] = str(exc)
    if schedule is not None:
        T_trace = min(spec.T, schedule.final_s)
        for a in range(args.count):
            alg = random_algorithm(args.n, T_trace, spec.workspace_bits or 0, spec.seed + a)
            inv = check_step_invariant(construct_hard_input(alg, params, args.n, args.v_override))
            suite["trace invariants"].add(float(len(inv.violations())), 0.0)
            traces += 1
    doc = {
        "command": "verify",
        "params": params_to_dict(params),
        "n": args.n,
        "algorithm": args.algorithm,
        "count": args.count,
        "subdivides": suite.extras["subdivides"],
        "bv_max_ratio": suite.extras["bv_max_ratio"],
        "traces_checked": traces,
        "inequalities": suite.rows(),
        "ok": suite.ok,
    }
    _emit(args, doc, suite.rows())
    return EXIT_OK if suite.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=512)
    common.add_argument("--q", default="18.3")
    common.add_argument("--t", default="8")
    common.add_argument("--u", default="4")
    common.add_argument("--v-override", type=int, default=None)
    common.add_argument("--algorithm", default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--success-threshold", type=float, default=DEFAULT_SUCCESS_THRESHOLD)
    common.add_argument("--bv-constant", type=float, default=DEFAULT_BV_CONSTANT)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("json", "csv"), default=None)

    parser = argparse.ArgumentParser(prog="ordsearch", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("params", parents=[common], help="derive and check (q, t, u)")
    attack = sub.add_parser("attack", parents=[common], help="run the adversary on an algorithm")
    attack.add_argument("--pair", type=int, default=None, help="direct verdict on inputs (k-1, k)")
    verify = sub.add_parser("verify", parents=[common], help="run the inequality suite")
    verify.add_argument("--count", type=int, default=20)
    sub.add_parser("sweep", parents=[common], help="tabulate a (q, t, u) grid")
    return parser


_DEFAULT_ALGORITHM = {"attack": "zero-query", "verify": "random:T=4,w=1"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.algorithm is None:
        args.algorithm = _DEFAULT_ALGORITHM.get(args.command, "zero-query")
    if args.v_override is not None and args.v_override < 1:
        print("error: --v-override must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"params": cmd_params, "attack": cmd_attack, "verify": cmd_verify, "sweep": cmd_sweep}
    try:
        return handler[args.command](args)
    except RegimeError as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
