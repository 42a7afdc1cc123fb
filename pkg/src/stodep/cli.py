"""Command-line entry point: generate, solve, simulate, check, and batch.

All randomness flows from explicit seeds; no wall-clock or entropy sources
touch any output, so identical configurations reproduce byte-identical CSV
reports.  Exit codes: 0 success, 1 property failure (with --strict), 2
I/O or configuration error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

from .errors import CapExceeded, ConfigError, StodepError
from .model import (
    DEFAULT_ACTIVITY_CAP,
    DEFAULT_OUTCOME_CAP,
    DEFAULT_STATE_CAP,
    Instance,
    validate_instance,
)
from .dp import evaluate_policy_exact, solve_clairvoyant
from .policies import optimal_policy_from_table, policy_from_name
from .properties import (
    DEFAULT_TOL,
    check_assumption1,
    check_ir,
    check_ratio,
    check_submodular,
    check_vfm,
)
from .rewards import SubmodularReward
from .serialize import instance_fingerprint, instance_to_dict, load_instance, save_instance
from .simulate import mix64, simulate_episode, summarize_totals
from . import apps


def _fmt(value) -> str:
    """Fixed 17-significant-digit decimals for exact round-trip in CSV."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def build_from_app(app: str, params: dict, seed: int | None, activity_cap: int) -> Instance:
    """Dispatch a generator spec to the matching application builder."""
    if app == "worstcase":
        return apps.build_worst_case_instance(float(params["epsilon"]))
    if app == "setcover":
        return apps.build_set_cover_instance(
            params["ground_set"], params["cover_sets"], int(params["k"]),
            activity_cap=activity_cap,
        )
    if app == "queueing":
        return apps.build_queueing_instance(
            apps.queueing_params_from_dict(params), seed, activity_cap=activity_cap
        )
    if app == "broadcast":
        return apps.build_broadcast_instance(
            apps.broadcast_params_from_dict(params), seed, activity_cap=activity_cap
        )
    if app == "productline":
        return apps.build_product_line_instance(
            apps.product_line_params_from_dict(params), activity_cap=activity_cap
        )
    if app == "adwords":
        return apps.build_adwords_instance(
            apps.adwords_params_from_dict(params), activity_cap=activity_cap
        )
    if app == "matroid-card":
        return apps.build_cardinality_matroid_instance(
            apps.matroid_params_from_dict(params), activity_cap=activity_cap
        )
    if app == "matroid-part":
        return apps.build_partition_matroid_instance(
            apps.matroid_params_from_dict(params), activity_cap=activity_cap
        )
    if app == "random-submodular":
        if seed is None:
            raise ConfigError("random families require a seed")
        return apps.random_submodular_instance(seed, **params)
    if app == "random-linear-decaying":
        if seed is None:
            raise ConfigError("random families require a seed")
        return apps.random_linear_decaying_instance(seed, **params)
    raise ConfigError(f"unknown application {app!r}")


def _load_params(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _make_policy(name: str, instance: Instance, caps: dict):
    if name == "optimal":
        table = solve_clairvoyant(
            instance, state_cap=caps["state"], outcome_cap=caps["outcome"]
        )
        return optimal_policy_from_table(table)
    return policy_from_name(name)


def cmd_generate(args) -> int:
    params = _load_params(args.params)
    instance = build_from_app(args.app, params, args.seed, args.cap_activities)
    report = validate_instance(instance)
    if not report.passed:
        raise ConfigError(f"generated instance failed validation: {report.to_dict()}")
    if args.out:
        save_instance(instance, args.out)
    else:
        json.dump(instance_to_dict(instance), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    print(
        f"generated app={args.app} types={instance.num_types} horizon={instance.horizon} "
        f"activities={instance.num_activities} fingerprint={instance_fingerprint(instance)[:12]}",
        file=sys.stderr,
    )
    return 0


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    table = solve_clairvoyant(
        instance, state_cap=args.cap_states, outcome_cap=args.cap_outcomes
    )
    j_star = float(table.values[table.state_index(instance.initial_items), 0])
    print(f"J*={j_star!r}")
    if args.dump_table:
        table.save_json(args.dump_table)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(
                {"j_star": j_star, "fingerprint": table.fingerprint, "policy": "optimal"},
                fh,
                indent=2,
            )
    return 0


def cmd_simulate(args) -> int:
    instance = load_instance(args.instance)
    caps = {"state": args.cap_states, "outcome": args.cap_outcomes}
    policy = _make_policy(args.policy, instance, caps)
    totals = []
    out_fh = open(args.out, "w", encoding="utf-8") if args.out else None
    try:
        for k in range(args.reps):
            trace = simulate_episode(instance, policy, mix64(args.seed, k))
            totals.append(trace.total_reward)
            if out_fh:
                out_fh.write(json.dumps(trace.to_dict()) + "\n")
    finally:
        if out_fh:
            out_fh.close()
    summary = summarize_totals(totals, args.seed, policy.name)
    print(json.dumps(summary.to_dict()))
    return 0


def _parse_property(spec: str) -> tuple[str, float | None]:
    if spec.startswith("ratio"):
        _, _, arg = spec.partition(":")
        if not arg:
            raise ConfigError("ratio property needs a bound, e.g. ratio:2")
        return "ratio", float(arg)
    if spec in ("vfm", "ir", "submodular", "assumption1"):
        return spec, None
    raise ConfigError(f"unknown property {spec!r}")


def cmd_check(args) -> int:
    # no up-front validation here: reporting broken structure is what check is for
    instance = load_instance(args.instance, validate=False)
    tol = args.tol
    specs = [_parse_property(s.strip()) for s in args.properties.split(",") if s.strip()]
    reports = []
    table = None
    all_passed = True
    for name, bound in specs:
        if name == "assumption1":
            report = check_assumption1(instance, tol)
        elif name == "submodular":
            if not isinstance(instance.reward, SubmodularReward):
                raise ConfigError("submodular check requires a submodular reward")
            report = check_submodular(instance.reward, instance.capacities, tol)
        elif name in ("vfm", "ir"):
            if table is None:
                table = solve_clairvoyant(
                    instance, state_cap=args.cap_states, outcome_cap=args.cap_outcomes
                )
            check = check_vfm if name == "vfm" else check_ir
            report = check(instance, table, tol)
        else:  # ratio
            if table is None:
                table = solve_clairvoyant(
                    instance, state_cap=args.cap_states, outcome_cap=args.cap_outcomes
                )
            if args.policy == "optimal":
                policy = optimal_policy_from_table(table)
            else:
                policy = policy_from_name(args.policy)
            report = check_ratio(
                instance, policy, bound, tol,
                j_star=table, state_cap=args.cap_states, outcome_cap=args.cap_outcomes,
            )
        label = name if bound is None else f"{name}:{bound:g}"
        print(f"{label}: {'pass' if report.passed else 'FAIL'}")
        all_passed = all_passed and report.passed
        reports.append((label, report))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({label: rep.to_dict() for label, rep in reports}, fh, indent=2)
    if args.strict and not all_passed:
        return 1
    return 0


def _batch_rows(config: dict, args):
    app = config["app"]
    params = config.get("params", {})
    policies = config.get("policies", ["myopic"])
    prop_specs = [_parse_property(s) for s in config.get("properties", [])]
    tol = float(config.get("tol", DEFAULT_TOL))
    if "seeds" in config:
        seeds = [int(s) for s in config["seeds"]]
    else:
        start = int(config.get("seed_start", 0))
        seeds = list(range(start, start + int(config.get("seed_count", 0))))
    columns = ["seed", "fingerprint", "family", "num_types", "horizon", "num_activities", "j_star"]
    for pol in policies:
        columns += [f"j[{pol}]", f"ratio[{pol}]"]
    for name, bound in prop_specs:
        columns.append(name if bound is None else f"{name}:{bound:g}")
    columns.append("error")
    rows = []
    for seed in seeds:
        row = {c: None for c in columns}
        row["seed"] = seed
        started = time.perf_counter()
        try:
            instance = build_from_app(app, params, seed, args.cap_activities)
            row["fingerprint"] = instance_fingerprint(instance)
            row["family"] = instance.reward.kind
            row["num_types"] = instance.num_types
            row["horizon"] = instance.horizon
            row["num_activities"] = instance.num_activities
            table = solve_clairvoyant(
                instance, state_cap=args.cap_states, outcome_cap=args.cap_outcomes
            )
            si0 = table.state_index(instance.initial_items)
            j_star = float(table.values[si0, 0])
            row["j_star"] = j_star
            for pol_name in policies:
                policy = (
                    optimal_policy_from_table(table)
                    if pol_name == "optimal"
                    else policy_from_name(pol_name)
                )
                j_pol_table = evaluate_policy_exact(
                    instance, policy, state_cap=args.cap_states, outcome_cap=args.cap_outcomes
                )
                j_pol = float(j_pol_table.values[si0, 0])
                row[f"j[{pol_name}]"] = j_pol
                if j_pol > 0.0:
                    row[f"ratio[{pol_name}]"] = j_star / j_pol
                elif j_star == 0.0:
                    row[f"ratio[{pol_name}]"] = 1.0
                else:
                    row[f"ratio[{pol_name}]"] = float("inf")
            for name, bound in prop_specs:
                label = name if bound is None else f"{name}:{bound:g}"
                if name == "assumption1":
                    passed = check_assumption1(instance, tol).passed
                elif name == "submodular":
                    passed = (
                        check_submodular(instance.reward, instance.capacities, tol).passed
                        if isinstance(instance.reward, SubmodularReward)
                        else None
                    )
                elif name == "vfm":
                    passed = check_vfm(instance, table, tol).passed
                elif name == "ir":
                    passed = check_ir(instance, table, tol).passed
                else:
                    passed = check_ratio(
                        instance, policy_from_name("myopic"), bound, tol, j_star=table,
                        state_cap=args.cap_states, outcome_cap=args.cap_outcomes,
                    ).passed
                row[label] = passed
        except StodepError as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - started
        rows.append((row, elapsed))
    return columns, rows


def cmd_batch(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    columns, rows = _batch_rows(config, args)
    base = args.out or "batch_report"
    # Timing stays out of the CSV so identical configs give byte-identical files.
    if args.format in ("csv", "both"):
        with open(base + ".csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row, _ in rows:
                writer.writerow([_fmt(row[c]) for c in columns])
    if args.format in ("json", "both"):
        payload = [dict(row, elapsed_seconds=elapsed) for row, elapsed in rows]
        with open(base + ".json", "w", encoding="utf-8") as fh:
            json.dump({"columns": columns, "rows": payload}, fh, indent=2)
    failures = sum(
        1
        for row, _ in rows
        if row["error"] is not None or any(row[c] is False for c in columns)
    )
    print(f"batch: {len(rows)} rows, {failures} with failures")
    if args.strict and failures:
        return 1
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cap-states", type=int, default=DEFAULT_STATE_CAP)
    parser.add_argument("--cap-outcomes", type=int, default=DEFAULT_OUTCOME_CAP)
    parser.add_argument("--cap-activities", type=int, default=DEFAULT_ACTIVITY_CAP)
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL)
    parser.add_argument("--out", type=str, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stodep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build an instance from application parameters")
    p.add_argument("--app", required=True)
    p.add_argument("--params", default=None)
    p.add_argument("--seed", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("solve", help="exact optimal value by backward induction")
    p.add_argument("--instance", required=True)
    p.add_argument("--dump-table", default=None)
    _add_common(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("simulate", help="seeded Monte Carlo episodes")
    p.add_argument("--instance", required=True)
    p.add_argument("--policy", default="myopic")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("check", help="certify structural properties")
    p.add_argument("--instance", required=True)
    p.add_argument("--properties", default="vfm,ir,ratio:2,assumption1")
    p.add_argument("--policy", default="myopic")
    p.add_argument("--strict", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("batch", help="per-seed generate/solve/check report (CSV + JSON)")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")
    p.add_argument("--strict", action="store_true")
    _add_common(p)
    p.set_defaults(fn=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CapExceeded as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 3
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        message = str(exc)
        if isinstance(exc, FileNotFoundError):
            message = f"instance not found: {exc.filename}"
        print(json.dumps({"error": type(exc).__name__, "message": message}))
        return 2
    except StodepError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
