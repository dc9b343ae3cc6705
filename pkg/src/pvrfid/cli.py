"""Command-line front end.

Exit status: 0 on success, 1 on validation errors, 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import energy_model, interrogation, link_budget, sizing
from .scenario import Scenario, load_scenario

log = logging.getLogger("pvrfid")


def _scenario(args) -> Scenario:
    sc = load_scenario(args.scenario)
    return sc.with_overrides(
        duration_s=getattr(args, "duration", None),
        dt_s=getattr(args, "dt", None),
        seed=getattr(args, "seed", None),
        warmup_s=getattr(args, "warmup", None),
    )


def _prefix(args, sc: Scenario) -> Path:
    return Path(args.out) if args.out else Path(sc.out_prefix)


def cmd_range(args) -> int:
    sc = _scenario(args)
    d_p = link_budget.read_range(sc.link, sc.ic.sensitivity_passive_dbm)
    d_s = link_budget.read_range(sc.link, sc.ic.sensitivity_semipassive_dbm)
    print(f"passive {d_p:.2f} m / semipassive {d_s:.2f} m")
    print(f"ratio {link_budget.range_ratio(sc.ic):.5f}")
    label = "EIRP" if sc.link.eirp_mode else "P_TX"
    print(f"{label} {sc.link.p_tx_dbm:g} dBm, g {sc.link.g_product:g}, tau {sc.link.tau:g}, "
          f"f {sc.link.frequency_hz / 1e6:g} MHz")
    return 0


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    f_lo = args.f_lo if args.f_lo is not None else sc.sweep_f_lo_hz
    f_hi = args.f_hi if args.f_hi is not None else sc.sweep_f_hi_hz
    n = args.points if args.points is not None else sc.sweep_points
    points = link_budget.range_sweep(sc.link, sc.ic, sc.sweep_matching(), f_lo, f_hi, n)
    out = Path(args.out) if args.out else Path(f"{sc.out_prefix}_sweep.csv")
    link_budget.write_sweep_csv(points, out)
    print(f"wrote {len(points)} rows to {out}")
    return 0


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    trace = sc.run_simulation()
    prefix = _prefix(args, sc)
    energy_model.write_trace_csv(trace, f"{prefix}_trace.csv")
    energy_model.write_events_csv(trace, f"{prefix}_events.csv")
    for line in sizing.trace_summary_lines(trace, sc.warmup_s):
        print(line)
    if not sc.path.eeprom_reachable:
        log.info("v_clamp %.3g V is below the EEPROM threshold %.3g V", sc.path.v_clamp, sc.ic.v_eeprom)
    return 0


def cmd_campaign(args) -> int:
    sc = _scenario(args)
    trace = sc.run_simulation()
    result = interrogation.run_campaign(trace, sc.reader, sc.link, sc.campaign_duration_s)
    prefix = _prefix(args, sc)
    interrogation.write_hourly_csv(result, f"{prefix}_hourly.csv")
    for line in result.summary_lines():
        print(line)
    return 0


def cmd_size(args) -> int:
    sc = _scenario(args)
    c_min = sizing.min_capacitance(sc, args.target, args.c_lo, args.c_hi, args.rel_tol)
    print(f"c_min_f = {c_min!r}")
    trace = sc.with_capacitance(c_min).run_simulation()
    report = sizing.availability(trace, sc.warmup_s)
    for line in report.summary_lines():
        print(line)
    if args.out:
        sizing.write_blackout_csv(report, args.out)
    return 0


def cmd_report(args) -> int:
    trace = energy_model.read_trace_csv(args.trace)
    for line in sizing.trace_summary_lines(trace, args.warmup or 0.0):
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pvrfid", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--scenario", required=True, help="scenario file (or a bundled scenario name)")
        p.add_argument("--out", help="output path or prefix")
        p.add_argument("--duration", type=float, help="override [sim] duration_s")
        p.add_argument("--dt", type=float, help="override [sim] dt_s")
        p.add_argument("--seed", type=int, help="override [reader] rng_seed")
        p.add_argument("--warmup", type=float, help="override [sim] warmup_s")
        p.set_defaults(func=func)
        return p

    scenario_cmd("range", cmd_range, "read range in both modes")
    p = scenario_cmd("sweep", cmd_sweep, "read range vs frequency, to CSV")
    p.add_argument("--f-lo", type=float)
    p.add_argument("--f-hi", type=float)
    p.add_argument("--points", type=int)
    scenario_cmd("simulate", cmd_simulate, "time-step the power path, write trace and events CSV")
    scenario_cmd("campaign", cmd_campaign, "reader measurement campaign over the simulated trace")
    p = scenario_cmd("size", cmd_size, "minimum capacitance for a target availability")
    p.add_argument("--target", type=float, default=1.0)
    p.add_argument("--c-lo", type=float, default=1e-3)
    p.add_argument("--c-hi", type=float, default=100.0)
    p.add_argument("--rel-tol", type=float, default=1e-3)

    p = sub.add_parser("report", help="summarise an existing trace CSV")
    p.add_argument("trace")
    p.add_argument("--warmup", type=float, default=0.0)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, sizing.MonotonicityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
