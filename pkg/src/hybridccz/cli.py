"""Command-line front end.

Subcommands: params, truth-table, ghz, sweep, validate-effective.
Exit codes: 0 success, 2 configuration error, 3 numerical-diagnostic failure.
Failures print a single machine-parseable line to stderr:
``error: <category>: <reason>``.
"""

import argparse
import math
import sys

from .config import ConfigError, RunConfig, check_against_table1
from .device import NoGateError, RegimeError, TWO_PI
from .experiments import (SweepSpec, run_ghz, run_sweep, sweep_rows_to_csv,
                          validate_effective)
from .gate import ENGINES, schedule_from_model, truth_table
from .spaces import InvalidDimensionError
from .states import StateValidationError
from .svgplot import line_plot_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fail(category: str, reason: str, code: int) -> int:
    reason = " ".join(str(reason).split())
    print(f"error: {category}: {reason}", file=sys.stderr)
    return code


def _parse_float_list(text: str):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ConfigError(f"expected a comma-separated number list, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hybridccz",
        description="Simulate a hybrid controlled-controlled-Z gate between two "
                    "parity-encoded microwave-cavity qubits and a four-level "
                    "superconducting target, from the ideal diagonal-phase picture "
                    "down to the full lossy master equation.")
    p.add_argument("--config", help="path to a flat key = value config file")
    p.add_argument("--seed", type=int, help="override the config random seed")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", help="print derived detunings, rates and schedule")
    sp.add_argument("--check-table1", action="store_true",
                    help="verify derived values against the published parameter "
                         "table (0.5%% tolerance); exit nonzero on mismatch")

    st = sub.add_parser("truth-table", help="verify the 8-state gate signature")
    st.add_argument("--encoding", choices=("fock", "cat"), default="fock")
    st.add_argument("--engine", choices=ENGINES, default="ideal")
    st.add_argument("--gate-time-us", type=float, default=None,
                    help="override the gate time (microseconds)")
    st.add_argument("--csv", help="also write the table to this CSV path")

    sg = sub.add_parser("ghz", help="run the GHZ preparation experiment")
    sg.add_argument("--kappa-inv", type=float, required=True,
                    help="cavity photon lifetime, microseconds (inf = lossless)")
    sg.add_argument("--g12-ratio", type=float, required=True,
                    help="inter-cavity crosstalk as a fraction of g_max")
    sg.add_argument("--engine", choices=ENGINES, default="lossy")
    sg.add_argument("--include-unwanted", action="store_true",
                    help="keep the unwanted cavity-atom couplings in the run")

    sw = sub.add_parser("sweep", help="fidelity vs cavity lifetime and crosstalk")
    sw.add_argument("--kappa-inv", required=True,
                    help="comma list of lifetimes in microseconds, e.g. 5,10,20,50")
    sw.add_argument("--g12-ratio", required=True,
                    help="comma list of crosstalk ratios, e.g. 0,0.01,0.1")
    sw.add_argument("--out", required=True, help="CSV output path")
    sw.add_argument("--plot", help="optional SVG output path")
    sw.add_argument("--workers", type=int, default=0,
                    help="parallel workers (0 = all cores)")
    sw.add_argument("--include-unwanted", action="store_true")

    sv = sub.add_parser("validate-effective",
                        help="overlap infidelity of the dispersive reduction "
                             "against the exact interaction Hamiltonian")
    sv.add_argument("--scale", required=True,
                    help="coupling scale factor, or a comma list like 1,0.5,0.25")
    return p


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_params(cfg: RunConfig, args) -> int:
    model = cfg.device_model()
    det, d = model.det, model.derived
    ghz = TWO_PI * 1e9
    mhz = TWO_PI * 1e6
    print("detunings (/2pi, GHz):")
    print(f"  delta1      = {det.delta1 / ghz:10.4f}    delta2      = {det.delta2 / ghz:10.4f}")
    print(f"  delta1'     = {det.delta1_prime / ghz:10.4f}    delta2'     = {det.delta2_prime / ghz:10.4f}")
    print(f"  delta1''    = {det.delta1_dprime / ghz:10.4f}    delta2''    = {det.delta2_dprime / ghz:10.4f}")
    print(f"  delta1'''   = {det.delta1_tprime / ghz:10.4f}    delta2'''   = {det.delta2_tprime / ghz:10.4f}")
    print(f"  Delta       = {det.big_delta / ghz:10.4f}    Delta12     = {det.delta12 / ghz:10.4f}")
    print("couplings (/2pi, MHz):")
    c = model.couplings
    print(f"  g1 = {c.g1 / mhz:.4f}   g2 = {c.g2 / mhz:.4f}   g12 = {c.g12 / mhz:.4f}")
    print(f"  g1' = {c.g1_prime / mhz:.4f}  g1'' = {c.g1_dprime / mhz:.4f}  g1''' = {c.g1_tprime / mhz:.4f}")
    print(f"  g2' = {c.g2_prime / mhz:.4f}  g2'' = {c.g2_dprime / mhz:.4f}  g2''' = {c.g2_tprime / mhz:.4f}")
    print("effective rates (/2pi, MHz):")
    print(f"  lambda1 = {d.lambda1 / mhz:.4f}   lambda2 = {d.lambda2 / mhz:.4f}   "
          f"lambda = {d.lam / mhz:.4f}")
    print(f"  chi = {d.chi / mhz:.6f}   eta = {d.eta / mhz:.4f}")
    print("schedule:")
    print(f"  t_gate = {d.t_gate * 1e6:.6f} us   k = {d.k}   s = {d.s}")
    print(f"  lambda1*t/pi = {d.lambda1 * d.t_gate / math.pi:.6f}   "
          f"chi*t/pi = {d.chi * d.t_gate / math.pi:.6f}   "
          f"eta*t/pi = {d.eta * d.t_gate / math.pi:.6f}")
    q1 = "inf" if math.isinf(d.q1) else f"{d.q1:.4e}"
    q2 = "inf" if math.isinf(d.q2) else f"{d.q2:.4e}"
    print(f"  Q1 = {q1}   Q2 = {q2}")
    print("dispersive ratios:")
    for name, value in d.dispersive_ratios.items():
        print(f"  {name:14s} = {value:.5f}")
    if args.check_table1:
        report = check_against_table1(model)
        bad = [r for r in report if not r[4]]
        for name, got, want, rel, ok in report:
            mark = "ok " if ok else "FAIL"
            print(f"  [{mark}] {name:20s} derived {got:12.6f}  table {want:10.4f}  "
                  f"rel err {rel:.2e}")
        if bad:
            return _fail("config", f"{len(bad)} parameter(s) deviate from the "
                         "published table by more than 0.5%", EXIT_CONFIG)
        print("table check: all derived parameters within 0.5%")
    return EXIT_OK


def cmd_truth_table(cfg: RunConfig, args) -> int:
    model = cfg.device_model()
    pair = cfg.encoding_pair(args.encoding)
    t_override = None if args.gate_time_us is None else args.gate_time_us * 1e-6
    schedule = schedule_from_model(model, args.engine, t_override)
    report = truth_table(args.engine, pair, model, schedule, cfg.space(),
                         integrator=cfg.integrator_options())
    header = f"{'basis':>16s} {'target':>7s} {'overlap':>12s} {'phase err (deg)':>16s} {'leakage':>12s}"
    print(f"engine = {args.engine}, encoding = {args.encoding}, "
          f"t = {schedule.t_gate * 1e6:.6f} us")
    print(header)
    lines = ["basis,target_phase,overlap,phase_error_deg,leakage"]
    for row in report.rows:
        ph = "undefined" if row.phase_error_deg is None else f"{row.phase_error_deg:.6f}"
        print(f"{row.label:>16s} {row.target_phase:+7d} {row.overlap:12.9f} "
              f"{ph:>16s} {row.leakage:12.3e}")
        lines.append(f"{row.label},{row.target_phase},{row.overlap:.12g},"
                     f"{'' if row.phase_error_deg is None else format(row.phase_error_deg, '.12g')},"
                     f"{row.leakage:.6g}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_ghz(cfg: RunConfig, args) -> int:
    model = cfg.experiment_model(kappa_inv_us=args.kappa_inv,
                                 g12_ratio=args.g12_ratio,
                                 include_unwanted=args.include_unwanted or None)
    pair = cfg.encoding_pair("cat")
    run = run_ghz(model, cfg.space(), pair, engine=args.engine,
                  integrator=cfg.integrator_options())
    res = run.result
    if not res.ok:
        return _fail("numerical", res.failure_reason or "diagnostics breached",
                     EXIT_NUMERICAL)
    print(f"kappa_inv_us = {args.kappa_inv:g}  g12_ratio = {args.g12_ratio:g}  "
          f"engine = {args.engine}")
    print(f"fidelity = {run.fidelity:.9f}")
    print(f"steps = {res.steps}  h = {res.step_size:.3e} s  "
          f"wall = {res.wall_time_s:.1f} s")
    print(f"trace_error = {res.max_trace_error:.3e}  "
          f"min_eigenvalue = {res.min_eigenvalue:.3e}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    spec = SweepSpec(kappa_inv_us=_parse_float_list(args.kappa_inv),
                     g12_ratios=_parse_float_list(args.g12_ratio),
                     out_csv=args.out, out_svg=args.plot)
    base = cfg.experiment_model(include_unwanted=args.include_unwanted or None)
    pair = cfg.encoding_pair("cat")
    rows = run_sweep(base, cfg.space(), pair, spec,
                     integrator=cfg.integrator_options(),
                     workers=args.workers or cfg.workers)
    csv_text = sweep_rows_to_csv(rows)
    with open(spec.out_csv, "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    print(csv_text, end="")
    if spec.out_svg:
        curves = []
        for ratio in spec.g12_ratios:
            xs = [r.kappa_inv_us for r in rows if r.g12_over_gmax == ratio]
            ys = [r.fidelity for r in rows if r.g12_over_gmax == ratio]
            curves.append((f"g12/gmax = {ratio:g}", xs, ys))
        with open(spec.out_svg, "w", encoding="utf-8") as fh:
            fh.write(line_plot_svg(curves, "cavity lifetime (us)", "GHZ fidelity"))
    failures = [r for r in rows if r.status != "ok"]
    if failures:
        return _fail("numerical", f"{len(failures)} sweep point(s) failed "
                     "(see status column)", EXIT_NUMERICAL)
    return EXIT_OK


def cmd_validate_effective(cfg: RunConfig, args) -> int:
    scales = _parse_float_list(args.scale)
    model = cfg.experiment_model(include_unwanted=False)
    pair = cfg.encoding_pair("cat")
    rows = validate_effective(model, cfg.space(), pair, scales,
                              integrator=cfg.integrator_options())
    print(f"{'scale':>8s} {'state':>16s} {'infidelity':>14s}")
    for row in rows:
        print(f"{row.scale:8.3f} {row.state_label:>16s} {row.infidelity:14.6e}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "params":
            return cmd_params(cfg, args)
        if args.command == "truth-table":
            return cmd_truth_table(cfg, args)
        if args.command == "ghz":
            return cmd_ghz(cfg, args)
        if args.command == "sweep":
            return cmd_sweep(cfg, args)
        if args.command == "validate-effective":
            return cmd_validate_effective(cfg, args)
        return _fail("config", f"unknown command {args.command!r}", EXIT_CONFIG)
    except (ConfigError, RegimeError, NoGateError, InvalidDimensionError,
            StateValidationError, FileNotFoundError, ValueError) as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except RuntimeError as exc:
        return _fail("numerical", str(exc), EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
