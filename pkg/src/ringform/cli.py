"""Command line interface.

Subcommands: ``run`` simulates a config and writes CSV/JSON/SVG outputs;
``analyze-spectrum`` prints the consensus-matrix eigenstructure for a
gap vector; ``stability`` prints the single-agent characteristic
polynomials with verdicts; ``acceptance`` runs the acceptance suite.
Exit codes: 0 success, 1 failed checks, 2 invalid configuration,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, acceptance, spectral, stability
from ._backend import DEFAULT_BACKEND, available_backends
from .config import BUNDLED, load_config
from .formation import FormationSpec, validate
from .geometry import TWO_PI
from .output import (
    build_report,
    metrics_from_table,
    table_from_trajectory,
    write_metrics_csv,
    write_report,
    write_trajectory_csv,
)
from .simulate import InvalidConfig, SimulationDiverged, integrate, with_overrides
from .svgplot import PALETTE, line_chart, plane_chart

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        config, out_opts = load_config(args.config)
        config = with_overrides(config, seed=args.seed, dt=args.dt, t_end=args.t_end)
        traj = integrate(config, backend=args.backend)
    except InvalidConfig as exc:
        print("invalid configuration:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationDiverged as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    table = table_from_trajectory(traj, out_opts.store_every)
    write_trajectory_csv(out_dir / "trajectory.csv", table)
    m = metrics_from_table(table, config.spec, config.params)
    write_metrics_csv(out_dir / "metrics.csv", m)
    report = build_report(table, config.spec, config.params, out_opts.threshold)
    write_report(out_dir / "report.json", report)

    n = table.n_agents
    traces = [
        (f"agent {i + 1}", table.agent_pos[:, i, 0], table.agent_pos[:, i, 1])
        for i in range(n)
    ]
    traces.append(("target", table.target_pos[:, 0], table.target_pos[:, 1]))
    markers = [
        (float(table.agent_pos[-1, i, 0]), float(table.agent_pos[-1, i, 1]), PALETTE[i % len(PALETTE)])
        for i in range(n)
    ]
    (out_dir / "trajectory.svg").write_text(
        plane_chart(traces, markers, title="Agent trajectories"), encoding="utf-8"
    )

    series = [
        (f"|rho - R| agent {i + 1}", m.times, np.abs(m.radius_error[:, i]))
        for i in range(n)
    ]
    series.append(("min pairwise distance", m.times, m.min_pairwise_distance))
    (out_dir / "metrics.svg").write_text(
        line_chart(series, title="Formation errors", ylabel="error"),
        encoding="utf-8",
    )

    print(f"wrote trajectory.csv, metrics.csv, report.json, *.svg to {out_dir}")
    print(
        f"final errors: radius {report['final_radius_error_max']:.3e}, "
        f"rate {report['final_angle_rate_error_max']:.3e}, "
        f"spacing {report['final_spacing_error_max']:.3e}; "
        f"equilibrium: {report['equilibrium_case']}"
    )
    return EXIT_OK


def _parse_gaps(args: argparse.Namespace) -> np.ndarray:
    if args.d == "equal":
        if args.n is None:
            raise InvalidConfig(["--n is required with --d equal"])
        return np.full(args.n, TWO_PI / args.n)
    return np.array([float(v) for v in args.d.split(",")])


def _cmd_analyze_spectrum(args: argparse.Namespace) -> int:
    try:
        d = _parse_gaps(args)
        spec = FormationSpec(spacings=tuple(d), radii=(1.0,) * len(d), omega=0.0)
        violations = validate(spec)
        if violations:
            raise InvalidConfig(violations)
    except InvalidConfig as exc:
        print("inadmissible gap vector:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG

    rep = spectral.spectral_report(d, args.lambda1, args.lambda2)
    n = len(d)
    print(f"gap vector ({n} agents): {np.array2string(d, precision=6)}")
    print(f"Laplacian eigenvalues: {np.array2string(rep.laplacian_eigenvalues, precision=9)}")
    print(f"  all in [0, 2]:      {'pass' if rep.all_in_range else 'FAIL'}")
    print(f"  zero simple:        {'pass' if rep.zero_simple else 'FAIL'}")
    parity = "even" if rep.two_expected else "odd"
    presence = "present" if rep.two_present else "absent"
    ok2 = rep.two_present == rep.two_expected
    print(f"  eigenvalue 2:       {presence} (N {parity}) {'pass' if ok2 else 'FAIL'}")
    print("stacked matrix eigenvalues:")
    for z in rep.stacked_eigenvalues:
        print(f"  {z.real:+.9f} {z.imag:+.9f}j")
    print(f"  simple zero, rest strictly stable: {'pass' if rep.nonzero_spectrum_stable else 'FAIL'}")
    print(f"left null vector (sums to 1): {np.array2string(rep.left_vector, precision=6)}")
    return EXIT_OK if rep.all_pass else EXIT_FAIL


def _print_routh(table: stability.RouthTable) -> None:
    for row in table.rows:
        print("    " + "  ".join(f"{v: .6g}" for v in row))
    flags = []
    if table.epsilon_used:
        flags.append("zero pivot replaced by epsilon")
    if table.boundary:
        flags.append("boundary case (imaginary-axis roots possible)")
    if flags:
        print("    [" + "; ".join(flags) + "]")


def _cmd_stability(args: argparse.Namespace) -> int:
    omega, mu, radius, sigma = args.omega, args.mu, args.R, args.sigma
    if not (mu > 0.0 and radius > 0.0):
        print("mu and R must be positive", file=sys.stderr)
        return EXIT_CONFIG

    if omega != 0.0:
        coeffs = stability.charpoly_circling(omega, mu, radius, sigma)
        roots = np.roots(coeffs)
        stable = bool(np.all(roots.real < 0.0))
        print(f"circling equilibrium (omega = {omega}):")
        print(f"  characteristic polynomial coefficients: {coeffs}")
        print(f"  a1*a2 - a0*a3 = {coeffs[1] * coeffs[2] - coeffs[0] * coeffs[3]:.6g}")
        print(f"  roots: {np.array2string(roots, precision=6)}")
        print(f"  verdict: {'stable' if stable else 'UNSTABLE'}")
    else:
        roots = stability.charpoly_resting_roots(mu, radius, sigma, 0.0)
        stable = bool(np.all(roots.real < 0.0))
        print("resting equilibrium (omega = 0):")
        print(f"  roots: {np.array2string(roots, precision=6)}")
        print(f"  verdict: {'stable' if stable else 'UNSTABLE'}")

    coeffs = stability.charpoly_at_target(omega, mu, radius)
    table, changes = stability.routh_sign_changes(coeffs)
    print("at-target equilibrium (sigma = 0 model):")
    print(f"  characteristic polynomial coefficients: {coeffs}")
    print("  Routh array:")
    _print_routh(table)
    print(f"  sign changes (right-half-plane roots): {changes}")
    print(f"  root-oracle count: {stability.rhp_root_count(coeffs)}")
    print(f"  verdict: {'UNSTABLE' if changes > 0 else 'stable'}")
    return EXIT_OK


def _cmd_acceptance(args: argparse.Namespace) -> int:
    ids = [int(v) for v in args.only.split(",")] if args.only else None
    results = acceptance.run_all(ids)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  criterion {res.cid:2d}  {res.name}")
        print(f"      {res.detail}")
        if not res.passed:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringform",
        description=(
            "Simulate agents forming a prescribed pattern around a target and "
            "verify the controller's spectral and stability properties."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a configuration and write outputs")
    run.add_argument(
        "--config",
        required=True,
        help=f"path to a TOML config, or one of: {', '.join(BUNDLED)}",
    )
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--dt", type=float, default=None, help="override the time step")
    run.add_argument("--t-end", type=float, default=None, help="override the duration")
    run.add_argument(
        "--backend",
        default="auto",
        choices=("auto", "compiled", "python"),
        help=f"integration kernel (auto resolves to {DEFAULT_BACKEND}; "
        f"available: {', '.join(available_backends())})",
    )
    run.set_defaults(fn=_cmd_run)

    spec = sub.add_parser("analyze-spectrum", help="eigenstructure of a gap vector")
    spec.add_argument("--d", default="equal", help="'equal' or comma-separated gaps in radians")
    spec.add_argument("--n", type=int, default=None, help="agent count for --d equal")
    spec.add_argument("--lambda1", type=float, default=1.0)
    spec.add_argument("--lambda2", type=float, default=1.0)
    spec.set_defaults(fn=_cmd_analyze_spectrum)

    stab = sub.add_parser("stability", help="single-agent equilibrium analysis")
    stab.add_argument("--omega", type=float, required=True)
    stab.add_argument("--mu", type=float, default=1.0)
    stab.add_argument("--R", type=float, default=1.0)
    stab.add_argument("--sigma", type=float, default=-1.0)
    stab.set_defaults(fn=_cmd_stability)

    acc = sub.add_parser("acceptance", help="run the acceptance suite")
    acc.add_argument("--only", default=None, help="comma-separated criterion ids")
    acc.set_defaults(fn=_cmd_acceptance)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
