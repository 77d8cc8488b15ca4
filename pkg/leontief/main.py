#!/usr/bin/env python3
"""
Leontief establishments, Cobb-Douglas aggregates.

Usage:
    # Generate the configured scenarios and write one establishment file each
    python -m leontief.main generate [--ordered]

    # Aggregate and compute the TFP residual
    python -m leontief.main aggregate

    # Cobb-Douglas and quadratic fits
    python -m leontief.main fit

    # Break detection (optionally over N reseeded replicates)
    python -m leontief.main breaks [--replicates 100]

    # Expectation-driven factor adjustment from the configured state
    python -m leontief.main dynamics

    # Published tables
    python -m leontief.main replicate-table1
    python -m leontief.main replicate-tables23 [--static]

    # Plot data: ordered output, per-worker curve, quadratic, breaks
    python -m leontief.main figures

Global flags go before the subcommand:
    python -m leontief.main --config run.json --seed 3 --out-dir out replicate-table1
"""

import argparse
import logging
import re
import sys
from pathlib import Path

from leontief.aggregate import (
    CurvePoint,
    aggregate,
    decompose_tfp,
    detect_breaks,
    output_profile,
    per_worker_curve,
    replicate_breaks,
    tfp,
)
from leontief.config import LOG_LEVEL
from leontief.core import average_productivities
from leontief.dynamics import (
    ExpectationState,
    capital_expectation_state,
    expected_mp_capital,
    expected_mp_labor,
    labor_expectation_state,
    run_adjustment,
)
from leontief.errors import IdentificationError, LeontiefError
from leontief.fit import (
    fit_cobb_douglas,
    fit_cobb_douglas_scenario,
    fit_quadratic,
    quadratic_samples,
)
from leontief.results import LabeledMarginal, write_results
from leontief.runconfig import RunConfig, apply_overrides, load_config
from leontief.scenarios import ScenarioKind, generate, order_by_output

logger = logging.getLogger("leontief")

# Z column of the published aggregate table
PUBLISHED_Z = {
    ScenarioKind.I: 1.22,
    ScenarioKind.II: 1.36,
    ScenarioKind.III: 1.377,
    ScenarioKind.IV: 1.384,
}


# -- Helpers ----------------------------------------------------------------


def _slug(label: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_") or "scenario"


def _out(config: RunConfig, stem: str) -> Path:
    return Path(config.out_dir) / f"{stem}.{config.format}"


def _generated(config: RunConfig):
    return [generate(spec) for spec in config.scenario_specs()]


def _tfp_records(config: RunConfig):
    return [tfp(aggregate(sc), config.alpha) for sc in _generated(config)]


# -- Subcommands ------------------------------------------------------------


def cmd_generate(args, config: RunConfig):
    """Generate each scenario and write its establishments."""
    for sc in _generated(config):
        if args.ordered:
            sc = order_by_output(sc)
        path = write_results(sc.establishments, config.format,
                             _out(config, f"establishments_{_slug(sc.label)}"))
        print(f"{sc.label}: {len(sc)} establishments -> {path}")


def cmd_aggregate(args, config: RunConfig):
    """Aggregate every scenario and compute Z."""
    records = _tfp_records(config)
    write_results(records, config.format, _out(config, "aggregates"), family="aggregates")
    for rec in records:
        src = rec.source
        print(f"{src.label:<14} K={src.K:10.2f} L={src.L:10.2f} Y={src.Y:10.2f} Z={rec.Z:.5f}")
    for base, variant in zip(records, records[1:]):
        d = decompose_tfp(base, variant)
        shared = "same K, L" if d.shared_factors else "different K, L"
        print(f"  {d.base_label} -> {d.variant_label}: dZ={d.dz_total:+.4f} ({shared}; "
              f"output {d.output_effect:+.4f}, factors {d.factor_effect:+.4f})")


def cmd_fit(args, config: RunConfig):
    """Cobb-Douglas fit over the scenario aggregates and each establishment panel,
    plus the quadratic on each per-worker curve."""
    scenarios = _generated(config)
    fits = []
    attempts = [("aggregates", lambda: fit_cobb_douglas([aggregate(sc) for sc in scenarios],
                                                        label="aggregates"))]
    for sc in scenarios:
        attempts.append((sc.label, lambda sc=sc: fit_cobb_douglas_scenario(sc)))
        attempts.append((sc.label, lambda sc=sc: fit_quadratic(per_worker_curve(order_by_output(sc)))))
    for label, attempt in attempts:
        try:
            fits.append(attempt())
        except IdentificationError as e:
            logger.warning(f"Skipping fit for {label}: {e}")
    write_results(fits, config.format, _out(config, "fits"), family="fits")
    for f in fits:
        if hasattr(f, "alpha"):
            print(f"{f.label:<14} CobbDouglas alpha={f.alpha:.4f} Z={f.Z:.4f} R2={f.r_squared:.4f}")
        else:
            print(f"{f.label:<14} Quadratic   c2={f.c2:.4f} slopes [{f.slope_range[0]:.4f}, "
                  f"{f.slope_range[1]:.4f}]")


def cmd_breaks(args, config: RunConfig):
    """Detect regime breaks in output order."""
    for spec in config.scenario_specs():
        report = detect_breaks(order_by_output(generate(spec)))
        write_results(report.breaks, config.format, _out(config, f"breaks_{_slug(spec.label)}"),
                      family="breaks")
        where = ", ".join(f"{b.index} ({b.before}->{b.after})" for b in report.breaks) or "none"
        print(f"{spec.label}: breaks at {where}")
    if args.replicates:
        freqs = [replicate_breaks(spec, args.replicates) for spec in config.scenario_specs()]
        write_results(freqs, config.format, _out(config, "break_frequency"), family="frequencies")
        for f in freqs:
            print(f"{f.label}: {f.runs} runs, mean {f.mean_breaks:.3f} breaks, "
                  f"{f.share_with_break:.1%} with a break")


def cmd_dynamics(args, config: RunConfig):
    """Run the factor-adjustment process from the configured state."""
    dyn = config.dynamics
    trace = run_adjustment(dyn.state.to_state(), dyn.prices, dyn.policy, dyn.max_periods)
    write_results(trace.rows, config.format, _out(config, "trace"), family="traces")
    for row in trace.rows:
        print(f"j+{row.moment}: k={row.k:.4f} l={row.l:.4f} gap_k={row.gap_k:+.4f} "
              f"gap_l={row.gap_l:+.4f} {row.action}{'' if row.confirmed else ' (disconfirmed)'}")
    final = trace.final.current
    labor_ap, capital_ap = average_productivities(final)
    print(f"final: k={final.k:.4f} l={final.l:.4f} 1/a={labor_ap:.5f} 1/b={capital_ap:.5f}")


def cmd_replicate_table1(args, config: RunConfig):
    """Aggregate the configured scenarios and print them beside the published Z."""
    specs = config.scenario_specs()
    records = [tfp(aggregate(generate(spec)), config.alpha) for spec in specs]
    write_results(records, config.format, _out(config, "table1"), family="aggregates")

    a = config.alpha
    print(f"{'Scenario':<14}{'K':>10}{'L':>10}{'K^a':>9}{'L^(1-a)':>9}{'Y':>10}{'Z':>9}{'published':>11}")
    for spec, rec in zip(specs, records):
        src = rec.source
        published = PUBLISHED_Z.get(spec.kind) if a == 0.5 else None
        print(f"{src.label:<14}{src.K:>10.2f}{src.L:>10.2f}{src.K ** a:>9.2f}"
              f"{src.L ** (1 - a):>9.2f}{src.Y:>10.2f}{rec.Z:>9.4f}"
              f"{(f'{published:.3f}' if published else '-'):>11}")


def _static(st: ExpectationState) -> ExpectationState:
    return ExpectationState(current=st.current, expected_a=st.current.a,
                            expected_b=st.current.b, moment=st.moment)


def cmd_replicate_tables23(args, config: RunConfig):
    """Expected marginal productivities of the two published establishment states."""
    t2, t3 = capital_expectation_state(), labor_expectation_state()
    if args.static:
        t2, t3 = _static(t2), _static(t3)
    step = config.dynamics.policy
    marginals = [
        LabeledMarginal("capital_expectation", expected_mp_capital(t2, step.capital_step)),
        LabeledMarginal("labor_expectation", expected_mp_labor(t3, step.labor_step)),
    ]
    write_results(marginals, config.format, _out(config, "tables23"), family="marginals")
    for m in marginals:
        print(f"{m.label}: expected MP of {m.mp.factor.lower()} = {m.mp.value:.4f} "
              f"(y {m.mp.output_now:.2f} -> {m.mp.output_expected:.2f})")


def cmd_figures(args, config: RunConfig):
    """Plot data for the ordered-output line and the per-worker curve."""
    for sc in _generated(config):
        slug = _slug(sc.label)
        ordered = order_by_output(sc)
        write_results(output_profile(sc), config.format, _out(config, f"profile_{slug}"),
                      family="profiles")
        curve = per_worker_curve(ordered)
        write_results(curve.points, config.format, _out(config, f"curve_{slug}"), family="curves")
        report = detect_breaks(ordered)
        write_results(report.breaks, config.format, _out(config, f"breaks_{slug}"), family="breaks")
        try:
            quad = fit_quadratic(curve)
        except IdentificationError as e:
            logger.warning(f"Skipping quadratic for {sc.label}: {e}")
            print(f"{sc.label}: {len(report.breaks)} break(s), no quadratic")
            continue
        write_results([quad], config.format, _out(config, f"quadfit_{slug}"), family="fits")
        samples = [CurvePoint(index=i, x=x, y=y)
                   for i, (x, y) in enumerate(quadratic_samples(quad), start=1)]
        write_results(samples, config.format, _out(config, f"quadsamples_{slug}"), family="curves")
        print(f"{sc.label}: {len(report.breaks)} break(s), quadratic c2={quad.c2:.4f}")


# -- Main -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Leontief establishments, Cobb-Douglas aggregates")
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--seed", type=int, help="Seed applied to every scenario")
    parser.add_argument("--alpha", type=float, help="Capital elasticity for Z")
    parser.add_argument("--out-dir", help="Directory for result files")
    parser.add_argument("--format", choices=["csv", "jsonl"], help="Result file format")
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen_p = subparsers.add_parser("generate", help="Generate scenarios")
    gen_p.add_argument("--ordered", action="store_true", help="Write establishments in output order")

    subparsers.add_parser("aggregate", help="Aggregate scenarios and compute Z")
    subparsers.add_parser("fit", help="Cobb-Douglas and quadratic fits")

    breaks_p = subparsers.add_parser("breaks", help="Detect regime breaks")
    breaks_p.add_argument("--replicates", type=int, default=0,
                          help="Also rerun each scenario with this many consecutive seeds")

    subparsers.add_parser("dynamics", help="Run factor adjustment")
    subparsers.add_parser("replicate-table1", help="Reproduce the aggregate table")

    t23_p = subparsers.add_parser("replicate-tables23", help="Expected marginal productivities")
    t23_p.add_argument("--static", action="store_true", help="Hold expectations at today's coefficients")

    subparsers.add_parser("figures", help="Write plot data")
    return parser


COMMANDS = {
    "generate": cmd_generate,
    "aggregate": cmd_aggregate,
    "fit": cmd_fit,
    "breaks": cmd_breaks,
    "dynamics": cmd_dynamics,
    "replicate-table1": cmd_replicate_table1,
    "replicate-tables23": cmd_replicate_tables23,
    "figures": cmd_figures,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
    )
    try:
        config = load_config(args.config) if args.config else RunConfig()
        config = apply_overrides(config, seed=args.seed, alpha=args.alpha,
                                 out_dir=args.out_dir, format=args.format)
        COMMANDS[args.command](args, config)
    except LeontiefError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
