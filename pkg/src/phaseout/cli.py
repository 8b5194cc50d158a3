"""Command-line surface: load a scenario, run one subcommand, emit a CSV
report plus a human-readable summary.

Exit codes are a stable contract: 0 success, 2 input error, 3 model
infeasibility (the report is still written). Reports are byte-identical
across repeated runs on the same inputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent import futures
from dataclasses import dataclass, replace
from functools import partial
from pathlib import Path

from . import __version__
from .auction import REASON_BUDGET, REASON_TARGET_MET, clear_auction, index_plants, score
from .dynamics import (
    negotiation_benchmark,
    polluter_levy,
    scarcity_shock,
    simulate_program,
)
from .fleet import annual_emissions, npv_profit_at, truthful_bid_at
from .markets import (
    leakage_equilibrium,
    recommend_strategy,
    social_optimum,
    tonnage_market,
    waterbed,
)
from .menu import clear_menu_exact, clear_menu_greedy, lead_time_coverage
from .scenario import (
    MAX_SEED,
    Scenario,
    ScenarioError,
    load_scenario,
    resolve_scenario,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3

SUBCOMMANDS = (
    "clear",
    "menu",
    "simulate",
    "negotiate",
    "levy",
    "shock",
    "leakage",
    "waterbed",
    "tonnage",
    "optimum",
    "recommend",
    "truthful",
)


@dataclass(frozen=True)
class Report:
    """One subcommand's tabular result plus run metadata."""

    subcommand: str
    scenario_name: str
    seed: int
    columns: tuple[str, ...]
    rows: tuple[tuple[object, ...], ...]
    summary: tuple[str, ...]
    exit_code: int = EXIT_OK


def _need(scenario: Scenario, block: str, subcommand: str) -> None:
    present = {
        "fleet": bool(scenario.fleet),
        "price_path": scenario.price_path is not None,
        "auction": scenario.auction is not None,
        "schedule": scenario.schedule is not None,
        "menu": scenario.menu is not None,
        "market.leakage": scenario.leakage is not None,
        "market.waterbed": scenario.waterbed is not None,
        "market.tonnage": scenario.tonnage is not None,
        "market.optimum": scenario.optimum is not None,
        "market.recommend": scenario.recommend is not None,
        "negotiation": scenario.negotiation is not None,
        "levy": scenario.levy_total_compensation is not None,
        "shock": scenario.shock_path is not None,
    }[block]
    if not present:
        raise ScenarioError(f"subcommand {subcommand!r} requires the {block} block")


def _run_clear(scenario: Scenario) -> Report:
    _need(scenario, "fleet", "clear")
    _need(scenario, "auction", "clear")
    spec = scenario.auction
    outcome = clear_auction(scenario.fleet, spec.bids, spec.config, scenario.price_path)
    index = index_plants(scenario.fleet)
    bid_by_plant = {b.plant_id: b for b in spec.bids}
    rows: list[tuple[object, ...]] = []
    for award in outcome.awarded:
        bid = bid_by_plant[award.plant_id]
        rows.append(
            (award.plant_id, bid.compensation_per_mw, award.score, True, award.payment_total, "")
        )
    for rejection in sorted(outcome.rejected, key=lambda r: r.plant_id):
        bid = bid_by_plant[rejection.plant_id]
        rejected_score = None
        if rejection.reason in (REASON_BUDGET, REASON_TARGET_MET):
            rejected_score = score(
                bid,
                index[rejection.plant_id],
                spec.config.ranking_rule,
                spec.config.grid_penalty_per_mw,
            )
        rows.append(
            (rejection.plant_id, bid.compensation_per_mw, rejected_score, False, 0.0, rejection.reason)
        )
    summary = [
        f"awarded {len(outcome.awarded)} of {len(spec.bids)} bids, "
        f"{outcome.awarded_capacity} MW for {outcome.total_payment}",
        f"undersubscribed: {str(outcome.undersubscribed).lower()}",
    ]
    if outcome.forced_closure is not None:
        summary.append(f"forced closure without compensation: {outcome.forced_closure}")
    if outcome.additionality_fraction is not None:
        summary.append(f"additionality: {1.0 - outcome.additionality_fraction:.4f} of awarded capacity"
                       f" ({outcome.additionality_fraction:.4f} would have closed anyway)")
    return Report(
        subcommand="clear",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("plant_id", "bid_per_mw", "score", "awarded", "payment_total", "reason"),
        rows=tuple(rows),
        summary=tuple(summary),
    )


def _run_menu(scenario: Scenario) -> Report:
    _need(scenario, "fleet", "menu")
    _need(scenario, "menu", "menu")
    spec = scenario.menu
    exact = clear_menu_exact(scenario.fleet, spec.bids, spec.target)
    greedy = clear_menu_greedy(scenario.fleet, spec.bids, spec.target)
    offers = {bid.plant_id: bid.offers for bid in spec.bids}
    rows: list[tuple[object, ...]] = []
    for solver, assignment in (("exact", exact), ("greedy", greedy)):
        for plant_id, year in sorted(assignment.closures.items(), key=lambda kv: (kv[1], kv[0])):
            rows.append((solver, plant_id, year, offers[plant_id][year]))
    summary = [
        f"exact: {'total ' + str(exact.total_compensation) if exact.feasible else 'infeasible'}",
        f"greedy: {'total ' + str(greedy.total_compensation) if greedy.feasible else 'infeasible'}",
    ]
    if spec.auction_year is not None and spec.single_round_lead_time_months is not None:
        coverage = lead_time_coverage(
            scenario.fleet, spec.bids, spec.auction_year, spec.single_round_lead_time_months
        )
        summary.append(
            f"lead-time participation gained: {len(coverage.gained)} of {len(scenario.fleet)} plants"
            f" ({coverage.fraction_gained:.4f})"
        )
    return Report(
        subcommand="menu",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("solver", "plant_id", "closure_year", "compensation"),
        rows=tuple(rows),
        summary=tuple(summary),
        exit_code=EXIT_OK if exact.feasible else EXIT_INFEASIBLE,
    )


def _run_simulate(scenario: Scenario) -> Report:
    _need(scenario, "fleet", "simulate")
    _need(scenario, "schedule", "simulate")
    _need(scenario, "price_path", "simulate")
    outcome = simulate_program(
        scenario.fleet, scenario.schedule, scenario.policy, scenario.price_path
    )
    rows = tuple(
        (fate.year, fate.plant_id, fate.state, fate.payment) for fate in outcome.fates
    )
    summary = [
        f"policy mode: {scenario.policy.mode}"
        + ("" if outcome.converged else " (best response did not converge)"),
        f"total program payment: {outcome.total_program_payment}",
    ]
    for year, round_outcome in outcome.rounds:
        summary.append(
            f"round {year}: awarded {len(round_outcome.awarded)} bids, "
            f"{round_outcome.awarded_capacity} MW for {round_outcome.total_payment}"
        )
    if outcome.uncompensated_closures:
        summary.append(
            f"closed without compensation at end rule {scenario.schedule.end_rule_year}: "
            + ", ".join(outcome.uncompensated_closures)
        )
    return Report(
        subcommand="simulate",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("round_year", "plant_id", "state", "payment"),
        rows=rows,
        summary=tuple(summary),
    )


def _run_negotiate(scenario: Scenario) -> Report:
    _need(scenario, "fleet", "negotiate")
    _need(scenario, "price_path", "negotiate")
    _need(scenario, "negotiation", "negotiate")
    result = negotiation_benchmark(
        scenario.fleet,
        scenario.price_path,
        wtp_per_plant=scenario.negotiation.wtp_per_plant,
        wtp_per_mw=scenario.negotiation.wtp_per_mw,
    )
    rows = tuple(
        (pid, result.payments[pid] - result.rents[pid], result.payments[pid], result.rents[pid])
        for pid in sorted(result.payments)
    )
    summary = (
        f"negotiated payments total {result.total_payment}",
        f"informational rent total {result.total_rent}",
    )
    return Report(
        subcommand="negotiate",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("plant_id", "truthful_cost", "payment", "rent"),
        rows=rows,
        summary=summary,
    )


def _run_levy(scenario: Scenario) -> Report:
    _need(scenario, "fleet", "levy")
    _need(scenario, "levy", "levy")
    levies = polluter_levy(scenario.fleet, scenario.levy_total_compensation)
    index = index_plants(scenario.fleet)
    rows = tuple(
        (pid, annual_emissions(index[pid]), levies[pid]) for pid in sorted(levies)
    )
    summary = (
        f"levy of {scenario.levy_total_compensation} apportioned by emissions "
        f"across {len(levies)} plants",
    )
    return Report(
        subcommand="levy",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("plant_id", "annual_emissions", "levy"),
        rows=rows,
        summary=summary,
    )


def _run_shock(scenario: Scenario) -> Report:
    _need(scenario, "fleet", "shock")
    _need(scenario, "schedule", "shock")
    _need(scenario, "price_path", "shock")
    _need(scenario, "shock", "shock")
    outcome = simulate_program(
        scenario.fleet, scenario.schedule, scenario.policy, scenario.price_path
    )
    result = scarcity_shock(outcome, scenario.fleet, scenario.shock_path)
    rows = tuple(
        (d.plant_id, d.capacity, d.payment, d.shocked_npv, d.re_enters)
        for d in result.details
    )
    summary = (
        f"re-entry capacity: {result.re_entry_capacity} MW of "
        f"{result.procured_capacity} MW procured "
        f"({result.capacity_share:.4f} share)",
        f"re-entering plants: {', '.join(result.re_entries) if result.re_entries else 'none'}",
    )
    return Report(
        subcommand="shock",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("plant_id", "capacity", "payment", "shocked_npv", "re_enters"),
        rows=rows,
        summary=summary,
    )


def _run_leakage(scenario: Scenario) -> Report:
    _need(scenario, "market.leakage", "leakage")
    spec = scenario.leakage
    result = leakage_equilibrium(
        spec.global_supply,
        spec.demand_policy_region,
        spec.demand_other,
        spec.demand_shift,
        spec.supply_shift,
    )
    rows = (
        ("p1", result.p1),
        ("p2", result.p2),
        ("q1", result.q1),
        ("q2", result.q2),
        ("q3", result.q3),
        ("q4", result.q4),
        ("leakage", result.leakage),
        ("net_global_reduction", result.net_global_reduction),
        ("degenerate", result.degenerate),
    )
    summary = (
        (
            f"global price {result.p1} -> {result.p2}; leakage {result.leakage}; "
            f"net global reduction {result.net_global_reduction}"
        )
        if not result.degenerate
        else "degenerate: no positive-price equilibrium",
    )
    return Report(
        subcommand="leakage",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("parameter", "value"),
        rows=rows,
        summary=summary,
        exit_code=EXIT_INFEASIBLE if result.degenerate else EXIT_OK,
    )


def _run_waterbed(scenario: Scenario) -> Report:
    _need(scenario, "market.waterbed", "waterbed")
    spec = scenario.waterbed
    result = waterbed(
        spec.cap, spec.baseline_demand, spec.coal_demand_reduction, spec.cancelled
    )
    rows = (
        ("cap", result.cap),
        ("coal_demand_reduction", result.coal_demand_reduction),
        ("cancelled", result.cancelled),
        ("eua_price_direction", result.eua_price_direction),
        ("total_emissions", result.total_emissions),
    )
    summary = (
        f"total emissions {result.total_emissions} under cap {result.cap}; "
        f"allowance price direction: {result.eua_price_direction}",
    )
    return Report(
        subcommand="waterbed",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("parameter", "value"),
        rows=rows,
        summary=summary,
    )


def _run_tonnage(scenario: Scenario) -> Report:
    _need(scenario, "market.tonnage", "tonnage")
    spec = scenario.tonnage
    result = tonnage_market(
        spec.schedules, spec.cap, spec.allocation, spec.trading_enabled
    )
    rows: list[tuple[object, ...]] = [
        ("permit_price", result.permit_price),
        ("total_value", result.total_value),
        ("n_trades", len(result.trades)),
        ("exits", ";".join(result.exits)),
    ]
    for pid in sorted(result.allocations):
        rows.append((f"allocation.{pid}", result.allocations[pid]))
    summary = (
        f"{spec.allocation} allocation of {spec.cap} tonnes; permit price {result.permit_price}; "
        f"total value {result.total_value}",
        f"exits: {', '.join(result.exits) if result.exits else 'none'}",
    )
    return Report(
        subcommand="tonnage",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("parameter", "value"),
        rows=tuple(rows),
        summary=summary,
    )


def _run_optimum(scenario: Scenario) -> Report:
    _need(scenario, "market.optimum", "optimum")
    spec = scenario.optimum
    result = social_optimum(spec.private_mb, spec.private_mc, spec.external_cost)
    rows = (
        ("q_private", result.q_private),
        ("q_social", result.q_social),
        ("phaseout_rational", result.phaseout_rational),
    )
    summary = (
        f"private optimum {result.q_private}, social optimum {result.q_social}; "
        f"phaseout rational: {str(result.phaseout_rational).lower()}",
    )
    return Report(
        subcommand="optimum",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("parameter", "value"),
        rows=rows,
        summary=summary,
    )


def _run_recommend(scenario: Scenario) -> Report:
    _need(scenario, "market.recommend", "recommend")
    spec = scenario.recommend
    strategy = recommend_strategy(spec.ownership, spec.competition)
    rows = (
        ("ownership", spec.ownership),
        ("competition", spec.competition),
        ("strategy", strategy),
    )
    return Report(
        subcommand="recommend",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=("parameter", "value"),
        rows=rows,
        summary=(f"recommended strategy: {strategy}",),
    )


def _run_truthful(scenario: Scenario) -> Report:
    _need(scenario, "fleet", "truthful")
    _need(scenario, "price_path", "truthful")
    if scenario.schedule is not None:
        start = scenario.schedule.start_year
        years = [(r.year, r.year - start) for r in scenario.schedule.rounds]
    else:
        years = [(0, 0)]
    rows: list[tuple[object, ...]] = []
    for year, elapsed in years:
        for plant in sorted(scenario.fleet, key=lambda p: p.id):
            npv = npv_profit_at(plant, scenario.price_path, elapsed)
            bid_total = truthful_bid_at(plant, scenario.price_path, elapsed)
            rows.append(
                (plant.id, year, npv, plant.closure_cost, bid_total, bid_total / plant.capacity)
            )
    summary = (f"truthful bids for {len(scenario.fleet)} plants at {len(years)} date(s)",)
    return Report(
        subcommand="truthful",
        scenario_name=scenario.name,
        seed=scenario.seed,
        columns=(
            "plant_id",
            "year",
            "npv_profit",
            "closure_cost",
            "truthful_bid_total",
            "truthful_bid_per_mw",
        ),
        rows=tuple(rows),
        summary=summary,
    )


_HANDLERS = {
    "clear": _run_clear,
    "menu": _run_menu,
    "simulate": _run_simulate,
    "negotiate": _run_negotiate,
    "levy": _run_levy,
    "shock": _run_shock,
    "leakage": _run_leakage,
    "waterbed": _run_waterbed,
    "tonnage": _run_tonnage,
    "optimum": _run_optimum,
    "recommend": _run_recommend,
    "truthful": _run_truthful,
}


def run(subcommand: str, scenario: Scenario) -> Report:
    """Execute one subcommand against a loaded scenario."""
    if subcommand not in _HANDLERS:
        raise ScenarioError(f"unknown subcommand {subcommand!r}")
    return _HANDLERS[subcommand](scenario)


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(report: Report, out_dir: str | Path) -> Path:
    """Write the report CSV; metadata rides in leading comment lines."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / f"{report.scenario_name}_{report.subcommand}.csv"
    buffer = io.StringIO()
    buffer.write(f"# scenario: {report.scenario_name}\n")
    buffer.write(f"# seed: {report.seed}\n")
    buffer.write(f"# tool_version: {__version__}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_format_cell(cell) for cell in row])
    target.write_text(buffer.getvalue(), encoding="utf-8")
    return target


def _process_one(
    subcommand: str, scenario_arg: str, out_dir: str, seed_override: int | None
) -> tuple[list[str], int]:
    """Load, run, and write one scenario; returns printable lines + exit code."""
    try:
        scenario = load_scenario(resolve_scenario(scenario_arg))
        if seed_override is not None:
            scenario = replace(scenario, seed=seed_override)
        report = run(subcommand, scenario)
    except ScenarioError as exc:
        return [f"error: {exc}"], EXIT_INPUT_ERROR
    except ValueError as exc:
        return [f"error: {exc}"], EXIT_INPUT_ERROR
    csv_path = write_report(report, out_dir)
    lines = [f"phaseout {subcommand} — scenario {report.scenario_name} (seed {report.seed})"]
    lines.extend(report.summary)
    if report.exit_code == EXIT_INFEASIBLE:
        lines.append("model infeasible; report written")
    lines.append(f"report: {csv_path}")
    return lines, report.exit_code


def _seed_type(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaseout",
        description="Coal-phaseout compensation auction simulator",
    )
    parser.add_argument("--version", action="version", version=f"phaseout {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, help=f"run the {name} model")
        sub.add_argument(
            "--scenario",
            action="append",
            required=True,
            metavar="FILE",
            help="scenario file path or bundled scenario name (repeatable)",
        )
        sub.add_argument("--out", default=None, metavar="DIR", help="output directory")
        sub.add_argument("--seed", type=_seed_type, default=None, help="override the scenario seed")
        sub.add_argument("--jobs", type=int, default=1, help="parallel scenario evaluations")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    out_dir = args.out or os.environ.get("PHASEOUT_OUT") or "."
    worker = partial(
        _process_one, args.subcommand, out_dir=out_dir, seed_override=args.seed
    )
    if args.jobs > 1 and len(args.scenario) > 1:
        with futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(worker, args.scenario))
    else:
        results = [worker(arg) for arg in args.scenario]
    exit_code = EXIT_OK
    for lines, code in results:
        stream = sys.stderr if code == EXIT_INPUT_ERROR else sys.stdout
        for line in lines:
            print(line, file=stream)
        if code != EXIT_OK and exit_code == EXIT_OK:
            exit_code = code
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
