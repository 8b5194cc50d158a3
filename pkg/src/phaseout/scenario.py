"""Scenario files: one YAML document describing a fleet, prices, and the
parameter blocks each subcommand needs.

Field names mirror the library types one-for-one. Validation happens at
load time and every error carries the offending field's path, e.g.
``fleet[2].capacity: must be > 0``. Scenarios round-trip: a loaded
scenario serialized with `save_scenario` re-loads to an equal value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .auction import AuctionConfig, Bid
from .dynamics import BidderPolicy, Round, RoundSchedule
from .fleet import Plant, PricePath
from .markets import LinearCurve, ValueSchedule
from .menu import MenuBid, TargetPath

MAX_SEED = 2**64 - 1


class ScenarioError(Exception):
    """A scenario file failed schema or invariant validation."""


@dataclass(frozen=True)
class AuctionSpec:
    config: AuctionConfig
    bids: tuple[Bid, ...] = ()


@dataclass(frozen=True)
class MenuSpec:
    bids: tuple[MenuBid, ...]
    target: TargetPath
    auction_year: int | None = None
    single_round_lead_time_months: int | None = None


@dataclass(frozen=True)
class LeakageSpec:
    global_supply: LinearCurve
    demand_policy_region: LinearCurve
    demand_other: LinearCurve
    demand_shift: float = 0.0
    supply_shift: float = 0.0


@dataclass(frozen=True)
class WaterbedSpec:
    cap: float
    baseline_demand: float
    coal_demand_reduction: float
    cancelled: float


@dataclass(frozen=True)
class TonnageSpec:
    cap: float
    schedules: tuple[ValueSchedule, ...]
    allocation: str = "auctioned"
    trading_enabled: bool = True


@dataclass(frozen=True)
class OptimumSpec:
    private_mb: LinearCurve
    private_mc: float
    external_cost: float


@dataclass(frozen=True)
class RecommendSpec:
    ownership: str
    competition: str


@dataclass(frozen=True)
class NegotiationSpec:
    wtp_per_plant: float | None = None
    wtp_per_mw: float | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int = 0
    description: str = ""
    fleet: tuple[Plant, ...] = ()
    price_path: PricePath | None = None
    auction: AuctionSpec | None = None
    schedule: RoundSchedule | None = None
    policy: BidderPolicy = field(default_factory=BidderPolicy)
    menu: MenuSpec | None = None
    leakage: LeakageSpec | None = None
    waterbed: WaterbedSpec | None = None
    tonnage: TonnageSpec | None = None
    optimum: OptimumSpec | None = None
    recommend: RecommendSpec | None = None
    negotiation: NegotiationSpec | None = None
    levy_total_compensation: float | None = None
    shock_path: PricePath | None = None


# ---------------------------------------------------------------------------
# low-level typed getters
# ---------------------------------------------------------------------------


def _ensure_map(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"{path}: expected a mapping (got {type(value).__name__})")
    return value


def _ensure_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(f"{path}: expected a list (got {type(value).__name__})")
    return value


def _check_keys(mapping: Mapping[str, Any], allowed: set[str], path: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ScenarioError(f"{path}.{unknown[0]}: unknown field")


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}: expected a number (got {value!r})")
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}: expected an integer (got {value!r})")
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ScenarioError(f"{path}: expected a string (got {value!r})")
    return value


def _boolean(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ScenarioError(f"{path}: expected a boolean (got {value!r})")
    return value


def _number_list(value: Any, path: str) -> list[float]:
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(_ensure_list(value, path))]


_MISSING = object()


def _take(mapping: Mapping[str, Any], key: str, path: str, default: Any = _MISSING) -> Any:
    if key in mapping:
        return mapping[key]
    if default is _MISSING:
        raise ScenarioError(f"{path}.{key}: required field is missing")
    return default


def _build(factory, kwargs: dict, path: str):
    """Construct a library type, prefixing its invariant errors with `path`."""
    try:
        return factory(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"{path}.{exc}") from exc


# ---------------------------------------------------------------------------
# block parsers
# ---------------------------------------------------------------------------

_PLANT_KEYS = {
    "id",
    "capacity",
    "commissioning_year",
    "efficiency",
    "emission_intensity",
    "capacity_factor",
    "marginal_cost",
    "fixed_om_cost",
    "closure_cost",
    "remaining_life_years",
    "contract",
    "region",
    "min_lead_time_months",
    "has_heat_output",
}

_PATH_KEYS = {"electricity_price", "carbon_price", "discount_rate"}

_CONFIG_KEYS = {
    "ranking_rule",
    "budget",
    "capacity_target",
    "bid_cap_per_mw",
    "grid_penalty_per_mw",
    "lead_time_months",
    "exclude_grid_critical",
}

_SCENARIO_KEYS = {
    "name",
    "seed",
    "description",
    "fleet",
    "price_path",
    "auction",
    "schedule",
    "policy",
    "menu",
    "market",
    "negotiation",
    "levy",
    "shock",
}

_MARKET_KEYS = {"leakage", "waterbed", "tonnage", "optimum", "recommend"}


def _parse_plant(raw: Any, path: str) -> Plant:
    mapping = _ensure_map(raw, path)
    _check_keys(mapping, _PLANT_KEYS, path)
    kwargs: dict[str, Any] = {
        "id": _string(_take(mapping, "id", path), f"{path}.id"),
        "capacity": _number(_take(mapping, "capacity", path), f"{path}.capacity"),
    }
    for key in ("efficiency", "emission_intensity", "capacity_factor",
                "marginal_cost", "fixed_om_cost", "closure_cost"):
        if key in mapping:
            kwargs[key] = _number(mapping[key], f"{path}.{key}")
    for key in ("commissioning_year", "remaining_life_years", "min_lead_time_months"):
        if key in mapping:
            kwargs[key] = _integer(mapping[key], f"{path}.{key}")
    for key in ("contract", "region"):
        if key in mapping:
            kwargs[key] = _string(mapping[key], f"{path}.{key}")
    if "has_heat_output" in mapping:
        kwargs["has_heat_output"] = _boolean(mapping["has_heat_output"], f"{path}.has_heat_output")
    return _build(Plant, kwargs, path)


def _parse_price_path(raw: Any, path: str) -> PricePath:
    mapping = _ensure_map(raw, path)
    _check_keys(mapping, _PATH_KEYS, path)
    kwargs: dict[str, Any] = {
        "electricity_price": tuple(
            _number_list(_take(mapping, "electricity_price", path), f"{path}.electricity_price")
        ),
        "carbon_price": tuple(
            _number_list(_take(mapping, "carbon_price", path), f"{path}.carbon_price")
        ),
    }
    if "discount_rate" in mapping:
        kwargs["discount_rate"] = _number(mapping["discount_rate"], f"{path}.discount_rate")
    return _build(PricePath, kwargs, path)


def _parse_auction_config(mapping: Mapping[str, Any], path: str) -> AuctionConfig:
    _check_keys(mapping, _CONFIG_KEYS, path)
    kwargs: dict[str, Any] = {}
    if "ranking_rule" in mapping:
        kwargs["ranking_rule"] = _string(mapping["ranking_rule"], f"{path}.ranking_rule")
    for key in ("budget", "capacity_target", "bid_cap_per_mw"):
        if key in mapping and mapping[key] is not None:
            kwargs[key] = _number(mapping[key], f"{path}.{key}")
    if "grid_penalty_per_mw" in mapping:
        kwargs["grid_penalty_per_mw"] = _number(
            mapping["grid_penalty_per_mw"], f"{path}.grid_penalty_per_mw"
        )
    if "lead_time_months" in mapping:
        kwargs["lead_time_months"] = _integer(mapping["lead_time_months"], f"{path}.lead_time_months")
    if "exclude_grid_critical" in mapping:
        kwargs["exclude_grid_critical"] = _boolean(
            mapping["exclude_grid_critical"], f"{path}.exclude_grid_critical"
        )
    return _build(AuctionConfig, kwargs, path)


def _parse_auction_block(raw: Any, path: str) -> AuctionSpec:
    mapping = _ensure_map(raw, path)
    _check_keys(mapping, _CONFIG_KEYS | {"bids"}, path)
    config = _parse_auction_config({k: v for k, v in mapping.items() if k != "bids"}, path)
    bids: list[Bid] = []
    for i, raw_bid in enumerate(_ensure_list(mapping.get("bids", []), f"{path}.bids")):
        bid_map = _ensure_map(raw_bid, f"{path}.bids[{i}]")
        _check_keys(bid_map, {"plant_id", "compensation_per_mw"}, f"{path}.bids[{i}]")
        bids.append(
            _build(
                Bid,
                {
                    "plant_id": _string(
                        _take(bid_map, "plant_id", f"{path}.bids[{i}]"), f"{path}.bids[{i}].plant_id"
                    ),
                    "compensation_per_mw": _number(
                        _take(bid_map, "compensation_per_mw", f"{path}.bids[{i}]"),
                        f"{path}.bids[{i}].compensation_per_mw",
                    ),
                },
                f"{path}.bids[{i}]",
            )
        )
    return AuctionSpec(config=config, bids=tuple(bids))


def _parse_schedule(raw: Any, path: str) -> RoundSchedule:
    mapping = _ensure_map(raw, path)
    _check_keys(mapping, {"rounds", "end_rule_year", "final_phaseout_year"}, path)
    rounds = []
    for i, raw_round in enumerate(_ensure_list(_take(mapping, "rounds", path), f"{path}.rounds")):
        round_map = _ensure_map(raw_round, f"{path}.rounds[{i}]")
        _check_keys(round_map, {"year", "auction"}, f"{path}.rounds[{i}]")
        year = _integer(_take(round_map, "year", f"{path}.rounds[{i}]"), f"{path}.rounds[{i}].year")
        config = _parse_auction_config(
            _ensure_map(
                _take(round_map, "auction", f"{path}.rounds[{i}]"), f"{path}.rounds[{i}].auction"
            ),
            f"{path}.rounds[{i}].auction",
        )
        rounds.append(Round(year=year, config=config))
    return _build(
        RoundSchedule,
        {
            "rounds": tuple(rounds),
            "end_rule_year": _integer(
                _take(mapping, "end_rule_year", path), f"{path}.end_rule_year"
            ),
            "final_phaseout_year": _integer(
                _take(mapping, "final_phaseout_year", path), f"{path}.final_phaseout_year"
            ),
        },
        path,
    )


def _parse_policy(raw: Any, path: str) -> BidderPolicy:
    mapping = _ensure_map(raw, path)
    _check_keys(mapping, {"mode", "bid_grid_step", "max_iterations"}, path)
    kwargs: dict[str, Any] = {}
    if "mode" in mapping:
        kwargs["mode"] = _string(mapping["mode"], f"{path}.mode")
    if "bid_grid_step" in mapping:
        kwargs["bid_grid_step"] = _number(mapping["bid_grid_step"], f"{path}.bid_grid_step")
    if "max_iterations" in mapping:
        kwargs["max_iterations"] = _integer(mapping["max_iterations"], f"{path}.max_iterations")
    return _build(BidderPolicy, kwargs, path)


def _parse_menu(raw: Any, path: str) -> MenuSpec:
    mapping = _ensure_map(raw, path)
    _check_keys(
        mapping, {"bids", "target", "auction_year", "single_round_lead_time_months"}, path
    )
    bids: list[MenuBid] = []
    for i, raw_bid in enumerate(_ensure_list(_take(mapping, "bids", path), f"{path}.bids")):
        bid_map = _ensure_map(raw_bid, f"{path}.bids[{i}]")
        _check_keys(bid_map, {"plant_id", "offers"}, f"{path}.bids[{i}]")
        offers_map = _ensure_map(
            _take(bid_map, "offers", f"{path}.bids[{i}]"), f"{path}.bids[{i}].offers"
        )
        offers = {
            _integer(year, f"{path}.bids[{i}].offers"): _number(
                cost, f"{path}.bids[{i}].offers[{year}]"
            )
            for year, cost in offers_map.items()
        }
        bids.append(
            _build(
                MenuBid,
                {
                    "plant_id": _string(
                        _take(bid_map, "plant_id", f"{path}.bids[{i}]"),
                        f"{path}.bids[{i}].plant_id",
                    ),
                    "offers": offers,
                },
                f"{path}.bids[{i}]",
            )
        )
    target_map = _ensure_map(_take(mapping, "target", path), f"{path}.target")
    _check_keys(target_map, {"cumulative_closed_capacity_min"}, f"{path}.target")
    requirements_map = _ensure_map(
        _take(target_map, "cumulative_closed_capacity_min", f"{path}.target"),
        f"{path}.target.cumulative_closed_capacity_min",
    )
    requirements = {
        _integer(year, f"{path}.target.cumulative_closed_capacity_min"): _number(
            mw, f"{path}.target.cumulative_closed_capacity_min[{year}]"
        )
        for year, mw in requirements_map.items()
    }
    target = _build(
        TargetPath, {"cumulative_closed_capacity_min": requirements}, f"{path}.target"
    )
    auction_year = None
    if "auction_year" in mapping:
        auction_year = _integer(mapping["auction_year"], f"{path}.auction_year")
    lead = None
    if "single_round_lead_time_months" in mapping:
        lead = _integer(
            mapping["single_round_lead_time_months"], f"{path}.single_round_lead_time_months"
        )
    return MenuSpec(
        bids=tuple(bids),
        target=target,
        auction_year=auction_year,
        single_round_lead_time_months=lead,
    )


def _parse_curve(raw: Any, path: str) -> LinearCurve:
    mapping = _ensure_map(raw, path)
    _check_keys(mapping, {"intercept", "slope"}, path)
    return LinearCurve(
        intercept=_number(_take(mapping, "intercept", path), f"{path}.intercept"),
        slope=_number(_take(mapping, "slope", path), f"{path}.slope"),
    )


def _parse_market(raw: Any, path: str) -> dict[str, Any]:
    mapping = _ensure_map(raw, path)
    _check_keys(mapping, _MARKET_KEYS, path)
    blocks: dict[str, Any] = {}
    if "leakage" in mapping:
        sub = _ensure_map(mapping["leakage"], f"{path}.leakage")
        _check_keys(
            sub,
            {"global_supply", "demand_policy_region", "demand_other", "demand_shift", "supply_shift"},
            f"{path}.leakage",
        )
        blocks["leakage"] = LeakageSpec(
            global_supply=_parse_curve(
                _take(sub, "global_supply", f"{path}.leakage"), f"{path}.leakage.global_supply"
            ),
            demand_policy_region=_parse_curve(
                _take(sub, "demand_policy_region", f"{path}.leakage"),
                f"{path}.leakage.demand_policy_region",
            ),
            demand_other=_parse_curve(
                _take(sub, "demand_other", f"{path}.leakage"), f"{path}.leakage.demand_other"
            ),
            demand_shift=_number(sub.get("demand_shift", 0.0), f"{path}.leakage.demand_shift"),
            supply_shift=_number(sub.get("supply_shift", 0.0), f"{path}.leakage.supply_shift"),
        )
    if "waterbed" in mapping:
        sub = _ensure_map(mapping["waterbed"], f"{path}.waterbed")
        _check_keys(
            sub, {"cap", "baseline_demand", "coal_demand_reduction", "cancelled"}, f"{path}.waterbed"
        )
        blocks["waterbed"] = WaterbedSpec(
            cap=_number(_take(sub, "cap", f"{path}.waterbed"), f"{path}.waterbed.cap"),
            baseline_demand=_number(
                _take(sub, "baseline_demand", f"{path}.waterbed"), f"{path}.waterbed.baseline_demand"
            ),
            coal_demand_reduction=_number(
                _take(sub, "coal_demand_reduction", f"{path}.waterbed"),
                f"{path}.waterbed.coal_demand_reduction",
            ),
            cancelled=_number(
                _take(sub, "cancelled", f"{path}.waterbed"), f"{path}.waterbed.cancelled"
            ),
        )
    if "tonnage" in mapping:
        sub = _ensure_map(mapping["tonnage"], f"{path}.tonnage")
        _check_keys(sub, {"cap", "allocation", "trading_enabled", "schedules"}, f"{path}.tonnage")
        schedules = []
        for i, raw_schedule in enumerate(
            _ensure_list(_take(sub, "schedules", f"{path}.tonnage"), f"{path}.tonnage.schedules")
        ):
            schedule_map = _ensure_map(raw_schedule, f"{path}.tonnage.schedules[{i}]")
            _check_keys(schedule_map, {"plant_id", "steps"}, f"{path}.tonnage.schedules[{i}]")
            steps = []
            for j, raw_step in enumerate(
                _ensure_list(
                    _take(schedule_map, "steps", f"{path}.tonnage.schedules[{i}]"),
                    f"{path}.tonnage.schedules[{i}].steps",
                )
            ):
                pair = _ensure_list(raw_step, f"{path}.tonnage.schedules[{i}].steps[{j}]")
                if len(pair) != 2:
                    raise ScenarioError(
                        f"{path}.tonnage.schedules[{i}].steps[{j}]: expected [quantity, value]"
                    )
                steps.append(
                    (
                        _number(pair[0], f"{path}.tonnage.schedules[{i}].steps[{j}][0]"),
                        _number(pair[1], f"{path}.tonnage.schedules[{i}].steps[{j}][1]"),
                    )
                )
            schedules.append(
                _build(
                    ValueSchedule,
                    {
                        "plant_id": _string(
                            _take(schedule_map, "plant_id", f"{path}.tonnage.schedules[{i}]"),
                            f"{path}.tonnage.schedules[{i}].plant_id",
                        ),
                        "steps": tuple(steps),
                    },
                    f"{path}.tonnage.schedules[{i}]",
                )
            )
        kwargs: dict[str, Any] = {
            "cap": _number(_take(sub, "cap", f"{path}.tonnage"), f"{path}.tonnage.cap"),
            "schedules": tuple(schedules),
        }
        if "allocation" in sub:
            kwargs["allocation"] = _string(sub["allocation"], f"{path}.tonnage.allocation")
        if "trading_enabled" in sub:
            kwargs["trading_enabled"] = _boolean(
                sub["trading_enabled"], f"{path}.tonnage.trading_enabled"
            )
        blocks["tonnage"] = TonnageSpec(**kwargs)
    if "optimum" in mapping:
        sub = _ensure_map(mapping["optimum"], f"{path}.optimum")
        _check_keys(sub, {"private_mb", "private_mc", "external_cost"}, f"{path}.optimum")
        blocks["optimum"] = OptimumSpec(
            private_mb=_parse_curve(
                _take(sub, "private_mb", f"{path}.optimum"), f"{path}.optimum.private_mb"
            ),
            private_mc=_number(
                _take(sub, "private_mc", f"{path}.optimum"), f"{path}.optimum.private_mc"
            ),
            external_cost=_number(
                _take(sub, "external_cost", f"{path}.optimum"), f"{path}.optimum.external_cost"
            ),
        )
    if "recommend" in mapping:
        sub = _ensure_map(mapping["recommend"], f"{path}.recommend")
        _check_keys(sub, {"ownership", "competition"}, f"{path}.recommend")
        blocks["recommend"] = RecommendSpec(
            ownership=_string(
                _take(sub, "ownership", f"{path}.recommend"), f"{path}.recommend.ownership"
            ),
            competition=_string(
                _take(sub, "competition", f"{path}.recommend"), f"{path}.recommend.competition"
            ),
        )
    return blocks


# ---------------------------------------------------------------------------
# top level
# ---------------------------------------------------------------------------


def scenario_from_dict(raw: Any, default_name: str = "scenario") -> Scenario:
    mapping = _ensure_map(raw, "scenario")
    _check_keys(mapping, _SCENARIO_KEYS, "scenario")

    name = default_name
    if "name" in mapping:
        name = _string(mapping["name"], "scenario.name")
    seed = 0
    if "seed" in mapping:
        seed = _integer(mapping["seed"], "scenario.seed")
        if not 0 <= seed <= MAX_SEED:
            raise ScenarioError(f"scenario.seed: must be an unsigned 64-bit integer (got {seed})")
    description = ""
    if "description" in mapping:
        description = _string(mapping["description"], "scenario.description")

    fleet = tuple(
        _parse_plant(raw_plant, f"fleet[{i}]")
        for i, raw_plant in enumerate(_ensure_list(mapping.get("fleet", []), "fleet"))
    )
    seen_ids: set[str] = set()
    for i, plant in enumerate(fleet):
        if plant.id in seen_ids:
            raise ScenarioError(f"fleet[{i}].id: duplicate plant id {plant.id!r}")
        seen_ids.add(plant.id)

    price_path = None
    if "price_path" in mapping:
        price_path = _parse_price_path(mapping["price_path"], "price_path")

    auction = None
    if "auction" in mapping:
        auction = _parse_auction_block(mapping["auction"], "auction")
        for i, bid in enumerate(auction.bids):
            if bid.plant_id not in seen_ids:
                raise ScenarioError(
                    f"auction.bids[{i}].plant_id: unknown plant id {bid.plant_id!r}"
                )

    schedule = None
    if "schedule" in mapping:
        schedule = _parse_schedule(mapping["schedule"], "schedule")

    policy = BidderPolicy()
    if "policy" in mapping:
        policy = _parse_policy(mapping["policy"], "policy")

    menu = None
    if "menu" in mapping:
        menu = _parse_menu(mapping["menu"], "menu")
        for i, bid in enumerate(menu.bids):
            if bid.plant_id not in seen_ids:
                raise ScenarioError(f"menu.bids[{i}].plant_id: unknown plant id {bid.plant_id!r}")

    market_blocks: dict[str, Any] = {}
    if "market" in mapping:
        market_blocks = _parse_market(mapping["market"], "market")

    negotiation = None
    if "negotiation" in mapping:
        sub = _ensure_map(mapping["negotiation"], "negotiation")
        _check_keys(sub, {"wtp_per_plant", "wtp_per_mw"}, "negotiation")
        wtp_plant = (
            _number(sub["wtp_per_plant"], "negotiation.wtp_per_plant")
            if sub.get("wtp_per_plant") is not None
            else None
        )
        wtp_mw = (
            _number(sub["wtp_per_mw"], "negotiation.wtp_per_mw")
            if sub.get("wtp_per_mw") is not None
            else None
        )
        if (wtp_plant is None) == (wtp_mw is None):
            raise ScenarioError(
                "negotiation: set exactly one of wtp_per_plant and wtp_per_mw"
            )
        negotiation = NegotiationSpec(wtp_per_plant=wtp_plant, wtp_per_mw=wtp_mw)

    levy_total = None
    if "levy" in mapping:
        sub = _ensure_map(mapping["levy"], "levy")
        _check_keys(sub, {"total_compensation"}, "levy")
        levy_total = _number(
            _take(sub, "total_compensation", "levy"), "levy.total_compensation"
        )
        if levy_total < 0:
            raise ScenarioError(f"levy.total_compensation: must be >= 0 (got {levy_total})")

    shock_path = None
    if "shock" in mapping:
        shock_map = _ensure_map(mapping["shock"], "shock")
        if "discount_rate" not in shock_map and price_path is not None:
            shock_map = dict(shock_map)
            shock_map["discount_rate"] = price_path.discount_rate
        shock_path = _parse_price_path(shock_map, "shock")

    return Scenario(
        name=name,
        seed=seed,
        description=description,
        fleet=fleet,
        price_path=price_path,
        auction=auction,
        schedule=schedule,
        policy=policy,
        menu=menu,
        leakage=market_blocks.get("leakage"),
        waterbed=market_blocks.get("waterbed"),
        tonnage=market_blocks.get("tonnage"),
        optimum=market_blocks.get("optimum"),
        recommend=market_blocks.get("recommend"),
        negotiation=negotiation,
        levy_total_compensation=levy_total,
        shock_path=shock_path,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate one scenario file."""
    file_path = Path(path)
    if not file_path.is_file():
        raise ScenarioError(f"scenario file not found: {file_path}")
    try:
        raw = yaml.safe_load(file_path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{file_path}: invalid YAML: {exc}") from exc
    try:
        return scenario_from_dict(raw, default_name=file_path.stem)
    except ScenarioError as exc:
        raise ScenarioError(f"{file_path}: {exc}") from exc


def scenario_to_dict(scenario: Scenario) -> dict:
    """Explicit plain-data form of a scenario; inverse of `scenario_from_dict`."""
    data: dict[str, Any] = {
        "name": scenario.name,
        "seed": scenario.seed,
    }
    if scenario.description:
        data["description"] = scenario.description
    if scenario.fleet:
        data["fleet"] = [
            {
                "id": p.id,
                "capacity": p.capacity,
                "commissioning_year": p.commissioning_year,
                "efficiency": p.efficiency,
                "emission_intensity": p.emission_intensity,
                "capacity_factor": p.capacity_factor,
                "marginal_cost": p.marginal_cost,
                "fixed_om_cost": p.fixed_om_cost,
                "closure_cost": p.closure_cost,
                "remaining_life_years": p.remaining_life_years,
                "contract": p.contract,
                "region": p.region,
                "min_lead_time_months": p.min_lead_time_months,
                "has_heat_output": p.has_heat_output,
            }
            for p in scenario.fleet
        ]
    if scenario.price_path is not None:
        data["price_path"] = _price_path_to_dict(scenario.price_path)
    if scenario.auction is not None:
        block = _config_to_dict(scenario.auction.config)
        block["bids"] = [
            {"plant_id": b.plant_id, "compensation_per_mw": b.compensation_per_mw}
            for b in scenario.auction.bids
        ]
        data["auction"] = block
    if scenario.schedule is not None:
        data["schedule"] = {
            "rounds": [
                {"year": r.year, "auction": _config_to_dict(r.config)}
                for r in scenario.schedule.rounds
            ],
            "end_rule_year": scenario.schedule.end_rule_year,
            "final_phaseout_year": scenario.schedule.final_phaseout_year,
        }
    if scenario.policy != BidderPolicy():
        data["policy"] = {
            "mode": scenario.policy.mode,
            "bid_grid_step": scenario.policy.bid_grid_step,
            "max_iterations": scenario.policy.max_iterations,
        }
    if scenario.menu is not None:
        menu_block: dict[str, Any] = {
            "bids": [
                {"plant_id": b.plant_id, "offers": dict(sorted(b.offers.items()))}
                for b in scenario.menu.bids
            ],
            "target": {
                "cumulative_closed_capacity_min": dict(
                    sorted(scenario.menu.target.cumulative_closed_capacity_min.items())
                )
            },
        }
        if scenario.menu.auction_year is not None:
            menu_block["auction_year"] = scenario.menu.auction_year
        if scenario.menu.single_round_lead_time_months is not None:
            menu_block["single_round_lead_time_months"] = (
                scenario.menu.single_round_lead_time_months
            )
        data["menu"] = menu_block
    market: dict[str, Any] = {}
    if scenario.leakage is not None:
        market["leakage"] = {
            "global_supply": _curve_to_dict(scenario.leakage.global_supply),
            "demand_policy_region": _curve_to_dict(scenario.leakage.demand_policy_region),
            "demand_other": _curve_to_dict(scenario.leakage.demand_other),
            "demand_shift": scenario.leakage.demand_shift,
            "supply_shift": scenario.leakage.supply_shift,
        }
    if scenario.waterbed is not None:
        market["waterbed"] = {
            "cap": scenario.waterbed.cap,
            "baseline_demand": scenario.waterbed.baseline_demand,
            "coal_demand_reduction": scenario.waterbed.coal_demand_reduction,
            "cancelled": scenario.waterbed.cancelled,
        }
    if scenario.tonnage is not None:
        market["tonnage"] = {
            "cap": scenario.tonnage.cap,
            "allocation": scenario.tonnage.allocation,
            "trading_enabled": scenario.tonnage.trading_enabled,
            "schedules": [
                {"plant_id": s.plant_id, "steps": [[q, v] for q, v in s.steps]}
                for s in scenario.tonnage.schedules
            ],
        }
    if scenario.optimum is not None:
        market["optimum"] = {
            "private_mb": _curve_to_dict(scenario.optimum.private_mb),
            "private_mc": scenario.optimum.private_mc,
            "external_cost": scenario.optimum.external_cost,
        }
    if scenario.recommend is not None:
        market["recommend"] = {
            "ownership": scenario.recommend.ownership,
            "competition": scenario.recommend.competition,
        }
    if market:
        data["market"] = market
    if scenario.negotiation is not None:
        block = {}
        if scenario.negotiation.wtp_per_plant is not None:
            block["wtp_per_plant"] = scenario.negotiation.wtp_per_plant
        if scenario.negotiation.wtp_per_mw is not None:
            block["wtp_per_mw"] = scenario.negotiation.wtp_per_mw
        data["negotiation"] = block
    if scenario.levy_total_compensation is not None:
        data["levy"] = {"total_compensation": scenario.levy_total_compensation}
    if scenario.shock_path is not None:
        data["shock"] = _price_path_to_dict(scenario.shock_path)
    return data


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(
        yaml.safe_dump(scenario_to_dict(scenario), sort_keys=False), encoding="utf-8"
    )


def _price_path_to_dict(path: PricePath) -> dict:
    return {
        "electricity_price": list(path.electricity_price),
        "carbon_price": list(path.carbon_price),
        "discount_rate": path.discount_rate,
    }


def _config_to_dict(config: AuctionConfig) -> dict:
    return {
        "ranking_rule": config.ranking_rule,
        "budget": config.budget,
        "capacity_target": config.capacity_target,
        "bid_cap_per_mw": config.bid_cap_per_mw,
        "grid_penalty_per_mw": config.grid_penalty_per_mw,
        "lead_time_months": config.lead_time_months,
        "exclude_grid_critical": config.exclude_grid_critical,
    }


def _curve_to_dict(curve: LinearCurve) -> dict:
    return {"intercept": curve.intercept, "slope": curve.slope}


def bundled_scenario_names() -> list[str]:
    """Names of the scenarios shipped with the package."""
    data_dir = resources.files("phaseout") / "data"
    return sorted(p.name[: -len(".yaml")] for p in data_dir.iterdir() if p.name.endswith(".yaml"))


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a bundled scenario."""
    candidate = resources.files("phaseout") / "data" / f"{name}.yaml"
    with resources.as_file(candidate) as real_path:
        if not real_path.is_file():
            raise ScenarioError(
                f"unknown bundled scenario {name!r}; available: {', '.join(bundled_scenario_names())}"
            )
        return Path(real_path)


def resolve_scenario(arg: str) -> Path:
    """Interpret a CLI scenario argument as a file path or a bundled name."""
    path = Path(arg)
    if path.is_file():
        return path
    if "/" not in arg and "\\" not in arg and not arg.endswith(".yaml"):
        return bundled_scenario_path(arg)
    raise ScenarioError(f"scenario file not found: {arg}")
