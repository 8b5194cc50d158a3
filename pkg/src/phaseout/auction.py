"""Single-round sealed-bid pay-as-bid clearing.

Bids state a compensation demand in currency per MW of retired capacity.
Eligible bids are ranked by a configurable cost-effectiveness score and
awarded greedily until the budget or the capacity target binds. Every
winner is paid exactly its own bid; penalties and ranking rules change the
order of selection, never the payment.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .fleet import (
    REGION_GRID_CRITICAL,
    Plant,
    PricePath,
    annual_emissions,
    npv_profit,
)

RULE_PER_MW = "per_mw"
RULE_PER_TCO2_ABSOLUTE = "per_tco2_absolute"
RULE_PER_TCO2_INTENSITY = "per_tco2_intensity"
RANKING_RULES = (RULE_PER_MW, RULE_PER_TCO2_ABSOLUTE, RULE_PER_TCO2_INTENSITY)

REASON_LEAD_TIME = "lead_time"
REASON_GRID_EXCLUSION = "grid_exclusion"
REASON_OVER_CAP = "over_cap"
REASON_BUDGET = "budget"
REASON_TARGET_MET = "target_met"


@dataclass(frozen=True)
class Bid:
    """Sealed compensation demand; the payment if awarded is per-MW x capacity."""

    plant_id: str
    compensation_per_mw: float

    def __post_init__(self) -> None:
        if self.compensation_per_mw < 0:
            raise ValueError(
                f"compensation_per_mw: must be >= 0 (got {self.compensation_per_mw})"
            )


@dataclass(frozen=True)
class AuctionConfig:
    """Clearing rules for one round.

    At least one of `budget` and `capacity_target` must be set. The grid
    penalty is added to the score basis of grid-critical plants only; it
    reflects the system cost of their closure and never changes payments.
    """

    ranking_rule: str = RULE_PER_MW
    budget: float | None = None
    capacity_target: float | None = None
    bid_cap_per_mw: float | None = None
    grid_penalty_per_mw: float = 0.0
    lead_time_months: int = 0
    exclude_grid_critical: bool = False

    def __post_init__(self) -> None:
        if self.ranking_rule not in RANKING_RULES:
            raise ValueError(
                f"ranking_rule: must be one of {RANKING_RULES} (got {self.ranking_rule!r})"
            )
        if self.budget is None and self.capacity_target is None:
            raise ValueError("at least one of budget and capacity_target must be set")
        if self.budget is not None and self.budget < 0:
            raise ValueError(f"budget: must be >= 0 (got {self.budget})")
        if self.capacity_target is not None and self.capacity_target < 0:
            raise ValueError(
                f"capacity_target: must be >= 0 (got {self.capacity_target})"
            )
        if self.grid_penalty_per_mw < 0:
            raise ValueError(
                f"grid_penalty_per_mw: must be >= 0 (got {self.grid_penalty_per_mw})"
            )
        if self.lead_time_months < 0:
            raise ValueError(
                f"lead_time_months: must be >= 0 (got {self.lead_time_months})"
            )


@dataclass(frozen=True)
class Award:
    plant_id: str
    payment_total: float
    score: float


@dataclass(frozen=True)
class Rejection:
    plant_id: str
    reason: str


@dataclass(frozen=True)
class AuctionOutcome:
    awarded: tuple[Award, ...]
    rejected: tuple[Rejection, ...]
    total_payment: float
    awarded_capacity: float
    undersubscribed: bool
    forced_closure: str | None
    additionality_fraction: float | None


def index_plants(plants: Iterable[Plant]) -> dict[str, Plant]:
    """Map plant ids to plants, rejecting duplicates."""
    index: dict[str, Plant] = {}
    for plant in plants:
        if plant.id in index:
            raise ValueError(f"duplicate plant id {plant.id!r}")
        index[plant.id] = plant
    return index


def eligibility_filter(
    plants: Sequence[Plant], bids: Sequence[Bid], config: AuctionConfig
) -> tuple[list[Bid], list[Rejection]]:
    """Split bids into eligible ones and rejections with reasons.

    Checks run in order: lead time, grid exclusion, bid cap; the first
    failing check sets the reason. The cap comparison is inclusive (a bid
    equal to the cap stays eligible). Unknown plant ids are a hard error.
    """
    index = index_plants(plants)
    seen: set[str] = set()
    eligible: list[Bid] = []
    rejections: list[Rejection] = []
    for bid in bids:
        plant = index.get(bid.plant_id)
        if plant is None:
            raise ValueError(f"bid references unknown plant id {bid.plant_id!r}")
        if bid.plant_id in seen:
            raise ValueError(f"multiple bids for plant id {bid.plant_id!r}")
        seen.add(bid.plant_id)
        if plant.min_lead_time_months > config.lead_time_months:
            rejections.append(Rejection(bid.plant_id, REASON_LEAD_TIME))
        elif config.exclude_grid_critical and plant.region == REGION_GRID_CRITICAL:
            rejections.append(Rejection(bid.plant_id, REASON_GRID_EXCLUSION))
        elif (
            config.bid_cap_per_mw is not None
            and bid.compensation_per_mw > config.bid_cap_per_mw
        ):
            rejections.append(Rejection(bid.plant_id, REASON_OVER_CAP))
        else:
            eligible.append(bid)
    return eligible, rejections


def score(bid: Bid, plant: Plant, rule: str, grid_penalty: float = 0.0) -> float:
    """Cost-effectiveness score of a bid; lower is better.

    per_mw ranks by effective currency per MW; per_tco2_absolute divides
    the total effective payment by annual emissions (currency per tCO2/yr,
    so high-emitting plants look cheap); per_tco2_intensity divides the
    per-MW demand by emission intensity (favouring dirty-per-MWh plants).
    """
    effective_per_mw = bid.compensation_per_mw + (
        grid_penalty if plant.region == REGION_GRID_CRITICAL else 0.0
    )
    if rule == RULE_PER_MW:
        return effective_per_mw
    if rule in (RULE_PER_TCO2_ABSOLUTE, RULE_PER_TCO2_INTENSITY):
        emissions = annual_emissions(plant)
        if emissions == 0:
            raise ValueError(
                f"plant {plant.id!r} has zero annual emissions; "
                f"score under {rule} is undefined"
            )
        if rule == RULE_PER_TCO2_ABSOLUTE:
            return effective_per_mw * plant.capacity / emissions
        return effective_per_mw / plant.emission_intensity
    raise ValueError(f"ranking_rule: must be one of {RANKING_RULES} (got {rule!r})")


def clear_auction(
    plants: Sequence[Plant],
    bids: Sequence[Bid],
    config: AuctionConfig,
    price_path: PricePath | None = None,
) -> AuctionOutcome:
    """Clear one sealed-bid round.

    Eligible bids are sorted ascending by score (ties: older commissioning
    year first, then plant id) and awarded greedily. A bid whose payment
    would overshoot the budget is skipped and the scan continues; awarding
    stops once the capacity target is reached. If a capacity target is set
    and missed, the round is undersubscribed and the oldest plant that won
    nothing is forced to close unpaid. When a price path is supplied, the
    capacity share of awards with non-positive NPV is reported as the
    additionality fraction.
    """
    index = index_plants(plants)
    eligible, rejections = eligibility_filter(plants, bids, config)

    scored = [
        (score(bid, index[bid.plant_id], config.ranking_rule, config.grid_penalty_per_mw), bid)
        for bid in eligible
    ]
    scored.sort(
        key=lambda item: (
            item[0],
            index[item[1].plant_id].commissioning_year,
            item[1].plant_id,
        )
    )

    awards: list[Award] = []
    total_payment = 0.0
    awarded_capacity = 0.0
    for bid_score, bid in scored:
        if (
            config.capacity_target is not None
            and awarded_capacity >= config.capacity_target
        ):
            rejections.append(Rejection(bid.plant_id, REASON_TARGET_MET))
            continue
        payment = bid.compensation_per_mw * index[bid.plant_id].capacity
        if config.budget is not None and total_payment + payment > config.budget:
            rejections.append(Rejection(bid.plant_id, REASON_BUDGET))
            continue
        awards.append(Award(bid.plant_id, payment, bid_score))
        total_payment += payment
        awarded_capacity += index[bid.plant_id].capacity

    undersubscribed = (
        config.capacity_target is not None
        and awarded_capacity < config.capacity_target
    )
    forced_closure = None
    if undersubscribed:
        awarded_ids = {award.plant_id for award in awards}
        candidates = [p for p in plants if p.id not in awarded_ids]
        if candidates:
            forced_closure = min(
                candidates, key=lambda p: (p.commissioning_year, p.id)
            ).id

    additionality = None
    if price_path is not None and awards:
        additionality = assess_additionality_from_awards(awards, index, price_path)

    return AuctionOutcome(
        awarded=tuple(awards),
        rejected=tuple(rejections),
        total_payment=total_payment,
        awarded_capacity=awarded_capacity,
        undersubscribed=undersubscribed,
        forced_closure=forced_closure,
        additionality_fraction=additionality,
    )


def assess_additionality_from_awards(
    awards: Sequence[Award], index: dict[str, Plant], path: PricePath
) -> float:
    free_rider_capacity = sum(
        index[a.plant_id].capacity
        for a in awards
        if npv_profit(index[a.plant_id], path) <= 0
    )
    total_capacity = sum(index[a.plant_id].capacity for a in awards)
    return free_rider_capacity / total_capacity


def assess_additionality(
    outcome: AuctionOutcome, plants: Sequence[Plant], path: PricePath
) -> float:
    """Capacity-weighted share of awards that were going to close anyway."""
    if not outcome.awarded:
        raise ValueError("cannot assess additionality of an empty award set")
    return assess_additionality_from_awards(outcome.awarded, index_plants(plants), path)
