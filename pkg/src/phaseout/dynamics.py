"""Multi-round program simulation and program-level policy instruments.

Rounds run in calendar order under a declining-cap schedule; after the
end-rule year every plant still open closes without compensation. Bidders
either bid their truthful cost in every round they can enter, or play an
iterated best response over (round choice, bid level) with perfect
foresight of prices, caps, and budgets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .auction import AuctionConfig, AuctionOutcome, Bid, clear_auction, index_plants
from .fleet import (
    REGION_GRID_CRITICAL,
    Plant,
    PricePath,
    annual_emissions,
    npv_profit_at,
    truthful_bid,
    truthful_bid_at,
)

MODE_TRUTHFUL_NOW = "truthful_now"
MODE_STRATEGIC = "strategic"
POLICY_MODES = (MODE_TRUTHFUL_NOW, MODE_STRATEGIC)

STATE_COMPENSATED = "compensated"
STATE_FORCED = "forced"
STATE_UNCOMPENSATED = "uncompensated"
STATE_RE_ENTERED = "re_entered"

UTILITY_EPS = 1e-9


@dataclass(frozen=True)
class Round:
    year: int
    config: AuctionConfig


@dataclass(frozen=True)
class RoundSchedule:
    """Auction rounds plus the end rule and the final phaseout deadline."""

    rounds: tuple[Round, ...]
    end_rule_year: int
    final_phaseout_year: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounds", tuple(self.rounds))
        if not self.rounds:
            raise ValueError("rounds: must not be empty")
        years = [r.year for r in self.rounds]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise ValueError("rounds: years must be strictly increasing")
        if years[-1] >= self.end_rule_year:
            raise ValueError("end_rule_year: must be after the last round year")
        if self.end_rule_year > self.final_phaseout_year:
            raise ValueError("final_phaseout_year: must be >= end_rule_year")
        caps = [r.config.bid_cap_per_mw for r in self.rounds if r.config.bid_cap_per_mw is not None]
        if any(b > a for a, b in zip(caps, caps[1:])):
            raise ValueError("bid caps must be weakly decreasing across rounds")

    @property
    def start_year(self) -> int:
        return self.rounds[0].year


@dataclass(frozen=True)
class BidderPolicy:
    """How plants bid across rounds; foresight is perfect in both modes."""

    mode: str = MODE_TRUTHFUL_NOW
    bid_grid_step: float = 1.0
    max_iterations: int = 100

    def __post_init__(self) -> None:
        if self.mode not in POLICY_MODES:
            raise ValueError(f"mode: must be one of {POLICY_MODES} (got {self.mode!r})")
        if self.bid_grid_step <= 0:
            raise ValueError(f"bid_grid_step: must be > 0 (got {self.bid_grid_step})")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations: must be >= 1 (got {self.max_iterations})")


@dataclass(frozen=True)
class PlantFate:
    plant_id: str
    state: str
    year: int
    payment: float


@dataclass(frozen=True)
class ProgramOutcome:
    rounds: tuple[tuple[int, AuctionOutcome], ...]
    fates: tuple[PlantFate, ...]
    uncompensated_closures: tuple[str, ...]
    total_program_payment: float
    start_year: int
    converged: bool = True
    re_entries: tuple[str, ...] = ()


@dataclass(frozen=True)
class NegotiationResult:
    payments: Mapping[str, float]
    rents: Mapping[str, float]
    total_payment: float
    total_rent: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "payments", dict(self.payments))
        object.__setattr__(self, "rents", dict(self.rents))


@dataclass(frozen=True)
class ShockDetail:
    plant_id: str
    capacity: float
    payment: float
    shocked_npv: float
    re_enters: bool


@dataclass(frozen=True)
class ShockResult:
    re_entries: tuple[str, ...]
    re_entry_capacity: float
    procured_capacity: float
    capacity_share: float
    details: tuple[ShockDetail, ...] = ()


# A strategy profile maps plant id -> None (abstain) or (round index, bid/MW).
Profile = dict[str, "tuple[int, float] | None"]


def simulate_program(
    plants: Sequence[Plant],
    schedule: RoundSchedule,
    policy: BidderPolicy,
    path: PricePath,
) -> ProgramOutcome:
    """Run the full multi-round program.

    Truthful mode submits every open plant's time-shifted truthful cost in
    every round; ineligible or over-cap bids are simply rejected and the
    plant stays open. Strategic mode starts from all-truthful first-round
    participation and cycles best responses over (round, bid) options until
    a fixed point or the iteration bound; plants never bid below their
    truthful cost and never above the round cap. Whatever is still open
    after the last round closes unpaid at the end-rule year.
    """
    index = index_plants(plants)
    if policy.mode == MODE_TRUTHFUL_NOW:
        return _simulate_truthful(plants, schedule, path)

    options = {p.id: _bid_options(p, schedule, path, policy) for p in plants}
    profile: Profile = {}
    for plant in plants:
        choices = options[plant.id]
        profile[plant.id] = choices[0] if choices else None

    converged = False
    plant_order = sorted(index)
    for _ in range(policy.max_iterations):
        changed = False
        for pid in plant_order:
            current = profile[pid]
            current_utility = _profile_utility(plants, schedule, path, profile, pid)
            best_option, best_utility = current, current_utility
            for option in _candidate_options(options[pid]):
                if option == current:
                    continue
                profile[pid] = option
                utility = _profile_utility(plants, schedule, path, profile, pid)
                if utility > best_utility + UTILITY_EPS:
                    best_option, best_utility = option, utility
            profile[pid] = best_option
            if best_option != current:
                changed = True
        if not changed:
            converged = True
            break

    outcome = _run_rounds(plants, schedule, path, profile=profile)
    return ProgramOutcome(
        rounds=outcome.rounds,
        fates=outcome.fates,
        uncompensated_closures=outcome.uncompensated_closures,
        total_program_payment=outcome.total_program_payment,
        start_year=outcome.start_year,
        converged=converged,
    )


def _simulate_truthful(
    plants: Sequence[Plant], schedule: RoundSchedule, path: PricePath
) -> ProgramOutcome:
    return _run_rounds(plants, schedule, path, profile=None)


def _run_rounds(
    plants: Sequence[Plant],
    schedule: RoundSchedule,
    path: PricePath,
    profile: Profile | None,
) -> ProgramOutcome:
    """Shared round loop; profile=None means truthful bidding everywhere."""
    index = index_plants(plants)
    start = schedule.start_year
    open_ids = set(index)
    round_outcomes: list[tuple[int, AuctionOutcome]] = []
    fates: list[PlantFate] = []
    total_payment = 0.0

    for round_index, auction_round in enumerate(schedule.rounds):
        elapsed = auction_round.year - start
        bids: list[Bid] = []
        for pid in sorted(open_ids):
            plant = index[pid]
            if profile is None:
                per_mw = truthful_bid_at(plant, path, elapsed) / plant.capacity
                bids.append(Bid(pid, per_mw))
            else:
                choice = profile[pid]
                if choice is not None and choice[0] == round_index:
                    bids.append(Bid(pid, choice[1]))
        open_plants = [index[pid] for pid in sorted(open_ids)]
        outcome = clear_auction(open_plants, bids, auction_round.config, path.from_year(elapsed))
        round_outcomes.append((auction_round.year, outcome))
        for award in outcome.awarded:
            fates.append(
                PlantFate(award.plant_id, STATE_COMPENSATED, auction_round.year, award.payment_total)
            )
            open_ids.discard(award.plant_id)
            total_payment += award.payment_total
        if outcome.forced_closure is not None:
            fates.append(
                PlantFate(outcome.forced_closure, STATE_FORCED, auction_round.year, 0.0)
            )
            open_ids.discard(outcome.forced_closure)

    for pid in sorted(open_ids):
        fates.append(PlantFate(pid, STATE_UNCOMPENSATED, schedule.end_rule_year, 0.0))
    uncompensated = tuple(sorted(open_ids))

    return ProgramOutcome(
        rounds=tuple(round_outcomes),
        fates=tuple(fates),
        uncompensated_closures=uncompensated,
        total_program_payment=total_payment,
        start_year=start,
    )


def _bid_options(
    plant: Plant, schedule: RoundSchedule, path: PricePath, policy: BidderPolicy
) -> list[tuple[int, float]]:
    """Admissible (round, bid/MW) pairs: eligible rounds, truthful-cost floor,
    cap (or budget-implied) ceiling, on the policy's bid grid."""
    options: list[tuple[int, float]] = []
    start = schedule.start_year
    for round_index, auction_round in enumerate(schedule.rounds):
        config = auction_round.config
        if plant.min_lead_time_months > config.lead_time_months:
            continue
        if config.exclude_grid_critical and plant.region == REGION_GRID_CRITICAL:
            continue
        cost_per_mw = (
            truthful_bid_at(plant, path, auction_round.year - start) / plant.capacity
        )
        ceiling = config.bid_cap_per_mw
        if ceiling is None and config.budget is not None:
            ceiling = config.budget / plant.capacity
        if ceiling is None:
            ceiling = cost_per_mw  # nothing bounds rent extraction; stay truthful
        if cost_per_mw > ceiling:
            continue
        k = 0
        while True:
            level = cost_per_mw + k * policy.bid_grid_step
            if level >= ceiling:
                break
            options.append((round_index, level))
            k += 1
        options.append((round_index, ceiling))
    return options


def _candidate_options(
    options: Sequence[tuple[int, float]],
) -> list[tuple[int, float] | None]:
    return [None, *options]


def _profile_utility(
    plants: Sequence[Plant],
    schedule: RoundSchedule,
    path: PricePath,
    profile: Profile,
    pid: str,
) -> float:
    """Payoff of `pid` under the profile, normalized so that every
    non-winning terminal state (losing, abstaining, forced or end-rule
    closure) is worth zero."""
    outcome = _run_rounds(plants, schedule, path, profile)
    index = index_plants(plants)
    start = schedule.start_year
    for fate in outcome.fates:
        if fate.plant_id == pid and fate.state == STATE_COMPENSATED:
            cost = truthful_bid_at(index[pid], path, fate.year - start)
            return fate.payment - cost
    return 0.0


def negotiation_benchmark(
    plants: Sequence[Plant],
    path: PricePath,
    wtp_per_plant: float | None = None,
    wtp_per_mw: float | None = None,
) -> NegotiationResult:
    """Bilateral-negotiation counterfactual under asymmetric information.

    A rational owner claims exactly the government's willingness to pay, so
    each plant is paid its wtp; the informational rent is the gap between
    that payment and the plant's truthful closure cost.
    """
    if (wtp_per_plant is None) == (wtp_per_mw is None):
        raise ValueError("set exactly one of wtp_per_plant and wtp_per_mw")
    if (wtp_per_plant is not None and wtp_per_plant < 0) or (
        wtp_per_mw is not None and wtp_per_mw < 0
    ):
        raise ValueError("willingness to pay must be >= 0")
    payments: dict[str, float] = {}
    rents: dict[str, float] = {}
    for plant in sorted(plants, key=lambda p: p.id):
        wtp = wtp_per_plant if wtp_per_plant is not None else wtp_per_mw * plant.capacity
        payments[plant.id] = wtp
        rents[plant.id] = wtp - truthful_bid(plant, path)
    return NegotiationResult(
        payments=payments,
        rents=rents,
        total_payment=sum(payments.values()),
        total_rent=sum(rents.values()),
    )


def polluter_levy(
    plants: Sequence[Plant], total_compensation: float, unit: float = 0.01
) -> dict[str, float]:
    """Split a compensation bill across remaining plants by emissions share.

    Levies are quantized to `unit` (default one cent) and corrected by
    largest remainder so that they add up to the bill exactly in units;
    ties go to the plant id that sorts first.
    """
    if total_compensation < 0:
        raise ValueError(f"total_compensation: must be >= 0 (got {total_compensation})")
    if unit <= 0:
        raise ValueError(f"unit: must be > 0 (got {unit})")
    ordered = sorted(plants, key=lambda p: p.id)
    if not ordered:
        raise ValueError("at least one remaining plant is required")
    emissions = {p.id: annual_emissions(p) for p in ordered}
    total_emissions = sum(emissions.values())
    if total_emissions == 0:
        raise ValueError("levy is undefined when all remaining plants have zero emissions")
    total_units = round(total_compensation / unit)
    floors: dict[str, int] = {}
    remainders: list[tuple[float, str]] = []
    for pid, em in emissions.items():
        exact = total_units * em / total_emissions
        floors[pid] = int(exact)
        remainders.append((exact - int(exact), pid))
    leftover = total_units - sum(floors.values())
    remainders.sort(key=lambda item: (-item[0], item[1]))
    for _, pid in remainders[:leftover]:
        floors[pid] += 1
    return {pid: floors[pid] * unit for pid in floors}


def scarcity_shock(
    outcome: ProgramOutcome, plants: Sequence[Plant], shocked_path: PricePath
) -> ShockResult:
    """Which compensated closures are regretted under a shocked price path.

    A plant re-enters iff the NPV it would now earn, evaluated from its
    closure year, strictly exceeds the compensation it received. Capacity
    share is relative to total procured (compensated) capacity.
    """
    index = index_plants(plants)
    details: list[ShockDetail] = []
    procured = 0.0
    re_capacity = 0.0
    compensated = sorted(
        (f for f in outcome.fates if f.state == STATE_COMPENSATED),
        key=lambda f: f.plant_id,
    )
    for fate in compensated:
        plant = index[fate.plant_id]
        elapsed = fate.year - outcome.start_year
        shocked_npv = npv_profit_at(plant, shocked_path, elapsed)
        re_enters = shocked_npv > fate.payment
        details.append(
            ShockDetail(fate.plant_id, plant.capacity, fate.payment, shocked_npv, re_enters)
        )
        procured += plant.capacity
        if re_enters:
            re_capacity += plant.capacity
    re_entries = tuple(d.plant_id for d in details if d.re_enters)
    share = re_capacity / procured if procured > 0 else 0.0
    return ShockResult(
        re_entries=re_entries,
        re_entry_capacity=re_capacity,
        procured_capacity=procured,
        capacity_share=share,
        details=tuple(details),
    )
