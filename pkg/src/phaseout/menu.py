"""Menu-bid combinatorial clearing.

A menu bid quotes a separate compensation demand for each admissible
closure year. Clearing picks at most one closure date per plant so that
cumulative retired capacity stays on or above a target path at minimum
total compensation. An exact branch-and-bound solver and a year-by-year
greedy baseline are provided; both signal infeasibility explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .fleet import Plant
from .auction import index_plants

COST_TIE_EPS = 1e-9


@dataclass(frozen=True)
class MenuBid:
    """Compensation demand per candidate closure year (totals, not per MW)."""

    plant_id: str
    offers: Mapping[int, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "offers", dict(self.offers))
        if not self.offers:
            raise ValueError(f"offers: menu for plant {self.plant_id!r} is empty")
        for year, cost in self.offers.items():
            if cost < 0:
                raise ValueError(
                    f"offers[{year}]: must be >= 0 (got {cost}) for plant {self.plant_id!r}"
                )


@dataclass(frozen=True)
class TargetPath:
    """Minimum cumulative closed capacity required by each year."""

    cumulative_closed_capacity_min: Mapping[int, float]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "cumulative_closed_capacity_min",
            dict(self.cumulative_closed_capacity_min),
        )
        if not self.cumulative_closed_capacity_min:
            raise ValueError("cumulative_closed_capacity_min: must not be empty")
        previous = None
        for year in self.years:
            value = self.cumulative_closed_capacity_min[year]
            if value < 0:
                raise ValueError(
                    f"cumulative_closed_capacity_min[{year}]: must be >= 0 (got {value})"
                )
            if previous is not None and value < previous:
                raise ValueError(
                    "cumulative_closed_capacity_min: must be non-decreasing in year"
                )
            previous = value

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted(self.cumulative_closed_capacity_min))


@dataclass(frozen=True)
class MenuAssignment:
    """One closure year per retired plant; plants absent simply stay open."""

    closures: Mapping[str, int]
    total_compensation: float
    feasible: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "closures", dict(self.closures))


@dataclass(frozen=True)
class LeadTimeCoverage:
    """Plants a single-round lead time shuts out but a menu lets back in."""

    gained: tuple[str, ...]
    excluded: tuple[str, ...]
    fraction_gained: float


def _prepare(
    plants: Sequence[Plant], menu_bids: Sequence[MenuBid], target: TargetPath
) -> tuple[list[tuple[str, float, list[tuple[int, float]]]], tuple[int, ...], list[float]]:
    """Validate inputs and return (plant_id, capacity, offers) with path data."""
    index = index_plants(plants)
    years = target.years
    year_set = set(years)
    seen: set[str] = set()
    entries: list[tuple[str, float, list[tuple[int, float]]]] = []
    for bid in menu_bids:
        plant = index.get(bid.plant_id)
        if plant is None:
            raise ValueError(f"menu bid references unknown plant id {bid.plant_id!r}")
        if bid.plant_id in seen:
            raise ValueError(f"multiple menu bids for plant id {bid.plant_id!r}")
        seen.add(bid.plant_id)
        for year in bid.offers:
            if year not in year_set:
                raise ValueError(
                    f"offers[{year}]: year outside the target path window "
                    f"{years[0]}..{years[-1]} for plant {bid.plant_id!r}"
                )
        offers = sorted(bid.offers.items())
        entries.append((bid.plant_id, plant.capacity, offers))
    entries.sort(key=lambda e: e[0])
    required = [target.cumulative_closed_capacity_min[y] for y in years]
    return entries, years, required


def _infeasible() -> MenuAssignment:
    return MenuAssignment(closures={}, total_compensation=0.0, feasible=False)


def clear_menu_exact(
    plants: Sequence[Plant], menu_bids: Sequence[MenuBid], target: TargetPath
) -> MenuAssignment:
    """Minimum-cost closure assignment satisfying the target path.

    Depth-first branch and bound over plants: each plant either closes at
    one of its offered years or stays open. Branches are pruned when the
    accumulated cost can no longer beat the incumbent or when even closing
    every remaining plant at its earliest offer misses the path. Options
    are explored years-ascending with "stay open" last, so among cost-tied
    optima the first one found prefers earlier closures of lexically
    earlier plants, giving a deterministic result.
    """
    entries, years, required = _prepare(plants, menu_bids, target)
    n_years = len(years)
    n_plants = len(entries)

    # suffix_max_cum[i][k]: capacity closable by year k using plants i.. at
    # their earliest offers; used for feasibility pruning.
    suffix_max_cum = [[0.0] * n_years for _ in range(n_plants + 1)]
    for i in range(n_plants - 1, -1, -1):
        _pid, capacity, offers = entries[i]
        earliest = offers[0][0]
        for k in range(n_years):
            contribution = capacity if earliest <= years[k] else 0.0
            suffix_max_cum[i][k] = suffix_max_cum[i + 1][k] + contribution

    best_cost = math.inf
    best_closures: dict[str, int] | None = None
    cum = [0.0] * n_years  # capacity closed so far, cumulative by year index
    chosen: list[tuple[str, int] | None] = [None] * n_plants

    def remaining_can_satisfy(i: int) -> bool:
        for k in range(n_years):
            if cum[k] + suffix_max_cum[i][k] < required[k]:
                return False
        return True

    def descend(i: int, cost: float) -> None:
        nonlocal best_cost, best_closures
        if cost >= best_cost - COST_TIE_EPS:
            return
        if not remaining_can_satisfy(i):
            return
        if i == n_plants:
            best_cost = cost
            best_closures = dict(item for item in chosen if item is not None)
            return
        pid, capacity, offers = entries[i]
        for year, offer_cost in offers:
            start = _first_year_index(years, year)
            for k in range(start, n_years):
                cum[k] += capacity
            chosen[i] = (pid, year)
            descend(i + 1, cost + offer_cost)
            chosen[i] = None
            for k in range(start, n_years):
                cum[k] -= capacity
        descend(i + 1, cost)  # stay open

    descend(0, 0.0)
    if best_closures is None:
        return _infeasible()
    return MenuAssignment(
        closures=best_closures, total_compensation=best_cost, feasible=True
    )


def _first_year_index(years: tuple[int, ...], closure_year: int) -> int:
    """Index of the first path year the closure counts toward."""
    for k, y in enumerate(years):
        if closure_year <= y:
            return k
    return len(years)


def clear_menu_greedy(
    plants: Sequence[Plant], menu_bids: Sequence[MenuBid], target: TargetPath
) -> MenuAssignment:
    """Year-by-year greedy baseline.

    Each path year's shortfall is covered by the open plant with the
    cheapest per-MW offer usable by that year (ties: lower total cost,
    earlier year, plant id). Feasible whenever the exact solver is, since
    the path is cumulative, but the total cost can only match or exceed
    the exact optimum.
    """
    entries, years, required = _prepare(plants, menu_bids, target)
    open_entries = {pid: (capacity, offers) for pid, capacity, offers in entries}
    closures: dict[str, int] = {}
    total_cost = 0.0
    cum_capacity = 0.0
    for k, year in enumerate(years):
        while cum_capacity < required[k]:
            candidates = []
            for pid, (capacity, offers) in open_entries.items():
                usable = [(cost, y) for y, cost in offers if y <= year]
                if not usable:
                    continue
                cost, best_year = min(usable)
                candidates.append((cost / capacity, cost, best_year, pid, capacity))
            if not candidates:
                return _infeasible()
            _, cost, best_year, pid, capacity = min(candidates)
            closures[pid] = best_year
            total_cost += cost
            cum_capacity += capacity
            del open_entries[pid]
    return MenuAssignment(
        closures=closures, total_compensation=total_cost, feasible=True
    )


def lead_time_coverage(
    plants: Sequence[Plant],
    menu_bids: Sequence[MenuBid],
    auction_year: int,
    single_round_lead_time_months: int,
) -> LeadTimeCoverage:
    """Participation gained by letting long-lead plants pick later dates.

    A plant is excluded from the single round if its minimum lead time
    exceeds the round's; it is gained if it nevertheless holds a menu
    offer far enough after `auction_year` to honour its own lead time.
    """
    offers_by_plant = {bid.plant_id: bid.offers for bid in menu_bids}
    excluded: list[str] = []
    gained: list[str] = []
    for plant in sorted(plants, key=lambda p: p.id):
        if plant.min_lead_time_months <= single_round_lead_time_months:
            continue
        excluded.append(plant.id)
        offers = offers_by_plant.get(plant.id, {})
        if any(
            (year - auction_year) * 12 >= plant.min_lead_time_months for year in offers
        ):
            gained.append(plant.id)
    fraction = len(gained) / len(plants) if plants else 0.0
    return LeadTimeCoverage(
        gained=tuple(gained), excluded=tuple(excluded), fraction_gained=fraction
    )
