"""Plant data model and closure economics.

A coal unit is described by its physical and contractual parameters; its
opportunity cost of early closure is the discounted stream of operating
profits it forgoes, plus one-off closure costs (severance, remediation,
contract termination). Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

HOURS_PER_YEAR = 8760

CONTRACT_MERCHANT = "merchant"
CONTRACT_COST_PLUS = "cost_plus"
CONTRACT_FIXED_PRICE = "fixed_price"
CONTRACTS = (CONTRACT_MERCHANT, CONTRACT_COST_PLUS, CONTRACT_FIXED_PRICE)

REGION_UNCONSTRAINED = "unconstrained"
REGION_GRID_CRITICAL = "grid_critical"
REGIONS = (REGION_UNCONSTRAINED, REGION_GRID_CRITICAL)


@dataclass(frozen=True)
class Plant:
    """One coal-fired unit.

    Monetary fields share a single currency; `capacity` is MW,
    `emission_intensity` is tCO2 per MWh, `fixed_om_cost` is currency per
    MW-year, `closure_cost` is a one-off total for the whole plant.
    """

    id: str
    capacity: float
    commissioning_year: int = 1980
    efficiency: float = 0.38
    emission_intensity: float = 1.0
    capacity_factor: float = 0.5
    marginal_cost: float = 0.0
    fixed_om_cost: float = 0.0
    closure_cost: float = 0.0
    remaining_life_years: int = 10
    contract: str = CONTRACT_MERCHANT
    region: str = REGION_UNCONSTRAINED
    min_lead_time_months: int = 0
    has_heat_output: bool = False

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("id: must be a non-empty string")
        if self.capacity <= 0:
            raise ValueError(f"capacity: must be > 0 (got {self.capacity})")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"efficiency: must be in (0, 1] (got {self.efficiency})")
        if self.emission_intensity <= 0:
            raise ValueError(
                f"emission_intensity: must be > 0 (got {self.emission_intensity})"
            )
        if not 0.0 <= self.capacity_factor <= 1.0:
            raise ValueError(
                f"capacity_factor: must be in [0, 1] (got {self.capacity_factor})"
            )
        for field in ("marginal_cost", "fixed_om_cost", "closure_cost"):
            value = getattr(self, field)
            if value < 0:
                raise ValueError(f"{field}: must be >= 0 (got {value})")
        if self.remaining_life_years < 0:
            raise ValueError(
                f"remaining_life_years: must be >= 0 (got {self.remaining_life_years})"
            )
        if self.contract not in CONTRACTS:
            raise ValueError(f"contract: must be one of {CONTRACTS} (got {self.contract!r})")
        if self.region not in REGIONS:
            raise ValueError(f"region: must be one of {REGIONS} (got {self.region!r})")
        if self.min_lead_time_months < 0:
            raise ValueError(
                f"min_lead_time_months: must be >= 0 (got {self.min_lead_time_months})"
            )


@dataclass(frozen=True)
class PricePath:
    """Exogenous deterministic price series, one value per future year.

    Year 1 of the horizon is index 0 of both series; cashflows are
    discounted end-of-year at `discount_rate`.
    """

    electricity_price: tuple[float, ...]
    carbon_price: tuple[float, ...]
    discount_rate: float = 0.07

    def __post_init__(self) -> None:
        object.__setattr__(self, "electricity_price", tuple(self.electricity_price))
        object.__setattr__(self, "carbon_price", tuple(self.carbon_price))
        if len(self.electricity_price) != len(self.carbon_price):
            raise ValueError(
                "electricity_price and carbon_price must have equal length "
                f"(got {len(self.electricity_price)} and {len(self.carbon_price)})"
            )
        if any(p < 0 for p in self.electricity_price):
            raise ValueError("electricity_price: all values must be >= 0")
        if any(p < 0 for p in self.carbon_price):
            raise ValueError("carbon_price: all values must be >= 0")
        if self.discount_rate < 0:
            raise ValueError(f"discount_rate: must be >= 0 (got {self.discount_rate})")

    def __len__(self) -> int:
        return len(self.electricity_price)

    def from_year(self, years_elapsed: int) -> "PricePath":
        """The same path seen from `years_elapsed` years later."""
        if years_elapsed < 0:
            raise ValueError(f"years_elapsed: must be >= 0 (got {years_elapsed})")
        return PricePath(
            self.electricity_price[years_elapsed:],
            self.carbon_price[years_elapsed:],
            self.discount_rate,
        )


def annual_generation(plant: Plant) -> float:
    """Energy produced per year in MWh."""
    return plant.capacity * HOURS_PER_YEAR * plant.capacity_factor


def annual_emissions(plant: Plant) -> float:
    """CO2 emitted per year in tonnes."""
    return annual_generation(plant) * plant.emission_intensity


def continues_operating(
    plant: Plant, electricity_price: float, carbon_price: float
) -> bool:
    """Whether a fully depreciated plant keeps running at the given prices.

    With fixed costs sunk, operation continues as long as revenue net of
    fuel and carbon costs is non-negative per MWh.
    """
    if electricity_price < 0 or carbon_price < 0:
        raise ValueError("prices must be >= 0")
    margin = (
        electricity_price
        - plant.marginal_cost
        - carbon_price * plant.emission_intensity
    )
    return margin >= 0


def carbon_exposure(contract: str) -> float:
    """Fraction of the carbon cost the plant itself bears in dispatch.

    Merchant plants face the full carbon price; cost-plus contracts pass it
    through to the offtaker; fixed-price contracts insulate dispatch from
    market prices altogether.
    """
    if contract == CONTRACT_MERCHANT:
        return 1.0
    if contract in (CONTRACT_COST_PLUS, CONTRACT_FIXED_PRICE):
        return 0.0
    raise ValueError(f"contract: must be one of {CONTRACTS} (got {contract!r})")


def npv_profit(plant: Plant, path: PricePath) -> float:
    """Net present value of operating profits over the plant's horizon.

    The horizon is min(remaining life, path length). Each year the plant
    runs iff its per-MWh margin (with the carbon term scaled by the
    contract's carbon exposure) is non-negative; loss years cost nothing
    for merchant and cost-plus plants (mothballing) but still incur fixed
    O&M under a fixed-price contract. Cashflows discount end-of-year.
    """
    horizon = min(len(path), plant.remaining_life_years)
    exposure = carbon_exposure(plant.contract)
    generation = annual_generation(plant)
    fixed = plant.fixed_om_cost * plant.capacity
    rate = path.discount_rate
    total = 0.0
    for t in range(1, horizon + 1):
        margin = (
            path.electricity_price[t - 1]
            - plant.marginal_cost
            - path.carbon_price[t - 1] * plant.emission_intensity * exposure
        )
        if margin >= 0:
            cashflow = generation * margin - fixed
        elif plant.contract == CONTRACT_FIXED_PRICE:
            cashflow = -fixed
        else:
            cashflow = 0.0
        total += cashflow / (1.0 + rate) ** t
    return total


def truthful_bid(plant: Plant, path: PricePath) -> float:
    """Compensation demand that exactly covers the cost of early closure.

    Plants that would earn nothing (non-positive NPV) demand only their
    one-off closure cost.
    """
    return max(0.0, npv_profit(plant, path)) + plant.closure_cost


def aged(plant: Plant, years_elapsed: int) -> Plant:
    """The same plant `years_elapsed` years later (shorter remaining life)."""
    if years_elapsed < 0:
        raise ValueError(f"years_elapsed: must be >= 0 (got {years_elapsed})")
    remaining = max(0, plant.remaining_life_years - years_elapsed)
    return replace(plant, remaining_life_years=remaining)


def npv_profit_at(plant: Plant, path: PricePath, years_elapsed: int) -> float:
    """NPV of remaining profits as seen `years_elapsed` years into the path."""
    return npv_profit(aged(plant, years_elapsed), path.from_year(years_elapsed))


def truthful_bid_at(plant: Plant, path: PricePath, years_elapsed: int) -> float:
    """Truthful compensation demand as seen `years_elapsed` years in."""
    return max(0.0, npv_profit_at(plant, path, years_elapsed)) + plant.closure_cost
