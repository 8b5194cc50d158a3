"""Partial-equilibrium side-models of a coal phaseout.

Covers two-region leakage under a shared supply curve, the emissions-cap
waterbed with allowance cancellation, a cap-and-trade market for tonnage
of coal with grade exchange rates, the social-optimum wedge, and the
ownership/competition strategy recommender. All curves are linear and all
schedules are step functions, so every equilibrium here is closed-form or
solvable by sorting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

PRICE_DOWN = "down"
PRICE_UNCHANGED = "unchanged"
PRICE_UP = "up"

ALLOCATION_AUCTIONED = "auctioned"
ALLOCATION_GRANDFATHERED = "grandfathered"
ALLOCATION_MODES = (ALLOCATION_AUCTIONED, ALLOCATION_GRANDFATHERED)

OWNERSHIP_PUBLIC = "public"
OWNERSHIP_PRIVATE = "private"
COMPETITION_SUFFICIENT = "sufficient"
COMPETITION_INSUFFICIENT = "insufficient"

STRATEGY_WRITE_OFF = "write-off / mandate"
STRATEGY_AUCTION = "auction-based compensation"
STRATEGY_NEGOTIATED = "negotiated compensation or scrappage-and-reinvest incentive"

_GAIN_EPS = 1e-12
_MAX_TRADES = 100_000


@dataclass(frozen=True)
class LinearCurve:
    """Inverse curve p = intercept + slope * q; quantities clamp at zero."""

    intercept: float
    slope: float

    def quantity_at(self, price: float) -> float:
        if self.slope == 0:
            raise ValueError("a flat curve has no quantity mapping")
        return max(0.0, (price - self.intercept) / self.slope)


@dataclass(frozen=True)
class LeakageResult:
    """Pre/post equilibrium of the two-region coal market (global price p,
    global quantity q1->q2, non-policy-region quantity q3->q4)."""

    p1: float
    p2: float
    q1: float
    q2: float
    q3: float
    q4: float
    leakage: float
    net_global_reduction: float
    degenerate: bool = False


@dataclass(frozen=True)
class EtsResult:
    cap: float
    coal_demand_reduction: float
    cancelled: float
    eua_price_direction: str
    total_emissions: float


@dataclass(frozen=True)
class SocialOptimum:
    q_private: float
    q_social: float
    phaseout_rational: bool


@dataclass(frozen=True)
class ValueSchedule:
    """Weakly decreasing marginal value of coal tonnage for one plant."""

    plant_id: str
    steps: tuple[tuple[float, float], ...]  # (quantity, value per tonne)

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple((float(q), float(v)) for q, v in self.steps))
        if not self.steps:
            raise ValueError(f"steps: schedule for plant {self.plant_id!r} is empty")
        previous = None
        for quantity, value in self.steps:
            if quantity <= 0:
                raise ValueError(
                    f"steps: quantities must be > 0 (got {quantity}) for plant {self.plant_id!r}"
                )
            if previous is not None and value > previous:
                raise ValueError(
                    f"steps: marginal values must be weakly decreasing for plant {self.plant_id!r}"
                )
            previous = value

    @property
    def total_volume(self) -> float:
        return sum(q for q, _ in self.steps)

    def boundaries(self) -> list[tuple[float, float, float]]:
        """(lower, upper, value) per step in cumulative tonnes."""
        out = []
        position = 0.0
        for quantity, value in self.steps:
            out.append((position, position + quantity, value))
            position += quantity
        return out

    def value_of(self, held: float) -> float:
        """Total value of the best `held` tonnes."""
        total = 0.0
        for lower, upper, value in self.boundaries():
            if held <= lower:
                break
            total += (min(held, upper) - lower) * value
        return total


@dataclass(frozen=True)
class Trade:
    seller: str
    buyer: str
    tonnes: float
    price: float


@dataclass(frozen=True)
class TonnageResult:
    permit_price: float
    allocations: Mapping[str, float]
    exits: tuple[str, ...]
    total_value: float
    trades: tuple[Trade, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "allocations", dict(self.allocations))


def leakage_equilibrium(
    global_supply: LinearCurve,
    demand_policy_region: LinearCurve,
    demand_other: LinearCurve,
    demand_shift: float = 0.0,
    supply_shift: float = 0.0,
) -> LeakageResult:
    """Two-region equilibrium before and after a demand-side coal policy.

    The policy shifts the policy region's demand left by `demand_shift`
    tonnes; `supply_shift` moves the shared supply curve left. Both
    equilibria are solved in closed form over the active (unclamped)
    demand set. If either equilibrium has no positive-price, positive-
    quantity intersection the result is flagged degenerate with zeros.
    """
    if global_supply.slope <= 0:
        raise ValueError("global_supply: slope must be > 0")
    if demand_policy_region.slope >= 0 or demand_other.slope >= 0:
        raise ValueError("demand curves: slope must be < 0")
    if demand_shift < 0 or supply_shift < 0:
        raise ValueError("shifts must be >= 0")

    pre = _solve_linear_market(
        global_supply, 0.0, [(demand_policy_region, 0.0), (demand_other, 0.0)]
    )
    post = _solve_linear_market(
        global_supply,
        supply_shift,
        [(demand_policy_region, demand_shift), (demand_other, 0.0)],
    )
    if pre is None or post is None:
        return LeakageResult(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, degenerate=True)
    p1, quantities_pre = pre
    p2, quantities_post = post
    q1 = sum(quantities_pre)
    q2 = sum(quantities_post)
    q3 = quantities_pre[1]
    q4 = quantities_post[1]
    return LeakageResult(
        p1=p1,
        p2=p2,
        q1=q1,
        q2=q2,
        q3=q3,
        q4=q4,
        leakage=q4 - q3,
        net_global_reduction=q1 - q2,
    )


def _solve_linear_market(
    supply: LinearCurve,
    supply_shift: float,
    demands: list[tuple[LinearCurve, float]],
) -> tuple[float, list[float]] | None:
    """Price and per-demand quantities where shifted demand meets shifted
    supply, or None when no positive equilibrium exists.

    Each demand clamps to zero above its choke price, so the true active
    set is one of the nested sets obtained by admitting demands in choke-
    price order. Trying each nested set and keeping the self-consistent
    solution is exact (aggregate demand falls and supply rises in price,
    so at most one candidate is consistent).
    """
    eps = 1e-12

    def shifted_quantity(i: int, price: float) -> float:
        curve, shift = demands[i]
        return (price - curve.intercept) / curve.slope - shift

    # Choke price of shifted demand i: price at which its quantity hits 0.
    chokes = [
        (demands[i][0].intercept + demands[i][0].slope * demands[i][1], i)
        for i in range(len(demands))
    ]
    chokes.sort(key=lambda item: (-item[0], item[1]))
    for n_active in range(1, len(demands) + 1):
        active = [i for _, i in chokes[:n_active]]
        numerator = -supply.intercept / supply.slope - supply_shift
        denominator = -1.0 / supply.slope
        for i in active:
            curve, shift = demands[i]
            numerator += curve.intercept / curve.slope + shift
            denominator += 1.0 / curve.slope
        price = numerator / denominator
        if any(shifted_quantity(i, price) < -eps for i in active):
            continue
        inactive = [i for i in range(len(demands)) if i not in active]
        if any(shifted_quantity(i, price) > eps for i in inactive):
            continue
        quantities = [
            max(0.0, shifted_quantity(i, price)) if i in active else 0.0
            for i in range(len(demands))
        ]
        supply_quantity = (price - supply.intercept) / supply.slope - supply_shift
        if price <= 0 or supply_quantity <= 0:
            return None
        return price, quantities
    return None


def waterbed(
    cap: float, baseline_demand: float, coal_demand_reduction: float, cancelled: float
) -> EtsResult:
    """Total ETS emissions after a coal closure, with optional cancellation.

    Under a binding absolute cap a demand reduction alone lowers the
    allowance price but not total emissions; cancelling allowances tightens
    the cap one-for-one.
    """
    for name, value in (
        ("cap", cap),
        ("baseline_demand", baseline_demand),
        ("coal_demand_reduction", coal_demand_reduction),
        ("cancelled", cancelled),
    ):
        if value < 0:
            raise ValueError(f"{name}: must be >= 0 (got {value})")
    if baseline_demand < cap:
        raise ValueError("baseline_demand must be >= cap (cap not binding)")
    if cancelled > cap:
        raise ValueError("cancelled: cannot exceed the cap")
    total = min(cap - cancelled, baseline_demand - coal_demand_reduction)
    if coal_demand_reduction > cancelled:
        direction = PRICE_DOWN
    elif cancelled > coal_demand_reduction:
        direction = PRICE_UP
    else:
        direction = PRICE_UNCHANGED
    return EtsResult(
        cap=cap,
        coal_demand_reduction=coal_demand_reduction,
        cancelled=cancelled,
        eua_price_direction=direction,
        total_emissions=total,
    )


def social_optimum(
    private_mb: LinearCurve, private_mc: float, external_cost: float
) -> SocialOptimum:
    """Privately and socially optimal coal quantities under a cost wedge.

    A phaseout target is economically rational exactly when marginal
    external costs push the socially optimal quantity to zero.
    """
    if private_mb.slope >= 0:
        raise ValueError("private_mb: slope must be < 0 (downward-sloping benefit)")
    q_private = max(0.0, (private_mc - private_mb.intercept) / private_mb.slope)
    q_social = max(
        0.0, (private_mc + external_cost - private_mb.intercept) / private_mb.slope
    )
    return SocialOptimum(
        q_private=q_private, q_social=q_social, phaseout_rational=q_social == 0.0
    )


def grade_exchange_rate(grade_a_carbon: float, grade_b_carbon: float) -> float:
    """Tonnes of grade B worth one permit-tonne of grade A, by carbon content."""
    if grade_a_carbon <= 0 or grade_b_carbon <= 0:
        raise ValueError("carbon contents must be > 0")
    return grade_a_carbon / grade_b_carbon


def tonnage_market(
    schedules: Sequence[ValueSchedule],
    cap: float,
    allocation: str = ALLOCATION_AUCTIONED,
    trading_enabled: bool = True,
) -> TonnageResult:
    """Allocate a capped tonnage of coal across plants.

    Auctioning hands permits to the highest marginal values; the permit
    price is the highest displaced marginal value (zero when the cap does
    not bind). Grandfathering starts from a pro-rata allocation; with
    trading enabled, bilateral trades between the best-gaining pair run
    until no pair can gain, which lands on the auctioned allocation. With
    trading disabled the pro-rata allocation (and its value loss) stands.
    """
    if cap < 0:
        raise ValueError(f"cap: must be >= 0 (got {cap})")
    if allocation not in ALLOCATION_MODES:
        raise ValueError(
            f"allocation: must be one of {ALLOCATION_MODES} (got {allocation!r})"
        )
    ordered = sorted(schedules, key=lambda s: s.plant_id)
    if len({s.plant_id for s in ordered}) != len(ordered):
        raise ValueError("duplicate plant ids in schedules")
    if not ordered:
        raise ValueError("at least one schedule is required")

    trades: tuple[Trade, ...] = ()
    if allocation == ALLOCATION_AUCTIONED:
        allocations = _auctioned_allocation(ordered, cap)
    else:
        total_volume = sum(s.total_volume for s in ordered)
        allocations = {
            s.plant_id: cap * s.total_volume / total_volume for s in ordered
        }
        for pid in allocations:
            allocations[pid] = min(allocations[pid], _volume_of(ordered, pid))
        if trading_enabled:
            allocations, trades = _trade_to_exhaustion(ordered, allocations)

    price = _displaced_price(ordered, allocations)
    total_value = sum(s.value_of(allocations[s.plant_id]) for s in ordered)
    exits = tuple(
        s.plant_id for s in ordered if allocations[s.plant_id] <= _GAIN_EPS
    )
    return TonnageResult(
        permit_price=price,
        allocations=allocations,
        exits=exits,
        total_value=total_value,
        trades=trades,
    )


def _volume_of(schedules: Sequence[ValueSchedule], pid: str) -> float:
    for s in schedules:
        if s.plant_id == pid:
            return s.total_volume
    raise KeyError(pid)


def _auctioned_allocation(
    schedules: Sequence[ValueSchedule], cap: float
) -> dict[str, float]:
    units: list[tuple[float, str, float]] = []  # (value, plant_id, quantity)
    for schedule in schedules:
        for quantity, value in schedule.steps:
            units.append((value, schedule.plant_id, quantity))
    units.sort(key=lambda u: (-u[0], u[1]))
    allocations = {s.plant_id: 0.0 for s in schedules}
    remaining = cap
    for value, pid, quantity in units:
        if remaining <= 0:
            break
        take = min(quantity, remaining)
        allocations[pid] += take
        remaining -= take
    return allocations


def _marginal_buy(schedule: ValueSchedule, held: float) -> tuple[float, float] | None:
    """(value, block size) of the next tonne beyond `held`, if any."""
    for _lower, upper, value in schedule.boundaries():
        if held < upper - _GAIN_EPS:
            return value, upper - held
    return None


def _marginal_sell(schedule: ValueSchedule, held: float) -> tuple[float, float] | None:
    """(value, block size) of the last tonne currently held, if any."""
    if held <= _GAIN_EPS:
        return None
    for lower, upper, value in reversed(schedule.boundaries()):
        if held > lower + _GAIN_EPS:
            return value, held - lower
    return None


def _trade_to_exhaustion(
    schedules: Sequence[ValueSchedule], allocations: dict[str, float]
) -> tuple[dict[str, float], tuple[Trade, ...]]:
    by_id = {s.plant_id: s for s in schedules}
    holdings = dict(allocations)
    trades: list[Trade] = []
    for _ in range(_MAX_TRADES):
        best_buyer = None  # (-value, plant_id, block)
        best_seller = None  # (value, plant_id, block)
        for pid in sorted(holdings):
            buy = _marginal_buy(by_id[pid], holdings[pid])
            if buy is not None and (best_buyer is None or (-buy[0], pid) < best_buyer[:2]):
                best_buyer = (-buy[0], pid, buy[1])
            sell = _marginal_sell(by_id[pid], holdings[pid])
            if sell is not None and (best_seller is None or (sell[0], pid) < best_seller[:2]):
                best_seller = (sell[0], pid, sell[1])
        if best_buyer is None or best_seller is None:
            break
        buy_value, buyer, buy_block = -best_buyer[0], best_buyer[1], best_buyer[2]
        sell_value, seller, sell_block = best_seller
        if buyer == seller or buy_value <= sell_value + _GAIN_EPS:
            break
        quantity = min(buy_block, sell_block)
        price = (buy_value + sell_value) / 2.0
        holdings[seller] -= quantity
        holdings[buyer] += quantity
        trades.append(Trade(seller=seller, buyer=buyer, tonnes=quantity, price=price))
    else:
        raise RuntimeError("permit trading failed to terminate")
    return holdings, tuple(trades)


def _displaced_price(
    schedules: Sequence[ValueSchedule], allocations: Mapping[str, float]
) -> float:
    """Highest marginal value left unserved; zero when permits are not scarce."""
    best = 0.0
    for schedule in schedules:
        unserved = _marginal_buy(schedule, allocations[schedule.plant_id])
        if unserved is not None:
            best = max(best, unserved[0])
    return best


def recommend_strategy(ownership: str, competition: str) -> str:
    """Phaseout strategy suited to the ownership and competition context."""
    if ownership not in (OWNERSHIP_PUBLIC, OWNERSHIP_PRIVATE):
        raise ValueError(
            f"ownership: must be 'public' or 'private' (got {ownership!r})"
        )
    if competition not in (COMPETITION_SUFFICIENT, COMPETITION_INSUFFICIENT):
        raise ValueError(
            f"competition: must be 'sufficient' or 'insufficient' (got {competition!r})"
        )
    if ownership == OWNERSHIP_PUBLIC:
        return STRATEGY_WRITE_OFF
    if competition == COMPETITION_SUFFICIENT:
        return STRATEGY_AUCTION
    return STRATEGY_NEGOTIATED
