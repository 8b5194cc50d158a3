"""Unit tests for phaseout.auction."""

from __future__ import annotations

import random

import pytest

from phaseout.auction import (
    AuctionConfig,
    Bid,
    clear_auction,
    assess_additionality,
    eligibility_filter,
    score,
)
from phaseout.fleet import Plant, PricePath


def make_plant(pid: str, **overrides) -> Plant:
    defaults = dict(id=pid, capacity=1.0, commissioning_year=1990)
    defaults.update(overrides)
    return Plant(**defaults)


# ---------------------------------------------------------------------------
# eligibility_filter
# ---------------------------------------------------------------------------


class TestEligibility:
    def test_long_lead_time_rejected(self) -> None:
        plants = [make_plant("a", min_lead_time_months=6)]
        bids = [Bid("a", 100.0)]
        config = AuctionConfig(budget=1000.0, lead_time_months=1)
        eligible, rejected = eligibility_filter(plants, bids, config)
        assert eligible == []
        assert [(r.plant_id, r.reason) for r in rejected] == [("a", "lead_time")]

    def test_bid_equal_to_cap_is_eligible(self) -> None:
        plants = [make_plant("a")]
        config = AuctionConfig(budget=1000.0, bid_cap_per_mw=100.0)
        eligible, rejected = eligibility_filter(plants, [Bid("a", 100.0)], config)
        assert len(eligible) == 1 and rejected == []

    def test_bid_above_cap_rejected(self) -> None:
        plants = [make_plant("a")]
        config = AuctionConfig(budget=1000.0, bid_cap_per_mw=100.0)
        _, rejected = eligibility_filter(plants, [Bid("a", 100.01)], config)
        assert [(r.plant_id, r.reason) for r in rejected] == [("a", "over_cap")]

    def test_grid_critical_excluded(self) -> None:
        plants = [make_plant("south", region="grid_critical")]
        config = AuctionConfig(budget=1000.0, exclude_grid_critical=True)
        _, rejected = eligibility_filter(plants, [Bid("south", 10.0)], config)
        assert [(r.plant_id, r.reason) for r in rejected] == [("south", "grid_exclusion")]

    def test_unknown_plant_is_hard_error(self) -> None:
        with pytest.raises(ValueError, match="unknown plant"):
            eligibility_filter([make_plant("a")], [Bid("ghost", 1.0)], AuctionConfig(budget=1.0))

    def test_duplicate_bid_is_hard_error(self) -> None:
        with pytest.raises(ValueError, match="multiple bids"):
            eligibility_filter(
                [make_plant("a")], [Bid("a", 1.0), Bid("a", 2.0)], AuctionConfig(budget=1.0)
            )


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------


class TestScore:
    def test_per_mw_orders_by_value(self) -> None:
        plant = make_plant("a")
        assert score(Bid("a", 100.0), plant, "per_mw") < score(Bid("a", 150.0), plant, "per_mw")

    def test_per_tco2_absolute_favors_high_emitters(self) -> None:
        # equal capacity, equal bids, emissions 2x apart -> half the score
        low = make_plant("low", capacity_factor=0.5, emission_intensity=0.5)
        high = make_plant("high", capacity_factor=0.5, emission_intensity=1.0)
        bid_low = Bid("low", 100.0)
        bid_high = Bid("high", 100.0)
        s_low = score(bid_low, low, "per_tco2_absolute")
        s_high = score(bid_high, high, "per_tco2_absolute")
        assert s_high == pytest.approx(s_low / 2.0)

    def test_grid_penalty_moves_score_not_payment(self) -> None:
        plant = make_plant("south", capacity=2.0, region="grid_critical")
        bid = Bid("south", 100.0)
        assert score(bid, plant, "per_mw", grid_penalty=20.0) == 120.0
        config = AuctionConfig(budget=1e9, grid_penalty_per_mw=20.0)
        outcome = clear_auction([plant], [bid], config)
        assert outcome.awarded[0].payment_total == 200.0  # own bid x capacity
        assert outcome.awarded[0].score == 120.0

    def test_penalty_ignored_for_unconstrained(self) -> None:
        plant = make_plant("north")
        assert score(Bid("north", 100.0), plant, "per_mw", grid_penalty=20.0) == 100.0

    def test_zero_emissions_undefined_under_tco2_rules(self) -> None:
        plant = make_plant("idle", capacity_factor=0.0)
        for rule in ("per_tco2_absolute", "per_tco2_intensity"):
            with pytest.raises(ValueError, match="zero annual emissions"):
                score(Bid("idle", 10.0), plant, rule)


# ---------------------------------------------------------------------------
# clear_auction
# ---------------------------------------------------------------------------


class TestClearAuction:
    def test_singleton_awarded_at_own_bid(self) -> None:
        plant = make_plant("a", capacity=3.0)
        outcome = clear_auction([plant], [Bid("a", 50.0)], AuctionConfig(budget=1000.0))
        assert outcome.awarded[0].payment_total == 150.0
        assert outcome.total_payment == 150.0
        assert not outcome.undersubscribed

    def test_budget_skip_and_continue(self) -> None:
        plants = [
            make_plant("p40", commissioning_year=2000),
            make_plant("p50", commissioning_year=1995),
            make_plant("p60", commissioning_year=1965),
        ]
        bids = [Bid("p40", 40.0), Bid("p50", 50.0), Bid("p60", 60.0)]
        outcome = clear_auction(plants, bids, AuctionConfig(budget=100.0))
        assert [a.plant_id for a in outcome.awarded] == ["p40", "p50"]
        assert outcome.total_payment == 90.0
        assert ("p60", "budget") in [(r.plant_id, r.reason) for r in outcome.rejected]
        assert not outcome.undersubscribed  # no capacity target set

    def test_undersubscription_forces_oldest_closure(self) -> None:
        plants = [
            make_plant("p40", commissioning_year=2000),
            make_plant("p50", commissioning_year=1995),
            make_plant("p60", commissioning_year=1965),
        ]
        bids = [Bid("p40", 40.0), Bid("p50", 50.0), Bid("p60", 60.0)]
        config = AuctionConfig(budget=100.0, capacity_target=3.0)
        outcome = clear_auction(plants, bids, config)
        assert outcome.undersubscribed
        assert outcome.forced_closure == "p60"

    def test_skipped_bid_lets_smaller_later_bid_in(self) -> None:
        plants = [make_plant("big", capacity=10.0), make_plant("small", capacity=1.0)]
        bids = [Bid("big", 10.0), Bid("small", 150.0)]
        outcome = clear_auction(plants, bids, AuctionConfig(budget=120.0))
        # big (score 10) costs 100; small (score 150) still fits the remainder
        assert [a.plant_id for a in outcome.awarded] == ["big"]
        outcome2 = clear_auction(plants, bids, AuctionConfig(budget=260.0))
        assert [a.plant_id for a in outcome2.awarded] == ["big", "small"]

    def test_all_bids_over_cap(self) -> None:
        plants = [make_plant("a", commissioning_year=1970), make_plant("b")]
        bids = [Bid("a", 200.0), Bid("b", 300.0)]
        config = AuctionConfig(budget=1000.0, capacity_target=2.0, bid_cap_per_mw=100.0)
        outcome = clear_auction(plants, bids, config)
        assert outcome.awarded == ()
        assert outcome.undersubscribed
        assert outcome.forced_closure == "a"

    def test_empty_bid_set_with_target(self) -> None:
        plants = [make_plant("a", commissioning_year=1980), make_plant("b", commissioning_year=1975)]
        outcome = clear_auction(plants, [], AuctionConfig(budget=10.0, capacity_target=1.0))
        assert outcome.undersubscribed
        assert outcome.forced_closure == "b"

    def test_capacity_target_stops_awarding(self) -> None:
        plants = [make_plant(f"p{i}") for i in range(4)]
        bids = [Bid(f"p{i}", 10.0 + i) for i in range(4)]
        config = AuctionConfig(capacity_target=2.0)
        outcome = clear_auction(plants, bids, config)
        assert [a.plant_id for a in outcome.awarded] == ["p0", "p1"]
        reasons = {(r.plant_id, r.reason) for r in outcome.rejected}
        assert ("p2", "target_met") in reasons and ("p3", "target_met") in reasons

    def test_tie_break_older_then_id(self) -> None:
        plants = [
            make_plant("young", commissioning_year=2000),
            make_plant("old", commissioning_year=1970),
            make_plant("older_twin", commissioning_year=1970),
        ]
        bids = [Bid("young", 50.0), Bid("old", 50.0), Bid("older_twin", 50.0)]
        outcome = clear_auction(plants, bids, AuctionConfig(capacity_target=10.0))
        assert [a.plant_id for a in outcome.awarded] == ["old", "older_twin", "young"]

    def test_determinism(self) -> None:
        rng = random.Random(13)
        plants = [
            make_plant(f"p{i}", commissioning_year=rng.randint(1960, 2015)) for i in range(8)
        ]
        bids = [Bid(p.id, float(rng.randint(1, 200))) for p in plants]
        config = AuctionConfig(budget=400.0, capacity_target=5.0)
        first = clear_auction(plants, bids, config)
        second = clear_auction(plants, bids, config)
        assert first == second


# ---------------------------------------------------------------------------
# additionality
# ---------------------------------------------------------------------------


class TestAdditionality:
    @pytest.fixture
    def path(self) -> PricePath:
        return PricePath([50.0] * 5, [0.0] * 5, 0.0)

    def test_all_positive_npv_is_zero(self, path: PricePath) -> None:
        plants = [
            make_plant("a", capacity_factor=0.5, marginal_cost=10.0, remaining_life_years=5)
        ]
        outcome = clear_auction(plants, [Bid("a", 10.0)], AuctionConfig(budget=100.0))
        assert assess_additionality(outcome, plants, path) == 0.0

    def test_all_free_riders_is_one(self, path: PricePath) -> None:
        plants = [make_plant("a", remaining_life_years=0)]
        outcome = clear_auction(plants, [Bid("a", 10.0)], AuctionConfig(budget=100.0))
        assert assess_additionality(outcome, plants, path) == 1.0

    def test_capacity_weighted_quarter(self, path: PricePath) -> None:
        plants = [
            make_plant("rider", capacity=1.0, remaining_life_years=0),
            make_plant("fresh", capacity=3.0, capacity_factor=0.5, marginal_cost=10.0,
                       remaining_life_years=5),
        ]
        bids = [Bid("rider", 5.0), Bid("fresh", 10.0)]
        outcome = clear_auction(plants, bids, AuctionConfig(budget=1000.0))
        assert assess_additionality(outcome, plants, path) == pytest.approx(0.25)

    def test_empty_awards_error(self, path: PricePath) -> None:
        plants = [make_plant("a")]
        outcome = clear_auction(plants, [], AuctionConfig(budget=10.0))
        with pytest.raises(ValueError, match="empty award set"):
            assess_additionality(outcome, plants, path)

    def test_clear_auction_reports_fraction_with_path(self, path: PricePath) -> None:
        plants = [make_plant("a", remaining_life_years=0)]
        outcome = clear_auction(plants, [Bid("a", 1.0)], AuctionConfig(budget=10.0), path)
        assert outcome.additionality_fraction == 1.0
        without = clear_auction(plants, [Bid("a", 1.0)], AuctionConfig(budget=10.0))
        assert without.additionality_fraction is None


# ---------------------------------------------------------------------------
# randomized invariants
# ---------------------------------------------------------------------------


def random_instance(rng: random.Random):
    n = rng.randint(1, 10)
    plants = [
        make_plant(
            f"p{i}",
            capacity=float(rng.randint(1, 9)),
            commissioning_year=rng.randint(1955, 2015),
            capacity_factor=rng.uniform(0.05, 1.0),
            emission_intensity=rng.uniform(0.3, 1.5),
            region="grid_critical" if rng.random() < 0.25 else "unconstrained",
            min_lead_time_months=rng.choice([0, 0, 1, 6, 24]),
        )
        for i in range(n)
    ]
    bids = [Bid(p.id, float(rng.randint(1, 300))) for p in plants]
    budget = float(rng.randint(50, 1500)) if rng.random() < 0.8 else None
    capacity_target = float(rng.randint(1, 30)) if rng.random() < 0.6 else None
    if budget is None and capacity_target is None:
        budget = 500.0
    config = AuctionConfig(
        ranking_rule=rng.choice(["per_mw", "per_tco2_absolute", "per_tco2_intensity"]),
        budget=budget,
        capacity_target=capacity_target,
        bid_cap_per_mw=float(rng.randint(100, 300)) if rng.random() < 0.5 else None,
        grid_penalty_per_mw=float(rng.choice([0, 0, 10, 25])),
        lead_time_months=rng.choice([0, 1, 12]),
        exclude_grid_critical=rng.random() < 0.3,
    )
    return plants, bids, config


class TestRandomizedInvariants:
    def test_pay_as_bid_and_budget_feasibility(self) -> None:
        rng = random.Random(2024)
        bid_by = {}
        for _ in range(300):
            plants, bids, config = random_instance(rng)
            bid_by = {b.plant_id: b for b in bids}
            capacity = {p.id: p.capacity for p in plants}
            outcome = clear_auction(plants, bids, config)
            for award in outcome.awarded:
                expected = bid_by[award.plant_id].compensation_per_mw * capacity[award.plant_id]
                assert award.payment_total == expected
            if config.budget is not None:
                assert outcome.total_payment <= config.budget + 1e-9

    def test_scale_invariance_of_selection(self) -> None:
        rng = random.Random(99)
        for _ in range(200):
            plants, bids, config = random_instance(rng)
            base = clear_auction(plants, bids, config)
            for k in (0.5, 3.0):
                scaled_bids = [Bid(b.plant_id, b.compensation_per_mw * k) for b in bids]
                scaled_config = AuctionConfig(
                    ranking_rule=config.ranking_rule,
                    budget=None if config.budget is None else config.budget * k,
                    capacity_target=config.capacity_target,
                    bid_cap_per_mw=(
                        None if config.bid_cap_per_mw is None else config.bid_cap_per_mw * k
                    ),
                    grid_penalty_per_mw=config.grid_penalty_per_mw * k,
                    lead_time_months=config.lead_time_months,
                    exclude_grid_critical=config.exclude_grid_critical,
                )
                scaled = clear_auction(plants, scaled_bids, scaled_config)
                assert [a.plant_id for a in scaled.awarded] == [a.plant_id for a in base.awarded]

    def test_lowering_a_bid_never_ejects_it(self) -> None:
        rng = random.Random(41)
        checked = 0
        while checked < 200:
            plants, bids, config = random_instance(rng)
            outcome = clear_auction(plants, bids, config)
            if not outcome.awarded:
                continue
            target = rng.choice(outcome.awarded).plant_id
            lowered = [
                Bid(b.plant_id, float(rng.randint(0, int(b.compensation_per_mw))))
                if b.plant_id == target
                else b
                for b in bids
            ]
            again = clear_auction(plants, lowered, config)
            assert target in {a.plant_id for a in again.awarded}
            checked += 1

    def test_ranking_rule_reversal(self) -> None:
        # modern plant: run more, cleaner per MWh; old plant: idle and dirty
        rng = random.Random(6)
        for _ in range(50):
            capacity = float(rng.randint(50, 500))
            bid_level = float(rng.randint(50, 200))
            modern = make_plant(
                "m", capacity=capacity, capacity_factor=rng.uniform(0.6, 0.95),
                emission_intensity=rng.uniform(0.7, 0.9), commissioning_year=2010,
            )
            old = make_plant(
                "o", capacity=capacity, capacity_factor=rng.uniform(0.2, 0.5),
                emission_intensity=rng.uniform(1.0, 1.3), commissioning_year=1970,
            )
            from phaseout.fleet import annual_emissions

            if annual_emissions(modern) <= annual_emissions(old):
                continue
            bid_m, bid_o = Bid("m", bid_level), Bid("o", bid_level)
            assert score(bid_m, modern, "per_tco2_absolute") < score(bid_o, old, "per_tco2_absolute")
            assert score(bid_m, modern, "per_tco2_intensity") > score(bid_o, old, "per_tco2_intensity")
