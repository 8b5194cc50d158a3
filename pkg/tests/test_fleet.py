"""Unit tests for phaseout.fleet."""

from __future__ import annotations

import math
import random
from dataclasses import replace

import pytest

from phaseout.fleet import (
    Plant,
    PricePath,
    annual_emissions,
    annual_generation,
    carbon_exposure,
    continues_operating,
    npv_profit,
    npv_profit_at,
    truthful_bid,
)


def make_plant(**overrides) -> Plant:
    defaults = dict(id="u1", capacity=10.0, commissioning_year=1990)
    defaults.update(overrides)
    return Plant(**defaults)


# ---------------------------------------------------------------------------
# Plant validation
# ---------------------------------------------------------------------------


class TestPlantInvariants:
    def test_capacity_must_be_positive(self) -> None:
        with pytest.raises(ValueError, match="capacity"):
            make_plant(capacity=0.0)

    def test_capacity_factor_bounds(self) -> None:
        with pytest.raises(ValueError, match="capacity_factor"):
            make_plant(capacity_factor=1.5)

    def test_emission_intensity_positive(self) -> None:
        with pytest.raises(ValueError, match="emission_intensity"):
            make_plant(emission_intensity=0.0)

    def test_costs_non_negative(self) -> None:
        with pytest.raises(ValueError, match="closure_cost"):
            make_plant(closure_cost=-1.0)

    def test_contract_enum(self) -> None:
        with pytest.raises(ValueError, match="contract"):
            make_plant(contract="regulated")

    def test_valid_plant_accepted(self) -> None:
        plant = make_plant(contract="fixed_price", region="grid_critical")
        assert plant.contract == "fixed_price"


class TestPricePathInvariants:
    def test_series_lengths_must_match(self) -> None:
        with pytest.raises(ValueError, match="equal length"):
            PricePath([50.0, 50.0], [10.0])

    def test_negative_prices_rejected(self) -> None:
        with pytest.raises(ValueError, match="carbon_price"):
            PricePath([50.0], [-1.0])

    def test_from_year_slices(self) -> None:
        path = PricePath([1.0, 2.0, 3.0], [0.0, 0.0, 0.0], 0.05)
        later = path.from_year(2)
        assert later.electricity_price == (3.0,)
        assert later.discount_rate == 0.05


# ---------------------------------------------------------------------------
# annual_generation / annual_emissions
# ---------------------------------------------------------------------------


class TestAnnualQuantities:
    def test_zero_capacity_factor(self) -> None:
        assert annual_generation(make_plant(capacity=1.0, capacity_factor=0.0)) == 0.0

    def test_half_loaded_10_mw(self) -> None:
        plant = make_plant(capacity=10.0, capacity_factor=0.5)
        assert annual_generation(plant) == pytest.approx(43_800.0)

    def test_100_mw_at_80_percent(self) -> None:
        plant = make_plant(capacity=100.0, capacity_factor=0.8)
        assert annual_generation(plant) == pytest.approx(700_800.0)

    def test_emissions_zero_iff_no_generation(self) -> None:
        assert annual_emissions(make_plant(capacity_factor=0.0)) == 0.0

    def test_emissions_unit_intensity(self) -> None:
        plant = make_plant(capacity=10.0, capacity_factor=0.5, emission_intensity=1.0)
        assert annual_emissions(plant) == pytest.approx(43_800.0)

    def test_emissions_hand_computed(self) -> None:
        # 10 x 8760 x 0.9 x 0.8 worked out by hand
        plant = make_plant(capacity=10.0, capacity_factor=0.9, emission_intensity=0.8)
        assert annual_emissions(plant) == pytest.approx(63_072.0)

    def test_emissions_identity(self) -> None:
        rng = random.Random(42)
        for _ in range(50):
            plant = make_plant(
                capacity=rng.uniform(1, 1000),
                capacity_factor=rng.random(),
                emission_intensity=rng.uniform(0.1, 2.0),
            )
            assert annual_emissions(plant) == annual_generation(plant) * plant.emission_intensity


# ---------------------------------------------------------------------------
# continues_operating
# ---------------------------------------------------------------------------


class TestContinuesOperating:
    def test_zero_margin_boundary_is_operating(self) -> None:
        plant = make_plant(marginal_cost=30.0, emission_intensity=1.0)
        assert continues_operating(plant, electricity_price=50.0, carbon_price=20.0)

    def test_negative_margin_stops(self) -> None:
        plant = make_plant(marginal_cost=40.0, emission_intensity=1.0)
        assert not continues_operating(plant, electricity_price=50.0, carbon_price=20.0)

    def test_no_carbon_price_positive_margin(self) -> None:
        plant = make_plant(marginal_cost=20.0)
        assert continues_operating(plant, electricity_price=30.0, carbon_price=0.0)

    def test_monotone_in_prices(self) -> None:
        rng = random.Random(7)
        for _ in range(100):
            plant = make_plant(
                marginal_cost=rng.uniform(0, 60), emission_intensity=rng.uniform(0.2, 1.5)
            )
            electricity = rng.uniform(0, 100)
            carbon = rng.uniform(0, 60)
            if continues_operating(plant, electricity, carbon):
                assert continues_operating(plant, electricity + rng.uniform(0, 20), carbon)
                assert continues_operating(plant, electricity, carbon * rng.random())


# ---------------------------------------------------------------------------
# carbon_exposure
# ---------------------------------------------------------------------------


class TestCarbonExposure:
    def test_merchant_bears_full_cost(self) -> None:
        assert carbon_exposure("merchant") == 1.0

    def test_cost_plus_passes_through(self) -> None:
        assert carbon_exposure("cost_plus") == 0.0

    def test_fixed_price_insulated(self) -> None:
        assert carbon_exposure("fixed_price") == 0.0

    def test_unknown_contract_rejected(self) -> None:
        with pytest.raises(ValueError):
            carbon_exposure("capacity_market")


# ---------------------------------------------------------------------------
# npv_profit / truthful_bid
# ---------------------------------------------------------------------------


def flat_profit_plant(annual_profit: float, years: int) -> tuple[Plant, PricePath]:
    """A plant and path that yield exactly `annual_profit` per year."""
    # capacity 1 MW, CF 0.5 -> 4380 MWh/yr; price = profit / 4380
    plant = make_plant(
        capacity=1.0,
        capacity_factor=0.5,
        marginal_cost=0.0,
        remaining_life_years=years,
    )
    price = annual_profit / 4380.0
    path = PricePath([price] * years, [0.0] * years, 0.0)
    return plant, path


class TestNpvProfit:
    def test_empty_horizon(self) -> None:
        plant, path = flat_profit_plant(100.0, 2)
        plant = make_plant(capacity=1.0, remaining_life_years=0)
        assert npv_profit(plant, path) == 0.0

    def test_undiscounted_sum(self) -> None:
        plant, path = flat_profit_plant(100.0, 2)
        assert npv_profit(plant, path) == pytest.approx(200.0)

    def test_discounted_two_years(self) -> None:
        plant, path = flat_profit_plant(100.0, 2)
        path = PricePath(path.electricity_price, path.carbon_price, 0.1)
        oracle = 100.0 / 1.1 + 100.0 / 1.21
        assert npv_profit(plant, path) == pytest.approx(oracle)
        assert oracle == pytest.approx(173.553719, rel=1e-8)

    def test_horizon_truncates_at_path_length(self) -> None:
        plant, _ = flat_profit_plant(100.0, 10)
        short_path = PricePath([100.0 / 4380.0] * 3, [0.0] * 3, 0.0)
        assert npv_profit(plant, short_path) == pytest.approx(300.0)

    def test_merchant_mothballs_in_loss_years(self) -> None:
        plant = make_plant(capacity=1.0, marginal_cost=60.0, remaining_life_years=3,
                           fixed_om_cost=1000.0)
        path = PricePath([50.0] * 3, [0.0] * 3, 0.0)
        assert npv_profit(plant, path) == 0.0

    def test_fixed_price_pays_om_in_loss_years(self) -> None:
        plant = make_plant(
            capacity=2.0,
            marginal_cost=60.0,
            remaining_life_years=3,
            fixed_om_cost=1000.0,
            contract="fixed_price",
        )
        path = PricePath([50.0] * 3, [0.0] * 3, 0.0)
        assert npv_profit(plant, path) == pytest.approx(-6000.0)

    def test_decreasing_in_discount_rate(self) -> None:
        plant, path0 = flat_profit_plant(250.0, 6)
        previous = math.inf
        for rate in (0.0, 0.03, 0.07, 0.12, 0.25):
            path = PricePath(path0.electricity_price, path0.carbon_price, rate)
            value = npv_profit(plant, path)
            assert value <= previous + 1e-12
            previous = value

    def test_insulated_contracts_ignore_carbon_price(self) -> None:
        rng = random.Random(5)
        for contract in ("cost_plus", "fixed_price"):
            for _ in range(20):
                plant = make_plant(
                    capacity=rng.uniform(1, 100),
                    marginal_cost=rng.uniform(0, 40),
                    capacity_factor=rng.uniform(0.1, 1.0),
                    remaining_life_years=rng.randint(1, 10),
                    contract=contract,
                )
                years = 10
                electricity = [rng.uniform(0, 80) for _ in range(years)]
                cheap = PricePath(electricity, [0.0] * years, 0.07)
                dear = PricePath(electricity, [rng.uniform(10, 90)] * years, 0.07)
                assert npv_profit(plant, cheap) == pytest.approx(npv_profit(plant, dear))

    def test_npv_profit_at_shifts_both_clocks(self) -> None:
        plant = make_plant(capacity=1.0, capacity_factor=0.5, marginal_cost=0.0,
                           remaining_life_years=2)
        path = PricePath([100.0 / 4380.0] * 5, [0.0] * 5, 0.0)
        # after 1 year only 1 year of life remains
        assert npv_profit_at(plant, path, 1) == pytest.approx(100.0)
        assert npv_profit_at(plant, path, 3) == 0.0


class TestTruthfulBid:
    def test_zero_npv_demands_closure_cost(self) -> None:
        plant = make_plant(capacity=1.0, remaining_life_years=0, closure_cost=5.0)
        path = PricePath([50.0], [0.0])
        assert truthful_bid(plant, path) == 5.0

    def test_positive_npv_adds_closure_cost(self) -> None:
        plant, path = flat_profit_plant(100.0, 2)
        plant = replace(plant, closure_cost=10.0)
        path = PricePath(path.electricity_price, path.carbon_price, 0.1)
        assert truthful_bid(plant, path) == pytest.approx(183.553719, rel=1e-8)

    def test_negative_npv_clamped(self) -> None:
        plant = make_plant(
            capacity=1.0,
            marginal_cost=60.0,
            remaining_life_years=3,
            fixed_om_cost=1000.0,
            contract="fixed_price",
            closure_cost=5.0,
        )
        path = PricePath([50.0] * 3, [0.0] * 3, 0.0)
        assert npv_profit(plant, path) < 0
        assert truthful_bid(plant, path) == 5.0

    def test_bid_at_least_closure_cost(self) -> None:
        rng = random.Random(9)
        for _ in range(100):
            plant = make_plant(
                capacity=rng.uniform(1, 500),
                marginal_cost=rng.uniform(0, 80),
                capacity_factor=rng.random(),
                closure_cost=rng.uniform(0, 1e6),
                remaining_life_years=rng.randint(0, 20),
                fixed_om_cost=rng.uniform(0, 50_000),
            )
            years = rng.randint(1, 20)
            path = PricePath(
                [rng.uniform(0, 120) for _ in range(years)],
                [rng.uniform(0, 50) for _ in range(years)],
                rng.uniform(0, 0.2),
            )
            assert truthful_bid(plant, path) >= plant.closure_cost >= 0.0
