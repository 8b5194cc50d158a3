"""Coal-phaseout compensation auctions: pricing, clearing, and side-models.

The library prices early closure as discounted forgone profit, clears
sealed-bid pay-as-bid rounds and multi-date menu bids, simulates
multi-round programs with strategic participation, and evaluates the
system-level side effects (leakage, the emissions-cap waterbed, tonnage
cap-and-trade, and the social-optimum wedge).
"""

__version__ = "0.1.0"

from .auction import (
    AuctionConfig,
    AuctionOutcome,
    Award,
    Bid,
    Rejection,
    assess_additionality,
    clear_auction,
    eligibility_filter,
    score,
)
from .dynamics import (
    BidderPolicy,
    NegotiationResult,
    PlantFate,
    ProgramOutcome,
    Round,
    RoundSchedule,
    ShockResult,
    negotiation_benchmark,
    polluter_levy,
    scarcity_shock,
    simulate_program,
)
from .fleet import (
    Plant,
    PricePath,
    annual_emissions,
    annual_generation,
    carbon_exposure,
    continues_operating,
    npv_profit,
    npv_profit_at,
    truthful_bid,
    truthful_bid_at,
)
from .markets import (
    EtsResult,
    LeakageResult,
    LinearCurve,
    SocialOptimum,
    TonnageResult,
    ValueSchedule,
    grade_exchange_rate,
    leakage_equilibrium,
    recommend_strategy,
    social_optimum,
    tonnage_market,
    waterbed,
)
from .menu import (
    LeadTimeCoverage,
    MenuAssignment,
    MenuBid,
    TargetPath,
    clear_menu_exact,
    clear_menu_greedy,
    lead_time_coverage,
)
from .scenario import (
    Scenario,
    ScenarioError,
    bundled_scenario_names,
    bundled_scenario_path,
    load_scenario,
    save_scenario,
)

__all__ = [
    "AuctionConfig",
    "AuctionOutcome",
    "Award",
    "Bid",
    "BidderPolicy",
    "EtsResult",
    "LeadTimeCoverage",
    "LeakageResult",
    "LinearCurve",
    "MenuAssignment",
    "MenuBid",
    "NegotiationResult",
    "Plant",
    "PlantFate",
    "PricePath",
    "ProgramOutcome",
    "Rejection",
    "Round",
    "RoundSchedule",
    "Scenario",
    "ScenarioError",
    "ShockResult",
    "SocialOptimum",
    "TargetPath",
    "TonnageResult",
    "ValueSchedule",
    "annual_emissions",
    "annual_generation",
    "assess_additionality",
    "bundled_scenario_names",
    "bundled_scenario_path",
    "carbon_exposure",
    "clear_auction",
    "clear_menu_exact",
    "clear_menu_greedy",
    "continues_operating",
    "eligibility_filter",
    "grade_exchange_rate",
    "lead_time_coverage",
    "leakage_equilibrium",
    "load_scenario",
    "negotiation_benchmark",
    "npv_profit",
    "npv_profit_at",
    "polluter_levy",
    "recommend_strategy",
    "save_scenario",
    "scarcity_shock",
    "score",
    "simulate_program",
    "social_optimum",
    "tonnage_market",
    "truthful_bid",
    "truthful_bid_at",
    "waterbed",
]
