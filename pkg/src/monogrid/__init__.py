"""monogrid: adaptive grid designs for classifying monotone binary
deterministic simulations with as few evaluations as possible."""

__version__ = "0.1.0"

from .core import (
    Certainty,
    DesignState,
    NonMonotoneOracleError,
    classify_certain,
    count_comparable_pairs,
    dominates_leq,
    insert_observation,
)
from .designs import StaticDesignSpec, gen_lhd, gen_mc, gen_sg, gen_si
from .strategies import StepRecord, StrategySpec, run_strategy
from .volume import VolumeReport, uncertain_volume, uncertain_volume_mc, volume_union_down, volume_union_up

__all__ = [
    "Certainty",
    "DesignState",
    "NonMonotoneOracleError",
    "StaticDesignSpec",
    "StepRecord",
    "StrategySpec",
    "VolumeReport",
    "classify_certain",
    "count_comparable_pairs",
    "dominates_leq",
    "gen_lhd",
    "gen_mc",
    "gen_sg",
    "gen_si",
    "insert_observation",
    "run_strategy",
    "uncertain_volume",
    "uncertain_volume_mc",
    "volume_union_down",
    "volume_union_up",
]
