"""Noisy GHZ simulation, LOSR network witnesses, inflation LPs and coincidence-count analysis."""

import os

from ._ghzw import (
    GhzwError,
    Behavior,
    Witness,
    Threshold,
    ghz_behavior,
    noisy_ghz_behavior,
    build_w3,
    build_w4,
    build_n_party,
    evaluate,
    evaluate_terms,
    ideal_strategy_value,
    threshold_mixed_noise,
    local_deterministic_vertices,
    nonsignalling_extremum,
    polytope_visibility,
    InflationSystem,
    parse_dataset,
    eval_w3_from_data,
    eval_w4_from_data,
    monte_carlo_sigma,
    stabilizer_fidelity,
    __version__,
)


def bundled_dataset():
    """Path of the bundled four-photon counts CSV."""
    from . import _ghzw

    for base in (os.path.dirname(__file__), os.path.dirname(_ghzw.__file__)):
        path = os.path.join(base, "table1_counts.csv")
        if os.path.exists(path):
            return path
    raise FileNotFoundError("bundled table1_counts.csv is not installed")


__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
