"""Directed polymer with a disordered defect line.

Thin wrapper around the C++ core: exact transfer-matrix partition functions,
homogeneous pinning brackets, Monte Carlo free energies, the coarse-grained
certificate and Lipschitz percolation statistics.
"""

from ._core import (
    FreeEnergyBracket,
    annealed_free_energy,
    annealed_log_mgf,
    certified_free_energy,
    coarse_grain,
    correlation_length,
    cumulant,
    free_energy_bracket,
    free_energy_oracle,
    gap_scan,
    hitting_time_pmf,
    lipschitz_tail,
    lowest_lipschitz,
    lss_threshold,
    oracle_suite,
    overlap_coupling,
    pair_overlap_log_mgf,
    quenched_free_energy,
    quenched_log_partition,
)

__all__ = [
    "FreeEnergyBracket",
    "annealed_free_energy",
    "annealed_log_mgf",
    "certified_free_energy",
    "coarse_grain",
    "correlation_length",
    "cumulant",
    "free_energy_bracket",
    "free_energy_oracle",
    "gap_scan",
    "hitting_time_pmf",
    "lipschitz_tail",
    "lowest_lipschitz",
    "lss_threshold",
    "oracle_suite",
    "overlap_coupling",
    "pair_overlap_log_mgf",
    "quenched_free_energy",
    "quenched_log_partition",
]
