"""Dyson Brownian motion sampler for quartic Coulomb gases and invariant ensembles."""

__version__ = "0.1.0"

from .potential import QuarticPotential
from .coulomb import CoulombMethod, coulomb_drift, coulomb_drift_naive, coulomb_drift_treecode
from .dbm import GasState, SchemeParams, SimulationConfig, step, run_trial, run_ensemble
from .initcond import InitSpec, sample_gue_eigenvalues, sample_iid
from .equilibrium import edge, density, cdf
from .orthopoly import RecurrenceTable, compute_recurrence, phi, kernel, finite_cdf, correlation
from .fredholm import GapQuery, gap_probability, gap_curve
from .stats import EmpiricalDistribution, KsSeries, empirical_cdf, ks_distance, empirical_gap, decay_fit
from .unitary import sample_haar_unitary, assemble_matrix, sample_invariant_matrix

__all__ = [
    "QuarticPotential",
    "CoulombMethod", "coulomb_drift", "coulomb_drift_naive", "coulomb_drift_treecode",
    "GasState", "SchemeParams", "SimulationConfig", "step", "run_trial", "run_ensemble",
    "InitSpec", "sample_gue_eigenvalues", "sample_iid",
    "edge", "density", "cdf",
    "RecurrenceTable", "compute_recurrence", "phi", "kernel", "finite_cdf", "correlation",
    "GapQuery", "gap_probability", "gap_curve",
    "EmpiricalDistribution", "KsSeries", "empirical_cdf", "ks_distance", "empirical_gap", "decay_fit",
    "sample_haar_unitary", "assemble_matrix", "sample_invariant_matrix",
]
