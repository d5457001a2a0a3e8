"""Asymptotic iteration method for the infinite well with a non-flat bottom."""

from .aim import AimIterate, SoldeProblem, alpha_sequence, delta_at, harmonic_problem, normalized_delta, run_recursion
from .eigensolver import EigenResult, ScanConfig, StabilityReport, find_roots, plateau_scan, spectrum, wavefunction
from .jets import DEFAULT_PRECISION, DOUBLE, Jet, Precision, jet_add, jet_differentiate, jet_div, jet_from_rational, jet_mul
from .oracle import OracleConfig, OracleSpectrum, oracle_spectrum, sturm_count
from .potential import (CharacteristicExponents, PotentialParams, characteristic_exponents, lambda0_jet,
                        make_well_problem, s0_jet, to_x, to_y, v_of_x)

__all__ = [
    "AimIterate", "SoldeProblem", "alpha_sequence", "delta_at", "harmonic_problem", "normalized_delta",
    "run_recursion", "EigenResult", "ScanConfig", "StabilityReport", "find_roots", "plateau_scan", "spectrum",
    "wavefunction", "DEFAULT_PRECISION", "DOUBLE", "Jet", "Precision", "jet_add", "jet_differentiate", "jet_div",
    "jet_from_rational", "jet_mul", "OracleConfig", "OracleSpectrum", "oracle_spectrum", "sturm_count",
    "CharacteristicExponents", "PotentialParams", "characteristic_exponents", "lambda0_jet", "make_well_problem",
    "s0_jet", "to_x", "to_y", "v_of_x",
]
