"""Generators, perturbations, checkers and exhaustive oracles for testing."""

from .checks import (BadPoints, StabilityCheck, bad_point_threshold, check_center_stability,
                     identify_bad_points, laminar, center_order_violations, stability_factor)
from .generators import (gen_approx_kmedian, gen_bad_point_fixture, gen_center_stable,
                         gen_minsum_resilient, minsum_alpha_bound)
from .instances import PlantedInstance
from .oracles import (OracleResult, brute_force_kmedian, brute_force_minsum, count_prunings,
                      enumerate_prunings)
from .perturb import bad_point_perturbation, blowup_cluster, sample_perturbation, subset_blowup
from .resilience import ResilienceVerdict, check_perturbation_resilience
