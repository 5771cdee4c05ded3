"""Rate / key / payoff regions: single points, lossless LP, closed forms, examples, delay bounds."""

from .aux import (AuxSystem, RateTriple, best_actions, conditional_min_payoff, disclosure_variant_point,
                  inner_point, lossy_aux, min_payoff_no_info, trivial_aux)
from .delay import (ModularCertificate, delay_boundary, delay_inner_min_key, delay_inner_point,
                    delay_modular_aux, delay_modular_system, delay_outer_min_key, delay_outer_point,
                    modular_certificate)
from .lossless import (ExtremePointSet, UniformMixture, decompose_into_uniforms, hamming_tradeoff,
                       lossless_extreme_set, lossless_lp, lossless_min_key, phi, phi_knots, pi_max_hamming)
from .lossy import (VARIANTS, EquivocationPoint, TradeoffCurve, bsc_example_curve, bsc_point,
                    bsc_variant_payoff, equivocation_boundary, upper_hull, variant_payoff_grid)
from .search import SearchConfig, SearchResult, inner_bound_search

__all__ = [
    "AuxSystem", "RateTriple", "best_actions", "conditional_min_payoff", "disclosure_variant_point",
    "inner_point", "lossy_aux", "min_payoff_no_info", "trivial_aux",
    "ModularCertificate", "delay_boundary", "delay_inner_min_key", "delay_inner_point",
    "delay_modular_aux", "delay_modular_system", "delay_outer_min_key", "delay_outer_point",
    "modular_certificate",
    "ExtremePointSet", "UniformMixture", "decompose_into_uniforms", "hamming_tradeoff",
    "lossless_extreme_set", "lossless_lp", "lossless_min_key", "phi", "phi_knots", "pi_max_hamming",
    "VARIANTS", "EquivocationPoint", "TradeoffCurve", "bsc_example_curve", "bsc_point",
    "bsc_variant_payoff", "equivocation_boundary", "upper_hull", "variant_payoff_grid",
    "SearchConfig", "SearchResult", "inner_bound_search",
]
