"""Hong-Ou-Mandel interference of two detuned emitters under periodic pi pulses."""
from .coherence import (PopulationConvention, f_pulsed, g_free, g_pulsed_closed,
                        g_qrt_numeric)
from .emitter import (EmitterParams, IntervalPosition, PulseTrain, TwoLevelOperator,
                      apply_pi_pulse, evolve_free, interval_position, propagate,
                      rho_gg_closed_form)
from .hom import (CorrelationCurve, G2_34, G2_34_steady, HomScenario, Method,
                  NumericFailure, g2_34_free_closed, g2_34_integrated)
from .spectrum import SpectrumGrid, emission_spectrum

__all__ = [
    "CorrelationCurve", "EmitterParams", "G2_34", "G2_34_steady", "HomScenario",
    "IntervalPosition", "Method", "NumericFailure", "PopulationConvention", "PulseTrain",
    "SpectrumGrid", "TwoLevelOperator", "apply_pi_pulse", "emission_spectrum",
    "evolve_free", "f_pulsed", "g2_34_free_closed", "g2_34_integrated", "g_free",
    "g_pulsed_closed", "g_qrt_numeric", "interval_position", "propagate",
    "rho_gg_closed_form",
]
