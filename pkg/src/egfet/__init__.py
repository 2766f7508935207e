"""Linear-region FET I-V modeling and parameter extraction.

Forward model with mobility degradation and series resistance, four
threshold-voltage/mobility extraction methods, series-resistance
estimators, sweep-file I/O and a CLI.
"""

from .extraction import (
    ALL_METHODS,
    ExtractionReport,
    Uncertain,
    compare_reports,
    gds_method_extract,
    ids_over_sqrt_gm_extract,
    inv_ids_extract,
    peak_gm_extract,
    rsd_channel_length_intersection,
    rsd_output_resistance,
    theta_pointwise,
)
from .model import (
    BiasPoint,
    DeviceSpec,
    ModelParams,
    beta0,
    gds_analytic,
    gm_analytic,
    ids_implicit,
    ids_simplified,
    mu_eff,
    synth_drain_sweep_family,
    synth_gate_sweep,
)
from .numerics import LineFit, SampledCurve
from .sweeps import DrainSweep, DrainSweepFamily, GateSweep

__version__ = "0.1.0"

__all__ = [
    "ALL_METHODS",
    "BiasPoint",
    "DeviceSpec",
    "DrainSweep",
    "DrainSweepFamily",
    "ExtractionReport",
    "GateSweep",
    "LineFit",
    "ModelParams",
    "SampledCurve",
    "Uncertain",
    "beta0",
    "compare_reports",
    "gds_analytic",
    "gds_method_extract",
    "gm_analytic",
    "ids_implicit",
    "ids_over_sqrt_gm_extract",
    "ids_simplified",
    "inv_ids_extract",
    "mu_eff",
    "peak_gm_extract",
    "rsd_channel_length_intersection",
    "rsd_output_resistance",
    "synth_drain_sweep_family",
    "synth_gate_sweep",
    "theta_pointwise",
]
