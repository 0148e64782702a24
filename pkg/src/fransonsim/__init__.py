"""Simulator and analysis toolkit for polarization-based nonlocal
interference circuits: a netlist compiler for coherent field networks,
closed-form fringe models, reproducible photon-counting Monte Carlo and
the fringe analysis used to reduce scan records."""

__version__ = "0.1.0"

from .analysis import (
    AnalysisError,
    fringe_period,
    phase_folded_visibility,
    product_trace,
    visibility_trace,
    windowed_visibility,
)
from .analytic import (
    AnalyticPoint,
    analytic_point,
    coincidence_fringe,
    output_intensities,
    product_visibility,
    singles_visibility,
    sweep,
)
from .circuit import (
    CircuitError,
    CircuitSpec,
    CircuitSyntaxError,
    Violation,
    builtin_circuit_text,
    compile_plan,
    evaluate,
    isometry_deviation,
    load_circuit,
    parse,
    serialize,
    transfer_matrix,
    validate,
)
from .crosscheck import CompareReport, compare_circuit
from .runner import (
    DetectionTimeSeries,
    ScanProfile,
    Schedule,
    ThetaModel,
    read_series,
    run,
    write_series,
)
from .stats import (
    CoincidenceModel,
    DetectorModel,
    SourceModel,
    click_probability,
    expected_bin_counts,
    sample_counts,
)

__all__ = [
    "AnalysisError", "AnalyticPoint", "CircuitError", "CircuitSpec",
    "CircuitSyntaxError", "CoincidenceModel", "CompareReport",
    "DetectionTimeSeries", "DetectorModel", "ScanProfile", "Schedule",
    "SourceModel", "ThetaModel", "Violation", "analytic_point",
    "builtin_circuit_text", "click_probability", "coincidence_fringe",
    "compare_circuit", "compile_plan", "evaluate", "expected_bin_counts",
    "fringe_period", "isometry_deviation", "load_circuit",
    "output_intensities", "parse", "phase_folded_visibility",
    "product_trace", "product_visibility", "read_series", "run",
    "sample_counts", "serialize", "singles_visibility", "sweep",
    "transfer_matrix", "validate", "visibility_trace", "windowed_visibility",
    "write_series",
]
