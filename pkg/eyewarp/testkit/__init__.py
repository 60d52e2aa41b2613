# eyewarp/testkit/__init__.py
from .benchmark import (
    BenchmarkRow,
    BenchmarkTable,
    benchmark_redirection,
    cumulative_error_curve,
    pair_error,
    sample_gazes,
)
from .oracles import icosahedron, oracle_depth, oracle_fd, oracle_flow, oracle_loop
from .roundtrip import RoundTripReport, RoundTripRow, fit_round_trip, gaze_error_deg, perturb, sample_truth
from .selftest import CHECKS, CheckResult, run_selftest
from .synthetic import SyntheticModelSpec, build_model, generate_model

__all__ = [
    "BenchmarkRow",
    "BenchmarkTable",
    "benchmark_redirection",
    "cumulative_error_curve",
    "pair_error",
    "sample_gazes",
    "icosahedron",
    "oracle_depth",
    "oracle_fd",
    "oracle_flow",
    "oracle_loop",
    "RoundTripReport",
    "RoundTripRow",
    "fit_round_trip",
    "gaze_error_deg",
    "perturb",
    "sample_truth",
    "CHECKS",
    "CheckResult",
    "run_selftest",
    "SyntheticModelSpec",
    "build_model",
    "generate_model",
]
