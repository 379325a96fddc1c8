"""Spline estimation of a time-varying SIR infection rate."""

from ._sirspline import (
    EpidemicPath,
    FitResult,
    KnotVector,
    SirsplineError,
    SplineModel,
    bootstrap_band,
    fit,
    imse,
    ingest_covid_csv,
    loglik,
    make_path,
    read_path_csv,
    simulate,
    truth,
)

__all__ = [
    "EpidemicPath",
    "FitResult",
    "KnotVector",
    "SirsplineError",
    "SplineModel",
    "bootstrap_band",
    "fit",
    "imse",
    "ingest_covid_csv",
    "loglik",
    "make_path",
    "read_path_csv",
    "simulate",
    "truth",
]
