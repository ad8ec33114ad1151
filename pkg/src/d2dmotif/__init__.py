"""Motif statistics, interference transforms and throughput for clustered D2D content sharing."""

from .errors import (
    ConvergenceError,
    D2DError,
    DivergentIntegralError,
    DomainError,
    IntegrationError,
    InvalidRegimeError,
    NoMotifError,
    UndefinedZError,
    ValidationFailure,
)
from .motifstats import MotifStatistics, joint_motif_probability, motif_statistics
from .pointprocess import NetworkConfig, NetworkRealization, sample_tcp
from .quadrature import QuadratureSpec
from .specfun import SeriesControl

__all__ = [
    "ConvergenceError",
    "D2DError",
    "DivergentIntegralError",
    "DomainError",
    "IntegrationError",
    "InvalidRegimeError",
    "MotifStatistics",
    "NetworkConfig",
    "NetworkRealization",
    "NoMotifError",
    "QuadratureSpec",
    "SeriesControl",
    "UndefinedZError",
    "ValidationFailure",
    "joint_motif_probability",
    "motif_statistics",
    "sample_tcp",
]
