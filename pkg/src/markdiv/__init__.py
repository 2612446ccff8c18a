"""Spectral certificates against infinitesimal Markovian divisibility of quantum channels."""

__version__ = "0.1.0"

from .criteria import (  # noqa: E402
    Certificate,
    CriterionReport,
    full_report,
    generator_spectral_condition,
    max_valid_exponent,
    power_criterion,
    product_criterion,
)
from .superop import (  # noqa: E402
    LindbladGenerator,
    QuantumChannel,
    Superoperator,
    channel_from_generator,
    lindblad_superoperator,
)

__all__ = [
    "Certificate",
    "CriterionReport",
    "LindbladGenerator",
    "QuantumChannel",
    "Superoperator",
    "channel_from_generator",
    "full_report",
    "generator_spectral_condition",
    "lindblad_superoperator",
    "max_valid_exponent",
    "power_criterion",
    "product_criterion",
]
