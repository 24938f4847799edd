"""Deployment optimization for multistatic radar networks."""

from .detection import DetectorConfig, DomainError, Mode, PfaConvention, detection_probability, marcum_q
from .scenario import ConfigError, DeploymentVector, ObjectiveVector, Region, Scenario, evaluate

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DeploymentVector",
    "DetectorConfig",
    "DomainError",
    "Mode",
    "ObjectiveVector",
    "PfaConvention",
    "Region",
    "Scenario",
    "detection_probability",
    "evaluate",
    "marcum_q",
]
