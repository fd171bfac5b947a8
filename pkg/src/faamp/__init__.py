"""Recovery of sparse finite-alphabet signals from compressive measurements
via approximate message passing with a discrete prior."""

from . import amp_discrete, baselines, harness, measurement, signal_model

__all__ = ["amp_discrete", "baselines", "harness", "measurement", "signal_model"]
__version__ = "0.1.0"
