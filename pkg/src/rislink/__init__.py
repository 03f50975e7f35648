"""Link-level simulation and phase optimisation for RIS-assisted industrial links."""

from rislink.numerics import RngStream, SummaryStats, ParameterError

__version__ = "0.1.0"

__all__ = ["RngStream", "SummaryStats", "ParameterError", "__version__"]
