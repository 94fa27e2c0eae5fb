"""FFT-based fixed-point solvers for periodic linear elasticity on unit cells."""

from .errors import InvalidInputError, NumericFailure
from .grid import Field, Grid, UnitCell, fluctuation, mean

__version__ = "0.1.0"

__all__ = [
    "Field", "Grid", "UnitCell", "InvalidInputError", "NumericFailure",
    "fluctuation", "mean", "__version__",
]
