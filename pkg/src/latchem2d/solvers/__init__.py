"""Ground-state engines: exact diagonalisation and split-step imaginary-time evolution."""
from .ed import DENSE_THRESHOLD, EigenResult, ed_extremal
from .ite import (ConvergenceReport, ITEConfig, WaveState, coupling_exponential, ite_ground,
                  rayleigh, spectral_bounds, warm_sweep)

__all__ = ["DENSE_THRESHOLD", "EigenResult", "ed_extremal", "ConvergenceReport", "ITEConfig",
           "WaveState", "coupling_exponential", "ite_ground", "rayleigh", "spectral_bounds",
           "warm_sweep"]
