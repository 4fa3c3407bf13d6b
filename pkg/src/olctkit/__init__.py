"""Offset linear canonical transform toolkit for phase-retrieval experiments."""

from .core import (
    BandLimit,
    DegenerateGridError,
    DegenerateParameterError,
    DeterminantError,
    Grid,
    GridMismatch,
    OLCTError,
    ParameterMatrix,
    PhaseAlignment,
    SampledSignal,
    ZeroSignal,
    invert_parameters,
    make_parameter_matrix,
    phase_invariant_error,
    special_case,
)
from .transforms import Spectrum, fast_grid, olct_fast, olct_forward, olct_inverse, olct_magnitude

__version__ = "0.1.0"
