"""Numerical toolkit for additive splittings and scalar multiplicative
factorizations of complex functions on lines and strips, half-line
convolution equations, and domain-coloring renders."""

from .core import (
    FULL_STRIP,
    Convention,
    HalfPlaneHandle,
    LineGrid,
    Side,
    SplitPair,
    StripClass,
    StripEstimate,
    TimeGrid,
    class_of_convolution,
    estimate_strip,
    make_grid,
    make_time_grid,
    read_line_grid,
    read_time_grid,
    write_line_grid,
    write_time_grid,
)
from .expr import evaluate, evaluate_masked, parse, to_source
from .factor import (
    ExpHandle,
    FactorPair,
    PrincipalPartSpec,
    factor_line,
    factor_strip,
    factor_with_normalization,
    index,
    index_with_residual,
    normalize_index,
    rational_from_principal_parts,
    uniqueness_constant,
)
from .render import ImageBuffer, domain_color, write_ppm
from .solve import (
    FirstKind,
    HalfLineConvProblem,
    SecondKind,
    WhProblem,
    WhSolution,
    forward_apply,
    reduce_to_wh,
    solve_halfline,
    solve_riemann_hilbert,
    wh_solve,
)
from .split import (
    AdditiveSplit,
    cross_line_check,
    split_line,
    split_strip,
    wrong_side_mass,
)
from .transforms import (
    cauchy,
    convolve,
    fourier,
    inverse_fourier,
    plemelj_boundary,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
