"""Numerical experiments with the Riemann-Siegel Z-function, Gram sums and Jacob's ladders."""

__version__ = "0.1.0"

from .config import (  # noqa: E402
    Backend,
    ConvergenceError,
    DomainError,
    LadderConfig,
    PrecisionConfig,
    WindowRangeError,
    ZetaLabError,
)
from .gram import gram_point, make_window, sum_even, sum_odd, titchmarsh_pair_sum  # noqa: E402
from .hl_integral import integrate, j_between, j_main_term  # noqa: E402
from .ladder import forward_iterate, partition_report, phi1, phi1_inverse, product_integral, reverse_iterates  # noqa: E402
from .zeros import count_n0, find_zeros  # noqa: E402
from .zeta_core import spectral_decompose, spectral_eval, theta, z_eval, zeta_abs_sq  # noqa: E402

__all__ = [
    "Backend",
    "ConvergenceError",
    "DomainError",
    "LadderConfig",
    "PrecisionConfig",
    "WindowRangeError",
    "ZetaLabError",
    "count_n0",
    "find_zeros",
    "forward_iterate",
    "gram_point",
    "integrate",
    "j_between",
    "j_main_term",
    "make_window",
    "partition_report",
    "phi1",
    "phi1_inverse",
    "product_integral",
    "reverse_iterates",
    "spectral_decompose",
    "spectral_eval",
    "sum_even",
    "sum_odd",
    "theta",
    "titchmarsh_pair_sum",
    "z_eval",
    "zeta_abs_sq",
]
