"""Functional Bregman divergences on discretised measure spaces, and Bayesian
estimation of a scaled uniform density."""

from .bregman import (
    DivergenceReport,
    LegendrePair,
    check_dirac_equivalence,
    divergence,
    legendre_pair_entropy,
    legendre_pair_tsd,
    pythagorean_residual,
    separation_hyperplane,
    vector_bregman,
)
from .errors import (
    BregmanError,
    DegenerateInputError,
    DomainViolationError,
    IncompatibleSpaceError,
    InvalidArgumentError,
    InvalidDomainError,
    NumericFailureError,
)
from .expectation import (
    Ensemble,
    descend_to_minimizer,
    ensemble_mean,
    expected_divergence,
    verify_mean_minimizer,
)
from .functionals import (
    FunctionalPhi,
    PointwiseSpec,
    affine_shift,
    gateaux_fd,
    linear_combination,
    phi_from_pointwise,
    phi_neg_entropy,
    phi_squared_bias,
    phi_total_squared,
)
from .measure import (
    GridFunction,
    MeasureSpace,
    SpaceKind,
    integrate,
    lp_norm,
    make_dirac,
    make_interval_grid,
)

__version__ = "0.1.0"
