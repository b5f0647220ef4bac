"""Ornstein-Uhlenbeck processes of order p for stationary time series.

Operator algebra and closed-form covariances, exact simulation, maximum
likelihood and matching-correlations estimation, best linear prediction, and
an AR baseline for comparison.
"""

from .ar_baseline import (ARModel, ar2_correlations, ar2_r3, lemma_gap,
                          lemma_gap_grid, ou2_rho, yule_walker_fit)
from .covariance import (CovarianceModel, gamma_cross,
                         oracle_gamma_quadrature)
from .dataio import TimeSeriesSample, ingest_csv, load_model, save_model
from .estimate import (FitResult, empirical_autocovariance,
                       empirical_autocorrelation, gaussian_loglik,
                       log_likelihood_centered, log_likelihood_diff, mce_fit,
                       mle_fit)
from .exceptions import (AdmissibilityViolation, DegenerateRoots,
                         IrregularSpacing, NoAdmissibleStart,
                         NotPositiveDefinite, OUProcessError, ParseError,
                         QuadratureNonConvergence, SingularSystem,
                         StationarityViolation)
from .kernels import (ExponentialPolynomialKernel, OUModel, compose_kernels,
                      group_roots, kappa_from_phi, kernel_from_kappa,
                      kernel_from_model, kernel_via_composition,
                      partial_fraction_coefficients, phi_from_kappa,
                      random_admissible_kappa)
from .predict import PredictionBand, predict, predict_series
from .simulate import (refine_path, simulate_grid, simulate_ou1_recursive,
                       simulate_replicates)

__version__ = "0.1.0"
