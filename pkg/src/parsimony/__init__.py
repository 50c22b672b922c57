"""Bayesian linear-regression model selection with parsimonious uniform priors."""
from .design import (Dataset, DesignMatrix, Intercept, ModelSpec, Polynomial, Raw,
                     TruncatedPowerSpline, build_design_matrix, gram_logdet, gram_schmidt)
from .errornorm import (ErrorBound, NoiseModel, error_norm_mean_var, error_norm_moment,
                        error_norm_pdf, max_error_norm)
from .evidence import (EvidenceReport, ModelRanking, log_evidence, log_evidence_known_sigma,
                       log_evidence_unknown_sigma, log_goodness_of_fit, log_occam_factor,
                       model_posterior_probs)
from .ols import FitResult, decompose_quadratic, fit
from .posterior import (credible_quadratic_level, log_joint_posterior_unknown_sigma,
                        marginal_posterior_density, posterior_known_sigma, student_t_posterior)
from .prior import (PriorDensity, PriorSpec, ellipsoid_log_volume, parsimonious_prior,
                    prior_log_height, scalar_beta_bounds)

__version__ = "0.1.0"
