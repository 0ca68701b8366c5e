"""Bayesian estimation of the absolutely continuous Marshall-Olkin
bivariate Pareto distribution by slice-within-Gibbs sampling."""
from .errors import (
    BvpaError,
    ConfigError,
    CorruptFileError,
    DataFormatError,
    DegenerateInputError,
    InsufficientExceedancesError,
    ParameterError,
    SamplerStuckError,
    VersionMismatchError,
)
from .gibbs import Approach, Chain, GibbsConfig, initialize_default, run_chain
from .harness import ABALONE_BOOTSTRAP_TRUTH, StudyResult, StudySpec, run_bootstrap, run_study
from .inference import IntervalEstimate, bayes_estimate, credible_interval, summarize
from .model import (
    PARAM_NAMES,
    BivariateSample,
    BvpaParams,
    log_likelihood,
    log_pdf_bb,
    marginal_pdf_x1,
    marginal_pdf_x2,
    marginal_sf_x1,
    marginal_sf_x2,
    pdf_bb,
    pdf_mo,
    sample_bb,
    sample_mo,
    survival_bb,
    survival_mo,
    survival_singular,
)
from .posterior import ConditionalTarget, Mode, log_posterior
from .priors import DEFAULT_PRIORS, PriorSpec
from .slice import DEFAULT_SLICE, SliceConfig, slice_step_modified, slice_step_standard

__version__ = "0.1.0"
