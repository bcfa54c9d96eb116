"""diffzoom: Monte Carlo study of the small-scale behavior of
one-dimensional diffusions, at fixed times and at the supremum, and of
high-frequency estimation of the supremum."""

from .model import DiffusionModel, ModelError, builtin_model, validate
from .simulate import (
    Path,
    SeedPlan,
    SimulationError,
    restrict_to_subgrid,
    simulate_ensemble,
    simulate_path,
)
from .pathops import (
    KilledPath,
    SupremumRecord,
    ZoomedPair,
    pre_post_supremum,
    quadratic_variation,
    supremum,
    time_change_inverse,
    zoom_fixed,
    zoom_supremum,
)
from .scale import ScaleFunction, build_scale, transform_model, transform_path
from .reference import (
    ReferenceLaw,
    arcsine_cdf,
    bessel3_cdf,
    bessel3_path_sampler,
    besselU_cdf,
    limit_sup_over_shifted_grid,
    make_law,
    xi_hat_sampler,
)
from .stats import (
    EmpiricalDistribution,
    KSResult,
    ks_one_sample,
    ks_two_sample,
    mixing_diagnostic,
    rate_fit,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    estimate_from_path,
    run_argmax_boundary,
    run_sup_estimation,
    run_zoom_at_fixed_time,
    run_zoom_at_supremum,
)

__version__ = "0.1.0"
