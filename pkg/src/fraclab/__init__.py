"""fraclab: a numerical laboratory for fractal measures in the plane.

Builds radial and product Kakeya-type measures, weighted line-family
(Furstenberg-type) measures, and random Salem measures from Brownian
images; estimates their Fourier, Frostman, and box-counting dimensions
empirically; and checks the estimates against closed-form dimension
threshold bounds.
"""

from .bounds import (ThresholdPoint, bound_table, ff_bounds, fh_bounds,
                     kakeya_bounds, reference_curves, threshold_point)
from .constructions import (FiberRule, KakeyaSpec, LineFamily, arc_directions,
                            brownian_image, brownian_image_1d, cantor_directions,
                            full_circle_directions, furstenberg_measure,
                            kakeya_measure, product_kakeya, radial_kakeya,
                            strip_mass)
from .errors import ConfigError, FraclabError, PreconditionError
from .estimators import (BallMassProfile, ball_mass_profile, box_counting,
                         box_counts, frostman_exponent, geometric_scales)
from .fitting import DimensionEstimate, loglog_fit
from .fourier import (DecayProfile, FrequencyPlan, decay_profile,
                      estimate_fourier_dim, nudft, transform_values,
                      verify_frostman_from_decay)
from .ifs import IfsSpec, ifs_measure, middle_third_spec, two_branch_spec
from .measures import (DiscreteMeasure, dirac, load_measure, product_measure,
                       pushforward, save_measure, uniform_interval_measure)
from .verify import (ExperimentConfig, SuiteReport, Verdict, default_manifest,
                     run_experiment, suite)

__version__ = "0.1.0"
