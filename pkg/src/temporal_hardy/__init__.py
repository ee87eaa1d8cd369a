"""Numerical laboratory for the two-time (temporal) Hardy argument."""

__version__ = "0.1.0"

from .qcore import (  # noqa: E402
    Projector,
    SpectralDecomposition,
    born_prob,
    complement,
    hermitian_eigen,
    projector_for_outcome,
    psd_order,
    sequential_prob,
)
from .hardy import (  # noqa: E402
    Ensemble,
    HardyReport,
    MeasurementSetting,
    Observable,
    classify_condition_sets,
    evaluate,
    mixed_success,
    refute_condition_set,
    verify_bound,
)
from .spin import (  # noqa: E402
    general_spin_setting,
    solve_theta32,
    spin1_setting,
    spin32_setting,
    spin_operators,
)
from .optimize import (  # noqa: E402
    RecipeInput,
    SearchConfig,
    maximize_success,
    recipe_setting,
    scan_family,
)
from .realism import classical_max_success, enumerate_assignments  # noqa: E402
