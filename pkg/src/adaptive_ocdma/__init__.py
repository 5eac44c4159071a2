"""Analysis, design and adaptive code allocation for MAI-limited OCDMA passive optical networks."""
from .combinatorics import CodeParams, binomial, check_constraints, johnson_bound
from .ber import (
    InterferenceModel,
    SystemSpec,
    approx_ber,
    approx_ber_single,
    ber_single,
    exact_ber,
    worst_case_model,
)
from .design import (
    DesignResult,
    SearchBounds,
    complexity_gain,
    power_optimize_brute,
    rate_optimize_brute,
    rate_optimize_heuristic,
)
from .allocation import (
    CodebookTable,
    GainReport,
    SimConfig,
    build_codebooks,
    run_message_simulation,
    simulate_gain,
)

__version__ = "0.1.0"
