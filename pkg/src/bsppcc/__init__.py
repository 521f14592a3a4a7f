"""Probability-plot correlation goodness-of-fit test for the Birnbaum-Saunders distribution."""
from importlib import resources

__version__ = "0.1.0"

from .distribution import (  # noqa: E402
    BsParams,
    bs_cdf,
    bs_pdf,
    bs_quantile,
    bs_sample,
    make_rng,
    std_normal_cdf,
    std_normal_quantile,
)
from .errors import *  # noqa: E402,F401,F403
from .gof import GofReport, PValue, lookup_critical, p_value, run_test  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .montecarlo import (  # noqa: E402
    PAPER_LEVELS,
    CriticalValueTable,
    SimConfig,
    accuracy_bound,
    alpha_sensitivity,
    build_table,
    critical_values,
    empirical_quantile,
    paper_table,
    simulate_null_r,
)
from .plotting import (  # noqa: E402
    CorrelationStat,
    PlotPoints,
    bs_plot_statistic,
    correlation,
    linearize,
    plotting_positions,
)
from .sample import Sample  # noqa: E402

DATASETS = {
    "repair_times": "data/repair_times.txt",
    "glass_fiber": "data/glass_fiber.txt",
}


def dataset_path(name: str):
    """Path of a bundled example data file (``repair_times`` or ``glass_fiber``)."""
    return resources.files(__name__).joinpath(DATASETS[name])
