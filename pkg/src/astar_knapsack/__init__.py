"""A* search on Knapsack subset-removal spaces with FPTAS-derived heuristics."""

from .experiment import (
    DEFAULT_EPSILONS,
    Sweep,
    SweepConfig,
    SweepRow,
    emit_csv,
    emit_plot_data,
    run_sweep,
)
from .heuristics import (
    FptasResult,
    FptasWorkspace,
    exact_opt,
    fptas_solve,
    fptas_value,
    fptas_workspace,
    h_epsilon,
    h_star,
    h_zero,
)
from .knapsack import (
    INSTANCE_TYPES,
    GeneratorConfig,
    InstanceFormatError,
    KnapsackInstance,
    KnapsackSpace,
    generate_instance,
    is_solution,
    item_set,
    members,
    parse_instance,
    serialize_instance,
    successors,
    total_profit,
    total_weight,
)
from .metrics import (
    BoundCheckReport,
    MetricsReport,
    PopulationTooLarge,
    Sampled,
    check_bound,
    compute_metrics,
    wi_edge,
)
from .search import ContractError, SearchResult, astar, breadth_first

__version__ = "0.1.0"
