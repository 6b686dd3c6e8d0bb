"""
VisNet
Visibility graphs of financial time series: construction, network statistics,
degree-tail fits and detrended fluctuation analysis.
"""

__version__ = "1.0.0"

from .config import Settings, settings
from .dfa import DfaConfig, DfaDirection, DfaResult, estimate_hurst, fluctuation, profile
from .exceptions import (
    AnalysisError,
    DfaError,
    GraphError,
    IngestError,
    MetricsError,
    RegressionError,
    ReportIOError,
    SeriesError,
    TailFitError,
    VisnetError,
)
from .graph import Graph
from .metrics import (
    assortativity,
    avg_shortest_path,
    clustering,
    clustering_degree_relation,
    global_stats,
    knn_curve,
    null_model_compare,
    random_gnm,
    small_world_scan,
)
from .regression import LinearFit, ols, pearson
from .series import SyntheticKind, SyntheticSpec, TimeSeries, generate, load_csv, slice_series, write_csv
from .tailfit import (
    DegreeTailFit,
    TailFamily,
    alpha_hurst_relation,
    bootstrap_pvalue,
    fit_powerlaw,
    fit_truncated_powerlaw,
    ks_distance,
    log_binned_pdf,
)
from .visibility import (
    VisibilityGraph,
    build_vg,
    build_vg_dc,
    build_vg_oracle,
    build_vg_sweep,
    export_edgelist,
    visible,
)

__all__ = [
    "__version__",
    "Settings",
    "settings",
    "VisnetError",
    "IngestError",
    "SeriesError",
    "AnalysisError",
    "GraphError",
    "DfaError",
    "MetricsError",
    "RegressionError",
    "TailFitError",
    "ReportIOError",
    "TimeSeries",
    "SyntheticKind",
    "SyntheticSpec",
    "load_csv",
    "write_csv",
    "generate",
    "slice_series",
    "Graph",
    "VisibilityGraph",
    "visible",
    "build_vg",
    "build_vg_oracle",
    "build_vg_sweep",
    "build_vg_dc",
    "export_edgelist",
    "DfaConfig",
    "DfaDirection",
    "DfaResult",
    "profile",
    "fluctuation",
    "estimate_hurst",
    "LinearFit",
    "ols",
    "pearson",
    "global_stats",
    "clustering",
    "clustering_degree_relation",
    "avg_shortest_path",
    "small_world_scan",
    "random_gnm",
    "null_model_compare",
    "assortativity",
    "knn_curve",
    "DegreeTailFit",
    "TailFamily",
    "log_binned_pdf",
    "fit_powerlaw",
    "fit_truncated_powerlaw",
    "ks_distance",
    "bootstrap_pvalue",
    "alpha_hurst_relation",
]
