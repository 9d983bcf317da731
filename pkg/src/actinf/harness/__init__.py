from .config import ChartsRequest, Config, parse_cli
from .metrics import RunMetrics, load_metric_table, read_manifest, run_directory, write_metrics

__all__ = [
    "ChartsRequest",
    "Config",
    "RunMetrics",
    "load_metric_table",
    "parse_cli",
    "read_manifest",
    "run_directory",
    "write_metrics",
]
