"""Interactive multi-objective classification rule mining."""

__version__ = "0.1.0"

from .dataset import Dataset, DatasetError, discretize, load_csv, load_preset, split
from .evolution import AgentPool, ConfigError, RunConfig, run
from .rules import Chromosome, MetricSpec, RuleSchema, WILDCARD

__all__ = [
    "AgentPool", "Chromosome", "ConfigError", "Dataset", "DatasetError",
    "MetricSpec", "RuleSchema", "RunConfig", "WILDCARD",
    "discretize", "load_csv", "load_preset", "run", "split",
]
