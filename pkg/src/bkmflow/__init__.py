"""Solutions of BKM integrable PDE systems via finite-dimensional Staeckel reductions."""

__version__ = "0.1.0"

from .errors import BkmError, ConfigError  # noqa: E402
from .pipeline import RunResult, run_scenario, verify_dir  # noqa: E402
from .scenario import Scenario, load_scenario, parse_scenario  # noqa: E402

__all__ = [
    "BkmError",
    "ConfigError",
    "RunResult",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "verify_dir",
    "__version__",
]
