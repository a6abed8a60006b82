"""Traffic-flow forecasting with plain, residual and improved-residual networks."""

from .datagen import SyntheticConfig, generate, load_csv, resample, write_csv
from .dynamic import DynamicConfig, TrainParams, run_dynamic, run_static
from .exceptions import DataError, DimensionError, NumericError
from .metrics import MetricsReport, evaluate
from .network import Network, NetworkConfig, forward, init_network, load_network, save_network, train
from .pipeline import ScalerParams, SupervisedSet, TimeSeries

__version__ = "0.1.0"
