"""Signal generators, experiment configs, batch runner and CLI."""

from .config import ConfigError, ExperimentConfig, expand_matrix_rule, load_config
from .generators import InvalidSpec, SignalSpec, generate_signal, smooth_bump, two_bump_parts
from .runner import CSV_COLUMNS, ExperimentResult, add_noise, run_experiment
