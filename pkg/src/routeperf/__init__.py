"""Analytic models and a packet-level simulator for ad-hoc routing (DSDV, DSR, DYMO)."""

from .analytic import (
    ModelParams,
    average_delay,
    beta_fn,
    delay_one_dir_beta,
    delay_one_dir_numeric,
    delay_two_dir_numeric,
    inner_wait_integral,
    pdr_one_dir,
    pdr_two_dir,
    rate_lambda,
)
from .config import ScenarioConfig, dump_config, load_config
from .overhead import OverheadParams, nro_total
from .quadrature import QuadratureSpec, integrate
from .runner import run_scenario, run_sweep

__version__ = "0.1.0"
