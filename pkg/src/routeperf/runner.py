"""Single runs and multi-seed sweeps of the packet-level simulator."""

from __future__ import annotations

import itertools
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .config import ScenarioConfig
from .mobility import build_mobility
from .protocols.base import profile_for
from .sim.kernel import rng_stream
from .sim.metrics import MetricsReport
from .sim.network import Network, pick_flows
from .tables import write_csv

__all__ = [
    "run_scenario",
    "run_sweep",
    "sweep_configs",
    "SweepError",
    "SweepAxes",
    "SIM_COLUMNS",
    "KEY_COLUMNS",
    "report_row",
    "sweep_csv",
]

KEY_COLUMNS = ("network", "protocol", "variant", "node_count", "seed")
COUNTER_COLUMNS = ("data_sent", "data_delivered", "data_dropped", "data_in_flight",
                   "control_tx", "delay_sum")
METRIC_COLUMNS = ("pdr", "ae2ed", "nro")
SIM_COLUMNS = KEY_COLUMNS + COUNTER_COLUMNS + METRIC_COLUMNS


class SweepError(RuntimeError):
    def __init__(self, key, cause):
        super().__init__(f"run {dict(zip(KEY_COLUMNS, key))} failed: {cause!r}")
        self.key = key


def run_scenario(cfg: ScenarioConfig, mobility=None, keep_delays: bool = False) -> MetricsReport:
    """One deterministic run.  ``mobility`` overrides the configured model."""
    cfg.validate()
    mcfg = cfg.mobility_config()
    if mobility is None:
        mobility = build_mobility(mcfg, cfg.node_count, rng_stream(cfg.seed, "mobility"))
    wrap = mcfg.road_length if mcfg.model == "road" else None
    net = Network(mobility, cfg.radio_model(), profile_for(cfg.protocol, cfg.variant),
                  cfg.seed, warmup=cfg.warmup, wrap_x=wrap, keep_delays=keep_delays)
    net.start()
    traffic = rng_stream(cfg.seed, "traffic")
    flows = pick_flows(cfg.node_count, min(cfg.cbr_sources, cfg.node_count), traffic)
    net.add_cbr(flows, cfg.cbr_rate, cfg.warmup, cfg.sim_time, cfg.packet_size, traffic)
    return net.run(cfg.sim_time)


@dataclass(frozen=True)
class SweepAxes:
    node_counts: tuple = (10, 20, 30, 40, 50, 60, 70)
    protocols: tuple = ("dsdv", "dsr", "dymo")
    variants: tuple = ("default", "modified")
    networks: tuple = ("manet", "vanet")
    seeds: tuple = (0, 1, 2, 3, 4)

    def __post_init__(self):
        for name in ("node_counts", "protocols", "variants", "networks", "seeds"):
            if not getattr(self, name):
                raise ValueError(f"sweep axis {name} is empty")


def sweep_configs(base: ScenarioConfig, axes: SweepAxes) -> list[tuple[tuple, ScenarioConfig]]:
    """(key, config) pairs in output order.  Sources are capped at the node count."""
    out = []
    for net, proto, var, n, seed in itertools.product(
        sorted(axes.networks), sorted(axes.protocols), sorted(axes.variants),
        sorted(axes.node_counts), sorted(axes.seeds),
    ):
        cfg = base.replace(network=net, protocol=proto, variant=var, node_count=n, seed=seed,
                           cbr_sources=min(base.cbr_sources, n))
        out.append(((net, proto, var, n, seed), cfg))
    return out


def _run_keyed(item):
    key, cfg = item
    try:
        return key, run_scenario(cfg)
    except Exception as exc:  # noqa: BLE001 - reported with the key
        return key, exc


def report_row(key, rep: MetricsReport) -> list:
    return [*key, rep.data_sent, rep.data_delivered, rep.data_dropped, rep.data_in_flight,
            rep.control_tx, rep.delay_sum, rep.pdr, rep.ae2ed, rep.nro]


def run_sweep(base: ScenarioConfig, axes: SweepAxes, workers: int = 1,
              progress=None) -> list[tuple[tuple, MetricsReport]]:
    """Results in key order whatever the completion order of the workers."""
    items = sweep_configs(base, axes)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_run_keyed, items))
    else:
        results = {}
        for item in items:
            key, rep = _run_keyed(item)
            results[key] = rep
            if progress is not None:
                progress(key, rep)
    out = []
    for key, _ in items:
        rep = results[key]
        if isinstance(rep, Exception):
            raise SweepError(key, rep) from rep
        out.append((key, rep))
    return out


def _summary(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    mean = statistics.fmean(vals)
    std = statistics.stdev(vals) if len(vals) > 1 else 0.0
    return mean, std


def summary_rows(results) -> list[list]:
    """Per-cell mean and sample standard deviation across seeds."""
    cells: dict = {}
    for key, rep in results:
        cells.setdefault(key[:4], []).append(report_row(key, rep)[5:])
    rows = []
    for cell, table in cells.items():
        stats = [_summary(col) for col in zip(*table)]
        rows.append([*cell, "mean", *(m for m, _ in stats)])
        rows.append([*cell, "std", *(s for _, s in stats)])
    return rows


def sweep_csv(results, summaries: bool = True) -> str:
    rows = [report_row(k, r) for k, r in results]
    if summaries:
        rows += summary_rows(results)
    return write_csv(SIM_COLUMNS, rows)
