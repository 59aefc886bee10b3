import pytest

from routeperf.config import parse_config
from routeperf.runner import (
    SIM_COLUMNS, SweepAxes, run_scenario, run_sweep, summary_rows, sweep_configs, sweep_csv,
)
from routeperf.tables import fmt_value, read_csv, write_csv

SMALL = "sim_time=30 warmup=5 cbr_sources=3 node_count=8\n"


def test_static_pair_delivers_everything():
    cfg = parse_config("node_count=2 cbr_sources=1 sim_time=20 warmup=2 protocol=dsr\n"
                       "[mobility]\nmodel=static spacing=100\n[radio]\nloss_prob=0")
    rep = run_scenario(cfg)
    assert rep.data_sent > 0 and rep.pdr == 1.0
    assert rep.control_tx >= 2


def test_single_node_sends_nothing():
    rep = run_scenario(parse_config("node_count=1 cbr_sources=1 sim_time=10 warmup=1"))
    assert rep.data_sent == 0 and rep.pdr == 0.0 and rep.ae2ed is None


@pytest.mark.parametrize("protocol", ["dsdv", "dsr", "dymo"])
def test_same_seed_same_counters(protocol):
    cfg = parse_config(SMALL + f"protocol={protocol} seed=4")
    a, b = run_scenario(cfg), run_scenario(cfg)
    assert a == b
    assert a.conserved


def test_seed_changes_outcome():
    cfg = parse_config(SMALL + "protocol=dsr")
    assert run_scenario(cfg) != run_scenario(cfg.replace(seed=1))


def test_full_grid_cardinality():
    base = parse_config("")
    items = sweep_configs(base, SweepAxes())
    assert len(items) == 7 * 3 * 2 * 2 * 5 == 420
    assert len({k for k, _ in items}) == 420
    ten = [c for k, c in items if k[3] == 10]
    assert all(c.cbr_sources == 10 for c in ten)


def test_empty_axis_rejected():
    with pytest.raises(ValueError, match="node_counts"):
        SweepAxes(node_counts=())


def test_sweep_cell_matches_single_run():
    base = parse_config(SMALL)
    axes = SweepAxes(node_counts=(8,), protocols=("dymo",), variants=("modified",),
                     networks=("manet",), seeds=(2,))
    [(key, rep)] = run_sweep(base, axes)
    assert key == ("manet", "dymo", "modified", 8, 2)
    assert rep == run_scenario(base.replace(protocol="dymo", variant="modified", seed=2))


def test_summary_rows_mean_and_std():
    base = parse_config(SMALL)
    axes = SweepAxes(node_counts=(8,), protocols=("dsr",), variants=("default",),
                     networks=("manet",), seeds=(0, 1, 2))
    res = run_sweep(base, axes)
    rows = summary_rows(res)
    assert [r[4] for r in rows] == ["mean", "std"]
    pdrs = [r.pdr for _, r in res]
    i = SIM_COLUMNS.index("pdr")
    mean = sum(pdrs) / 3
    assert rows[0][i] == pytest.approx(mean)
    var = sum((p - mean) ** 2 for p in pdrs) / 2
    assert rows[1][i] == pytest.approx(var ** 0.5)
    header, parsed = read_csv(sweep_csv(res))
    assert tuple(header) == SIM_COLUMNS and len(parsed) == 5


def test_csv_is_byte_stable():
    base = parse_config(SMALL)
    axes = SweepAxes(node_counts=(8,), protocols=("dsdv",), variants=("default",),
                     networks=("vanet",), seeds=(0,))
    assert sweep_csv(run_sweep(base, axes)).encode() == sweep_csv(run_sweep(base, axes)).encode()


def test_fmt_value():
    assert fmt_value(None) == "" and fmt_value(3) == "3" and fmt_value(0.1) == "0.1"
    assert fmt_value(1 / 3) == "0.333333333"
    with pytest.raises(ValueError):
        fmt_value(float("nan"))
    text = write_csv(("a", "b"), [[1, None], ["x", 2.5]])
    assert text == "a,b\n1,\nx,2.5\n"
    assert read_csv(text)[1] == [{"a": "1", "b": ""}, {"a": "x", "b": "2.5"}]
