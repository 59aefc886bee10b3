import pytest

from routeperf.config import ConfigError, ScenarioConfig, dump_config, load_config, parse_config


def test_minimal_file_takes_defaults():
    cfg = parse_config("protocol=dymo\n")
    assert cfg.protocol == "dymo" and cfg.node_count == 30 and cfg.sim_time == 900.0
    assert cfg.mobility_config().model == "rwp"
    assert cfg.radio_model().loss_prob == 0.02


def test_network_dependent_defaults():
    cfg = parse_config("network=vanet")
    assert cfg.mobility_config().model == "road"
    assert cfg.radio_model().loss_prob == 0.01
    cfg = parse_config("network=vanet\n[radio]\nloss_prob=0.3")
    assert cfg.radio_model().loss_prob == 0.3


def test_several_pairs_per_line_and_comments():
    cfg = parse_config("node_count=10 cbr_sources=4  # trailing\n# whole line\nseed=7")
    assert (cfg.node_count, cfg.cbr_sources, cfg.seed) == (10, 4, 7)


def test_sources_exceeding_nodes_rejected():
    with pytest.raises(ConfigError) as e:
        parse_config("node_count=5 cbr_sources=12")
    assert e.value.field == "cbr_sources"


def test_unknown_keys_listed_together():
    with pytest.raises(ConfigError, match="unknown keys: colour, \\[radio\\] volume"):
        parse_config("colour=red\n[radio]\nvolume=11")


def test_error_carries_line_number():
    with pytest.raises(ConfigError) as e:
        parse_config("protocol=dsr\n\nnode_count=many")
    assert e.value.line == 3 and "line 3" in str(e.value)
    with pytest.raises(ConfigError) as e:
        parse_config("seed=1\n[bogus]")
    assert e.value.line == 2


@pytest.mark.parametrize("text,field", [
    ("protocol=aodv", "protocol"), ("variant=turbo", "variant"), ("network=lan", "network"),
    ("sim_time=0", "sim_time"), ("cbr_rate=-1", "cbr_rate"),
])
def test_bad_values_name_the_field(text, field):
    with pytest.raises(ConfigError) as e:
        parse_config(text)
    assert e.value.field == field


def test_section_value_errors_surface():
    with pytest.raises(ConfigError, match=r"\[mobility\]"):
        parse_config("[mobility]\nmodel=teleport")


def test_round_trip_is_fixed_point(tmp_path):
    cfg = parse_config("network=vanet protocol=dymo variant=modified seed=3\n[radio]\nloss_prob=0.05")
    text = dump_config(cfg)
    again = parse_config(text)
    assert dump_config(again) == text
    assert again.radio_model() == cfg.radio_model()
    assert again.mobility_config() == cfg.mobility_config()


def test_relative_trace_path_resolves_against_file(tmp_path):
    (tmp_path / "t.txt").write_text("0 0 0 0\n0 1 100 0\n")
    p = tmp_path / "s.cfg"
    p.write_text("node_count=2 cbr_sources=1\n[mobility]\nmodel=trace trace_file=t.txt\n")
    cfg = load_config(p)
    assert cfg.mobility_opts["trace_file"] == str(tmp_path / "t.txt")


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.cfg")


def test_shipped_examples_parse():
    import pathlib
    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    for p in sorted(root.glob("*.cfg")):
        assert isinstance(load_config(p), ScenarioConfig)
