import json

import pytest

from ergoswarm.config import (
    ConfigError,
    ExperimentConfig,
    GraphSpec,
    config_from_dict,
    config_to_dict,
    default_config,
    load_config,
    save_config,
)


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    cfg = load_config(p)
    assert cfg == default_config()
    assert cfg.n_robots == 30
    assert cfg.horizon == 500
    assert cfg.alpha == 0.025
    assert cfg.trials == 100
    assert cfg.planner == "remc"
    assert cfg.graph.n_regions == 7
    assert cfg.ground_truth.variance_range == (0.0, 20.0)
    assert cfg.ground_truth.mean_range == (-10.0, 10.0)
    assert cfg.ground_truth.scale_noise_by_robots
    assert cfg.ground_truth.draw_mode == "fixed"
    assert cfg.start_region == 0


def test_empty_object_gives_defaults(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("{}")
    assert load_config(p) == default_config()


def test_robot_count_override(tmp_path):
    p = tmp_path / "five.json"
    p.write_text(json.dumps({"n_robots": 5}))
    assert load_config(p).n_robots == 5


def test_negative_alpha_rejected(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"alpha": -0.1}))
    with pytest.raises(ConfigError, match="alpha"):
        load_config(p)


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"robots": 5}))
    with pytest.raises(ConfigError, match="unknown config key"):
        load_config(p)
    p.write_text(json.dumps({"solver": {"iterations": 10}}))
    with pytest.raises(ConfigError, match="solver"):
        load_config(p)


def test_parse_failure(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(p)


def test_disconnected_graph_rejected():
    with pytest.raises(ConfigError, match="strongly connected"):
        config_from_dict({"graph": {"n_regions": 3, "edges": [[0, 1]]}})


def test_bad_edge_indices_rejected():
    with pytest.raises(ConfigError, match="out-of-range"):
        config_from_dict({"graph": {"n_regions": 2, "edges": [[0, 5]]}})


def test_bad_strategy_and_planner():
    with pytest.raises(ConfigError, match="strategy"):
        config_from_dict({"strategies": ["greedy"]})
    with pytest.raises(ConfigError, match="planner"):
        config_from_dict({"planner": "astar"})


def test_bad_ranges():
    with pytest.raises(ConfigError, match="variance_range"):
        config_from_dict({"ground_truth": {"variance_range": [5.0, 5.0]}})
    with pytest.raises(ConfigError, match="draw_mode"):
        config_from_dict({"ground_truth": {"draw_mode": "sometimes"}})


def test_round_trip(tmp_path):
    cfg = ExperimentConfig(
        graph=GraphSpec(n_regions=4, edges=((0, 1), (1, 2), (2, 3), (3, 0))),
        n_robots=5,
        horizon=77,
        alpha=0.3,
        trials=9,
        base_seed=42,
        strategies=("annealed", "uniform"),
        planner="fmmc",
        start_region=2,
    )
    p = tmp_path / "cfg.json"
    save_config(cfg, p)
    assert load_config(p) == cfg


def test_to_dict_from_dict_round_trip():
    cfg = default_config()
    assert config_from_dict(config_to_dict(cfg)) == cfg


def test_trials_and_horizon_bounds():
    with pytest.raises(ConfigError, match="trials"):
        config_from_dict({"trials": 0})
    with pytest.raises(ConfigError, match="horizon"):
        config_from_dict({"horizon": 0})
    with pytest.raises(ConfigError, match="start_region"):
        config_from_dict({"start_region": 9})
