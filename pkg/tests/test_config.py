import json

import pytest

from formladder.config import (
    ConfigError,
    compile_chart,
    compile_weight,
    load_config,
    load_preset,
    preset_names,
    scenario_from_dict,
)


def test_preset_names_cover_the_examples():
    names = preset_names()
    assert "r1-gaussian" in names
    assert "rxt2-volume-preserving" in names
    assert "r2-gaussian" in names


def test_r1_gaussian_preset_compiles():
    cfg = load_preset("r1-gaussian")
    assert cfg.chart.dim == 1
    assert cfg.weight.h == "-(1/2)*x^2"
    chart = compile_chart(cfg.chart)
    weight, alpha_exact, gamma_exact = compile_weight(chart, cfg.weight)
    assert weight.alpha == 1.0
    assert weight.gamma == 0.0
    assert alpha_exact == 1
    assert gamma_exact == 0


def test_rxt2_preset_metric():
    cfg = load_preset("rxt2-volume-preserving")
    assert cfg.chart.metric[1][1] == "exp(s)"
    assert cfg.chart.metric[2][2] == "exp(-s)"
    assert cfg.chart.periodic == [None, 1.0, 1.0]
    compile_chart(cfg.chart)


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        load_preset("nope")


def test_negative_alpha_rejected():
    data = load_preset("r1-gaussian").model_dump()
    data["weight"]["alpha"] = -1.0
    cfg = scenario_from_dict(data)
    chart = compile_chart(cfg.chart)
    with pytest.raises(ConfigError, match="alpha must be positive"):
        compile_weight(chart, cfg.weight)


def test_schema_violation_reports_pointer():
    data = load_preset("r1-gaussian").model_dump()
    data["chart"]["metric"] = [["1", "0"]]
    with pytest.raises(ConfigError) as err:
        scenario_from_dict(data)
    assert err.value.pointer.startswith("/chart")


def test_expression_error_reports_location():
    data = load_preset("r1-gaussian").model_dump()
    data["weight"]["h"] = "-(1/2)*q^2"
    cfg = scenario_from_dict(data)
    chart = compile_chart(cfg.chart)
    with pytest.raises(ConfigError, match="/weight/h"):
        compile_weight(chart, cfg.weight)


def test_rational_constants_accepted():
    data = load_preset("r1-gaussian").model_dump()
    data["weight"]["h"] = "-(3/4)*x^2"
    data["weight"]["alpha"] = "3/2"
    data["weight"]["gamma"] = "0"
    cfg = scenario_from_dict(data)
    chart = compile_chart(cfg.chart)
    weight, alpha_exact, _ = compile_weight(chart, cfg.weight)
    assert weight.alpha == 1.5
    assert alpha_exact == pytest.approx(1.5)


def test_fit_keyword_leaves_constants_unset():
    cfg = load_preset("r2-gaussian")
    chart = compile_chart(cfg.chart)
    weight, alpha_exact, gamma_exact = compile_weight(chart, cfg.weight)
    assert weight.alpha is None and weight.gamma is None
    assert alpha_exact is None and gamma_exact is None


def test_load_config_from_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(load_preset("r1-gaussian").model_dump()))
    cfg = load_config(path)
    assert cfg.name == "r1-gaussian"


def test_load_config_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(path)
