import json
from pathlib import Path

import pytest

from pbl.exceptions import ConfigurationError
from pbl.models.schemas import (
    ExperimentConfig,
    GridConfig,
    IntegrateConfig,
    RecurrenceConfig,
    ToleranceConfig,
    VerifyConfig,
    load_config,
)
from pbl.services.coefficients import BETA_KINDS, GAMMA_KINDS


def test_defaults():
    config = load_config({"scenario": "selftest"})
    assert config.lam == 1.0
    assert config.lambda_grid == [-1.0, -0.1, 0.1, 1.0]
    assert config.coefficients.beta == {"kind": "constant", "b": 1.0}
    assert config.seed_list() == [7]
    assert config.tolerances.pullback_schedule == [5.0, 10.0, 20.0, 40.0]


def test_lambda_alias_round_trip():
    config = load_config({"scenario": "attractor", "lambda": 0.25})
    assert config.lam == 0.25
    echo = config.echo()
    assert echo["lambda"] == 0.25
    assert "lam" not in echo
    assert ExperimentConfig.model_validate(echo) == config


def test_zero_noise_seed_list():
    assert load_config({"scenario": "selftest", "zero_noise": True, "seeds": [1, 2]}).seed_list() == [None]


@pytest.mark.parametrize(
    "data",
    [
        {"scenario": "bogus"},
        {"scenario": "selftest", "delta": -0.1},
        {"scenario": "selftest", "lambda_grid": []},
        {"scenario": "selftest", "seeds": [-1]},
        {"scenario": "selftest", "grid": {"t_min": 1.0, "t_max": 5.0}},
        {"scenario": "selftest", "tolerances": {"pullback_schedule": [10.0, 5.0]}},
        {"scenario": "selftest", "tolerances": {"rule": "simpson"}},
        {"scenario": "selftest", "coefficients": {"beta": {"b": 1.0}}},
        {"scenario": "selftest", "unexpected": 1},
        {"scenario": "selftest", "workers": 0},
    ],
)
def test_invalid_configs(data):
    with pytest.raises(ConfigurationError) as info:
        load_config(data)
    assert info.value.exit_code == 2
    assert "invalid experiment config" in info.value.detail


def test_shipped_json_schema_lists_every_field():
    schema = json.loads((Path(__file__).parent.parent / "docs" / "experiment_config.schema.json").read_text(encoding="utf-8"))
    names = {field.alias or name for name, field in ExperimentConfig.model_fields.items()}
    assert set(schema["properties"]) == names
    assert schema["$defs"]["beta"]["properties"]["kind"]["enum"] == list(BETA_KINDS)
    assert schema["$defs"]["gamma"]["properties"]["kind"]["enum"] == list(GAMMA_KINDS)
    for section, model in (("grid", GridConfig), ("tolerances", ToleranceConfig), ("recurrence", RecurrenceConfig),
                           ("integrate", IntegrateConfig), ("verify", VerifyConfig)):
        assert set(schema["properties"][section]["properties"]) == set(model.model_fields)
