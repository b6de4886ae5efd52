import json
import math

import numpy as np
import pandas as pd
import pytest

from pbl.models.results import QuasiSolutionTrace
from pbl.services.bifurcation import BifurcationDiagram, DiagramRow
from pbl.services.export import config_hash, dumps, export_plot_data, write_csv, write_json, write_manifest


@pytest.fixture
def diagram():
    rows = [
        DiagramRow(lam=-1.0, tau=0.0, seed=7, x_plus=1e-9, x_minus=-1e-9, stability="asymptotically_stable"),
        DiagramRow(lam=-0.1, tau=0.0, seed=7, x_plus=2e-9, x_minus=-2e-9, stability="asymptotically_stable"),
        DiagramRow(lam=0.1, tau=0.0, seed=7, x_plus=math.sqrt(0.1), x_minus=-math.sqrt(0.1), truncation_R=92.1),
        DiagramRow(lam=1.0, tau=0.0, seed=7, x_plus=1.0 / 3.0, x_minus=-1.0 / 3.0, truncation_R=9.2),
    ]
    return BifurcationDiagram(scenario="pitchfork_exact", tau=0.0, seeds=[7], lam_grid=[-1, -0.1, 0.1, 1], rows=rows)


def test_diagram_csv(diagram, tmp_path):
    written = export_plot_data(diagram, tmp_path, "pitchfork")
    lines = written["csv"].read_text().splitlines()
    assert lines[0] == "lambda,tau,seed,x_plus,x_minus,lower_bound,upper_bound,stability,truncation_R,status"
    assert len(lines) == 5
    assert lines[4].startswith("1,0,7,0.33333333333333331,-0.33333333333333331,")
    assert lines[4].endswith(",9.1999999999999993,ok")


def test_repeat_export_is_byte_identical(diagram, tmp_path):
    first = export_plot_data(diagram, tmp_path / "a", "pitchfork")
    second = export_plot_data(diagram, tmp_path / "b", "pitchfork")
    for fmt in ("csv", "dat"):
        assert first[fmt].read_bytes() == second[fmt].read_bytes()
    assert not list(tmp_path.glob("**/*.tmp"))


def test_gnuplot_columns(diagram, tmp_path):
    dat = export_plot_data(diagram, tmp_path, "pitchfork", fmt="dat")
    assert set(dat) == {"dat"}
    lines = dat["dat"].read_text().splitlines()
    assert lines[0] == "# lambda x_plus x_minus"
    assert lines[1].split() == ["-1", "1.0000000000000001e-09", "-1.0000000000000001e-09"]


def test_trace_export(tmp_path):
    trace = QuasiSolutionTrace(taus=np.array([0.0, 0.5]), values=np.array([1.0, 2.0]), branch="plus", lam=1.0, seed=7)
    written = export_plot_data(trace, tmp_path, "trace")
    assert written["csv"].read_text() == "tau,value\n0,1\n0.5,2\n"
    assert written["dat"].read_text() == "# tau value\n0 1\n0.5 2\n"


def test_unknown_artifact(tmp_path):
    with pytest.raises(TypeError):
        export_plot_data(42, tmp_path, "nothing")


def test_json_is_sorted_and_finite(tmp_path):
    text = dumps({"b": float("nan"), "a": np.float64(1.5), "c": np.arange(2), "d": np.bool_(True)})
    assert json.loads(text) == {"a": 1.5, "b": None, "c": [0, 1], "d": True}
    assert text.index('"a"') < text.index('"b"')
    path = write_json({"x": math.inf}, tmp_path / "out.json")
    assert json.loads(path.read_text()) == {"x": None}


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1.0, 2.0]}) == config_hash({"b": [1.0, 2.0], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_manifest(tmp_path):
    csv = write_csv(pd.DataFrame({"x": [1.0]}), tmp_path / "z.csv")
    path = write_manifest(tmp_path, "selftest", {"seeds": [7]}, [csv, tmp_path / "a.json"], [7], 0, started=0.0)
    manifest = json.loads(path.read_text())
    assert manifest["files"] == ["a.json", "z.csv"]
    assert manifest["config_hash"] == config_hash({"seeds": [7]})
    assert manifest["seeds"] == [7]
    assert manifest["exit_code"] == 0
    assert "wall_clock_seconds" not in manifest
    assert set(manifest["versions"]) >= {"pbl", "numpy", "pandas", "scipy", "pydantic"}
