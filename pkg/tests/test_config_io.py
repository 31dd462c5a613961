import json

import numpy as np
import pytest
from conftest import random_unit
from hypothesis import given
from hypothesis import strategies as st

from micromtj.config import Axis, ConfigError, RunConfig, SweepSpec, from_dict, load_config, save_config
from micromtj.io import read_csv, read_ovf, write_csv, write_ovf
from micromtj.mesh import Mesh, VectorField


def test_empty_config_is_defaults(tmp_path):
    f = tmp_path / "c.json"
    f.write_text("{}")
    assert load_config(f) == RunConfig()
    assert load_config("defaults") == RunConfig()


def test_round_trip(tmp_path):
    cfg = from_dict({"material": {"D": 2e-3, "Ku0": 9e5}, "mesh": {"nx": 10, "ny": 12},
                     "pillar": {"x_range": [2, 8], "y_range": None}, "seed": 7})
    save_config(cfg, tmp_path / "c.json")
    assert load_config(tmp_path / "c.json") == cfg


def test_echo_writes_resolved_config(tmp_path):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"material": {"alpha": 0.05}}))
    load_config(f, echo_dir=tmp_path / "out")
    echoed = json.loads((tmp_path / "out" / "resolved_config.json").read_text())
    assert echoed["material"]["alpha"] == 0.05
    assert echoed["material"]["Ms"] == 1.1e6


@pytest.mark.parametrize("data, path", [
    ({"material": {"Ms": 0}}, "material.Ms"),
    ({"material": {"Mss": 1}}, "material.Mss"),
    ({"mesh": {"nx": 2.5}}, "mesh.nx"),
    ({"write": {"durations": [1e-9, 1e-9]}}, "write.durations"),
    ({"sweeps": {"dmi_window": {"axes": [{"name": "X", "min": 0, "max": 1, "count": 3}]}}},
     "sweeps.dmi_window.axes[0].name"),
    ({"vcma": {"shape": "cubic"}}, "vcma.shape"),
])
def test_errors_name_the_field(data, path):
    with pytest.raises(ConfigError) as e:
        from_dict(data)
    assert str(e.value).startswith(path + ":")


def test_json_parse_error(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{oops")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(f)


def test_axis_values_and_grid_order():
    spec = SweepSpec((Axis("Ku0", 1.0, 2.0, 2), Axis("D", 0.0, 1.0, 3)))
    assert spec.grid()[:3] == [{"Ku0": 1.0, "D": 0.0}, {"Ku0": 1.0, "D": 0.5}, {"Ku0": 1.0, "D": 1.0}]
    assert Axis("J", 1e11, 1e13, 3, "log").values() == pytest.approx([1e11, 1e12, 1e13])


def test_default_sweeps_meet_minimum_sizes():
    sw = RunConfig().sweeps
    assert [a.count for a in sw.phase_diagram.axes] == [5, 5]
    d = sw.dmi_window.axes[0]
    assert d.count >= 6 and d.min <= 0 and d.max >= 3e-3
    assert sw.gradient_curve.axes[0].count >= 4


def test_ovf_uniform_rows_and_header(tmp_path):
    mesh = Mesh(3, 2)
    write_ovf(VectorField.uniform(mesh, [0, 0, 1]), tmp_path / "u.ovf", t=1e-9, Ms=1.1e6)
    text = (tmp_path / "u.ovf").read_text().splitlines()
    assert text[0] == "# OOMMF OVF 2.0"
    data = [ln for ln in text if not ln.startswith("#")]
    assert data == ["0 0 1"] * 6
    _, hdr = read_ovf(tmp_path / "u.ovf")
    assert (hdr["xnodes"], hdr["ynodes"], hdr["znodes"]) == ("3", "2", "1")
    assert float(hdr["xstepsize"]) == 1e-9


@given(st.integers(0, 2**31 - 1))
def test_ovf_round_trip_bit_exact(tmp_path_factory, seed):
    mesh = Mesh(5, 4, dx=1.5e-9)
    m = random_unit(mesh, seed)
    path = tmp_path_factory.mktemp("ovf") / "m.ovf"
    write_ovf(m, path)
    back, _ = read_ovf(path)
    assert back.mesh == mesh
    assert np.array_equal(back.data, m.data)


def test_ovf_x_fastest_ordering(tmp_path):
    mesh = Mesh(2, 2)
    data = np.zeros((2, 2, 3))
    data[0, 1] = [1, 0, 0]  # iy = 0, ix = 1
    data[1, 0] = [0, 1, 0]
    data[0, 0] = data[1, 1] = [0, 0, 1]
    write_ovf(VectorField(mesh, data), tmp_path / "o.ovf")
    rows = [ln for ln in (tmp_path / "o.ovf").read_text().splitlines() if not ln.startswith("#")]
    assert rows == ["0 0 1", "1 0 0", "0 1 0", "0 0 1"]


def test_csv_exact_floats(tmp_path):
    vals = [0.1, 1 / 3, 1e-300, 2.5e12, True, None, "UniformUp", 7]
    write_csv(tmp_path / "t.csv", [f"c{i}" for i in range(len(vals))], [vals])
    cols, rows = read_csv(tmp_path / "t.csv")
    assert len(cols) == len(vals)
    assert [float(x) for x in rows[0][:4]] == vals[:4]
    assert rows[0][4:] == ["true", "", "UniformUp", "7"]
