import json
import math

import numpy as np
import pytest

from spp_sim.config import SCHEMA, load_config, parse_config
from spp_sim.errors import ConfigParseError, ValidationError
from spp_sim.io import dumps_json, fmt_float, to_jsonable, write_csv


def test_flat_and_json_forms_agree():
    flat = parse_config("""
        # anchors
        material.fermi_energy_ev = 0.5
        ensemble.n_emitters = 2e3
        outputs.figures = no
    """)
    js = parse_config(json.dumps({"material": {"fermi_energy_ev": 0.5},
                                  "ensemble": {"n_emitters": 2000},
                                  "outputs": {"figures": False}}))
    assert flat.values == js.values
    assert flat["ensemble.n_emitters"] == 2000 and isinstance(flat["ensemble.n_emitters"], int)
    assert flat["outputs.figures"] is False
    assert flat.input_hash == js.input_hash
    assert set(flat.values) == set(SCHEMA)


@pytest.mark.parametrize("text", [
    "", "   \n# only a comment\n", "material.fermi_energy_ev", "bogus.key = 1",
    "ensemble.n_emitters = 1.5", "material.fermi_energy_ev = nan",
    "outputs.figures = maybe", "{not json", "a = 1\na = 2",
])
def test_parse_errors(text):
    with pytest.raises(ConfigParseError):
        parse_config(text)


def test_validation_is_separate():
    cfg = parse_config("material.fermi_energy_ev = -0.5")
    with pytest.raises(ValidationError):
        cfg.validate()


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigParseError):
        load_config(tmp_path / "absent.cfg")


def test_hash_tracks_values():
    a = parse_config("ensemble.width_l_nm = 1000")
    b = parse_config("ensemble.width_l_nm = 100")
    assert a.input_hash != b.input_hash
    assert a.input_hash == parse_config("ensemble.width_l_nm = 1e3").input_hash


def test_float_formatting_round_trips():
    for x in (0.1, 1 / 3, 6.02214076e23, -2.5e-300):
        assert float(fmt_float(x)) == x
    assert to_jsonable(np.float64(math.nan)) is None
    assert to_jsonable(np.arange(3)) == [0, 1, 2]


def test_json_is_canonical():
    text = dumps_json({"b": 0.1, "a": [1, np.float64(2.5)], "c": {"z": None, "y": True}})
    assert json.loads(text) == {"a": [1, 2.5], "b": 0.1, "c": {"y": True, "z": None}}
    assert text.index('"a"') < text.index('"b"')
    assert dumps_json({"x": 1 / 3}) == dumps_json({"x": 1 / 3})


def test_csv_writer(tmp_path):
    path = tmp_path / "out.csv"
    write_csv(path, ["x", "y"], [np.array([0.1, 0.2]), np.array([1 / 3, 2.0])])
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y"
    assert [float(v) for v in lines[1].split(",")] == [0.1, 1 / 3]


def test_shipped_reference_config_parses():
    from pathlib import Path
    cfg = load_config(Path(__file__).parent.parent / "configs" / "reference.cfg")
    cfg.validate()
    assert cfg["ensemble.n_emitters"] == 10000
    assert cfg["dynamics.varpi_gamma"] == 10.0
