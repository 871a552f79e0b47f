import json

import pandas as pd
import pytest
from pydantic import ValidationError

from src.cli import FACTS_COLUMNS, ExperimentConfig, main
from src.core import FiniteMMSpace
from src.modelgeom import hyouka_max_c
from src.samplers import CURVE_COLUMNS
from tests.oracles import simplex_distances


def _read_csv(path):
    return pd.read_csv(path, comment="#")


def _csv_header(path):
    with open(path, encoding="utf-8") as f:
        first = f.readline()
    assert first.startswith("# config: ")
    return json.loads(first[len("# config: "):])


def _read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


# --- bounds ----------------------------------------------------------------

def test_so_bounds(tmp_path):
    out = str(tmp_path / "so.csv")
    assert main(["--out", out, "bounds", "so", "--n", "4", "--m", "3"]) == 0
    table = _read_csv(out)
    assert table["lower"].tolist() == [0.5]
    assert table["status"].tolist() == ["ok"]


def test_sphere_bounds(tmp_path):
    out = str(tmp_path / "sphere.csv")
    assert main(["--out", out, "bounds", "sphere", "--m", "2", "--n", "10"]) == 0
    lower = _read_csv(out)["lower"].iloc[0]
    assert 0.33 <= lower <= 0.36
    assert lower == pytest.approx(hyouka_max_c(2, 10, 1.0, 1.0), rel=1e-15)


def test_equal_dimensions_are_not_applicable(tmp_path):
    out = str(tmp_path / "equal.csv")
    assert main(["--out", out, "bounds", "sphere", "--m", "5", "--n", "5"]) == 0
    table = _read_csv(out)
    assert table["status"].tolist() == ["not-applicable"]
    assert table["lower"].isna().all()


# --- box -------------------------------------------------------------------

def test_box_between_saved_spaces(tmp_path, two_atom, space_file):
    x = space_file(two_atom(1.0), "x.json")
    y = space_file(two_atom(0.4), "y.json")
    out = str(tmp_path / "box.json")
    assert main(["--out", out, "box", "--x", x, "--y", y, "--search", "exact"]) == 0
    record = _read_json(out)
    assert record["result"]["upper"] == pytest.approx(0.5, abs=1e-12)
    assert record["config"]["command"] == "box"

    out_same = str(tmp_path / "same.json")
    assert main(["--out", out_same, "box", "--x", x, "--y", x, "--search", "exact"]) == 0
    assert _read_json(out_same)["result"]["upper"] == 0.0


def test_box_exact_search_refuses_large_plans(tmp_path, space_file):
    x = space_file(FiniteMMSpace.uniform(simplex_distances(5)), "five.json")
    y = space_file(FiniteMMSpace.uniform(simplex_distances(3)), "three.json")
    out = str(tmp_path / "box.json")
    assert main(["--out", out, "box", "--x", x, "--y", y, "--search", "exact"]) == 3


def test_missing_space_file(tmp_path):
    missing = str(tmp_path / "missing.json")
    assert main(["box", "--x", missing, "--y", missing]) == 4


# --- concentration ---------------------------------------------------------

def test_empty_dimension_grid_writes_header_only(tmp_path):
    out = str(tmp_path / "empty.csv")
    assert main(["--out", out, "concentration"]) == 0
    table = _read_csv(out)
    assert list(table.columns) == CURVE_COLUMNS
    assert table.empty


def test_hamming_concentration_row(tmp_path):
    out = str(tmp_path / "cube.csv")
    assert main(["--out", out, "concentration", "--kind", "hamming", "--dims", "8", "--kappa", "0.1", "--sweeps", "0"]) == 0
    row = _read_csv(out).iloc[0]
    assert row["N"] == 256
    assert row["anchor_value"] == pytest.approx(0.5)
    assert row["binomial_exact"] == pytest.approx(row["anchor_value"])
    assert row["tail_eps"] == pytest.approx(0.25)
    assert 0.0 <= row["tail_mass"] <= 1.0


# --- certify ---------------------------------------------------------------

def test_certify_sphere_chain(tmp_path):
    c = repr(hyouka_max_c(2, 10, 1.0, 1.0))
    out = str(tmp_path / "cert.json")
    assert main(["--out", out, "certify", "--x", "sphere:10", "--y", "sphere:2", "--a", c, "--c", c]) == 0
    assert _read_json(out)["result"]["certified"]


def test_certify_reversed_chain_is_not_an_error(tmp_path):
    out = str(tmp_path / "cert.json")
    assert main(["--out", out, "certify", "--x", "sphere:2", "--y", "sphere:10", "--a", "0.3", "--c", "0.3"]) == 0
    result = _read_json(out)["result"]
    assert not result["certified"]
    assert result["lower"] == 0.0


def test_certify_rejects_c_of_one(tmp_path):
    out = str(tmp_path / "cert.json")
    assert main(["--out", out, "certify", "--x", "sphere:3", "--y", "sphere:2", "--a", "0.5", "--c", "1"]) == 2


# --- facts -----------------------------------------------------------------

def test_facts_table(tmp_path):
    out = str(tmp_path / "facts.csv")
    assert main(["--out", out, "facts"]) == 0
    assert list(_read_csv(out).columns) == FACTS_COLUMNS

    out_so = str(tmp_path / "so.csv")
    assert main(["--out", out_so, "facts", "--kind", "so", "--dims", "1", "2"]) == 0
    assert len(_read_csv(out_so)) == 1


# --- configuration ---------------------------------------------------------

def test_config_file_supplies_required_flags(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("m=2\nn=10\n", encoding="utf-8")
    out = str(tmp_path / "sphere.csv")
    assert main(["--config", str(config), "--out", out, "bounds", "sphere"]) == 0
    lower = _read_csv(out)["lower"].iloc[0]
    assert 0.33 <= lower <= 0.36


def test_flags_override_config_file(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("seed=5\n", encoding="utf-8")
    out = str(tmp_path / "facts.csv")
    assert main(["--config", str(config), "--seed", "7", "--out", out, "facts", "--kind", "sphere", "--dims", "2"]) == 0
    assert _csv_header(out)["seed"] == 7

    assert main(["--config", str(config), "--out", out, "facts", "--kind", "sphere", "--dims", "2"]) == 0
    assert _csv_header(out)["seed"] == 5


def test_unknown_config_key(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("colour=blue\n", encoding="utf-8")
    assert main(["--config", str(config), "facts"]) == 2


def test_experiment_config_forbids_extra_keys():
    with pytest.raises(ValidationError):
        ExperimentConfig(command="facts", seed=0, tol=1e-9, colour="blue")
