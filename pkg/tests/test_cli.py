import json

import pytest

from planarcc.cli import (EXIT_CHECKS, EXIT_MISMATCH, EXIT_OK, EXIT_SCHEMA, EXIT_UNSATURATED,
                          EXIT_USAGE, main)


@pytest.fixture(scope="module")
def census_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("census") / "c3.json"
    assert main(["census", "--masses", "1,2,3", "--seed", "1", "--out", str(out)]) == EXIT_OK
    return out


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def test_bounds_text(capsys):
    assert main(["bounds", "--n", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Ignored Palmore" in out
    assert out.splitlines()[4].split()[-4:] == ["6", "16", "12", "34"]


def test_bounds_json_and_csv(capsys):
    main(["bounds", "--n", "5", "--format", "json"])
    data = json.loads(capsys.readouterr().out)
    assert data["rows"]["mccord"] == {"coeffs": [2, 20, 72, 60], "total": 154}
    main(["bounds", "--n", "3", "--format", "csv"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "row,index_0,index_1,total"
    assert lines[1] == "bouquet,1,2,3"


@pytest.mark.parametrize("argv", [["bounds", "--n", "2"], ["bounds"], ["frobnicate"],
                                  ["census", "--masses", "1,1,-1"],
                                  ["census", "--masses", "1,1"],
                                  ["census", "--masses", "1,1,x"],
                                  ["census", "--masses", "1,1,1", "--n", "4"],
                                  ["census", "--masses", "1,1,1", "--epsilon-sweep", "0.1"]])
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE


def test_census_outputs(census_file, capsys):
    data = json.loads(census_file.read_text())
    assert data["morse_poly"] == [2, 3] and data["total"] == 5
    assert data["run_config"]["seed"] == 1
    assert "workers" not in data["run_config"]
    csv_lines = census_file.with_suffix(".csv").read_text().splitlines()
    assert len(csv_lines) == 6


def test_verify_clean(census_file, capsys):
    assert main(["verify", str(census_file)]) == EXIT_OK
    assert "ok: 5 records" in capsys.readouterr().out


def _tampered(census_file, tmp_path, change):
    data = json.loads(census_file.read_text())
    change(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_verify_perturbed_position(census_file, tmp_path):
    def change(d):
        d["records"][0]["positions"][0][0] += 1e-3
    assert main(["verify", _tampered(census_file, tmp_path, change)]) == EXIT_MISMATCH


def test_verify_altered_index(census_file, tmp_path):
    def change(d):
        d["records"][0]["index"] += 1
    assert main(["verify", _tampered(census_file, tmp_path, change)]) == EXIT_MISMATCH


def test_verify_altered_counts(census_file, tmp_path):
    def change(d):
        d["morse_poly"] = [3, 2]
    assert main(["verify", _tampered(census_file, tmp_path, change)]) == EXIT_MISMATCH


def test_verify_duplicate_record(census_file, tmp_path):
    def change(d):
        d["records"].append(dict(d["records"][0], id=len(d["records"])))
    assert main(["verify", _tampered(census_file, tmp_path, change)]) == EXIT_MISMATCH


@pytest.mark.parametrize("change", [lambda d: d.pop("records"),
                                    lambda d: d.update(format="other"),
                                    lambda d: d["records"][0].update(orientation=2),
                                    lambda d: d.update(masses=[1.0, 2.0])])
def test_verify_schema_violation(census_file, tmp_path, change):
    assert main(["verify", _tampered(census_file, tmp_path, change)]) == EXIT_SCHEMA


def test_verify_unreadable(tmp_path):
    bad = tmp_path / "x.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == EXIT_SCHEMA
    assert main(["verify", str(tmp_path / "missing.json")]) == EXIT_SCHEMA


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"seed": 4, "window_min": 300, "max_iter": 60}))
    out = tmp_path / "c.json"
    assert main(["census", "--masses", "2,1,1", "--config", str(cfg), "--seed", "9",
                 "--out", str(out)]) == EXIT_OK
    rc = json.loads(out.read_text())["run_config"]
    assert (rc["seed"], rc["window_min"], rc["max_iter"]) == (9, 300, 60)
    cfg.write_text(json.dumps({"sede": 4}))
    assert run(["census", "--masses", "2,1,1", "--config", str(cfg), "--out", str(out)]) \
        == EXIT_USAGE


def test_unsaturated_exit_code(tmp_path):
    out = tmp_path / "u.json"
    code = main(["census", "--masses", "1,2,3", "--starts-budget", "20",
                 "--window-min", "100000", "--out", str(out)])
    assert code == EXIT_UNSATURATED
    assert json.loads(out.read_text())["saturated"] is False


def test_epsilon_sweep_files(tmp_path, capsys):
    out = tmp_path / "s.json"
    code = main(["census", "--masses", "1,1,eps", "--epsilon-sweep", "0.5,0.1",
                 "--out", str(out)])
    assert code == EXIT_OK
    assert (tmp_path / "s_eps0.5.json").exists() and (tmp_path / "s_eps0.1.json").exists()
    data = json.loads((tmp_path / "s_eps0.1.json").read_text())
    assert data["epsilon"] == 0.1 and data["masses"] == [1.0, 1.0, 0.1]
    assert data["epsilon_sweep"] == [0.5, 0.1]


def test_exit_code_constants_distinct():
    codes = {EXIT_OK, EXIT_CHECKS, EXIT_UNSATURATED, EXIT_MISMATCH, EXIT_SCHEMA, EXIT_USAGE}
    assert len(codes) == 6
