import json

import pytest

from solon.cli import METRICS_COLUMNS, config_from_dict, config_to_dict, main, parse_config
from solon.errors import Infeasible, ParseError

MINIMAL = {
    "mechanism": {"P": 4, "s": 1, "r_c": 2},
    "task": {"n": 32, "m": 2, "gamma": 0.5, "iterations": 5},
}


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_minimal_config():
    rc = config_from_dict(MINIMAL)
    assert rc.mechanism.d == 2 and rc.mechanism.r == 4
    assert rc.attack.size == 0 and rc.weight_scheme == "chebyshev"


def test_round_trip():
    doc = dict(MINIMAL, attack={"kind": "rev-grad", "param": -100, "adversaries": [2]},
               weights={"scheme": "equispaced"})
    rc = config_from_dict(doc)
    assert config_from_dict(config_to_dict(rc)) == rc


def test_infeasible_cites_bound():
    doc = {"mechanism": {"P": 10, "s": 5, "r_c": 2}, "task": dict(MINIMAL["task"], m=4)}
    with pytest.raises(Infeasible, match=r"\(P - r_c\)/2"):
        config_from_dict(doc)


@pytest.mark.parametrize("field", ["P", "s", "r_c"])
def test_missing_mechanism_field(field):
    mech = {k: v for k, v in MINIMAL["mechanism"].items() if k != field}
    with pytest.raises(ParseError, match=f"mechanism.{field}"):
        config_from_dict(dict(MINIMAL, mechanism=mech))


def test_missing_task_field():
    task = {k: v for k, v in MINIMAL["task"].items() if k != "gamma"}
    with pytest.raises(ParseError, match="task.gamma"):
        config_from_dict(dict(MINIMAL, task=task))


@pytest.mark.parametrize("attack", [
    {"kind": "nope"},
    {"kind": "constant", "adversaries": [0, 1]},
    {"kind": "constant", "adversaries": [1], "count": 1},
    {"kind": "constant", "adversaries": ["a"]},
    {"kind": "alie", "resample": "yes"},
])
def test_bad_attack(attack):
    with pytest.raises(ParseError):
        config_from_dict(dict(MINIMAL, attack=attack))


def test_dimension_mismatch():
    with pytest.raises(ParseError, match="mechanism.d"):
        config_from_dict(dict(MINIMAL, mechanism=dict(MINIMAL["mechanism"], d=3)))


def test_bad_json_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"mechanism": {"P": 4,}\n}')
    with pytest.raises(ParseError, match="line 1"):
        parse_config(path)


def test_check_feasible(capsys):
    assert main(["check", "100", "5", "10", "--d", "200"]) == 0
    out = capsys.readouterr().out
    assert "r = 2s + r_c = 20" in out and "q = P / r = 5" in out and "= 20" in out


def test_check_infeasible(capsys):
    assert main(["check", "10", "5", "2"]) == 1
    assert "(P - r_c)/2 = 4" in capsys.readouterr().out
    assert main(["check", "6", "1", "2"]) == 1
    assert "nearest feasible P is 8" in capsys.readouterr().out


def test_run_writes_outputs(tmp_path):
    cfg = _write(tmp_path, dict(MINIMAL, attack={"kind": "constant", "adversaries": [3]}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--no-timing"]) == 0
    lines = (tmp_path / "o" / "metrics.csv").read_text().splitlines()
    assert lines[0] == ",".join(METRICS_COLUMNS)
    assert len(lines) == 6
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["detection"] == {"true_positive": 5, "false_positive": 0,
                                    "false_negative": 0, "rounds_exact": 5}


def test_run_byte_identical(tmp_path):
    cfg = _write(tmp_path, dict(MINIMAL, attack={"kind": "gaussian", "count": 1, "resample": True}))
    for name in ("a", "b"):
        main(["run", "--config", str(cfg), "--out", str(tmp_path / name), "--no-timing"])
    for f in ("metrics.csv", "summary.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_run_config_error(tmp_path, capsys):
    cfg = _write(tmp_path, {"mechanism": {"P": 4}})
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "config error" in capsys.readouterr().err
