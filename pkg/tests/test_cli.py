import json

import pytest

from ehrfan.cli import main
from helpers import BABAEE_HUH_CONES, BABAEE_HUH_RAYS


@pytest.fixture()
def files(tmp_path):
    docs = {
        "f1_fan.json": {
            "ambient_dim": 2,
            "rays": [[1, 0], [1, 1], [0, 1], [-1, 0], [0, -1]],
            "maximal_cones": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]],
        },
        "ones.json": {"values": [1, 1, 1, 1, 1]},
        "babaee_huh.json": {
            "ambient_dim": 4,
            "rays": [list(r) for r in BABAEE_HUH_RAYS],
            "maximal_cones": [list(c) for c in BABAEE_HUH_CONES],
        },
        "u23.json": {"type": "uniform", "rank": 2, "n": 3},
        "zero3.json": {"values": [0, 0, 0]},
        "line_fan.json": {"ambient_dim": 1, "rays": [[1], [-1]], "maximal_cones": [[0], [1]]},
        "huge_pe.json": {"terms": [{"c": 1, "values": [str(2 ** 70), str(-(2 ** 70))]}]},
        "torsion_fan.json": {"ambient_dim": 2, "rays": [[1, 0], [1, 2]],
                             "maximal_cones": [[0], [1]]},
        "pl2.json": {"values": [1, 0]},
    }
    for name, doc in docs.items():
        (tmp_path / name).write_text(json.dumps(doc))
    return tmp_path


def run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_ehrhart_eval_example(files, capsys):
    code, out = run(capsys, ["ehrhart", "eval",
                             "--fan", str(files / "f1_fan.json"),
                             "--pl", str(files / "ones.json")])
    assert code == 0
    assert json.loads(out) == {"chi": 8}


def test_ehrhart_check_babaee_huh(files, capsys):
    code, out = run(capsys, ["ehrhart", "check", "--fan", str(files / "babaee_huh.json")])
    assert code == 1
    err = json.loads(out)["error"]
    assert err["code"] == "NOT_EHRHART"
    assert err["witness"]["residual"] == [-4, -2, -2, -2]


def test_matroid_chi_example(files, capsys):
    code, out = run(capsys, ["matroid", "chi",
                             "--matroid", str(files / "u23.json"),
                             "--pl", str(files / "zero3.json")])
    assert code == 0
    assert json.loads(out) == {"chi": 1}


def test_fan_validate_and_subcommands(files, capsys):
    code, out = run(capsys, ["fan", "validate", "--fan", str(files / "f1_fan.json")])
    assert code == 0
    assert json.loads(out)["complete"] is True
    code, out = run(capsys, ["fan", "star", "--fan", str(files / "f1_fan.json"),
                             "--cone", "1"])
    assert code == 0
    assert json.loads(out)["ray_lift"] == [0, 2]
    code, out = run(capsys, ["fan", "subdivide", "--fan", str(files / "f1_fan.json"),
                             "--cone", "1,2"])
    assert code == 0
    assert json.loads(out)["new_ray_index"] == 5
    code, out = run(capsys, ["fan", "product", "--fan", str(files / "line_fan.json"),
                             "--fan2", str(files / "line_fan.json")])
    assert code == 0
    assert len(json.loads(out)["fan"]["rays"]) == 4


def test_volume_and_polytope_commands(files, capsys):
    code, out = run(capsys, ["volume", "eval", "--fan", str(files / "f1_fan.json"),
                             "--pl", str(files / "ones.json")])
    assert code == 0 and json.loads(out) == {"volume": 7}
    code, out = run(capsys, ["polytope", "count", "--fan", str(files / "f1_fan.json"),
                             "--pl", str(files / "ones.json")])
    assert code == 0 and json.loads(out)["count"] == 8
    code, out = run(capsys, ["polytope", "count", "--fan", str(files / "f1_fan.json"),
                             "--pl", str(files / "ones.json"), "--interior"])
    assert code == 0 and json.loads(out)["count"] == 1
    code, out = run(capsys, ["polytope", "altsum", "--fan", str(files / "f1_fan.json"),
                             "--pl", str(files / "ones.json")])
    assert code == 0 and json.loads(out) == {"chi": 8}


def test_deterministic_output(files, capsys):
    _, first = run(capsys, ["ehrhart", "poly", "--fan", str(files / "f1_fan.json")])
    _, second = run(capsys, ["ehrhart", "poly", "--fan", str(files / "f1_fan.json")])
    assert first == second


def test_big_integers_become_strings(files, capsys):
    code, out = run(capsys, ["pe", "normalform", "--fan", str(files / "line_fan.json"),
                             "--pe", str(files / "huge_pe.json")])
    assert code == 0
    values = json.loads(out)["pe"]["terms"][0]["values"]
    assert values == [str(2 ** 70), str(-(2 ** 70))]


def test_malformed_input_exits_2(files, capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = run(capsys, ["fan", "validate", "--fan", str(bad)])
    assert code == 2
    assert json.loads(out)["error"]["code"] == "MALFORMED_INPUT"
    code, out = run(capsys, ["fan", "star", "--fan", str(files / "f1_fan.json")])
    assert code == 2  # missing --cone


def test_missing_file_exits_2(files, capsys):
    code, out = run(capsys, ["fan", "validate", "--fan", str(files / "nope.json")])
    assert code == 2
    assert json.loads(out)["error"]["code"] == "MALFORMED_INPUT"


def test_acknowledge_choice_dependence_flag(files, capsys):
    code, out = run(capsys, ["ehrhart", "eval", "--fan", str(files / "torsion_fan.json"),
                             "--pl", str(files / "pl2.json")])
    assert code == 1
    assert json.loads(out)["error"]["code"] == "NOT_EHRHART"
    code, out = run(capsys, ["ehrhart", "eval", "--fan", str(files / "torsion_fan.json"),
                             "--pl", str(files / "pl2.json"),
                             "--acknowledge-choice-dependence"])
    assert code == 0
    assert isinstance(json.loads(out)["chi"], int)
