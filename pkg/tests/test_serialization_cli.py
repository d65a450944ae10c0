import json

import pytest

from finpot import (
    MalformedFile,
    UnboundedTail,
    canonical_json,
    load_operator,
    op_distance,
    operator_from_obj,
    operator_to_obj,
    paper_example,
    save_operator,
)
from finpot.cli import main


UNBOUNDED_FILE = {
    "schema_version": "1",
    "operator": {
        "ambient": "infinite",
        "cutoff": 1,
        "block": [[[0, 0]]],
        "rank_one": [
            {
                "left": {"finite": {"1": [1, 0]}, "tails": []},
                "right": {"finite": {}, "tails": [
                    {"kind": "power", "coeff": [1, 0], "exponent": -1, "start": 2}
                ]},
            }
        ],
    },
}


# -- serialization -------------------------------------------------------------


def test_roundtrip_example(tmp_path, example_op):
    path = tmp_path / "example.json"
    save_operator(example_op, path)
    loaded = load_operator(path)
    assert op_distance(loaded, example_op) < 1e-14
    assert canonical_json(loaded) == canonical_json(example_op)


def test_serialize_parse_serialize_byte_stable(tmp_path, example_op):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_operator(example_op, p1)
    save_operator(load_operator(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_decimal_string_numbers():
    obj = json.loads(json.dumps(operator_to_obj(paper_example())))
    obj["operator"]["block"][0][0] = ["1", "1"]
    op = operator_from_obj(obj)
    assert op.block[0, 0] == 1 + 1j


def test_unbounded_tail_rejected_at_parse(tmp_path):
    path = tmp_path / "unbounded.json"
    path.write_text(json.dumps(UNBOUNDED_FILE))
    with pytest.raises(UnboundedTail):
        load_operator(path)


@pytest.mark.parametrize("mutate, where_part", [
    (lambda o: o.update(schema_version="2"), "schema_version"),
    (lambda o: o["operator"].pop("cutoff"), "cutoff"),
    (lambda o: o["operator"].update(block=[[[0, 0]], [[0, 0]]]), "block"),
    (lambda o: o["operator"]["block"][0].__setitem__(0, [1]), "block[0][0]"),
    (lambda o: o["operator"].update(ambient="sometimes"), "ambient"),
    (lambda o: o["operator"]["rank_one"][0]["right"]["tails"][0].update(kind="odd"),
     "kind"),
    (lambda o: o["operator"]["rank_one"][0]["left"]["finite"].update({"x": [1, 0]}),
     "finite"),
])
def test_malformed_files_are_located(mutate, where_part):
    obj = json.loads(json.dumps(UNBOUNDED_FILE))
    mutate(obj)
    with pytest.raises(MalformedFile) as err:
        operator_from_obj(obj)
    assert where_part in str(err.value)


def test_invalid_json_reports_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"schema_version": "1",')
    with pytest.raises(MalformedFile) as err:
        load_operator(path)
    assert "line" in str(err.value)


# -- command line --------------------------------------------------------------


@pytest.fixture()
def example_file(tmp_path, example_op):
    path = tmp_path / "example.json"
    save_operator(example_op, path)
    return path


def test_cli_example_check(capsys):
    code = main(["example", "--check"])
    out = capsys.readouterr().out
    assert code == 0
    assert "tr = 4 + 1i" in out
    assert "index = 2" in out
    assert "det(Id + f) = 31 - 1i" in out


def test_cli_example_writes_file(tmp_path, capsys):
    out_path = tmp_path / "written.json"
    assert main(["example", "-o", str(out_path)]) == 0
    capsys.readouterr()
    assert op_distance(load_operator(out_path), paper_example()) < 1e-14


def test_cli_analyze_human(example_file, capsys):
    assert main(["analyze", str(example_file)]) == 0
    out = capsys.readouterr().out
    assert "index:          2" in out
    assert "core dimension: 3" in out
    assert "tate" in out


def test_cli_analyze_json(example_file, capsys):
    assert main(["analyze", str(example_file), "--json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["index"] == 2
    assert obj["dim_w"] == 3
    assert obj["traces"]["tate"] == pytest.approx([4.0, 1.0], abs=1e-10)


def test_cli_analyze_unbounded_exits_1(tmp_path, capsys):
    path = tmp_path / "unbounded.json"
    path.write_text(json.dumps(UNBOUNDED_FILE))
    assert main(["analyze", str(path)]) == 1
    err = capsys.readouterr().err
    assert "UnboundedTail" in err


def test_cli_trace_and_det(example_file, capsys):
    assert main(["trace", str(example_file)]) == 0
    out = capsys.readouterr().out
    assert "tate" in out and "4 + 1i" in out
    assert main(["det", str(example_file), "--json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["det_restriction"] == pytest.approx([31.0, -1.0], abs=1e-9)


def test_cli_adjoint_roundtrip(example_file, tmp_path, capsys):
    out_path = tmp_path / "adjoint.json"
    assert main(["adjoint", str(example_file), "-o", str(out_path)]) == 0
    capsys.readouterr()
    star = load_operator(out_path)
    assert op_distance(star, paper_example().adjoint()) < 1e-12
    # input file untouched
    assert op_distance(load_operator(example_file), paper_example()) < 1e-14


def test_cli_verify_file(example_file, capsys):
    assert main(["verify", str(example_file)]) == 0
    out = capsys.readouterr().out
    assert "T1" in out and "pass" in out


def test_cli_verify_random(capsys):
    assert main(["verify", "--random", "--seed", "7", "--cases", "3"]) == 0
    out = capsys.readouterr().out
    assert "3/3 operators passed" in out


def test_cli_verify_random_json(capsys):
    assert main(["verify", "--random", "--seed", "1", "--cases", "2", "--json"]) == 0
    reports = json.loads(capsys.readouterr().out)
    assert len(reports) == 2
    assert all(r["passed"] for r in reports)


def test_cli_missing_file_exits_1(capsys):
    assert main(["analyze", "/nonexistent/op.json"]) == 1


def test_cli_verify_without_source_exits_1(capsys):
    assert main(["verify"]) == 1


def test_cli_usage_error_exits_1(capsys):
    assert main(["frobnicate"]) == 1
    assert main([]) == 1


def test_cli_bad_tol_exits_1(example_file, capsys):
    assert main(["analyze", str(example_file), "--tol", "-1"]) == 1
