import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ggtlab import cli
from ggtlab.errors import ValidationError


def run_main(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_hyperbolic_example(capsys):
    code, out, _ = run_main(["dynamics", "--matrix", "2,1;1,1", "--op", "hyperbolic"], capsys)
    assert code == 0
    assert json.loads(out)["rows"] == [{"matrix": "2,1;1,1", "hyperbolic": True}]


def test_packing_csv_example(capsys):
    code, out, _ = run_main(["packing", "--group", "poly:2:2,1;1,1", "--subgroup", "t",
                             "--r", "3", "--ball", "8", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows == [{"r": "3", "R": "8", "N_hat": "5", "exact": "True", "unconfirmed_pairs": "0"}]


def test_quasiconvexity_table_example(capsys):
    code, out, _ = run_main(["hull", "quasiconvexity", "--group", "FmxZn:2:1", "--subgroup",
                             "a;b", "--radius", "2,4", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["R"] for r in rows] == ["2", "4"]
    assert all(abs(float(r["nu_hat"]) - 15 / 31) < 1e-11 for r in rows)


def test_validation_examples():
    missing_seed = cli.ExperimentConfig("hull", "cocompactness",
                                        {"group": "FmxZn:2:1", "subgroup": "a;b", "radius": 3})
    assert any(e.startswith("seed:") for e in cli.validate(missing_seed))
    too_big = cli.ExperimentConfig("packing", "profile",
                                   {"group": "Zn:2", "subgroup": "1,0", "r": 5, "ball": 3})
    assert any(e.startswith("r:") for e in cli.validate(too_big))
    ok = cli.ExperimentConfig("packing", "profile",
                              {"group": "Zn:2", "subgroup": "1,0", "r": 2, "ball": 3})
    assert cli.validate(ok) == []


def test_validation_field_messages():
    c = cli.ExperimentConfig("dynamics", "spectrum", {"radius": -1, "bogus": 1}, format="xml")
    errs = cli.validate(c)
    fields = {e.split(":")[0] for e in errs}
    assert {"format", "radius", "bogus", "matrix"} <= fields
    assert cli.validate(cli.ExperimentConfig("nope")) == ["subcommand: unknown 'nope'"]
    with pytest.raises(ValidationError):
        cli.run(c)
    with pytest.raises(ValidationError):
        cli.ExperimentConfig.from_dict({"subcommand": "sol", "colour": 1})


def test_seed_needed_only_when_subsampling():
    base = {"group": "FmxZn:2:1", "subgroup": "a;b", "radius": 2}
    assert cli.validate(cli.ExperimentConfig("hull", "quasiconvexity", dict(base))) == []
    sub = dict(base, max_pairs=5)
    assert cli.validate(cli.ExperimentConfig("hull", "quasiconvexity", sub)) == \
        ["seed: required for sampled experiments"]


@pytest.mark.parametrize("args,code", [
    (["dynamics", "--matrix", "2,1;1,1"], 0),
    (["packing", "--group", "Zn:2", "--subgroup", "1,0", "--r", "5", "--ball", "3"], 2),
    (["hull", "quasiconvexity", "--group", "Fm:2", "--subgroup", "a", "--radius", "2"], 2),
    (["hull", "powers", "--group", "FmxZn:2:2", "--subgroup", "a|1,0;b|0,1", "--radius", "3"], 3),
    (["cubing", "build", "--group", "Zn:2", "--nu", "0", "--radius", "4"], 4),
])
def test_exit_codes(args, code, capsys):
    got, out, err = run_main(args, capsys)
    assert got == code
    if code in (2, 4):
        assert "error" in json.loads(err) and out == ""


def test_parameter_echo_round_trip():
    c = cli.ExperimentConfig("cubing", "width", {"group": "Zn:2", "subgroup": "1,0",
                                                 "extra": "0,1", "nu": 0, "radius": 5}, seed=7)
    rec = cli.run(c)
    back = cli.ExperimentConfig.from_dict(rec["params"])
    assert back == c
    assert rec["rows"] == [{"pairs": 14, "width": 2}]


def test_config_file_and_flags(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"subcommand": "sol", "op": "lower",
                               "params": {"p1": "0,0,0", "p2": "8,0,0"}}))
    code, out, _ = run_main(["--config", str(cfg), "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "lower_bound"
    assert abs(float(out.splitlines()[1]) - 2 * math.log(8)) < 1e-9
    code, _, err = run_main(["--config", str(tmp_path / "missing.json")], capsys)
    assert code == 2


EXPERIMENTS = [
    ["dynamics", "spectrum", "--matrix", "2,1,0;1,1,0;0,0,1"],
    ["growth", "--group", "poly:2:2,1;1,1", "--subgroup", "t", "--ball", "6"],
    ["sol", "distortion", "--matrix", "2,1;1,1", "--samples", "20", "--seed", "5"],
    ["hull", "cocompactness", "--group", "FmxZn:2:1", "--subgroup", "a|0;b|1", "--radius", "3",
     "--samples", "200", "--seed", "9"],
    ["cubing", "build", "--group", "Zn:1", "--nu", "0", "--radius", "6"],
]


@pytest.mark.parametrize("args", EXPERIMENTS)
def test_byte_identical_outputs(args, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"out{k}.json"
        code = cli.main(args + ["--output", str(path)])
        assert code in (0, 3)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert b"wall" not in outs[0]


def test_check_all(capsys):
    code, out, _ = run_main(["check", "all", "--seed", "1"], capsys)
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows and all(r["pass"] for r in rows)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ggtlab", "dynamics", "--matrix", "1,1;0,1",
                          "--format", "csv"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines() == ["matrix,hyperbolic", "\"1,1;0,1\",False"]
