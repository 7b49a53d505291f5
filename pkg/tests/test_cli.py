"""End-to-end CLI behaviour: exit codes, determinism, file formats."""

import csv
import io
import json

import pytest

from cosphere.cli import API_REGISTRY, cmd_examples, main
from cosphere.poset import poset_to_json
from cosphere.torus import TorusActionSpec, build_isotropy_poset, spec_to_json


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_reduce_prints_the_report(capsys):
    code, out, _ = run(capsys, "reduce", "--fixture", "t2-on-r4")
    assert code == 0
    report = json.loads(out)
    assert report["piece_count"] == 8
    assert report["poset_valid"] is True
    assert len(report["hasse"]) == 10


def test_reduce_accepts_spec_and_poset_files_identically(tmp_path, capsys):
    spec = TorusActionSpec(k=2, n=2, weights=((1, 0), (0, 1)))
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(spec_to_json(spec)))
    poset_file = tmp_path / "poset.json"
    poset_file.write_text(json.dumps(poset_to_json(build_isotropy_poset(spec))))

    code_a, out_a, _ = run(capsys, "reduce", "--action", str(spec_file))
    code_b, out_b, _ = run(capsys, "reduce", "--action", str(poset_file))
    assert code_a == code_b == 0
    assert out_a == out_b


def test_reduce_writes_the_out_file(tmp_path, capsys):
    target = tmp_path / "sub" / "report.json"
    code, out, _ = run(capsys, "reduce", "--fixture", "s1-on-r2", "--out", str(target))
    assert code == 0
    assert "wrote" in out
    report = json.loads(target.read_text())
    assert report["piece_count"] == 2


def test_missing_action_file_is_an_io_error(capsys):
    code, _, err = run(capsys, "reduce", "--action", "/no/such/file.json")
    assert code == 3
    assert "io error" in err


def test_bad_inputs_exit_2(tmp_path, capsys):
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert run(capsys, "reduce", "--action", str(garbled))[0] == 2

    array = tmp_path / "array.json"
    array.write_text("[1, 2]")
    assert run(capsys, "reduce", "--action", str(array))[0] == 2

    neither = tmp_path / "neither.json"
    neither.write_text('{"foo": 1}')
    assert run(capsys, "reduce", "--action", str(neither))[0] == 2

    # both sources at once, and the required one missing
    assert run(capsys, "reduce", "--fixture", "s1-on-r2", "--action", str(neither))[0] == 2
    assert run(capsys, "verify")[0] == 2

    broken = tmp_path / "broken_poset.json"
    broken.write_text(json.dumps({
        "dim_Q": 2, "dim_G": 1,
        "types": [{"label": "e", "dim_H": 0, "dim_Q_of": 9}],
        "order": [],
    }))
    assert run(capsys, "reduce", "--action", str(broken))[0] == 2


def test_argparse_rejects_unknown_subcommands():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_lattice_writes_deterministic_dot_files(tmp_path, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert run(capsys, "lattice", "--fixture", "t2-on-r4", "--out", str(out_a))[0] == 0
    assert run(capsys, "lattice", "--fixture", "t2-on-r4", "--out", str(out_b))[0] == 0
    iso = (out_a / "isotropy.dot").read_text()
    assert iso == (out_b / "isotropy.dot").read_text()
    assert '"e" -> "S^1×e";' in iso
    cl = (out_a / "cl_strata.dot").read_text()
    assert cl == (out_b / "cl_strata.dot").read_text()
    assert cl.count(" -> ") == 10


def test_verify_writes_report_and_samples(tmp_path, capsys):
    out_dir = tmp_path / "verify"
    code, out, _ = run(
        capsys, "verify", "--fixture", "t2-on-r4",
        "--count", "150", "--out", str(out_dir),
    )
    assert code == 0
    assert "verify t2-on-r4: PASS" in out
    report = json.loads((out_dir / "report.json").read_text())
    assert report["passed"] is True

    rows = list(csv.reader(io.StringIO((out_dir / "samples.csv").read_text())))
    header = rows[0]
    assert header[:4] == ["x_1", "x_2", "x_3", "x_4"]
    assert header[-2:] == ["stratum", "residual"]
    assert "J_1" in header and "p4_2" in header
    assert len(rows) == 151
    strata_seen = {r[header.index("stratum")] for r in rows[1:]}
    assert "CC(e)" in strata_seen


def test_verify_output_is_byte_stable(tmp_path, capsys):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out_dir in (out_a, out_b):
        code, _, _ = run(
            capsys, "verify", "--fixture", "s1-on-r2",
            "--count", "100", "--out", str(out_dir),
        )
        assert code == 0
    assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()
    assert (out_a / "samples.csv").read_bytes() == (out_b / "samples.csv").read_bytes()


def test_flow_csv_from_a_seam_start(tmp_path, capsys):
    target = tmp_path / "traj.csv"
    code, out, _ = run(
        capsys, "flow", "--fixture", "t2-on-r4",
        "--start", "0,0,0,0,1,0,0,0",
        "--t-end", "0.5", "--step", "0.01",
        "--out", str(target),
    )
    assert code == 0
    summary = json.loads(out[: out.index("wrote")])
    assert summary["passed"] is True
    assert summary["rows"] == 51

    rows = list(csv.reader(io.StringIO(target.read_text())))
    header = rows[0]
    assert header[0] == "t"
    col = header.index("stratum")
    assert rows[1][col] == "Seam(T^2>e×S^1)"
    assert rows[-1][col] == "CC(e×S^1)"
    assert all(r[col] == "CC(e×S^1)" for r in rows[2:])


def test_flow_rejects_bad_starts(capsys):
    # off the zero level: u has angular mass
    code, _, err = run(
        capsys, "flow", "--fixture", "t2-on-r4", "--start", "1,0,0,0,0,1,0,0"
    )
    assert code == 2
    assert "zero level" in err
    assert run(capsys, "flow", "--fixture", "t2-on-r4", "--start", "1,0")[0] == 2
    code, _, err = run(
        capsys, "flow", "--fixture", "t2-on-r4", "--start", "0,0,0,0,2,0,0,0"
    )
    assert code == 2


def test_flow_stdout_matches_file_output(tmp_path, capsys):
    args = ["flow", "--fixture", "s1-on-r2", "--seed", "4",
            "--t-end", "0.2", "--step", "0.05"]
    code, out, _ = run(capsys, *args)
    assert code == 0
    target = tmp_path / "t.csv"
    code2, _, _ = run(capsys, *args, "--out", str(target))
    assert code2 == 0
    assert out == target.read_text()


def test_examples_runs_the_full_battery_and_covers_the_api(tmp_path, capsys):
    code, out, _ = run(
        capsys, "examples", "--count", "150",
        "--t-end", "0.5", "--step", "0.01",
        "--out", str(tmp_path / "artifacts"),
    )
    assert code == 0
    assert "examples: PASS" in out
    assert "s1-on-r2" in out and "t2-on-r4" in out
    covered = cmd_examples.last_coverage
    assert covered == API_REGISTRY
    # every artifact the battery promises actually exists
    for name in ("s1-on-r2", "t2-on-r4"):
        base = tmp_path / "artifacts" / name
        for artifact in ("isotropy.dot", "cl_strata.dot", "reduce.json",
                         "report.json", "samples.csv", "trajectory.csv"):
            assert (base / artifact).exists()
