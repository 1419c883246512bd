"""CLI contract: config resolution, report rendering, determinism, and the
0/1/2 exit-status convention."""

import json

from dwpcheck.cli import main
from dwpcheck.reporting import render_json

PASSING_SPEC = """
[factor.1]
dim = 2
coords = ["x", "y"]
metric = [["1", "0"], ["0", "1"]]

[factor.2]
dim = 2
coords = ["s", "t"]
metric = [["1", "0"], ["0", "1"]]

[potential]
psi = "0.3*(x^2 + y^2 + s^2 + t^2)"

[soliton]
type = "gradient_ricci"
lambda = 0.6

[sampling]
points = 6
seed = 42
box = [-1.0, 1.0]
tolerance = 1e-8
"""

FAILING_SPEC = PASSING_SPEC.replace("lambda = 0.6", "lambda = 0.25")

MALFORMED_SPEC = "[factor.1]\ndim = 2\n"


def write(tmp_path, text, name):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestExitStatuses:
    def test_pass_case_exits_zero(self, tmp_path, capsys):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        assert main(["verify", spec]) == 0
        out = capsys.readouterr().out
        assert "0 failed" in out

    def test_fail_case_exits_one(self, tmp_path, capsys):
        spec = write(tmp_path, FAILING_SPEC, "fail.spec")
        assert main(["verify", spec]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out

    def test_malformed_spec_exits_two(self, tmp_path, capsys):
        spec = write(tmp_path, MALFORMED_SPEC, "bad.spec")
        assert main(["verify", spec]) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_file_exits_two(self, capsys):
        assert main(["verify", "/no/such/file.spec"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_nonpositive_warping_region_exits_two(self, tmp_path, capsys):
        text = PASSING_SPEC.replace(
            'metric = [["1", "0"], ["0", "1"]]\n\n[factor.2]',
            'metric = [["1", "0"], ["0", "1"]]\nwarping = "x"\n\n[factor.2]',
        )
        spec = write(tmp_path, text, "neg.spec")
        assert main(["verify", spec]) == 2
        assert "nonpositive" in capsys.readouterr().err


class TestDeterminism:
    def test_identical_configs_give_byte_identical_reports(self, tmp_path):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        r1 = str(tmp_path / "r1.json")
        r2 = str(tmp_path / "r2.json")
        args = ["verify", spec, "--format", "structured"]
        assert main(args + ["--report", r1]) == 0
        assert main(args + ["--report", r2]) == 0
        b1 = open(r1, "rb").read()
        b2 = open(r2, "rb").read()
        assert b1 == b2

    def test_structured_report_is_valid_json_with_schema(self, tmp_path):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        report = str(tmp_path / "r.json")
        main(["verify", spec, "--format", "structured", "--report", report])
        doc = json.loads(open(report).read())
        assert set(doc) == {"checks", "engine_version", "run_config"}
        ids = [c["check_id"] for c in doc["checks"]]
        assert ids == sorted(ids)
        for c in doc["checks"]:
            assert set(c) == {
                "check_id",
                "status",
                "max_abs_residual",
                "worst_point",
                "points",
                "tolerance",
                "notes",
            }

    def test_render_json_prints_17_significant_digits(self):
        text = render_json({"v": 1.0 / 3.0})
        assert "0.33333333333333331" in text


class TestConfigResolution:
    def test_cli_flags_override_sampling_section(self, tmp_path):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        report = str(tmp_path / "r.json")
        main([
            "verify", spec, "--format", "structured", "--report", report,
            "--points", "3", "--seed", "9", "--tol", "1e-6",
        ])
        doc = json.loads(open(report).read())
        cfg = doc["run_config"]
        assert cfg["points"] == 3
        assert cfg["seed"] == 9
        assert cfg["tolerance"] == 1e-6

    def test_checks_subset_filters_output(self, tmp_path):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        report = str(tmp_path / "r.json")
        main([
            "verify", spec, "--checks", "lemma1,scalar",
            "--format", "structured", "--report", report,
        ])
        doc = json.loads(open(report).read())
        prefixes = {c["check_id"].split(".")[0] for c in doc["checks"]}
        assert prefixes == {"lemma1", "scalar"}

    def test_unknown_check_name_exits_two(self, tmp_path, capsys):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        assert main(["verify", spec, "--checks", "lemma9"]) == 2
        assert "unknown checks" in capsys.readouterr().err

    def test_per_coordinate_box(self, tmp_path):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        report = str(tmp_path / "r.json")
        code = main([
            "verify", spec,
            "--box", "0.1,0.4;-0.5,0.5;-1,1;0,1",
            "--checks", "scalar",
            "--format", "structured", "--report", report,
        ])
        assert code == 0
        doc = json.loads(open(report).read())
        assert doc["run_config"]["box"] == [
            [0.1, 0.4], [-0.5, 0.5], [-1.0, 1.0], [0.0, 1.0]
        ]

    def test_wrong_box_arity_exits_two(self, tmp_path, capsys):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        assert main(["verify", spec, "--box", "0,1;0,1"]) == 2

    def test_anchor_override(self, tmp_path):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        report = str(tmp_path / "r.json")
        main([
            "verify", spec, "--anchor", "0.1,0.2,0.3,0.4",
            "--checks", "scalar", "--format", "structured",
            "--report", report,
        ])
        doc = json.loads(open(report).read())
        assert doc["run_config"]["anchor"] == [0.1, 0.2, 0.3, 0.4]

    def test_text_format_summary_line(self, tmp_path, capsys):
        spec = write(tmp_path, PASSING_SPEC, "pass.spec")
        main(["verify", spec, "--checks", "scalar"])
        out = capsys.readouterr().out
        assert out.strip().endswith("1 passed, 0 failed, 0 skipped")
