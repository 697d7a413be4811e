"""Command-line interface: exit codes, file outputs, reproducibility."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from monogamy import behavior_to_json_dict, pr_box, uniform_box
from monogamy.cli import main
from conftest import chsh_scenario


def write_behavior(path, behavior):
    path.write_text(json.dumps(behavior_to_json_dict(behavior)))
    return str(path)


@pytest.fixture
def pr_path(tmp_path):
    return write_behavior(tmp_path / "pr.json", pr_box())


@pytest.fixture
def uniform_path(tmp_path):
    return write_behavior(tmp_path / "uniform.json", uniform_box(chsh_scenario()))


class TestValidate:
    def test_pass(self, uniform_path, capsys):
        assert main(["validate", "--in", uniform_path]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"]

    def test_failing_table(self, tmp_path, capsys):
        data = behavior_to_json_dict(uniform_box(chsh_scenario()))
        data["table"]["0,0"] = [0.3, 0.3, 0.3, 0.3]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        assert main(["validate", "--in", str(path)]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["normalization_deviations"][0]["context"] == [0, 0]

    def test_malformed_json_diagnostics(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"parties": 2,\n  "settings": [2 2]}')
        assert main(["validate", "--in", str(path)]) == 2
        err = capsys.readouterr().err
        assert "line 2" in err and "column" in err

    def test_missing_table_key(self, tmp_path, capsys):
        path = tmp_path / "nokey.json"
        path.write_text('{"parties": 2, "settings": [2, 2], "outcomes": [2, 2]}')
        assert main(["validate", "--in", str(path)]) == 2
        assert "table" in capsys.readouterr().err


class TestNsAndLocal:
    def test_pr_is_ns(self, pr_path, capsys):
        assert main(["nstest", "--in", pr_path]) == 0
        assert json.loads(capsys.readouterr().out)["is_no_signalling"]

    def test_pr_not_local(self, pr_path, capsys):
        assert main(["localtest", "--in", pr_path]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert not payload["local"] and payload["score"] > 0

    def test_uniform_local(self, uniform_path, capsys):
        assert main(["localtest", "--in", uniform_path]) == 0


class TestShare:
    def test_pr_infeasible_at_two(self, pr_path, capsys):
        assert main(["share", "--in", pr_path, "--n", "2", "--mode", "ns"]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["status"] == "infeasible"
        assert payload["score"] > 0

    def test_uniform_feasible_with_certificate(self, uniform_path, tmp_path, capsys):
        cert = tmp_path / "cert.json"
        code = main([
            "share", "--in", uniform_path, "--n", "3", "--mode", "ns",
            "--cert-out", str(cert),
        ])
        assert code == 0
        # Round trip: the certificate parses as a behavior file.
        assert main(["validate", "--in", str(cert)]) == 0

    def test_unrestricted_always_succeeds(self, pr_path, capsys):
        assert main(["share", "--in", pr_path, "--n", "4",
                     "--mode", "unrestricted"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["symmetry_residual"] == 0.0


class TestChsh:
    def test_tsirelson_print(self, capsys):
        code = main([
            "chsh", "--state", "phi_plus",
            "--angles", "0,1.5708,0.7854,-0.7854",
        ])
        assert code == 0
        value = float(capsys.readouterr().out.strip())
        assert value == pytest.approx(2.828427, abs=1e-5)

    def test_behavior_input(self, pr_path, capsys):
        assert main(["chsh", "--in", pr_path]) == 0
        assert float(capsys.readouterr().out.strip()) == pytest.approx(4.0)

    def test_three_party_check_report_array(self, tmp_path, capsys):
        from monogamy import Scenario, mixture, product_box

        u1 = uniform_box(Scenario(1, (2,), (2,)))
        mild = product_box([mixture([pr_box(), uniform_box(chsh_scenario())],
                                    [0.5, 0.5]), u1])
        path = write_behavior(tmp_path / "mild.json", mild)
        assert main(["chsh", "--in", path]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["chsh_ab"] == pytest.approx(2.0)
        names = [c["inequality"] for c in payload["checks"]]
        assert names == ["NS-13", "TV-14", "KEY-31"]
        assert all(c["passed"] for c in payload["checks"])

        # The extremal box passes the no-signalling trade-off but fails the
        # quantum one; the command reports that with exit code 1.
        extremal = product_box([pr_box(), u1])
        path = write_behavior(tmp_path / "extremal.json", extremal)
        assert main(["chsh", "--in", path]) == 1
        payload = json.loads(capsys.readouterr().out)
        by_name = {c["inequality"]: c for c in payload["checks"]}
        assert by_name["NS-13"]["passed"]
        assert not by_name["TV-14"]["passed"]

    def test_missing_angles(self, capsys):
        assert main(["chsh", "--state", "phi_plus"]) == 2


class TestCg:
    def test_state_evaluation(self, capsys):
        angles = ",".join(str(a) for a in [0.5, 2.1, 0.0, -1.0, 1.0, 0.0, -1.0, 1.0, 0.0])
        code = main(["cg", "--state", "cg", "--mu", "0.9", "--angles", angles])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["cg_ab"] == pytest.approx(payload["cg_ac"], abs=1e-9)

    def test_behavior_evaluation(self, tmp_path, capsys):
        from monogamy import Scenario, deterministic_box

        b = deterministic_box(Scenario(2, (3, 3), (2, 2)), ((0, 0, 0), (0, 0, 0)))
        path = write_behavior(tmp_path / "det.json", b)
        assert main(["cg", "--in", path]) == 0
        assert json.loads(capsys.readouterr().out)["cg"] == pytest.approx(4.0)


class TestCkw:
    def test_w_state_report(self, capsys):
        assert main(["ckw", "--state", "w", "--pivot", "0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["cut_tangle"] == pytest.approx(8 / 9, abs=1e-9)
        assert payload["pairwise_tangles"] == pytest.approx([4 / 9, 4 / 9], abs=1e-9)
        assert payload["residual"] == pytest.approx(0.0, abs=1e-9)

    def test_state_file_input(self, tmp_path, capsys):
        from monogamy import ghz, state_to_json_dict

        path = tmp_path / "ghz.json"
        path.write_text(json.dumps(state_to_json_dict(ghz())))
        assert main(["ckw", "--in", str(path)]) == 0
        assert json.loads(capsys.readouterr().out)["residual"] == pytest.approx(1.0, abs=1e-9)

    def test_two_qubit_rejected(self, capsys):
        assert main(["ckw", "--state", "phi_plus"]) == 2


class TestSweep:
    def test_ns_csv_values(self, tmp_path):
        out = tmp_path / "ns.csv"
        code = main(["sweep", "--class", "ns", "--grid", "8", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "theta,max_value,class"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 8
        by_theta = {float(r[0]): float(r[1]) for r in rows}
        assert by_theta[0.0] == pytest.approx(4.0, abs=1e-6)
        assert by_theta[math.pi / 2] == pytest.approx(4.0, abs=1e-6)
        assert all(r[2] == "ns" for r in rows)

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            code = main([
                "sweep", "--class", "separable-orthogonal", "--grid", "4",
                "--restarts", "3", "--seed", "11", "--out", str(out),
            ])
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_local_sweep(self, tmp_path):
        out = tmp_path / "local.csv"
        assert main(["sweep", "--class", "local", "--grid", "4", "--out", str(out)]) == 0
        values = [float(line.split(",")[1]) for line in out.read_text().splitlines()[1:]]
        assert values[0] == pytest.approx(2.0)


class TestCgSearchCommand:
    def test_finds_violation(self, capsys):
        code = main(["cgsearch", "--grid", "11", "--restarts", "2", "--seed", "5"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["double_violation"]
        assert payload["min_value"] > 4.0


class TestUsage:
    def test_unknown_flag_rejected(self, capsys):
        assert main(["validate", "--bogus", "x"]) == 2

    def test_unknown_command_rejected(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_missing_file(self, capsys):
        assert main(["validate", "--in", "/nonexistent/behavior.json"]) == 2

    def test_console_entry_point(self):
        result = subprocess.run(
            [sys.executable, "-m", "monogamy.cli", "--help"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "monogamy" in result.stdout
