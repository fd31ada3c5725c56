"""End-to-end CLI runs: schemas, exit codes, byte-stable output."""

import json
import math
import subprocess
import sys

import pytest

from privmetrics import jsonio

PMF_U4 = {"alphabet": ["a", "b", "c", "d"], "probs": [0.25, 0.25, 0.25, 0.25]}
PMF_P = {"alphabet": ["a", "b"], "probs": [0.75, 0.25]}
PMF_Q = {"alphabet": ["a", "b"], "probs": [0.5, 0.5]}
SCENARIO_FLIP = {
    "prior": {"alphabet": ["0", "1"], "probs": [0.5, 0.5]},
    "channel": {"input": ["0", "1"], "output": ["0", "1"],
                "rows": [[0.7, 0.3], [0.3, 0.7]]},
    "attacker_loss": {"kind": "hamming"},
    "system_loss": {"kind": "hamming"},
}
FIG6_CSV = ("zip,age,condition\n"
            + "476**,2*,AIDS\n" * 3 + "476**,2*,Flu\n"
            + "4790*,>=40,AIDS\n" + "4790*,>=40,Flu\n" * 3)
ROLES = {"roles": {"zip": "key", "age": "key", "condition": "confidential"}}


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "privmetrics", *args],
                          capture_output=True, text=True)


def write(tmp_path, name, obj):
    path = tmp_path / name
    if isinstance(obj, str):
        path.write_text(obj, encoding="utf-8")
    else:
        path.write_text(json.dumps(obj), encoding="utf-8")
    return str(path)


class TestMetrics:
    def test_uniform_entropies(self, tmp_path):
        result = run_cli("metrics", write(tmp_path, "u4.json", PMF_U4))
        assert result.returncode == 0
        out = json.loads(result.stdout)
        assert out == {"h0": 2, "h1": 2, "h_inf": 2}

    def test_two_pmf_comparison(self, tmp_path):
        result = run_cli("metrics", write(tmp_path, "p.json", PMF_P),
                         write(tmp_path, "q.json", PMF_Q))
        out = json.loads(result.stdout)
        assert out["comparison"]["kl"] == pytest.approx(0.1887, abs=5e-5)
        assert out["comparison"]["tv"] == 0.25
        assert out["comparison"]["epsilon_max_log_ratio"] == 1.0
        assert out["comparison"]["tv"] <= out["comparison"]["pinsker_bound"]

    def test_alpha_flag(self, tmp_path):
        result = run_cli("metrics", write(tmp_path, "p.json", PMF_P),
                         "--alpha", "2", "--alpha", "0.5")
        out = json.loads(result.stdout)
        assert set(out["alpha_entropies"]) == {"2", "0.5"}

    def test_joint_mutual_information(self, tmp_path):
        joint = {"input": ["0", "1"], "output": ["0", "1"],
                 "matrix": [[0.35, 0.15], [0.15, 0.35]]}
        result = run_cli("metrics", write(tmp_path, "p.json", PMF_P),
                         "--joint", write(tmp_path, "j.json", joint))
        out = json.loads(result.stdout)
        h_b = -(0.3 * math.log2(0.3) + 0.7 * math.log2(0.7))
        assert out["mutual_information"] == pytest.approx(1 - h_b, abs=1e-12)

    def test_malformed_json_exits_2(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"alphabet": ["a"], "probs": [1.0', encoding="utf-8")
        result = run_cli("metrics", str(path))
        assert result.returncode == 2
        assert "line" in result.stderr and "column" in result.stderr

    def test_alphabet_mismatch_exits_2(self, tmp_path):
        result = run_cli("metrics", write(tmp_path, "p.json", PMF_P),
                         write(tmp_path, "u4.json", PMF_U4))
        assert result.returncode == 2
        assert "error" in result.stderr

    def test_unknown_flag_rejected(self, tmp_path):
        result = run_cli("metrics", write(tmp_path, "p.json", PMF_P), "--nope")
        assert result.returncode == 2


class TestPrivacy:
    def test_flip_scenario(self, tmp_path):
        result = run_cli("privacy", write(tmp_path, "s.json", SCENARIO_FLIP))
        assert result.returncode == 0
        out = json.loads(result.stdout)
        assert out["average"] == pytest.approx(0.3, abs=1e-12)
        assert out["worst_case"] == pytest.approx(0.3, abs=1e-12)
        assert out["average_distortion"] == pytest.approx(0.3, abs=1e-12)

    def test_noiseless_scenario(self, tmp_path):
        scenario = json.loads(json.dumps(SCENARIO_FLIP))
        scenario["channel"]["rows"] = [[1.0, 0.0], [0.0, 1.0]]
        result = run_cli("privacy", write(tmp_path, "s.json", scenario))
        out = json.loads(result.stdout)
        assert out["average"] == 0 and out["worst_case"] == 0

    def test_unreachable_observation_noted(self, tmp_path):
        scenario = json.loads(json.dumps(SCENARIO_FLIP))
        scenario["channel"]["output"] = ["0", "1", "dead"]
        scenario["channel"]["rows"] = [[0.7, 0.3, 0.0], [0.3, 0.7, 0.0]]
        del scenario["system_loss"]
        result = run_cli("privacy", write(tmp_path, "s.json", scenario))
        out = json.loads(result.stdout)
        assert out["skipped_observations"] == ["dead"]
        assert [rec["y"] for rec in out["per_observation"]] == ["0", "1"]

    def test_invalid_scenario_exits_2(self, tmp_path):
        result = run_cli("privacy", write(tmp_path, "s.json", {"prior": PMF_P}))
        assert result.returncode == 2

    def test_squared_loss_scenario(self, tmp_path):
        scenario = {
            "prior": {"alphabet": ["0", "1"], "probs": [0.5, 0.5],
                      "embedding": [[0.0], [2.0]]},
            "channel": {"input": ["0", "1"], "output": ["0", "1"],
                        "rows": [[0.5, 0.5], [0.5, 0.5]]},
            "attacker_loss": {"kind": "squared"},
        }
        result = run_cli("privacy", write(tmp_path, "s.json", scenario))
        assert result.returncode == 0
        out = json.loads(result.stdout)
        # Best grid answer for a (0.5, 0.5) posterior over points 0 and 2.
        assert out["average"] == pytest.approx(2.0, abs=1e-12)


class TestSdc:
    def test_skewed_table(self, tmp_path):
        result = run_cli("sdc", write(tmp_path, "t.csv", FIG6_CSV),
                         write(tmp_path, "r.json", ROLES))
        assert result.returncode == 0
        report = json.loads(result.stdout)["reports"][0]
        assert report["k"] == 4
        assert report["t"] == pytest.approx(0.1887218755408671, abs=1e-6)
        assert report["risk"] == pytest.approx(0.1887218755408671, abs=1e-6)
        assert report["delta"] == 1.0

    def test_three_anonymous_table(self, tmp_path):
        csv = "id,zip,cond\n" + "".join(
            f"r{i},z{i % 3},v{i % 2}\n" for i in range(9))
        roles = {"roles": {"id": "identifier", "zip": "key",
                           "cond": "confidential"}}
        result = run_cli("sdc", write(tmp_path, "t.csv", csv),
                         write(tmp_path, "r.json", roles))
        report = json.loads(result.stdout)["reports"][0]
        assert report["k"] == 3

    def test_missing_confidential_role_exits_2(self, tmp_path):
        roles = {"roles": {"zip": "key", "age": "key"}}
        result = run_cli("sdc", write(tmp_path, "t.csv", FIG6_CSV),
                         write(tmp_path, "r.json", roles))
        assert result.returncode == 2

    def test_infinite_criterion_exits_3(self, tmp_path):
        csv = "zip,cond\nz0,x\nz1,y\n"
        roles = {"roles": {"zip": "key", "cond": "confidential"}}
        result = run_cli("sdc", write(tmp_path, "t.csv", csv),
                         write(tmp_path, "r.json", roles))
        assert result.returncode == 3
        report = json.loads(result.stdout)["reports"][0]
        assert report["delta"] == "inf"


class TestTradeoff:
    def test_budget_row(self, tmp_path):
        result = run_cli(
            "tradeoff", write(tmp_path, "u2.json", PMF_Q),
            write(tmp_path, "loss.json", {"kind": "hamming"}),
            "--budget", "0.1")
        assert result.returncode == 0
        header, row = result.stdout.strip().split("\n")
        assert header == "D,achieved_D,I_bits,slope,status"
        fields = row.split(",")
        assert float(fields[2]) == pytest.approx(0.531, abs=1e-3)
        assert fields[4] == "ok"

    def test_budget_beyond_max_loss(self, tmp_path):
        result = run_cli(
            "tradeoff", write(tmp_path, "u2.json", PMF_Q),
            write(tmp_path, "loss.json", {"kind": "hamming"}),
            "--budget", "2.0")
        row = result.stdout.strip().split("\n")[1].split(",")
        assert float(row[2]) == 0.0

    def test_missing_budget_exits_2(self, tmp_path):
        result = run_cli(
            "tradeoff", write(tmp_path, "u2.json", PMF_Q),
            write(tmp_path, "loss.json", {"kind": "hamming"}))
        assert result.returncode == 2

    def test_infeasible_budget_exits_4(self, tmp_path):
        loss = {"kind": "matrix", "costs": [[1.0, 2.0], [3.0, 1.0]]}
        result = run_cli(
            "tradeoff", write(tmp_path, "u2.json", PMF_Q),
            write(tmp_path, "loss.json", loss), "--budget", "0.5")
        assert result.returncode == 4
        assert "infeasible" in result.stdout

    def test_channel_dump(self, tmp_path):
        result = run_cli(
            "tradeoff", write(tmp_path, "u2.json", PMF_Q),
            write(tmp_path, "loss.json", {"kind": "hamming"}),
            "--budget", "0.2", "--dump-channels", str(tmp_path / "ch"))
        assert result.returncode == 0
        dumped = json.loads((tmp_path / "ch" / "point0.json").read_text())
        assert set(dumped) == {"input", "output", "rows"}

    def test_json_format(self, tmp_path):
        result = run_cli(
            "tradeoff", write(tmp_path, "u2.json", PMF_Q),
            write(tmp_path, "loss.json", {"kind": "hamming"}),
            "--budget", "0.3", "--format", "json")
        point = json.loads(result.stdout)["points"][0]
        assert point["status"] == "ok"
        assert point["I_bits"] == pytest.approx(0.1187, abs=1e-3)


class TestCrowdsLbsTypical:
    def test_crowds_report(self, tmp_path):
        result = run_cli("crowds", "--n", "4", "--p", "0.5",
                         "--trials", "100000", "--seed", "1")
        assert result.returncode == 0
        out = json.loads(result.stdout)
        assert out["analytic"]["privacy"] == 0.375
        assert out["analytic"]["pipeline_privacy"] == pytest.approx(0.375, abs=1e-12)
        assert out["empirical"]["max_abs_z"] < 4.0

    def test_lbs_noiseless(self, tmp_path):
        grid = {"width": 3, "height": 2, "cell_size": 1.0,
                "prior": "uniform", "noise": {"kind": "identity"}}
        result = run_cli("lbs", "--grid", write(tmp_path, "g.json", grid))
        out = json.loads(result.stdout)
        assert out["mse_grid"] == 0 and out["mse_mean"] == 0

    def test_typical_pmf(self, tmp_path):
        result = run_cli("typical", write(tmp_path, "p.json", PMF_P),
                         "--k", "12", "--eps", "0.2")
        out = json.loads(result.stdout)
        assert out["member_count"] <= out["cardinality_bound"]
        assert 0.0 <= out["total_probability"] <= 1.0

    def test_typical_joint(self, tmp_path):
        joint = {"input": ["0", "1"], "output": ["0", "1"],
                 "matrix": [[0.25, 0.25], [0.25, 0.25]]}
        result = run_cli("typical", "--joint", write(tmp_path, "j.json", joint),
                         "--k", "6", "--eps", "0.1")
        assert json.loads(result.stdout)["jointly_typical_fraction"] == 1.0

    def test_typical_needs_exactly_one_input(self, tmp_path):
        result = run_cli("typical", "--k", "5", "--eps", "0.1")
        assert result.returncode == 2


class TestOutputContract:
    CASES = [
        lambda t: ("metrics", write(t, "p.json", PMF_P), write(t, "q.json", PMF_Q)),
        lambda t: ("privacy", write(t, "s.json", SCENARIO_FLIP)),
        lambda t: ("sdc", write(t, "t.csv", FIG6_CSV), write(t, "r.json", ROLES)),
        lambda t: ("tradeoff", write(t, "u2.json", PMF_Q),
                   write(t, "loss.json", {"kind": "hamming"}),
                   "--budget", "0.1", "--budget", "0.3"),
        lambda t: ("crowds", "--n", "3", "--p", "0.4",
                   "--trials", "50000", "--seed", "11"),
        lambda t: ("typical", write(t, "p.json", PMF_P), "--k", "10",
                   "--eps", "0.25"),
        lambda t: ("lbs", "--grid", write(t, "g.json", {
            "width": 3, "height": 3, "cell_size": 1.0,
            "noise": {"kind": "gaussian", "sigma": 1.0}})),
    ]

    @pytest.mark.parametrize("case", range(len(CASES)))
    def test_byte_identical_reruns(self, tmp_path, case):
        args = self.CASES[case](tmp_path)
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout
        assert first.stdout

    def test_out_flag_writes_same_bytes(self, tmp_path):
        pmf = write(tmp_path, "p.json", PMF_P)
        to_stdout = run_cli("metrics", pmf)
        out_file = tmp_path / "report.json"
        run_cli("metrics", pmf, "--out", str(out_file))
        assert out_file.read_text(encoding="utf-8") == to_stdout.stdout

    def test_json_round_trips_through_own_writer(self, tmp_path):
        for args in (("metrics", write(tmp_path, "p.json", PMF_P)),
                     ("privacy", write(tmp_path, "s.json", SCENARIO_FLIP))):
            text = run_cli(*args).stdout
            assert jsonio.dumps(jsonio.loads(text)) == text

    def test_sdc_inf_round_trips(self, tmp_path):
        csv = "zip,cond\nz0,x\nz1,y\n"
        roles = {"roles": {"zip": "key", "cond": "confidential"}}
        text = run_cli("sdc", write(tmp_path, "t.csv", csv),
                       write(tmp_path, "r.json", roles)).stdout
        assert jsonio.dumps(jsonio.loads(text)) == text


class TestSdcExternalPrior:
    def test_prior_flag(self, tmp_path):
        prior = {"alphabet": ["AIDS", "Flu"], "probs": [0.5, 0.5]}
        result = run_cli("sdc", write(tmp_path, "t.csv", FIG6_CSV),
                         write(tmp_path, "r.json", ROLES),
                         "--prior", write(tmp_path, "prior.json", prior))
        assert result.returncode == 0
        report = json.loads(result.stdout)["reports"][0]
        assert report["t"] == pytest.approx(0.1887218755408671, abs=1e-6)

    def test_mismatched_prior_exits_2(self, tmp_path):
        prior = {"alphabet": ["x", "y"], "probs": [0.5, 0.5]}
        result = run_cli("sdc", write(tmp_path, "t.csv", FIG6_CSV),
                         write(tmp_path, "r.json", ROLES),
                         "--prior", write(tmp_path, "prior.json", prior))
        assert result.returncode == 2


class TestMetricsInfiniteOrder:
    def test_alpha_inf(self, tmp_path):
        result = run_cli("metrics", write(tmp_path, "p.json", PMF_P),
                         "--alpha", "inf")
        out = json.loads(result.stdout)
        assert out["alpha_entropies"]["inf"] == out["h_inf"]


class TestGoldenBytes:
    """Frozen outputs for inputs whose arithmetic is exact in IEEE doubles."""

    def test_metrics_uniform4_golden(self, tmp_path):
        out = run_cli("metrics", write(tmp_path, "u4.json", PMF_U4)).stdout
        assert out == '{\n  "h0": 2,\n  "h1": 2,\n  "h_inf": 2\n}\n'

    def test_tradeoff_slack_budget_golden(self, tmp_path):
        out = run_cli("tradeoff", write(tmp_path, "u2.json", PMF_Q),
                      write(tmp_path, "loss.json", {"kind": "hamming"}),
                      "--budget", "2.0").stdout
        assert out == ("D,achieved_D,I_bits,slope,status\n"
                       "2,0.5,0,0,ok\n")


class TestSdcMultiConfidential:
    CSV = "zip,cond1,cond2\nz0,x,u\nz0,y,v\nz1,x,u\nz1,y,v\n"
    ROLES = {"roles": {"zip": "key", "cond1": "confidential",
                       "cond2": "confidential"}}

    def test_one_report_per_confidential_column(self, tmp_path):
        result = run_cli("sdc", write(tmp_path, "t.csv", self.CSV),
                         write(tmp_path, "r.json", self.ROLES))
        assert result.returncode == 0
        names = [r["confidential"]
                 for r in json.loads(result.stdout)["reports"]]
        assert names == ["cond1", "cond2"]

    def test_confidential_flag_selects_one(self, tmp_path):
        result = run_cli("sdc", write(tmp_path, "t.csv", self.CSV),
                         write(tmp_path, "r.json", self.ROLES),
                         "--confidential", "cond2")
        names = [r["confidential"]
                 for r in json.loads(result.stdout)["reports"]]
        assert names == ["cond2"]
