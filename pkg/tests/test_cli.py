"""End-to-end command-line behavior: payloads, exit codes, determinism."""

import json

import pytest

from freebessel.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def payload(out):
    return json.loads(out)


class TestMoments:
    def test_table_agreement(self, capsys):
        code, out, _ = run(capsys, "moments", "--s", "2", "--t", "1", "--k", "4")
        assert code == 0
        rows = payload(out)["results"]["moments"]
        assert [r["closed_form"] for r in rows] == ["1/1", "3/1", "12/1", "55/1"]
        assert all(r["agree"] for r in rows)
        assert all(r["series"] == r["closed_form"] for r in rows)

    def test_fractional_parameter(self, capsys):
        code, out, _ = run(capsys, "moments", "--s", "0.5", "--t", "1", "--k", "2")
        assert code == 0
        rows = payload(out)["results"]["moments"]
        assert rows[1]["closed_form"] == "3/2"

    def test_region_guard(self, capsys):
        code, out, err = run(capsys, "moments", "--s", "0.5", "--t", "2", "--k", "4")
        assert code == 3
        assert out == ""
        assert "critical rectangle" in err

    def test_force_overrides_guard(self, capsys):
        code, out, _ = run(
            capsys, "moments", "--s", "0.5", "--t", "2", "--k", "2", "--force"
        )
        assert code == 0
        assert payload(out)["results"]["moments"][0]["closed_form"] == "2/1"

    def test_usage_errors(self, capsys):
        assert run(capsys, "moments", "--s", "2")[0] == 1  # missing --t
        assert run(capsys, "moments", "--s", "x", "--t", "1")[0] == 1
        assert run(capsys, "moments", "--s", "-1", "--t", "1")[0] == 1
        assert run(capsys, "nosuchcommand")[0] == 1


class TestDensity:
    def test_json_payload(self, capsys):
        code, out, _ = run(capsys, "density", "--s", "2", "--t", "0.5", "--k", "2")
        assert code == 0
        results = payload(out)["results"]
        assert results["atom"]["mass"] == pytest.approx(0.5)
        assert results["quadrature_mass"] == pytest.approx(0.5, abs=1e-5)
        assert results["quadrature_moments"][0] == pytest.approx(0.5, abs=1e-5)

    def test_support_endpoint(self, capsys):
        code, out, _ = run(capsys, "density", "--s", "2", "--t", "1")
        assert payload(out)["results"]["support"]["K_plus"] == pytest.approx(27 / 4)

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "density", "--s", "1", "--t", "1", "--grid-points", "5",
            "--format", "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,density"
        assert len(lines) == 6

    def test_fractional_s_rejected(self, capsys):
        assert run(capsys, "density", "--s", "1.5", "--t", "1")[0] == 1

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "grid.csv"
        code, out, _ = run(
            capsys, "density", "--s", "1", "--t", "1", "--grid-points", "4",
            "--format", "csv", "--out", str(target),
        )
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("x,density")


class TestPartitionsCommand:
    def test_counts(self, capsys):
        code, out, _ = run(capsys, "partitions", "--s", "2", "--k", "3")
        results = payload(out)["results"]
        assert results["count"] == 12
        assert results["fuss_catalan"] == "12/1"

    def test_balanced_word(self, capsys):
        code, out, _ = run(
            capsys, "partitions", "--s", "2", "--word", "uu**", "--t", "1/2", "--list"
        )
        results = payload(out)["results"]
        assert results["count"] == 3
        assert results["star_moment"] == "1/1"  # t + 2t^2 at t = 1/2
        assert len(results["blocks"]) == 3


class TestMCCommand:
    def test_dw_estimate(self, capsys):
        code, out, _ = run(
            capsys, "mc", "--model", "dw", "--s", "2", "--k", "2", "--dim", "64",
            "--trials", "30", "--seed", "7",
        )
        assert code == 0
        results = payload(out)["results"]
        assert abs(results["estimate"] - 3) <= 3 * results["std_error"] + 0.1

    def test_determinism(self, capsys):
        argv = ["mc", "--model", "product", "--s", "1", "--k", "2", "--dim", "32",
                "--trials", "10", "--seed", "3"]
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        a, b = payload(out1), payload(out2)
        a.pop("wall_time_s"), b.pop("wall_time_s")
        assert a == b

    def test_character_needs_word(self, capsys):
        code, _, err = run(
            capsys, "mc", "--model", "character", "--s", "2", "--dim", "50",
            "--trials", "10",
        )
        assert code == 1
        assert "word" in err


class TestGLMCommand:
    def test_constant_term(self, capsys):
        code, out, _ = run(capsys, "glm", "--K", "4", "--s", "2")
        results = payload(out)["results"]
        assert results["constant_term"] == "3/1"

    def test_numeric_failure_exit(self, capsys):
        code, _, err = run(capsys, "glm", "--K", "9")
        assert code == 2
        assert "numeric failure" in err


class TestClassicalCommand:
    def test_atoms(self, capsys):
        code, out, _ = run(capsys, "classical", "--s", "2", "--t", "1", "--k", "2")
        results = payload(out)["results"]
        weights = {tuple(a["coeffs"]): a["weight"] for a in results["atoms"]}
        assert weights[(0,)] == pytest.approx(0.4657596075936404, abs=1e-10)
        assert results["real_moments"][1] == pytest.approx(1.0, abs=1e-10)


class TestWeingartenCommand:
    def test_value_and_limit(self, capsys):
        code, out, _ = run(
            capsys, "weingarten", "--s", "2", "--word", "uu**", "--n", "64", "--t", "1"
        )
        results = payload(out)["results"]
        assert results["limit"] == "3/1"
        assert results["finite_n"] == pytest.approx(3.0, abs=0.3)


class TestProbeCommand:
    def test_csv_map(self, capsys):
        code, out, _ = run(
            capsys, "probe", "--s-grid", "0.3:0.3:1", "--t-grid", "6:6:1",
            "--format", "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "s,t,passed,failed_minor,failed_matrix"
        assert lines[1].split(",")[2] == "0"

    def test_threaded_run_matches_serial(self, capsys, monkeypatch):
        argv = ["probe", "--s-grid", "0.5:2:3", "--t-grid", "0.5:1:2"]
        monkeypatch.setenv("FREEBESSEL_THREADS", "1")
        _, out1, _ = run(capsys, *argv)
        monkeypatch.setenv("FREEBESSEL_THREADS", "4")
        _, out2, _ = run(capsys, *argv)
        a, b = payload(out1), payload(out2)
        a.pop("wall_time_s"), b.pop("wall_time_s")
        assert a == b

    def test_bad_thread_env(self, capsys, monkeypatch):
        monkeypatch.setenv("FREEBESSEL_THREADS", "many")
        code, _, err = run(capsys, "probe", "--s-grid", "1:1:1", "--t-grid", "1:1:1")
        assert code == 1

    def test_bad_grid(self, capsys):
        assert run(capsys, "probe", "--s-grid", "1:2", "--t-grid", "1:1:1")[0] == 1
