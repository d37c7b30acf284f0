import json

from typer.testing import CliRunner

from app.cli import EXIT_MISMATCH, EXIT_PRECONDITION, cli

runner = CliRunner()

FAMILY_3121 = ["--N", "3", "--i", "1", "--j", "2", "--k", "1"]
FAMILY_6431 = ["--N", "6", "--i", "4", "--j", "3", "--k", "1"]


def run_json(*args):
    result = runner.invoke(cli, ["--format", "json", *args])
    doc = json.loads(result.stdout) if result.exit_code == 0 else None
    return result, doc


def test_count():
    result, doc = run_json("count", *FAMILY_3121, "--lambda", "2", "--p", "7")
    assert result.exit_code == 0, result.output
    assert doc["schema_version"] == "1"
    assert doc["command"] == "count"
    assert doc["passed"] is True
    assert doc["results"]["brute"]["total"] == 10
    assert doc["results"]["agree"] is True
    assert "seconds" not in doc


def test_count_brute_only_over_extension_field():
    result, doc = run_json("count", *FAMILY_3121, "--lambda", "2", "--p", "5", "--s", "2", "--method", "brute")
    assert result.exit_code == 0, result.output
    assert "hgf" not in doc["results"]
    assert doc["results"]["brute"]["q"] == 25


def test_timing_is_opt_in():
    result = runner.invoke(cli, ["--format", "json", "--timing", "count", *FAMILY_3121, "--lambda", "2", "--p", "7"])
    assert result.exit_code == 0, result.output
    assert "seconds" in json.loads(result.stdout)


def test_lpoly():
    result, doc = run_json("lpoly", "--N", "5", "--i", "1", "--j", "4", "--k", "1", "--lambda", "2", "--p", "7")
    assert result.exit_code == 0, result.output
    assert doc["results"]["coeffs"] == [1, 0, 0, 0, -2, 0, 0, 0, 2401]


def test_gauss():
    result, doc = run_json("gauss", "--p", "13", "--M", "12", "--a", "1")
    assert result.exit_code == 0, result.output
    z = complex(float(doc["results"]["complex"]["re"]), float(doc["results"]["complex"]["im"]))
    assert abs(abs(z) ** 2 - 13) < 1e-8
    assert doc["results"]["value"]["M"] == 12


def test_jacobi_quotient():
    result, doc = run_json("jacobi", "--p", "11", "--M", "10", "--a", "1", "--b", "6", "--c", "2", "--d", "5")
    assert result.exit_code == 0, result.output
    assert doc["results"]["quotient"]["root_exponent"] == 8


def test_hgf():
    result, doc = run_json("hgf", "--p", "7", "--M", "6", "--A", "1", "--B", "2", "--C", "5", "--lambda", "3")
    assert result.exit_code == 0, result.output
    assert doc["results"]["agree"] is True


def test_periods():
    result, doc = run_json("periods", *FAMILY_6431, "--lambda", "0.3", "--precision", "30")
    assert result.exit_code == 0, result.output
    results = doc["results"]
    assert results["gamma_check"]["passed"] is True
    assert results["relations"]["passed"] is True
    assert results["real_rank"] == 4
    assert results["beta_quotient"]["recognition"]["form"] == "PowerRational"
    assert results["beta_quotient"]["recognition"]["coefficients"] == ["1/4"]


def test_qm_check():
    result, doc = run_json("qm-check", *FAMILY_6431, "--primes", "7,13")
    assert result.exit_code == 0, result.output
    assert doc["results"]["verdict"] == "QM"
    assert [v["p"] for v in doc["results"]["finite_field"]] == [7, 13]


def test_verify_output_does_not_depend_on_jobs():
    serial = runner.invoke(cli, ["--format", "json", "verify", "--suite", "hd", "--primes", "7,13", "--jobs", "1"])
    parallel = runner.invoke(cli, ["--format", "json", "verify", "--suite", "hd", "--primes", "7,13", "--jobs", "2"])
    assert serial.exit_code == 0, serial.output
    assert serial.stdout == parallel.stdout
    doc = json.loads(serial.stdout)
    assert doc["passed"] is True
    assert doc["results"][0]["suite"] == "hd"
    assert "jobs" not in doc["invocation"]


def test_verify_repeated_suites():
    result, doc = run_json("verify", "--suite", "hd", "--suite", "lmfdb-table", "--primes", "7")
    assert result.exit_code == 0, result.output
    assert [r["suite"] for r in doc["results"]] == ["hd", "lmfdb-table"]


def test_verify_failure_exit_code():
    result = runner.invoke(cli, ["--format", "json", "verify", "--suite", "lmfdb-table", "--primes", "5"])
    assert result.exit_code == EXIT_MISMATCH


def test_precondition_exit_codes():
    cases = [
        ["count", *FAMILY_3121, "--lambda", "1", "--p", "7"],
        ["count", "--N", "6", "--i", "2", "--j", "4", "--k", "2", "--lambda", "2", "--p", "7"],
        ["gauss", "--p", "13", "--M", "5", "--a", "1"],
        ["jacobi", "--p", "11", "--M", "10", "--a", "1", "--b", "6", "--c", "2"],
        ["qm-check", "--N", "5", "--i", "1", "--j", "4", "--k", "1"],
        ["verify", "--suite", "nope"],
    ]
    for args in cases:
        result = runner.invoke(cli, ["--format", "json", *args])
        assert result.exit_code == EXIT_PRECONDITION, (args, result.output)


def test_table_output():
    result = runner.invoke(cli, ["count", *FAMILY_3121, "--lambda", "2", "--p", "7"])
    assert result.exit_code == 0, result.output
    assert "brute.total" in result.stdout


def test_table_output_for_verify():
    result = runner.invoke(cli, ["verify", "--suite", "hd", "--primes", "7"])
    assert result.exit_code == 0, result.output
    assert "p=7/M=6" in result.stdout
    assert "FAIL" not in result.stdout
