"""End-to-end tests of the command-line surface."""

import json

import pytest
from click.testing import CliRunner

from allocrisk.cli import cli

TWO_COORD = json.dumps(
    {
        "a": {"kind": "explicit", "values": [1.0, 0.5]},
        "sigma2": {"kind": "explicit", "values": [1.0, 1.0]},
        "D": 2,
        "tail_tol": 0.0,
    }
)


@pytest.fixture()
def runner():
    return CliRunner()


def load_schema(name):
    import importlib.resources

    return json.loads(
        importlib.resources.files("allocrisk.schemas").joinpath(name).read_text()
    )


class TestRisk:
    def test_ellipsoid_example(self, runner):
        res = runner.invoke(cli, ["risk", "--set", "ellipsoid", "--spec", TWO_COORD, "--alloc", "1,1"])
        assert res.exit_code == 0, res.output
        data = json.loads(res.output)
        assert data["risk"] == 0.5
        assert data["active_dim"] == 1
        assert data["effective_budget"] == 1.0
        import jsonschema

        jsonschema.validate(data, load_schema("risk_report.schema.json"))

    def test_hyperrect_example(self, runner):
        res = runner.invoke(cli, ["risk", "--set", "hyperrect", "--spec", TWO_COORD, "--alloc", "2,0"])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["risk"] == pytest.approx(7.0 / 12.0, rel=1e-12)

    def test_zero_allocation_energy(self, runner):
        res = runner.invoke(cli, ["risk", "--set", "hyperrect", "--spec", TWO_COORD, "--alloc", "0,0"])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["risk"] == pytest.approx(1.25, rel=1e-12)

    def test_infinite_risk_exits_nonzero(self, runner):
        res = runner.invoke(cli, ["risk", "--set", "ellipsoid", "--spec", TWO_COORD, "--alloc", "0,1"])
        assert res.exit_code == 2
        assert "zero measurements" in res.output

    def test_sobolev_shortcut(self, runner):
        res = runner.invoke(
            cli,
            ["risk", "--set", "ellipsoid", "--alpha", "1", "--beta", "0", "--dim", "200", "--uniform", "100"],
        )
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["risk"] > 0

    def test_spec_from_file(self, runner, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(TWO_COORD)
        res = runner.invoke(cli, ["risk", "--set", "ellipsoid", "--spec", str(path), "--alloc", "1,1"])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["risk"] == 0.5


class TestAllocate:
    def test_hyperrect_exact(self, runner):
        res = runner.invoke(
            cli, ["allocate", "--set", "hyperrect", "--spec", TWO_COORD, "--budget", "2", "--method", "exact"]
        )
        assert res.exit_code == 0, res.output
        data = json.loads(res.output)
        assert data["allocation"] == [2.0, 0.0]
        assert data["risk"] == pytest.approx(7.0 / 12.0, rel=1e-12)
        import jsonschema

        jsonschema.validate(data, load_schema("allocation_report.schema.json"))

    def test_ellipsoid_suboptimal(self, runner):
        spec = json.dumps(
            {
                "a": {"kind": "explicit", "values": [1.0, 0.1]},
                "sigma2": {"kind": "explicit", "values": [1.0, 1.0]},
                "D": 2,
            }
        )
        res = runner.invoke(
            cli, ["allocate", "--set", "ellipsoid", "--spec", spec, "--budget", "1", "--method", "suboptimal"]
        )
        assert res.exit_code == 0, res.output
        data = json.loads(res.output)
        assert data["allocation"][0] == pytest.approx(1.0, abs=1e-10)
        assert data["allocation"][1] == pytest.approx(0.0, abs=1e-10)
        assert data["risk"] == pytest.approx(0.5, abs=1e-10)

    def test_ellipsoid_numeric_improvement(self, runner):
        spec = json.dumps(
            {
                "a": {"kind": "explicit", "values": [1.0, 0.1]},
                "sigma2": {"kind": "explicit", "values": [1.0, 1.0]},
                "D": 2,
            }
        )
        res = runner.invoke(
            cli, ["allocate", "--set", "ellipsoid", "--spec", spec, "--budget", "1", "--method", "numeric"]
        )
        assert res.exit_code == 0, res.output
        data = json.loads(res.output)
        assert data["risk"] <= data["certified_upper_bound"] + 1e-9
        assert data["risk"] <= 0.5 + 1e-9

    def test_method_set_mismatch(self, runner):
        res = runner.invoke(
            cli, ["allocate", "--set", "ellipsoid", "--spec", TWO_COORD, "--budget", "1", "--method", "exact"]
        )
        assert res.exit_code == 2
        res = runner.invoke(
            cli, ["allocate", "--set", "hyperrect", "--spec", TWO_COORD, "--budget", "1", "--method", "numeric"]
        )
        assert res.exit_code == 2

    def test_csv_format(self, runner):
        res = runner.invoke(
            cli,
            ["allocate", "--set", "hyperrect", "--spec", TWO_COORD, "--budget", "2", "--method", "exact", "--format", "csv"],
        )
        assert res.exit_code == 0
        lines = res.output.strip().splitlines()
        assert lines[0] == "coordinate,n"
        assert lines[1] == "1,2.0"


class TestTable:
    def test_table1_cells(self, runner):
        res = runner.invoke(cli, ["table", "1"])
        assert res.exit_code == 0
        rows = [line.split(",") for line in res.output.strip().splitlines()[1:]]
        cells = {(float(r[3]), float(r[2])): float(r[5]) for r in rows}
        assert cells[(0.5, 0.0)] == 1.15
        assert cells[(0.5, 1.0)] == 1.004
        assert len(cells) == 40

    def test_table2_cells(self, runner):
        res = runner.invoke(cli, ["table", "2"])
        assert res.exit_code == 0
        rows = [line.split(",") for line in res.output.strip().splitlines()[1:]]
        cells = {(float(r[3]), float(r[2])): float(r[5]) for r in rows}
        assert cells[(48.0, 3.0)] == 2.12
        assert cells[(0.5, 0.0)] == 1.46

    def test_byte_identical_reruns(self, runner):
        a = runner.invoke(cli, ["table", "1"]).output
        b = runner.invoke(cli, ["table", "1"]).output
        assert a == b

    def test_json_format(self, runner):
        res = runner.invoke(cli, ["table", "2", "--format", "json"])
        assert res.exit_code == 0
        data = json.loads(res.output)
        assert data["table"] == 2
        assert len(data["rows"]) == 40


class TestContour:
    def test_small_run_writes_everything(self, runner, tmp_path):
        out = tmp_path / "grid.csv"
        summary = tmp_path / "summary.json"
        res = runner.invoke(
            cli,
            [
                "contour",
                "--alpha", "0.05:0.5",
                "--beta", "0.8:1.4",
                "--grid", "40x40",
                "--out", str(out),
                "--summary-out", str(summary),
            ],
        )
        assert res.exit_code == 0, res.output
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "alpha,beta,value"
        assert len(lines) == 1 + 40 * 40
        data = json.loads(summary.read_text())
        assert data["min_value"] == pytest.approx(0.998477, abs=1e-3)
        import jsonschema

        jsonschema.validate(data, load_schema("contour_summary.schema.json"))
        fig = out.with_suffix(".png")
        assert fig.exists() and fig.stat().st_size > 10_000

    def test_no_plot(self, runner, tmp_path):
        out = tmp_path / "grid.csv"
        res = runner.invoke(
            cli,
            ["contour", "--alpha", "0.5:1.0", "--beta", "0.5:0.8", "--grid", "8x8", "--out", str(out), "--no-plot"],
        )
        assert res.exit_code == 0, res.output
        assert not out.with_suffix(".png").exists()


class TestVerify:
    def test_identities_suite(self, runner):
        res = runner.invoke(cli, ["verify", "--suite", "identities"])
        assert res.exit_code == 0, res.output
        data = json.loads(res.output)
        assert data["passed"]
        names = {c["name"] for c in data["checks"]}
        assert "rho_ellipsoid_composition" in names
        import jsonschema

        jsonschema.validate(data, load_schema("verify_report.schema.json"))

    def test_mc_suite_deterministic(self, runner):
        a = runner.invoke(cli, ["verify", "--suite", "mc", "--seed", "42"])
        b = runner.invoke(cli, ["verify", "--suite", "mc", "--seed", "42"])
        assert a.exit_code == 0, a.output
        assert a.output == b.output

    def test_beta_inequalities_suite(self, runner):
        res = runner.invoke(cli, ["verify", "--suite", "beta-inequalities"])
        assert res.exit_code == 0, res.output
        data = json.loads(res.output)
        assert data["passed"]
        assert data["conjecture_violations"] == 0

    def test_convergence_suite_with_figure(self, runner, tmp_path):
        out = tmp_path / "convergence.json"
        res = runner.invoke(cli, ["verify", "--suite", "convergence", "--out", str(out)])
        assert res.exit_code == 0, res.output
        data = json.loads(out.read_text())
        assert data["passed"]
        assert len(data["checks"]) == 4
        fig = out.with_suffix(".png")
        assert fig.exists() and fig.stat().st_size > 10_000


class TestSimulate:
    def test_saddle_default(self, runner):
        res = runner.invoke(
            cli,
            ["simulate", "--spec", TWO_COORD, "--alloc", "1,1", "--replications", "5000", "--seed", "7"],
        )
        assert res.exit_code == 0, res.output
        data = json.loads(res.output)
        assert data["report"]["formula_risk"] == pytest.approx(0.5, abs=1e-12)
        assert abs(data["report"]["z_score"]) <= 5.0
        import jsonschema

        jsonschema.validate(data, load_schema("simulate_report.schema.json"))

    def test_reproducible(self, runner):
        args = ["simulate", "--spec", TWO_COORD, "--alloc", "1,1", "--replications", "2000", "--seed", "3"]
        assert runner.invoke(cli, args).output == runner.invoke(cli, args).output

    def test_explicit_theta_weights(self, runner):
        res = runner.invoke(
            cli,
            [
                "simulate",
                "--spec", TWO_COORD,
                "--alloc", "1,1",
                "--theta", "0,0",
                "--weights", "1,1",
                "--replications", "2000",
                "--seed", "3",
            ],
        )
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["report"]["formula_risk"] == pytest.approx(2.0, abs=1e-12)
