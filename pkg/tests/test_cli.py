import json

import numpy as np
import pytest
from click.testing import CliRunner

from minsurf.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


class TestCatalog:
    def test_lists_six_entries(self, runner):
        result = runner.invoke(main, ["catalog"])
        assert result.exit_code == 0
        lines = result.output.strip().split("\n")
        assert len(lines) == 6
        assert any("enneper " in l and "g=z" in l and "f=1" in l for l in lines)

    def test_json_format(self, runner):
        result = runner.invoke(main, ["catalog", "--format", "json"])
        assert result.exit_code == 0
        entries = json.loads(result.output)
        assert len(entries) == 6
        assert {e["name"] for e in entries} >= {"enneper", "catenoid", "helicoid"}

    def test_single_name(self, runner):
        result = runner.invoke(main, ["catalog", "--name", "enneper"])
        assert result.exit_code == 0
        assert len(result.output.strip().split("\n")) == 1


class TestEval:
    def test_valid_point(self, runner):
        result = runner.invoke(
            main, ["eval", "-s", "enneper", "--at", "1,0", "--v", "0,0,-1"]
        )
        assert result.exit_code == 0
        assert "K      = -1" in result.output
        assert "chi    = 0" in result.output

    def test_pole_exits_2(self, runner):
        result = runner.invoke(main, ["eval", "-s", "catenoid", "--at", "0,0"])
        assert result.exit_code == 2
        assert "pole" in result.output

    def test_chern_singular_exits_2(self, runner):
        result = runner.invoke(
            main, ["eval", "-s", "enneper", "--at", "0,0", "--v", "0,0,1"]
        )
        assert result.exit_code == 2
        assert "chern_singular" in result.output

    def test_json_surface_spec_file(self, runner, tmp_path):
        spec = {
            "name": "myplane",
            "g": "0",
            "f": "1",
            "domain": {"kind": "disk", "center": [0, 0], "radius": 2.0},
            "base_point": [0, 0],
        }
        path = tmp_path / "surf.json"
        path.write_text(json.dumps(spec))
        result = runner.invoke(main, ["eval", "-s", str(path), "--at", "0.5,0"])
        assert result.exit_code == 2
        assert "flat_point" in result.output


class TestVerify:
    def test_ricci_passes(self, runner):
        result = runner.invoke(
            main, ["verify", "-s", "enneper", "--identity", "ricci", "--h", "0.01"]
        )
        assert result.exit_code == 0
        assert "PASS" in result.output

    def test_plane_exits_2(self, runner):
        result = runner.invoke(main, ["verify", "-s", "plane", "--identity", "ricci"])
        assert result.exit_code == 2

    def test_refine_study(self, runner):
        result = runner.invoke(
            main,
            [
                "verify", "-s", "enneper", "--identity", "flat-chern",
                "--v", "0,0,1", "--refine", "3",
            ],
        )
        assert result.exit_code == 0
        assert "fitted order" in result.output

    def test_tolerance_failure_exits_1(self, runner):
        # sup is ~3.2e-3 at h=0.01; an absurdly tight tolerance must fail
        result = runner.invoke(
            main,
            ["verify", "-s", "enneper", "--identity", "ricci", "--h", "0.01",
             "--tol", "1e-9"],
        )
        assert result.exit_code == 1

    def test_unknown_identity_exits_2(self, runner):
        result = runner.invoke(
            main, ["verify", "-s", "enneper", "--identity", "bogus"]
        )
        assert result.exit_code == 2


class TestClassify:
    def test_enneper(self, runner):
        result = runner.invoke(main, ["classify", "-s", "enneper"])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["is_enneper_candidate"] is True
        assert np.abs(np.array(body["best_direction"]) - [0, 0, -1]).max() <= 1e-3

    def test_catenoid(self, runner):
        result = runner.invoke(main, ["classify", "-s", "catenoid"])
        assert result.exit_code == 0
        assert json.loads(result.output)["is_enneper_candidate"] is False

    def test_enneper2(self, runner):
        result = runner.invoke(main, ["classify", "-s", "enneper2"])
        assert result.exit_code == 0
        assert json.loads(result.output)["is_enneper_candidate"] is False


class TestTotalCurv:
    def test_radius_one(self, runner):
        result = runner.invoke(
            main, ["totalcurv", "-s", "enneper", "--radius", "1", "--h", "0.01"]
        )
        assert result.exit_code == 0
        assert float(result.output.strip().split("\n")[-1]) == pytest.approx(
            -2 * np.pi, abs=2e-3
        )

    def test_plane_warns_and_reports_zero(self, runner):
        result = runner.invoke(
            main, ["totalcurv", "-s", "plane", "--radius", "1", "--h", "0.05"]
        )
        assert result.exit_code == 0
        assert float(result.output.strip().split("\n")[-1]) == 0.0


class TestFieldAndMesh:
    def test_field_deterministic(self, runner, tmp_path):
        args = [
            "field", "-s", "enneper", "--h", "0.25",
            "--bounds", "-1,-1,1,1", "--v", "0,0,1",
        ]
        out1 = runner.invoke(main, args + ["--out", str(tmp_path / "a.csv")])
        out2 = runner.invoke(main, args + ["--out", str(tmp_path / "b.csv")])
        assert out1.exit_code == 0 and out2.exit_code == 0
        a = (tmp_path / "a.csv").read_bytes()
        b = (tmp_path / "b.csv").read_bytes()
        assert a == b
        header = a.decode().split("\n")[0]
        assert header == "x,y,lambda,K,N1,N2,N3,NV,chi,mask"

    def test_field_stdout(self, runner):
        result = runner.invoke(
            main, ["field", "-s", "enneper", "--h", "0.5", "--bounds", "-1,-1,1,1"]
        )
        assert result.exit_code == 0
        assert result.output.startswith("x,y,lambda")

    def test_mesh_writes_obj_and_sidecar(self, runner, tmp_path):
        obj_path = tmp_path / "enneper.obj"
        result = runner.invoke(
            main,
            [
                "mesh", "-s", "enneper", "--grid", "41x41",
                "--bounds", "-1.5,-1.5,1.5,1.5", "--out", str(obj_path),
            ],
        )
        assert result.exit_code == 0
        text = obj_path.read_text()
        v_lines = [l for l in text.splitlines() if l.startswith("v ")]
        vn_lines = [l for l in text.splitlines() if l.startswith("vn ")]
        f_lines = [l for l in text.splitlines() if l.startswith("f ")]
        assert len(v_lines) <= 1681
        assert len(v_lines) == len(vn_lines)
        assert len(f_lines) == 1600
        for line in vn_lines[:50]:
            n = np.array([float(x) for x in line.split()[1:]])
            assert abs(np.linalg.norm(n) - 1) <= 1e-12
        sidecar = (tmp_path / "enneper.obj.csv").read_text().strip().split("\n")
        assert len(sidecar) - 1 == len(v_lines)

    def test_mesh_bad_grid_spec(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["mesh", "-s", "enneper", "--grid", "banana", "--out", str(tmp_path / "x.obj")],
        )
        assert result.exit_code != 0

    def test_serve_targets_the_fastapi_instance(self):
        # the serve command must hand uvicorn the app object itself
        from fastapi import FastAPI

        from minsurf.service.app import app

        assert isinstance(app, FastAPI)

    def test_mesh_write_error_exits_3(self, runner):
        result = runner.invoke(
            main,
            [
                "mesh", "-s", "enneper", "--grid", "5x5",
                "--bounds", "-1,-1,1,1", "--out", "/nonexistent-dir/out.obj",
            ],
        )
        assert result.exit_code == 3
