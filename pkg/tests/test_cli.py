"""Golden-file tests for every CLI subcommand."""

import contextlib
import io
import json
import os

import pytest

from hyperpoly.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")


def run_cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


GOLDEN_CASES = [
    ("validate_cube.golden", ["validate", f"{DATA}/cube.json"], 0),
    ("validate_flipped.golden", ["validate", f"{DATA}/cube_flipped.json"], 1),
    ("dual_cube.golden", ["dual", f"{DATA}/cube.json"], 0),
    ("truncate_tetra.golden", ["truncate", f"{DATA}/hyper_tetra.json"], 0),
    ("untruncate_tetra.golden",
     ["untruncate", f"{DATA}/truncated_tetra.json"], 0),
    ("angles_tetra.golden", ["angles", f"{DATA}/hyper_tetra.json"], 0),
    ("check_ideal.golden",
     ["check-angles", f"{DATA}/ideal_tetra_angles.json"], 0),
    ("check_hyper.golden",
     ["check-angles", f"{DATA}/hyper_tetra_angles.json"], 0),
    ("check_low.golden", ["check-angles", f"{DATA}/low_face_angles.json"], 1),
    ("metric_hyper.golden", ["metric", f"{DATA}/hyper_tetra_angles.json"], 0),
    ("search_ideal.golden",
     ["geodesic-search", f"{DATA}/ideal_tetra_angles.json",
      "--seed", "3", "--budget-depth", "10", "--budget-shots", "50"], 0),
    ("search_low.golden",
     ["geodesic-search", f"{DATA}/low_face_angles.json",
      "--seed", "3", "--budget-depth", "10", "--budget-shots", "50"], 1),
    ("selftest.golden",
     ["pogorelov-selftest", "--seed", "5", "--samples", "40"], 0),
    ("export_cube.golden", ["export-obj", f"{DATA}/cube.json"], 0),
    ("export_tetra.golden", ["export-obj", f"{DATA}/hyper_tetra.json"], 0),
]


class TestGolden:
    @pytest.mark.parametrize("golden,argv,want", GOLDEN_CASES,
                             ids=[c[0] for c in GOLDEN_CASES])
    def test_matches_golden(self, golden, argv, want):
        code, out = run_cli(argv)
        assert code == want
        with open(os.path.join(DATA, golden)) as fh:
            assert out == fh.read()

    def test_reports_are_byte_identical_across_runs(self):
        argv = ["geodesic-search", f"{DATA}/ideal_tetra_angles.json",
                "--seed", "3", "--budget-depth", "10", "--budget-shots", "50"]
        _, a = run_cli(argv)
        _, b = run_cli(argv)
        assert a == b


class TestReportContents:
    def test_validate_flipped_lists_convexity(self):
        code, out = run_cli(["validate", f"{DATA}/cube_flipped.json"])
        rep = json.loads(out)
        assert code == 1 and not rep["passed"]
        assert any(f["code"] == "convexity" and "plane 0" in f["detail"]
                   for f in rep["failures"])

    def test_dual_cube_is_octahedral_report(self):
        code, out = run_cli(["dual", f"{DATA}/cube.json"])
        rep = json.loads(out)
        assert code == 0
        assert len(rep["edge_lengths"]) == 12
        assert rep["cone_identity_max_residual"] < 1e-8
        assert len(rep["metric"]["triangles"]) == 8

    def test_check_angles_ideal_flags_all_faces(self):
        code, out = run_cli(
            ["check-angles", f"{DATA}/ideal_tetra_angles.json"])
        rep = json.loads(out)
        assert code == 0 and rep["member"]
        assert rep["ideal_vertices"] == [0, 1, 2, 3]

    def test_search_reports_hemisphere_exception(self):
        _, out = run_cli(
            ["geodesic-search", f"{DATA}/ideal_tetra_angles.json",
             "--seed", "3", "--budget-depth", "10", "--budget-shots", "50"])
        rep = json.loads(out)
        assert rep["witness_found"] and rep["hemisphere_boundary"]
        assert not rep["is_violation"]

    def test_search_low_face_is_violation(self):
        code, out = run_cli(
            ["geodesic-search", f"{DATA}/low_face_angles.json",
             "--seed", "3", "--budget-depth", "10", "--budget-shots", "50"])
        rep = json.loads(out)
        assert code == 1 and rep["is_violation"]

    def test_metric_metric_round_trips(self):
        _, out = run_cli(["metric", f"{DATA}/hyper_tetra_angles.json"])
        rep = json.loads(out)
        from hyperpoly.conemetric import ConeSphericalMetric
        m = ConeSphericalMetric.from_dict(rep["metric"])
        assert m.gauss_bonnet_residual() < 1e-7

    def test_export_obj_counts(self):
        _, out = run_cli(["export-obj", f"{DATA}/cube.json"])
        lines = out.strip().splitlines()
        assert sum(1 for l in lines if l.startswith("v ")) == 8
        assert sum(1 for l in lines if l.startswith("f ")) == 6
        # truncation exported for the hyperideal input: 8 faces, 12 vertices
        _, out = run_cli(["export-obj", f"{DATA}/hyper_tetra.json"])
        lines = out.strip().splitlines()
        assert sum(1 for l in lines if l.startswith("v ")) == 12
        assert sum(1 for l in lines if l.startswith("f ")) == 8

    def test_malformed_input_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _ = run_cli(["validate", str(bad)])
        assert code == 2

    def test_missing_file_exits_2(self):
        code, _ = run_cli(["validate", "/nonexistent/file.json"])
        assert code == 2

    def test_out_flag_writes_file(self, tmp_path):
        target = tmp_path / "report.json"
        code, out = run_cli(["validate", f"{DATA}/cube.json",
                             "--out", str(target)])
        assert code == 0 and out == ""
        rep = json.loads(target.read_text())
        assert rep["passed"]
