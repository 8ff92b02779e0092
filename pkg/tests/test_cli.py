"""Tests für die Kommandozeile: Exitcodes, Berichte und die Gesamtpipeline."""

import json
from pathlib import Path

import pandas as pd
import pytest

from app import main, parse_tolerances
from src.isopair_lab.errors import InputError
from src.models import BiPoly, Factorization
from src.utils import save_model

EXEMPLAR_BUNDLE = Path(__file__).parent.parent / "bundle_exemplar.json"

EXEMPLAR_COLLIGATION = {
    "M": 2,
    "N": 1,
    "A": [[0, 0], [1, 0]],
    "B": [[1], [0]],
    "C": [[0, 1]],
    "D": [[0]],
}


def write_json(directory: Path, name: str, data) -> str:
    path = directory / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def invoke(*argv: str) -> tuple[int, dict]:
    lines: list[str] = []
    code = main(list(argv), emit=lines.append)
    return code, json.loads(lines[-1])


@pytest.fixture
def exemplar_files(tmp_path, parabola):
    poly = tmp_path / "poly.json"
    factors = tmp_path / "factors.json"
    save_model(parabola, poly)
    save_model(Factorization(factors=[parabola]), factors)
    colligation = write_json(tmp_path, "colligation.json", EXEMPLAR_COLLIGATION)
    return {"poly": str(poly), "factors": str(factors), "colligation": colligation}


@pytest.fixture
def exemplar_bundle():
    return json.loads(EXEMPLAR_BUNDLE.read_text(encoding="utf-8"))


class TestTolerances:
    """Tests für das Parsen von --tol."""

    def test_bare_value_sets_inner(self):
        assert parse_tolerances(["1e-3"]).inner == 1e-3

    def test_key_value(self):
        tolerances = parse_tolerances(["rank=1e-6", "gram=1e-9"])
        assert tolerances.rank == 1e-6
        assert tolerances.gram == 1e-9

    def test_unknown_key(self):
        with pytest.raises(InputError):
            parse_tolerances(["bogus=1"])

    def test_not_a_number(self):
        with pytest.raises(InputError):
            parse_tolerances(["rank=small"])


class TestInnerToralCommand:
    """Tests für check-inner-toral."""

    def test_parabola_passes(self, exemplar_files):
        code, report = invoke("check-inner-toral", "--poly", exemplar_files["poly"])
        assert code == 0
        assert report["command"] == "check-inner-toral"
        assert report["checks"]["inner_toral"]["passed"]
        assert report["failed"] == []

    def test_hyperbola_fails(self, tmp_path, hyperbola):
        path = tmp_path / "hyperbola.json"
        save_model(hyperbola, path)
        code, report = invoke("check-inner-toral", "--poly", str(path))
        assert code == 1
        assert "inner_toral" in report["failed"]
        assert report["inner_toral"]["witnesses"]

    def test_square_detected(self, tmp_path, diagonal):
        path = tmp_path / "square.json"
        save_model(diagonal**2, path)
        code, report = invoke("check-inner-toral", "--poly", str(path))
        assert code == 1
        assert "square_free" in report["failed"]


class TestInputErrors:
    """Tests für Eingabefehler (Exitcode 2)."""

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"coeffs": [[0, 1]', encoding="utf-8")
        code, report = invoke("check-inner-toral", "--poly", str(path))
        assert code == 2
        assert "line 1" in report["error"]["message"]

    def test_missing_file(self, tmp_path):
        code, report = invoke("check-inner-toral", "--poly", str(tmp_path / "missing.json"))
        assert code == 2
        assert report["exit_code"] == 2

    def test_missing_argument(self):
        code, _ = invoke("rank")
        assert code == 2

    def test_unknown_command(self):
        code, report = invoke("simulate")
        assert code == 2
        assert report["error"]["kind"] == "usage"

    def test_unknown_tolerance(self, exemplar_files):
        code, _ = invoke("check-inner-toral", "--poly", exemplar_files["poly"], "--tol", "bogus=1")
        assert code == 2

    def test_empty_bundle(self, tmp_path):
        code, report = invoke("report", "--bundle", write_json(tmp_path, "bundle.json", {}))
        assert code == 2
        assert report["error"]["kind"] == "validation"

    def test_non_unitary_colligation(self, tmp_path, exemplar_files):
        broken = {**EXEMPLAR_COLLIGATION, "A": [[0, 0], [0.5, 0]]}
        code, _ = invoke(
            "rank",
            "--colligation",
            write_json(tmp_path, "broken.json", broken),
            "--factors",
            exemplar_files["factors"],
        )
        assert code == 2

    def test_unitary_tolerance_is_threaded(self, tmp_path):
        nearly = {"M": 1, "N": 1, "A": [[1e-6]], "B": [[1]], "C": [[1]], "D": [[0]]}
        path = write_json(tmp_path, "nearly.json", nearly)
        code, report = invoke("realize", "--colligation", path)
        assert code == 2
        assert report["error"]["kind"] == "validation"
        code, report = invoke("realize", "--colligation", path, "--tol", "unitary=1e-4")
        assert code in (0, 1)
        assert report.get("error", {}).get("kind") != "validation"

    def test_factors_inconsistent_with_sizes(self, tmp_path, exemplar_files, cross):
        factors = tmp_path / "cross.json"
        save_model(Factorization(factors=[cross]), factors)
        code, _ = invoke("rank", "--colligation", exemplar_files["colligation"], "--factors", str(factors))
        assert code in (1, 2)


class TestAnalysisCommands:
    """Tests für realize, rank, kernel, defect und ideal."""

    def test_realize_with_csv(self, tmp_path, exemplar_files):
        csv = tmp_path / "transfer.csv"
        code, report = invoke("realize", "--colligation", exemplar_files["colligation"], "--csv", str(csv))
        assert code == 0
        assert report["realized_N"] == 1
        table = pd.read_csv(csv)
        assert len(table) == 64
        assert {"z_re", "z_im", "phi_01_re"} <= set(table.columns)

    def test_rank(self, exemplar_files):
        code, report = invoke(
            "rank", "--colligation", exemplar_files["colligation"], "--factors", exemplar_files["factors"]
        )
        assert code == 0
        assert report["alpha"] == [1]
        assert report["checks"]["multiplicity"]["value"] == {"S": 2, "T": 1}

    def test_rank_is_deterministic(self, exemplar_files):
        argv = ("rank", "--colligation", exemplar_files["colligation"], "--factors", exemplar_files["factors"])
        lines_first: list[str] = []
        lines_second: list[str] = []
        main(list(argv), emit=lines_first.append)
        main(list(argv), emit=lines_second.append)
        assert lines_first == lines_second

    def test_kernel(self, exemplar_files):
        code, report = invoke(
            "kernel", "--colligation", exemplar_files["colligation"], "--factors", exemplar_files["factors"]
        )
        assert code == 0
        assert report["source"] == "constructed"
        assert report["checks"]["full_rank"]["passed"]

    def test_kernel_component_out_of_range(self, exemplar_files):
        code, _ = invoke(
            "kernel",
            "--colligation",
            exemplar_files["colligation"],
            "--factors",
            exemplar_files["factors"],
            "--component",
            "3",
        )
        assert code == 2

    def test_defect(self, exemplar_files):
        code, report = invoke(
            "defect", "--colligation", exemplar_files["colligation"], "--factors", exemplar_files["factors"]
        )
        assert code == 0
        assert report["degrees"] == [8, 10, 12]
        assert len(report["codimensions"]) == 3

    def test_ideal(self, tmp_path, exemplar_bundle):
        path = write_json(tmp_path, "ideal.json", exemplar_bundle["ideal"])
        code, report = invoke("ideal", "--ideal", path)
        assert code == 0
        assert report["quotient_dim"] == 2
        assert report["relatively_prime"]
        assert report["normal_set"] == [[0, 0], [0, 1]]

    def test_ideal_with_common_factor(self, tmp_path):
        pair = {
            "p": {"terms": [{"i": 0, "j": 2, "re": "1"}, {"i": 2, "j": 0, "re": "-1"}]},
            "q": {"terms": [{"i": 1, "j": 1, "re": "1"}, {"i": 2, "j": 0, "re": "-1"}]},
        }
        code, report = invoke("ideal", "--ideal", write_json(tmp_path, "ideal.json", pair), "--order", "degrevlex")
        assert code == 0
        assert report["quotient_dim"] == "infinite"
        assert not report["relatively_prime"]


class TestReport:
    """Tests für die Gesamtpipeline."""

    def test_exemplar_bundle_passes(self):
        code, report = invoke("report", "--bundle", str(EXEMPLAR_BUNDLE))
        assert code == 0
        assert report["failed"] == []
        assert list(report["stages"]) == ["inner_toral", "realize", "rank", "kernel", "defect", "ideal"]
        assert all(stage["status"] == "pass" for stage in report["stages"].values())
        assert report["stages"]["rank"]["alpha"] == [1]

    def test_given_triple_is_used(self, tmp_path, exemplar_bundle):
        exemplar_bundle["triple"] = {
            "Q": {"entries": [[{"coeffs": [[1]]}, {"coeffs": [[0, 1]]}]]},
            "P": {"entries": [[{"coeffs": [[1]]}]]},
        }
        code, report = invoke("report", "--bundle", write_json(tmp_path, "bundle.json", exemplar_bundle))
        assert code == 0
        assert report["stages"]["kernel"]["source"] == "bundle"

    def test_corrupted_triple_skips_dependents(self, tmp_path, exemplar_bundle):
        exemplar_bundle["triple"] = {
            "Q": {"entries": [[{"coeffs": [[1]]}, {"coeffs": [[0, 1]]}]]},
            "P": {"entries": [[{"coeffs": [[2]]}]]},
        }
        code, report = invoke("report", "--bundle", write_json(tmp_path, "bundle.json", exemplar_bundle))
        assert code == 1
        stages = report["stages"]
        assert stages["kernel"]["status"] == "fail"
        assert "kernel_identity" in stages["kernel"]["failed"]
        assert stages["defect"]["status"] == "skipped"
        assert stages["ideal"]["status"] == "skipped"
        assert stages["rank"]["status"] == "pass"

    def test_mismatched_factors(self, tmp_path, exemplar_bundle):
        exemplar_bundle["factors"] = [BiPoly.from_coeffs([[0, 1], [-1, 0]]).model_dump(mode="json")]
        code, report = invoke("report", "--bundle", write_json(tmp_path, "bundle.json", exemplar_bundle))
        assert code == 2
        assert report["error"]["kind"] == "input"

    def test_report_is_deterministic(self):
        first: list[str] = []
        second: list[str] = []
        main(["report", "--bundle", str(EXEMPLAR_BUNDLE), "--seed", "3"], emit=first.append)
        main(["report", "--bundle", str(EXEMPLAR_BUNDLE), "--seed", "3"], emit=second.append)
        assert first == second
