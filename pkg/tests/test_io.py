"""Problem parsing, result serialization, round trips."""

import json
import math
import os

import numpy as np
import pytest

from rootlocus.engine import compute_root_locus
from rootlocus.errors import ParseError, ValidationError
from rootlocus.io import (
    dumps_result,
    emit_results,
    load_result,
    parse_problem,
    parse_problem_dict,
    problem_to_dict,
    results_equal,
)
from rootlocus.plant import LocusKind, LocusProblem

from conftest import first_order_plant


EXAMPLE3_DOC = {
    "plant": {
        "zeros": [[5.0, 5.0], [5.0, -5.0]],
        "poles": [[-0.5, 0.0], [-1.0, 0.0], [-2.5, 0.0]],
        "gain": 1.0,
        "delay": 1.0,
    },
    "locus": {"kind": "gain", "sigma0": -3.5, "lambda_max": 5.0},
}


def _write(tmp_path, doc):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_parse_example3(tmp_path):
    problem, config = parse_problem(_write(tmp_path, EXAMPLE3_DOC))
    assert problem.kind is LocusKind.GAIN
    assert problem.sigma0 == -3.5
    assert problem.plant.n_poles == 3
    # the stated poles factor the cubic s^3 + 4s^2 + 4.25s + 1.25
    assert np.poly([-0.5, -1.0, -2.5]) == pytest.approx([1.0, 4.0, 4.25, 1.25])
    assert config.corrector_tol == 1e-5


def test_parse_continuation_overrides(tmp_path):
    doc = dict(EXAMPLE3_DOC, continuation={"h0": 0.005, "corrector_tol": 1e-7})
    _, config = parse_problem(_write(tmp_path, doc))
    assert config.h0 == 0.005
    assert config.corrector_tol == 1e-7


def test_parse_errors_name_the_field(tmp_path):
    doc = {"plant": dict(EXAMPLE3_DOC["plant"]), "locus": dict(EXAMPLE3_DOC["locus"])}
    del doc["plant"]["gain"]
    with pytest.raises(ParseError, match=r"plant.*gain"):
        parse_problem(_write(tmp_path, doc))

    doc = {"plant": EXAMPLE3_DOC["plant"], "locus": dict(EXAMPLE3_DOC["locus"], kind="nope")}
    with pytest.raises(ParseError, match="gain.*delay|kind"):
        parse_problem(_write(tmp_path, doc))

    doc = dict(EXAMPLE3_DOC, continuation={"bogus": 1})
    with pytest.raises(ParseError, match="bogus"):
        parse_problem(_write(tmp_path, doc))

    bad = {"plant": dict(EXAMPLE3_DOC["plant"], poles=[[1.0]]), "locus": EXAMPLE3_DOC["locus"]}
    with pytest.raises(ParseError, match=r"poles\[0\]"):
        parse_problem(_write(tmp_path, bad))


def test_parse_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError, match="broken.json"):
        parse_problem(str(path))


def test_parse_missing_file():
    with pytest.raises(ParseError):
        parse_problem("/nonexistent/problem.json")


def test_validation_pole_on_boundary(tmp_path):
    doc = {
        "plant": {"zeros": [], "poles": [[-1.0, 0.0]], "gain": 1.0, "delay": 1.0},
        "locus": {"kind": "gain", "sigma0": -1.0, "lambda_max": 1.0},
    }
    with pytest.raises(ValidationError, match="boundary"):
        parse_problem(_write(tmp_path, doc))


def test_validation_biproper_bound_message(tmp_path):
    doc = {
        "plant": {"zeros": [[-2.0, 0.0]], "poles": [[-1.0, 0.0]], "gain": 3.0, "delay": 1.0},
        "locus": {"kind": "gain", "sigma0": -0.5, "lambda_max": 5.0},
    }
    with pytest.raises(ValidationError, match="lambda_max"):
        parse_problem(_write(tmp_path, doc))


def test_problem_dict_round_trip():
    problem = LocusProblem(LocusKind.GAIN, -1.5, 2.0, first_order_plant())
    again, _ = parse_problem_dict(problem_to_dict(problem))
    assert again == problem


@pytest.fixture(scope="module")
def small_result():
    problem = LocusProblem(LocusKind.GAIN, -1.5, 5.0, first_order_plant())
    return compute_root_locus(problem)


def test_emit_and_load_round_trip(small_result, tmp_path):
    out = tmp_path / "out"
    written = emit_results(small_result, str(out))
    names = {os.path.basename(p) for p in written}
    assert "result.json" in names
    assert "critical_points.csv" in names
    assert "stability_intervals.txt" in names
    assert any(n.startswith("trajectory_") for n in names)

    loaded = load_result(str(out))
    assert results_equal(loaded, small_result)
    # emitting the loaded result reproduces the files byte for byte
    out2 = tmp_path / "out2"
    emit_results(loaded, str(out2))
    for name in sorted(names):
        a = (out / name).read_bytes()
        b = (out2 / name).read_bytes()
        assert a == b, name


def test_trajectory_csv_shape(small_result, tmp_path):
    out = tmp_path / "csv"
    emit_results(small_result, str(out))
    text = (out / "trajectory_0000.csv").read_text(encoding="utf-8")
    lines = text.strip().split("\n")
    assert lines[0] == "sigma,omega,lambda,residual"
    assert len(lines) == 1 + len(small_result.trajectories[0].points)
    lams = [float(l.split(",")[2]) for l in lines[1:]]
    assert all(b >= a - 1e-12 for a, b in zip(lams, lams[1:]))


def test_seventeen_digit_floats_round_trip(small_result):
    doc = json.loads(dumps_result(small_result))
    pt = small_result.trajectories[0].points[1]
    assert doc["trajectories"][0]["points"][1][0] == pt.sigma
    rng = np.random.default_rng(3)
    for x in rng.standard_normal(100):
        assert float(format(float(x), ".17g")) == float(x)


def test_emit_empty_result(tmp_path):
    # region contains no starting root and no crossing below lambda_max
    problem = LocusProblem(LocusKind.GAIN, -0.5, 1.0, first_order_plant())
    result = compute_root_locus(problem)
    assert result.trajectories == []
    out = tmp_path / "empty"
    emit_results(result, str(out))
    assert (out / "critical_points.csv").read_text(encoding="utf-8").startswith("kind,")
    assert (out / "stability_intervals.txt").read_text(encoding="utf-8") != ""
    loaded = load_result(str(out))
    assert results_equal(loaded, result)
