"""End-to-end engine behavior on small problems and the reference runs."""

import math

import pytest

from rootlocus.continuation import Termination
from rootlocus.critical import CriticalKind
from rootlocus.engine import compute_root_locus, imaginary_axis_events
from rootlocus.io import results_equal
from rootlocus.plant import LocusKind, LocusProblem

from conftest import example3_problem, first_order_plant


def test_trajectory_origins_are_critical_points(example3_result):
    keys = {cp.key() for cp in example3_result.critical_points}
    for traj in example3_result.trajectories:
        assert traj.origin.key() in keys


def test_example3_branch_point_and_events(example3_result):
    branches = [
        cp for cp in example3_result.critical_points if cp.kind is CriticalKind.BRANCH
    ]
    assert any(
        abs(cp.root.real + 0.6976) < 5e-4 and abs(cp.root.imag) < 1e-9 for cp in branches
    )
    lams = sorted(e.lam for e in example3_result.imag_axis_events)
    assert lams and lams[0] == pytest.approx(0.0703, abs=5e-3)


def test_example3_every_entering_crossing_is_traced(example3_result):
    entering = [
        cp
        for cp in example3_result.critical_points
        if cp.kind is CriticalKind.CROSSING_IN and cp.lam <= example3_result.problem.lambda_max
    ]
    assert entering
    for cp in entering:
        owners = [
            t
            for t in example3_result.trajectories
            if t.origin.key() == cp.key() and t.origin.kind is cp.kind
        ]
        assert len(owners) == 1


def test_example3_conjugate_symmetry(example3_result):
    def mirrored(c, pool, tol=1e-6):
        return any(
            abs(c.real - o.real) < tol and abs(c.imag + o.imag) < tol for o in pool
        )

    ends = [t.points[-1].root for t in example3_result.trajectories]
    for e in ends:
        assert mirrored(e, ends)


def test_residual_and_lambda_bounds(example3_result):
    problem = example3_result.problem
    for traj in example3_result.trajectories:
        lams = [p.lam for p in traj.points]
        assert all(b >= a - 1e-12 for a, b in zip(lams, lams[1:]))
        for p in traj.points:
            assert -1e-12 <= p.lam <= problem.lambda_max * (1 + 1e-9)
            assert p.residual < 1e-4


def test_workers_do_not_change_the_result(example3_result):
    parallel = compute_root_locus(example3_problem(), workers=4)
    assert results_equal(parallel, example3_result)


def test_imaginary_axis_events_recompute(example3_result):
    events = imaginary_axis_events(example3_result)
    assert len(events) == len(example3_result.imag_axis_events)
    for a, b in zip(events, example3_result.imag_axis_events):
        assert a.lam == pytest.approx(b.lam, abs=1e-10)
        assert a.direction == b.direction


def test_stable_throughout_when_nothing_reaches_the_axis():
    # G = 1/(s+1), sigma0 = -0.5: no starts in the region, the entering
    # boundary root at lam = 1.156 never reaches the imaginary axis by lam = 2
    problem = LocusProblem(LocusKind.GAIN, -0.5, 2.0, first_order_plant())
    result = compute_root_locus(problem)
    assert result.initial_unstable_count == 0
    assert result.imag_axis_events == []
    assert result.stability_intervals == [(0.0, 2.0)]
    assert any(t.origin.kind is CriticalKind.CROSSING_IN for t in result.trajectories)


def test_no_stalled_trajectories_on_reference_runs(
    example1_result, example2_result, example3_result
):
    for result in (example1_result, example2_result, example3_result):
        assert result.warnings == []
        assert all(
            t.termination is not Termination.STALLED for t in result.trajectories
        )
