"""Top-level root-locus computation: seeding, tracing, stability intervals."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import continuation as cont
from . import critical, localmodel
from .critical import CriticalKind, CriticalPoint
from .errors import NoConvergenceError, JacobianSingularError
from .plant import LocusKind, LocusProblem

_AXIS_TOL = 1e-9


@dataclass(frozen=True)
class ImagAxisEvent:
    """A characteristic root crossing the imaginary axis."""

    lam: float
    omega: float
    direction: int  # +1 root moves into Re(s) > 0, -1 moves out


@dataclass
class RootLocusResult:
    problem: LocusProblem
    trajectories: list[cont.Trajectory]
    critical_points: list[CriticalPoint]
    imag_axis_events: list[ImagAxisEvent]
    stability_intervals: list[tuple[float, float]]
    initial_unstable_count: int
    warnings: list[str] = field(default_factory=list)


@dataclass
class _Seed:
    origin: CriticalPoint
    direction: np.ndarray
    first_prediction: np.ndarray | None = None
    record: object = None  # _BranchRecord when spawned from a branch point
    spawn_ray: complex | None = None

    def key(self):
        d = self.direction
        return (*self.origin.key(), round(math.atan2(d[1], d[0]), 12))


def _start_seeds(problem: LocusProblem, cp: CriticalPoint) -> list[_Seed]:
    if cp.multiplicity == 1:
        return [_Seed(cp, cont.initial_tangent(problem, cp))]
    rays = localmodel.start_rays(problem, cp.root, cp.multiplicity)
    seeds = []
    for ray in rays:
        cfg = cont.ContinuationConfig()
        y0, d0 = cont.branch_spawn_prediction(problem, cp, ray, cfg)
        seeds.append(_Seed(cp, d0, first_prediction=y0, spawn_ray=ray))
    return seeds


def _branch_seeds(
    problem: LocusProblem,
    registry: cont.BranchRegistry,
    rec,
    config: cont.ContinuationConfig,
    only_nonreal: bool = False,
) -> list[_Seed]:
    """Spawn every unconsumed up ray of a branch record."""
    cp = rec.point
    seeds = []
    while True:
        ray = registry.consume_ray(rec, 1.0 + 0.0j)
        if ray is None:
            break
        if only_nonreal and abs(ray.imag) < 1e-9:
            continue
        y0, d0 = cont.branch_spawn_prediction(problem, cp, ray, config)
        seeds.append(_Seed(cp, d0, first_prediction=y0, record=rec, spawn_ray=ray))
    return seeds


def _trace_seed(problem, seed, registry, config):
    return cont.trace_trajectory(
        problem,
        seed.origin,
        seed.direction,
        registry,
        config,
        origin_record=seed.record,
        first_prediction=seed.first_prediction,
        spawn_ray=seed.spawn_ray,
    )


def compute_root_locus(
    problem: LocusProblem,
    config: cont.ContinuationConfig | None = None,
    workers: int = 1,
) -> RootLocusResult:
    """Compute every locus trajectory in the region for lam in [0, lambda_max]."""
    config = config or cont.ContinuationConfig()
    registry = cont.BranchRegistry()
    warnings: list[str] = []

    starts = critical.starting_points(problem)
    crossings = critical.boundary_crossings(problem)
    crit_points: list[CriticalPoint] = list(starts) + list(crossings)

    trajectories: list[cont.Trajectory] = []
    seeds: list[_Seed] = []
    records_by_bp = {}

    use_real_axis = (
        problem.kind is LocusKind.GAIN and problem.plant.conjugate_symmetric
    )

    if problem.kind is LocusKind.GAIN:
        bps = critical.branch_points_gain(problem)
        crit_points.extend(bps)
        for bp in bps:
            rec = registry.register(bp, [complex(d[0], d[1]) for d in bp.directions])
            records_by_bp[id(bp)] = rec
    else:
        bps = []

    if use_real_axis:
        real_bps = [bp for bp in bps if abs(bp.root.imag) < _AXIS_TOL]
        real_trajs, colliders = cont.real_axis_segments(problem, real_bps, config)
        trajectories.extend(real_trajs)
        seen = set()
        for bp in colliders:
            if id(bp) in seen:
                continue
            seen.add(id(bp))
            rec = records_by_bp[id(bp)]
            seeds.extend(_branch_seeds(problem, registry, rec, config, only_nonreal=True))
        # real rays of real branch points are owned by the axis segments
        for bp in real_bps:
            rec = records_by_bp[id(bp)]
            for ray in list(rec.rays_up):
                if abs(ray.imag) < 1e-9:
                    registry.consume_matching(rec, ray)
        for cp in starts:
            if abs(cp.root.imag) >= _AXIS_TOL:
                seeds.extend(_start_seeds(problem, cp))
        for cp in crossings:
            if cp.kind is CriticalKind.CROSSING_IN and abs(cp.root.imag) >= _AXIS_TOL:
                seeds.append(_Seed(cp, cont.initial_tangent(problem, cp)))
    else:
        for cp in starts:
            seeds.extend(_start_seeds(problem, cp))
        for cp in crossings:
            if cp.kind is CriticalKind.CROSSING_IN:
                seeds.append(_Seed(cp, cont.initial_tangent(problem, cp)))

    seeds.sort(key=_Seed.key)
    pending = list(seeds)
    spawned_records = set()

    def handle_result(traj, merge):
        trajectories.append(traj)
        if merge is None:
            return []
        rec = merge.record
        if rec.point not in [cp for cp in crit_points]:
            crit_points.append(rec.point)
        if id(rec) in spawned_records:
            return []
        spawned_records.add(id(rec))
        return _branch_seeds(problem, registry, rec, config)

    while pending:
        batch, pending = pending, []
        if workers > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                results = list(
                    ex.map(lambda s: _trace_seed(problem, s, registry, config), batch)
                )
        else:
            results = [_trace_seed(problem, s, registry, config) for s in batch]
        new = []
        for traj, merge in results:
            new.extend(handle_result(traj, merge))
        new.sort(key=_Seed.key)
        pending = new

    for traj in trajectories:
        if traj.termination is cont.Termination.STALLED:
            warnings.append(
                f"trajectory from {traj.origin.root} stalled: {traj.note}"
            )

    trajectories.sort(key=lambda t: (*t.origin.key(), _first_angle(t)))
    crit_points = _dedup_points(crit_points)
    events, n0 = _imag_axis_events(problem, trajectories, config)
    stability = _stability_intervals(problem, events, n0)
    return RootLocusResult(
        problem, trajectories, crit_points, events, stability, n0, warnings
    )


def imaginary_axis_events(result: RootLocusResult) -> list[ImagAxisEvent]:
    """Recompute the refined imaginary-axis crossings of a result."""
    events, _ = _imag_axis_events(
        result.problem, result.trajectories, cont.ContinuationConfig()
    )
    return events


def _first_angle(t: cont.Trajectory) -> float:
    if len(t.points) >= 2:
        d = t.points[1].as_array() - t.points[0].as_array()
        return round(math.atan2(d[1], d[0]), 12)
    return 0.0


def _dedup_points(points: list[CriticalPoint]) -> list[CriticalPoint]:
    points = sorted(points, key=CriticalPoint.key)
    out: list[CriticalPoint] = []
    for cp in points:
        if (
            out
            and out[-1].kind is cp.kind
            and abs(cp.lam - out[-1].lam) < 1e-10
            and abs(cp.root - out[-1].root) < 1e-8
        ):
            continue
        out.append(cp)
    return out


def _imag_axis_events(
    problem: LocusProblem,
    trajectories: list[cont.Trajectory],
    config: cont.ContinuationConfig,
) -> tuple[list[ImagAxisEvent], int]:
    """Refined axis crossings of all trajectories plus the unstable count at lam = 0.

    A trajectory starting exactly on the axis contributes an event at its first
    off-axis sample; the initial unstable count only includes strictly
    right-half-plane starting roots.
    """
    events: list[ImagAxisEvent] = []
    n0 = 0
    for traj in trajectories:
        pts = traj.points
        if not pts:
            continue
        if pts[0].lam < 1e-14 and pts[0].sigma > _AXIS_TOL:
            n0 += 1
        prev_sign = _axis_sign(pts[0].sigma)
        for a, b in zip(pts[:-1], pts[1:]):
            sign = _axis_sign(b.sigma)
            if sign == prev_sign or sign == 0:
                if sign != 0:
                    prev_sign = sign
                continue
            if prev_sign == 0:
                # departure of an on-axis starting root: only a move into the
                # right half-plane changes the unstable count
                if sign > 0:
                    events.append(ImagAxisEvent(a.lam, a.omega, sign))
                prev_sign = sign
                continue
            frac = a.sigma / (a.sigma - b.sigma)
            guess = a.as_array() + frac * (b.as_array() - a.as_array())
            try:
                y = cont._clip_solve(problem, guess, "sigma", 0.0, config)
                events.append(ImagAxisEvent(float(y[2]), float(y[1]), sign))
            except (NoConvergenceError, JacobianSingularError):
                events.append(ImagAxisEvent(float(guess[2]), float(guess[1]), sign))
            prev_sign = sign
    events.sort(key=lambda e: (e.lam, e.omega))
    return events, n0


def _axis_sign(sigma: float) -> int:
    if sigma > _AXIS_TOL:
        return 1
    if sigma < -_AXIS_TOL:
        return -1
    return 0


def _stability_intervals(
    problem: LocusProblem, events: list[ImagAxisEvent], n0: int
) -> list[tuple[float, float]]:
    """Parameter intervals with no characteristic root in Re(s) > 0."""
    intervals: list[tuple[float, float]] = []
    count = n0
    lam_prev = 0.0
    for ev in events:
        if count == 0 and ev.lam > lam_prev + 1e-12:
            intervals.append((lam_prev, min(ev.lam, problem.lambda_max)))
        count += ev.direction
        lam_prev = ev.lam
    if count == 0 and problem.lambda_max > lam_prev + 1e-12:
        intervals.append((lam_prev, problem.lambda_max))
    merged: list[tuple[float, float]] = []
    for lo, hi in intervals:
        if merged and lo - merged[-1][1] < 1e-9:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged
