"""Pseudo-arclength continuation of root-locus trajectories.

A trajectory is followed in the combined (Re s, Im s, lam) space: secant
prediction, Newton correction on the log magnitude/phase pair plus a
linearized arclength constraint, and adaptive step control driven by the
Newton contraction rate and the distance to the locus.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import localmodel
from .critical import CriticalKind, CriticalPoint
from .errors import (
    DegenerateError,
    JacobianSingularError,
    NoConvergenceError,
    PoleZeroProximityError,
)
from .plant import LocusKind, LocusProblem, log_derivative

_LAMBDA_NOISE_REL = 1e-12


@dataclass(frozen=True)
class ContinuationConfig:
    """Step-control and corrector settings for trajectory tracing."""

    h0: float | None = None  # default resolved per problem: 1e-2 * (1 + |sigma0|)
    kappa_nominal: float = 0.5
    delta_nominal: float = 1e-3
    corrector_tol: float = 1e-5
    max_newton_iters: int = 25
    h_min: float = 1e-9
    h_max: float = 1.0
    max_points: int = 100000

    def __post_init__(self):
        if self.h0 is not None and not (self.h_min <= self.h0 <= self.h_max):
            raise ValueError("require h_min <= h0 <= h_max")
        if min(self.kappa_nominal, self.delta_nominal, self.corrector_tol) <= 0:
            raise ValueError("tolerances must be positive")

    def resolved_h0(self, problem: LocusProblem) -> float:
        if self.h0 is not None:
            return self.h0
        return min(self.h_max, max(self.h_min, 1e-2 * (1.0 + abs(problem.sigma0))))


@dataclass(frozen=True)
class TrajectoryPoint:
    sigma: float
    omega: float
    lam: float
    residual: float
    step_used: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sigma, self.omega, self.lam])

    @property
    def root(self) -> complex:
        return complex(self.sigma, self.omega)


class Termination(Enum):
    LAMBDA_MAX_REACHED = "lambda_max_reached"
    LEFT_REGION = "left_region"
    MERGED_AT_BRANCH = "merged_at_branch"
    STALLED = "stalled"


@dataclass
class Trajectory:
    origin: CriticalPoint
    points: list[TrajectoryPoint]
    termination: Termination
    note: str = ""


@dataclass
class _BranchRecord:
    point: CriticalPoint  # BRANCH critical point, lam at the branch
    rays_up: list[complex]
    consumed: list[bool]

    def y(self) -> np.ndarray:
        return np.array([self.point.root.real, self.point.root.imag, self.point.lam])


class BranchRegistry:
    """Shared, thread-safe registry of branch points and consumed directions."""

    def __init__(self, merge_tol: float = 1e-6):
        self._lock = threading.Lock()
        self._records: list[_BranchRecord] = []
        self.merge_tol = merge_tol

    def register(self, cp: CriticalPoint, rays_up: list[complex]) -> _BranchRecord:
        with self._lock:
            for rec in self._records:
                if abs(rec.point.root - cp.root) < self.merge_tol:
                    return rec
            rec = _BranchRecord(cp, list(rays_up), [False] * len(rays_up))
            self._records.append(rec)
            return rec

    def records(self) -> list[_BranchRecord]:
        with self._lock:
            return list(self._records)

    def consume_ray(self, rec: _BranchRecord, preferred: complex) -> complex | None:
        """Atomically take the unconsumed up-ray closest in angle to ``preferred``."""
        with self._lock:
            best = None
            for i, (ray, used) in enumerate(zip(rec.rays_up, rec.consumed)):
                if used:
                    continue
                score = abs(ray / abs(ray) - preferred / abs(preferred))
                if best is None or score < best[1]:
                    best = (i, score)
            if best is None:
                return None
            rec.consumed[best[0]] = True
            return rec.rays_up[best[0]]

    def consume_matching(self, rec: _BranchRecord, direction: complex) -> None:
        """Mark the ray nearest to ``direction`` consumed (ownership transfer)."""
        self.consume_ray(rec, direction)


def _mp_residual(problem: LocusProblem, y: np.ndarray) -> tuple[float, float]:
    return problem.mp(y[0], y[1], y[2])


def _mp_jacobian(problem: LocusProblem, y: np.ndarray) -> np.ndarray:
    sigma, omega, lam = y
    u0 = log_derivative(problem.plant, complex(sigma, omega))
    heff = problem.effective_h(lam)
    a = u0.real - heff
    b = u0.imag
    if problem.kind is LocusKind.GAIN:
        dm_dl, dp_dl = 1.0 / lam, 0.0
    else:
        dm_dl, dp_dl = -sigma, -omega
    return np.array([[a, -b, dm_dl], [b, a, dp_dl]])


def initial_tangent(problem: LocusProblem, point: CriticalPoint) -> np.ndarray:
    """Unit tangent (Re ds, Im ds, dlam), dlam > 0, at a start or crossing point."""
    if point.multiplicity > 1:
        raise JacobianSingularError(
            "tangent is singular at a multiple root; use the branch ray structure"
        )
    return localmodel.initial_tangent_simple(problem, point.root, point.lam)


def predict(prev: TrajectoryPoint, curr: TrajectoryPoint, step: float) -> np.ndarray:
    """Secant extrapolation from the last two corrected points."""
    d = curr.as_array() - prev.as_array()
    norm = np.linalg.norm(d)
    if norm < 1e-14:
        raise DegenerateError("secant direction degenerated: consecutive points coincide")
    return curr.as_array() + d / norm * step


def correct(
    problem: LocusProblem,
    predicted: np.ndarray,
    direction: np.ndarray,
    config: ContinuationConfig,
) -> tuple[TrajectoryPoint, float]:
    """Newton correction of a predicted point onto the locus.

    Solves M = 0, P = 0 and the arclength plane constraint; returns the
    accepted point together with the contraction rate of the first two
    Newton updates.
    """
    y = np.array(predicted, dtype=float)
    yp = np.array(predicted, dtype=float)
    step_norms: list[float] = []
    for it in range(config.max_newton_iters):
        if problem.kind is LocusKind.GAIN and y[2] <= 0.0:
            raise NoConvergenceError("corrector iterate left lam > 0")
        if problem.kind is LocusKind.DELAY and y[2] < 0.0:
            y[2] = 0.0
        try:
            m, p = _mp_residual(problem, y)
            jac2 = _mp_jacobian(problem, y)
        except PoleZeroProximityError as exc:
            raise NoConvergenceError(f"corrector iterate hit a pole/zero: {exc}") from exc
        f = np.array([m, p, float(np.dot(y - yp, direction))])
        jac = np.vstack([jac2, direction])
        try:
            delta = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError as exc:
            raise JacobianSingularError("singular corrector Jacobian") from exc
        cond_scale = np.max(np.abs(delta))
        if not np.isfinite(cond_scale):
            raise JacobianSingularError("corrector update overflowed")
        y = y + delta
        step_norms.append(float(np.linalg.norm(delta)))
        if step_norms[-1] < config.corrector_tol:
            if problem.kind is LocusKind.GAIN and y[2] <= 0.0:
                raise NoConvergenceError("corrector converged outside lam > 0")
            if problem.kind is LocusKind.DELAY and y[2] < 0.0:
                y[2] = 0.0
            kappa = step_norms[1] / step_norms[0] if len(step_norms) >= 2 else 0.0
            delta_dist = problem.cartesian_residual(y[0], y[1], y[2])
            pt = TrajectoryPoint(y[0], y[1], y[2], delta_dist, 0.0)
            return pt, kappa
        if len(step_norms) >= 3 and step_norms[-1] > 10.0 * step_norms[0]:
            raise NoConvergenceError("corrector diverging")
    raise NoConvergenceError(f"corrector did not converge in {config.max_newton_iters} iterations")


def step_update(
    kappa: float, delta: float, h_curr: float, config: ContinuationConfig
) -> tuple[float, bool]:
    """Adaptive step length from contraction rate and distance to the locus."""
    kappa_df = math.sqrt(max(kappa, 0.0) / config.kappa_nominal)
    delta_df = math.sqrt(max(delta, 0.0) / config.delta_nominal)
    raw = max(kappa_df, delta_df)
    h_df = max(min(raw, 2.0), 0.5)
    h_next = min(max(h_curr / h_df, config.h_min), config.h_max)
    return h_next, raw >= 2.0


def detect_branch_delay(traj: "Trajectory | list[float]") -> tuple[int, int] | None:
    """Index pair bracketing the first significant lam decrease, if any.

    A lam reversal along a traced trajectory indicates that a branch point
    was passed; accepts a trajectory or a bare lam sequence.
    """
    lams = [p.lam for p in traj.points] if isinstance(traj, Trajectory) else traj
    for i in range(1, len(lams)):
        drop = lams[i - 1] - lams[i]
        if drop > _LAMBDA_NOISE_REL * max(1.0, abs(lams[i - 1])):
            return (i - 1, i)
    return None


def solve_branch_point(
    problem: LocusProblem, y_init: np.ndarray, max_iters: int = 60
) -> CriticalPoint:
    """Solve the augmented branch-point system M = P = 0, G'/G - lam_eff = 0.

    Gauss-Newton on the overdetermined 4x3 system; classifies multiplicity
    and attaches the up-ray directions.
    """
    y = np.array(y_init, dtype=float)
    for _ in range(max_iters):
        sigma, omega, lam = y
        s = complex(sigma, omega)
        try:
            m, p = _mp_residual(problem, y)
            u0 = log_derivative(problem.plant, s) - problem.effective_h(lam)
            jac2 = _mp_jacobian(problem, y)
        except PoleZeroProximityError as exc:
            raise NoConvergenceError(f"branch solve hit a pole/zero: {exc}") from exc
        # u'(s) for the derivative rows
        du = 0.0 + 0.0j
        for z in problem.plant.zeros:
            du -= 1.0 / (s - z) ** 2
        for pp in problem.plant.poles:
            du += 1.0 / (s - pp) ** 2
        dl = 0.0 if problem.kind is LocusKind.GAIN else -1.0
        f = np.array([m, p, u0.real, u0.imag])
        jac = np.vstack(
            [
                jac2,
                [du.real, -du.imag, dl],
                [du.imag, du.real, 0.0],
            ]
        )
        delta, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        y = y + delta
        if problem.kind is LocusKind.GAIN:
            y[2] = max(y[2], 1e-300)
        if np.linalg.norm(delta) < 1e-12 * (1.0 + np.linalg.norm(y)):
            break
    else:
        raise NoConvergenceError("branch-point solve did not converge")
    s = complex(y[0], y[1])
    lam = float(y[2])
    n = localmodel.multiplicity(problem, s, lam)
    n = max(n, 2)
    rays = localmodel.branch_rays(problem, s, lam, n)
    cp = CriticalPoint(CriticalKind.BRANCH, s, lam, multiplicity=n)
    cp.directions = [np.array([w.real, w.imag, 0.0]) for w in rays]
    return cp


def _clip_solve(
    problem: LocusProblem,
    y_guess: np.ndarray,
    pin: str,
    pin_value: float,
    config: ContinuationConfig,
) -> np.ndarray:
    """2x2 Newton with one coordinate pinned (lam = lambda_max or sigma = sigma0/0)."""
    y = np.array(y_guess, dtype=float)
    idx = {"sigma": 0, "lam": 2}[pin]
    free = [i for i in range(3) if i != idx]
    y[idx] = pin_value
    for _ in range(50):
        m, p = _mp_residual(problem, y)
        jac = _mp_jacobian(problem, y)[:, free]
        try:
            delta = np.linalg.solve(jac, -np.array([m, p]))
        except np.linalg.LinAlgError as exc:
            raise JacobianSingularError("singular clip Jacobian") from exc
        y[free] += delta
        if np.linalg.norm(delta) < 1e-13 * (1.0 + np.linalg.norm(y)):
            return y
    raise NoConvergenceError(f"clip solve with pinned {pin} did not converge")


@dataclass
class MergeEvent:
    """Reported when a trajectory terminates at a branch point."""

    record: _BranchRecord
    incoming: complex  # unit chord direction of arrival in the s-plane


def _branch_proximity(registry, y: np.ndarray, radius: float, skip) -> _BranchRecord | None:
    """Nearest registered branch point within ``radius`` that lies ahead in lam."""
    for rec in registry.records():
        if skip is not None and rec is skip:
            continue
        if rec.point.lam < y[2] - 1e-12 * (1.0 + abs(y[2])):
            continue
        if np.linalg.norm(rec.y() - y) < radius:
            return rec
    return None


def trace_trajectory(
    problem: LocusProblem,
    origin: CriticalPoint,
    direction: np.ndarray,
    registry: BranchRegistry,
    config: ContinuationConfig,
    origin_record: _BranchRecord | None = None,
    first_prediction: np.ndarray | None = None,
    spawn_ray: complex | None = None,
) -> tuple[Trajectory, MergeEvent | None]:
    """Trace one trajectory from a critical point until a termination condition.

    Returns the trajectory and, when it merged at a branch point, the merge
    event the caller uses to spawn outgoing branches.
    """
    y0 = np.array([origin.root.real, origin.root.imag, origin.lam])
    try:
        res0 = problem.cartesian_residual(*y0) if origin.lam > 0 else 0.0
    except PoleZeroProximityError:
        res0 = 0.0
    points = [TrajectoryPoint(y0[0], y0[1], y0[2], res0, 0.0)]
    h = config.resolved_h0(problem)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    pending_first = first_prediction
    merge: MergeEvent | None = None
    termination = None
    note = ""

    def current_dir():
        if len(points) >= 2:
            d = points[-1].as_array() - points[-2].as_array()
            return d / np.linalg.norm(d)
        return direction

    def reseed_first(step: float):
        # a shortened first step from a multiple point must be re-placed on
        # the ray model; tangent extrapolation has the wrong parameter scaling
        nonlocal pending_first, direction
        if spawn_ray is not None and len(points) == 1:
            pending_first, direction = branch_spawn_prediction(
                problem, origin, spawn_ray, config, t=step
            )
            return direction
        return None

    while termination is None:
        if len(points) >= config.max_points:
            termination = Termination.STALLED
            note = "max_points reached"
            break
        d = current_dir()
        halvings = 0
        accepted = None
        while accepted is None:
            if pending_first is not None:
                y_pred = np.array(pending_first, dtype=float)
            elif len(points) >= 2:
                y_pred = predict(points[-2], points[-1], h)
            else:
                y_pred = points[-1].as_array() + d * h
            try:
                pt, kappa = correct(problem, y_pred, d, config)
            except (NoConvergenceError, JacobianSingularError) as exc:
                halvings += 1
                h = max(h / 2.0, config.h_min)
                pending_first = None
                nd = reseed_first(h)
                if nd is not None:
                    d = nd
                if halvings <= 6:
                    continue
                # repeated failure: branch point nearby, or a genuine stall
                rec = _branch_proximity(
                    registry, points[-1].as_array(), 50.0 * h + 1e-6, origin_record
                )
                if rec is not None:
                    accepted = "merge"
                    merge_rec = rec
                    break
                try:
                    cp = solve_branch_point(problem, points[-1].as_array())
                    rec = registry.register(cp, [d[0] + 1j * d[1] for d in cp.directions])
                    accepted = "merge"
                    merge_rec = rec
                    break
                except NoConvergenceError:
                    termination = Termination.STALLED
                    note = f"corrector stalled: {exc}"
                    accepted = "stop"
                    break
            pending_first = None
            # curvature guard: sharp turns mean the predictor skipped locus
            # structure (tight loops, nearby branch points); refine the step
            chord = pt.as_array() - points[-1].as_array()
            chord_norm = np.linalg.norm(chord)
            if chord_norm > 0 and h > config.h_min * 1.01:
                turned = float(np.dot(chord, d)) / chord_norm < 0.9
                # midpoint-on-locus check catches skipped loops; invalid near a
                # multiple point, where the parameter grows superlinearly
                skipped = False
                if len(points) >= 3:
                    mid = points[-1].as_array() + 0.5 * chord
                    try:
                        skipped = (
                            problem.cartesian_residual(*mid)
                            > 100.0 * config.delta_nominal
                        )
                    except PoleZeroProximityError:
                        skipped = True
                if turned or skipped:
                    h = max(h / 2.0, config.h_min)
                    nd = reseed_first(h)
                    if nd is not None:
                        d = nd
                    continue
            h_next, repeat = step_update(kappa, pt.residual, h, config)
            if repeat and h > config.h_min * 1.01:
                h = h_next
                nd = reseed_first(h)
                if nd is not None:
                    d = nd
                continue
            accepted = pt
            h = h_next
        if accepted == "stop":
            break
        if accepted == "merge":
            cp = merge_rec.point
            chord = cp.root - points[-1].root
            incoming = chord / abs(chord) if abs(chord) > 0 else complex(d[0], d[1])
            points.append(TrajectoryPoint(cp.root.real, cp.root.imag, cp.lam, 0.0, h))
            merge = MergeEvent(merge_rec, incoming)
            termination = Termination.MERGED_AT_BRANCH
            break
        pt = accepted
        pt = TrajectoryPoint(pt.sigma, pt.omega, pt.lam, pt.residual, h)

        # clip against the lam upper bound and the region boundary
        if pt.lam > problem.lambda_max:
            try:
                y_end = _clip_solve(problem, pt.as_array(), "lam", problem.lambda_max, config)
                points.append(TrajectoryPoint(y_end[0], y_end[1], y_end[2],
                                              problem.cartesian_residual(*y_end), h))
            except (NoConvergenceError, JacobianSingularError):
                pass
            termination = Termination.LAMBDA_MAX_REACHED
            break
        if pt.sigma < problem.sigma0:
            try:
                y_end = _clip_solve(problem, pt.as_array(), "sigma", problem.sigma0, config)
                if 0.0 <= y_end[2] <= problem.lambda_max:
                    points.append(TrajectoryPoint(y_end[0], y_end[1], y_end[2],
                                                  problem.cartesian_residual(*y_end), h))
            except (NoConvergenceError, JacobianSingularError):
                pass
            termination = Termination.LEFT_REGION
            break

        # lam reversal: the continuation ran straight through an even branch point
        drop = points[-1].lam - pt.lam
        if drop > _LAMBDA_NOISE_REL * max(1.0, points[-1].lam) and len(points) >= 2:
            try:
                cp = solve_branch_point(problem, points[-1].as_array())
                rec = registry.register(cp, [dd[0] + 1j * dd[1] for dd in cp.directions])
                k = _truncate_at_branch(points, rec)
                del points[k:]
                chord = cp.root - points[-1].root if points else None
                incoming = (
                    chord / abs(chord)
                    if chord is not None and abs(chord) > 0
                    else complex(d[0], d[1])
                )
                points.append(TrajectoryPoint(cp.root.real, cp.root.imag, cp.lam, 0.0, h))
                merge = MergeEvent(rec, incoming)
                termination = Termination.MERGED_AT_BRANCH
                break
            except NoConvergenceError:
                termination = Termination.STALLED
                note = "lam reversal detected but branch-point solve failed"
                break

        points.append(pt)

        # proactive merge with registered branch points lying ahead
        rec = _branch_proximity(registry, pt.as_array(), max(2.0 * h, 1e-9), origin_record)
        if rec is not None:
            cp = rec.point
            chord = cp.root - pt.root
            incoming = chord / abs(chord) if abs(chord) > 1e-15 else complex(d[0], d[1])
            points.append(TrajectoryPoint(cp.root.real, cp.root.imag, cp.lam, 0.0, h))
            merge = MergeEvent(rec, incoming)
            termination = Termination.MERGED_AT_BRANCH
            break
        if len(points) >= 4:
            origin_record = None  # origin shielding only applies near the origin

    return Trajectory(origin, points, termination, note), merge


def _truncate_at_branch(points: list[TrajectoryPoint], rec: _BranchRecord) -> int:
    """Index from which traced points lie past the branch point (to be dropped)."""
    y_bp = rec.y()
    best_i, best_d = len(points), math.inf
    for i, p in enumerate(points):
        dist = float(np.linalg.norm(p.as_array() - y_bp))
        if dist < best_d:
            best_i, best_d = i, dist
    return max(best_i, 1)


def outgoing_direction(incoming: complex, n: int) -> complex:
    """Lemma-governed continuation direction through a multiplicity-n point."""
    if n % 2 == 1:
        return incoming
    return incoming * cmath.exp(-1j * math.pi / n)


def branch_spawn_prediction(
    problem: LocusProblem,
    cp: CriticalPoint,
    ray: complex,
    config: ContinuationConfig,
    t: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Initial predicted point and direction for a trajectory leaving a branch point.

    Along an up ray the parameter grows like t^N, so the first prediction is
    placed analytically rather than by tangent extrapolation.
    """
    if t is None:
        t = config.resolved_h0(problem)
    n = cp.multiplicity
    y_pred = np.array(
        [
            cp.root.real + t * ray.real,
            cp.root.imag + t * ray.imag,
            cp.lam + t**n,
        ]
    )
    d = np.array([ray.real, ray.imag, n * t ** (n - 1)])
    return y_pred, d / np.linalg.norm(d)


def real_axis_segments(
    problem: LocusProblem,
    branch_points: list[CriticalPoint],
    config: ContinuationConfig,
    n_samples: int = 400,
) -> tuple[list[Trajectory], list[CriticalPoint]]:
    """Direct real-axis locus computation for the gain case.

    On the real axis the gain is the closed form lam(sigma) =
    e^{h sigma}/|G(sigma)| wherever G(sigma) < 0; segments between real
    critical points are sampled directly instead of continued.  Returns the
    trajectories plus the real branch points that terminate colliding
    segments (for complex-pair spawning by the caller).
    """
    assert problem.kind is LocusKind.GAIN
    plant = problem.plant
    s0 = problem.sigma0
    h = plant.delay
    real_poles = sorted({p.real for p in plant.poles if abs(p.imag) < 1e-12 and p.real >= s0})
    real_zeros = sorted({z.real for z in plant.zeros if abs(z.imag) < 1e-12 and z.real >= s0})
    real_bps = sorted(
        (bp for bp in branch_points if abs(bp.root.imag) < 1e-9),
        key=lambda bp: bp.root.real,
    )

    def g_real(x: float) -> float:
        return plant.transfer(complex(x, 0.0)).real

    def lam_of(x: float) -> float:
        return math.exp(h * x) / abs(g_real(x))

    # right cap: beyond all finite structure, push until lam exceeds lambda_max
    cap = max([s0 + 1.0] + [v + 1.0 for v in real_poles + real_zeros]
              + [bp.root.real + 1.0 for bp in real_bps])
    for _ in range(200):
        if g_real(cap) >= 0.0 or lam_of(cap) > 2.0 * problem.lambda_max:
            break
        cap *= 2.0 if cap > 0 else 0.5
        cap = cap + 1.0
    knots = sorted(
        set([s0, cap] + real_poles + real_zeros + [bp.root.real for bp in real_bps])
    )
    trajectories: list[Trajectory] = []
    colliders: list[CriticalPoint] = []

    eps = 1e-7
    for a, b in zip(knots[:-1], knots[1:]):
        if b - a < 4 * eps:
            continue
        mid = 0.5 * (a + b)
        if g_real(mid) >= 0.0:
            continue
        lo, hi = a + eps * (1 + abs(a)), b - eps * (1 + abs(b))
        lam_lo, lam_hi = lam_of(lo), lam_of(hi)
        # orient the traversal from low lam to high lam
        if lam_lo <= lam_hi:
            x_from, x_to, lam_from, lam_to = lo, hi, lam_lo, lam_hi
            end_knot, start_knot = b, a
        else:
            x_from, x_to, lam_from, lam_to = hi, lo, lam_hi, lam_lo
            end_knot, start_knot = a, b
        if lam_from > problem.lambda_max:
            continue
        # clip the far end at lambda_max
        if lam_to > problem.lambda_max:
            f = lambda x: lam_of(x) - problem.lambda_max
            import scipy.optimize as _opt

            x_to = float(_opt.brentq(f, min(x_from, x_to), max(x_from, x_to), xtol=1e-13))
            lam_to = problem.lambda_max
            clipped = True
        else:
            clipped = False

        xs = np.linspace(x_from, x_to, n_samples)
        pts = []
        for x in xs:
            lam = lam_of(float(x))
            if lam > problem.lambda_max * (1 + 1e-12):
                continue
            res = problem.cartesian_residual(float(x), 0.0, max(lam, 1e-300))
            pts.append(TrajectoryPoint(float(x), 0.0, lam, res, 0.0))
        pts.sort(key=lambda p: p.lam)
        if len(pts) < 2:
            continue

        # classify the origin of the segment
        def near(x, values, tol=1e-7):
            return any(abs(x - v) < tol * (1 + abs(v)) for v in values)

        if near(start_knot, real_poles) and lam_from < 1e-3:
            mult = sum(1 for p in plant.poles if abs(p.imag) < 1e-12
                       and abs(p.real - start_knot) < 1e-9)
            origin = CriticalPoint(
                CriticalKind.START, complex(start_knot, 0.0), 0.0, multiplicity=mult
            )
            pts.insert(0, TrajectoryPoint(start_knot, 0.0, 0.0, 0.0, 0.0))
        elif abs(start_knot - s0) < 1e-12:
            # the boundary is pole/zero-free, so the exact endpoint is usable
            lam_b = lam_of(s0)
            origin = CriticalPoint(CriticalKind.CROSSING_IN, complex(s0, 0.0), lam_b)
            if lam_b <= problem.lambda_max * (1 + 1e-12):
                pts.insert(
                    0,
                    TrajectoryPoint(
                        s0, 0.0, lam_b, problem.cartesian_residual(s0, 0.0, lam_b), 0.0
                    ),
                )
        else:
            bp = _nearest_bp(real_bps, start_knot)
            origin = bp if bp is not None else CriticalPoint(
                CriticalKind.START, complex(start_knot, 0.0), lam_from
            )

        if clipped:
            term = Termination.LAMBDA_MAX_REACHED
        elif abs(end_knot - s0) < 1e-12:
            term = Termination.LEFT_REGION
            lam_b = lam_of(s0)
            if lam_b <= problem.lambda_max * (1 + 1e-12):
                pts.append(
                    TrajectoryPoint(
                        s0, 0.0, lam_b, problem.cartesian_residual(s0, 0.0, lam_b), 0.0
                    )
                )
        else:
            bp = _nearest_bp(real_bps, end_knot)
            if bp is not None:
                term = Termination.MERGED_AT_BRANCH
                pts.append(TrajectoryPoint(bp.root.real, 0.0, bp.lam, 0.0, 0.0))
                colliders.append(bp)
            elif near(end_knot, real_zeros):
                term = Termination.LAMBDA_MAX_REACHED  # lam -> inf at a zero, clipped below
            else:
                term = Termination.LAMBDA_MAX_REACHED
        trajectories.append(Trajectory(origin, pts, term))
    return trajectories, colliders


def _nearest_bp(real_bps: list[CriticalPoint], x: float) -> CriticalPoint | None:
    for bp in real_bps:
        if abs(bp.root.real - x) < 1e-7 * (1 + abs(x)):
            return bp
    return None
