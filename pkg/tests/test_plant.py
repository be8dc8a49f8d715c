"""Plant evaluation, log decomposition, boundary functions, validation."""

import cmath
import math

import numpy as np
import pytest

from rootlocus.errors import PoleZeroProximityError, ValidationError
from rootlocus.plant import (
    LocusKind,
    LocusProblem,
    Plant,
    big_lambda,
    big_lambda_prime,
    eval_char_fn,
    log_magnitude,
    phase,
    phi,
    phi_prime,
    log_derivative,
    wrap_angle,
)

from conftest import example3_problem, first_order_plant


def test_wrap_angle_range():
    for x in [-10.0, -math.pi, -1.0, 0.0, 1.0, math.pi, 10.0, 123.456]:
        w = wrap_angle(x)
        assert -math.pi < w <= math.pi
        assert abs(math.sin(w - x)) < 1e-12


def test_transfer_first_order():
    plant = first_order_plant()
    assert plant.transfer(0.0) == pytest.approx(1.0)
    assert plant.transfer(1j) == pytest.approx(1 / (1 + 1j))


def test_transfer_raises_near_pole():
    plant = first_order_plant()
    with pytest.raises(PoleZeroProximityError):
        plant.transfer(complex(-1.0, 1e-12))


def test_log_magnitude_first_order():
    # G = 1/(s+1): at s = j with k = 1, h = 1 the log magnitude is -ln(sqrt(2))
    plant = first_order_plant()
    assert log_magnitude(plant, 0.0, 1.0, 1.0, 1.0) == pytest.approx(-0.5 * math.log(2.0))


def test_phase_first_order():
    plant = first_order_plant()
    # at s = j: pi + angle(G e^{-s}) = pi - atan(1) - 1
    assert phase(plant, 0.0, 1.0, 1.0) == pytest.approx(math.pi - math.atan(1.0) - 1.0)
    # at s = -2: G(-2) = -1 and e^{2} > 0, so the root condition holds exactly
    assert phase(plant, -2.0, 0.0, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_eval_char_fn_analytic_root():
    # 1 + lam*G(s)e^{-hs} = 0 at s = -2, lam = e^{-2} for G = 1/(s+1), h = 1
    plant = first_order_plant()
    val = eval_char_fn(plant, LocusKind.GAIN, -2.0, math.exp(-2.0))
    assert abs(val) < 1e-14


def test_big_lambda_first_order():
    plant = first_order_plant()
    # Lambda(w) = h*sigma0 - ln|G(sigma0+jw)| = -0.5 + 0.5*ln(0.25+w^2)
    assert big_lambda(plant, -0.5, 0.0) == pytest.approx(-0.5 + math.log(0.5))
    assert big_lambda(plant, -0.5, 0.0) == pytest.approx(-1.1931471805599453)
    assert big_lambda_prime(plant, -0.5, 1.0) == pytest.approx(1.0 / 1.25)


def test_phi_first_order():
    plant = first_order_plant()
    # phi(w) = -atan(w/0.5) - w for sigma0 = -0.5, h = 1 (G(sigma0) > 0)
    assert phi(plant, -0.5, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert phi_prime(plant, -0.5, 0.0) == pytest.approx(-3.0)
    w = 2.3
    assert phi(plant, -0.5, w) == pytest.approx(-math.atan(w / 0.5) - w)


def test_phi_matches_wrapped_plant_phase():
    problem = example3_problem()
    plant, s0 = problem.plant, problem.sigma0
    for w in np.linspace(0.0, 12.0, 97):
        s = complex(s0, w)
        want = cmath.phase(plant.transfer(s) * cmath.exp(-plant.delay * s))
        assert abs(wrap_angle(phi(plant, s0, w) - want)) < 1e-9


def test_phi_is_continuous():
    problem = example3_problem()
    plant, s0 = problem.plant, problem.sigma0
    w = np.linspace(0.0, 40.0, 20001)
    vals = phi(plant, s0, w)
    assert np.max(np.abs(np.diff(vals))) < 0.1


def test_boundary_derivatives_match_finite_differences():
    problem = example3_problem()
    plant, s0 = problem.plant, problem.sigma0
    step = 1e-6
    for w in [0.3, 1.7, 4.2, 9.9]:
        fd_l = (big_lambda(plant, s0, w + step) - big_lambda(plant, s0, w - step)) / (2 * step)
        assert big_lambda_prime(plant, s0, w) == pytest.approx(fd_l, abs=1e-5)
        fd_p = (phi(plant, s0, w + step) - phi(plant, s0, w - step)) / (2 * step)
        assert phi_prime(plant, s0, w) == pytest.approx(fd_p, abs=1e-5)


def test_log_derivative_matches_finite_differences():
    plant = example3_problem().plant
    s = complex(-0.8, 1.3)
    step = 1e-6
    fd = (
        cmath.log(plant.transfer(s + step)) - cmath.log(plant.transfer(s - step))
    ) / (2 * step)
    assert abs(log_derivative(plant, s) - fd) < 1e-5


def test_cartesian_and_log_forms_agree():
    problem = example3_problem()
    rng = np.random.default_rng(7)
    for _ in range(50):
        sigma = rng.uniform(-3.0, 1.0)
        omega = rng.uniform(-5.0, 5.0)
        lam = rng.uniform(0.01, 5.0)
        direct = abs(eval_char_fn(problem.plant, problem.kind, complex(sigma, omega), lam))
        assert problem.cartesian_residual(sigma, omega, lam) == pytest.approx(
            direct, abs=1e-10, rel=1e-10
        )


def test_conjugate_symmetry_detection():
    assert first_order_plant().conjugate_symmetric
    sym = Plant(zeros=(1j, -1j), poles=(-1.0, -2.0), gain=2.0, delay=1.0)
    assert sym.conjugate_symmetric
    asym = Plant(zeros=(), poles=(complex(-1.0, 0.5),), gain=1.0, delay=1.0)
    assert not asym.conjugate_symmetric


def test_plant_validation():
    with pytest.raises(ValidationError):
        Plant(zeros=(0.0, 0.0), poles=(-1.0,), gain=1.0, delay=1.0)  # improper
    with pytest.raises(ValidationError):
        Plant(zeros=(), poles=(-1.0,), gain=0.0, delay=1.0)  # zero gain
    with pytest.raises(ValidationError):
        Plant(zeros=(), poles=(-1.0,), gain=1.0, delay=0.0)  # no dead time
    with pytest.raises(ValidationError):
        Plant(zeros=(-1.0,) * 31, poles=(-2.0,) * 31, gain=1.0, delay=1.0)  # size cap


def test_problem_validation_region():
    plant = first_order_plant()
    with pytest.raises(ValidationError):
        LocusProblem(LocusKind.GAIN, 0.5, 1.0, plant)  # sigma0 must be negative
    with pytest.raises(ValidationError):
        LocusProblem(LocusKind.GAIN, -0.5, -1.0, plant)  # lambda_max must be positive
    with pytest.raises(ValidationError, match="boundary"):
        LocusProblem(LocusKind.GAIN, -1.0, 1.0, plant)  # pole on Re(s) = sigma0


def test_problem_validation_biproper_bounds():
    biproper = Plant(zeros=(-2.0,), poles=(-1.0,), gain=3.0, delay=1.0)
    # gain kind: lambda_max < e^{h*sigma0}/|G(inf)| = e^{-0.5}/3
    bound = math.exp(-0.5) / 3.0
    LocusProblem(LocusKind.GAIN, -0.5, 0.9 * bound, biproper)
    with pytest.raises(ValidationError, match="neutral"):
        LocusProblem(LocusKind.GAIN, -0.5, 1.1 * bound, biproper)
    # delay kind: lambda_max < ln|G(inf)|/|sigma0| = ln(3)/0.5
    bound_d = math.log(3.0) / 0.5
    LocusProblem(LocusKind.DELAY, -0.5, 0.9 * bound_d, biproper)
    with pytest.raises(ValidationError):
        LocusProblem(LocusKind.DELAY, -0.5, 1.1 * bound_d, biproper)


def test_effective_h():
    plant = first_order_plant(delay=2.0)
    gain_problem = LocusProblem(LocusKind.GAIN, -0.5, 1.0, plant)
    delay_problem = LocusProblem(LocusKind.DELAY, -0.5, 1.0, plant)
    assert gain_problem.effective_h(0.3) == 2.0
    assert delay_problem.effective_h(0.3) == 0.3
