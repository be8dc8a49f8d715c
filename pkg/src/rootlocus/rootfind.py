"""Scalar and polynomial root-finding utilities.

Polynomials are stored as ascending-degree real coefficient arrays.  The
boundary-extremum polynomials are assembled by explicit convolution with
rescaling after each product, then solved through companion-matrix
eigenvalues with a short Newton polish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, DegenerateError
from .plant import Plant

_TRIM_REL = 1e-14
_REAL_IM_TOL = 1e-7
_DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class RealPolynomial:
    """Real polynomial, ascending-degree coefficients, trailing noise trimmed."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.size == 0:
            raise DegenerateError("empty coefficient list")
        top = np.max(np.abs(c))
        if top == 0.0:
            object.__setattr__(self, "coefficients", (0.0,))
            return
        keep = c.size
        while keep > 1 and abs(c[keep - 1]) < _TRIM_REL * top:
            keep -= 1
        object.__setattr__(self, "coefficients", tuple(float(v) for v in c[:keep]))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients == (0.0,)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coefficients))

    def derivative(self) -> "RealPolynomial":
        d = np.polynomial.polynomial.polyder(np.asarray(self.coefficients))
        return RealPolynomial(tuple(d) if d.size else (0.0,))


@dataclass(frozen=True)
class Bracket:
    """Sign-changing bracket [lo, hi] for a continuous scalar function."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo == 0.0 or self.f_hi == 0.0:
            return
        if math.copysign(1.0, self.f_lo) == math.copysign(1.0, self.f_hi):
            raise BracketError(
                f"no sign change on [{self.lo}, {self.hi}]: f={self.f_lo:g}, {self.f_hi:g}"
            )


def bracketed_root(f, bracket: Bracket, tol: float) -> float:
    """Brent's method on a valid bracket; endpoint roots are returned directly."""
    if bracket.f_lo == 0.0:
        return bracket.lo
    if bracket.f_hi == 0.0:
        return bracket.hi
    return float(brentq(f, bracket.lo, bracket.hi, xtol=tol, maxiter=200))


def _newton_polish_real(coeffs: np.ndarray, dcoeffs: np.ndarray, x: float, steps: int = 5) -> float:
    for _ in range(steps):
        fx = np.polynomial.polynomial.polyval(x, coeffs)
        dfx = np.polynomial.polynomial.polyval(x, dcoeffs)
        if dfx == 0.0:
            break
        step = fx / dfx
        if not np.isfinite(step):
            break
        x -= step
        if abs(step) < 1e-15 * (1.0 + abs(x)):
            break
    return x


def real_nonneg_roots(p: RealPolynomial) -> list[float]:
    """All real roots >= 0, ascending, deduplicated.

    Companion eigenvalues of the normalized polynomial, keeping eigenvalues
    with small imaginary part and polishing each with a few Newton steps.
    """
    if p.is_zero:
        raise DegenerateError("polynomial is identically zero")
    c = np.asarray(p.coefficients)
    if p.degree == 0:
        return []
    raw = np.polynomial.polynomial.polyroots(c)
    dc = np.polynomial.polynomial.polyder(c)
    out: list[float] = []
    for r in raw:
        if abs(r.imag) >= _REAL_IM_TOL * (1.0 + abs(r.real)):
            continue
        x = _newton_polish_real(c, dc, float(r.real))
        if x < -_DEDUP_TOL:
            continue
        out.append(x if x > 0.0 else 0.0)
    out.sort()
    dedup: list[float] = []
    for x in out:
        if not dedup or x - dedup[-1] > _DEDUP_TOL:
            dedup.append(x)
    return dedup


def _gamma_quadratics(values, sigma0: float, scale: float = 1.0) -> list[np.ndarray]:
    """gamma(w) = ((sigma0 - re)^2 + (w - im)^2) / scale as ascending quadratics."""
    out = []
    for v in values:
        ds = sigma0 - v.real
        out.append(np.array([ds * ds + v.imag * v.imag, -2.0 * v.imag, 1.0]) / scale)
    return out


def _common_scale(values, sigma0: float) -> float:
    """Geometric-mean magnitude of the gamma quadratics, keeping products of a
    fixed factor count uniformly scaled so they can be added exactly."""
    tops = [
        max((sigma0 - v.real) ** 2 + v.imag * v.imag, 1.0) for v in values
    ]
    if not tops:
        return 1.0
    return float(np.exp(np.mean(np.log(tops))))


def _product_and_leave_one_out(factors: list[np.ndarray]) -> tuple[np.ndarray, list[np.ndarray]]:
    n = len(factors)
    total = np.array([1.0])
    for f in factors:
        total = np.convolve(total, f)
    loo = []
    for i in range(n):
        acc = np.array([1.0])
        for j, f in enumerate(factors):
            if j != i:
                acc = np.convolve(acc, f)
        loo.append(acc)
    return total, loo


def _poly_add(*terms: np.ndarray) -> np.ndarray:
    size = max(t.size for t in terms)
    acc = np.zeros(size)
    for t in terms:
        acc[: t.size] += t
    return acc


def magnitude_extremum_freqs(plant: Plant, sigma0: float) -> list[float]:
    """Non-negative zeros of the boundary log-magnitude derivative.

    Assembles the numerator polynomial of big_lambda_prime in omega and
    returns its non-negative real roots.
    """
    scale = _common_scale(plant.zeros + plant.poles, sigma0)
    gz = _gamma_quadratics(plant.zeros, sigma0, scale)
    gp = _gamma_quadratics(plant.poles, sigma0, scale)
    big_z, loo_z = _product_and_leave_one_out(gz)
    big_p, loo_p = _product_and_leave_one_out(gp)

    pole_sum = np.array([0.0])
    for p, loo in zip(plant.poles, loo_p):
        term = np.convolve(np.array([-p.imag, 1.0]), loo)
        pole_sum = _poly_add(pole_sum, term)
    zero_sum = np.array([0.0])
    for z, loo in zip(plant.zeros, loo_z):
        term = np.convolve(np.array([-z.imag, 1.0]), loo)
        zero_sum = _poly_add(zero_sum, term)

    poly = _poly_add(np.convolve(big_z, pole_sum), -np.convolve(big_p, zero_sum))
    rp = RealPolynomial(tuple(poly))
    if rp.is_zero:
        return []
    return real_nonneg_roots(rp)


def phase_extremum_freqs(plant: Plant, sigma0: float, h: float) -> list[float]:
    """Non-negative zeros of the boundary phase derivative phi'."""
    scale = _common_scale(plant.zeros + plant.poles, sigma0)
    gz = _gamma_quadratics(plant.zeros, sigma0, scale)
    gp = _gamma_quadratics(plant.poles, sigma0, scale)
    big_z, loo_z = _product_and_leave_one_out(gz)
    big_p, loo_p = _product_and_leave_one_out(gp)

    zero_sum = np.array([0.0])
    for z, loo in zip(plant.zeros, loo_z):
        zero_sum = _poly_add(zero_sum, (sigma0 - z.real) * loo)
    pole_sum = np.array([0.0])
    for p, loo in zip(plant.poles, loo_p):
        pole_sum = _poly_add(pole_sum, (sigma0 - p.real) * loo)

    # the h term carries one more gamma factor than the sums; multiplying by
    # the common scale keeps every term at the same power of the scale
    poly = _poly_add(
        np.convolve(big_p, zero_sum),
        -np.convolve(big_z, pole_sum),
        -h * scale * np.convolve(big_z, big_p),
    )
    rp = RealPolynomial(tuple(poly))
    if rp.is_zero:
        return []
    return real_nonneg_roots(rp)


def _poly_from_roots(roots) -> np.ndarray:
    acc = np.array([1.0 + 0.0j])
    for r in roots:
        acc = np.convolve(acc, np.array([1.0, -r]))
    return acc  # descending coefficients


def _polish_complex(coeffs_desc: np.ndarray, roots: np.ndarray, steps: int = 5) -> np.ndarray:
    d = np.polyder(coeffs_desc)
    out = []
    for r in roots:
        x = complex(r)
        for _ in range(steps):
            dfx = np.polyval(d, x)
            if dfx == 0:
                break
            step = np.polyval(coeffs_desc, x) / dfx
            if not np.isfinite(abs(step)):
                break
            x -= step
            if abs(step) < 1e-15 * (1.0 + abs(x)):
                break
        out.append(x)
    return np.asarray(out)


def rational_zeros(plant: Plant, target: str, h: float = 0.0) -> list[complex]:
    """Zeros of a structured rational function built from the plant.

    target "gprime_minus_hg": zeros of G'(s)/G(s) - h (branch-point candidates).
    target "one_plus_g": zeros of 1 + G(s) (delay-locus starting points).
    """
    num_z = _poly_from_roots(plant.zeros)  # monic numerator/gain excluded
    den_p = _poly_from_roots(plant.poles)
    if target == "one_plus_g":
        num = np.polyadd(den_p, plant.gain * num_z)
    elif target == "gprime_minus_hg":
        acc = np.array([0.0 + 0.0j])
        for r in range(len(plant.zeros)):
            loo = _poly_from_roots([z for i, z in enumerate(plant.zeros) if i != r])
            acc = np.polyadd(acc, np.convolve(loo, den_p))
        for i in range(len(plant.poles)):
            loo = _poly_from_roots([p for j, p in enumerate(plant.poles) if j != i])
            acc = np.polysub(acc, np.convolve(loo, num_z))
        num = np.polysub(acc, h * np.convolve(num_z, den_p))
    else:
        raise ValueError(f"unknown rational-zeros target {target!r}")

    top = np.max(np.abs(num)) if num.size else 0.0
    if top == 0.0:
        raise DegenerateError("assembled numerator polynomial is identically zero")
    num = num / top
    num = np.trim_zeros(num, "f")
    if num.size <= 1:
        return []
    roots = np.roots(num)
    roots = _polish_complex(num, roots)
    return sorted((complex(r) for r in roots), key=lambda c: (c.real, c.imag))
