import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from diolab.kernels import (KernelParams, build_coefficient_table, coeff_magnitudes,
                            indicator_bump, kernel_fourier_coeff, kernel_reconstruct,
                            kernel_value, kernel_value_grid, trapezoid_bump,
                            verify_coefficient_bounds)

KP = KernelParams(q=5, gamma=F(1, 3), eps=F(1, 2), psi_q=F(1, 10))


def test_params_validation():
    with pytest.raises(ValueError):
        KernelParams(q=3, gamma=F(0), eps=F(1, 2), psi_q=F(1, 10))
    with pytest.raises(ValueError):
        KernelParams(q=5, gamma=F(0), eps=F(3, 2), psi_q=F(1, 10))
    with pytest.raises(ValueError):
        KernelParams(q=5, gamma=F(0), eps=F(1, 2), psi_q=F(0))
    with pytest.raises(ValueError):
        KernelParams(q=5, gamma=F(2), eps=F(1, 2), psi_q=F(1, 10))


def test_bump_cases_exact():
    d, e = KP.delta, KP.eps
    assert trapezoid_bump(d, d, e, 1) == 1
    assert trapezoid_bump(d / 2, d, e, 1) == 1
    assert trapezoid_bump((1 + e) * d, d, e, 1) == 0
    assert trapezoid_bump(2 * d, d, e, -1) == 0
    assert trapezoid_bump((1 - e) * d, d, e, -1) == 1
    # middle branch, exact rational value: 1 + (d - ||x||)/(d e)
    x = (1 + e / 2) * d
    assert trapezoid_bump(x, d, e, 1) == 1 + (d - x) / (d * e)
    # period 1
    assert trapezoid_bump(x + 3, d, e, 1) == trapezoid_bump(x, d, e, 1)


def test_bump_continuity_at_breakpoints():
    d, e = 0.02, 0.5
    for x0 in (d, (1 + e) * d, (1 - e) * d):
        left = trapezoid_bump(x0 - 1e-12, d, e, 1)
        right = trapezoid_bump(x0 + 1e-12, d, e, 1)
        assert abs(left - right) < 1e-9
        left = trapezoid_bump(x0 - 1e-12, d, e, -1)
        right = trapezoid_bump(x0 + 1e-12, d, e, -1)
        assert abs(left - right) < 1e-9


def test_bump_sandwich_pointwise():
    d, e = F(1, 50), F(2, 3)
    for i in range(200):
        x = F(i, 199)
        lo = trapezoid_bump(x, d, e, -1)
        mid = indicator_bump(x, d)
        hi = trapezoid_bump(x, d, e, 1)
        assert lo <= mid <= hi


def test_kernel_center_value():
    x = (F(2) + KP.gamma) / KP.q
    assert kernel_value(x, KP, 1) >= 1
    assert kernel_value_grid([float(x)], KP, 1)[0] >= 1 - 1e-12


def test_kernel_grid_matches_scalar():
    xs = [F(i, 97) for i in range(97)]
    grid = kernel_value_grid([float(x) for x in xs], KP, 1)
    for x, g in zip(xs, grid):
        assert abs(float(kernel_value(x, KP, 1)) - g) < 1e-9


def test_kernel_sandwich_on_indicator_sum():
    # W- <= sum of sharp arc indicators <= W+ for every x
    rng = random.Random(12)
    for _ in range(200):
        x = F(rng.getrandbits(40), 1 << 40)
        sharp = sum(indicator_bump(x - (F(p) + KP.gamma) / KP.q, KP.delta)
                    for p in range(KP.q))
        assert kernel_value(x, KP, -1) <= sharp <= kernel_value(x, KP, 1)


def test_fourier_coeff_zero_mode():
    assert kernel_fourier_coeff(KP, 0, 1) == pytest.approx((2 + 0.5) * 0.1)
    assert kernel_fourier_coeff(KP, 0, -1) == pytest.approx((2 - 0.5) * 0.1)


def test_fourier_coeff_vanishes_off_multiples():
    for k in (1, 2, 3, 4, 6, 7, 101, -3):
        assert kernel_fourier_coeff(KP, k, 1) == 0j
    assert kernel_fourier_coeff(KP, 7, 1) == 0j  # q = 5 does not divide 7


def test_fourier_coeff_conjugate_symmetry():
    for s in (1, 2, 3, 10):
        c = kernel_fourier_coeff(KP, s * KP.q, 1)
        assert kernel_fourier_coeff(KP, -s * KP.q, 1) == pytest.approx(c.conjugate())


def test_fourier_coeff_matches_quadrature():
    # midpoint rule on the piecewise-linear kernel, modest q so panel
    # straddling stays below the tolerance
    params = KernelParams(q=4, gamma=F(2, 7), eps=F(2, 3), psi_q=F(1, 5))
    panels = 1 << 20
    xs = (np.arange(panels) + 0.5) / panels
    for sign in (1, -1):
        vals = kernel_value_grid(xs, params, sign)
        assert vals.mean() == pytest.approx(float((2 + sign * params.eps) * params.psi_q), abs=1e-8)
        for s in (1, 2):
            target = kernel_fourier_coeff(params, s * params.q, sign)
            est = (vals * np.exp(-2j * math.pi * s * params.q * xs)).mean()
            assert abs(est - target) < 1e-8


def test_coefficient_table():
    table = build_coefficient_table(KP, 25, 1)
    assert set(table.entries) == {-25, -20, -15, -10, -5, 0, 5, 10, 15, 20, 25}
    assert table.coeff(7) == 0j
    assert table.coeff(-10) == table.coeff(10).conjugate()
    with pytest.raises(KeyError):
        table.coeff(30)


def test_coeff_magnitude_bounds_hold():
    s = np.arange(1, 2000)
    for sign in (1, -1):
        mags = coeff_magnitudes(KP, s, sign)
        assert mags.max() <= float((2 + KP.eps) * KP.psi_q) + 1e-15
        assert (mags * s * s).max() <= 1 / (math.pi**2 * 0.1 * 0.5) + 1e-12


def test_reconstruction_within_tail_bound():
    xs = np.linspace(0, 1, 1000, endpoint=False) + 1e-4
    for sign in (1, -1):
        direct = kernel_value_grid(xs, KP, sign)
        for mult in (16, 32, 64):
            rec, tail = kernel_reconstruct(KP, mult * KP.q, xs, sign)
            assert np.abs(rec - direct).max() <= tail
    rec_scalar, tail = kernel_reconstruct(KP, 80, 0.25, 1)
    assert np.isscalar(rec_scalar) or rec_scalar.shape == ()


def test_reconstruction_error_shrinks():
    xs = np.linspace(0, 1, 500, endpoint=False)
    direct = kernel_value_grid(xs, KP, 1)
    errs = []
    for mult in (8, 16, 32, 64):
        rec, _ = kernel_reconstruct(KP, mult * KP.q, xs, 1)
        errs.append(np.abs(rec - direct).max())
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_verify_bounds_report():
    second = KernelParams(q=9, gamma=F(1, 7), eps=F(5, 9), psi_q=F(4, 19))
    report = verify_coefficient_bounds(KP, second)
    assert report.passed
    names = {c.name for c in report.checks}
    assert "double_abs_sum" in names
    assert any(n.startswith("abs_sum") for n in names)
    rows = report.rows()
    assert all(set(r) == {"name", "measured", "bound", "margin", "passed"} for r in rows)
