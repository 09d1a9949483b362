import math
import warnings

import numpy as np
import pytest

from shiftmean.baselines import cyclic_shift_rows, direct_mean
from shiftmean.densities import Dirac, Laplace, TruncatedCosine, UniformCentered
from shiftmean.errors import DomainError, ParameterError
from shiftmean.estimators import estimate_fn2, spectral_cutoff
from shiftmean.fourier import CurveCoeffsMatrix, FourierCoeffs, curves_to_coeffs, from_fourier, sample_mean_coeffs, to_fourier
from shiftmean.registration import (
    DescentConfig,
    criterion_mn,
    estimate_shifts,
    frechet_mean,
    gradient_mn,
    shift_error,
    van_trees_bound,
)
from shiftmean.signals import test_signal as make_signal


def random_curves(rng, n, L):
    c = rng.standard_normal((n, 2 * L + 1)) + 1j * rng.standard_normal((n, 2 * L + 1))
    return CurveCoeffsMatrix((c + np.conj(c[:, ::-1])) / 2)


def shifted_coeffs(theta: FourierCoeffs, taus):
    return CurveCoeffsMatrix(theta.coeffs * np.exp(-2j * np.pi * np.outer(taus, theta.freqs)))


def loop_criterion(curves, taus, ell0):
    n, L = curves.n, curves.max_freq
    total = 0.0
    for ell in range(-ell0, ell0 + 1):
        mean = sum(curves.rows[q, ell + L] * np.exp(2j * np.pi * ell * taus[q]) for q in range(n)) / n
        for m in range(n):
            total += abs(curves.rows[m, ell + L] * np.exp(2j * np.pi * ell * taus[m]) - mean) ** 2
    return total / n


class TestCriterion:
    def test_single_curve(self, rng):
        assert criterion_mn(random_curves(rng, 1, 6), [0.3], 3) == 0

    def test_zero_at_truth(self, rng):
        theta = to_fourier(make_signal("HeaviSine", 64))
        taus = rng.uniform(-0.2, 0.2, 8)
        assert criterion_mn(shifted_coeffs(theta, taus), taus, 3) < 1e-20

    def test_loop_oracle(self, rng):
        for _ in range(5):
            curves = random_curves(rng, 5, 7)
            taus = rng.uniform(-0.5, 0.5, 5)
            assert criterion_mn(curves, taus, 3) == pytest.approx(loop_criterion(curves, taus, 3), abs=1e-12)

    def test_dimension_checks(self, rng):
        curves = random_curves(rng, 4, 5)
        with pytest.raises(ParameterError):
            criterion_mn(curves, np.zeros(3), 3)
        with pytest.raises(ParameterError):
            criterion_mn(curves, np.zeros(4), 6)

    def test_global_shift_invariance(self, rng):
        curves = random_curves(rng, 6, 5)
        taus = rng.uniform(-0.5, 0.5, 6)
        c = rng.uniform(-1, 1)
        assert criterion_mn(curves, taus + c, 4) == pytest.approx(criterion_mn(curves, taus, 4), abs=1e-12)


class TestGradient:
    def test_stationary_at_minimum(self, rng):
        theta = to_fourier(make_signal("Bumps", 64))
        taus = rng.uniform(-0.2, 0.2, 10)
        assert np.linalg.norm(gradient_mn(shifted_coeffs(theta, taus), taus, 3)) < 1e-10

    def test_finite_differences(self, rng):
        h = 1e-6
        for _ in range(20):
            n = int(rng.integers(2, 11))
            ell0 = int(rng.integers(1, 6))
            curves = random_curves(rng, n, 6)
            taus = rng.uniform(-0.5, 0.5, n)
            g = gradient_mn(curves, taus, ell0)
            fd = np.array([
                (criterion_mn(curves, taus + h * e, ell0) - criterion_mn(curves, taus - h * e, ell0)) / (2 * h)
                for e in np.eye(n)
            ])
            assert np.max(np.abs(g - fd)) / np.max(np.abs(g)) < 1e-5

    def test_orthogonal_to_ones(self, rng):
        curves = random_curves(rng, 7, 5)
        g = gradient_mn(curves, rng.uniform(-0.5, 0.5, 7), 5)
        assert abs(g.sum()) < 1e-10


class TestDescent:
    def test_identical_curves(self):
        theta = to_fourier(make_signal("HeaviSine", 64))
        taus, trace = estimate_shifts(shifted_coeffs(theta, np.zeros(6)))
        assert np.all(taus == 0)
        assert trace.reason == "stationary start" and trace.iterations == 0

    def test_trace_monotone_and_zero_sum(self, rng):
        N = 256
        g = Laplace(0.1)
        Y = cyclic_shift_rows(np.tile(make_signal("HeaviSine", N).samples, (30, 1)), g.sample(rng, 30))
        Y = Y + 0.2 * rng.standard_normal(Y.shape)
        taus, trace = estimate_shifts(curves_to_coeffs(Y), DescentConfig(ell0=3))
        assert all(b <= a for a, b in zip(trace.values, trace.values[1:]))
        assert trace.values[-1] <= trace.values[0]
        assert abs(taus.sum()) < 1e-12
        assert trace.reason in ("converged", "max_iters")
        assert len(list(trace.rows())) == len(trace.values)

    def test_small_spread_recovery(self):
        # shifts well inside the identifiable range are recovered exactly without noise
        theta = to_fourier(make_signal("HeaviSine", 256))
        rng = np.random.default_rng(4)
        truth = rng.uniform(-0.1, 0.1, 20)
        taus, _ = estimate_shifts(shifted_coeffs(theta, truth), DescentConfig(ell0=3))
        assert math.sqrt(shift_error(taus, truth)) < 1e-3

    def test_unidentifiable_warning(self):
        c = np.zeros((3, 9), dtype=complex)
        c[:, 4 + 2] = c[:, 4 - 2] = 1.0
        with pytest.warns(UserWarning, match="not identifiable"):
            estimate_shifts(CurveCoeffsMatrix(c))

    def test_config_validation(self):
        for kw in ({"ell0": 0}, {"kappa": 1.0}, {"rho": 0.0}, {"max_iters": 0}):
            with pytest.raises(ParameterError):
                DescentConfig(**kw)

    def test_needs_two_curves(self, rng):
        with pytest.raises(ParameterError):
            estimate_shifts(random_curves(rng, 1, 5))


class TestShiftError:
    def test_centering(self):
        truth = np.array([0.1, 0.2, 0.3])
        assert shift_error(truth - 0.2, truth) == pytest.approx(0.0, abs=1e-30)
        assert shift_error(truth - 0.2, truth, center=False) == pytest.approx(0.04)

    def test_wraps(self):
        assert shift_error([0.49], [-0.49], center=False) == pytest.approx(0.02**2)


class TestFrechetMean:
    def test_true_shifts_give_truncation(self, rng):
        N = 128
        theta = to_fourier(make_signal("Blocks", N))
        taus = rng.uniform(-0.2, 0.2, 9)
        out = frechet_mean(shifted_coeffs(theta, taus), taus, 3, N)
        expect = from_fourier(spectral_cutoff(theta, 3).theta_hat.truncate(3), N)
        assert np.max(np.abs(out.f_hat.samples - expect.samples)) < 1e-10

    def test_zero_shifts_is_cutoff_of_direct_mean(self, rng):
        N = 64
        Y = rng.standard_normal((5, N))
        curves = curves_to_coeffs(Y)
        out = frechet_mean(curves, np.zeros(5), 4, N)
        ref = spectral_cutoff(sample_mean_coeffs(curves), 4, N)
        assert np.allclose(out.f_hat.samples, ref.f_hat.samples, atol=1e-12)

    def test_between_direct_and_realigned(self):
        rng = np.random.default_rng(8)
        N, g = 512, Laplace(0.1)
        f = make_signal("HeaviSine", N)
        Y = cyclic_shift_rows(np.tile(f.samples, (200, 1)), g.sample(rng, 200)) + rng.standard_normal((200, N)) / 7
        curves = curves_to_coeffs(Y)
        taus, _ = estimate_shifts(curves, DescentConfig(ell0=3))
        err = lambda s: np.mean((s.samples - f.samples) ** 2)  # noqa: E731
        e_frechet = err(frechet_mean(curves, taus, 3, N).f_hat)
        e_direct = err(direct_mean(Y))
        e_fn2 = err(estimate_fn2(curves, taus, None, N=N).f_hat)
        assert e_fn2 < e_frechet < e_direct


class TestVanTrees:
    def test_zero_signal(self):
        theta = FourierCoeffs(np.zeros(11))
        assert van_trees_bound(theta, 0.3, Laplace(0.1)) == pytest.approx(1 / 200)

    def test_quoted_value(self):
        # one frequency pair carrying sum (2 pi l)^2 |theta_l|^2 = 800
        c = np.zeros(5, dtype=complex)
        c[3] = c[1] = math.sqrt(400) / (2 * math.pi)
        b = van_trees_bound(FourierCoeffs(c), 0.1, Laplace(0.1))
        assert b == pytest.approx(1.2469e-5, rel=1e-4)

    def test_decreasing_in_energy(self):
        theta = to_fourier(make_signal("Wave", 64))
        bounds = [van_trees_bound(FourierCoeffs(a * theta.coeffs), 0.1, TruncatedCosine(0.25)) for a in (0.5, 1, 2)]
        assert bounds[0] > bounds[1] > bounds[2]

    def test_truncation(self):
        theta = to_fourier(make_signal("Bumps", 64))
        assert van_trees_bound(theta, 0.1, Laplace(0.1), ell0=3) > van_trees_bound(theta, 0.1, Laplace(0.1))

    @pytest.mark.parametrize("density", [UniformCentered(0.25), Dirac()])
    def test_undefined_fisher(self, density):
        with pytest.raises(DomainError):
            van_trees_bound(FourierCoeffs(np.zeros(3)), 0.1, density)
