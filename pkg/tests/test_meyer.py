import numpy as np
import pytest

from shiftmean.errors import ParameterError
from shiftmean.fourier import FourierCoeffs, from_fourier, to_fourier
from shiftmean.meyer import (
    WaveletBasisSpec,
    WaveletCoeffs,
    analyze,
    basis_matrix,
    clamp_levels,
    max_level,
    meyer_aux,
    omega,
    omega_scaling,
    phi_fourier,
    psi_fourier,
    required_max_freq,
    synthesize,
)
from shiftmean.signals import SIGNAL_NAMES, test_signal as make_signal


def fine_grid_norm_sq(coef, idx, M=4096):
    x = np.arange(M) / M
    h = np.exp(2j * np.pi * np.outer(x, idx)) @ coef
    return float(np.mean(np.abs(h) ** 2))


def test_aux_polynomial():
    t = np.linspace(0, 1, 101)
    assert np.allclose(meyer_aux(t), t**4 * (35 - 84 * t + 70 * t**2 - 20 * t**3))
    assert np.allclose(meyer_aux(t) + meyer_aux(1 - t), 1)


class TestPsi:
    def test_bounded_sweep(self):
        count = 0
        for j in range(9):
            idx = omega(j).indices
            for k in range(0, 2**j, max(1, 2**j // 16)):
                vals = np.abs(psi_fourier(j, k, idx))
                assert np.all(vals <= 2 ** (-j / 2) + 1e-15)
                count += vals.size
        assert count >= 10_000

    def test_zero_off_support(self):
        ells = np.arange(-300, 301)
        outside = ells[~np.isin(ells, omega(5).indices)]
        assert np.all(psi_fourier(5, 3, outside) == 0)

    @pytest.mark.parametrize("j,k", [(0, 0), (3, 5), (6, 40)])
    def test_unit_norm(self, j, k):
        idx = omega(j).indices
        assert fine_grid_norm_sq(psi_fourier(j, k, idx), idx) == pytest.approx(1.0, abs=1e-10)

    def test_bad_k(self):
        with pytest.raises(ParameterError):
            psi_fourier(3, 8, 1)
        with pytest.raises(ParameterError):
            psi_fourier(3, -1, 1)


class TestPhi:
    def test_mean_at_level_zero(self):
        assert phi_fourier(0, 0, 0) == pytest.approx(1.0)

    def test_bounded(self):
        for j0 in range(6):
            vals = np.abs(phi_fourier(j0, np.arange(2**j0)[:, None], np.arange(-100, 101)[None, :]))
            assert np.all(vals <= 2 ** (-j0 / 2) + 1e-15)

    @pytest.mark.parametrize("j0,k", [(0, 0), (3, 2), (5, 17)])
    def test_unit_norm(self, j0, k):
        idx = omega_scaling(j0).indices
        assert fine_grid_norm_sq(phi_fourier(j0, k, idx), idx) == pytest.approx(1.0, abs=1e-10)


class TestOmega:
    def test_no_zero_frequency(self):
        assert all(0 not in omega(j) for j in range(12))

    def test_matches_scan(self):
        ells = np.arange(-200, 201)
        scanned = ells[np.abs(psi_fourier(3, 0, ells)) > 0]
        assert np.array_equal(scanned, omega(3).indices)

    def test_scaling_matches_scan(self):
        ells = np.arange(-200, 201)
        assert np.array_equal(ells[np.abs(phi_fourier(3, 0, ells)) > 0], omega_scaling(3).indices)

    def test_adjacent_overlap_and_gap(self):
        for j in range(1, 8):
            pos = lambda s: {v for v in s.indices if v > 0}  # noqa: E731
            assert pos(omega(j)) & pos(omega(j + 1))
            assert not pos(omega(j)) & pos(omega(j + 2))

    def test_cardinality(self):
        assert all(len(omega(j)) <= 4 * np.pi * 2**j for j in range(11))

    def test_grid_ceiling(self):
        assert max_level(512) == 7 and required_max_freq(WaveletBasisSpec(3, 7)) < 256
        assert required_max_freq(WaveletBasisSpec(3, 8)) >= 256

    def test_clamp_warns(self):
        with pytest.warns(UserWarning, match="clamping"):
            spec = clamp_levels(WaveletBasisSpec(3, 9), 512)
        assert spec.j1 == 7


class TestTransform:
    def test_zero(self):
        spec = WaveletBasisSpec(3, 6)
        w = analyze(FourierCoeffs(np.zeros(2 * 100 + 1)), spec)
        assert w.energy() == 0

    def test_basis_function_analysis(self):
        spec = WaveletBasisSpec(3, 6)
        L = required_max_freq(spec)
        theta = FourierCoeffs(phi_fourier(3, 0, np.arange(-L, L + 1)))
        w = analyze(theta, spec)
        assert w.coarse[0] == pytest.approx(1.0, abs=1e-12)
        rest = np.concatenate([w.coarse[1:], *w.details])
        assert np.max(np.abs(rest)) < 1e-10

    def test_gram_identity(self):
        _, rows = basis_matrix(WaveletBasisSpec(3, 6), 1024 // 2 - 1)
        gram = rows.conj() @ rows.T
        assert rows.shape[0] == 128
        assert np.max(np.abs(gram - np.eye(128))) < 1e-8

    @pytest.mark.parametrize("name", SIGNAL_NAMES)
    def test_parseval(self, name):
        N, spec = 1024, WaveletBasisSpec(3, 7)
        theta = to_fourier(make_signal(name, N))
        w = analyze(theta, spec)
        projected = from_fourier(synthesize(w, spec, theta.max_freq), N)
        norm_sq = np.mean(projected.samples**2)
        assert abs(w.energy() - norm_sq) / norm_sq < 1e-8

    def test_fft_matches_direct(self, rng):
        spec = WaveletBasisSpec(2, 6)
        f = from_fourier(to_fourier(make_signal("Bumps", 512)), 512)
        theta = to_fourier(f)
        a, b = analyze(theta, spec, "fft"), analyze(theta, spec, "direct")
        assert np.max(np.abs(a.coarse - b.coarse)) < 1e-10
        assert all(np.max(np.abs(x - y)) < 1e-10 for x, y in zip(a.details, b.details))

    def test_round_trip_on_span(self, rng):
        spec = WaveletBasisSpec(3, 6)
        w = WaveletCoeffs(3, rng.standard_normal(8), tuple(rng.standard_normal(2**j) for j in spec.levels))
        back = analyze(synthesize(w, spec), spec)
        assert abs(back.energy() - w.energy()) < 1e-10
        assert all(np.allclose(x, y, atol=1e-10) for x, y in zip(back.details, w.details))
        theta = synthesize(w, spec)
        assert np.allclose(synthesize(analyze(theta, spec), spec).coeffs, theta.coeffs, atol=1e-10)

    def test_single_detail_is_basis_row(self):
        spec = WaveletBasisSpec(3, 6)
        w = WaveletCoeffs.zeros(spec)
        details = [d.copy() for d in w.details]
        details[1][7] = 1.0
        theta = synthesize(w.replace_details(details), spec)
        assert np.allclose(theta.coeffs, psi_fourier(4, 7, theta.freqs), atol=1e-14)

    def test_zero_synthesis(self):
        spec = WaveletBasisSpec(3, 5)
        assert np.all(synthesize(WaveletCoeffs.zeros(spec), spec).coeffs == 0)

    def test_real_signals_give_real_coefficients(self):
        # coefficients are stored as floats; the discarded imaginary part must be negligible
        theta = to_fourier(make_signal("Blocks", 512))
        spec = WaveletBasisSpec(3, 7)
        L = theta.max_freq
        idx = omega(5).indices
        beta = np.conj(psi_fourier(5, np.arange(32)[:, None], idx[None, :])) @ theta.coeffs[idx + L]
        assert np.max(np.abs(beta.imag)) < 1e-12
        assert np.allclose(beta.real, analyze(theta, spec).level(5), atol=1e-12)

    def test_missing_band_named(self):
        with pytest.raises(ParameterError, match="missing"):
            analyze(FourierCoeffs(np.zeros(101)), WaveletBasisSpec(3, 7))

    def test_length_validation(self):
        with pytest.raises(ParameterError):
            WaveletCoeffs(3, np.zeros(7), ())

    def test_decay_on_wave(self):
        theta = to_fourier(make_signal("Wave", 1024))
        w = analyze(theta, WaveletBasisSpec(3, 7))
        peaks = [np.max(np.abs(d)) for d in w.details]
        print("max |beta_j| on Wave:", peaks)
        assert all(b <= a + 1e-12 for a, b in zip(peaks, peaks[1:]))
