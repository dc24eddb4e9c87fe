"""Grid signals, spectra, and the circular Hilbert transform."""

import numpy as np
import pytest

from afdkit import (
    CircleSignal,
    Spectrum,
    analytic_leakage,
    analytic_projection,
    eval_analytic,
    from_spectrum,
    hilbert_transform,
    inner_product,
    norm,
    real_from_analytic,
    sample_points,
    to_spectrum,
)
from conftest import direct_dft

N = 256
T = sample_points(N)


def real_draw(rng):
    """Random real samples with the unpaired Nyquist bin removed.

    Real signals in this band model carry no k = -N/2 component; a raw
    normal draw does, so project it out before testing real-to-real maps.
    """
    samples = rng.normal(size=N)
    alt = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    return CircleSignal(samples - (samples @ alt) / N * alt)


def test_signal_validation():
    with pytest.raises(ValueError):
        CircleSignal(np.zeros(5))
    with pytest.raises(ValueError):
        CircleSignal(np.zeros(2))
    with pytest.raises(ValueError):
        CircleSignal([1.0, np.nan, 0.0, 0.0])
    sig = CircleSignal(np.ones(4))
    with pytest.raises(ValueError):
        sig.samples[0] = 2.0


def test_sample_points_layout():
    assert T[0] == 0.0
    assert np.allclose(np.diff(T), 2.0 * np.pi / N)


def test_spectrum_matches_direct_dft(rng):
    for _ in range(5):
        f = CircleSignal(rng.normal(size=N) + 1j * rng.normal(size=N))
        spec = to_spectrum(f)
        oracle = direct_dft(f.samples)
        assert np.max(np.abs(spec.coeffs - oracle)) <= 1e-12 * (1.0 + norm(f))


def test_spectrum_single_mode():
    spec = to_spectrum(CircleSignal(np.exp(1j * T)))
    assert abs(spec[1] - 1.0) <= 1e-12
    live = np.abs(spec.coeffs) > 1e-12
    assert live.sum() == 1


def test_spectrum_constant():
    spec = to_spectrum(CircleSignal(np.ones(N)))
    assert abs(spec[0] - 1.0) <= 1e-12
    assert np.abs(spec.coeffs).sum() <= 1.0 + 1e-12


def test_spectrum_cosine_pair():
    spec = to_spectrum(CircleSignal(np.cos(3 * T)))
    assert abs(spec[3] - 0.5) <= 1e-12
    assert abs(spec[-3] - 0.5) <= 1e-12
    assert spec.energy() == pytest.approx(0.5, abs=1e-12)


def test_roundtrip_large_amplitudes(rng):
    for _ in range(5):
        f = CircleSignal(1e3 * (rng.normal(size=N) + 1j * rng.normal(size=N)))
        back = from_spectrum(to_spectrum(f))
        assert np.max(np.abs(back.samples - f.samples)) <= 1e-12 * 1e3


def test_parseval(rng):
    for _ in range(5):
        f = CircleSignal(rng.normal(size=N) + 1j * rng.normal(size=N))
        total = to_spectrum(f).energy()
        assert abs(inner_product(f, f).real - total) <= 1e-12 * (1.0 + f.energy())


def test_inner_product_values():
    e1 = CircleSignal(np.exp(1j * T))
    e2 = CircleSignal(np.exp(2j * T))
    assert inner_product(e1, e1) == pytest.approx(1.0, abs=1e-12)
    assert abs(inner_product(e1, e2)) <= 1e-12
    f = CircleSignal(2.0 * np.exp(1j * T) + 3.0)
    assert inner_product(f, CircleSignal(np.ones(N))) == pytest.approx(3.0, abs=1e-12)


def test_inner_product_conjugate_linearity(rng):
    f = CircleSignal(rng.normal(size=N) + 1j * rng.normal(size=N))
    g = CircleSignal(rng.normal(size=N) + 1j * rng.normal(size=N))
    w = 0.7 - 0.3j
    lhs = inner_product(f, g * w)
    assert abs(lhs - np.conj(w) * inner_product(f, g)) <= 1e-12 * (1.0 + abs(lhs))


def test_inner_product_size_mismatch():
    with pytest.raises(ValueError):
        inner_product(CircleSignal(np.ones(4)), CircleSignal(np.ones(8)))


def test_hilbert_cosine_to_sine():
    h = hilbert_transform(CircleSignal(np.cos(T)))
    assert np.max(np.abs(h.samples - np.sin(T))) <= 1e-12


def test_hilbert_annihilates_constants():
    h = hilbert_transform(CircleSignal(np.full(N, 7.0)))
    assert np.max(np.abs(h.samples)) <= 1e-12


def test_hilbert_sine_to_negative_cosine():
    h = hilbert_transform(CircleSignal(np.sin(3 * T)))
    assert np.max(np.abs(h.samples + np.cos(3 * T))) <= 1e-12


def test_hilbert_involution(rng):
    for _ in range(5):
        f = CircleSignal(rng.normal(size=N))
        c0 = to_spectrum(f)[0]
        twice = hilbert_transform(hilbert_transform(f))
        assert np.max(np.abs(twice.samples + (f.samples - c0))) <= 1e-12 * (1.0 + norm(f))


def test_hilbert_preserves_realness(rng):
    f = real_draw(rng)
    h = hilbert_transform(f)
    assert np.max(np.abs(h.samples.imag)) <= 1e-12


def test_projection_keeps_positive_half():
    plus = analytic_projection(CircleSignal(np.cos(T)))
    assert np.max(np.abs(plus.samples - 0.5 * np.exp(1j * T))) <= 1e-12
    assert np.max(np.abs(analytic_projection(CircleSignal(np.ones(N))).samples - 1.0)) <= 1e-12
    plus2 = analytic_projection(CircleSignal(np.sin(2 * T)))
    assert np.max(np.abs(plus2.samples - (-0.5j) * np.exp(2j * T))) <= 1e-12


def test_projection_agrees_with_transform_formula(rng):
    f = CircleSignal(rng.normal(size=N))
    c0 = to_spectrum(f)[0]
    h = hilbert_transform(f)
    direct = 0.5 * (f.samples + 1j * h.samples + c0)
    assert np.max(np.abs(analytic_projection(f).samples - direct)) <= 1e-12


def test_projection_idempotent(rng):
    f = CircleSignal(rng.normal(size=N) + 1j * rng.normal(size=N))
    once = analytic_projection(f)
    twice = analytic_projection(once)
    assert np.max(np.abs(twice.samples - once.samples)) <= 1e-12 * (1.0 + norm(f))
    assert analytic_leakage(once) <= 1e-12


def test_real_reconstruction(rng):
    f = real_draw(rng)
    c0 = to_spectrum(f)[0].real
    plus = analytic_projection(f)
    back = real_from_analytic(plus, c0)
    assert np.max(np.abs(back.samples - f.samples)) <= 1e-12


def test_eval_analytic_values():
    z = to_spectrum(CircleSignal(np.exp(1j * T)))
    assert eval_analytic(z, 0.5) == pytest.approx(0.5, abs=1e-12)
    one = to_spectrum(CircleSignal(np.ones(N)))
    assert eval_analytic(one, 0.3 - 0.4j) == pytest.approx(1.0, abs=1e-12)
    zsq = to_spectrum(CircleSignal(np.exp(2j * T)))
    assert eval_analytic(zsq, 0.5 + 0.5j) == pytest.approx(0.5j, abs=1e-12)


def test_eval_analytic_rejects_exterior():
    spec = to_spectrum(CircleSignal(np.ones(N)))
    with pytest.raises(ValueError):
        eval_analytic(spec, 1.0)
    with pytest.raises(ValueError):
        eval_analytic(spec, 1.2j)


def test_spectrum_indexing_and_bands(rng):
    f = CircleSignal(rng.normal(size=N) + 1j * rng.normal(size=N))
    spec = to_spectrum(f)
    assert spec[-N // 2] == spec.coeffs[0]
    assert spec[N // 2 - 1] == spec.coeffs[-1]
    with pytest.raises(KeyError):
        spec[N // 2]
    acoeffs = spec.analytic_coeffs()
    assert acoeffs.shape == (N // 2,)
    assert spec.negative_energy() == pytest.approx(
        spec.energy() - float(np.sum(np.abs(acoeffs) ** 2)), abs=1e-12
    )


def test_signal_arithmetic(rng):
    f = CircleSignal(rng.normal(size=N))
    g = CircleSignal(rng.normal(size=N))
    assert np.allclose((f + g).samples, f.samples + g.samples)
    assert np.allclose((f - g).samples, f.samples - g.samples)
    assert np.allclose((f * 2.5).samples, 2.5 * f.samples)
    assert f.energy() == pytest.approx(norm(f) ** 2, rel=1e-12)
