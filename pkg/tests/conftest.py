"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own fast paths: the
spectrum oracle is a direct O(N^2) sum, and the derivative-kernel oracle is
a finite-difference stencil.  Library results are checked against these,
never against themselves.
"""

import numpy as np
import pytest

from afdkit import CircleSignal, Ensemble, multiple_kernel


def direct_dft(samples: np.ndarray) -> np.ndarray:
    """O(N^2) Fourier coefficients, index order k = -N/2 .. N/2-1."""
    samples = np.asarray(samples, dtype=np.complex128)
    n = samples.size
    ks = np.arange(-n // 2, n // 2)
    t = 2.0 * np.pi * np.arange(n) / n
    return np.exp(-1j * np.outer(ks, t)) @ samples / n


def fd_multiple_kernel(a: complex, order: int, n: int, h: float = 1e-4) -> np.ndarray:
    """Finite-difference oracle for the order-(order) derivative kernel.

    Differentiates the order-(order-1) kernel once in conj(a) with a
    4th-order central stencil.  Moving a by a real step moves conj(a) by the
    same real step, which is all an analytic function of conj(a) needs.
    """
    km = {s: multiple_kernel(a + s * h, order - 1, n).samples for s in (-2, -1, 1, 2)}
    return (-km[2] + 8.0 * km[1] - 8.0 * km[-1] + km[-2]) / (12.0 * h)


def random_analytic(rng: np.random.Generator, n: int, degree: int | None = None,
                    decay: float = 0.85) -> CircleSignal:
    """Random analytic signal with geometrically decaying coefficients."""
    half = n // 2
    degree = half if degree is None else min(degree, half)
    coeffs = np.zeros(half, dtype=np.complex128)
    coeffs[:degree] = (rng.normal(size=degree) + 1j * rng.normal(size=degree))
    coeffs[:degree] *= decay ** np.arange(degree)
    spec = np.zeros(n, dtype=np.complex128)
    spec[half:] = coeffs
    return CircleSignal(np.fft.ifft(np.fft.ifftshift(spec)) * n)


def analytic_ensemble(e: Ensemble) -> Ensemble:
    """Per-realization analytic projection (keeps c_0 whole)."""
    n = e.n
    half = n // 2
    spec = np.fft.fftshift(np.fft.fft(e.samples, axis=1), axes=1) / n
    spec[:, :half] = 0.0
    rows = np.fft.ifft(np.fft.ifftshift(spec, axes=1), axis=1) * n
    return Ensemble(rows, e.weights, e.label)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240817))
