"""Signals on the uniform circle grid: spectra, quadrature, Hardy projections.

The discrete model samples the circle at t_j = 2*pi*j/N and identifies a
signal with the trigonometric polynomial of degree < N/2 through its samples.
The two-sided spectrum therefore lives on k in [-N/2, N/2), the circle inner
product (1/2pi) integral f conj(g) dt reduces to the exact quadrature
(1/N) sum_j f_j conj(g_j), and Parseval holds to rounding.

Analytic (Hardy-space) signals are the ones supported on k >= 0.  For a real
signal f with mean c_0, the analytic signal f+ = (f + i H f + c_0)/2 keeps
exactly the nonnegative frequencies and f = 2 Re f+ - c_0 recovers the input.
Real signals in this band model carry no unpaired Nyquist component: the
conjugate-pairing c_{-k} = conj(c_k) has no partner for k = -N/2, so the
model (and the noise synthesis built on it) keeps that bin empty.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "CircleSignal",
    "Spectrum",
    "sample_points",
    "to_spectrum",
    "from_spectrum",
    "inner_product",
    "norm",
    "hilbert_transform",
    "analytic_projection",
    "analytic_leakage",
    "eval_analytic",
    "real_from_analytic",
]


def _check_size(n: int) -> None:
    if n % 2 != 0 or n < 4:
        raise ValueError(f"signal length must be an even integer >= 4, got {n}")


def sample_points(n: int) -> np.ndarray:
    """Circle grid t_j = 2*pi*j/n, j = 0..n-1."""
    _check_size(n)
    return 2.0 * np.pi * np.arange(n) / n


class CircleSignal:
    """Complex samples on the uniform circle grid (immutable, even length >= 4)."""

    __slots__ = ("samples",)

    def __init__(self, samples) -> None:
        arr = np.array(samples, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError(f"samples must be a one-dimensional array, got shape {arr.shape}")
        _check_size(arr.size)
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        arr.flags.writeable = False
        self.samples = arr

    @property
    def n(self) -> int:
        return self.samples.size

    def norm(self) -> float:
        """Quadrature norm sqrt((1/n) sum |f_j|^2)."""
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    def energy(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def is_real(self, tol: float = 1e-12) -> bool:
        """True when the imaginary part is negligible relative to the real part."""
        scale = max(1.0, float(np.max(np.abs(self.samples.real))))
        return float(np.max(np.abs(self.samples.imag))) <= tol * scale

    def __add__(self, other: "CircleSignal") -> "CircleSignal":
        self._check_compatible(other)
        return CircleSignal(self.samples + other.samples)

    def __sub__(self, other: "CircleSignal") -> "CircleSignal":
        self._check_compatible(other)
        return CircleSignal(self.samples - other.samples)

    def __mul__(self, scalar) -> "CircleSignal":
        return CircleSignal(self.samples * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "CircleSignal":
        return CircleSignal(-self.samples)

    def _check_compatible(self, other: "CircleSignal") -> None:
        if not isinstance(other, CircleSignal):
            raise TypeError(f"expected CircleSignal, got {type(other).__name__}")
        if self.n != other.n:
            raise ValueError(f"signal lengths differ: {self.n} vs {other.n}")

    def __repr__(self) -> str:
        return f"CircleSignal(n={self.n}, norm={self.norm():.6g})"


class Spectrum:
    """Two-sided Fourier coefficients c_k for k = -n/2 .. n/2 - 1.

    coeffs[i] stores c_k with k = i - n/2, where
    c_k = (1/n) sum_j f_j exp(-i k t_j).  Acts as a mapping from k to the
    coefficient via indexing: spectrum[k].
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs) -> None:
        arr = np.array(coeffs, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError(f"coefficients must be one-dimensional, got shape {arr.shape}")
        _check_size(arr.size)
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.flags.writeable = False
        self.coeffs = arr

    @property
    def n(self) -> int:
        return self.coeffs.size

    def k_values(self) -> np.ndarray:
        half = self.n // 2
        return np.arange(-half, half)

    def __getitem__(self, k: int) -> complex:
        half = self.n // 2
        if not -half <= k < half:
            raise KeyError(f"frequency {k} outside [-{half}, {half})")
        return complex(self.coeffs[k + half])

    def items(self):
        return zip(self.k_values().tolist(), self.coeffs.tolist())

    def analytic_coeffs(self) -> np.ndarray:
        """Coefficients on k = 0 .. n/2 - 1 (the Hardy-space band)."""
        return self.coeffs[self.n // 2:]

    def negative_energy(self) -> float:
        """Energy carried by k < 0; zero exactly when the signal is analytic."""
        return float(np.sum(np.abs(self.coeffs[: self.n // 2]) ** 2))

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def to_signal(self) -> CircleSignal:
        return CircleSignal(np.fft.ifft(np.fft.ifftshift(self.coeffs)) * self.n)

    def __repr__(self) -> str:
        return f"Spectrum(n={self.n})"


def to_spectrum(f: CircleSignal) -> Spectrum:
    """Two-sided coefficients c_k = (1/n) sum_j f_j exp(-i k t_j)."""
    return Spectrum(np.fft.fftshift(np.fft.fft(f.samples)) / f.n)


def from_spectrum(spec: Spectrum) -> CircleSignal:
    return spec.to_signal()


def inner_product(f: CircleSignal, g: CircleSignal) -> complex:
    """Circle inner product <f, g> = (1/n) sum_j f_j conj(g_j)."""
    f._check_compatible(g)
    return complex(np.vdot(g.samples, f.samples) / f.n)


def norm(f: CircleSignal) -> float:
    return f.norm()


def _signed_frequencies(n: int) -> np.ndarray:
    # fft bin order: 0, 1, .., n/2-1, -n/2, .., -1
    return np.fft.fftfreq(n, d=1.0 / n)


def hilbert_transform(f: CircleSignal) -> CircleSignal:
    """Circular Hilbert transform as the Fourier multiplier -i sgn(k).

    sgn(0) = 0, so the mean is annihilated and H(H f) = -(f - c_0).
    Maps real signals without Nyquist content to real signals.
    """
    coeffs = np.fft.fft(f.samples)
    mult = -1j * np.sign(_signed_frequencies(f.n))
    return CircleSignal(np.fft.ifft(coeffs * mult))


def analytic_projection(f: CircleSignal) -> CircleSignal:
    """Projection onto nonnegative frequencies; equals (f + i H f + c_0)/2."""
    coeffs = np.fft.fft(f.samples)
    coeffs[_signed_frequencies(f.n) < 0] = 0.0
    return CircleSignal(np.fft.ifft(coeffs))


def analytic_leakage(f: CircleSignal) -> float:
    """Relative energy fraction on negative frequencies, as an amplitude ratio.

    Zero for analytic signals; used as the gate for operations that require
    Hardy-space inputs.
    """
    spec = to_spectrum(f)
    total = spec.energy()
    if total == 0.0:
        return 0.0
    return float(np.sqrt(spec.negative_energy() / total))


def eval_analytic(spec: Spectrum, a: complex) -> complex:
    """Value at a of the analytic part, sum_{k>=0} c_k a^k, |a| < 1 (Horner)."""
    a = complex(a)
    if abs(a) >= 1.0:
        raise ValueError(f"evaluation point must satisfy |a| < 1, got |a| = {abs(a)}")
    acc = 0.0 + 0.0j
    for ck in spec.analytic_coeffs()[::-1]:
        acc = acc * a + ck
    return complex(acc)


def real_from_analytic(fplus: CircleSignal, c0: float) -> CircleSignal:
    """Recover the real signal from its analytic part: f = 2 Re f+ - c_0."""
    return CircleSignal(2.0 * fplus.samples.real - float(c0))
