"""Szego kernels, Blaschke products, and rational orthonormal systems.

Kernel-type objects are synthesized from their Taylor coefficients truncated
to the analytic band k < n/2.  That convention makes the reproducing identity

    <g, e_a> = sqrt(1 - |a|^2) * g(a)

exact quadrature for every band-limited analytic g and every |a| < 1, which
is what all selection and coefficient formulas lean on.  The price is in the
norm: the truncated normalized kernel has grid norm sqrt(1 - |a|^n), i.e.
unit to 1e-12 for |a| <= ~0.9 at n = 256, with a deficit growing toward the
rim.  Selection grids cap the radius below 1 for exactly this reason.

Blaschke products and the Takenaka-Malmquist (TM) system are sampled
pointwise from their rational formulas, so unimodularity on the circle is
exact to rounding for any parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import CircleSignal, Spectrum

__all__ = [
    "DiscGrid",
    "TMSystem",
    "szego_eval",
    "reproducing_value",
    "blaschke_product",
    "blaschke_at",
    "multiple_kernel",
    "tm_system",
    "tm_phase",
    "unit_circle",
]


def _check_disc_point(a: complex, label: str = "parameter") -> complex:
    a = complex(a)
    if not np.isfinite(a.real) or not np.isfinite(a.imag):
        raise ValueError(f"{label} must be finite")
    if abs(a) >= 1.0:
        raise ValueError(f"{label} must lie strictly inside the unit disc, got |a| = {abs(a)}")
    return a


def unit_circle(n: int) -> np.ndarray:
    """Samples z_j = exp(i t_j) of the unit circle grid."""
    return np.exp(2j * np.pi * np.arange(n) / n)


def _analytic_signal(acoeffs: np.ndarray, n: int) -> CircleSignal:
    """Synthesize the signal with analytic coefficients acoeffs (len n/2)."""
    full = np.zeros(n, dtype=np.complex128)
    full[n // 2:] = acoeffs
    return Spectrum(full).to_signal()


def szego_eval(a: complex, n: int) -> CircleSignal:
    """Normalized Szego kernel e_a = sqrt(1-|a|^2)/(1 - conj(a) z), band-limited.

    Synthesized from the Taylor coefficients sqrt(1-|a|^2) conj(a)^k,
    k < n/2.  Grid norm is sqrt(1 - |a|^n).
    """
    a = _check_disc_point(a)
    half = n // 2
    coeffs = np.sqrt(1.0 - abs(a) ** 2) * np.conj(a) ** np.arange(half)
    return _analytic_signal(coeffs, n)


def reproducing_value(g: CircleSignal, a: complex) -> complex:
    """Closed form of <g, e_a> for band-limited g: sqrt(1-|a|^2) g(a)."""
    from .circle import eval_analytic, to_spectrum

    a = _check_disc_point(a)
    return complex(np.sqrt(1.0 - abs(a) ** 2) * eval_analytic(to_spectrum(g), a))


def blaschke_product(params, n: int) -> CircleSignal:
    """Pointwise samples of prod_l (z - a_l) / (1 - conj(a_l) z).

    Unimodular on the circle to rounding for any parameters inside the disc.
    An empty product is the constant 1.
    """
    z = unit_circle(n)
    prod = np.ones(n, dtype=np.complex128)
    for a in params:
        a = _check_disc_point(a)
        prod *= (z - a) / (1.0 - np.conj(a) * z)
    return CircleSignal(prod)


def blaschke_at(params, z: complex) -> complex:
    """Value of the Blaschke product at a single point z (|z| <= 1)."""
    acc = 1.0 + 0.0j
    for a in params:
        a = _check_disc_point(a)
        acc *= (z - a) / (1.0 - np.conj(a) * z)
    return complex(acc)


def multiple_kernel(a: complex, order: int, n: int) -> CircleSignal:
    """Derivative kernel d^{order-1}/d conj(a)^{order-1} of k_a = 1/(1 - conj(a) z).

    Closed form (order-1)! z^{order-1} / (1 - conj(a) z)^order, synthesized
    band-limited from the Taylor coefficients
    c_k = k (k-1) ... (k-order+2) conj(a)^{k-order+1} for k >= order-1.
    order = 1 is the unnormalized Szego kernel itself.
    """
    a = _check_disc_point(a)
    if order < 1:
        raise ValueError(f"order must be a positive integer, got {order}")
    half = n // 2
    if order > half:
        raise ValueError(f"order {order} exceeds the analytic band {half}")
    ks = np.arange(half, dtype=np.float64)
    fall = np.ones(half, dtype=np.float64)
    for j in range(order - 1):
        fall *= ks - j
    coeffs = np.zeros(half, dtype=np.complex128)
    lo = order - 1
    coeffs[lo:] = fall[lo:] * np.conj(a) ** (np.arange(lo, half) - lo)
    return _analytic_signal(coeffs, n)


@dataclass(frozen=True)
class DiscGrid:
    """Polar selection lattice: origin plus r_count-1 rings of a_count angles.

    Points are ordered radius-major, angle-minor, which fixes the
    deterministic tie-break (smallest index) used by all selection scans.
    """

    r_count: int
    a_count: int
    r_max: float
    radii: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    _powers: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def make(cls, r_count: int = 64, a_count: int = 128, r_max: float = 0.998) -> "DiscGrid":
        if r_count < 1 or a_count < 1:
            raise ValueError("grid counts must be positive integers")
        if not 0.0 < r_max < 1.0:
            raise ValueError(f"r_max must lie in (0, 1), got {r_max}")
        if r_count == 1:
            radii = np.zeros(1)
        else:
            radii = np.arange(r_count) * (r_max / (r_count - 1))
        angles = 2.0 * np.pi * np.arange(a_count) / a_count
        rings = radii[1:, None] * np.exp(1j * angles)[None, :]
        points = np.concatenate([np.zeros(1, dtype=np.complex128), rings.ravel()])
        return cls(r_count, a_count, float(r_max), radii, points)

    @property
    def size(self) -> int:
        return self.points.size

    def eval_matrix(self, half: int) -> np.ndarray:
        """Cached Vandermonde powers points[q]^k, k < half, for batch evaluation."""
        mat = self._powers.get(half)
        if mat is None:
            mat = np.vander(self.points, half, increasing=True)
            mat.flags.writeable = False
            self._powers[half] = mat
        return mat

    def boundary_mask(self) -> np.ndarray:
        """True for points on the outermost ring (radius r_max)."""
        mask = np.zeros(self.size, dtype=bool)
        if self.r_count > 1:
            mask[1 + (self.r_count - 2) * self.a_count:] = True
        else:
            mask[:] = True
        return mask


@dataclass(frozen=True)
class TMSystem:
    """Takenaka-Malmquist system for a parameter sequence (repeats allowed).

    basis[k] holds the pointwise samples of
    B_k = sqrt(1-|a_k|^2)/(1 - conj(a_k) z) * prod_{l<k} (z - a_l)/(1 - conj(a_l) z),
    an orthonormal family; params = (0, ..., 0) gives the Fourier monomials
    z^{k-1}.
    """

    params: np.ndarray
    basis: np.ndarray = field(repr=False)

    @property
    def terms(self) -> int:
        return self.params.size

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    def coeffs(self, f: CircleSignal) -> np.ndarray:
        """Quadrature coefficients <f, B_k> for all k."""
        if f.n != self.n:
            raise ValueError(f"signal length {f.n} does not match system grid {self.n}")
        return (self.basis.conj() @ f.samples) / self.n

    def coeff_matrix(self, samples: np.ndarray) -> np.ndarray:
        """Row-wise coefficients for a (W, n) sample matrix."""
        return (samples @ self.basis.conj().T) / self.n

    def synthesize(self, coeffs) -> CircleSignal:
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.size != self.terms:
            raise ValueError(f"expected {self.terms} coefficients, got {coeffs.size}")
        return CircleSignal(coeffs @ self.basis)

    def gram_deviation(self) -> float:
        """Max deviation of <B_i, B_j> from the identity matrix."""
        gram = (self.basis @ self.basis.conj().T) / self.n
        return float(np.max(np.abs(gram - np.eye(self.terms))))


def tm_system(params, n: int) -> TMSystem:
    """Build the TM system for params on the n-point grid (pointwise formulas)."""
    params = np.asarray([_check_disc_point(a) for a in params], dtype=np.complex128)
    z = unit_circle(n)
    rows = np.empty((params.size, n), dtype=np.complex128)
    prod = np.ones(n, dtype=np.complex128)
    for k, a in enumerate(params):
        rows[k] = np.sqrt(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * z) * prod
        prod = prod * (z - a) / (1.0 - np.conj(a) * z)
    return TMSystem(params, rows)


def tm_phase(q: complex, prior_params) -> complex:
    """Unimodular factor aligning a Gram-Schmidt kernel step with the TM system.

    For distinct parameters the orthonormalized kernel at q equals
    conj(phi(q))/|phi(q)| * B (phi the Blaschke product over the priors), so
    multiplying by phase(phi(q)) recovers the TM convention.  When q repeats
    earlier parameters the repeated factors contribute the positive constant
    (1-|q|^2)^{-m} in the limit, so they drop out of the phase.
    """
    q = _check_disc_point(q)
    acc = 1.0 + 0.0j
    for a in prior_params:
        a = complex(a)
        if a == q:
            continue
        acc *= (q - a) / (1.0 - np.conj(a) * q)
    mag = abs(acc)
    if mag == 0.0:
        return 1.0 + 0.0j
    return complex(acc / mag)
