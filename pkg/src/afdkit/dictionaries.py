"""Dictionaries of pursuit atoms over a weighted complex inner-product space.

A dictionary exposes its atoms as columns of a matrix together with the
weight w defining <u, v> = w * v^H u.  Atoms carry labels (params); when a
label is selected repeatedly, the pursuit substitutes the dictionary's
derivative kernel of the matching order, if it provides one.

The Szego dictionary works in the coefficient domain: its atoms are the
truncated Taylor coefficient vectors of the kernels 1/(1 - conj(q) z), with
weight 1, which by Parseval reproduces the circle quadrature inner product
of band-limited signals exactly.
"""

from __future__ import annotations

import numpy as np

from .circle import CircleSignal, Spectrum, to_spectrum
from .szego import DiscGrid, tm_phase

__all__ = ["Dictionary", "MatrixDictionary", "SzegoDictionary"]


class Dictionary:
    """Base class: a finite atom family with a weighted ambient inner product."""

    params: np.ndarray  # one label per atom, in scan (tie-break) order
    atoms: np.ndarray  # (dim, size) complex columns
    weight: float

    @property
    def size(self) -> int:
        return self.atoms.shape[1]

    @property
    def dim(self) -> int:
        return self.atoms.shape[0]

    def kernel(self, idx: int) -> np.ndarray:
        return self.atoms[:, idx]

    def derivative_kernel(self, idx: int, order: int):
        """Higher-order atom for repeated selections; None when unsupported."""
        return None

    def boundary_mask(self) -> np.ndarray:
        return np.zeros(self.size, dtype=bool)

    def inner(self, u: np.ndarray, v: np.ndarray) -> complex:
        return complex(self.weight * np.vdot(v, u))

    def norm_sq(self, u: np.ndarray) -> float:
        return float(self.weight * np.vdot(u, u).real)

    def embed(self, obj) -> np.ndarray:
        """Coerce a caller object into an ambient column vector."""
        raise NotImplementedError

    def to_signal(self, vec: np.ndarray):
        """Inverse of embed where meaningful; default returns the vector."""
        return vec


class MatrixDictionary(Dictionary):
    """Plain column dictionary over C^dim with <u, v> = weight * v^H u."""

    def __init__(self, columns, params=None, weight: float = 1.0) -> None:
        atoms = np.array(columns, dtype=np.complex128)
        if atoms.ndim != 2 or atoms.shape[1] == 0:
            raise ValueError(f"columns must form a (dim, size) matrix, got shape {atoms.shape}")
        if not np.all(np.isfinite(atoms)):
            raise ValueError("dictionary columns must be finite")
        if weight <= 0.0:
            raise ValueError(f"inner-product weight must be positive, got {weight}")
        if params is None:
            params = np.arange(atoms.shape[1])
        params = np.asarray(params)
        if params.size != atoms.shape[1]:
            raise ValueError(
                f"got {params.size} labels for {atoms.shape[1]} atoms"
            )
        atoms.flags.writeable = False
        self.atoms = atoms
        self.params = params
        self.weight = float(weight)

    def embed(self, obj) -> np.ndarray:
        vec = np.asarray(obj, dtype=np.complex128)
        if vec.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}, got shape {vec.shape}")
        return vec


class SzegoDictionary(Dictionary):
    """Szego kernels at the points of a DiscGrid, in the coefficient domain.

    Atom q is the vector (conj(q)^k)_{k < n/2}; repeated selections are served
    by the derivative kernels d^{m}/d conj(q)^{m} with falling-factorial
    coefficients.  coeff_phase supplies the Blaschke phase that aligns
    Gram-Schmidt candidates with the Takenaka-Malmquist convention, so pursuit
    coefficients agree with the core greedy recursion, not just in modulus.
    """

    def __init__(self, grid: DiscGrid, n: int) -> None:
        if n % 2 != 0 or n < 4:
            raise ValueError(f"signal length must be an even integer >= 4, got {n}")
        half = n // 2
        self.grid = grid
        self.n = n
        self.params = grid.points
        self.atoms = grid.eval_matrix(half).conj().T
        self.weight = 1.0

    def derivative_kernel(self, idx: int, order: int) -> np.ndarray:
        q = complex(self.params[idx])
        half = self.n // 2
        if order > half:
            return None
        ks = np.arange(half, dtype=np.float64)
        fall = np.ones(half, dtype=np.float64)
        for j in range(order - 1):
            fall *= ks - j
        vec = np.zeros(half, dtype=np.complex128)
        lo = order - 1
        vec[lo:] = fall[lo:] * np.conj(q) ** (np.arange(lo, half) - lo)
        return vec

    def boundary_mask(self) -> np.ndarray:
        return self.grid.boundary_mask()

    def coeff_phase(self, idx: int, prior_params) -> complex:
        return tm_phase(complex(self.params[idx]), prior_params)

    def embed(self, obj) -> np.ndarray:
        if isinstance(obj, CircleSignal):
            spec = to_spectrum(obj)
            total = spec.energy()
            neg = spec.negative_energy()
            if total > 0.0 and np.sqrt(neg / total) > 1e-10:
                raise ValueError(
                    "Szego dictionary inputs must be analytic; negative-frequency "
                    f"leakage is {np.sqrt(neg / total):.3e}"
                )
            return spec.analytic_coeffs().copy()
        vec = np.asarray(obj, dtype=np.complex128)
        if vec.shape != (self.n // 2,):
            raise ValueError(
                f"expected a CircleSignal of length {self.n} or a coefficient "
                f"vector of length {self.n // 2}, got shape {vec.shape}"
            )
        return vec

    def to_signal(self, vec: np.ndarray) -> CircleSignal:
        full = np.zeros(self.n, dtype=np.complex128)
        full[self.n // 2:] = vec
        return Spectrum(full).to_signal()
