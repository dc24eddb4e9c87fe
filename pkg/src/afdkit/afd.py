"""Core adaptive greedy decomposition over Szego kernels on the disc.

Each step selects the disc parameter maximizing the extracted energy

    |<f_k, e_a>|^2 = (1 - |a|^2) |f_k(a)|^2

by exhaustive scan over a polar grid (the closed form equals the quadrature
inner product exactly for band-limited f_k), then peels the kernel off and
divides by the Mobius factor (z - a)/(1 - conj(a) z):

    f_{k+1} = (f_k - <f_k, e_a> e_a) / ((z - a)/(1 - conj(a) z))

The division is computed pointwise on the circle where the factor never
vanishes; analyticity of the quotient is asserted post hoc by checking that
the negative-frequency leakage stays below 1e-8 (relative) before
hard-zeroing it.  The expansion coefficients relative to the original signal
coincide with the Takenaka-Malmquist coefficients:
<f_k, e_{a_k}> = <f, B_k>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circle import CircleSignal, to_spectrum
from .szego import DiscGrid, TMSystem, szego_eval, tm_system, unit_circle

__all__ = [
    "Decomposition",
    "msp_select",
    "reduce_remainder",
    "afd_decompose",
    "expand_with_params",
    "reconstruct",
    "standard_remainder",
]

# Relative negative-frequency budget for declaring a signal analytic,
# and for accepting a Mobius quotient after pointwise division.
ANALYTIC_TOL = 1e-10
DIVISION_LEAK_TOL = 1e-8

# Residual-energy floor, relative to the input energy, at which the greedy
# loop stops early.
STOP_TOL = 1e-12


@dataclass(frozen=True)
class Decomposition:
    """Result of a greedy kernel expansion.

    residual_energy[k] = ||f||^2 - sum_{l<=k} |coeffs[l]|^2 for k = 0..n
    (index 0 is the input energy); non-increasing with final entry >= -1e-10.
    """

    params: np.ndarray
    coeffs: np.ndarray
    residual_energy: np.ndarray
    tm: TMSystem
    grid: DiscGrid | None = field(default=None, repr=False)

    @property
    def terms(self) -> int:
        return self.params.size


def _require_analytic(f: CircleSignal, label: str) -> np.ndarray:
    """Return the analytic coefficients of f, erroring on real leakage."""
    spec = to_spectrum(f)
    total = spec.energy()
    neg = spec.negative_energy()
    if total > 0.0 and np.sqrt(neg / total) > ANALYTIC_TOL:
        raise ValueError(
            f"{label} must be analytic: negative-frequency leakage "
            f"{np.sqrt(neg / total):.3e} exceeds {ANALYTIC_TOL:.0e}"
        )
    return spec.analytic_coeffs().copy()


def _ensemble_scan(
    acoeff_rows: np.ndarray, weights: np.ndarray, grid: DiscGrid
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate analytic coefficient rows on the grid and score every point.

    Returns (vals, objective): vals[w, j] is realization w at grid point j,
    objective[j] = (1 - |a_j|^2) * sum_w weights[w] |vals[w, j]|^2.  The
    single-row unit-weight case is the deterministic scan, float for float.
    """
    vals = acoeff_rows @ grid.eval_matrix(acoeff_rows.shape[1]).T
    rim = 1.0 - np.abs(grid.points) ** 2
    return vals, rim * (weights @ (np.abs(vals) ** 2))


def _scan_objective(acoeffs: np.ndarray, grid: DiscGrid) -> tuple[np.ndarray, np.ndarray]:
    """Values f(a) on all grid points and the energies (1-|a|^2)|f(a)|^2."""
    vals, objective = _ensemble_scan(acoeffs[None, :], np.ones(1), grid)
    return vals[0], objective


def msp_select(f: CircleSignal, grid: DiscGrid, exclude=()) -> complex:
    """Maximal-selection parameter: argmax of (1-|a|^2)|f(a)|^2 over the grid.

    Ties break to the smallest grid index (radius-major, angle-minor order).
    `exclude` holds grid indices to skip, supporting distinct-selection runs.
    """
    acoeffs = _require_analytic(f, "msp_select input")
    _, objective = _scan_objective(acoeffs, grid)
    exclude = np.asarray(list(exclude), dtype=int)
    if exclude.size:
        objective = objective.copy()
        objective[exclude] = -np.inf
    idx = int(np.argmax(objective))
    if not np.isfinite(objective[idx]):
        raise RuntimeError("selection grid exhausted: every point is excluded")
    return complex(grid.points[idx])


def _reduce_rows(
    rows: np.ndarray, a: complex, vals_at_a: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shared-parameter reduction of sample rows given their values at a.

    Peels coeff_w * e_a off every row and divides by the Mobius factor,
    hard-zeroing negative frequencies after the leakage check.  Returns
    (coeffs, reduced rows, reduced analytic coefficient rows).
    """
    a = complex(a)
    if abs(a) >= 1.0:
        raise ValueError(f"parameter must lie strictly inside the unit disc, got |a| = {abs(a)}")
    coeffs = np.sqrt(1.0 - abs(a) ** 2) * np.asarray(vals_at_a, dtype=np.complex128)
    numer = rows - coeffs[:, None] * szego_eval(a, n).samples[None, :]
    z = unit_circle(n)
    quotient = numer * ((1.0 - np.conj(a) * z) / (z - a))[None, :]
    spec = np.fft.fftshift(np.fft.fft(quotient, axis=1), axes=1) / n
    half = n // 2
    neg = np.sum(np.abs(spec[:, :half]) ** 2, axis=1)
    # Leakage is judged against the row being reduced, not the numerator: a
    # step that extracts (nearly) everything leaves a numerator of pure
    # rounding noise whose own spectrum is meaningless, while the row norm is
    # the scale the energy bookkeeping actually protects.
    row_energy = np.mean(np.abs(rows) ** 2, axis=1)
    live = row_energy > 0.0
    if np.any(np.sqrt(neg[live] / row_energy[live]) > DIVISION_LEAK_TOL):
        worst = float(np.max(np.sqrt(neg[live] / row_energy[live])))
        raise ValueError(
            f"Mobius quotient at a = {a} leaks {worst:.3e} of the signal's "
            f"amplitude into negative frequencies (tolerance "
            f"{DIVISION_LEAK_TOL:.0e}); the parameter is too close to the rim "
            f"for an {n}-point grid"
        )
    spec[:, :half] = 0.0
    reduced = np.fft.ifft(np.fft.ifftshift(spec, axes=1), axis=1) * n
    return coeffs, reduced, spec[:, half:].copy()


def reduce_remainder(f: CircleSignal, a: complex) -> CircleSignal:
    """One backward-shift step: peel e_a off f and divide by the Mobius factor.

    Returns (f - <f, e_a> e_a) * (1 - conj(a) z)/(z - a) with negative
    frequencies hard-zeroed after verifying their amplitude is below 1e-8
    relative to f itself.  A violation means the parameter sits too close to
    the rim for the grid resolution and the quotient is not resolvable as an
    analytic signal.
    """
    acoeffs = _require_analytic(f, "reduce_remainder input")
    value = _horner(acoeffs, complex(a))
    _, reduced, _ = _reduce_rows(f.samples[None, :], a, np.array([value]), f.n)
    return CircleSignal(reduced[0])


def _horner(acoeffs: np.ndarray, a: complex) -> complex:
    acc = 0.0 + 0.0j
    for c in acoeffs[::-1]:
        acc = acc * a + c
    return acc


def afd_decompose(
    f: CircleSignal,
    grid: DiscGrid,
    n_iter: int,
    distinct: bool = False,
    stop_tol: float = STOP_TOL,
) -> Decomposition:
    """Greedy kernel expansion of an analytic signal.

    Runs up to n_iter selection/reduction steps, stopping early once the
    residual energy falls below stop_tol times the input energy.  With
    distinct=True previously selected grid points are excluded from later
    scans (selection indices never repeat).
    """
    if n_iter < 1:
        raise ValueError(f"n_iter must be at least 1, got {n_iter}")
    acoeffs = _require_analytic(f, "afd_decompose input")
    energy0 = f.energy()
    params: list[complex] = []
    coeffs: list[complex] = []
    trace = [energy0]
    selected: list[int] = []
    rows = f.samples[None, :].copy()
    arow = acoeffs[None, :]
    unit = np.ones(1)
    for _ in range(n_iter):
        vals, objective = _ensemble_scan(arow, unit, grid)
        if distinct and selected:
            objective = objective.copy()
            objective[selected] = -np.inf
        idx = int(np.argmax(objective))
        if not np.isfinite(objective[idx]):
            break
        a = complex(grid.points[idx])
        selected.append(idx)
        step_coeffs, rows, arow = _reduce_rows(rows, a, vals[:, idx], f.n)
        params.append(a)
        coeffs.append(complex(step_coeffs[0]))
        trace.append(energy0 - float(np.sum(np.abs(np.asarray(coeffs)) ** 2)))
        if trace[-1] <= stop_tol * energy0:
            break
    return Decomposition(
        params=np.asarray(params, dtype=np.complex128),
        coeffs=np.asarray(coeffs, dtype=np.complex128),
        residual_energy=np.asarray(trace),
        tm=tm_system(params, f.n),
        grid=grid,
    )


def expand_with_params(f: CircleSignal, params) -> Decomposition:
    """Expand f against a fixed TM system by direct inner products."""
    _require_analytic(f, "expand_with_params input")
    tm = tm_system(params, f.n)
    coeffs = tm.coeffs(f)
    energy0 = f.energy()
    trace = energy0 - np.concatenate([[0.0], np.cumsum(np.abs(coeffs) ** 2)])
    return Decomposition(
        params=tm.params.copy(),
        coeffs=coeffs,
        residual_energy=trace,
        tm=tm,
        grid=None,
    )


def reconstruct(dec: Decomposition, k: int) -> CircleSignal:
    """Partial sum of the first k terms; k = 0 gives the zero signal."""
    if not 0 <= k <= dec.terms:
        raise ValueError(f"partial-sum order must lie in [0, {dec.terms}], got {k}")
    if k == 0:
        return CircleSignal(np.zeros(dec.tm.n, dtype=np.complex128))
    return dec.tm.synthesize(np.concatenate([dec.coeffs[:k], np.zeros(dec.terms - k)]))


def standard_remainder(f: CircleSignal, dec: Decomposition, k: int) -> CircleSignal:
    """Standard remainder g_k = f - sum_{l<k} <f, B_l> B_l for 2 <= k <= n+1.

    Satisfies g_k = f_k * phi_{k-1} pointwise, phi the Blaschke product over
    the first k-1 parameters.
    """
    if not 2 <= k <= dec.terms + 1:
        raise ValueError(f"remainder index must lie in [2, {dec.terms + 1}], got {k}")
    return f - reconstruct(dec, k - 1)
