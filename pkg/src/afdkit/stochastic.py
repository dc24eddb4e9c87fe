"""Weighted-ensemble layer: random signals as finite empirical measures.

A random signal is a finite family of realizations f_w with non-negative
weights p_w summing to one; every expectation E_w is the corresponding
weighted sum, so the identities below hold algebraically rather than only in
distribution.  The energy-expectation norm is sqrt(E_w ||f_w||^2).

Three decomposition strategies operate on ensembles:

* expectation-first (safd1): decompose the weighted mean greedily, project
  every realization on the resulting orthonormal system, and account for the
  per-realization deviation energy;
* expectation-second on the disc grid (safd2): each step selects the single
  parameter maximizing the expected extracted energy
  E_w (1 - |a|^2)|f_w(a)|^2 and reduces every realization with it;
* expectation-second over an abstract dictionary (spoafd): pre-orthogonalized
  pursuit under the weighted squared objective.

A single unit-weight realization collapses each strategy to its
deterministic counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .afd import ANALYTIC_TOL, STOP_TOL, _ensemble_scan, _reduce_rows, afd_decompose
from .circle import CircleSignal, hilbert_transform
from .dictionaries import Dictionary
from .poafd import pomsp_select, weak_select
from .szego import DiscGrid, TMSystem, tm_system

__all__ = [
    "Ensemble",
    "EnsembleDecomposition",
    "ee_norm",
    "expectation_signal",
    "remainder_ensemble",
    "commute_check",
    "plus_norm_relation",
    "autocorrelation",
    "stationarity_score",
    "safd1_decompose",
    "smsp_objective",
    "safd2_decompose",
    "spoafd_decompose",
    "sbvc_probe",
]

WEIGHT_TOL = 1e-12


class Ensemble:
    """Immutable weighted family of equal-length circle signals.

    samples holds one realization per row; weights are non-negative and must
    sum to one within 1e-12 (normalize upstream if needed).
    """

    __slots__ = ("samples", "weights", "label")

    def __init__(self, samples, weights=None, label: str | None = None) -> None:
        arr = np.array(samples, dtype=np.complex128)
        if arr.ndim != 2:
            raise ValueError(f"samples must be a 2-d array (one row per realization), got shape {arr.shape}")
        count, n = arr.shape
        if count < 1:
            raise ValueError("ensemble needs at least one realization")
        if n % 2 != 0 or n < 4:
            raise ValueError(f"realization length must be an even integer >= 4, got {n}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if weights is None:
            wts = np.full(count, 1.0 / count)
        else:
            wts = np.array(weights, dtype=float)
            if wts.shape != (count,):
                raise ValueError(f"expected {count} weights, got shape {wts.shape}")
            if not np.all(np.isfinite(wts)):
                raise ValueError("weights must be finite")
            if np.any(wts < 0.0):
                raise ValueError("weights must be non-negative")
            if abs(float(np.sum(wts)) - 1.0) > WEIGHT_TOL:
                raise ValueError(f"weights must sum to 1, got {float(np.sum(wts)):.17g}")
        arr.flags.writeable = False
        wts.flags.writeable = False
        self.samples = arr
        self.weights = wts
        self.label = label

    @classmethod
    def from_signals(cls, signals, weights=None, label: str | None = None) -> "Ensemble":
        signals = list(signals)
        if not signals:
            raise ValueError("ensemble needs at least one realization")
        sizes = {s.n for s in signals}
        if len(sizes) != 1:
            raise ValueError(f"realizations must share one length, got {sorted(sizes)}")
        return cls(np.stack([s.samples for s in signals]), weights, label)

    @property
    def count(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[1]

    def realization(self, w: int) -> CircleSignal:
        return CircleSignal(self.samples[w])

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.samples.real))))
        return float(np.max(np.abs(self.samples.imag))) <= tol * scale

    def __repr__(self) -> str:
        tag = f", label={self.label!r}" if self.label else ""
        return f"Ensemble(count={self.count}, n={self.n}{tag})"


@dataclass(frozen=True)
class EnsembleDecomposition:
    """Decomposition of an ensemble against one shared orthonormal system.

    coeff_matrix[w, k] = <f_w, B_k>; residual_energy[m] is the expected
    energy left after keeping m terms (non-increasing, length terms + 1).
    difference_norms holds per-realization deviation energies when the
    strategy computes them; diagnostics collects the identity residuals
    measured during the run.
    """

    kind: str
    params: np.ndarray
    coeff_matrix: np.ndarray
    residual_energy: np.ndarray
    weights: np.ndarray
    tm: TMSystem | None = field(default=None, repr=False)
    basis: np.ndarray | None = field(default=None, repr=False)
    orders: np.ndarray | None = None
    param_indices: np.ndarray | None = None
    difference_norms: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def terms(self) -> int:
        return self.params.size


def ee_norm(e: Ensemble) -> float:
    """Energy-expectation norm sqrt(sum_w p_w ||f_w||^2)."""
    energies = np.mean(np.abs(e.samples) ** 2, axis=1)
    return float(np.sqrt(e.weights @ energies))


def _ee_energy(rows: np.ndarray, weights: np.ndarray) -> float:
    return float(weights @ np.mean(np.abs(rows) ** 2, axis=1))


def expectation_signal(e: Ensemble) -> CircleSignal:
    """Pointwise weighted average of the realizations."""
    return CircleSignal(e.weights @ e.samples)


def remainder_ensemble(e: Ensemble) -> Ensemble:
    """Centered ensemble f_w - E_w f with the same weights (expectation zero)."""
    mean = e.weights @ e.samples
    return Ensemble(e.samples - mean[None, :], e.weights, e.label)


def commute_check(e: Ensemble) -> float:
    """Max pointwise gap between H(E_w f) and E_w(H f); zero up to rounding."""
    lhs = hilbert_transform(expectation_signal(e)).samples
    rows = np.stack([hilbert_transform(e.realization(w)).samples for w in range(e.count)])
    rhs = e.weights @ rows
    return float(np.max(np.abs(lhs - rhs)))


def plus_norm_relation(e: Ensemble, tol: float = 1e-10) -> dict:
    """Energy split of the analytic part of the centered remainder.

    For real realizations with centered spectra d_k(w), the remainder's
    analytic part r+ satisfies

        E_w ||r+||^2 = sum_{k>=0} E_w |d_k|^2 = (E_w ||r||^2 + E_w |d_0|^2)/2,

    the halving because d_{-k} = conj(d_k) pairs the two spectral sides
    (the model keeps the unpaired Nyquist bin empty; residual Nyquist energy
    is reported so violations are attributable).  The commonly quoted form
    E_w ||r + d_0||^2 / 2 differs once d_0 != 0 and is reported unasserted.
    """
    if not e.is_real():
        raise ValueError("plus-norm relation requires real-valued realizations")
    n = e.n
    half = n // 2
    mean = e.weights @ e.samples
    r_rows = e.samples - mean[None, :]
    spec = np.fft.fftshift(np.fft.fft(r_rows, axis=1), axes=1) / n
    col_energy = e.weights @ (np.abs(spec) ** 2)  # E_w |d_k|^2 per column

    plus_spec = spec.copy()
    plus_spec[:, :half] = 0.0
    plus_rows = np.fft.ifft(np.fft.ifftshift(plus_spec, axes=1), axis=1) * n
    plus_energy = _ee_energy(plus_rows, e.weights)

    coefficient_energy = float(np.sum(col_energy[half:]))
    d0 = spec[:, half]
    d0_energy = float(e.weights @ (np.abs(d0) ** 2))
    remainder_energy = _ee_energy(r_rows, e.weights)
    derived_value = (remainder_energy + d0_energy) / 2.0
    printed_value = _ee_energy(r_rows + d0[:, None], e.weights) / 2.0

    residual_ab = abs(plus_energy - coefficient_energy)
    residual_bc = abs(coefficient_energy - derived_value)
    return {
        "plus_energy": plus_energy,
        "coefficient_energy": coefficient_energy,
        "derived_value": derived_value,
        "printed_value": printed_value,
        "residual_ab": residual_ab,
        "residual_bc": residual_bc,
        "printed_gap": abs(plus_energy - printed_value),
        "mean_coefficient_energy": d0_energy,
        "nyquist_energy": float(col_energy[0]),
        "tolerance": tol,
        "passed": bool(residual_ab <= tol and residual_bc <= tol),
    }


def autocorrelation(e: Ensemble) -> np.ndarray:
    """Second-moment matrix gamma[i, j] = E_w f_w(t_i) f_w(t_j).

    Real ensembles use the plain product and return a real symmetric matrix;
    complex ensembles conjugate the second factor.
    """
    if e.is_real():
        rows = np.ascontiguousarray(e.samples.real)
        return (rows * e.weights[:, None]).T @ rows
    return (e.samples * e.weights[:, None]).T @ e.samples.conj()


def stationarity_score(gamma: np.ndarray) -> float:
    """Max spread of gamma along its wrapped diagonals.

    Weak stationarity on the circle grid means gamma[i, j] depends only on
    (i - j) mod n, i.e. every wrapped diagonal is constant; the score is the
    largest absolute deviation from the per-diagonal mean.
    """
    gamma = np.asarray(gamma)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {gamma.shape}")
    n = gamma.shape[0]
    idx = np.arange(n)
    diagonals = gamma[idx[None, :], (idx[None, :] + idx[:, None]) % n]
    means = diagonals.mean(axis=1, keepdims=True)
    return float(np.max(np.abs(diagonals - means)))


def _analytic_rows(e: Ensemble, label: str) -> np.ndarray:
    """Analytic coefficient rows (k >= 0) of every realization, or error."""
    spec = np.fft.fftshift(np.fft.fft(e.samples, axis=1), axes=1) / e.n
    half = e.n // 2
    neg = np.sum(np.abs(spec[:, :half]) ** 2, axis=1)
    total = np.sum(np.abs(spec) ** 2, axis=1)
    live = total > 0.0
    leak = np.zeros(e.count)
    leak[live] = np.sqrt(neg[live] / total[live])
    worst = int(np.argmax(leak))
    if leak[worst] > ANALYTIC_TOL:
        raise ValueError(
            f"{label} requires analytic realizations: realization {worst} has "
            f"negative-frequency leakage {leak[worst]:.3e} (tolerance {ANALYTIC_TOL:.0e})"
        )
    return spec[:, half:].copy()


def safd1_decompose(e: Ensemble, grid: DiscGrid, n_iter: int) -> EnsembleDecomposition:
    """Expectation-first decomposition: greedy system from the mean signal.

    Runs the deterministic greedy decomposition on E_w f, projects every
    realization on the resulting orthonormal system, and measures three
    identities recorded in diagnostics:

    * mean_deviation_max: E_w of the centered deviation
      d(w) = r_w - proj(r_w), r_w = f_w - E_w f, vanishes pointwise;
    * pythagoras_residual: expected truncation error at every order m equals
      the full deviation energy plus the dropped coefficient energy;
    * deviation_energy_residual: E_w ||d(w)||^2 equals the centered energy
      minus the projected coefficient energy.

    residual_energy[m] is measured directly as E_w ||f_w - proj_m f_w||^2.
    """
    _analytic_rows(e, "safd1_decompose")  # analyticity gate only
    mean = expectation_signal(e)
    dec = afd_decompose(mean, grid, n_iter)
    tm = dec.tm
    terms = dec.terms

    coeff = tm.coeff_matrix(e.samples)  # (W, terms)
    col_energy = e.weights @ (np.abs(coeff) ** 2)

    trace = np.empty(terms + 1)
    for m in range(terms + 1):
        partial = coeff[:, :m] @ tm.basis[:m]
        trace[m] = _ee_energy(e.samples - partial, e.weights)
    full_dev_energy = trace[terms]
    tails = np.concatenate([np.cumsum(col_energy[::-1])[::-1], [0.0]])
    pythagoras_residual = float(np.max(np.abs(trace - (full_dev_energy + tails))))

    r_rows = e.samples - mean.samples[None, :]
    r_coeff = tm.coeff_matrix(r_rows)
    deviation = r_rows - r_coeff @ tm.basis
    mean_deviation_max = float(np.max(np.abs(e.weights @ deviation)))
    difference_norms = np.mean(np.abs(deviation) ** 2, axis=1)
    dev_energy = float(e.weights @ difference_norms)
    centered_energy = _ee_energy(r_rows, e.weights)
    projected = float(e.weights @ np.sum(np.abs(r_coeff) ** 2, axis=1))
    deviation_energy_residual = abs(dev_energy - (centered_energy - projected))

    mean_tail = mean.samples - tm.coeffs(mean) @ tm.basis
    diagnostics = {
        "mean_deviation_max": mean_deviation_max,
        "pythagoras_residual": pythagoras_residual,
        "deviation_energy_residual": deviation_energy_residual,
        "mean_projection_tail": float(np.mean(np.abs(mean_tail) ** 2)),
        "mean_coeffs": dec.coeffs,
        "mean_residual_energy": dec.residual_energy,
    }
    return EnsembleDecomposition(
        kind="safd1",
        params=dec.params,
        coeff_matrix=coeff,
        residual_energy=trace,
        weights=e.weights,
        tm=tm,
        difference_norms=difference_norms,
        diagnostics=diagnostics,
    )


def smsp_objective(e: Ensemble, a: complex) -> float:
    """Expected extracted energy sum_w p_w (1 - |a|^2) |f_w(a)|^2."""
    a = complex(a)
    if abs(a) >= 1.0:
        raise ValueError(f"parameter must lie strictly inside the unit disc, got |a| = {abs(a)}")
    acoeffs = _analytic_rows(e, "smsp_objective")
    powers = a ** np.arange(acoeffs.shape[1])
    vals = acoeffs @ powers
    return float((1.0 - abs(a) ** 2) * (e.weights @ (np.abs(vals) ** 2)))


def safd2_decompose(
    e: Ensemble, grid: DiscGrid, n_iter: int, stop_tol: float = STOP_TOL
) -> EnsembleDecomposition:
    """Expectation-second decomposition: one shared parameter per step.

    Each step scans the disc grid for the argmax of the expected extracted
    energy (ties to the smallest grid index), then reduces every realization
    with the shared parameter.  residual_energy is measured from the actual
    remainder rows, so monotonicity is observed rather than bookkept;
    diagnostics records the bookkeeping gap and the agreement between
    per-step coefficients and the orthonormal-system projections.
    """
    if n_iter < 1:
        raise ValueError(f"n_iter must be at least 1, got {n_iter}")
    arows = _analytic_rows(e, "safd2_decompose")
    rows = e.samples.copy()
    ee0 = _ee_energy(rows, e.weights)
    params: list[complex] = []
    step_cols: list[np.ndarray] = []
    trace = [ee0]
    for _ in range(n_iter):
        vals, objective = _ensemble_scan(arows, e.weights, grid)
        idx = int(np.argmax(objective))
        a = complex(grid.points[idx])
        step_coeffs, rows, arows = _reduce_rows(rows, a, vals[:, idx], e.n)
        params.append(a)
        step_cols.append(step_coeffs)
        trace.append(_ee_energy(rows, e.weights))
        if trace[-1] <= stop_tol * ee0:
            break

    step_matrix = np.column_stack(step_cols)
    tm = tm_system(params, e.n)
    coeff = tm.coeff_matrix(e.samples)
    step_energy = e.weights @ (np.abs(step_matrix) ** 2)
    proj_energy = e.weights @ (np.abs(coeff) ** 2)
    bookkept = ee0 - np.concatenate([[0.0], np.cumsum(step_energy)])
    diagnostics = {
        "projection_energy_residual": float(np.max(np.abs(step_energy - proj_energy))),
        "coeff_consistency_max": float(np.max(np.abs(step_matrix - coeff))),
        "energy_bookkeeping_gap": float(np.max(np.abs(np.asarray(trace) - bookkept))),
        "step_coeffs": step_matrix,
    }
    return EnsembleDecomposition(
        kind="safd2",
        params=np.asarray(params, dtype=np.complex128),
        coeff_matrix=coeff,
        residual_energy=np.asarray(trace),
        weights=e.weights,
        tm=tm,
        diagnostics=diagnostics,
    )


def spoafd_decompose(
    e,
    dic: Dictionary,
    n_iter: int,
    rho: float = 1.0,
    weights=None,
    stop_tol: float = STOP_TOL,
) -> EnsembleDecomposition:
    """Weighted pre-orthogonalized pursuit of an ensemble over a dictionary.

    Accepts an Ensemble (weights taken from it) or a sequence of ambient
    vectors with optional weights (uniform by default).  The scan maximizes
    sum_w p_w |<G_w, B^q>|^2 with the same candidate machinery as the
    deterministic pursuit: multiple-kernel substitution on repeats when
    rho = 1, weak selection without repeats when rho < 1.
    """
    if n_iter < 1:
        raise ValueError(f"n_iter must be at least 1, got {n_iter}")
    if isinstance(e, Ensemble):
        if weights is not None:
            raise ValueError("weights come from the ensemble; do not pass both")
        cols = [dic.embed(e.realization(w)) for w in range(e.count)]
        probs = e.weights
    else:
        cols = [dic.embed(v) for v in e]
        if not cols:
            raise ValueError("ensemble needs at least one realization")
        if weights is None:
            probs = np.full(len(cols), 1.0 / len(cols))
        else:
            probs = np.array(weights, dtype=float)
            if probs.shape != (len(cols),):
                raise ValueError(f"expected {len(cols)} weights, got shape {probs.shape}")
            if np.any(probs < 0.0) or abs(float(np.sum(probs)) - 1.0) > WEIGHT_TOL:
                raise ValueError("weights must be non-negative and sum to 1")
    fmat = np.column_stack(cols)
    resid = fmat.copy()
    basis = np.zeros((fmat.shape[0], 0), dtype=np.complex128)
    energies = dic.weight * np.sum(np.abs(fmat) ** 2, axis=0)
    ee0 = float(energies @ probs)
    indices: list[int] = []
    orders: list[int] = []
    coeff_cols: list[np.ndarray] = []
    trace = [ee0]
    phase_hook = getattr(dic, "coeff_phase", None)
    for _ in range(n_iter):
        if rho == 1.0:
            idx, order, bvec = pomsp_select(dic, resid, basis, indices, probs=probs)
        else:
            idx, order, bvec = weak_select(dic, resid, basis, indices, rho, probs=probs)
        if phase_hook is not None:
            bvec = bvec * phase_hook(idx, [dic.params[i] for i in indices])
        col = np.array([dic.inner(fmat[:, w], bvec) for w in range(fmat.shape[1])])
        basis = np.concatenate([basis, bvec[:, None]], axis=1)
        indices.append(idx)
        orders.append(order)
        coeff_cols.append(col)
        resid = resid - bvec[:, None] * col[None, :]
        trace.append(trace[-1] - float((np.abs(col) ** 2) @ probs))
        if trace[-1] <= stop_tol * ee0:
            break
    idx_arr = np.asarray(indices, dtype=int)
    return EnsembleDecomposition(
        kind="spoafd",
        params=dic.params[idx_arr].copy(),
        coeff_matrix=np.column_stack(coeff_cols),
        residual_energy=np.asarray(trace),
        weights=probs,
        basis=basis,
        orders=np.asarray(orders, dtype=int),
        param_indices=idx_arr,
        diagnostics={},
    )


def sbvc_probe(e: Ensemble, radii, n_angles: int = 128) -> dict:
    """Boundary decay of the selection objective along circles |a| = r.

    For each radius, reports the max over n_angles angles of
    E_w |<f_w, e_a>|^2 = E_w (1 - r^2) |f_w(a)|^2 together with the bound
    (1 - r^2) E_w (sum_k |c_k(w)|)^2, which forces the objective to vanish
    toward the rim.  Each row passes when measured <= bound + 1e-10.
    """
    acoeffs = _analytic_rows(e, "sbvc_probe")
    radii = np.asarray([float(r) for r in radii])
    if radii.size == 0:
        raise ValueError("radii must be non-empty")
    if np.any(radii < 0.0) or np.any(radii >= 1.0):
        raise ValueError("radii must lie in [0, 1)")
    if n_angles < 1:
        raise ValueError(f"n_angles must be at least 1, got {n_angles}")
    coeff_sums = np.sum(np.abs(acoeffs), axis=1)
    bound_constant = float(e.weights @ coeff_sums**2)
    angles = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    measured = np.empty(radii.size)
    bounds = np.empty(radii.size)
    for i, r in enumerate(radii):
        points = r * angles
        vander = np.vander(points, acoeffs.shape[1], increasing=True)
        vals = acoeffs @ vander.T
        expected = e.weights @ (np.abs(vals) ** 2)
        measured[i] = (1.0 - r * r) * float(np.max(expected))
        bounds[i] = (1.0 - r * r) * bound_constant
    passed = measured <= bounds + 1e-10
    return {
        "radii": radii,
        "measured": measured,
        "bound": bounds,
        "passed": passed,
        "bound_constant": bound_constant,
        "n_angles": n_angles,
        "all_passed": bool(np.all(passed)),
    }
