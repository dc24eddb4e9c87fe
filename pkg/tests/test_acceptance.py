"""Acceptance checks: the numerical contracts the library is shipped against.

Each test is one criterion at its stated tolerance; pytest -v gives one
pass/fail line per criterion.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from afdkit import (
    CircleSignal,
    DiscGrid,
    Ensemble,
    SzegoDictionary,
    afd_decompose,
    analytic_projection,
    appendix_equivalence,
    autocorrelation,
    commute_check,
    generate_noisy,
    inner_product,
    poafd_decompose,
    remainder_ensemble,
    safd1_decompose,
    safd2_decompose,
    sample_points,
    sbvc_probe,
    spoafd_decompose,
    stationarity_score,
    szego_eval,
    to_spectrum,
)
from conftest import analytic_ensemble, random_analytic

N = 256
T = sample_points(N)
GRID = DiscGrid.make(10, 16, 0.9)


def noisy_ensemble(rng, sigma, count, seed, weighted=True):
    """Analytic lift of a random smooth base plus white noise."""
    base = random_analytic(rng, N, degree=24)
    raw = generate_noisy(CircleSignal(base.samples.real), sigma, count, seed)
    rows = raw.samples + base.samples[None, :] - base.samples.real[None, :]
    if weighted:
        w = rng.uniform(0.5, 1.5, size=count)
        return analytic_ensemble(Ensemble(rows, w / w.sum()))
    return analytic_ensemble(Ensemble(rows))


def test_reproducing_quadrature_exactness(rng):
    # criterion 1: kernel quadrature matches pointwise evaluation to 1e-10
    grid = DiscGrid.make(64, 128, 0.998)
    points = grid.points[rng.choice(grid.points.size, size=100, replace=False)]
    kernels = np.array([szego_eval(a, N).samples for a in points])
    worst = 0.0
    for _ in range(100):
        g = random_analytic(rng, N, degree=64)
        coeffs = to_spectrum(g).analytic_coeffs()[:64]
        quad = np.array([inner_product(g, CircleSignal(row)) for row in kernels])
        powers = points[:, None] ** np.arange(64)[None, :]
        closed = np.sqrt(1.0 - np.abs(points) ** 2) * (powers @ coeffs)
        worst = max(worst, float(np.max(np.abs(quad - closed))))
    assert worst <= 1e-10


def test_greedy_energy_conservation(rng):
    # criterion 2: input energy splits into coefficients plus final residual
    for _ in range(50):
        f = random_analytic(rng, N)
        dec = afd_decompose(f, GRID, 20)
        recon = dec.tm.synthesize(dec.coeffs)
        resid = float(np.mean(np.abs(f.samples - recon.samples) ** 2))
        gap = abs(f.energy() - float(np.sum(np.abs(dec.coeffs) ** 2)) - resid)
        assert gap <= 1e-10 * (1.0 + f.energy())


def test_coefficient_consistency(rng):
    # criterion 3: greedy coefficients equal direct projections onto the system
    for _ in range(20):
        f = random_analytic(rng, N)
        dec = afd_decompose(f, GRID, 10)
        assert float(np.max(np.abs(dec.coeffs - dec.tm.coeffs(f)))) <= 1e-8


def test_kernel_orthonormalization_equivalence(rng):
    # criterion 4: Gram-Schmidt of (repeated) kernels spans the rational system
    for _ in range(20):
        distinct = rng.integers(1, 4)
        params = []
        for _ in range(distinct):
            a = rng.uniform(0.0, 0.85) * np.exp(2j * np.pi * rng.uniform())
            params.extend([complex(a)] * int(rng.integers(1, 4)))
        report = appendix_equivalence(params, N)
        assert report["max_alignment_deviation"] <= 1e-6
        assert report["max_probe_residual"] <= 1e-8


def test_pursuit_rate_bound(rng):
    # criterion 5: residual norm after k terms is at most M / sqrt(k)
    dic = SzegoDictionary(DiscGrid.make(18, 24, 0.85), N)
    for _ in range(20):
        indices = rng.choice(dic.size, size=12, replace=False)
        amps = rng.uniform(0.1, 1.0, size=12) * np.exp(2j * np.pi * rng.uniform(size=12))
        fvec = np.zeros(dic.dim, dtype=np.complex128)
        for idx, c in zip(indices, amps):
            atom = dic.kernel(int(idx))
            fvec += c * atom / np.sqrt(dic.norm_sq(atom))
        m_total = float(np.sum(np.abs(amps)))
        res = poafd_decompose(fvec, dic, 30)
        for k in range(1, len(res.residual_energy)):
            assert np.sqrt(res.residual_energy[k]) <= m_total / np.sqrt(k) + 1e-8


def test_single_member_reduction_laws(rng):
    # criterion 6: the ensemble algorithms collapse to their one-signal forms
    dic = SzegoDictionary(GRID, N)
    for _ in range(5):
        f = random_analytic(rng, N)
        dec = afd_decompose(f, GRID, 8)

        shared = safd2_decompose(Ensemble(f.samples[None, :]), GRID, 8)
        assert np.array_equal(shared.params, dec.params)
        assert float(np.max(np.abs(shared.coeff_matrix[0] - dec.coeffs))) <= 1e-8

        single = poafd_decompose(f, dic, 8)
        assert np.array_equal(single.params, dec.params)
        assert float(np.max(np.abs(single.coeffs - dec.coeffs))) <= 1e-8

        pooled = spoafd_decompose([f], dic, 8)
        assert np.array_equal(pooled.param_indices, single.param_indices)
        assert float(np.max(np.abs(pooled.coeff_matrix[0] - single.coeffs))) <= 1e-8


def test_ensemble_deviation_identities(rng):
    # criterion 7: mean extraction, Pythagoras split, and deviation energy
    cases = [(s, w) for s in (0.01, 0.1, 0.5) for w in (10, 100, 500)]
    cases.append((0.1, 50))
    for seed, (sigma, count) in enumerate(cases):
        e = noisy_ensemble(rng, sigma, count, seed)
        dec = safd1_decompose(e, GRID, 6)
        d = dec.diagnostics
        assert d["mean_deviation_max"] <= 1e-10
        assert d["pythagoras_residual"] <= 1e-8
        assert d["deviation_energy_residual"] <= 1e-8


def test_shared_parameter_monotone_convergence(rng):
    # criterion 8: expected residual energy never rises, and a shared kernel
    # ensemble is annihilated in one step
    e = noisy_ensemble(rng, 0.2, 10, seed=31)
    dec = safd2_decompose(e, GRID, 30)
    trace = dec.residual_energy
    for k in range(1, len(trace)):
        assert trace[k] <= trace[k - 1] + 1e-15 * (1.0 + trace[0])

    kernel = szego_eval(0.5, N).samples
    rows = np.array([c * kernel for c in (1.0, -2.0, 0.5j)])
    null = safd2_decompose(Ensemble(rows), GRID, 3)
    assert float(null.residual_energy[1]) <= 1e-10


def test_boundary_objective_bound(rng):
    # criterion 9: expected boundary energy decays inside the coefficient
    # l1 bound, with the closed-form spot value at radius 0.99
    cos = CircleSignal(np.cos(T))
    single = Ensemble(analytic_projection(cos).samples[None, :])
    report = sbvc_probe(single, [0.5, 0.9, 0.99], 256)
    assert report["all_passed"]
    assert abs(report["measured"][-1] - 0.0048759975) <= 1e-6

    noisy = noisy_ensemble(rng, 0.1, 60, seed=12)
    assert sbvc_probe(noisy, [0.5, 0.8, 0.95], 128)["all_passed"]


def test_expectation_commutes_with_transform(rng):
    # criterion 10: the transform of the mean is the mean of the transforms
    for seed, (sigma, count) in enumerate([(0.1, 50), (0.5, 200), (0.05, 20)]):
        base = CircleSignal(np.cos(T) + 0.5 * np.sin(3 * T))
        raw = generate_noisy(base, sigma, count, seed)
        assert commute_check(raw) <= 1e-12


def test_monte_carlo_statistics():
    # criterion 11: sample moments of synthetic noise sit within Monte Carlo
    # bands, and the remainder autocovariance is circle-stationary
    sigma, count = 0.2, 2000
    e = generate_noisy(CircleSignal(np.zeros(N)), sigma, count, seed=21)
    gamma = autocorrelation(remainder_ensemble(e))
    target = sigma**2 * (1.0 - 1.0 / N)
    band = 5.0 * sigma**2 / np.sqrt(count)
    assert float(np.max(np.abs(np.diag(gamma) - target))) <= band
    off = gamma - np.diag(np.diag(gamma))
    assert float(np.max(np.abs(off))) <= band
    assert stationarity_score(gamma) <= 10.0 * sigma**2 / np.sqrt(count)


def test_cli_determinism(tmp_path):
    # criterion 12: identical configurations produce byte-identical reports
    flags = [
        "safd2", "--sigma", "0.05", "--noise-w", "8", "--seed", "7",
        "--r", "6", "--a", "12", "--r-max", "0.8", "--n-iter", "4",
    ]
    outputs = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        proc = subprocess.run(
            [sys.executable, "-m", "afdkit", *flags, "--output", str(out)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert json.loads(outputs[0])["verification"]["all_passed"] is True
