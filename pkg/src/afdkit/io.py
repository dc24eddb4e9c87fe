"""Run configuration, file formats, and the mode dispatcher behind the CLI.

File formats
------------
Signal/ensemble CSV: one row per realization, comma-separated values that are
real ("0.25") or complex ("0.1+0.3i"); an optional leading cell "weight:p"
per row (all rows or none) carries non-uniform weights, normalized with a
warning when they do not sum to one.  Dictionary CSV: one row per atom.

Every run emits a JSON document embedding a verification block; numeric
values round-trip at full precision (repr floats, complex as [re, im]).  The
document echoes only the numeric configuration, never file paths, so two
runs with the same data and seed are byte-identical wherever they write.
Decomposition runs add a residual-curve CSV next to the JSON output, other
modes write their natural delimited companion, and a figures directory can
be requested to render the same report graphically.

Exit codes: 0 all checks passed, 1 input/configuration error, 2 at least one
verification check failed (the document is still written).
"""

from __future__ import annotations

import json
import os
import sys
import warnings
from dataclasses import dataclass, fields

import numpy as np

from . import figures
from .afd import afd_decompose
from .circle import (
    CircleSignal,
    analytic_leakage,
    analytic_projection,
    hilbert_transform,
    sample_points,
    to_spectrum,
)
from .dictionaries import MatrixDictionary, SzegoDictionary
from .poafd import appendix_equivalence, poafd_decompose
from .stochastic import (
    Ensemble,
    commute_check,
    ee_norm,
    safd1_decompose,
    safd2_decompose,
    sbvc_probe,
    spoafd_decompose,
)
from .szego import DiscGrid, tm_system

__all__ = [
    "MODES",
    "InputError",
    "RunConfig",
    "load_config",
    "ingest",
    "generate_noisy",
    "run",
]

MODES = ("afd", "poafd", "safd1", "safd2", "spoafd", "hilbert", "verify-appendix", "probe-sbvc")

DEFAULT_RADII = (0.5, 0.8, 0.9, 0.95, 0.99)


class InputError(Exception):
    """Bad input data or configuration; maps to exit code 1."""


@dataclass
class RunConfig:
    """Settings for one run; flags, config file, and defaults merge 1:1.

    n is the circle grid size; r, a, r_max shape the selection grid
    (r radii up to r_max, a angles per radius); sigma and noise_w control
    synthetic white-noise ensembles on top of the input (or of zero when no
    input is given); params feeds verify-appendix; radii and n_angles feed
    probe-sbvc; dictionary selects a matrix-dictionary file for the pursuit
    modes.  input/output/figures are file-system locations and are never
    echoed into result documents.
    """

    mode: str
    n: int = 256
    r: int = 64
    a: int = 128
    r_max: float = 0.998
    n_iter: int = 20
    rho: float = 1.0
    seed: int = 0
    sigma: float = 0.0
    noise_w: int = 1
    params: list | None = None
    radii: list | None = None
    n_angles: int = 128
    input: str | None = None
    output: str | None = None
    figures: str | None = None
    dictionary: str | None = None

    @classmethod
    def from_sources(cls, mode: str, file_cfg: dict | None = None, flag_cfg: dict | None = None) -> "RunConfig":
        """Defaults, overridden by config-file fields, overridden by flags."""
        known = {f.name for f in fields(cls)} - {"mode"}
        merged: dict = {}
        for source, tag in ((file_cfg, "config file"), (flag_cfg, "flag")):
            if not source:
                continue
            for key, value in source.items():
                if key == "mode":
                    continue
                if key not in known:
                    raise InputError(f"unknown {tag} field {key!r}")
                if value is not None:
                    merged[key] = value
        config = cls(mode=mode, **merged)
        config.validate()
        return config

    def validate(self) -> None:
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.n % 2 != 0 or self.n < 4:
            raise InputError(f"n must be an even integer >= 4, got {self.n}")
        if self.r < 1 or self.a < 1:
            raise InputError(f"grid counts must be positive, got r={self.r}, a={self.a}")
        if not 0.0 < self.r_max < 1.0:
            raise InputError(f"r_max must lie in (0, 1), got {self.r_max}")
        if self.n_iter < 1:
            raise InputError(f"n_iter must be at least 1, got {self.n_iter}")
        if not 0.0 < self.rho <= 1.0:
            raise InputError(f"rho must lie in (0, 1], got {self.rho}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.sigma < 0.0:
            raise InputError(f"sigma must be non-negative, got {self.sigma}")
        if self.noise_w < 1:
            raise InputError(f"noise_w must be at least 1, got {self.noise_w}")
        if self.n_angles < 1:
            raise InputError(f"n_angles must be at least 1, got {self.n_angles}")
        if self.radii is not None:
            for value in self.radii:
                v = float(value)
                if not 0.0 <= v < 1.0:
                    raise InputError(f"probe radii must lie in [0, 1), got {v}")

    def grid(self) -> DiscGrid:
        return DiscGrid.make(self.r, self.a, self.r_max)

    def public_items(self) -> dict:
        """Configuration echo for documents: everything except file paths."""
        skip = {"input", "output", "figures", "dictionary"}
        out = {}
        for f in fields(self):
            if f.name in skip:
                continue
            value = getattr(self, f.name)
            if f.name == "params" and value is not None:
                value = [_c2p(parse_param(p)) for p in value]
            elif f.name == "radii" and value is not None:
                value = [float(v) for v in value]
            out[f.name] = value
        return out


def load_config(path: str) -> dict:
    """Read a JSON config file into a flat mapping of RunConfig fields."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"config file {path} must hold a JSON object")
    return data


def _parse_cell(text: str) -> complex:
    """One CSV cell: real or complex with an i (or j) imaginary unit."""
    cleaned = text.strip().replace(" ", "")
    if not cleaned:
        raise ValueError("empty cell")
    try:
        value = complex(cleaned.replace("i", "j"))
    except ValueError:
        raise ValueError(f"cannot parse {text.strip()!r} as a number") from None
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise ValueError(f"non-finite value {text.strip()!r}")
    return value


def parse_param(value) -> complex:
    """Disc parameter from a string token, number, or (re, im) pair."""
    if isinstance(value, str):
        return _parse_cell(value)
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InputError(f"parameter pairs need exactly two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex)):
        return complex(value)
    raise InputError(f"cannot interpret {value!r} as a disc parameter")


def _read_rows(path: str) -> tuple[np.ndarray, np.ndarray | None]:
    """CSV rows as a complex matrix plus optional per-row weights."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    rows: list[list[complex]] = []
    weights: list[float] = []
    has_weights: bool | None = None
    width: int | None = None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = stripped.split(",")
        row_weighted = cells[0].strip().lower().startswith("weight:")
        if has_weights is None:
            has_weights = row_weighted
        elif row_weighted != has_weights:
            raise InputError(
                f"{path} row {lineno}: weight prefixes must appear on every row or none"
            )
        if row_weighted:
            token = cells[0].strip()[len("weight:"):]
            try:
                w = float(token)
            except ValueError:
                raise InputError(f"{path} row {lineno}: cannot parse weight {token!r}") from None
            if not np.isfinite(w) or w < 0.0:
                raise InputError(f"{path} row {lineno}: weights must be finite and non-negative")
            weights.append(w)
            cells = cells[1:]
        values = []
        for col, cell in enumerate(cells, start=2 if row_weighted else 1):
            try:
                values.append(_parse_cell(cell))
            except ValueError as exc:
                raise InputError(f"{path} row {lineno}, column {col}: {exc}") from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise InputError(
                f"{path} row {lineno} has {len(values)} values, expected {width} (from the first row)"
            )
        rows.append(values)
    if not rows:
        raise InputError(f"{path} holds no data rows")
    matrix = np.asarray(rows, dtype=np.complex128)
    return matrix, (np.asarray(weights) if has_weights else None)


def ingest(path: str):
    """Load a CSV as a CircleSignal (single plain row) or weighted Ensemble."""
    matrix, weights = _read_rows(path)
    try:
        if weights is None:
            if matrix.shape[0] == 1:
                return CircleSignal(matrix[0])
            return Ensemble(matrix)
        total = float(np.sum(weights))
        if total <= 0.0:
            raise InputError(f"{path}: weights sum to {total}; nothing to weight")
        if abs(total - 1.0) > 1e-12:
            warnings.warn(f"{path}: weights sum to {total:.17g}; normalizing", stacklevel=2)
            weights = weights / total
        return Ensemble(matrix, weights)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def generate_noisy(base: CircleSignal, sigma: float, count: int, seed: int) -> Ensemble:
    """Uniform ensemble of base plus i.i.d. real Gaussian noise, N(0, sigma^2).

    Draws come from the counter-based Philox generator, so a fixed seed gives
    bitwise-identical ensembles across platforms and runs.  The model keeps
    the unpaired Nyquist bin of real signals empty, so that component of the
    noise is projected out (per-sample variance sigma^2 (1 - 1/n)).
    """
    if sigma < 0.0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    rng = np.random.Generator(np.random.Philox(seed))
    noise = rng.normal(0.0, sigma, size=(count, base.n))
    alternating = np.where(np.arange(base.n) % 2 == 0, 1.0, -1.0)
    nyquist = (noise @ alternating) / base.n
    noise = noise - nyquist[:, None] * alternating[None, :]
    return Ensemble(base.samples[None, :] + noise, label="synthetic")


def _c2p(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _cvec(arr) -> list[list[float]]:
    return [_c2p(complex(z)) for z in np.asarray(arr).ravel()] if np.asarray(arr).ndim == 1 else [
        [_c2p(complex(z)) for z in row] for row in np.asarray(arr)
    ]


def _fvec(arr) -> list[float]:
    return [float(x) for x in np.asarray(arr, dtype=float).ravel()]


def _check(name: str, value: float, tolerance: float) -> dict:
    value = float(value)
    return {"name": name, "value": value, "tolerance": float(tolerance), "passed": bool(value <= tolerance)}


def _prep_signal(sig: CircleSignal) -> tuple[CircleSignal, list[dict], dict]:
    """Analytic lift of an input signal plus the checks it generates."""
    checks = []
    info: dict = {"real_input": bool(sig.is_real())}
    if info["real_input"]:
        c0 = complex(to_spectrum(sig)[0])
        plus = analytic_projection(sig)
        back = 2.0 * np.real(plus.samples) - c0.real
        checks.append(_check("real_roundtrip", float(np.max(np.abs(back - sig.samples))), 1e-12))
        info["c0"] = c0
        sig = plus
        info["analytic_coeffs"] = to_spectrum(sig).analytic_coeffs()
    else:
        leak = analytic_leakage(sig)
        if leak > 1e-10:
            raise InputError(
                f"complex input must be analytic: negative-frequency leakage {leak:.3e} "
                "(provide real samples to have the analytic part taken automatically)"
            )
    checks.append(_check("analytic_leakage", analytic_leakage(sig), 1e-10))
    return sig, checks, info


def _prep_ensemble(e: Ensemble) -> tuple[Ensemble, list[dict], dict]:
    """Per-realization analytic lift of an ensemble plus its checks."""
    checks = []
    info: dict = {"real_input": bool(e.is_real())}
    n = e.n
    half = n // 2
    spec = np.fft.fftshift(np.fft.fft(e.samples, axis=1), axes=1) / n
    if info["real_input"]:
        c0 = spec[:, half].copy()
        plus_spec = spec.copy()
        plus_spec[:, :half] = 0.0
        plus = np.fft.ifft(np.fft.ifftshift(plus_spec, axes=1), axis=1) * n
        back = 2.0 * np.real(plus) - c0.real[:, None]
        checks.append(_check("real_roundtrip", float(np.max(np.abs(back - e.samples))), 1e-12))
        out = Ensemble(plus, e.weights, e.label)
        info["analytic_coeffs"] = e.weights @ plus_spec[:, half:]
        leak = 0.0
    else:
        neg = np.sum(np.abs(spec[:, :half]) ** 2, axis=1)
        total = np.sum(np.abs(spec) ** 2, axis=1)
        live = total > 0.0
        leak = float(np.max(np.sqrt(neg[live] / total[live]))) if np.any(live) else 0.0
        if leak > 1e-10:
            raise InputError(
                f"complex ensemble must be analytic: worst negative-frequency leakage {leak:.3e} "
                "(provide real samples to have the analytic part taken automatically)"
            )
        out = e
    checks.append(_check("analytic_leakage", leak, 1e-10))
    return out, checks, info


def _record_real(results: dict, info: dict) -> None:
    """Echo the analytic lift of real input into the result block."""
    if info.get("real_input") and "analytic_coeffs" in info:
        results["analytic_coeffs"] = _cvec(info["analytic_coeffs"])


def _as_signal(obj, what: str) -> CircleSignal:
    if isinstance(obj, CircleSignal):
        return obj
    if obj.count == 1:
        return obj.realization(0)
    raise InputError(f"{what} needs a single-realization input, got {obj.count} rows")


def _load_signal(config: RunConfig) -> CircleSignal:
    """Deterministic input: one CSV row, optionally with one noise draw."""
    base = None
    if config.input:
        base = _as_signal(ingest(config.input), f"mode {config.mode}")
        if base.n != config.n:
            raise InputError(
                f"input width {base.n} differs from configured n = {config.n}; pass a matching --n"
            )
    if config.sigma > 0.0:
        if config.noise_w != 1:
            raise InputError(f"mode {config.mode} is deterministic; noise_w must be 1")
        if base is None:
            base = CircleSignal(np.zeros(config.n))
        return generate_noisy(base, config.sigma, 1, config.seed).realization(0)
    if base is None:
        raise InputError(f"mode {config.mode} needs --input (or --sigma for synthetic noise)")
    return base


def _load_ensemble(config: RunConfig) -> Ensemble:
    """Ensemble input: CSV rows, or noise draws around a base (zero default)."""
    loaded = ingest(config.input) if config.input else None
    if loaded is not None and (
        isinstance(loaded, Ensemble) and loaded.count > 1
    ):
        if config.sigma > 0.0:
            raise InputError("cannot add synthetic noise to a multi-row ensemble input")
        ensemble = loaded
    elif config.sigma > 0.0:
        base = _as_signal(loaded, "noise base") if loaded is not None else CircleSignal(np.zeros(config.n))
        if config.input and base.n != config.n:
            raise InputError(
                f"input width {base.n} differs from configured n = {config.n}; pass a matching --n"
            )
        ensemble = generate_noisy(base, config.sigma, config.noise_w, config.seed)
    elif loaded is not None:
        sig = _as_signal(loaded, "ensemble input")
        ensemble = Ensemble(sig.samples[None, :])
    else:
        raise InputError(f"mode {config.mode} needs --input rows or --sigma/--noise-w for synthesis")
    if ensemble.n != config.n:
        raise InputError(
            f"input width {ensemble.n} differs from configured n = {config.n}; pass a matching --n"
        )
    return ensemble


def _reconstruction_artifact(config: RunConfig, reference: CircleSignal, recon: CircleSignal, info: dict):
    t = sample_points(config.n)
    if info.get("real_input"):
        c0 = info["c0"]
        shown = 2.0 * np.real(recon.samples) - c0.real
        original = 2.0 * np.real(reference.samples) - c0.real
        return t, original, shown
    return t, reference.samples, recon.samples


def _mode_afd(config: RunConfig) -> tuple[dict, list[dict], dict]:
    f, checks, info = _prep_signal(_load_signal(config))
    grid = config.grid()
    dec = afd_decompose(f, grid, config.n_iter)
    tm = dec.tm
    actual = np.empty(dec.terms + 1)
    for m in range(dec.terms + 1):
        partial = dec.coeffs[:m] @ tm.basis[:m]
        actual[m] = float(np.mean(np.abs(f.samples - partial) ** 2))
    energy_residual = float(np.max(np.abs(dec.residual_energy - actual)))
    checks.append(_check("energy_identity", energy_residual, 1e-10 * (1.0 + f.energy())))
    checks.append(_check("coefficient_consistency", float(np.max(np.abs(dec.coeffs - tm.coeffs(f)))), 1e-8))
    checks.append(_check("gram_deviation", tm.gram_deviation(), 1e-8))
    results = {
        "terms": dec.terms,
        "input_energy": f.energy(),
        "params": _cvec(dec.params),
        "coeffs": _cvec(dec.coeffs),
        "residual_energy": _fvec(dec.residual_energy),
    }
    _record_real(results, info)
    recon = tm.synthesize(dec.coeffs)
    artifacts = {
        "trace": dec.residual_energy,
        "params": dec.params,
        "reconstruction": _reconstruction_artifact(config, f, recon, info),
    }
    return results, checks, artifacts


def _pursuit_bookkeeping(dic, fvec: np.ndarray, basis: np.ndarray, coeffs: np.ndarray, trace: np.ndarray) -> list[dict]:
    gram = dic.weight * (basis.conj().T @ basis)
    ortho = float(np.max(np.abs(gram - np.eye(basis.shape[1]))))
    resid = fvec - basis @ coeffs
    gap = abs(float(dic.norm_sq(resid)) - float(trace[-1]))
    return [
        _check("basis_orthonormality", ortho, 1e-8),
        _check("energy_bookkeeping", gap, 1e-8),
    ]


def _mode_poafd(config: RunConfig) -> tuple[dict, list[dict], dict]:
    if config.dictionary:
        atoms, _ = _read_rows(config.dictionary)
        dic = MatrixDictionary(atoms.T)
        rows, _ = _read_rows(config.input) if config.input else (None, None)
        if rows is None or rows.shape[0] != 1:
            raise InputError("poafd over a matrix dictionary needs a single-row --input")
        if rows.shape[1] != dic.dim:
            raise InputError(
                f"input width {rows.shape[1]} differs from dictionary dimension {dic.dim}"
            )
        fvec = rows[0]
        checks = []
        info = {"real_input": False}
        res = poafd_decompose(fvec, dic, config.n_iter, rho=config.rho)
        params_json = [int(p) for p in res.params]
        artifacts: dict = {"trace": res.residual_energy}
    else:
        f, checks, info = _prep_signal(_load_signal(config))
        dic = SzegoDictionary(config.grid(), config.n)
        fvec = dic.embed(f)
        res = poafd_decompose(f, dic, config.n_iter, rho=config.rho)
        tm = tm_system(list(res.params), config.n)
        checks.append(_check("system_consistency", float(np.max(np.abs(res.coeffs - tm.coeffs(f)))), 1e-6))
        params_json = _cvec(res.params)
        recon = dic.to_signal(res.basis @ res.coeffs)
        artifacts = {
            "trace": res.residual_energy,
            "params": res.params,
            "reconstruction": _reconstruction_artifact(config, f, recon, info),
        }
    checks.extend(_pursuit_bookkeeping(dic, fvec, res.basis, res.coeffs, res.residual_energy))
    results = {
        "terms": res.terms,
        "params": params_json,
        "orders": [int(o) for o in res.orders],
        "coeffs": _cvec(res.coeffs),
        "residual_energy": _fvec(res.residual_energy),
    }
    _record_real(results, info)
    return results, checks, artifacts


def _ensemble_results(dec) -> dict:
    return {
        "terms": dec.terms,
        "params": _cvec(dec.params),
        "weights": _fvec(dec.weights),
        "coeff_matrix": _cvec(dec.coeff_matrix),
        "residual_energy": _fvec(dec.residual_energy),
    }


def _mode_safd1(config: RunConfig) -> tuple[dict, list[dict], dict]:
    raw = _load_ensemble(config)
    commute = commute_check(raw)
    e, checks, info = _prep_ensemble(raw)
    dec = safd1_decompose(e, config.grid(), config.n_iter)
    d = dec.diagnostics
    checks.append(_check("commutation", commute, 1e-12))
    checks.append(_check("mean_deviation", d["mean_deviation_max"], 1e-10))
    checks.append(_check("pythagoras_split", d["pythagoras_residual"], 1e-8))
    checks.append(_check("deviation_energy", d["deviation_energy_residual"], 1e-8))
    checks.append(_check("gram_deviation", dec.tm.gram_deviation(), 1e-8))
    col_energy = dec.weights @ (np.abs(dec.coeff_matrix) ** 2)
    bookkeeping = abs(dec.residual_energy[0] - (float(np.sum(col_energy)) + dec.residual_energy[-1]))
    checks.append(_check("energy_bookkeeping", bookkeeping, 1e-8))
    results = _ensemble_results(dec)
    results["ee_norm"] = ee_norm(e)
    results["mean_coeffs"] = _cvec(d["mean_coeffs"])
    results["difference_norms"] = _fvec(dec.difference_norms)
    results["mean_projection_tail"] = float(d["mean_projection_tail"])
    _record_real(results, info)
    mean = e.weights @ e.samples
    recon = dec.tm.synthesize(dec.weights @ dec.coeff_matrix)
    artifacts = {
        "trace": dec.residual_energy,
        "params": dec.params,
        "reconstruction": _reconstruction_artifact(config, CircleSignal(mean), recon, _mean_info(info, raw)),
    }
    return results, checks, artifacts


def _mean_info(info: dict, raw: Ensemble) -> dict:
    if not info.get("real_input"):
        return info
    mean = raw.weights @ raw.samples
    return {"real_input": True, "c0": complex(np.mean(mean))}


def _mode_safd2(config: RunConfig) -> tuple[dict, list[dict], dict]:
    raw = _load_ensemble(config)
    commute = commute_check(raw)
    e, checks, info = _prep_ensemble(raw)
    dec = safd2_decompose(e, config.grid(), config.n_iter)
    d = dec.diagnostics
    trace = dec.residual_energy
    worst_rise = float(np.max(np.diff(trace))) if trace.size > 1 else 0.0
    checks.append(_check("commutation", commute, 1e-12))
    checks.append(_check("monotonicity", worst_rise, 1e-12 * (1.0 + trace[0])))
    checks.append(_check("projection_energy", d["projection_energy_residual"], 1e-8))
    checks.append(_check("coefficient_consistency", d["coeff_consistency_max"], 1e-8))
    checks.append(_check("gram_deviation", dec.tm.gram_deviation(), 1e-8))
    results = _ensemble_results(dec)
    results["ee_norm"] = ee_norm(e)
    _record_real(results, info)
    mean = e.weights @ e.samples
    recon = dec.tm.synthesize(dec.weights @ dec.coeff_matrix)
    artifacts = {
        "trace": trace,
        "params": dec.params,
        "reconstruction": _reconstruction_artifact(config, CircleSignal(mean), recon, _mean_info(info, raw)),
    }
    return results, checks, artifacts


def _mode_spoafd(config: RunConfig) -> tuple[dict, list[dict], dict]:
    if config.dictionary:
        atoms, _ = _read_rows(config.dictionary)
        dic = MatrixDictionary(atoms.T)
        if not config.input:
            raise InputError("spoafd over a matrix dictionary needs --input rows")
        rows, weights = _read_rows(config.input)
        if rows.shape[1] != dic.dim:
            raise InputError(
                f"input width {rows.shape[1]} differs from dictionary dimension {dic.dim}"
            )
        if weights is not None:
            total = float(np.sum(weights))
            if total <= 0.0:
                raise InputError(f"{config.input}: weights sum to {total}; nothing to weight")
            if abs(total - 1.0) > 1e-12:
                warnings.warn(f"{config.input}: weights sum to {total:.17g}; normalizing", stacklevel=2)
                weights = weights / total
        checks: list[dict] = []
        dec = spoafd_decompose(list(rows), dic, config.n_iter, rho=config.rho, weights=weights)
        fmat = rows.T
        params_json = [int(p) for p in dec.params]
        artifacts: dict = {"trace": dec.residual_energy}
    else:
        raw = _load_ensemble(config)
        e, checks, info = _prep_ensemble(raw)
        checks.append(_check("commutation", commute_check(raw), 1e-12))
        dic = SzegoDictionary(config.grid(), config.n)
        dec = spoafd_decompose(e, dic, config.n_iter, rho=config.rho)
        fmat = np.column_stack([dic.embed(e.realization(w)) for w in range(e.count)])
        params_json = _cvec(dec.params)
        mean = e.weights @ e.samples
        recon = dic.to_signal(dec.basis @ (dec.weights @ dec.coeff_matrix))
        artifacts = {
            "trace": dec.residual_energy,
            "params": dec.params,
            "reconstruction": _reconstruction_artifact(config, CircleSignal(mean), recon, _mean_info(info, raw)),
        }
    gram = dic.weight * (dec.basis.conj().T @ dec.basis)
    checks.append(_check("basis_orthonormality", float(np.max(np.abs(gram - np.eye(dec.terms)))), 1e-8))
    resid = fmat - dec.basis @ dec.coeff_matrix.T
    actual = float((dic.weight * np.sum(np.abs(resid) ** 2, axis=0)) @ dec.weights)
    checks.append(_check("energy_bookkeeping", abs(actual - float(dec.residual_energy[-1])), 1e-8))
    results = {
        "terms": dec.terms,
        "params": params_json,
        "orders": [int(o) for o in dec.orders],
        "weights": _fvec(dec.weights),
        "coeff_matrix": _cvec(dec.coeff_matrix),
        "residual_energy": _fvec(dec.residual_energy),
    }
    if not config.dictionary:
        _record_real(results, info)
    return results, checks, artifacts


def _mode_hilbert(config: RunConfig) -> tuple[dict, list[dict], dict]:
    sig = _load_signal(config)
    h = hilbert_transform(sig)
    c0 = complex(to_spectrum(sig)[0])
    twice = hilbert_transform(h)
    involution = float(np.max(np.abs(twice.samples + (sig.samples - c0))))
    checks = [
        _check("involution", involution, 1e-12 * (1.0 + float(np.max(np.abs(sig.samples))))),
        _check("zero_mean_output", abs(complex(to_spectrum(h)[0])), 1e-12),
    ]
    if sig.is_real():
        checks.append(_check("real_output", float(np.max(np.abs(h.samples.imag))), 1e-12))
    results = {
        "mean": _c2p(c0),
        "output": _cvec(h.samples),
    }
    artifacts = {"signal_pair": (sample_points(config.n), sig.samples, h.samples)}
    return results, checks, artifacts


def _mode_verify_appendix(config: RunConfig) -> tuple[dict, list[dict], dict]:
    if not config.params:
        raise InputError("verify-appendix needs --params, e.g. --params 0.5,0.5")
    try:
        params = [parse_param(p) for p in config.params]
        report = appendix_equivalence(params, config.n)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    checks = [
        _check("alignment", report["max_alignment_deviation"], 1e-6),
        _check("projection_identity", report["max_probe_residual"], 1e-8),
        _check("gram_deviation", report["tm_gram_deviation"], 1e-8),
    ]
    results = {
        "params": _cvec(report["params"]),
        "alignments": _cvec(report["alignments"]),
        "max_alignment_deviation": report["max_alignment_deviation"],
        "probe_points": _cvec(report["probe_points"]),
        "probe_residuals": _fvec(report["probe_residuals"]),
        "max_probe_residual": report["max_probe_residual"],
    }
    deviations = np.abs(1.0 - np.abs(np.asarray(report["alignments"])))
    artifacts = {"alignment": (np.asarray(report["alignments"]), deviations)}
    return results, checks, artifacts


def _mode_probe_sbvc(config: RunConfig) -> tuple[dict, list[dict], dict]:
    raw = _load_ensemble(config)
    e, checks, info = _prep_ensemble(raw)
    radii = [float(v) for v in config.radii] if config.radii else list(DEFAULT_RADII)
    report = sbvc_probe(e, radii, config.n_angles)
    margin = float(np.max(report["measured"] - report["bound"]))
    checks.append(_check("boundary_bound", margin, 1e-10))
    results = {
        "radii": _fvec(report["radii"]),
        "measured": _fvec(report["measured"]),
        "bound": _fvec(report["bound"]),
        "bound_constant": report["bound_constant"],
        "n_angles": report["n_angles"],
    }
    _record_real(results, info)
    artifacts = {"decay": (report["radii"], report["measured"], report["bound"])}
    return results, checks, artifacts


_HANDLERS = {
    "afd": _mode_afd,
    "poafd": _mode_poafd,
    "safd1": _mode_safd1,
    "safd2": _mode_safd2,
    "spoafd": _mode_spoafd,
    "hilbert": _mode_hilbert,
    "verify-appendix": _mode_verify_appendix,
    "probe-sbvc": _mode_probe_sbvc,
}


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_lines(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_companions(base: str, artifacts: dict) -> list[str]:
    written = []
    if "trace" in artifacts:
        path = base + "_residual.csv"
        trace = np.asarray(artifacts["trace"], dtype=float)
        _write_lines(path, "step,residual_energy", ([str(k), _fmt(v)] for k, v in enumerate(trace)))
        written.append(path)
    if "signal_pair" in artifacts:
        t, fin, fout = artifacts["signal_pair"]
        path = base + "_samples.csv"
        rows = (
            [str(j), _fmt(t[j]), _fmt(fin[j].real), _fmt(fin[j].imag), _fmt(fout[j].real), _fmt(fout[j].imag)]
            for j in range(len(t))
        )
        _write_lines(path, "index,t,input_re,input_im,output_re,output_im", rows)
        written.append(path)
    if "decay" in artifacts:
        radii, measured, bound = artifacts["decay"]
        path = base + "_decay.csv"
        rows = ([_fmt(r), _fmt(m), _fmt(b)] for r, m, b in zip(radii, measured, bound))
        _write_lines(path, "radius,measured,bound", rows)
        written.append(path)
    if "alignment" in artifacts:
        alignments, deviations = artifacts["alignment"]
        path = base + "_alignment.csv"
        rows = (
            [str(k + 1), _fmt(al.real), _fmt(al.imag), _fmt(dev)]
            for k, (al, dev) in enumerate(zip(alignments, deviations))
        )
        _write_lines(path, "term,alignment_re,alignment_im,abs_deviation", rows)
        written.append(path)
    return written


def _render_figures(mode: str, config: RunConfig, artifacts: dict, outdir: str) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    paths = []
    stem = os.path.join(outdir, mode.replace("-", "_"))
    if "trace" in artifacts:
        paths.append(figures.save_residual_curve(artifacts["trace"], stem + "_residual.png"))
    if "params" in artifacts and np.asarray(artifacts["params"]).size:
        paths.append(figures.save_parameter_disc(artifacts["params"], config.r_max, stem + "_parameters.png"))
    if "reconstruction" in artifacts:
        t, original, recon = artifacts["reconstruction"]
        paths.append(figures.save_reconstruction(t, original, recon, stem + "_reconstruction.png"))
    if "signal_pair" in artifacts:
        t, fin, fout = artifacts["signal_pair"]
        paths.append(figures.save_signal_pair(t, fin, fout, stem + "_transform.png"))
    if "decay" in artifacts:
        radii, measured, bound = artifacts["decay"]
        paths.append(figures.save_decay(radii, measured, bound, stem + "_decay.png"))
    if "alignment" in artifacts:
        _, deviations = artifacts["alignment"]
        paths.append(figures.save_alignment(deviations, stem + "_alignment.png"))
    return paths


def run(config: RunConfig) -> tuple[dict, int]:
    """Dispatch one configured run; write outputs; return (document, exit code).

    The JSON document goes to config.output (stdout when unset, in which case
    delimited companions are skipped); figures render into config.figures
    when given.  Exit code 0 means every verification check passed, 2 means
    at least one failed; input problems raise InputError for the caller to
    map to exit code 1.
    """
    config.validate()
    handler = _HANDLERS[config.mode]
    results, checks, artifacts = handler(config)
    document = {
        "mode": config.mode,
        "config": config.public_items(),
        "results": results,
        "verification": {
            "checks": checks,
            "all_passed": bool(all(c["passed"] for c in checks)),
        },
    }
    text = json.dumps(document, indent=2, allow_nan=False) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        base = config.output[:-5] if config.output.endswith(".json") else config.output
        _write_companions(base, artifacts)
    else:
        sys.stdout.write(text)
    if config.figures:
        _render_figures(config.mode, config, artifacts, config.figures)
    return document, (0 if document["verification"]["all_passed"] else 2)
