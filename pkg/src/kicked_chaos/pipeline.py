"""End-to-end runs: build U, diagonalize, evaluate observables, write files."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cache import DecompositionCache, cache_dir_from_env, cache_key
from .chain import floquet_operator
from .config import RunConfig
from .ensembles import EnsembleKind, sample
from .entanglement import EntropyCurve, EntropyPoint, page_value, state_entropies
from .heff import CoefficientSample, build_effective, coefficient_samples, variance_prediction
from .pauli import count_strings
from .reference import Histogram, ReferenceCurve, histogram, ks_distance, ratio_constants
from .spectral import (
    EigenDecomposition,
    RatioStats,
    diagonalize_symmetric_unitary,
    eigenvector_eta,
    log_eta,
    ratio_statistics,
    spacings,
)

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def realization_seed(base_seed: int, index: int) -> int:
    return (base_seed ^ splitmix64(index)) & _MASK64


def realization_rngs(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent streams for the matrix draw and for string sampling.

    Keeping them separate means a cached decomposition does not shift the
    string sample.
    """
    matrix_ss, strings_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(matrix_ss), np.random.default_rng(strings_ss)


@dataclass
class RunResult:
    config: RunConfig
    seeds: list[int]
    spacings: list[np.ndarray] = field(default_factory=list)
    ratios: list[RatioStats] = field(default_factory=list)
    pooled_ratios: RatioStats | None = None
    eta_hist: Histogram | None = None
    eta_log_hist: Histogram | None = None
    ks: dict = field(default_factory=dict)
    entropy: EntropyCurve | None = None
    coefficients: list[tuple[int, CoefficientSample]] = field(default_factory=list)
    files: dict[str, Path] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def coefficient_values(self, k: int) -> np.ndarray:
        return np.array([c.value for _, c in self.coefficients if c.k == k])


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_json(path: Path, payload) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _edges(lo, hi, count) -> np.ndarray:
    return np.linspace(lo, hi, int(count) + 1)


def _hist_rows(hist: Histogram, curve: ReferenceCurve):
    ref = curve.bin_density(hist.edges)
    for a, b, c, d, r in zip(hist.edges[:-1], hist.edges[1:], hist.counts, hist.density, ref):
        yield a, b, c, d, r


HIST_HEADER = ["bin_left", "bin_right", "count", "density", "reference_density"]


def write_references(directory: Path, N: int, bins=None) -> dict[str, Path]:
    """Tabulate every reference density as (x, density) CSV files."""
    from .config import Bins

    bins = bins or Bins()
    directory.mkdir(parents=True, exist_ok=True)
    files = {}
    x = np.linspace(bins.spacings[0], bins.spacings[1], 401)
    files["references/wigner_coe.csv"] = write_csv(
        directory / "wigner_coe.csv", ["x", "density"], zip(x, ReferenceCurve.wigner().pdf(x)))
    x = np.linspace(bins.eta[0], bins.eta[1], 401)[1:]
    files["references/porter_thomas.csv"] = write_csv(
        directory / "porter_thomas.csv", ["x", "density"], zip(x, ReferenceCurve.porter_thomas().pdf(x)))
    files["references/exponential_cue.csv"] = write_csv(
        directory / "exponential_cue.csv", ["x", "density"], zip(x, ReferenceCurve.exponential_cue().pdf(x)))
    x = np.linspace(bins.eta_log[0], bins.eta_log[1], 401)
    files["references/log_porter_thomas.csv"] = write_csv(
        directory / "log_porter_thomas.csv", ["x", "density"], zip(x, ReferenceCurve.log_porter_thomas().pdf(x)))
    for kind in EnsembleKind:
        var = variance_prediction(N, kind)
        half = bins.coefficients[0] * np.sqrt(variance_prediction(N, EnsembleKind.COE))
        x = np.linspace(-half, half, 401)
        name = f"coefficient_gaussian_{kind.value}.csv"
        files[f"references/{name}"] = write_csv(
            directory / name, ["x", "density"], zip(x, ReferenceCurve.gaussian(var).pdf(x)))
    L = N.bit_length() - 1
    if 1 << L == N and L >= 2:
        files["references/page_curve.csv"] = write_csv(
            directory / "page_curve.csv", ["L1", "page_value"],
            ((L1, page_value(2**L1, 2 ** (L - L1))) for L1 in range(1, L)))
    return files


class _Stages:
    def __init__(self):
        self.totals: dict[str, float] = {}

    @contextmanager
    def __call__(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.totals[name] = self.totals.get(name, 0.0) + time.perf_counter() - t0


def _decompose(config: RunConfig, seed: int, rng: np.random.Generator,
               cache: DecompositionCache, stage) -> EigenDecomposition:
    src = config.source
    key_seed = None if src.is_chain else seed
    key = cache_key(src.descriptor(), key_seed, config.cluster_tol)
    expect = {"N": src.dim, "source": src.descriptor(), "seed": key_seed, "cluster_tol": config.cluster_tol}
    cached = cache.load(key, expect)
    if cached is not None:
        log.info("using cached decomposition %s", key)
        return cached
    with stage("build"):
        U = floquet_operator(src.chain) if src.is_chain else sample(src.ensemble, src.N, rng)
    with stage("diagonalize"):
        decomp = diagonalize_symmetric_unitary(U, cluster_tol=config.cluster_tol)
    del U
    cache.store(key, decomp, {"source": src.descriptor(), "seed": key_seed, "cluster_tol": config.cluster_tol})
    return decomp


def decompose_realization(config: RunConfig, index: int, cache_dir: Path | None = None) -> EigenDecomposition:
    """Decomposition of one realization, honouring the seed scheme and cache."""
    seed = realization_seed(config.base_seed, index)
    matrix_rng, _ = realization_rngs(seed)
    return _decompose(config, seed, matrix_rng, DecompositionCache(cache_dir), _Stages())


def run(config: RunConfig, output: Path | None = None, cache_dir: Path | None = None,
        use_env_cache: bool = True) -> RunResult:
    """Run every requested observable and write the data files.

    Files are written to ``output`` (defaults to ``config.output``); a
    ``manifest.json`` lists each file with its SHA-256 together with the
    configuration digest, seeds and per-stage wall-clock times.
    """
    out = Path(output or config.output)
    out.mkdir(parents=True, exist_ok=True)
    if cache_dir is None and use_env_cache:
        cache_dir = cache_dir_from_env()
    cache = DecompositionCache(cache_dir)
    stage = _Stages()
    src = config.source
    N = src.dim
    L = N.bit_length() - 1
    obs = set(config.observables)
    seeds = [realization_seed(config.base_seed, i) for i in range(config.realizations)]
    result = RunResult(config=config, seeds=seeds)
    bins = config.bins

    eta_edges = _edges(*bins.eta)
    eta_log_edges = _edges(*bins.eta_log)
    entropies: list[list[np.ndarray]] = []
    ks = {"spacing_wigner": [], "eta_porter_thomas": [], "eta_log_porter_thomas": []}
    samples_per_order = {}
    for k in config.orders:
        available = count_strings(L, k, real_only=True) if "coefficients" in obs else 0
        n = min(config.samples_per_order, available)
        if "coefficients" in obs and n < config.samples_per_order:
            warnings.warn(
                f"only {available} real strings of order {k} exist on L = {L}; using all of them",
                RuntimeWarning, stacklevel=2)
        samples_per_order[k] = n

    for i, seed in enumerate(seeds):
        matrix_rng, strings_rng = realization_rngs(seed)
        decomp = _decompose(config, seed, matrix_rng, cache, stage)

        if obs & {"spacings", "ratios"}:
            with stage("spacings"):
                s = spacings(decomp)
                result.spacings.append(s.spacings)
                ks["spacing_wigner"].append(ks_distance(s.spacings, ReferenceCurve.wigner()))
                if "ratios" in obs:
                    result.ratios.append(ratio_statistics(s))
        if obs & {"evec", "evec-log"}:
            with stage("eigenvectors"):
                eta = eigenvector_eta(decomp)
                if "evec" in obs:
                    h = histogram(eta, eta_edges)
                    result.eta_hist = h if result.eta_hist is None else result.eta_hist + h
                    ks["eta_porter_thomas"].append(ks_distance(eta, ReferenceCurve.porter_thomas()))
                if "evec-log" in obs:
                    leta = log_eta(eta)
                    h = histogram(leta, eta_log_edges)
                    result.eta_log_hist = h if result.eta_log_hist is None else result.eta_log_hist + h
                    ks["eta_log_porter_thomas"].append(ks_distance(leta, ReferenceCurve.log_porter_thomas()))
                    del leta
                del eta
        if "entropy" in obs:
            with stage("entropy"):
                entropies.append([state_entropies(decomp.vectors, L1) for L1 in range(1, L)])
        if "coefficients" in obs:
            with stage("coefficients"):
                heff = build_effective(decomp)
                for k in config.orders:
                    for c in coefficient_samples(heff, k, samples_per_order[k], strings_rng):
                        result.coefficients.append((i, c))
                heff.release_dense()
        del decomp

    with stage("write"):
        files = result.files
        if "spacings" in obs:
            rows = ((i, n, v) for i, s in enumerate(result.spacings) for n, v in enumerate(s))
            files["spacings.csv"] = write_csv(out / "spacings.csv", ["realization", "n", "s"], rows)
            h = histogram(np.concatenate(result.spacings), _edges(*bins.spacings))
            files["spacings_hist.csv"] = write_csv(out / "spacings_hist.csv", HIST_HEADER,
                                                   _hist_rows(h, ReferenceCurve.wigner()))
        if "ratios" in obs:
            result.pooled_ratios = ratio_statistics_pooled(result.ratios)
            mean_r, mean_rt = ratio_constants()
            payload = {
                "pooled": result.pooled_ratios.as_dict(),
                "per_realization": [r.as_dict() for r in result.ratios],
                "coe_reference": {"mean_r": mean_r, "mean_r_tilde": mean_rt},
            }
            files["ratios.json"] = write_json(out / "ratios.json", payload)
        if "evec" in obs:
            files["eta.csv"] = write_csv(out / "eta.csv", HIST_HEADER,
                                         _hist_rows(result.eta_hist, ReferenceCurve.porter_thomas()))
        if "evec-log" in obs:
            files["eta_log.csv"] = write_csv(out / "eta_log.csv", HIST_HEADER,
                                             _hist_rows(result.eta_log_hist, ReferenceCurve.log_porter_thomas()))
        if "entropy" in obs:
            points = []
            for j, L1 in enumerate(range(1, L)):
                S = np.concatenate([e[j] for e in entropies])
                points.append(EntropyPoint(L1, float(S.mean()), float(S.std(ddof=1) / np.sqrt(len(S)))))
            result.entropy = EntropyCurve(L=L, points=tuple(points))
            rows = ((p.L1, p.mean_entropy, p.std_error, page_value(2**p.L1, 2 ** (L - p.L1))) for p in points)
            files["entropy_curve.csv"] = write_csv(out / "entropy_curve.csv",
                                                   ["L1", "mean_entropy", "std_error", "page_value"], rows)
        if "coefficients" in obs:
            rows = ((c.k, str(c.string), c.value) for _, c in result.coefficients)
            files["coefficients.csv"] = write_csv(out / "coefficients.csv", ["k", "string", "value"], rows)
            var_coe = variance_prediction(N, EnsembleKind.COE)
            sidecar = {
                "N": N,
                "reference_variance": {kind.value: variance_prediction(N, kind) for kind in EnsembleKind},
                "samples_per_order": {str(k): samples_per_order[k] for k in config.orders},
                "sample_variance": {},
                "sample_mean": {},
            }
            half = bins.coefficients[0] * np.sqrt(var_coe)
            edges = np.linspace(-half, half, int(bins.coefficients[1]) + 1)
            hist_rows = []
            gauss = ReferenceCurve.gaussian(var_coe)
            for k in config.orders:
                v = result.coefficient_values(k)
                sidecar["sample_variance"][str(k)] = float(v.var(ddof=1)) if len(v) > 1 else None
                sidecar["sample_mean"][str(k)] = float(v.mean()) if len(v) else None
                for row in _hist_rows(histogram(v, edges), gauss):
                    hist_rows.append((k, *row))
            files["coefficients_reference.json"] = write_json(out / "coefficients_reference.json", sidecar)
            files["coefficients_hist.csv"] = write_csv(out / "coefficients_hist.csv", ["k", *HIST_HEADER], hist_rows)
        for name, path in write_references(out / "references", N, bins).items():
            files[name] = path
        result.ks = {k: v for k, v in ks.items() if v}
        files["summary.json"] = write_json(out / "summary.json", {"ks_distance": result.ks})

    result.timings = dict(stage.totals)
    manifest = {
        "library_version": __version__,
        "config": config.to_dict(),
        "config_sha256": config.digest(),
        "seeds": seeds,
        "wall_clock_seconds": result.timings,
        "files": {name: sha256_file(path) for name, path in sorted(files.items())},
    }
    write_json(out / "manifest.json", manifest)
    return result


def ratio_statistics_pooled(per_realization: list[RatioStats]) -> RatioStats:
    r = np.concatenate([x.r for x in per_realization])
    rt = np.concatenate([x.r_tilde for x in per_realization])
    n = len(r)
    return RatioStats(r, rt, float(r.mean()), float(rt.mean()),
                      float(r.std(ddof=1) / np.sqrt(n)), float(rt.std(ddof=1) / np.sqrt(n)))
