"""End-to-end mutual-information estimation.

The mutual information of two continuous variables equals the negative
differential entropy of their copula density. The copula is fitted
nonparametrically on a ``k x k`` grid and its entropy is taken either by
midpoint quadrature or by Monte Carlo over samples drawn from the grid.
"""
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import special as sf
from .bandwidth import LL1, NAIVE_FIXED, BandwidthConfig, optimize_bandwidth
from .density import (
    DEFAULT_GRID_K,
    DEFAULT_ITERATIONS,
    EvaluationGrid,
    local_fit_moments,
    local_likelihood_density,
    naive_density,
    normalize_copula,
)
from .errors import ConfigurationError, DomainError, InfiniteInformationError
from .rng import child_seed, make_rng, open_uniform
from .transform import probit_pca, pseudo_observations

NPC_LL = "NPC_LL"
NPC_NAIVE = "NPC_Naive"
GC_PARAMETRIC = "GC_Parametric"
METHODS = (NPC_LL, NPC_NAIVE, GC_PARAMETRIC)

GRID_QUADRATURE = "GridQuadrature"
MONTE_CARLO = "MonteCarlo"
ENTROPY_MODES = (GRID_QUADRATURE, MONTE_CARLO)

CSV_FIELDS = (
    "method",
    "entropy_mode",
    "mi_bits",
    "std_error_bits",
    "ci95_lo",
    "ci95_hi",
    "mi_raw_bits",
    "n",
    "grid_k",
    "bandwidth_p",
    "bandwidth_q",
    "alpha",
    "seed",
    "degenerate_cells",
)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class MIEstimate:
    """A mutual-information estimate in bits with its provenance."""

    mi_bits: float
    method: str
    entropy_mode: str = GRID_QUADRATURE
    std_error_bits: Optional[float] = None
    ci95: Optional[Tuple[float, float]] = None
    metadata: dict = field(default_factory=dict)

    def _row(self):
        md = self.metadata
        lo, hi = self.ci95 if self.ci95 is not None else (None, None)
        return {
            "method": self.method,
            "entropy_mode": self.entropy_mode,
            "mi_bits": self.mi_bits,
            "std_error_bits": self.std_error_bits,
            "ci95_lo": lo,
            "ci95_hi": hi,
            "mi_raw_bits": md.get("mi_raw_bits"),
            "n": md.get("n"),
            "grid_k": md.get("grid_k"),
            "bandwidth_p": md.get("bandwidth_p"),
            "bandwidth_q": md.get("bandwidth_q"),
            "alpha": md.get("alpha"),
            "seed": md.get("seed"),
            "degenerate_cells": md.get("degenerate_cells"),
        }

    def to_csv_row(self):
        """Comma-separated values in the order of :data:`CSV_FIELDS`."""
        row = self._row()
        return ",".join(_fmt(row[k]) for k in CSV_FIELDS)

    def to_record(self):
        """One ``key=value`` line per field, runtime last."""
        lines = [f"{k}={_fmt(v)}" for k, v in self._row().items()]
        if "runtime_s" in self.metadata:
            lines.append(f"runtime_s={self.metadata['runtime_s']:.3f}")
        return "\n".join(lines)


@dataclass(frozen=True)
class EstimatorConfig:
    method: str = NPC_LL
    grid_k: int = DEFAULT_GRID_K
    bandwidth: BandwidthConfig = field(default_factory=BandwidthConfig)
    iterations: int = DEFAULT_ITERATIONS
    entropy_mode: str = GRID_QUADRATURE
    mc_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method {self.method!r}")
        if self.entropy_mode not in ENTROPY_MODES:
            raise ConfigurationError(f"unknown entropy mode {self.entropy_mode!r}")
        if self.entropy_mode == MONTE_CARLO and self.mc_samples < 100:
            raise ConfigurationError("mc_samples must be at least 100")
        if self.grid_k < 2:
            raise ConfigurationError("grid_k must be at least 2")
        if self.iterations < 0:
            raise ConfigurationError("iterations must be nonnegative")


def _values(c):
    return np.asarray(getattr(c, "values", c), dtype=float)


def entropy_grid(c):
    """Differential entropy of a grid copula in bits by midpoint quadrature."""
    v = _values(c)
    pos = v[v > 0]
    return float(-np.sum(pos * np.log2(pos)) / v.size)


def sample_fitted(c, m, seed):
    """Draw ``m`` points from the piecewise-constant grid copula.

    ``u`` comes from the inverse of the piecewise-linear cumulative of the
    row masses and ``v`` from the cumulative of the chosen row, so points
    are spread uniformly inside their cell.
    """
    v = _values(c)
    k = v.shape[0]
    if m < 1:
        raise DomainError("m must be at least 1")
    w = open_uniform(make_rng(seed), (m, 2))
    rows = v.sum(axis=1)
    row_cum = np.concatenate([[0.0], np.cumsum(rows)])
    row_cum /= row_cum[-1]
    t = w[:, 0]
    i = np.clip(np.searchsorted(row_cum, t, side="right") - 1, 0, k - 1)
    frac_u = (t - row_cum[i]) / np.maximum(row_cum[i + 1] - row_cum[i], 1e-300)
    cols = np.cumsum(v, axis=1)
    cols = np.concatenate([np.zeros((k, 1)), cols], axis=1)
    cols /= cols[:, -1:]
    s = w[:, 1]
    j = np.empty(m, dtype=np.int64)
    for row in np.unique(i):
        sel = i == row
        j[sel] = np.searchsorted(cols[row], s[sel], side="right") - 1
    j = np.clip(j, 0, k - 1)
    frac_v = (s - cols[i, j]) / np.maximum(cols[i, j + 1] - cols[i, j], 1e-300)
    u_out = (i + np.clip(frac_u, 0.0, 1.0)) / k
    v_out = (j + np.clip(frac_v, 0.0, 1.0)) / k
    return np.column_stack([u_out, v_out])


@dataclass
class MCEntropy:
    h_bits: float
    std_error: float
    excluded: int

    def __iter__(self):
        return iter((self.h_bits, self.std_error))


def entropy_mc(c, m, seed):
    """Monte Carlo entropy in bits and its standard error.

    Returns an :class:`MCEntropy` that unpacks as ``(h_bits, std_error)``.
    """
    if m < 100:
        raise DomainError("Monte Carlo entropy needs m >= 100")
    v = _values(c)
    k = v.shape[0]
    pts = sample_fitted(v, m, seed)
    i = np.minimum((pts[:, 0] * k).astype(np.int64), k - 1)
    j = np.minimum((pts[:, 1] * k).astype(np.int64), k - 1)
    vals = v[i, j]
    good = vals > 0
    logs = np.log2(vals[good])
    mm = logs.size
    h = float(-logs.mean())
    var = float(np.sum((logs + h) ** 2) / (mm + 1))
    return MCEntropy(h, math.sqrt(var / mm), int(m - mm))


def fit_copula(frame, config):
    """Select the bandwidth and return the normalized grid copula."""
    grid = EvaluationGrid(frame, config.grid_k)
    bw_cfg = config.bandwidth
    overrides = {"grid_k": config.grid_k, "seed": child_seed(config.seed, 1)}
    if config.method == NPC_NAIVE and bw_cfg.variant != NAIVE_FIXED:
        overrides.update(variant=LL1, density="naive")
    bw_cfg = BandwidthConfig(**{**asdict(bw_cfg), **overrides})
    chosen = optimize_bandwidth(frame, bw_cfg)
    if config.method == NPC_NAIVE:
        raw = naive_density(frame, chosen.bandwidth, grid)
    else:
        moments = local_fit_moments(frame, chosen.bandwidth, grid)
        raw = local_likelihood_density(moments, chosen.bandwidth, grid, frame)
    return normalize_copula(raw, config.iterations), chosen


def _finish(mi_raw, method, mode, se, md):
    mi = max(mi_raw, 0.0)
    ci = None
    if se is not None:
        ci = (max(mi_raw - 1.96 * se, 0.0), max(mi_raw + 1.96 * se, 0.0))
    md["mi_raw_bits"] = mi_raw
    return MIEstimate(mi, method, mode, se, ci, md)


def estimate_mi(x, y=None, config=None):
    """Estimate the mutual information of paired samples in bits.

    Parameters
    ----------
    x, y : array_like
        Paired samples, or a single ``(n, 2)`` array.
    config : EstimatorConfig, optional

    Returns
    -------
    MIEstimate
        MI is clamped at zero; the unclamped value is kept in
        ``metadata["mi_raw_bits"]``.
    """
    config = config or EstimatorConfig()
    if config.method == GC_PARAMETRIC:
        return estimate_mi_gc(x, y)
    t0 = time.perf_counter()
    ps = pseudo_observations(x, y)
    frame = probit_pca(ps)
    c, chosen = fit_copula(frame, config)
    md = {
        "n": frame.n,
        "grid_k": config.grid_k,
        "bandwidth_p": chosen.bandwidth.bp,
        "bandwidth_q": chosen.bandwidth.bq,
        "alpha": chosen.alpha,
        "seed": config.seed,
        "fold_seed": chosen.fold_seed,
        "degenerate_cells": c.degenerate_cells,
        "max_marginal_deviation": c.max_marginal_deviation(),
    }
    if config.entropy_mode == GRID_QUADRATURE:
        h, se = entropy_grid(c), None
    else:
        mc = entropy_mc(c, config.mc_samples, child_seed(config.seed, 2))
        h, se = mc.h_bits, mc.std_error
        md["mc_samples"] = config.mc_samples
        md["mc_excluded"] = mc.excluded
    md["runtime_s"] = time.perf_counter() - t0
    return _finish(-h, config.method, config.entropy_mode, se, md)


def estimate_mi_gc(x, y=None):
    """Gaussian-copula baseline from the correlation of probit scores."""
    t0 = time.perf_counter()
    ps = pseudo_observations(x, y)
    z = sf.std_normal_quantile(ps)
    r = float(np.corrcoef(z[:, 0], z[:, 1])[0, 1])
    if not abs(r) < 1.0:
        raise InfiniteInformationError("perfectly correlated probit scores")
    mi = -0.5 * math.log2(1.0 - r * r)
    md = {"n": ps.shape[0], "r_hat": r, "runtime_s": time.perf_counter() - t0}
    return _finish(mi, GC_PARAMETRIC, GRID_QUADRATURE, None, md)
