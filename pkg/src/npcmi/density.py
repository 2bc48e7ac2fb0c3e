"""Kernel copula density estimation on a midpoint grid of the unit square.

The density is fitted in rotated probit coordinates ``(p, q)`` and mapped
back to copula space through ``c(u, v) = f(p, q) / (phi(r) phi(s))``; the
rotation is an isometry so it contributes no Jacobian.

Two estimators are provided: the naive product-kernel estimate and the
local-likelihood estimate with a log-quadratic local model, which for a
Gaussian kernel has a closed-form solution in terms of five kernel
moments.
"""
import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import special as sf
from ._kernels import SortedSample
from .errors import DegenerateInputError, DomainError
from .transform import ProbitFrame

DEFAULT_GRID_K = 100
DEFAULT_ITERATIONS = 1000
DENSITY_FLOOR = 1e-12
# a log-quadratic local model has five parameters; with fewer effective
# samples under the kernel the fit degenerates towards a point mass
MIN_EFFECTIVE_SAMPLES = 3.0
FULL_EFFECTIVE_SAMPLES = 5.0


@dataclass(frozen=True)
class Bandwidth:
    bp: float
    bq: float

    def __post_init__(self):
        if not (self.bp > 0 and self.bq > 0 and np.isfinite(self.bp) and np.isfinite(self.bq)):
            raise DomainError("bandwidths must be positive and finite")

    def scaled(self, alpha):
        return Bandwidth(self.bp * alpha, self.bq * alpha)


class EvaluationGrid:
    """``k x k`` cell midpoints of the unit square and their ``(p, q)`` images.

    Arrays are indexed ``[i, j]`` with ``i`` along ``u`` and ``j`` along ``v``;
    flattened arrays are row-major.
    """

    def __init__(self, frame, k=DEFAULT_GRID_K):
        if k < 2:
            raise DomainError("grid needs k >= 2")
        self.k = int(k)
        self.mid = (np.arange(self.k) + 0.5) / self.k
        z = sf.std_normal_quantile(self.mid)
        r, s = np.meshgrid(z, z, indexing="ij")
        rs = np.column_stack([r.ravel(), s.ravel()])
        self.pq = rs @ frame.rotation.T
        phi = sf.std_normal_pdf(z)
        self.phi_prod = np.outer(phi, phi)
        self.cell_area_uv = 1.0 / self.k**2
        # area element of each cell measured in (p, q)
        self.pq_weight = (self.cell_area_uv / self.phi_prod).ravel()

    @property
    def uv_midpoints(self):
        u, v = np.meshgrid(self.mid, self.mid, indexing="ij")
        return np.column_stack([u.ravel(), v.ravel()])


@dataclass
class CopulaDensityGrid:
    """Copula density values on the midpoints of a ``k x k`` grid."""

    values: np.ndarray
    frame: Optional[ProbitFrame] = None
    degenerate_cells: int = 0

    @property
    def k(self):
        return self.values.shape[0]

    def row_means(self):
        return self.values.mean(axis=1)

    def col_means(self):
        return self.values.mean(axis=0)

    def max_marginal_deviation(self):
        return max(np.abs(self.row_means() - 1).max(), np.abs(self.col_means() - 1).max())

    def to_csv(self, path):
        """Write ``k`` on the first line, then ``k`` rows of ``k`` values."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([self.k])
            for row in self.values:
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        k = int(rows[0][0])
        values = np.array([[float(x) for x in row] for row in rows[1 : k + 1]])
        if values.shape != (k, k):
            raise DomainError(f"expected {k}x{k} values")
        return cls(values)


@dataclass
class LocalFitMoments:
    """Kernel moments at every grid point, each of shape ``(k*k,)``.

    ``f_naive`` is the kernel density itself; ``f1``/``f2`` are first
    moments of ``p_i - p`` and ``q_i - q``; ``f3``/``f4`` are second moments.
    ``n_eff`` is the effective number of samples under the kernel.
    """

    f_naive: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    f4: np.ndarray
    n_eff: Optional[np.ndarray] = None

    @classmethod
    def from_array(cls, m):
        return cls(*(np.asarray(row) for row in m))

    def as_array(self):
        rows = [self.f_naive, self.f1, self.f2, self.f3, self.f4]
        if self.n_eff is not None:
            rows.append(self.n_eff)
        return np.stack(rows)


def _sample(frame_or_sample):
    if isinstance(frame_or_sample, SortedSample):
        return frame_or_sample
    return SortedSample(frame_or_sample.points)


def kernel_moments(samples, at, bw):
    """``(6, len(at))`` kernel moments around ``at``; see :mod:`._kernels`."""
    return _sample(samples).moments(at, bw.bp, bw.bq)


def local_fit_moments(frame, bw, grid):
    return LocalFitMoments.from_array(kernel_moments(frame, grid.pq, bw))


def ll_from_moments(
    m, bw, floor=DENSITY_FLOOR, min_effective=MIN_EFFECTIVE_SAMPLES, full_effective=FULL_EFFECTIVE_SAMPLES
):
    """Closed-form local-likelihood density from the kernel moments.

    Solving the moment equations of the log-quadratic local model gives

        e_p = b_p / sqrt(f3/f0 - (f1/f0)**2)
        f_LL = f0 * e_p * e_q * exp(-e_p**2 (f1/f0)**2 / (2 b_p**2) - ...)

    Cells keep the naive value ``f0`` when ``f0 <= floor`` or when a local
    variance is not positive. If ``m`` carries a sixth row (effective sample
    count), the result ramps linearly from ``f0`` at ``min_effective``
    samples to the full local fit at ``full_effective``, so the density
    stays continuous in the bandwidth.

    Returns
    -------
    f_ll : ndarray
    degenerate : ndarray of bool
        Cells above the floor where the naive value carries any weight.
    """
    f0, f1, f2, f3, f4 = (np.asarray(a, dtype=float) for a in m[:5])
    ok = f0 > floor
    safe = np.where(ok, f0, 1.0)
    m1 = f1 / safe
    m2 = f2 / safe
    var_p = f3 / safe - m1 * m1
    var_q = f4 / safe - m2 * m2
    good = ok & (var_p > 0) & (var_q > 0)
    var_p = np.where(good, var_p, 1.0)
    var_q = np.where(good, var_q, 1.0)
    f_ll = f0 * (bw.bp * bw.bq / np.sqrt(var_p * var_q)) * np.exp(
        -0.5 * (m1 * m1 / var_p + m2 * m2 / var_q)
    )
    weight = good.astype(float)
    if len(m) > 5 and m[5] is not None and full_effective > min_effective:
        ramp = (np.asarray(m[5], dtype=float) - min_effective) / (full_effective - min_effective)
        weight *= np.clip(ramp, 0.0, 1.0)
    f_ll = np.where(weight > 0, weight * f_ll + (1.0 - weight) * f0, f0)
    return f_ll, (weight < 1.0) & ok


def _to_copula(f_pq, grid, frame, degenerate=0):
    c = np.maximum(f_pq.reshape(grid.k, grid.k), 0.0) / grid.phi_prod
    return CopulaDensityGrid(values=c, frame=frame, degenerate_cells=int(degenerate))


def naive_density(frame, bw, grid):
    """Naive product-kernel copula density on the grid."""
    f0 = kernel_moments(frame, grid.pq, bw)[0]
    return _to_copula(f0, grid, frame)


def local_likelihood_density(moments, bw, grid, frame):
    """Local-likelihood copula density from precomputed moments."""
    f_ll, degenerate = ll_from_moments(moments.as_array(), bw)
    return _to_copula(f_ll, grid, frame, degenerate.sum())


def normalize_copula(density, iterations=DEFAULT_ITERATIONS):
    """Force uniform margins by repeatedly dividing by both marginals.

    Each sweep replaces ``c[i, j]`` with ``c[i, j] / (row_i * col_j)`` where
    ``row_i`` and ``col_j`` are the current marginal means; the loop stops
    early once both margins are uniform to 1e-14. The result is finally
    divided by its grid mean so that it integrates to one.
    """
    c = np.array(density.values, dtype=float)
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise DomainError("density must be finite and nonnegative")
    top = c.max()
    if not top > 0:
        raise DegenerateInputError("density is identically zero")
    c = np.maximum(c, DENSITY_FLOOR * c.mean())
    for _ in range(int(iterations)):
        rows = c.mean(axis=1)
        cols = c.mean(axis=0)
        if max(np.abs(rows - 1).max(), np.abs(cols - 1).max()) < 1e-14:
            break
        c = c / np.outer(rows, cols)
    c = c / c.mean()
    return CopulaDensityGrid(values=c, frame=density.frame, degenerate_cells=density.degenerate_cells)
