"""Integer-valued data: continuation by gap noise and discrete ground truth.

Adding to every observed integer a uniform noise that fills the gap up to
the next observed value gives continuous data with disjoint supports per
integer, so the integers are recoverable and the mutual information is
unchanged.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sc

from . import parametric
from . import special as sf
from .errors import DomainError, NumericalConsistencyError
from .rng import make_rng, open_uniform

TAIL_MASS = 1e-12


def _as_pairs(data):
    arr = np.asarray(data)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise DomainError("expected a nonempty (n, 2) array of integer pairs")
    if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
        raise DomainError("integer data expected")
    return arr.astype(np.int64)


def _jitter_axis(values, noise):
    uniq = np.unique(values)
    gaps = np.append(np.diff(uniq), 1).astype(float)
    idx = np.searchsorted(uniq, values)
    lo = uniq[idx].astype(float)
    hi = lo + gaps[idx]
    # rounding must not carry a value onto the next observed integer
    return np.minimum(lo + noise * gaps[idx], np.nextafter(hi, -np.inf))


def jitter(data, seed):
    """Continuous version of integer pairs by gap-filling uniform noise.

    A value ``n_i`` becomes ``n_i + U * (n_{i+1} - n_i)`` where ``n_{i+1}``
    is the next larger value observed on the same axis (gap 1 for the
    largest), with ``U`` uniform on ``(0, 1)``.
    """
    pairs = _as_pairs(data)
    noise = open_uniform(make_rng(seed), pairs.shape)
    return np.column_stack([_jitter_axis(pairs[:, j], noise[:, j]) for j in range(2)])


def recover(jittered, observed):
    """Map jittered values back to the largest observed value not above them."""
    uniq = np.unique(np.asarray(observed))
    x = np.asarray(jittered, dtype=float)
    idx = np.searchsorted(uniq, x, side="right") - 1
    if np.any(idx < 0):
        raise DomainError("value below the smallest observed integer")
    return uniq[idx]


@dataclass(frozen=True)
class PoissonMarginal:
    """Poisson marginal truncated where the upper tail drops below 1e-12."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError("Poisson rate must be positive and finite")

    @property
    def n_max(self):
        # P(N > m) = P(m + 1, lam), the regularized lower incomplete gamma
        m = int(self.lam)
        while sf.reg_incomplete_gamma(m + 1.0, self.lam) >= TAIL_MASS:
            m += 1
        return m

    def cdf(self, k):
        return sf.poisson_cdf(k, self.lam)

    def pmf(self, k):
        return sf.poisson_pmf(k, self.lam)

    def quantile(self, u):
        """Smallest integer ``a`` with ``cdf(a) >= u``."""
        u = np.asarray(u, dtype=float)
        top = self.n_max
        table = np.asarray(self.cdf(np.arange(top + 1)))
        while table[-1] < u.max(initial=0.0) and table[-1] < 1.0:
            top = 2 * top + 1
            table = np.asarray(self.cdf(np.arange(top + 1)))
        return np.minimum(np.searchsorted(table, u, side="left"), top)


def joint_pmf(spec, mx, my):
    """Joint pmf on ``0..n_max`` per axis of integers coupled by ``spec``.

    Each cell's mass is the integral over ``u`` in ``(Fx(a-1), Fx(a)]`` of
    the conditional-CDF increment ``C(Fy(b) | u) - C(Fy(b-1) | u)``, which
    equals the inclusion-exclusion of the copula CDF over the rectangle.
    """
    ax = np.arange(mx.n_max + 1)
    ay = np.arange(my.n_max + 1)
    fx = np.concatenate([[0.0], np.asarray(mx.cdf(ax))])
    fy = np.asarray(my.cdf(ay))
    if spec.family == parametric.INDEPENDENCE:
        return np.outer(np.diff(fx), np.diff(np.concatenate([[0.0], fy])))
    fy_in = np.clip(fy, 2.0**-54, 1.0 - 2.0**-53)

    def h(t):
        # nodes in a cell of width ~1e-17 next to 1 can round onto the edge
        t = min(max(t, 2.0**-54), 1.0 - 2.0**-53)
        cond = parametric.conditional_cdf(spec, fy_in, t)
        return np.diff(np.concatenate([[0.0], cond]))

    pmf = np.empty((ax.size, ay.size))
    for a in range(ax.size):
        lo, hi = fx[a], fx[a + 1]
        if hi - lo <= 0.0:
            pmf[a] = 0.0
            continue
        val, _ = integrate.quad_vec(h, lo, hi, epsabs=1e-15, epsrel=1e-10)
        pmf[a] = val
    if pmf.min() < -1e-9:
        raise NumericalConsistencyError(f"negative joint probability {pmf.min():.3g}")
    return np.maximum(pmf, 0.0)


def plugin_mi_from_pmf(pmf):
    """``sum P log2(P / (Px Py))`` over the cells with positive mass."""
    p = np.asarray(pmf, dtype=float)
    p = p / p.sum()
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    mask = p > 0
    ratio = p[mask] / (px * py)[mask]
    return float(np.sum(p[mask] * np.log2(ratio)))


def plugin_mi(data):
    """Plug-in mutual information of integer pairs in bits."""
    pairs = _as_pairs(data)
    _, ix = np.unique(pairs[:, 0], return_inverse=True)
    _, iy = np.unique(pairs[:, 1], return_inverse=True)
    counts = np.zeros((ix.max() + 1, iy.max() + 1))
    np.add.at(counts, (ix, iy), 1.0)
    return plugin_mi_from_pmf(counts)


def discrete_ground_truth_mi(spec, mx, my):
    """Exact mutual information of copula-coupled Poisson variables in bits."""
    if spec.family == parametric.INDEPENDENCE:
        return 0.0
    return plugin_mi_from_pmf(joint_pmf(spec, mx, my))


def sample_discrete(spec, mx, my, n, seed):
    """Integer pairs with Poisson marginals coupled by ``spec``."""
    uv = parametric.rosenblatt_sample(spec, n, seed)
    return np.column_stack([mx.quantile(uv[:, 0]), my.quantile(uv[:, 1])]).astype(np.int64)
