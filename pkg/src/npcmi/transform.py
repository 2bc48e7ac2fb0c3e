"""Raw data -> copula pseudo-observations -> rotated probit coordinates.

The probit map ``(r, s) = (Phi^-1(u), Phi^-1(v))`` gives the copula sample
unbounded support with standard normal margins. A rotation onto the
principal axes of ``(r, s)`` then makes a product kernel natural.
"""
from dataclasses import dataclass

import numpy as np

from . import special as sf
from .errors import DegenerateInputError, DomainError

MIN_SAMPLES = 8


def rank_transform(x):
    """Map one margin to ``rank / (n + 1)``.

    Ties get consecutive ranks in order of first appearance, so the
    output values are always distinct. The result only depends on the
    ordering of ``x``, never on its values.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError("expected a 1-d array")
    if not np.all(np.isfinite(x)):
        raise DomainError("data must be finite")
    n = x.size
    if n < 2:
        raise DomainError("need at least two observations")
    if np.all(x == x[0]):
        raise DegenerateInputError("margin is constant")
    order = np.argsort(x, kind="stable")
    ranks = np.empty(n)
    ranks[order] = np.arange(1, n + 1)
    return ranks / (n + 1)


def pseudo_observations(x, y=None):
    """Rank-transform paired samples into the open unit square.

    Parameters
    ----------
    x : array_like
        Either the first margin, shape ``(n,)``, or both margins as an
        ``(n, 2)`` array when ``y`` is omitted.
    y : array_like, optional
        Second margin.

    Returns
    -------
    ndarray, shape (n, 2)
    """
    if y is None:
        xy = np.asarray(x, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise DomainError("expected an (n, 2) array of pairs")
        x, y = xy[:, 0], xy[:, 1]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DomainError("margins must have equal length")
    if x.size < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} pairs, got {x.size}")
    return np.column_stack([rank_transform(x), rank_transform(y)])


@dataclass(frozen=True)
class ProbitFrame:
    """Rotated probit coordinates of a copula sample.

    Attributes
    ----------
    points : ndarray, shape (n, 2)
        ``(p, q) = W (r, s)`` for every sample.
    rotation : ndarray, shape (2, 2)
        Orthogonal ``W`` whose rows are the principal axes, largest
        variance first, with ``W[0, 0] >= 0`` and ``det W = +1``.
    axis_sd : ndarray, shape (2,)
        Sample standard deviations of ``p`` and ``q``.
    """

    points: np.ndarray
    rotation: np.ndarray
    axis_sd: np.ndarray

    @property
    def n(self):
        return self.points.shape[0]

    def forward(self, uv):
        """Map copula coordinates ``(u, v)`` to ``(p, q)``."""
        uv = np.asarray(uv, dtype=float)
        rs = sf.std_normal_quantile(uv)
        return rs @ self.rotation.T

    def inverse(self, pq):
        """Map ``(p, q)`` back to copula coordinates."""
        rs = np.asarray(pq, dtype=float) @ self.rotation
        return sf.std_normal_cdf(rs)


def _principal_rotation(rs):
    cov = np.cov(rs, rowvar=False)
    sxx, syy, sxy = cov[0, 0], cov[1, 1], cov[0, 1]
    # angle of the major axis, in (-pi/2, pi/2] so that cos >= 0
    theta = 0.5 * np.arctan2(2.0 * sxy, sxx - syy)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def probit_pca(ps, rel_tol=1e-10):
    """Probit-transform pseudo-observations and rotate to principal axes.

    Raises
    ------
    DegenerateInputError
        If the minor-axis variance vanishes (e.g. ``u == v`` for all points).
    """
    ps = np.asarray(ps, dtype=float)
    if ps.ndim != 2 or ps.shape[1] != 2:
        raise DomainError("expected an (n, 2) array")
    rs = sf.std_normal_quantile(ps)
    w = _principal_rotation(rs)
    pts = rs @ w.T
    sd = pts.std(axis=0, ddof=1)
    if not sd[1] > np.sqrt(rel_tol) * sd[0]:
        raise DegenerateInputError("probit sample is collinear; dependence is deterministic")
    return ProbitFrame(points=pts, rotation=w, axis_sd=sd)


def inverse_probit_pca(frame, pts):
    """Return the copula points for rotated probit coordinates ``pts``."""
    return frame.inverse(pts)
