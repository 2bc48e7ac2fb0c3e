"""Kernel-weighted local moments of a Gaussian product kernel.

Every routine returns an array of shape ``(6, G)``: the five moments
``(1/n) sum_i [1, dp, dq, dp^2, dq^2] K_bp(dp) K_bq(dq)`` with
``dp = p_i - p`` and ``dq = q_i - q``, followed by the effective number of
samples ``(sum w)^2 / sum w^2`` carrying the kernel weight at each point.
"""
import math

import numba
import numpy as np

# Gaussian weights beyond this many bandwidths (per axis) are below
# exp(-50) ~ 2e-22 of the peak and are skipped.
CUTOFF = 10.0


@numba.njit(cache=True, nogil=True)
def _moments(xp, xq, sp, sq, bp, bq, cutoff):
    g_count = xp.shape[0]
    out = np.zeros((6, g_count))
    ip = 0.5 / (bp * bp)
    iq = 0.5 / (bq * bq)
    wp = cutoff * bp
    wq = cutoff * bq
    norm = 1.0 / (2.0 * math.pi * bp * bq * sp.shape[0])
    for g in range(g_count):
        x = xp[g]
        y = xq[g]
        lo = np.searchsorted(sp, x - wp)
        hi = np.searchsorted(sp, x + wp, side="right")
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        a3 = 0.0
        a4 = 0.0
        a5 = 0.0
        for i in range(lo, hi):
            dq = sq[i] - y
            if dq > wq or dq < -wq:
                continue
            dp = sp[i] - x
            w = math.exp(-(dp * dp * ip + dq * dq * iq))
            a0 += w
            a1 += w * dp
            a2 += w * dq
            a3 += w * dp * dp
            a4 += w * dq * dq
            a5 += w * w
        out[0, g] = a0 * norm
        out[1, g] = a1 * norm
        out[2, g] = a2 * norm
        out[3, g] = a3 * norm
        out[4, g] = a4 * norm
        out[5, g] = a0 * a0 / a5 if a5 > 0.0 else 0.0
    return out


class SortedSample:
    """Training points sorted by their first coordinate."""

    def __init__(self, pts):
        pts = np.asarray(pts, dtype=float)
        order = np.argsort(pts[:, 0], kind="stable")
        self.p = np.ascontiguousarray(pts[order, 0])
        self.q = np.ascontiguousarray(pts[order, 1])

    def __len__(self):
        return self.p.shape[0]

    def moments(self, at, bp, bq, cutoff=CUTOFF):
        """Moments at each row of ``at``; shape ``(6, len(at))``."""
        at = np.asarray(at, dtype=float)
        return _moments(
            np.ascontiguousarray(at[:, 0]),
            np.ascontiguousarray(at[:, 1]),
            self.p,
            self.q,
            float(bp),
            float(bq),
            float(cutoff),
        )


def lattice_moments(pts, gp, gq, bp, bq):
    """Moments on the tensor lattice ``gp x gq`` (row-major, ``gp`` slow).

    The product kernel factorizes over the two axes, so each moment is a
    single matrix product of per-axis kernel tables.
    """
    pts = np.asarray(pts, dtype=float)
    n = pts.shape[0]
    dp = pts[None, :, 0] - np.asarray(gp)[:, None]
    dq = pts[None, :, 1] - np.asarray(gq)[:, None]
    kp = np.exp(-0.5 * (dp / bp) ** 2)
    kq = np.exp(-0.5 * (dq / bq) ** 2)
    kqt = kq.T
    s0 = kp @ kqt
    s5 = (kp * kp) @ (kq * kq).T
    out = np.empty((6, gp.size * gq.size))
    norm = 1.0 / (2.0 * math.pi * bp * bq * n)
    out[0] = (s0 * norm).ravel()
    out[1] = (((kp * dp) @ kqt) * norm).ravel()
    out[2] = ((kp @ (kq * dq).T) * norm).ravel()
    out[3] = (((kp * dp * dp) @ kqt) * norm).ravel()
    out[4] = ((kp @ (kq * dq * dq).T) * norm).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        out[5] = np.where(s5 > 0, s0 * s0 / np.where(s5 > 0, s5, 1.0), 0.0).ravel()
    return out
