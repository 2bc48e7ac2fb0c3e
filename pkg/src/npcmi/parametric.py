"""Bivariate Gaussian and Student-t copulas.

These serve two purposes: generating data with a known dependency
structure, and providing closed-form ground-truth mutual information.
All entropies are in bits; the mutual information of a copula is the
negative of its entropy.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from . import special as sf
from .errors import DomainError
from .rng import make_rng, open_uniform

INDEPENDENCE = "independence"
GAUSSIAN = "gaussian"
STUDENT_T = "studentt"
FAMILIES = (INDEPENDENCE, GAUSSIAN, STUDENT_T)

_LN2 = math.log(2.0)
_U_MIN = 2.0**-54
_U_MAX = 1.0 - 2.0**-53


@dataclass(frozen=True)
class CopulaSpec:
    """A parametric bivariate copula.

    Parameters
    ----------
    family : {"independence", "gaussian", "studentt"}
    r : float
        Off-diagonal entry of the correlation matrix, ``-1 < r < 1``.
    nu : float, optional
        Degrees of freedom of the Student-t copula (any positive real).
    """

    family: str
    r: float = 0.0
    nu: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown copula family {self.family!r}")
        if not -1.0 < self.r < 1.0:
            raise DomainError("r must lie strictly inside (-1, 1)")
        if self.family == STUDENT_T:
            if self.nu is None or not (self.nu > 0 and math.isfinite(self.nu)):
                raise DomainError("Student-t copula needs nu > 0")
        elif self.nu is not None:
            raise DomainError(f"nu is only meaningful for the Student-t family")
        if self.family == INDEPENDENCE and self.r != 0.0:
            raise DomainError("independence copula has r = 0")

    @classmethod
    def independence(cls):
        return cls(INDEPENDENCE)

    @classmethod
    def gaussian(cls, r):
        return cls(GAUSSIAN, float(r))

    @classmethod
    def student_t(cls, r, nu):
        return cls(STUDENT_T, float(r), float(nu))

    def label(self):
        if self.family == INDEPENDENCE:
            return "independence"
        if self.family == GAUSSIAN:
            return f"gaussian(r={self.r:g})"
        return f"studentt(r={self.r:g},nu={self.nu:g})"


def _interior(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all((u > 0) & (u < 1)) and np.all((v > 0) & (v < 1))):
        raise DomainError("copula density needs points strictly inside the unit square")
    return u, v


def _scores(spec, u):
    if spec.family == STUDENT_T:
        return sf.student_t_quantile(u, spec.nu)
    return sf.std_normal_quantile(u)


def log_pdf(spec, u, v):
    """Natural log of the copula density at interior points."""
    u, v = _interior(u, v)
    if spec.family == INDEPENDENCE:
        return np.zeros(np.broadcast(u, v).shape)[()]
    r = spec.r
    x = _scores(spec, u)
    y = _scores(spec, v)
    one_r2 = 1.0 - r * r
    if spec.family == GAUSSIAN:
        quad = (r * r * (x * x + y * y) - 2.0 * r * x * y) / one_r2
        return -0.5 * math.log(one_r2) - 0.5 * quad
    nu = spec.nu
    const = (
        sf.ln_gamma(0.5 * (nu + 2.0))
        + sf.ln_gamma(0.5 * nu)
        - 2.0 * sf.ln_gamma(0.5 * (nu + 1.0))
        - 0.5 * math.log(one_r2)
    )
    q = (x * x - 2.0 * r * x * y + y * y) / one_r2
    return (
        const
        - 0.5 * (nu + 2.0) * np.log1p(q / nu)
        + 0.5 * (nu + 1.0) * (np.log1p(x * x / nu) + np.log1p(y * y / nu))
    )


def pdf(spec, u, v):
    """Copula density ``c(u, v)``."""
    return np.exp(log_pdf(spec, u, v))


def analytic_mi(spec):
    """Closed-form mutual information of the copula, in bits."""
    if spec.family == INDEPENDENCE:
        return 0.0
    gauss = -0.5 * math.log2(1.0 - spec.r**2)
    if spec.family == GAUSSIAN:
        return gauss
    nu = spec.nu
    omega = (
        2.0 * math.log(math.sqrt(nu / (2.0 * math.pi)) * sf.beta_fn(0.5 * nu, 0.5))
        - (2.0 + nu) / nu
        + (1.0 + nu) * (sf.digamma(0.5 * (nu + 1.0)) - sf.digamma(0.5 * nu))
    )
    return omega / _LN2 + gauss


def analytic_entropy(spec):
    """Differential entropy of the copula density, in bits (always <= 0)."""
    return -analytic_mi(spec)


def kendall_tau(spec):
    """Kendall's tau; ``(2/pi) asin(r)`` for both elliptical families."""
    return 2.0 / math.pi * math.asin(spec.r)


def conditional_cdf(spec, v, given_u):
    """``C(v | u) = dC(u, v)/du``, the conditional CDF of V given U = u."""
    v, u = _interior(v, given_u)
    if spec.family == INDEPENDENCE:
        return np.broadcast_to(v, np.broadcast(u, v).shape).copy()[()]
    r = spec.r
    x = _scores(spec, u)
    y = _scores(spec, v)
    if spec.family == GAUSSIAN:
        return sf.std_normal_cdf((y - r * x) / math.sqrt(1.0 - r * r))
    nu = spec.nu
    scale = np.sqrt((1.0 - r * r) * (nu + x * x) / (nu + 1.0))
    return sf.student_t_cdf((y - r * x) / scale, nu + 1.0)


def conditional_quantile(spec, v, given_u):
    """Inverse of :func:`conditional_cdf` in its first argument."""
    v, u = _interior(v, given_u)
    if spec.family == INDEPENDENCE:
        return np.broadcast_to(v, np.broadcast(u, v).shape).copy()[()]
    r = spec.r
    if spec.family == GAUSSIAN and r == 0.0:
        return np.broadcast_to(v, np.broadcast(u, v).shape).copy()[()]
    x = _scores(spec, u)
    if spec.family == GAUSSIAN:
        y = r * x + math.sqrt(1.0 - r * r) * sf.std_normal_quantile(v)
        out = sf.std_normal_cdf(y)
    else:
        nu = spec.nu
        scale = np.sqrt((1.0 - r * r) * (nu + x * x) / (nu + 1.0))
        y = r * x + scale * sf.student_t_quantile(v, nu + 1.0)
        out = sf.student_t_cdf(y, nu)
    # keep results usable as copula coordinates when the CDF rounds to 0 or 1
    return np.clip(out, _U_MIN, _U_MAX)[()]


def rosenblatt_sample(spec, n, seed):
    """Draw ``n`` points from the copula by the Rosenblatt transform.

    Returns an ``(n, 2)`` array whose first column holds the raw uniforms
    and second column the conditional quantiles of a second set of
    uniforms given the first.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = make_rng(seed)
    w = open_uniform(rng, (n, 2))
    u = w[:, 0]
    v = conditional_quantile(spec, w[:, 1], u) if spec.family != INDEPENDENCE else w[:, 1]
    return np.column_stack([u, v])


def _breakpoint(spec, v, u):
    # location where C(v | t) switches from ~1 to ~0 for strong dependence
    if spec.r == 0.0:
        return None
    y = _scores(spec, v)
    t = sf.student_t_cdf(y / spec.r, spec.nu) if spec.family == STUDENT_T else sf.std_normal_cdf(y / spec.r)
    return t if 0.0 < t < u else None


def cdf(spec, u, v, epsabs=1e-11):
    """Copula CDF by adaptive quadrature of the conditional CDF over ``[0, u]``.

    Accepts scalars or arrays on the closed unit square.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
        raise DomainError("copula CDF is defined on [0, 1]^2")
    uu, vv = np.broadcast_arrays(u, v)
    out = np.empty(uu.shape)
    for idx in np.ndindex(uu.shape):
        a, b = float(uu[idx]), float(vv[idx])
        if a == 0.0 or b == 0.0:
            out[idx] = 0.0
        elif a == 1.0:
            out[idx] = b
        elif b == 1.0:
            out[idx] = a
        elif spec.family == INDEPENDENCE:
            out[idx] = a * b
        else:
            bp = _breakpoint(spec, b, a)
            val, _ = integrate.quad(
                lambda t: conditional_cdf(spec, b, t),
                0.0,
                a,
                points=None if bp is None else [bp],
                epsabs=epsabs,
                epsrel=1e-12,
                limit=400,
            )
            out[idx] = min(max(val, 0.0), min(a, b))
    return out[()]
