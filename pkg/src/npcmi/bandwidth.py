"""Cross-validated bandwidth selection for the kernel copula density.

The score minimized is the cross-validated estimate of the integrated
squared error, up to a constant independent of the bandwidth:

    M(b) = int f_b(p, q)^2 dp dq - (2/n) sum_i f_b^{(-i)}(p_i, q_i)

where ``f^{(-i)}`` is fitted without the fold that contains sample ``i``.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ._kernels import SortedSample, lattice_moments
from .density import DEFAULT_GRID_K, Bandwidth, ll_from_moments
from .errors import ConfigurationError, DomainError, OptimizationError
from .rng import make_rng

LL1 = "LL1"
LL2 = "LL2"
NAIVE_FIXED = "NaiveFixed"
VARIANTS = (LL1, LL2, NAIVE_FIXED)

MIN_FOLD_SIZE = 4
# smallest bandwidth scale explored; the score diverges as alpha -> 0
ALPHA_MIN = 0.02
# log-spaced probes used to pick the bracket for the local search
_SCAN = np.geomspace(ALPHA_MIN, 1.0, 8)


@dataclass(frozen=True)
class BandwidthConfig:
    """Settings for :func:`optimize_bandwidth`.

    ``density`` selects which estimator the score is computed for:
    ``"ll"`` (local likelihood) or ``"naive"``.
    """

    variant: str = LL1
    cv_folds: int = 5
    max_opt_iterations: int = 500
    grid_k: int = DEFAULT_GRID_K
    seed: int = 0
    density: str = "ll"
    xatol: float = 2e-3

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown bandwidth variant {self.variant!r}")
        if self.cv_folds < 2:
            raise ConfigurationError("cv_folds must be at least 2")
        if self.max_opt_iterations < 10:
            raise ConfigurationError("max_opt_iterations must be at least 10")
        if self.density not in ("ll", "naive"):
            raise ConfigurationError("density must be 'll' or 'naive'")


@dataclass
class BandwidthResult:
    bandwidth: Bandwidth
    alpha: float
    score: float
    evaluations: int
    fold_seed: int
    history: list = field(default_factory=list, repr=False)


def rule_of_thumb(frame, c=1.0):
    """``b = c * n**(-1/6) * axis_sd``, the upper bound of the search."""
    if not c > 0:
        raise DomainError("rule-of-thumb constant must be positive")
    scale = c * frame.n ** (-1.0 / 6.0)
    return Bandwidth(float(scale * frame.axis_sd[0]), float(scale * frame.axis_sd[1]))


def fold_assignment(n, folds, seed):
    """Fold index of every sample from a seeded permutation.

    ``folds == n`` is leave-one-out; otherwise every fold must hold at
    least four samples.
    """
    if folds > n:
        raise ConfigurationError(f"{folds} folds for {n} samples")
    if folds != n and n // folds < MIN_FOLD_SIZE:
        raise ConfigurationError(f"{folds} folds leave fewer than {MIN_FOLD_SIZE} points per fold")
    perm = make_rng(seed).permutation(n)
    out = np.empty(n, dtype=np.int64)
    out[perm] = np.arange(n) % folds
    return out


def _density_values(m, bw, density):
    if density == "naive":
        return m[0]
    return ll_from_moments(m, bw)[0]


def _remove_self(m, n, bw):
    """Drop each point's own kernel term from moments taken at the samples."""
    peak = 1.0 / (2.0 * math.pi * bw.bp * bw.bq)
    out = m[:5] * (n / (n - 1.0))
    out[0] -= peak / (n - 1.0)
    a0 = m[0] / (peak / n)
    a5 = np.where(m[5] > 0, a0 * a0 / np.where(m[5] > 0, m[5], 1.0), 0.0)
    rest = a5 - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        n_eff = np.where(rest > 1e-12, (a0 - 1.0) ** 2 / rest, 0.0)
    return np.vstack([out, n_eff])


class MiseObjective:
    """Cross-validated score with the training folds pre-sorted.

    The squared-density integral runs on an equally spaced ``(p, q)``
    lattice that covers the sample plus three rule-of-thumb bandwidths on
    each side; its spacing follows the smaller bandwidth, between ``k`` and
    ``2k`` nodes per axis. The held-out term is evaluated exactly at the
    samples.
    """

    def __init__(self, frame, grid_k=DEFAULT_GRID_K, folds=5, seed=0, density="ll"):
        self.frame = frame
        self.k = int(grid_k)
        self.density = density
        pts = frame.points
        self.fold_of = fold_assignment(frame.n, folds, seed)
        self.leave_one_out = folds == frame.n
        if self.leave_one_out:
            self.folds = [(SortedSample(pts), pts)]
        else:
            self.folds = [
                (SortedSample(pts[self.fold_of != f]), pts[self.fold_of == f]) for f in range(folds)
            ]
        rot = rule_of_thumb(frame)
        self.box = [
            (pts[:, j].min() - 3.0 * b, pts[:, j].max() + 3.0 * b)
            for j, b in enumerate((rot.bp, rot.bq))
        ]
        self.evaluations = 0

    def lattice(self, bw):
        extent = max(hi - lo for lo, hi in self.box)
        m = int(np.clip(math.ceil(extent / min(bw.bp, bw.bq)), self.k, 2 * self.k))
        return [np.linspace(lo, hi, m) for lo, hi in self.box]

    def integral(self, bw):
        gp, gq = self.lattice(bw)
        m = lattice_moments(self.frame.points, gp, gq, bw.bp, bw.bq)
        f = _density_values(m, bw, self.density)
        return float(np.sum(f * f) * (gp[1] - gp[0]) * (gq[1] - gq[0]))

    def held_out(self, bw):
        total = 0.0
        for train, test in self.folds:
            m = train.moments(test, bw.bp, bw.bq)
            if self.leave_one_out:
                m = _remove_self(m, len(train), bw)
            total += float(np.sum(_density_values(m, bw, self.density)))
        return 2.0 * total / self.frame.n

    def __call__(self, bw):
        self.evaluations += 1
        return self.integral(bw) - self.held_out(bw)


def mise_score(frame, bw, grid_k=DEFAULT_GRID_K, folds=5, seed=0, density="ll"):
    """Cross-validated integrated squared error of the fitted density."""
    return MiseObjective(frame, grid_k, folds, seed, density)(bw)


def _finite_or_inf(value):
    return value if np.isfinite(value) else np.inf


def _bounded_search(fun, lo, hi, maxiter, xatol, probes=None):
    """Scan ``probes`` then refine around the best one with bounded Brent."""
    probes = np.asarray(probes if probes is not None else np.geomspace(lo, hi, 9))
    values = np.array([_finite_or_inf(fun(x)) for x in probes])
    if not np.any(np.isfinite(values)):
        raise OptimizationError("score is not finite at any probe bandwidth")
    i = int(np.argmin(values))
    if probes[i] in (lo, hi) and len(probes) > 1:
        # minimum at an end of the range: if one tolerance step inwards is
        # no better, the unimodal bracket pins the optimum to the bound
        inward = probes[i] + (xatol if i == 0 else -xatol)
        if _finite_or_inf(fun(inward)) >= values[i]:
            return float(probes[i]), float(values[i])
    a = probes[max(i - 1, 0)]
    b = probes[min(i + 1, len(probes) - 1)]
    if not b > a:
        return float(probes[i]), float(values[i])
    res = optimize.minimize_scalar(
        lambda x: _finite_or_inf(fun(x)),
        bounds=(a, b),
        method="bounded",
        options={"maxiter": max(1, maxiter - len(probes)), "xatol": xatol},
    )
    if np.isfinite(res.fun) and res.fun <= values[i]:
        return float(res.x), float(res.fun)
    return float(probes[i]), float(values[i])


def optimize_bandwidth(frame, config=None, grid=None):
    """Select the kernel bandwidth by minimizing the cross-validated score.

    ``LL1`` scales the rule-of-thumb bandwidth by one factor
    ``alpha in (0, 1]``; ``LL2`` then refines each axis separately by
    coordinate descent; ``NaiveFixed`` returns the rule of thumb.

    Returns
    -------
    BandwidthResult
    """
    config = config or BandwidthConfig()
    if grid is not None and getattr(grid, "k", config.grid_k) != config.grid_k:
        config = BandwidthConfig(**{**config.__dict__, "grid_k": grid.k})
    rot = rule_of_thumb(frame)
    if config.variant == NAIVE_FIXED:
        return BandwidthResult(rot, 1.0, float("nan"), 0, config.seed)
    obj = MiseObjective(frame, config.grid_k, config.cv_folds, config.seed, config.density)
    history = []

    def score_alpha(a):
        s = obj(rot.scaled(a))
        history.append((a * rot.bp, a * rot.bq, s))
        return s

    alpha, best = _bounded_search(
        score_alpha, ALPHA_MIN, 1.0, config.max_opt_iterations, config.xatol, _SCAN
    )
    bw = rot.scaled(alpha)
    if config.variant == LL1:
        return BandwidthResult(bw, alpha, best, obj.evaluations, config.seed, history)

    # LL2: alternate one-dimensional searches over each axis
    bp, bq = bw.bp, bw.bq
    for _ in range(config.max_opt_iterations):
        if obj.evaluations >= config.max_opt_iterations:
            break
        old = (bp, bq)
        budget = max(10, (config.max_opt_iterations - obj.evaluations) // 2)

        def score_p(x):
            s = obj(Bandwidth(x, bq))
            history.append((x, bq, s))
            return s

        lo, hi = ALPHA_MIN * rot.bp, rot.bp
        cand = np.unique(np.append(np.geomspace(lo, hi, 6), bp))
        bp, best = _bounded_search(score_p, lo, hi, budget, config.xatol * rot.bp, cand)

        def score_q(x):
            s = obj(Bandwidth(bp, x))
            history.append((bp, x, s))
            return s

        lo, hi = ALPHA_MIN * rot.bq, rot.bq
        cand = np.unique(np.append(np.geomspace(lo, hi, 6), bq))
        bq, best = _bounded_search(score_q, lo, hi, budget, config.xatol * rot.bq, cand)
        change = max(abs(bp - old[0]) / old[0], abs(bq - old[1]) / old[1])
        if change < 1e-3:
            break
    bw = Bandwidth(bp, bq)
    alpha = math.sqrt(bp * bq / (rot.bp * rot.bq))
    return BandwidthResult(bw, alpha, best, obj.evaluations, config.seed, history)
