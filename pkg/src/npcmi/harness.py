"""Simulation experiments with known ground truth.

A condition fixes the copula, the two marginals, the sample size and the
grid size. Every replicate draws a dataset, runs each requested estimator
and compares it to the closed-form (continuous) or exact (Poisson) mutual
information. Seeds depend on the copula, sample size and replicate only,
so conditions that differ in marginals or grid size see the same copula
samples, and results do not depend on the order of conditions.
"""
import hashlib
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import discrete, parametric
from . import special as sf
from .bandwidth import LL1, LL2, BandwidthConfig
from .dataio import format_value
from .errors import ConfigurationError, DomainError
from .estimator import GC_PARAMETRIC, NPC_LL, NPC_NAIVE, EstimatorConfig, estimate_mi
from .rng import child_seed

NORMAL = "normal"
GAMMA = "gamma"
POISSON = "poisson"

ESTIMATORS = ("NPC_LL1", "NPC_LL2", "NPC_Naive", "GC")
METRICS_HEADER = (
    "condition,estimator,n,grid_k,copula,r,nu,marginal_x,marginal_y,"
    "truth_bits,mean_mi,abs_err,norm_bias,norm_var,replicates,seed"
)
RAW_HEADER = (
    "condition,replicate,estimator,n,grid_k,copula,r,nu,marginal_x,marginal_y,"
    "data_seed,truth_bits,mi_bits,mi_raw_bits,alpha,status"
)


@dataclass(frozen=True)
class MarginalSpec:
    """``normal``, ``gamma:alpha:beta`` (shape, scale) or ``poisson:lambda``."""

    kind: str
    alpha: Optional[float] = None
    beta: Optional[float] = None
    lam: Optional[float] = None

    def __post_init__(self):
        if self.kind == GAMMA:
            if not (self.alpha and self.alpha > 0 and self.beta and self.beta > 0):
                raise DomainError("gamma marginal needs alpha, beta > 0")
        elif self.kind == POISSON:
            discrete.PoissonMarginal(self.lam)
        elif self.kind != NORMAL:
            raise DomainError(f"unknown marginal {self.kind!r}")

    @classmethod
    def parse(cls, text):
        parts = text.strip().lower().split(":")
        try:
            if parts[0] == NORMAL and len(parts) == 1:
                return cls(NORMAL)
            if parts[0] == GAMMA and len(parts) == 3:
                return cls(GAMMA, alpha=float(parts[1]), beta=float(parts[2]))
            if parts[0] == POISSON and len(parts) == 2:
                return cls(POISSON, lam=float(parts[1]))
        except ValueError:
            pass
        raise ConfigurationError(f"cannot parse marginal {text!r}")

    @property
    def is_discrete(self):
        return self.kind == POISSON

    def label(self):
        if self.kind == GAMMA:
            return f"gamma:{self.alpha:g}:{self.beta:g}"
        if self.kind == POISSON:
            return f"poisson:{self.lam:g}"
        return NORMAL

    def quantile(self, u):
        if self.kind == GAMMA:
            return sf.gamma_quantile(u, self.alpha, self.beta)
        if self.kind == POISSON:
            return discrete.PoissonMarginal(self.lam).quantile(u)
        return sf.std_normal_quantile(u)


def parse_copula(text):
    """``independence``, ``gaussian:r`` or ``studentt:r:nu``."""
    parts = text.strip().lower().split(":")
    try:
        if parts[0] == parametric.INDEPENDENCE and len(parts) == 1:
            return parametric.CopulaSpec.independence()
        if parts[0] == parametric.GAUSSIAN and len(parts) == 2:
            return parametric.CopulaSpec.gaussian(float(parts[1]))
        if parts[0] == parametric.STUDENT_T and len(parts) == 3:
            return parametric.CopulaSpec.student_t(float(parts[1]), float(parts[2]))
    except (ValueError, DomainError) as exc:
        raise ConfigurationError(f"invalid copula {text!r}: {exc}") from None
    raise ConfigurationError(f"cannot parse copula {text!r}")


def copula_token(spec):
    if spec.family == parametric.INDEPENDENCE:
        return spec.family
    if spec.family == parametric.GAUSSIAN:
        return f"{spec.family}:{spec.r!r}"
    return f"{spec.family}:{spec.r!r}:{spec.nu!r}"


def generate_dataset(copula, marginals, n, seed):
    """Sample the copula and apply the marginal quantile functions.

    Returns an integer array when both marginals are discrete, a float
    array otherwise.
    """
    mx, my = marginals
    if mx.is_discrete != my.is_discrete:
        raise ConfigurationError("marginals must be both continuous or both Poisson")
    uv = parametric.rosenblatt_sample(copula, n, seed)
    out = np.column_stack([mx.quantile(uv[:, 0]), my.quantile(uv[:, 1])])
    return out.astype(np.int64) if mx.is_discrete else out


def _stable_key(text):
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")


@dataclass(frozen=True)
class Condition:
    copula: parametric.CopulaSpec
    marginals: Tuple[MarginalSpec, MarginalSpec]
    n: int
    grid_k: int

    @property
    def discrete(self):
        return self.marginals[0].is_discrete

    def label(self):
        mx, my = self.marginals
        return f"{self.copula.label()}|{mx.label()},{my.label()}|n={self.n}|k={self.grid_k}"

    def data_seed(self, master, replicate):
        return child_seed(master, _stable_key(copula_token(self.copula)), self.n, replicate)


@dataclass
class ExperimentConfig:
    copulas: List[parametric.CopulaSpec]
    marginals: List[Tuple[MarginalSpec, MarginalSpec]] = field(
        default_factory=lambda: [(MarginalSpec(NORMAL), MarginalSpec(NORMAL))]
    )
    ns: List[int] = field(default_factory=lambda: [1024])
    grid_ks: List[int] = field(default_factory=lambda: [100])
    replicates: int = 100
    estimators: List[str] = field(default_factory=lambda: ["NPC_LL1"])
    seed: int = 0
    output: Optional[str] = None
    raw_output: Optional[str] = None

    def __post_init__(self):
        for name in ("copulas", "marginals", "ns", "grid_ks", "estimators"):
            if not getattr(self, name):
                raise ConfigurationError(f"{name} must not be empty")
        if self.replicates < 1:
            raise ConfigurationError("replicates must be at least 1")
        for est in self.estimators:
            if est not in ESTIMATORS:
                raise ConfigurationError(f"unknown estimator {est!r}")
        for n in self.ns:
            if n < 8:
                raise ConfigurationError("n must be at least 8")
        for mx, my in self.marginals:
            if mx.is_discrete != my.is_discrete:
                raise ConfigurationError("marginals must be both continuous or both Poisson")

    def conditions(self):
        return [
            Condition(c, m, n, k)
            for c, m, n, k in itertools.product(self.copulas, self.marginals, self.ns, self.grid_ks)
        ]

    @classmethod
    def parse(cls, text):
        """Parse ``key=value`` lines; repeated keys build sweep lists.

        Keys: ``copula``, ``marginals`` (``X,Y``), ``n``, ``grid_k``,
        ``replicates``, ``estimators`` (comma list), ``seed``, ``output``,
        ``raw_output``. Lines starting with ``#`` are comments.
        """
        lists = {"copula": [], "marginals": [], "n": [], "grid_k": [], "estimators": []}
        scalars = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"line {lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                if key == "copula":
                    lists["copula"].append(parse_copula(value))
                elif key == "marginals":
                    parts = value.split(",")
                    if len(parts) != 2:
                        raise ConfigurationError("marginals takes two comma-separated specs")
                    lists["marginals"].append(tuple(MarginalSpec.parse(p) for p in parts))
                elif key in ("n", "grid_k"):
                    lists[key].extend(int(v) for v in value.split(","))
                elif key == "estimators":
                    lists["estimators"].extend(v.strip() for v in value.split(",") if v.strip())
                elif key in ("replicates", "seed"):
                    scalars[key] = int(value)
                elif key in ("output", "raw_output"):
                    scalars[key] = value
                else:
                    raise ConfigurationError(f"unknown key {key!r}")
            except (ValueError, DomainError) as exc:
                raise ConfigurationError(f"line {lineno}: {exc}") from None
        if not lists["copula"]:
            raise ConfigurationError("config needs at least one copula")
        kwargs = {"copulas": lists["copula"]}
        for key, name in (("marginals", "marginals"), ("n", "ns"), ("grid_k", "grid_ks"), ("estimators", "estimators")):
            if lists[key]:
                kwargs[name] = lists[key]
        kwargs.update(scalars)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read())


def ground_truth(cond):
    if cond.discrete:
        mx, my = (discrete.PoissonMarginal(m.lam) for m in cond.marginals)
        return discrete.discrete_ground_truth_mi(cond.copula, mx, my)
    return parametric.analytic_mi(cond.copula)


def estimator_config(name, grid_k, seed):
    if name == "GC":
        return EstimatorConfig(method=GC_PARAMETRIC, grid_k=grid_k, seed=seed)
    if name == "NPC_Naive":
        return EstimatorConfig(method=NPC_NAIVE, grid_k=grid_k, seed=seed)
    variant = LL2 if name == "NPC_LL2" else LL1
    return EstimatorConfig(
        method=NPC_LL, grid_k=grid_k, seed=seed, bandwidth=BandwidthConfig(variant=variant)
    )


@dataclass
class ReplicateResult:
    condition: int
    replicate: int
    estimator: str
    data_seed: int
    mi_bits: float
    mi_raw_bits: float
    alpha: float
    status: str


def _run_task(task):
    index, cond, replicate, estimators, master = task
    seed = cond.data_seed(master, replicate)
    out = []
    try:
        data = generate_dataset(cond.copula, cond.marginals, cond.n, seed)
        if cond.discrete:
            data = discrete.jitter(data, child_seed(seed, 1))
    except Exception as exc:  # recorded, never fatal
        return [
            ReplicateResult(index, replicate, e, seed, math.nan, math.nan, math.nan, f"error:{type(exc).__name__}")
            for e in estimators
        ]
    for name in estimators:
        try:
            est = estimate_mi(data, config=estimator_config(name, cond.grid_k, child_seed(seed, 2)))
            out.append(
                ReplicateResult(
                    index,
                    replicate,
                    name,
                    seed,
                    est.mi_bits,
                    est.metadata.get("mi_raw_bits", est.mi_bits),
                    est.metadata.get("alpha", math.nan),
                    "ok",
                )
            )
        except Exception as exc:
            out.append(
                ReplicateResult(index, replicate, name, seed, math.nan, math.nan, math.nan, f"error:{type(exc).__name__}")
            )
    return out


def worker_count():
    """Worker processes from ``NPC_THREADS`` (0 or unset means all CPUs)."""
    raw = os.environ.get("NPC_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"NPC_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise ConfigurationError("NPC_THREADS must be nonnegative")
    return value or (os.cpu_count() or 1)


@dataclass
class MetricRow:
    condition: int
    estimator: str
    cond: Condition
    truth_bits: float
    mean_mi: float
    abs_err: float
    norm_bias: float
    norm_var: float
    std_mi: float
    replicates: int
    failures: int
    seed: int
    bias_flag: bool

    def csv_fields(self):
        c = self.cond
        mx, my = c.marginals
        return [
            str(self.condition),
            self.estimator,
            str(c.n),
            str(c.grid_k),
            c.copula.family,
            format_value(c.copula.r),
            "" if c.copula.nu is None else format_value(c.copula.nu),
            mx.label(),
            my.label(),
            format_value(self.truth_bits),
            format_value(self.mean_mi),
            format_value(self.abs_err),
            format_value(self.norm_bias),
            format_value(self.norm_var),
            str(self.replicates),
            str(self.seed),
        ]


def summarize(index, cond, name, truth, results, seed):
    """Absolute error, normalized bias and normalized variance.

    With zero ground truth the bias and variance are reported unnormalized
    and ``bias_flag`` is set.
    """
    vals = np.array([r.mi_bits for r in results if r.status == "ok"])
    failures = len(results) - vals.size
    if vals.size == 0:
        nan = math.nan
        return MetricRow(index, name, cond, truth, nan, nan, nan, nan, nan, 0, failures, seed, truth == 0)
    bias = float(np.mean(vals - truth))
    var = float(np.var(vals))
    flag = truth == 0
    scale = 1.0 if flag else truth
    return MetricRow(
        index,
        name,
        cond,
        truth,
        float(np.mean(vals)),
        float(np.mean(np.abs(vals - truth))),
        bias / scale,
        var / scale,
        float(np.std(vals)),
        int(vals.size),
        failures,
        seed,
        flag,
    )


def _write_metrics(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(METRICS_HEADER + "\n")
        for row in rows:
            fh.write(",".join(row.csv_fields()) + "\n")


def _write_raw(path, conds, truths, results):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RAW_HEADER + "\n")
        for r in results:
            c = conds[r.condition]
            mx, my = c.marginals
            fields = [
                str(r.condition),
                str(r.replicate),
                r.estimator,
                str(c.n),
                str(c.grid_k),
                c.copula.family,
                format_value(c.copula.r),
                "" if c.copula.nu is None else format_value(c.copula.nu),
                mx.label(),
                my.label(),
                str(r.data_seed),
                format_value(truths[r.condition]),
                format_value(r.mi_bits),
                format_value(r.mi_raw_bits),
                format_value(r.alpha),
                r.status,
            ]
            fh.write(",".join(fields) + "\n")


def raw_path_for(output):
    root, ext = os.path.splitext(output)
    return f"{root}_raw{ext or '.csv'}"


def run_experiment(cfg, workers=None):
    """Run every condition x replicate and aggregate the metrics.

    Returns
    -------
    rows : list of MetricRow
        One per condition and estimator, in condition order.
    results : list of ReplicateResult
        Ordered by condition, replicate and estimator.
    """
    conds = cfg.conditions()
    truths = [ground_truth(c) for c in conds]
    if cfg.output is not None:
        # fail before the work if the destination is unwritable
        for path in (cfg.output, cfg.raw_output or raw_path_for(cfg.output)):
            with open(path, "a", encoding="utf-8"):
                pass
    tasks = [
        (i, c, rep, tuple(cfg.estimators), cfg.seed)
        for i, c in enumerate(conds)
        for rep in range(cfg.replicates)
    ]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            chunks = list(pool.map(_run_task, tasks))
    results = [r for chunk in chunks for r in chunk]
    rows = []
    for i, c in enumerate(conds):
        for name in cfg.estimators:
            sel = [r for r in results if r.condition == i and r.estimator == name]
            rows.append(summarize(i, c, name, truths[i], sel, cfg.seed))
    if cfg.output is not None:
        _write_metrics(cfg.output, rows)
        _write_raw(cfg.raw_output or raw_path_for(cfg.output), conds, truths, results)
    return rows, results
