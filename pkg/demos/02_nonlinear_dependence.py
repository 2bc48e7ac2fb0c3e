"""
Dependence without correlation
==============================

A Student-t copula with zero correlation and few degrees of freedom
couples the variables through their joint extremes only. The linear
correlation is zero, so a Gaussian-copula fit reports almost no
information, while the nonparametric copula picks up the sharp corners.
"""
# %%
import numpy as np

from npcmi import CopulaSpec, EstimatorConfig, analytic_mi, estimate_mi, estimate_mi_gc, rosenblatt_sample

spec = CopulaSpec.student_t(0.0, 0.2)
truth = analytic_mi(spec)
print(f"true MI {truth:.3f} bits")

# %% Compare the local-likelihood fit with the plain kernel estimate.
ll, naive, gc = [], [], []
for seed in range(10):
    uv = rosenblatt_sample(spec, 1024, seed)
    ll.append(estimate_mi(uv).mi_bits)
    naive.append(estimate_mi(uv, config=EstimatorConfig(method="NPC_Naive")).mi_bits)
    gc.append(estimate_mi_gc(uv).mi_bits)

for name, vals in (("local likelihood", ll), ("naive kernel", naive), ("Gaussian copula", gc)):
    vals = np.asarray(vals)
    print(f"{name:>16}: mean {vals.mean():.3f}, mean abs error {np.abs(vals - truth).mean():.3f}")

# %% Near the corners the kernel estimate is smoothed flat; the local
# log-quadratic fit corrects that bias, which is where most of the gap comes from.
