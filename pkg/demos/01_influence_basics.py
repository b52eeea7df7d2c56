"""Exact influence on a small sample, against brute-force refits.

Builds a 30-point regression with one planted high-leverage outlier, then
walks through single-point influence, set influence, and the greedy vs
exhaustive search, checking everything against from-scratch refits.
"""

import numpy as np

from inflaudit import (
    Dataset,
    SearchSpec,
    exhaustive_most_influential,
    first_order_influence,
    fit_ols,
    greedy_most_influential,
    influence_set,
    influence_single,
    refit_influence_oracle,
)

rng = np.random.default_rng(3)
x = rng.standard_normal(30)
y = 1.5 * x + rng.standard_normal(30)
x[0], y[0] = 3.5, 9.5  # high leverage, large residual
ds = Dataset(x=x, y=y)

fit = fit_ols(ds)
print(f"theta_hat = {fit.theta_hat:.4f} on N = {fit.n}")

print("\ntop three single-point influences (closed form vs refit):")
singles = sorted(range(30), key=lambda i: -abs(influence_single(fit, i)))
for i in singles[:3]:
    closed = influence_single(fit, i)
    refit = refit_influence_oracle(ds, [i])
    print(f"  point {i:2d}: delta = {closed:+.5f}  refit = {refit:+.5f}")

positive = [i for i in singles if influence_single(fit, i) > 0]
pair = influence_set(fit, positive[:2])
print(f"\npair {pair.indices}: exact delta = {pair.delta:+.5f}")
print(f"  first-order estimate = {first_order_influence(fit, pair.indices):+.5f}"
      "  (underestimates when contributions share a sign)")

greedy = greedy_most_influential(fit, SearchSpec(k=3))
exact = exhaustive_most_influential(fit, 3)
print(f"\ngreedy k<=3:     {greedy.indices} with delta {greedy.delta:+.5f}")
print(f"exhaustive k<=3: {exact.indices} with delta {exact.delta:+.5f}")
