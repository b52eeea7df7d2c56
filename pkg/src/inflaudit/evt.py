"""Extreme value distributions: Gumbel/Frechet models, MLE, tail indices.

Conventions: ``gamma`` denotes the GEV shape (gamma = 0 is Gumbel, gamma > 0
is Frechet); the Frechet tail coefficient is ``xi = 1 / gamma``. Frechet
models carry (location, scale) in the classical Frechet parameterization,
i.e. cdf(x) = exp(-((x - a)/b) ** -xi) for x > a.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.special import logsumexp

from .errors import DegenerateSample, NonConvergence

GUMBEL = "gumbel"
FRECHET = "frechet"

# Euler-Mascheroni constant, for moment-based initialization.
_EULER_GAMMA = 0.5772156649015329

# Shape box outside of which GEV likelihood maximization is refused.
SHAPE_MIN, SHAPE_MAX = -0.5, 0.95

_PENALTY = 1e12


@dataclass(frozen=True)
class EvdModel:
    """A fitted extreme value model.

    ``gev_shape`` is zero exactly when ``family`` is Gumbel. ``m_blocks``
    records the number of block maxima used in fitting and ``corrected``
    whether the block-size correction has been applied.
    """

    family: str
    a: float
    b: float
    gev_shape: float = 0.0
    m_blocks: int | None = None
    corrected: bool = False

    def __post_init__(self):
        if self.family not in (GUMBEL, FRECHET):
            raise ValueError(f"unknown family {self.family!r}")
        if self.b <= 0:
            raise ValueError("scale must be positive")
        if (self.family == GUMBEL) != (self.gev_shape == 0.0):
            raise ValueError("family is Gumbel iff gev_shape == 0")
        if self.family == FRECHET and self.gev_shape <= 0:
            raise ValueError("Frechet requires gev_shape > 0")

    @property
    def xi(self) -> float:
        """Frechet tail coefficient (infinite in the Gumbel case)."""
        return np.inf if self.gev_shape == 0.0 else 1.0 / self.gev_shape


def frechet_from_gev(mu: float, sigma: float, gamma: float, **kwargs) -> EvdModel:
    """Convert GEV(mu, sigma, gamma > 0) into the Frechet parameterization."""
    if gamma <= 0:
        raise ValueError("need gamma > 0 for a Frechet model")
    return EvdModel(
        family=FRECHET,
        a=mu - sigma / gamma,
        b=sigma / gamma,
        gev_shape=gamma,
        **kwargs,
    )


def evd_cdf(model: EvdModel, x):
    """CDF of the fitted model, elementwise over ``x``."""
    x = np.asarray(x, dtype=float)
    if model.family == GUMBEL:
        out = np.exp(-np.exp(-(x - model.a) / model.b))
    else:
        z = (x - model.a) / model.b
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(z > 0, np.exp(-np.power(np.maximum(z, 1e-300), -model.xi)), 0.0)
    return float(out) if out.ndim == 0 else out


def evd_quantile(model: EvdModel, q):
    """Quantile function; inverse of :func:`evd_cdf` on (0, 1)."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0) or np.any(q >= 1):
        raise ValueError("quantile levels must lie strictly in (0, 1)")
    if model.family == GUMBEL:
        out = model.a - model.b * np.log(-np.log(q))
    else:
        out = model.a + model.b * np.power(-np.log(q), -model.gev_shape)
    return float(out) if out.ndim == 0 else out


def _check_maxima(maxima, minimum):
    m = np.asarray(maxima, dtype=float)
    if m.ndim != 1 or m.size < minimum:
        raise ValueError(f"need a vector of at least {minimum} maxima")
    if not np.all(np.isfinite(m)):
        raise ValueError("maxima must be finite")
    if np.ptp(m) == 0.0:
        raise DegenerateSample("all maxima are equal")
    return m


def gumbel_nll(params, x) -> float:
    """Negative Gumbel log-likelihood at (a, b)."""
    a, b = params
    if b <= 0:
        return _PENALTY + abs(b)
    z = (x - a) / b
    return float(x.size * np.log(b) + z.sum() + np.exp(-z).sum())


def fit_gumbel_mle(maxima, tol: float = 1e-10, max_iter: int = 200):
    """Maximum likelihood Gumbel fit via the profile likelihood in b.

    Solves the one-dimensional score equation for the scale with a
    safeguarded bracketing root-finder, then recovers the location in
    closed form.
    """
    x = _check_maxima(maxima, 8)
    spread = float(np.ptp(x))
    mean = float(x.mean())

    def score(b):
        # b - mean(x) + weighted mean of x under softmax(-x / b)
        u = -x / b
        w = np.exp(u - logsumexp(u))
        return b - mean + float(w @ x)

    lo, hi = 1e-8 * spread, 10.0 * spread
    flo, fhi = score(lo), score(hi)
    if flo * fhi > 0:
        raise NonConvergence("profile score does not bracket a root")
    try:
        b = brentq(score, lo, hi, xtol=tol * spread, maxiter=max_iter)
    except RuntimeError as exc:
        raise NonConvergence(str(exc)) from exc
    a = -b * float(logsumexp(-x / b) - np.log(x.size))
    return float(a), float(b)


def gev_nll(params, x) -> float:
    """Negative GEV log-likelihood at (a, b, gamma), penalized off support."""
    a, b, gamma = params
    if b <= 0:
        return _PENALTY + abs(b)
    if not SHAPE_MIN < gamma < SHAPE_MAX:
        return _PENALTY + abs(gamma)
    z = (x - a) / b
    if abs(gamma) < 1e-8:
        return float(x.size * np.log(b) + z.sum() + np.exp(-z).sum())
    t = 1.0 + gamma * z
    if np.any(t <= 0):
        return _PENALTY + float(np.sum(np.maximum(-t, 0.0)))
    logt = np.log(t)
    return float(
        x.size * np.log(b)
        + (1.0 + 1.0 / gamma) * logt.sum()
        + np.exp(-logt / gamma).sum()
    )


def _moment_init(x):
    b0 = float(x.std(ddof=1)) * np.sqrt(6.0) / np.pi
    a0 = float(x.mean()) - _EULER_GAMMA * b0
    return a0, max(b0, 1e-12)


def fit_gev_mle(maxima, fixed_shape: float | None = None, min_size: int = 20):
    """Maximum likelihood GEV fit over (a, b, gamma).

    The shape is constrained to the box (-0.5, 0.95); observations outside
    the trial support are handled by a penalized likelihood. Multistart:
    moment-based (a, b) with several shape starts. With ``fixed_shape``
    only location and scale are optimized.

    Returns ``(a, b, gamma)`` in the GEV parameterization.
    """
    x = _check_maxima(maxima, min_size)
    a0, b0 = _moment_init(x)

    if fixed_shape is not None:
        if not SHAPE_MIN < fixed_shape < SHAPE_MAX:
            raise ValueError(f"fixed shape {fixed_shape} outside the fitting box")
        shape_starts = [fixed_shape]
    else:
        shape_starts = [-0.1, 0.0, 0.1, 0.3]

    best = None
    for g0 in shape_starts:
        if fixed_shape is not None:
            fun = lambda p: gev_nll((p[0], p[1], fixed_shape), x)
            start = np.array([a0, b0])
        else:
            fun = lambda p: gev_nll(p, x)
            start = np.array([a0, b0, g0])
        res = minimize(
            fun,
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 5000},
        )
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not np.isfinite(best.fun) or best.fun >= _PENALTY:
        raise NonConvergence("GEV likelihood maximization failed from all starts")
    if fixed_shape is not None:
        a, b = best.x
        gamma = float(fixed_shape)
    else:
        a, b, gamma = best.x
    return float(a), float(b), float(gamma)


def gumbel_shape_lr_test(maxima):
    """Likelihood-ratio statistic for gamma = 0 against a free GEV shape.

    Returns ``(statistic, p_value)``; the statistic is compared against a
    chi-squared distribution with one degree of freedom.
    """
    from scipy.stats import chi2

    x = _check_maxima(maxima, 20)
    a_g, b_g = fit_gumbel_mle(x)
    a, b, gamma = fit_gev_mle(x)
    stat = 2.0 * (gumbel_nll((a_g, b_g), x) - gev_nll((a, b, gamma), x))
    stat = max(stat, 0.0)
    return float(stat), float(chi2.sf(stat, df=1))


def hill_tail_index(sample, k_frac: float | None = None) -> float:
    """Hill estimate of the GEV shape from the upper tail of ``|sample|``.

    Uses the top ``k = ceil(k_frac * N)`` order statistics. The estimate is
    ``gamma_hat = mean(log(X_(i) / X_(k+1)))``, the MLE under a Pareto tail;
    its reciprocal estimates the tail coefficient xi.
    """
    from .errors import InsufficientTail

    s = np.abs(np.asarray(sample, dtype=float))
    s = s[np.isfinite(s) & (s > 0)]
    n = s.size
    if n < 50:
        raise InsufficientTail(f"need >= 50 positive values, got {n}")
    if k_frac is None:
        k_frac = min(0.1, np.sqrt(n) / n)
    if not 0.0 < k_frac <= 0.2:
        raise ValueError("k_frac must lie in (0, 0.2]")
    k = int(np.ceil(k_frac * n))
    if k + 1 > n:
        raise InsufficientTail(f"k={k} leaves no threshold order statistic")
    top = np.sort(s)[::-1][: k + 1]
    return float(np.mean(np.log(top[:k] / top[k])))


def correct_block_location(a_hat: float, b: float, m_blocks: int) -> float:
    """Gumbel location correction from block-level to full-sample maxima."""
    if m_blocks < 1:
        raise ValueError("block count must be >= 1")
    return a_hat + b * np.log(m_blocks)


def correct_block_scale_frechet(
    b_hat: float, gamma: float, m_blocks: int
) -> float:
    """Frechet scale correction via max-stability: b * M ** gamma."""
    if m_blocks < 1:
        raise ValueError("block count must be >= 1")
    if gamma <= 0:
        raise ValueError("Frechet correction requires gamma > 0")
    return b_hat * m_blocks ** gamma


def apply_block_correction(model: EvdModel, m_blocks: int) -> EvdModel:
    """Rescale a block-level model to the full-sample maximum.

    Gumbel: shift the location by b * log(M). Frechet: scale by M ** gamma
    (max-stability); the location is unchanged.
    """
    if model.corrected:
        raise ValueError("model is already corrected")
    if model.family == GUMBEL:
        return replace(
            model,
            a=correct_block_location(model.a, model.b, m_blocks),
            m_blocks=m_blocks,
            corrected=True,
        )
    return replace(
        model,
        b=correct_block_scale_frechet(model.b, model.gev_shape, m_blocks),
        m_blocks=m_blocks,
        corrected=True,
    )
