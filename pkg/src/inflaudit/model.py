"""Ordinary least squares with Frisch-Waugh-Lovell reduction.

Any regression with controls (and/or an intercept) is reduced to a
through-origin univariate regression by residualizing both the feature of
interest and the outcome on the controls. The coefficient of the reduced
regression equals the coefficient of interest in the full model, and the
closed-form influence algebra applies verbatim to the reduced sample.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset, _as_readonly
from .errors import InsufficientData, SingularDesign

# Relative pivot threshold for declaring a design singular.
RANK_TOL = 1e-12


@dataclass(frozen=True)
class RegressionFit:
    """Result of fitting the (reduced) through-origin regression.

    Attributes
    ----------
    theta_hat : float
        Coefficient of interest.
    x : array, shape (N,)
        Reduced (partialled-out) feature.
    residuals : array, shape (N,)
        Full-sample residuals of the reduced regression.
    leverages : array, shape (N,)
        Reduced-form leverage scores ``x_i**2 / d_total``. Control-projection
        leverage is folded out by the partialling step; only the reduced form
        enters the influence formulas.
    d_total : float
        Sum of squared reduced feature values (plus the ridge penalty, if any).
    labels : tuple of str, optional
        Row identifiers carried over from the dataset.
    ridge : float
        Ridge penalty used in the solve. Influence formulas are not adjusted
        for ridge; a nonzero value triggers a warning at fit time.
    """

    theta_hat: float
    x: np.ndarray
    residuals: np.ndarray
    leverages: np.ndarray
    d_total: float
    labels: tuple[str, ...] | None = None
    ridge: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", _as_readonly(self.x))
        object.__setattr__(self, "residuals", _as_readonly(self.residuals))
        object.__setattr__(self, "leverages", _as_readonly(self.leverages))

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def predicted(self, x):
        """Fitted values of the reduced regression at feature values ``x``."""
        return self.theta_hat * np.asarray(x, dtype=float)


def _control_matrix(dataset: Dataset) -> np.ndarray | None:
    cols = []
    if dataset.intercept:
        cols.append(np.ones((dataset.n, 1)))
    if dataset.controls is not None:
        cols.append(dataset.controls)
    if not cols:
        return None
    return np.hstack(cols)


def partial_out(dataset: Dataset) -> Dataset:
    """Residualize x and y on the controls (and intercept, if flagged).

    Returns a univariate dataset whose through-origin slope equals the
    coefficient of interest of the full multivariate regression. With no
    controls and no intercept the input is returned unchanged.
    """
    z = _control_matrix(dataset)
    if z is None:
        return dataset
    if dataset.n <= z.shape[1] + 2:
        raise InsufficientData(
            f"N={dataset.n} too small for {z.shape[1]} control columns"
        )
    u, s, vt = np.linalg.svd(z, full_matrices=False)
    if s[0] <= 0.0 or s[-1] < RANK_TOL * s[0]:
        raise SingularDesign("control matrix is rank deficient")
    # Project out span(z) from both x and y.
    proj = u @ (u.T @ np.column_stack([dataset.x, dataset.y]))
    x_res = dataset.x - proj[:, 0]
    y_res = dataset.y - proj[:, 1]
    return Dataset(
        x=x_res, y=y_res, controls=None, labels=dataset.labels, intercept=False
    )


def fit_ols(dataset: Dataset, ridge: float = 0.0) -> RegressionFit:
    """Fit OLS and return the reduced-form fit used by influence analysis.

    Controls and intercept are removed first via :func:`partial_out`.
    ``ridge`` adds a penalty lambda to the denominator of the through-origin
    solve; the influence formulas are *not* adjusted for it.
    """
    if ridge < 0:
        raise ValueError("ridge penalty must be >= 0")
    reduced = partial_out(dataset)
    x, y = reduced.x, reduced.y
    d = float(x @ x)
    # Singular if the residualized feature is negligible relative to the
    # original feature scale (or identically zero when nothing was removed).
    d_orig = float(dataset.x @ dataset.x)
    if d <= (RANK_TOL ** 2) * d_orig or d == 0.0:
        raise SingularDesign("feature has zero variance after partialling out")
    if ridge > 0:
        warnings.warn(
            "ridge > 0: influence formulas are not adjusted for the penalty",
            stacklevel=2,
        )
    d_total = d + ridge
    theta = float(x @ y) / d_total
    residuals = y - theta * x
    leverages = x * x / d_total
    return RegressionFit(
        theta_hat=theta,
        x=x,
        residuals=residuals,
        leverages=leverages,
        d_total=d_total,
        labels=reduced.labels,
        ridge=ridge,
    )
