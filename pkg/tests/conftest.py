import numpy as np
import pytest

from inflaudit import Dataset


def make_dataset(rng, n, n_controls=0, intercept=False):
    """Random regression sample with unit coefficient and Normal noise."""
    x = rng.standard_normal(n)
    r = rng.standard_normal(n)
    controls = None
    y = x + r
    if n_controls:
        controls = rng.standard_normal((n, n_controls))
        y = y + controls @ rng.standard_normal(n_controls)
    if intercept:
        y = y + rng.standard_normal()
    return Dataset(x=x, y=y, controls=controls, intercept=intercept)


def lstsq_coefficient(dataset):
    """Coefficient of x from a direct multivariate least-squares solve."""
    cols = [dataset.x]
    if dataset.intercept:
        cols.append(np.ones(dataset.n))
    if dataset.controls is not None:
        cols.extend(dataset.controls.T)
    beta, *_ = np.linalg.lstsq(np.column_stack(cols), dataset.y, rcond=None)
    return float(beta[0])


@pytest.fixture
def rng():
    return np.random.default_rng(0)
