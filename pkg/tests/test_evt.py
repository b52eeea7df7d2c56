import numpy as np
import pytest

from inflaudit import (
    EvdModel,
    correct_block_location,
    correct_block_scale_frechet,
    evd_cdf,
    evd_quantile,
    fit_gev_mle,
    fit_gumbel_mle,
    hill_tail_index,
)
from inflaudit.errors import DegenerateSample, InsufficientTail
from inflaudit.evt import (
    _moment_init,
    apply_block_correction,
    frechet_from_gev,
    gev_nll,
    gumbel_nll,
    gumbel_shape_lr_test,
)


def gumbel_sample(rng, size, a=0.0, b=1.0):
    return a - b * np.log(-np.log(rng.uniform(size=size)))


def frechet_sample(rng, size, gamma):
    return np.power(-np.log(rng.uniform(size=size)), -gamma)


def test_model_validation():
    with pytest.raises(ValueError):
        EvdModel("gumbel", 0.0, -1.0)
    with pytest.raises(ValueError):
        EvdModel("gumbel", 0.0, 1.0, gev_shape=0.2)
    with pytest.raises(ValueError):
        EvdModel("frechet", 0.0, 1.0, gev_shape=0.0)
    assert EvdModel("frechet", 0.0, 1.0, gev_shape=0.25).xi == 4.0
    assert EvdModel("gumbel", 0.0, 1.0).xi == np.inf


def test_cdf_closed_form_anchors():
    gumbel = EvdModel("gumbel", a=1.5, b=2.0)
    assert evd_cdf(gumbel, 1.5) == pytest.approx(np.exp(-1), abs=1e-15)
    frechet = EvdModel("frechet", a=1.0, b=3.0, gev_shape=0.5)
    assert evd_cdf(frechet, 4.0) == pytest.approx(np.exp(-1), abs=1e-15)
    assert evd_cdf(frechet, 1.0) == 0.0
    assert evd_cdf(gumbel, 1e9) == pytest.approx(1.0, abs=1e-12)
    assert evd_cdf(frechet, 1e12) == pytest.approx(1.0, abs=1e-12)


def test_cdf_monotone_in_range():
    rng = np.random.default_rng(1)
    for model in (EvdModel("gumbel", 0.3, 1.7),
                  EvdModel("frechet", -1.0, 2.0, gev_shape=0.3)):
        x = np.sort(rng.uniform(-5, 50, size=200))
        p = evd_cdf(model, x)
        assert np.all(np.diff(p) >= 0)
        assert np.all((p >= 0) & (p <= 1))


def test_quantile_round_trip():
    rng = np.random.default_rng(2)
    q = rng.uniform(0.001, 0.999, size=100)
    for model in (EvdModel("gumbel", 1.0, 0.5),
                  EvdModel("frechet", 2.0, 1.5, gev_shape=0.4)):
        x = evd_quantile(model, q)
        assert np.max(np.abs(evd_cdf(model, x) - q)) <= 1e-10
        ordered = evd_quantile(model, np.sort(q))
        assert np.all(np.diff(ordered) >= 0)
    assert evd_quantile(EvdModel("gumbel", 0.0, 1.0), np.exp(-1)) == \
        pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        evd_quantile(EvdModel("gumbel", 0.0, 1.0), 1.0)


def test_gumbel_mle_recovery():
    draws = gumbel_sample(np.random.default_rng(5), 10_000, a=3.0, b=2.0)
    a, b = fit_gumbel_mle(draws)
    assert abs(a - 3.0) <= 0.05
    assert abs(b - 2.0) <= 0.05


def test_gumbel_mle_equivariance():
    draws = gumbel_sample(np.random.default_rng(6), 500)
    a, b = fit_gumbel_mle(draws)
    a_shift, b_shift = fit_gumbel_mle(draws + 4.2)
    assert abs(a_shift - (a + 4.2)) <= 1e-8
    assert abs(b_shift - b) <= 1e-8
    a_scale, b_scale = fit_gumbel_mle(draws * 3.0)
    assert abs(a_scale - 3.0 * a) <= 1e-8
    assert abs(b_scale - 3.0 * b) <= 1e-8


def test_degenerate_sample_rejected():
    with pytest.raises(DegenerateSample):
        fit_gumbel_mle(np.ones(50))
    with pytest.raises(DegenerateSample):
        fit_gev_mle(np.full(50, 2.5))


def test_gev_mle_recovers_gumbel_shape():
    draws = gumbel_sample(np.random.default_rng(11), 10_000)
    a, b, gamma = fit_gev_mle(draws)
    assert abs(gamma) <= 0.05
    assert abs(a) <= 0.05 and abs(b - 1.0) <= 0.05


def test_gev_mle_recovers_frechet_shape():
    draws = frechet_sample(np.random.default_rng(11), 10_000, gamma=0.2)
    _, _, gamma = fit_gev_mle(draws)
    assert abs(gamma - 0.2) <= 0.05


def test_gev_fixed_shape_zero_matches_gumbel_mle():
    draws = gumbel_sample(np.random.default_rng(11), 10_000)
    a_g, b_g = fit_gumbel_mle(draws)
    a, b, gamma = fit_gev_mle(draws, fixed_shape=0.0)
    assert gamma == 0.0
    assert abs(a - a_g) <= 1e-6
    assert abs(b - b_g) <= 1e-6


def test_mle_never_worse_than_moment_start():
    rng = np.random.default_rng(12)
    for _ in range(5):
        draws = gumbel_sample(rng, 200, a=rng.normal(), b=rng.uniform(0.5, 3))
        a0, b0 = _moment_init(draws)
        a, b = fit_gumbel_mle(draws)
        assert gumbel_nll((a, b), draws) <= gumbel_nll((a0, b0), draws) + 1e-9
        ag, bg, gg = fit_gev_mle(draws)
        assert gev_nll((ag, bg, gg), draws) <= gev_nll((a0, b0, 0.0), draws) + 1e-9


def test_lr_test_separates_families():
    rng = np.random.default_rng(5)
    _, p_gumbel = gumbel_shape_lr_test(gumbel_sample(rng, 2000))
    assert p_gumbel > 0.10
    stat, p_frechet = gumbel_shape_lr_test(frechet_sample(rng, 2000, gamma=0.3))
    assert p_frechet < 0.001
    assert stat > 0


def test_hill_on_pareto_tail():
    rng = np.random.default_rng(0)
    pareto = rng.pareto(5.0, 10_000) + 1.0
    assert abs(hill_tail_index(pareto) - 0.2) <= 0.05


def test_hill_on_light_tail_registers_near_zero():
    normal = np.random.default_rng(0).standard_normal(10_000)
    assert hill_tail_index(normal, k_frac=0.005) <= 0.1


def test_hill_scale_invariance_and_guards():
    rng = np.random.default_rng(3)
    sample = rng.pareto(4.0, 200) + 1.0
    assert hill_tail_index(sample * 17.0) == pytest.approx(
        hill_tail_index(sample), rel=1e-12)
    with pytest.raises(InsufficientTail):
        hill_tail_index(sample[:30])
    with pytest.raises(ValueError):
        hill_tail_index(sample, k_frac=0.5)


def test_block_corrections_closed_forms():
    assert correct_block_location(1.0, 2.0, 1) == 1.0
    assert correct_block_location(1.0, 2.0, 8) == pytest.approx(
        1.0 + 2.0 * np.log(8.0), abs=1e-15)
    assert correct_block_scale_frechet(3.0, 0.5, 1) == 3.0
    assert correct_block_scale_frechet(3.0, 0.5, 4) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        correct_block_scale_frechet(3.0, -0.1, 4)


def test_apply_block_correction():
    gumbel = EvdModel("gumbel", 2.0, 1.5)
    corrected = apply_block_correction(gumbel, 16)
    assert corrected.a == pytest.approx(2.0 + 1.5 * np.log(16))
    assert corrected.b == 1.5 and corrected.corrected
    frechet = frechet_from_gev(1.0, 0.5, 0.25)
    corrected = apply_block_correction(frechet, 16)
    assert corrected.b == pytest.approx(frechet.b * 2.0)  # 16**0.25
    assert corrected.a == frechet.a
    with pytest.raises(ValueError):
        apply_block_correction(corrected, 16)


def test_gumbel_location_correction_sampling_oracle():
    # maxima of blocks of 256 from N=4096 iid Gumbel(0,1); the corrected
    # location should recover log(N), the full-sample Gumbel location
    n, m = 4096, 16
    target = np.log(n)
    tildes = np.empty(300)
    for rep in range(300):
        rng = np.random.default_rng([42, rep])
        maxima = gumbel_sample(rng, (m, n // m)).max(axis=1)
        a, b = fit_gumbel_mle(maxima)
        tildes[rep] = correct_block_location(a, b, m)
    assert abs(tildes.mean() - target) <= 0.1


def test_frechet_scale_correction_sampling_oracle():
    # M-fold maxima of Frechet(0, 1, xi=4) should match the corrected model
    m, gamma = 16, 0.25
    rng = np.random.default_rng(43)
    maxima = frechet_sample(rng, (20_000, m), gamma).max(axis=1)
    corrected = apply_block_correction(
        EvdModel("frechet", 0.0, 1.0, gev_shape=gamma), m
    )
    for q in (0.25, 0.5, 0.75):
        empirical = np.quantile(maxima, q)
        assert abs(empirical / evd_quantile(corrected, q) - 1.0) <= 0.05
