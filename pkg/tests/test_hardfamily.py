import math

import numpy as np
import pytest

from lagrelax.dual import dual_eval
from lagrelax.errors import (
    ConfigError,
    DegenerateFamilyError,
    DimensionError,
    DomainError,
)
from lagrelax.hardfamily import (
    HardFamilySpec,
    kl_and_fano,
    max_population_risk,
    objective_variance,
    optimal_multiplier,
    optimal_warmstart,
    population_risk,
    sample_instance,
    sample_objectives,
    sharpness_gap,
)

SPEC1 = HardFamilySpec(s=1, mu=1.0, sigma=1.0, epsilon=0.2, v=(1,), pi_max=3.0)


def test_spec_validation():
    with pytest.raises(DomainError):
        HardFamilySpec(s=1, mu=2.0, sigma=1.5, epsilon=0.2, v=(1,), pi_max=3.0)  # mu+sigma >= pi_max
    with pytest.raises(DomainError):
        HardFamilySpec(s=1, mu=1.0, sigma=1.0, epsilon=0.6, v=(1,), pi_max=3.0)
    with pytest.raises(DomainError):
        HardFamilySpec(s=2, mu=1.0, sigma=1.0, epsilon=0.2, v=(1, 2), pi_max=3.0)
    with pytest.raises(DimensionError):
        HardFamilySpec(s=2, mu=1.0, sigma=1.0, epsilon=0.2, v=(1,), pi_max=3.0)


def test_per_coordinate_risk_frozen_points():
    # v_k = 1, p = 0.6: at the upper kink pi = mu + sigma = 2 the middle-region
    # formula gives p*pi/2 + (1-p)*(mu - pi/2) = 0.6
    assert population_risk(SPEC1, [2.0]) == pytest.approx(0.6, abs=1e-12)
    # at the first kink pi = mu: pi/2
    assert population_risk(SPEC1, [1.0]) == pytest.approx(0.5, abs=1e-12)
    assert population_risk(SPEC1, [0.0]) == 0.0


def test_population_risk_additive_across_coordinates():
    spec = HardFamilySpec(s=3, mu=1.0, sigma=1.0, epsilon=0.2, v=(1, 0, 1), pi_max=3.0)
    parts = []
    for vk, pik in zip((1, 0, 1), (2.0, 1.0, 0.3)):
        one = HardFamilySpec(s=1, mu=1.0, sigma=1.0, epsilon=0.2, v=(vk,), pi_max=3.0)
        parts.append(population_risk(one, [pik]))
    assert population_risk(spec, [2.0, 1.0, 0.3]) == pytest.approx(sum(parts), abs=1e-12)


def test_population_risk_domain_errors():
    with pytest.raises(DomainError):
        population_risk(SPEC1, [3.5])  # outside the box
    warm = HardFamilySpec(s=1, mu=1.0, sigma=1.0, epsilon=0.2, v=(1,), pi_max=2.0,
                          variant="warmstart-lb")
    with pytest.raises(ConfigError):
        population_risk(warm, [1.0])


def test_optimal_multiplier_closed_form():
    spec = HardFamilySpec(s=2, mu=1.0, sigma=1.0, epsilon=0.2, v=(1, 0), pi_max=3.0)
    assert np.array_equal(optimal_multiplier(spec), [2.0, 1.0])
    zeros = HardFamilySpec(s=3, mu=1.5, sigma=0.5, epsilon=0.1, v=(0, 0, 0), pi_max=3.0)
    assert np.array_equal(optimal_multiplier(zeros), [1.5, 1.5, 1.5])


def test_optimal_multiplier_degenerate_epsilon():
    spec = HardFamilySpec(s=1, mu=1.0, sigma=1.0, epsilon=0.0, v=(1,), pi_max=3.0)
    with pytest.raises(DegenerateFamilyError):
        optimal_multiplier(spec)


def test_grid_argmax_matches_closed_form():
    rng = np.random.default_rng(55)
    for _ in range(5):
        s = int(rng.integers(1, 4))
        mu = float(rng.uniform(0.5, 1.5))
        sigma = float(rng.uniform(0.3, 1.0))
        eps = float(rng.uniform(0.05, 0.45))
        v = tuple(int(b) for b in rng.integers(0, 2, size=s))
        spec = HardFamilySpec(s=s, mu=mu, sigma=sigma, epsilon=eps, v=v, pi_max=3.0)
        star = np.asarray(optimal_multiplier(spec))
        # risk is a sum of per-coordinate terms; maximize each on a fine grid
        grid = np.arange(0.0, 3.0 + 1e-9, 1e-3)
        for k in range(s):
            one = HardFamilySpec(s=1, mu=mu, sigma=sigma, epsilon=eps, v=(v[k],), pi_max=3.0)
            risks = np.array([population_risk(one, [g]) for g in grid[::10]])
            coarse = grid[::10][int(np.argmax(risks))]
            assert abs(coarse - star[k]) <= 1e-2 + 1e-9


def test_max_population_risk_consistent():
    spec = HardFamilySpec(s=2, mu=1.0, sigma=1.0, epsilon=0.2, v=(1, 0), pi_max=3.0)
    direct = population_risk(spec, optimal_multiplier(spec))
    assert max_population_risk(spec) == pytest.approx(direct, abs=1e-12)


def test_sharpness_frozen_examples():
    lhs, rhs = sharpness_gap(SPEC1, [1.0])
    assert lhs == pytest.approx(0.1, abs=1e-12)
    assert rhs == pytest.approx(0.1, abs=1e-12)
    lhs, rhs = sharpness_gap(SPEC1, [0.5])
    assert lhs == pytest.approx(0.35, abs=1e-12)
    assert rhs == pytest.approx(0.15, abs=1e-12)
    lhs, rhs = sharpness_gap(SPEC1, optimal_multiplier(SPEC1))
    assert lhs == pytest.approx(0.0, abs=1e-12)
    assert rhs == pytest.approx(0.0, abs=1e-12)


def test_sharpness_inequality_randomized():
    rng = np.random.default_rng(59)
    for _ in range(500):
        s = int(rng.integers(1, 5))
        mu = float(rng.uniform(0.5, 1.5))
        sigma = float(rng.uniform(0.3, 1.2))
        eps = float(rng.uniform(0.01, 0.49))
        v = tuple(int(b) for b in rng.integers(0, 2, size=s))
        spec = HardFamilySpec(s=s, mu=mu, sigma=sigma, epsilon=eps, v=v, pi_max=3.0)
        pi = rng.uniform(0.0, 3.0, size=s)
        lhs, rhs = sharpness_gap(spec, pi)
        assert lhs >= rhs - 1e-12


def test_sampling_frequency_biased():
    rng = np.random.default_rng(61)
    c = sample_objectives(SPEC1, rng, 1_000_000)
    freq_hi = float(np.mean(c[:, 0] == 2.0))
    assert abs(freq_hi - 0.6) < 0.002


def test_sampling_frequency_unbiased():
    spec = HardFamilySpec(s=2, mu=1.0, sigma=1.0, epsilon=0.0, v=(1, 0), pi_max=3.0)
    rng = np.random.default_rng(67)
    c = sample_objectives(spec, rng, 1_000_000)
    for k in range(2):
        assert abs(float(np.mean(c[:, k] == 2.0)) - 0.5) < 0.002


def test_sample_instance_is_restricted():
    rng = np.random.default_rng(71)
    inst = sample_instance(SPEC1, rng)
    assert inst.is_restricted
    assert inst.c[0] in (1.0, 2.0)


def test_warmstart_variant_supports():
    spec = HardFamilySpec(s=4, mu=1.0, sigma=1.0, epsilon=0.3, v=(1, 0, 1, 0),
                          pi_max=2.0, variant="warmstart-lb")
    rng = np.random.default_rng(73)
    c = sample_objectives(spec, rng, 10_000)
    assert set(np.unique(c)) == {1.0, 2.0}


def test_warmstart_population_mean():
    # E[c_k] = 3/2 + eps*(2 v_k - 1)/2 for the two-point law on {1, 2}
    spec = HardFamilySpec(s=2, mu=1.0, sigma=1.0, epsilon=0.3, v=(1, 0),
                          pi_max=2.0, variant="warmstart-lb")
    rng = np.random.default_rng(79)
    c = sample_objectives(spec, rng, 1_000_000)
    want = np.array([1.5 + 0.15, 1.5 - 0.15])
    assert np.all(np.abs(c.mean(axis=0) - want) < 0.002)
    assert np.allclose(np.asarray(optimal_warmstart(spec)), want, atol=1e-12)


def test_objective_variance_two_point():
    spec = HardFamilySpec(s=2, mu=1.0, sigma=1.0, epsilon=0.3, v=(1, 0),
                          pi_max=2.0, variant="warmstart-lb")
    # Var = sigma^2 p (1-p) with p = (1 +/- eps)/2
    p = (1 + 0.3) / 2
    assert objective_variance(spec)[0] == pytest.approx(p * (1 - p), abs=1e-15)
    q = (1 - 0.3) / 2
    assert objective_variance(spec)[1] == pytest.approx(q * (1 - q), abs=1e-15)


def test_population_risk_matches_monte_carlo():
    rng = np.random.default_rng(83)
    n = 100_000
    for _ in range(20):
        s = int(rng.integers(1, 4))
        mu = float(rng.uniform(0.5, 1.5))
        sigma = float(rng.uniform(0.3, 1.2))
        eps = float(rng.uniform(0.05, 0.45))
        v = tuple(int(b) for b in rng.integers(0, 2, size=s))
        spec = HardFamilySpec(s=s, mu=mu, sigma=sigma, epsilon=eps, v=v, pi_max=3.0)
        pi = rng.uniform(0.0, 3.0, size=s)
        c = sample_objectives(spec, rng, n)
        vals = np.minimum(0.5 * pi, c - 0.5 * pi).sum(axis=1)
        mc, se = float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n))
        assert abs(mc - population_risk(spec, pi)) <= 3.0 * se + 1e-9


def test_population_risk_agrees_with_dual_eval():
    # the closed form is an expectation of dual_eval values; spot-check one draw
    rng = np.random.default_rng(89)
    inst = sample_instance(SPEC1, rng)
    pi = np.array([1.7])
    ev = dual_eval(pi, inst)
    assert ev.value == pytest.approx(
        float(np.minimum(0.5 * pi, inst.c - 0.5 * pi).sum()), abs=1e-12
    )


def test_kl_frozen_value():
    diag = kl_and_fano(1, 1, 0.2, (1,), (0,))
    expected = 0.6 * math.log(1.5) + 0.4 * math.log(2.0 / 3.0)
    assert diag.kl_one_sample == pytest.approx(expected, abs=1e-12)
    assert diag.kl_one_sample == pytest.approx(0.081093, abs=5e-7)
    assert diag.hamming_distance == 1
    assert diag.kl_quadratic_bound == pytest.approx(4 * 1 * 1 * 0.04, abs=1e-12)


def test_kl_zero_for_identical():
    diag = kl_and_fano(3, 10, 0.2, (1, 0, 1), (1, 0, 1))
    assert diag.kl_one_sample == 0.0
    assert diag.kl_n_sample == 0.0


def test_kl_scales_with_n_and_distance():
    a = kl_and_fano(4, 1, 0.3, (1, 1, 0, 0), (0, 0, 0, 0))
    b = kl_and_fano(4, 7, 0.3, (1, 1, 0, 0), (0, 0, 0, 0))
    assert a.hamming_distance == 2
    assert b.kl_n_sample == pytest.approx(7 * a.kl_n_sample, rel=1e-12)
    assert a.kl_one_sample == pytest.approx(2 * a.kl_per_flipped_coordinate, rel=1e-12)


def test_kl_dominated_by_quadratic_bound():
    for eps in np.arange(0.05, 0.46, 0.05):
        for s in (8, 16, 32):
            for n in (1, 10, 100):
                v = tuple([1] * s)
                v2 = tuple([0] * s)
                diag = kl_and_fano(s, n, float(eps), v, v2)
                assert diag.kl_n_sample <= diag.kl_quadratic_bound + 1e-12


def test_fano_epsilon_frozen():
    diag = kl_and_fano(32, 100, 0.2, tuple([1] * 32), tuple([0] * 32))
    assert diag.fano_applicable
    assert diag.fano_epsilon == pytest.approx(math.sqrt(math.log(2) / 12800), rel=1e-12)
    assert diag.fano_epsilon == pytest.approx(7.36e-3, abs=5e-5)


def test_fano_not_applicable_small_s():
    diag = kl_and_fano(16, 100, 0.2, tuple([1] * 16), tuple([0] * 16))
    assert not diag.fano_applicable
    assert diag.fano_epsilon is None
