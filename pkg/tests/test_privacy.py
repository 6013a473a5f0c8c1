import math

import numpy as np
import pytest

from walkmeta import privacy
from walkmeta.errors import ParameterError
from walkmeta.privacy import PrivacyParams

# independently hand-evaluated at (eps=0.5, delta=0.3, delta_hat=0.1,
# T=100, n=100): N_u = 1 + sqrt(3 ln 10), q = 2 N_u,
# eps' = sqrt(2 q ln(1/0.3)) * 0.5 / sqrt(ln(1.25/0.3))
HAND_EPS_PRIME = 1.7495562104128215


class TestNoiseSigma:
    def test_reference_value(self):
        pp = PrivacyParams(epsilon=0.5, delta=0.3, m_meta=1.0)
        assert abs(privacy.noise_sigma(pp) - 32.0 * math.log(25.0 / 6.0)) < 1e-12

    def test_m_meta_quadratic_scaling(self):
        lo = privacy.noise_sigma(PrivacyParams(0.5, 0.3, 1.0))
        hi = privacy.noise_sigma(PrivacyParams(0.5, 0.3, 2.0))
        assert abs(hi - 4.0 * lo) < 1e-12

    def test_positive_on_valid_domain(self):
        for eps in np.linspace(0.05, 0.999, 7):
            for delta in np.linspace(0.01, 0.49, 7):
                assert privacy.noise_sigma(PrivacyParams(eps, delta, 1.0)) > 0

    def test_strictly_decreasing_in_eps_and_delta(self):
        eps_grid = np.linspace(0.1, 0.9, 9)
        vals = [privacy.noise_sigma(PrivacyParams(e, 0.3, 1.0)) for e in eps_grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        delta_grid = np.linspace(0.05, 0.45, 9)
        vals = [privacy.noise_sigma(PrivacyParams(0.5, d, 1.0)) for d in delta_grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("eps,delta", [(1.0, 0.3), (0.0, 0.3),
                                           (0.5, 0.5), (0.5, 0.0)])
    def test_domain_errors(self, eps, delta):
        with pytest.raises(ParameterError):
            privacy.noise_sigma(PrivacyParams(eps, delta, 1.0))


class TestSamplePerturbation:
    def test_zero_variance(self):
        rng = np.random.default_rng(0)
        assert np.all(privacy.sample_perturbation(0.0, 10, rng) == 0)

    def test_negative_variance(self):
        with pytest.raises(ParameterError):
            privacy.sample_perturbation(-1.0, 3, np.random.default_rng(0))

    def test_sample_variance(self):
        rng = np.random.default_rng(123)
        draws = privacy.sample_perturbation(4.0, 1_000_000, rng)
        assert 3.96 <= float(np.var(draws)) <= 4.04

    def test_sample_mean(self):
        rng = np.random.default_rng(7)
        draws = privacy.sample_perturbation(4.0, 1_000_000, rng)
        assert abs(float(np.mean(draws))) <= 0.01 * 2.0


class TestAccountant:
    def test_hand_value(self):
        rep = privacy.account_network_dp(0.5, 0.3, 0.1, t=100, n=100)
        assert abs(rep.epsilon_prime - HAND_EPS_PRIME) < 1e-9
        assert abs(rep.n_u - (1.0 + math.sqrt(3.0 * math.log(10.0)))) < 1e-12
        assert abs(rep.q - 2.0 * rep.n_u) < 1e-12
        assert rep.delta_total == 0.3 + 0.1

    def test_monotone_in_t(self):
        vals = [privacy.account_network_dp(0.5, 0.3, 0.1, t, 50).epsilon_prime
                for t in (10, 100, 1000, 10000)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_monotone_in_n(self):
        vals = [privacy.account_network_dp(0.5, 0.3, 0.1, 1000, n).epsilon_prime
                for n in (5, 20, 100, 500)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_monotone_in_eps(self):
        vals = [privacy.account_network_dp(e, 0.3, 0.1, 1000, 50).epsilon_prime
                for e in (0.2, 0.4, 0.6, 0.8)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_larger_perturbation_better_privacy(self):
        # smaller eps -> larger sigma^2 and smaller eps'
        s_small = privacy.noise_sigma(PrivacyParams(0.3, 0.3, 1.0))
        s_large = privacy.noise_sigma(PrivacyParams(0.8, 0.3, 1.0))
        assert s_small > s_large
        e_small = privacy.account_network_dp(0.3, 0.3, 0.1, 500, 20).epsilon_prime
        e_large = privacy.account_network_dp(0.8, 0.3, 0.1, 500, 20).epsilon_prime
        assert e_small < e_large

    def test_domain_errors_name_bound(self):
        with pytest.raises(ParameterError, match="epsilon"):
            privacy.account_network_dp(1.5, 0.3, 0.1, 10, 10)
        with pytest.raises(ParameterError, match="delta"):
            privacy.account_network_dp(0.5, 0.7, 0.1, 10, 10)
        with pytest.raises(ParameterError, match="delta_hat"):
            privacy.account_network_dp(0.5, 0.3, 1.5, 10, 10)
        with pytest.raises(ParameterError, match="t"):
            privacy.account_network_dp(0.5, 0.3, 0.1, 0, 10)
