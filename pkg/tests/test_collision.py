import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from sqboltz.collision import (CollisionOutcome, Particle, delta_q,
                               isotropic_unit_vector, pair_kinetic,
                               partition_quanta, relative_kinetic_energy,
                               sample_collision, sample_collision_reversible,
                               transfer_distribution)


def composition_counts(n_eff):
    """Oracle: number of ordered non-negative pairs summing to each N."""
    counts = []
    for total in range(n_eff + 1):
        counts.append(sum(1 for da in range(total + 1)
                          for db in (total - da,) if da + db == total))
    return np.array(counts, dtype=float)


def make_pair(rng, t=1.0, n_a=0, n_b=0):
    return (Particle(rng.random(3), rng.normal(0, math.sqrt(t), 3), n_a),
            Particle(rng.random(3), rng.normal(0, math.sqrt(t), 3), n_b))


vec3 = st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3)


class TestDeltaQ:
    def test_identical_momenta(self):
        p = np.array([1.0, -2.0, 0.5])
        assert delta_q(p, -p, p, -p, 2.0) == 0.0

    @given(vec3, vec3, vec3, vec3)
    def test_antisymmetry(self, p, p1, pp, p1p):
        assert delta_q(p, p1, pp, p1p, 1.5) == -delta_q(pp, p1p, p, p1, 1.5)

    def test_head_on_stop(self):
        got = delta_q([1, 0, 0], [-1, 0, 0], [0, 0, 0], [0, 0, 0], 1.0)
        assert got == pytest.approx(1.0, rel=1e-15)

    def test_nonpositive_mass_rejected(self):
        with pytest.raises(ValueError):
            delta_q([1, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0], 0.0)


class TestRelativeKineticEnergy:
    def test_boost_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            p, p1 = rng.normal(0, 1, 3), rng.normal(0, 1, 3)
            boost = rng.normal(0, 3, 3)
            base = relative_kinetic_energy(p, p1, 1.3)
            boosted = relative_kinetic_energy(p + 1.3 * boost, p1 + 1.3 * boost, 1.3)
            assert boosted == pytest.approx(base, rel=1e-12, abs=1e-15)

    def test_equals_com_frame_energy(self):
        p, p1 = np.array([2.0, 0, 0]), np.array([-1.0, 0, 0])
        # in the frame moving with the pair, energy = q^2/m with q = (p - p1)/2
        assert relative_kinetic_energy(p, p1, 2.0) == pytest.approx(1.5**2 / 2.0)


class TestTransferDistribution:
    def test_elastic_when_no_quantum_fits(self):
        dist = transfer_distribution(0.9, 1.0, 5)
        np.testing.assert_array_equal(dist.probs, [1.0])

    def test_capped_by_n_max(self):
        # oracle: weights are the composition counts 1, 2, 3
        dist = transfer_distribution(7.3, 1.0, 2)
        oracle = composition_counts(2)
        np.testing.assert_allclose(dist.probs, oracle / oracle.sum(), rtol=1e-15)
        np.testing.assert_allclose(dist.probs, [1 / 6, 1 / 3, 1 / 2], rtol=1e-15)

    def test_capped_by_energy(self):
        dist = transfer_distribution(1.5, 1.0, 5)
        assert dist.n_eff == 1
        np.testing.assert_allclose(dist.probs, [1 / 3, 2 / 3], rtol=1e-15)

    def test_negative_energy_rejected(self):
        with pytest.raises(ValueError):
            transfer_distribution(-0.1, 1.0, 3)

    def test_composition_count_law(self):
        # g(N) = N + 1 for all N up to 64, by brute enumeration
        for n in range(65):
            count = sum(1 for da in range(n + 1) if 0 <= n - da)
            assert count == n + 1

    def test_sampling_matches_probs(self):
        rng = np.random.default_rng(11)
        dist = transfer_distribution(10.0, 1.0, 2)
        draws = np.array([dist.sample(rng) for _ in range(30000)])
        freq = np.bincount(draws, minlength=3) / len(draws)
        sigma = np.sqrt(dist.probs * (1 - dist.probs) / len(draws))
        assert np.all(np.abs(freq - dist.probs) < 3.5 * sigma)


class TestPartitionQuanta:
    def test_zero(self):
        rng = np.random.default_rng(0)
        assert partition_quanta(0, rng) == (0, 0)

    def test_uniform_over_compositions(self):
        rng = np.random.default_rng(1)
        draws = [partition_quanta(2, rng) for _ in range(100_000)]
        counts = np.bincount([a for a, _ in draws], minlength=3)
        res = stats.chisquare(counts)
        assert res.pvalue > 0.001
        assert all(a + b == 2 for a, b in draws)

    def test_marginal_uniform_at_three(self):
        rng = np.random.default_rng(2)
        firsts = np.array([partition_quanta(3, rng)[0] for _ in range(100_000)])
        counts = np.bincount(firsts, minlength=4)
        assert stats.chisquare(counts).pvalue > 0.001


class TestSampleCollision:
    def test_elastic_below_threshold(self):
        rng = np.random.default_rng(3)
        a = Particle([0, 0, 0], [0.1, 0, 0], 1)
        b = Particle([0.5, 0, 0], [-0.1, 0, 0], 2)
        out = sample_collision(a, b, 1.0, 1.0, 5, rng)
        assert (out.n_out, out.n1_out, out.quanta_transferred) == (1, 2, 0)
        ke_in = pair_kinetic(a.p, b.p, 1.0)
        assert pair_kinetic(out.p_out, out.p1_out, 1.0) == pytest.approx(ke_in, rel=1e-12)

    def test_zero_relative_momentum_is_identity(self):
        rng = np.random.default_rng(4)
        p = np.array([0.7, -0.2, 0.1])
        a = Particle([0, 0, 0], p, 0)
        b = Particle([1, 0, 0], p.copy(), 3)
        out = sample_collision(a, b, 1.0, 1.0, 5, rng)
        np.testing.assert_array_equal(out.p_out, p)
        np.testing.assert_array_equal(out.p1_out, p)
        assert (out.n_out, out.n1_out) == (0, 3)

    def test_conservation_and_ordering_bulk(self):
        rng = np.random.default_rng(6)
        omega, mass = 0.5, 1.0
        for _ in range(20_000):
            a, b = make_pair(rng, t=1.5, n_a=int(rng.integers(0, 3)),
                             n_b=int(rng.integers(0, 3)))
            p_in = a.p + b.p
            ke_in = pair_kinetic(a.p, b.p, mass)
            out = sample_collision(a, b, mass, omega, 4, rng)
            # momentum conservation after the frame transform
            assert np.max(np.abs(out.p_out + out.p1_out - p_in)) <= 1e-12
            # energy bookkeeping: deficit is exactly the transferred quanta
            deficit = ke_in - pair_kinetic(out.p_out, out.p1_out, mass)
            assert abs(deficit - out.quanta_transferred * omega) <= 1e-12 * max(1.0, ke_in)
            # one-way rule: levels never decrease, kinetic never grows
            assert out.n_out >= a.n and out.n1_out >= b.n
            assert deficit >= 0.0

    def test_transfer_statistics_match_distribution(self):
        rng = np.random.default_rng(7)
        omega, mass, n_max = 1.0, 1.0, 2
        q = np.array([3.0, 0.0, 0.0])          # e_rel = 9 >> n_max * omega
        a = Particle([0, 0, 0], q, 0)
        b = Particle([1, 1, 1], -q, 0)
        m_draws = 30_000
        seen = np.zeros(n_max + 1)
        for _ in range(m_draws):
            out = sample_collision(a, b, mass, omega, n_max, rng)
            seen[out.quanta_transferred] += 1
        freq = seen / m_draws
        probs = transfer_distribution(9.0, omega, n_max).probs
        sigma = np.sqrt(probs * (1 - probs) / m_draws)
        assert np.all(np.abs(freq - probs) < 3.5 * sigma)

    def test_isotropic_direction_statistics(self):
        rng = np.random.default_rng(8)
        zs = np.array([isotropic_unit_vector(rng)[2] for _ in range(20_000)])
        # z component of a uniform direction is uniform on [-1, 1]
        assert abs(zs.mean()) < 3.5 / math.sqrt(12 * len(zs) / 4)
        assert np.all(np.abs(np.linalg.norm(
            [isotropic_unit_vector(rng) for _ in range(100)], axis=1) - 1) < 1e-12)


class TestReversibleKernel:
    def test_pooled_energy_conserved(self):
        rng = np.random.default_rng(9)
        omega, mass = 0.5, 1.0
        gained = lost = 0
        for _ in range(5000):
            a, b = make_pair(rng, t=1.0, n_a=int(rng.integers(0, 4)),
                             n_b=int(rng.integers(0, 4)))
            ke_in = pair_kinetic(a.p, b.p, mass)
            total_in = ke_in + omega * (a.n + b.n)
            out = sample_collision_reversible(a, b, mass, omega, 3, rng)
            ke_out = pair_kinetic(out.p_out, out.p1_out, mass)
            total_out = ke_out + omega * (out.n_out + out.n1_out)
            assert total_out == pytest.approx(total_in, rel=1e-10, abs=1e-12)
            np.testing.assert_allclose(out.p_out + out.p1_out, a.p + b.p, atol=1e-12)
            if ke_out > ke_in + 1e-12:
                gained += 1
            elif ke_out < ke_in - 1e-12:
                lost += 1
        # back-transfer really happens: kinetic energy moves both ways
        assert gained > 100 and lost > 100
