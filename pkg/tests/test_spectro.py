import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqboltz.constants import HBAR, K_BOLTZMANN
from sqboltz.spectro import (OscillatorSpec, RateSet, boltzmann_ratio,
                             equilibrium_rate, ladder_generator, rate_set,
                             relaxation_generator, spontaneous_rate,
                             stationary_distribution)

# Frozen oracle values, computed once by direct evaluation of the
# closed-form expressions with the constants snapshot:
#   A = 4 w^3 d^2 / (3 hbar c^3) at w = 1e14 rad/s, d = 1e-18 esu cm
#   x = hbar w / (kB T) at T = 300 K
A_REF = 46.924587873715
X_REF = 2.546077525859215
BOLTZ_REF = 0.07838854077764021
K_REF = 3.991215531452266

SPEC = OscillatorSpec(omega=1e14, dipole=1e-18, n_levels=5)


class TestBoltzmannRatio:
    def test_equal_energies(self):
        assert boltzmann_ratio(3.0e-14, 3.0e-14, 250.0) == 1.0

    def test_ln2_gap(self):
        gap = K_BOLTZMANN * 300.0 * math.log(2.0)
        assert boltzmann_ratio(gap, 0.0, 300.0) == pytest.approx(0.5, rel=1e-12)

    def test_infrared_mode_at_room_temperature(self):
        assert boltzmann_ratio(SPEC.quantum, 0.0, 300.0) == pytest.approx(BOLTZ_REF, rel=1e-12)

    @pytest.mark.parametrize("t", [0.0, -5.0])
    def test_nonpositive_temperature_rejected(self, t):
        with pytest.raises(ValueError):
            boltzmann_ratio(1.0, 0.0, t)


class TestRates:
    def test_zero_dipole(self):
        assert spontaneous_rate(OscillatorSpec(omega=1e14, dipole=0.0)) == 0.0

    def test_spontaneous_reference_value(self):
        assert spontaneous_rate(SPEC) == pytest.approx(A_REF, rel=1e-12)

    def test_equilibrium_reference_value(self):
        assert equilibrium_rate(SPEC, 300.0) == pytest.approx(K_REF, rel=1e-12)

    def test_equilibrium_vanishes_at_low_temperature(self):
        assert equilibrium_rate(SPEC, 1e-3) == 0.0

    def test_spontaneous_dominates_when_quantum_exceeds_kt(self):
        # hbar w = 24.4 kB T here
        assert spontaneous_rate(SPEC) > equilibrium_rate(SPEC, 30.0)

    @given(st.floats(1e12, 5e14), st.floats(20.0, 2000.0))
    def test_planck_occupation_identity(self, omega, t):
        spec = OscillatorSpec(omega=omega, dipole=1e-18)
        ratio = equilibrium_rate(spec, t) / spontaneous_rate(spec)
        x = HBAR * omega / (K_BOLTZMANN * t)
        assert ratio == pytest.approx(1.0 / math.expm1(x), rel=1e-12)

    def test_two_level_balance(self):
        # k n0 = (k + A) n1 at stationarity pins n1/n0 to the Boltzmann factor
        a = spontaneous_rate(SPEC)
        k = equilibrium_rate(SPEC, 300.0)
        assert k / (k + a) == pytest.approx(BOLTZ_REF, rel=1e-12)


class TestRelaxationGenerator:
    def test_mode_off_is_zero(self):
        assert not relaxation_generator(SPEC, 300.0, "off").any()

    def test_two_level_spontaneous_only(self):
        spec = OscillatorSpec(omega=1e14, dipole=1e-18, n_levels=2)
        a = spontaneous_rate(spec)
        kappa = relaxation_generator(spec, 300.0, "spontaneous-only")
        assert kappa[0, 1] == pytest.approx(a)      # 1 -> 0 at rate A
        assert kappa[1, 0] == 0.0                   # no upward pumping
        np.testing.assert_allclose(kappa.sum(axis=0), 0.0, atol=1e-12 * a)

    def test_ladder_scaling(self):
        kappa = relaxation_generator(SPEC, 300.0, "full")
        a = spontaneous_rate(SPEC)
        k = equilibrium_rate(SPEC, 300.0)
        for n in range(1, SPEC.n_levels):
            assert kappa[n - 1, n] == pytest.approx(n * (a + k), rel=1e-12)
        for n in range(SPEC.n_levels - 1):
            assert kappa[n + 1, n] == pytest.approx((n + 1) * k, rel=1e-12)

    def test_only_adjacent_transitions(self):
        kappa = relaxation_generator(SPEC, 300.0, "full")
        off = np.abs(kappa.copy())
        for d in (-1, 0, 1):
            off -= np.diag(np.diag(off, d), d)
        assert not off.any()

    @pytest.mark.parametrize("mode", ["off", "spontaneous-only", "full"])
    def test_columns_sum_to_zero(self, mode):
        kappa = relaxation_generator(SPEC, 420.0, mode)
        np.testing.assert_allclose(kappa.sum(axis=0), 0.0,
                                   atol=1e-12 * max(1.0, np.abs(kappa).max()))

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            ladder_generator(1.0, 0.5, 3, "both")

    def test_full_mode_stationary_state_is_boltzmann(self):
        kappa = relaxation_generator(SPEC, 300.0, "full")
        f = stationary_distribution(kappa)
        target = boltzmann_ratio(SPEC.quantum, 0.0, 300.0)
        for n in range(1, SPEC.n_levels):
            assert f[n] / f[n - 1] == pytest.approx(target, rel=1e-10)


class TestSpecValidation:
    @pytest.mark.parametrize("kwargs", [
        dict(omega=0.0, dipole=1e-18),
        dict(omega=-1e14, dipole=1e-18),
        dict(omega=1e14, dipole=-1e-18),
        dict(omega=1e14, dipole=1e-18, n_levels=1),
    ])
    def test_bad_spec_rejected(self, kwargs):
        with pytest.raises(ValueError):
            OscillatorSpec(**kwargs)

    def test_rate_set_bundles_consistently(self):
        rs = rate_set(SPEC, 300.0)
        assert rs.a_spont == pytest.approx(A_REF, rel=1e-12)
        assert rs.k_eq == pytest.approx(K_REF, rel=1e-12)
        assert rs.boltzmann == pytest.approx(BOLTZ_REF, rel=1e-12)
        assert rs.kappa.shape == (5, 5)

    def test_rate_set_rejects_unbalanced_generator(self):
        bad = np.array([[0.0, 1.0], [0.0, -0.5]])
        with pytest.raises(ValueError):
            RateSet(boltzmann=0.1, k_eq=1.0, a_spont=1.0, kappa=bad)

    def test_rate_set_rejects_negative_offdiagonal(self):
        bad = np.array([[0.5, -0.5], [-0.5, 0.5]])
        with pytest.raises(ValueError):
            RateSet(boltzmann=0.1, k_eq=1.0, a_spont=1.0, kappa=bad)
