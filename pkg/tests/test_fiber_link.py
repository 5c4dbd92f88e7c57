import math

import numpy as np
import pytest

from y00sim.detection import helstrom_pure_pair
from y00sim.errors import ParameterError
from y00sim.fiber_link import (
    ELECTRON_CHARGE,
    LinkParams,
    ber_on_off,
    bob_practical_vs_optimal,
    decision_point,
    level_photon_rate,
    mean_photocurrent,
    noise_budget,
)
from y00sim.y00_cipher import ConstellationSpec


def reference_budget(g_p, kappa_r, n_rep, n_sp, bandwidth, delta_f, thermal, rate):
    """Independently written evaluator for the variance terms (kept
    deliberately different in structure from the implementation)."""
    e = 1.602176634e-19
    gain = 1.0 / kappa_r
    x = kappa_r * g_p * n_rep * (gain - 1.0) + (g_p - 1.0)
    sig = 2.0 * (e**2) * g_p * kappa_r * rate * bandwidth
    sp = 2.0 * (e**2) * x * n_sp * bandwidth * delta_f
    sig_sp = 4.0 * (e**2) * g_p * x * kappa_r * rate * n_sp * bandwidth
    sp_sp = 2.0 * (e**2) * (x**2) * (n_sp**2) * bandwidth * delta_f
    return {
        "sig": sig,
        "sp": sp,
        "sig_sp": sig_sp,
        "sp_sp": sp_sp,
        "total": thermal + sig + 2.0 * sp + sig_sp + 2.0 * sp_sp,
    }


def random_params(rng):
    return dict(
        g_p=rng.uniform(1.0, 300.0),
        kappa_r=rng.uniform(0.05, 1.0),
        n_rep=int(rng.integers(0, 40)),
        n_sp=rng.uniform(1.0, 4.0),
        bandwidth=10 ** rng.uniform(6, 10),
        delta_f=10 ** rng.uniform(9, 12),
        thermal=10 ** rng.uniform(-18, -10),
        rate=10 ** rng.uniform(6, 14),
    )


class TestNoiseBudget:
    def test_no_amplifiers_leaves_thermal_plus_shot(self):
        params = LinkParams(g_p=1.0, kappa_r=0.4, n_repeaters=0, thermal_var=1e-14)
        budget = noise_budget(params, 1e12)
        assert budget.sp == 0.0
        assert budget.sig_sp == 0.0
        assert budget.sp_sp == 0.0
        assert budget.total_on == pytest.approx(budget.th + budget.sig, rel=1e-15)

    def test_shot_noise_linear_in_photon_rate(self):
        params = LinkParams(g_p=10.0, kappa_r=0.5, n_repeaters=3)
        one = noise_budget(params, 1e11).sig
        two = noise_budget(params, 2e11).sig
        assert two == pytest.approx(2.0 * one, rel=1e-15)

    def test_spot_case_against_reference(self):
        params = LinkParams(
            g_p=100.0, kappa_r=0.5, n_repeaters=10, n_sp=1.5,
            bandwidth=1e9, delta_f=1e11, thermal_var=0.0,
        )
        budget = noise_budget(params, 1e12)
        ref = reference_budget(100.0, 0.5, 10, 1.5, 1e9, 1e11, 0.0, 1e12)
        assert budget.sig == pytest.approx(ref["sig"], rel=1e-12)
        assert budget.sp == pytest.approx(ref["sp"], rel=1e-12)
        assert budget.sig_sp == pytest.approx(ref["sig_sp"], rel=1e-12)
        assert budget.sp_sp == pytest.approx(ref["sp_sp"], rel=1e-12)
        assert budget.total_on == pytest.approx(ref["total"], rel=1e-12)

    def test_all_terms_nonnegative_at_random_parameters(self, rng):
        for _ in range(1000):
            draw = random_params(rng)
            params = LinkParams(
                g_p=draw["g_p"], kappa_r=draw["kappa_r"], n_repeaters=draw["n_rep"],
                n_sp=draw["n_sp"], bandwidth=draw["bandwidth"], delta_f=draw["delta_f"],
                thermal_var=draw["thermal"],
            )
            budget = noise_budget(params, draw["rate"])
            assert min(budget.th, budget.sig, budget.sp, budget.sig_sp, budget.sp_sp) >= 0.0

    def test_total_combines_terms_with_doubled_beats(self, rng):
        draw = random_params(rng)
        params = LinkParams(
            g_p=draw["g_p"], kappa_r=draw["kappa_r"], n_repeaters=draw["n_rep"],
            n_sp=draw["n_sp"], bandwidth=draw["bandwidth"], delta_f=draw["delta_f"],
            thermal_var=draw["thermal"],
        )
        b = noise_budget(params, draw["rate"])
        assert b.total_on == pytest.approx(
            b.th + b.sig + 2 * b.sp + b.sig_sp + 2 * b.sp_sp, rel=1e-15
        )

    def test_negative_rate_rejected(self):
        with pytest.raises(ParameterError):
            noise_budget(LinkParams(), -1.0)

    def test_repeater_gain_inverts_transparency(self):
        params = LinkParams(kappa_r=0.25)
        assert params.repeater_gain * params.kappa_r == pytest.approx(1.0, rel=1e-15)


class TestBerOnOff:
    def test_vanishing_noise_gives_zero_error(self):
        # with g_p = 1, no repeaters, and no thermal noise only shot noise
        # remains; at a wide-open eye the Gaussian tail underflows to 0.0
        zero_noise = LinkParams(g_p=1.0, kappa_r=1.0, n_repeaters=0, thermal_var=0.0)
        assert ber_on_off(zero_noise, 1e14, 0.0) == 0.0

    def test_vanishing_eye_approaches_half(self):
        params = LinkParams(g_p=10.0, kappa_r=0.5, n_repeaters=5, thermal_var=1e-13)
        assert ber_on_off(params, 1.0000001e10, 1e10) == pytest.approx(0.5, abs=1e-4)

    def test_monotone_in_eye_opening(self):
        params = LinkParams(g_p=50.0, kappa_r=0.5, n_repeaters=10, thermal_var=1e-14)
        rate_off = 1e10
        previous = 0.6
        for spacing in np.linspace(1e10, 5e11, 50):
            error = ber_on_off(params, rate_off + spacing, rate_off)
            assert error <= previous + 1e-15
            previous = error

    def test_matches_gaussian_tail_formula(self):
        params = LinkParams(g_p=20.0, kappa_r=0.5, n_repeaters=4, thermal_var=1e-15)
        rate_on, rate_off = 3e11, 5e10
        _, i_on, i_off, s_on, s_off = decision_point(params, rate_on, rate_off)
        q = (i_on - i_off) / (s_on + s_off)
        assert ber_on_off(params, rate_on, rate_off) == pytest.approx(
            0.5 * math.erfc(q / math.sqrt(2)), rel=1e-12
        )

    def test_decision_point_equalizes_errors(self):
        params = LinkParams(g_p=20.0, kappa_r=0.5, n_repeaters=4, thermal_var=1e-15)
        thr, i_on, i_off, s_on, s_off = decision_point(params, 3e11, 5e10)
        assert (i_on - thr) / s_on == pytest.approx((thr - i_off) / s_off, rel=1e-10)

    def test_rejects_closed_eye(self):
        with pytest.raises(ParameterError):
            ber_on_off(LinkParams(), 1e10, 1e10)

    def test_mean_current_scaling(self):
        params = LinkParams(g_p=7.0, kappa_r=0.25)
        assert mean_photocurrent(params, 1e12) == pytest.approx(
            ELECTRON_CHARGE * 7.0 * 0.25 * 1e12, rel=1e-15
        )


class TestPracticalVsOptimal:
    def test_quantum_optimum_always_dominates(self, rng):
        for _ in range(25):
            m = int(rng.integers(1, 9))
            alpha_max = rng.uniform(0.5, 20.0)
            spec = ConstellationSpec.intensity_ladder(m, alpha_max)
            params = LinkParams(
                g_p=rng.uniform(1.0, 100.0),
                kappa_r=rng.uniform(0.1, 1.0),
                n_repeaters=int(rng.integers(0, 20)),
                n_mean=alpha_max**2 * 1e9,
                thermal_var=10 ** rng.uniform(-18, -13),
            )
            practical, optimal = bob_practical_vs_optimal(params, spec)
            assert practical >= optimal - 1e-12

    def test_shot_limited_link_still_dominated(self):
        spec = ConstellationSpec.intensity_ladder(2, 3.0)
        params = LinkParams(
            g_p=1.0, kappa_r=1.0, n_repeaters=0, n_mean=9.0 * 1e9, thermal_var=0.0
        )
        practical, optimal = bob_practical_vs_optimal(params, spec)
        assert practical >= optimal
        assert practical < 0.5

    def test_noisy_chain_is_far_from_optimal(self):
        spec = ConstellationSpec.intensity_ladder(4, 8.0)
        params = LinkParams(
            g_p=100.0, kappa_r=0.5, n_repeaters=20, n_mean=64.0 * 1e9, thermal_var=1e-13
        )
        practical, optimal = bob_practical_vs_optimal(params, spec)
        assert practical > 10.0 * max(optimal, 1e-300)

    def test_deterministic(self):
        spec = ConstellationSpec.intensity_ladder(4, 8.0)
        params = LinkParams(g_p=10.0, kappa_r=0.5, n_repeaters=5, n_mean=64e9)
        assert bob_practical_vs_optimal(params, spec) == bob_practical_vs_optimal(params, spec)

    def test_level_rates_follow_squared_amplitudes(self):
        spec = ConstellationSpec.intensity_ladder(2, 4.0)
        params = LinkParams(n_mean=16.0 * 1e9)
        rates = [level_photon_rate(params, spec, i) for i in range(4)]
        assert rates == pytest.approx([1e9, 4e9, 9e9, 16e9], rel=1e-12)

    def test_helstrom_side_uses_basis_pair_overlap(self):
        spec = ConstellationSpec.intensity_ladder(4, 6.0)
        params = LinkParams(g_p=10.0, kappa_r=0.5, n_repeaters=5, n_mean=36e9)
        _, optimal = bob_practical_vs_optimal(params, spec)
        separation = 6.0 / 2.0  # alpha_(M+1) - alpha_(1) = alpha_max / 2
        assert optimal == pytest.approx(
            helstrom_pure_pair(math.exp(-(separation**2)), 0.5), rel=1e-12
        )
