import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oamtransfer.fock import post_select_coincidence, to_hybrid
from oamtransfer.hom import (
    DEFAULT_SIGMA_MM,
    HALF_WIDTH_MM,
    PHI_MINUS,
    DelayModel,
    coincidence_curve,
    default_positions,
    dip_half_width,
    entangled_source,
    interfere_pair,
    visibility,
)
from oamtransfer.qubits import pole_vector

DELAY = DelayModel()


class TestDelayModel:
    def test_overlap_at_zero(self):
        assert DELAY.overlap(0.0) == 1.0

    @given(st.floats(0, 5), st.floats(0, 5))
    def test_monotone_in_abs_offset(self, x, y):
        lo, hi = sorted((x, y))
        assert DELAY.overlap(hi) <= DELAY.overlap(lo)
        assert DELAY.overlap(-hi) == DELAY.overlap(hi)

    def test_half_width_round_trip(self):
        d = DelayModel.from_half_width(0.3)
        assert d.half_width_mm == pytest.approx(0.3)
        assert d.overlap(0.3) == pytest.approx(0.5)

    def test_default(self):
        assert DELAY.sigma_mm == pytest.approx(DEFAULT_SIGMA_MM)
        assert DELAY.half_width_mm == pytest.approx(HALF_WIDTH_MM)

    def test_sigma_positive(self):
        with pytest.raises(ValueError):
            DelayModel(0.0)


class TestInterferePair:
    def test_zero_delay_is_the_four_term_state(self):
        s = interfere_pair(DELAY, 0.0)
        assert len(s) == 4
        assert all(abs(a) == pytest.approx(0.5) for _, a in s.items())

    def test_zero_delay_post_selects_phi_minus(self):
        kept, p = post_select_coincidence(interfere_pair(DELAY, 0.0), "a", "b")
        assert p == pytest.approx(0.5)
        vec = to_hybrid(kept, "a", "b")[:4]
        assert abs(np.vdot(PHI_MINUS, vec)) == pytest.approx(1.0, abs=1e-12)

    def test_far_delay_removes_interference(self):
        s = interfere_pair(DELAY, 10.0)
        _, p = post_select_coincidence(s, "a", "b")
        assert p == pytest.approx(0.5)
        # only distinguishable terms (two wavepacket tags) remain
        assert all(len({md.wavepacket for md in b.modes}) == 2 for b in s)


class TestSource:
    def test_ideal(self):
        src = entangled_source(0.0)
        assert src.fidelity == pytest.approx(1.0, abs=1e-12)
        assert src.probability == pytest.approx(0.5, abs=1e-15)

    def test_fully_distinguishable(self):
        assert entangled_source(50.0).fidelity == pytest.approx(0.5, abs=1e-12)

    def test_depolarized(self):
        assert entangled_source(0.0, depolarizing_p=0.10).fidelity == pytest.approx(0.925, abs=1e-12)

    @given(st.floats(0, 1), st.floats(-1, 1))
    def test_closed_form(self, p, dx):
        g = DELAY.overlap(dx)
        f = (1 + g) / 2 * (1 - p) + p / 4
        assert entangled_source(dx, depolarizing_p=p).fidelity == pytest.approx(f, abs=1e-12)

    def test_density_matrix_valid(self):
        rho = entangled_source(0.1, depolarizing_p=0.2).rho
        assert np.trace(rho) == pytest.approx(1.0)
        assert np.linalg.eigvalsh(rho).min() > -1e-12
        np.testing.assert_allclose(rho, rho.conj().T)

    @pytest.mark.parametrize("ell0", [1, 2])
    def test_ell0_independent(self, ell0):
        assert entangled_source(0.0, ell0=ell0).fidelity == pytest.approx(1.0)


class TestCurves:
    def test_dd_zero_at_origin_and_baseline(self):
        curve = coincidence_curve("D", "D", [0.0, 5.0])
        assert curve[0][1] == pytest.approx(0.0, abs=1e-15)
        assert curve[1][1] == pytest.approx(1 / 8, abs=1e-12)

    def test_da_peak_is_double_baseline(self):
        peak, base = (p for _, p in coincidence_curve("D", "A", [0.0, 5.0]))
        assert peak == pytest.approx(2 * base, abs=1e-12)

    def test_brute_force_routing_oracle(self):
        # gamma = 0: the two classical routings |+,+> and |-,-> with weight 1/4 each
        for a in ("D", "A", "R", "L", "plus"):
            for b in ("D", "A", "R", "L", "minus"):
                ea, eb = pole_vector(a), pole_vector(b)
                expected = 0.25 * (abs(ea[0] * eb[0]) ** 2 + abs(ea[1] * eb[1]) ** 2)
                assert coincidence_curve(a, b, [9.0])[0][1] == pytest.approx(expected, abs=1e-12)

    @given(st.floats(-0.6, 0.6))
    def test_completeness(self, dx):
        total = sum(coincidence_curve(a, b, [dx])[0][1] for a in "DA" for b in "DA")
        assert total == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("pair", [("D", "D"), ("R", "L"), ("D", "A")])
    def test_symmetric_and_bounded(self, pair):
        xs = default_positions()
        ys = np.array([p for _, p in coincidence_curve(*pair, xs)])
        np.testing.assert_allclose(ys, ys[::-1], atol=1e-15)
        assert ((ys >= 0) & (ys <= 1)).all()

    def test_half_width_matches_closed_form(self):
        xs = default_positions()
        step = xs[1] - xs[0]
        for hw in (0.1, 0.194, 0.25):
            d = DelayModel.from_half_width(hw)
            assert dip_half_width(coincidence_curve("D", "D", xs, d)) == pytest.approx(hw, abs=step)

    @pytest.mark.parametrize("p", [0.0, 0.1, 0.3, 0.7])
    def test_visibility_linear_in_noise(self, p):
        curve = coincidence_curve("D", "D", [-30.0, 0.0, 30.0], depolarizing_p=p)
        assert visibility(curve) == pytest.approx(1 - p, abs=1e-12)

    def test_half_width_needs_recovery(self):
        with pytest.raises(ValueError):
            dip_half_width([(-0.1, 0.1), (0.0, 0.0), (0.1, 0.01)])


def test_half_width_definition_is_hwhm():
    # the dip depth halves where the overlap is 1/2
    d = DELAY
    x = d.half_width_mm
    assert math.exp(-((x / d.sigma_mm) ** 2)) == pytest.approx(0.5)
