import itertools
import math

import numpy as np
import pytest
from conftest import SQRT1_2, unit_vectors
from hypothesis import given
from hypothesis import strategies as st

from oamtransfer.fock import (
    MAX_PHOTONS,
    FockBasisState,
    H,
    ModeLabel,
    PhotonicState,
    V,
    apply_mode_map,
    fock,
    from_hybrid,
    inner_product,
    overlap,
    post_select_coincidence,
    tensor,
    to_hybrid,
)

Ha, Va, Hb, Vb = ModeLabel("a", H), ModeLabel("a", V), ModeLabel("b", H), ModeLabel("b", V)


def oam(path, ell, pol=H):
    return ModeLabel(path, pol, ell)


class TestBasis:
    def test_canonical_order_ignores_insertion_order(self):
        for perm in itertools.permutations([Ha, Vb, ModeLabel("c", V, 2)]):
            assert fock(*perm) == fock(Ha, Vb, ModeLabel("c", V, 2))

    def test_amplitude_lookup_is_order_independent(self):
        s = PhotonicState({fock(Vb, Ha): 0.6, fock(Hb, Va): 0.8})
        assert s.amplitude([Ha, Vb]) == pytest.approx(0.6)
        assert s.amplitude(fock(Va, Hb)) == pytest.approx(0.8)

    def test_two_photons_in_one_mode_are_one_entry(self):
        s = PhotonicState([(fock(Ha, Ha), 0.5), (fock(Ha, Ha), 0.5)])
        assert len(s) == 1
        basis = next(iter(s))
        assert basis.occupation[Ha] == 2
        assert basis.n_photons == 2

    def test_mode_labels_totally_ordered(self):
        labels = [oam("b", 1), oam("a", -1, V), oam("a", 1), ModeLabel("a", H, 1, 1)]
        assert sorted(labels) == sorted(sorted(labels, reverse=True))


class TestState:
    def test_pruning(self):
        s = PhotonicState({fock(Ha): 1.0, fock(Va): 1e-13})
        assert list(s) == [fock(Ha)]

    def test_mixed_photon_numbers_rejected(self):
        with pytest.raises(ValueError, match="mixed photon numbers"):
            PhotonicState({fock(Ha): 1, fock(Ha, Hb): 1})

    def test_photon_cap(self):
        modes = [ModeLabel(f"p{k}") for k in range(MAX_PHOTONS + 1)]
        with pytest.raises(ValueError, match="at most"):
            PhotonicState.from_modes(*modes)

    def test_normalize(self):
        s = PhotonicState({fock(Ha): 3, fock(Va): 4j}).normalized()
        assert s.norm() == pytest.approx(1.0, abs=1e-12)
        with pytest.raises(ValueError):
            PhotonicState().normalized()

    def test_immutable(self):
        s = PhotonicState.from_modes(Ha)
        with pytest.raises(TypeError):
            s.amplitudes[fock(Va)] = 1


class TestTensor:
    def test_product_of_basis_kets(self):
        s = tensor(PhotonicState.from_modes(Ha), PhotonicState.from_modes(Vb))
        assert s.amplitude([Ha, Vb]) == pytest.approx(1.0)

    def test_distributivity(self):
        plus = PhotonicState({fock(Ha): 1, fock(Va): 1}).normalized()
        s = tensor(plus, PhotonicState.from_modes(Hb))
        assert len(s) == 2
        for basis in s:
            assert s.amplitude(basis) == pytest.approx(SQRT1_2)

    def test_shared_path_rejected(self):
        with pytest.raises(ValueError, match="share paths"):
            tensor(PhotonicState.from_modes(Ha), PhotonicState.from_modes(Va))

    def test_input_qubit_times_anti_bunching_pair(self):
        # polarization qubit on its own photon c, OAM pair on a and b
        alpha, beta = 0.6, 0.8j
        psi_c = PhotonicState({fock(ModeLabel("c", H)): alpha, fock(ModeLabel("c", V)): beta})
        pair = PhotonicState({fock(oam("a", 1), oam("b", 1)): 1, fock(oam("a", -1), oam("b", -1)): -1}).normalized()
        full = tensor(psi_c, pair)
        vec = to_hybrid(full, "a", "b", path_c="c")
        expected = np.kron([alpha, beta], np.array([1, 0, 0, -1]) * SQRT1_2)
        np.testing.assert_allclose(vec, expected, atol=1e-12)


class TestInnerProduct:
    @given(unit_vectors(4))
    def test_self_overlap_is_one(self, v):
        modes = [oam("a", 1), oam("a", -1), oam("a", 1, V), oam("a", -1, V)]
        s = PhotonicState((fock(m), c) for m, c in zip(modes, v))
        assert inner_product(s, s) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_modes(self):
        assert inner_product(PhotonicState.from_modes(Ha), PhotonicState.from_modes(Va)) == 0

    def test_conjugate_linear_in_first(self):
        a = PhotonicState({fock(Ha): 1j})
        b = PhotonicState({fock(Ha): 1})
        assert inner_product(a, b) == pytest.approx(-1j)

    def test_photon_number_mismatch_is_zero(self):
        assert inner_product(PhotonicState.from_modes(Ha), PhotonicState.from_modes(Ha, Hb)) == 0

    def test_phi_minus_normalized(self):
        phi = PhotonicState({fock(oam("a", 1), oam("b", 1)): SQRT1_2, fock(oam("a", -1), oam("b", -1)): -SQRT1_2})
        assert inner_product(phi, phi) == pytest.approx(1.0)


class TestModeMap:
    def test_creation_operator_factor(self):
        # a^dag b^dag|0> through a 50:50 split of both onto one mode: a^dag^2/2 |0> = |2>/sqrt(2)
        s = PhotonicState.from_modes(Ha, Hb)
        out = apply_mode_map(s, lambda m: [(ModeLabel("x"), SQRT1_2), (ModeLabel("y"), SQRT1_2)])
        x2 = fock(ModeLabel("x"), ModeLabel("x"))
        assert out.amplitude(x2) == pytest.approx(SQRT1_2 * SQRT1_2 * math.sqrt(2))

    def test_untouched_paths_pass_through(self):
        s = PhotonicState.from_modes(Ha, Vb)
        out = apply_mode_map(s, lambda m: [(ModeLabel("z", m.pol), 1.0)], ("a",))
        assert out.amplitude([ModeLabel("z", H), Vb]) == pytest.approx(1.0)


class TestPostSelection:
    def test_anti_bunching_of_hom_output(self):
        t = 0.5
        s = PhotonicState({
            fock(oam("a", 1), oam("a", -1)): t,
            fock(oam("b", 1), oam("b", -1)): -t,
            fock(oam("a", 1), oam("b", 1)): t,
            fock(oam("a", -1), oam("b", -1)): -t,
        })
        kept, prob = post_select_coincidence(s, "a", "b")
        assert prob == pytest.approx(0.5)
        assert kept.amplitude([oam("a", 1), oam("b", 1)]) == pytest.approx(SQRT1_2)
        assert kept.amplitude([oam("a", -1), oam("b", -1)]) == pytest.approx(-SQRT1_2)

    def test_all_bunched_gives_zero(self):
        s = PhotonicState({fock(Ha, Ha): SQRT1_2, fock(Hb, Hb): -SQRT1_2})
        kept, prob = post_select_coincidence(s, "a", "b")
        assert kept is None and prob == 0.0

    def test_already_coincident(self):
        s = PhotonicState.from_modes(Ha, Vb)
        kept, prob = post_select_coincidence(s, "a", "b")
        assert prob == pytest.approx(1.0) and overlap(kept, s) == pytest.approx(1.0)

    @given(unit_vectors(4))
    def test_kept_plus_discarded_is_one(self, v):
        basis = [fock(Ha, Ha), fock(Ha, Hb), fock(Hb, Vb), fock(Va, Vb)]
        s = PhotonicState(zip(basis, v))
        _, prob = post_select_coincidence(s, "a", "b")
        discarded = abs(v[0]) ** 2 + abs(v[2]) ** 2
        assert prob + discarded == pytest.approx(1.0, abs=1e-9)

    def test_requires_two_photons(self):
        with pytest.raises(ValueError):
            post_select_coincidence(PhotonicState.from_modes(Ha), "a", "b")


class TestHybrid:
    def test_full_state_with_alpha_one(self):
        s = PhotonicState({
            fock(oam("a", 1, H), oam("b", 1)): SQRT1_2,
            fock(oam("a", -1, H), oam("b", -1)): -SQRT1_2,
        })
        vec = to_hybrid(s, "a", "b")
        expected = np.zeros(8, dtype=complex)
        expected[0], expected[3] = SQRT1_2, -SQRT1_2
        np.testing.assert_allclose(vec, expected, atol=1e-12)

    def test_basis_ket(self):
        vec = to_hybrid(PhotonicState.from_modes(oam("a", 1), oam("b", 1)), "a", "b")
        np.testing.assert_allclose(vec, np.eye(8)[0])

    @pytest.mark.parametrize("k", range(8))
    @pytest.mark.parametrize("ell0", [1, 3])
    def test_round_trip(self, k, ell0):
        e = np.eye(8)[k]
        np.testing.assert_allclose(to_hybrid(from_hybrid(e, "a", "b", ell0), "a", "b", ell0), e)

    @given(unit_vectors(8))
    def test_round_trip_random(self, v):
        np.testing.assert_allclose(to_hybrid(from_hybrid(v, "a", "b"), "a", "b"), v, atol=1e-12)

    def test_oam_outside_subspace_rejected(self):
        with pytest.raises(ValueError, match="outside the qubit subspace"):
            to_hybrid(PhotonicState.from_modes(oam("a", 2), oam("b", 1)), "a", "b")

    def test_wrong_photon_count_rejected(self):
        with pytest.raises(ValueError, match="expected 2 photons"):
            to_hybrid(PhotonicState.from_modes(oam("a", 1)), "a", "b")

    def test_inconsistent_spectators_rejected(self):
        s = PhotonicState({
            fock(oam("a", 1), oam("b", 1, H)): SQRT1_2,
            fock(oam("a", -1), oam("b", -1, V)): SQRT1_2,
        })
        with pytest.raises(ValueError, match="spectator"):
            to_hybrid(s, "a", "b")


@given(st.permutations([Ha, Vb, oam("c", 2, V)]))
def test_fock_basis_state_hash_consistent(perm):
    assert hash(FockBasisState(perm)) == hash(fock(Ha, Vb, oam("c", 2, V)))
