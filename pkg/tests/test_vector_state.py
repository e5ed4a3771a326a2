import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import RING_R, RING_W0, count_cos_maxima
from povmem import (
    DomainError,
    GridSpec,
    HyopsCoord,
    NotOnSphereError,
    TwoDofKet,
    encoding_capacity,
    format_state_descriptor,
    hyops_coord,
    inner_product,
    ket_from_hyops,
    make_ppb,
    parse_state_descriptor,
    polarizer_field,
    polarizer_pattern,
    ring_radius,
)
from povmem.vector_state import count_petals

# the four reference states: (L1, L2, theta)
REFERENCE_STATES = [
    (1, 3, 0.0),
    (-3, 4, np.pi / 2),
    (0, -5, np.pi),
    (2, -2, 3 * np.pi / 2),
]


class TestTwoDofKet:
    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            TwoDofKet(np.array([1.0, 0, 0, 1.0]), 1, 3)  # norm sqrt(2)
        ket = TwoDofKet.create([1.0, 0, 0, 1.0], 1, 3)
        assert np.linalg.norm(ket.amplitudes) == pytest.approx(1.0, rel=1e-14)

    def test_degenerate_labels_need_flag(self):
        with pytest.raises(ValueError):
            TwoDofKet(np.array([1.0, 0, 0, 0]), 2, 2)
        ket = TwoDofKet(np.array([1.0, 0, 0, 0]), 2, 2, degenerate=True)
        assert ket.degenerate

    def test_label_policy(self):
        with pytest.raises(ValueError):
            TwoDofKet.create([1.0, 0, 0, 1.0], 1, 7)
        ket = TwoDofKet.create([1.0, 0, 0, 1.0], 1, 7, l_bound=8)
        assert ket.l2 == 7

    def test_global_phase_convention(self):
        ket = TwoDofKet.create([1j, 0, 0, 1j], 0, 1)
        assert ket.c_hl1.real > 0
        assert abs(ket.c_hl1.imag) < 1e-15


class TestMakePpb:
    @pytest.mark.parametrize("l1,l2,theta", REFERENCE_STATES)
    def test_reference_state_kets(self, ring_grid, l1, l2, theta):
        ket, fields = make_ppb(l1, l2, theta, RING_R, RING_W0, ring_grid)
        expected = np.array([1.0, 0.0, 0.0, np.exp(1j * theta)]) / np.sqrt(2.0)
        np.testing.assert_allclose(ket.amplitudes, expected, atol=1e-12)
        # equal arm powers
        assert fields.e_h.power() == pytest.approx(fields.e_v.power(), rel=1e-9)
        assert fields.e_h.power() + fields.e_v.power() == pytest.approx(1.0, rel=1e-9)

    def test_degenerate_ppb_is_uniform_diagonal(self, ring_grid):
        ket, fields = make_ppb(0, 0, 0.0, RING_R, RING_W0, ring_grid)
        assert ket.degenerate
        # theta = 0 and L1 = L2 = 0: both components identical, diagonal pol
        np.testing.assert_allclose(fields.e_h.amplitude, fields.e_v.amplitude,
                                   atol=1e-15)
        pattern = polarizer_pattern(fields, np.pi / 4)
        ring = ring_radius(fields.e_h)
        assert count_petals(ring_grid, pattern, ring) == 0

    def test_field_gram_matches_ket_gram(self, ring_grid):
        # field-level overlaps reproduce the abstract overlaps because rings
        # with different charge are orthogonal
        pairs = [(1, 3, 0.0), (1, 3, np.pi / 2), (0, -5, np.pi), (1, -4, 1.0)]
        built = [make_ppb(l1, l2, th, RING_R, RING_W0, ring_grid)
                 for l1, l2, th in pairs]

        def field_overlap(fa, fb):
            return inner_product(fa.e_h, fb.e_h) + inner_product(fa.e_v, fb.e_v)

        def ket_overlap(ka, kb, la, lb):
            # shared labels only overlap where the physical charges agree
            amp = 0.0
            for ia, ca in ((0, ka.c_hl1), (3, ka.c_vl2)):
                for ib, cb in ((0, kb.c_hl1), (3, kb.c_vl2)):
                    pol_a, pol_b = ia // 2, ib // 2
                    charge_a = la[0] if ia == 0 else la[1]
                    charge_b = lb[0] if ib == 0 else lb[1]
                    if pol_a == pol_b and charge_a == charge_b:
                        amp += np.conj(ca) * cb
            return amp

        for (pa, (ka, fa)) in zip(pairs, built):
            for (pb, (kb, fb)) in zip(pairs, built):
                expected = ket_overlap(ka, kb, pa[:2], pb[:2])
                assert field_overlap(fa, fb) == pytest.approx(expected, abs=1e-6)


class TestPolarizerPattern:
    @pytest.mark.parametrize("l1,l2,theta", REFERENCE_STATES)
    def test_petal_count_matches_oracle(self, ring_grid, l1, l2, theta):
        if l1 == l2:
            pytest.skip("degenerate pair")
        _, fields = make_ppb(l1, l2, theta, RING_R, RING_W0, ring_grid)
        pattern = polarizer_pattern(fields, np.pi / 4)
        expected = count_cos_maxima(l2 - l1, theta)
        assert expected == abs(l2 - l1)
        assert count_petals(ring_grid, pattern, RING_R) == expected

    def test_polarizer_at_zero_projects_h(self, ring_grid):
        _, fields = make_ppb(1, 3, 0.0, RING_R, RING_W0, ring_grid)
        pattern = polarizer_pattern(fields, 0.0)
        np.testing.assert_allclose(pattern, fields.e_h.intensity(), atol=1e-18)
        ring = ring_radius(fields.e_h)
        assert count_petals(ring_grid, pattern, ring) == 0

    @pytest.mark.parametrize("l1,l2", [(-5, 5), (-1, 2), (4, -3), (0, 1)])
    def test_petal_count_across_label_pairs(self, l1, l2):
        grid = GridSpec(128, 6.25e-6)
        _, fields = make_ppb(l1, l2, 0.0, RING_R, 25e-6, grid)
        pattern = polarizer_pattern(fields, np.pi / 4)
        assert count_petals(grid, pattern, RING_R) == abs(l2 - l1)

    def test_polarizer_field_projection(self, ring_grid):
        _, fields = make_ppb(1, 3, 0.0, RING_R, RING_W0, ring_grid)
        proj = polarizer_field(fields, np.pi / 2)
        np.testing.assert_allclose(proj.amplitude, fields.e_v.amplitude, atol=1e-18)


class TestHyops:
    def test_pole_states(self):
        pole_c = TwoDofKet.create([1.0, 0, 0, 0], 1, 3)
        coord = hyops_coord(pole_c)
        assert coord.theta == pytest.approx(0.0, abs=1e-12)
        pole_e = TwoDofKet.create([0, 0, 0, 1.0], 1, 3)
        assert hyops_coord(pole_e).theta == pytest.approx(np.pi, rel=1e-12)

    @pytest.mark.parametrize("l1,l2,theta", REFERENCE_STATES)
    def test_reference_states_on_equator(self, l1, l2, theta):
        ket = TwoDofKet.create([1.0, 0, 0, np.exp(1j * theta)], l1, l2,
                               l_bound=5 if l1 != l2 else None)
        coord = hyops_coord(ket)
        assert coord.theta == pytest.approx(np.pi / 2, rel=1e-12)
        assert coord.phi == pytest.approx(theta, abs=1e-12)

    def test_balanced_real_superposition(self):
        ket = TwoDofKet.create([1.0, 0, 0, 1.0], 0, 1)
        coord = hyops_coord(ket)
        assert coord.theta == pytest.approx(np.pi / 2, rel=1e-12)
        assert coord.phi == pytest.approx(0.0, abs=1e-12)

    def test_cross_terms_rejected(self):
        ket = TwoDofKet.create([1.0, 0.1, 0, 1.0], 1, 3)
        with pytest.raises(NotOnSphereError):
            hyops_coord(ket)

    @given(theta=st.floats(1e-6, np.pi - 1e-6), phi=st.floats(0, 2 * np.pi,
                                                              exclude_max=True))
    @settings(max_examples=50, deadline=None)
    def test_round_trip(self, theta, phi):
        coord = HyopsCoord(theta, phi, 1, 3)
        back = hyops_coord(ket_from_hyops(coord))
        assert back.theta == pytest.approx(theta, abs=1e-12)
        assert abs(np.mod(back.phi - phi + np.pi, 2 * np.pi) - np.pi) < 1e-12


class TestEncodingCapacity:
    def test_reference_values(self):
        assert encoding_capacity(11) == (21, 121)
        assert encoding_capacity(1) == (1, 1)
        assert encoding_capacity(2) == (3, 4)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            encoding_capacity(0)
        with pytest.raises(DomainError):
            encoding_capacity(2.5)

    @given(d=st.integers(1, 1000))
    @settings(max_examples=30)
    def test_perfect_never_below_conventional(self, d):
        cap = encoding_capacity(d)
        assert cap.perfect == d * d
        assert cap.conventional == 2 * d - 1
        assert cap.perfect >= cap.conventional


class TestDescriptors:
    @pytest.mark.parametrize("text,expected", [
        ("PPB(1,3,0)", (1, 3, 0.0)),
        ("PPB(-3,4,90)", (-3, 4, np.pi / 2)),
        ("PPB(0,-5,180)", (0, -5, np.pi)),
        ("PPB(2,-2,270)", (2, -2, 3 * np.pi / 2)),
        (" PPB( -1 , 2 , 45.5 ) ", (-1, 2, np.deg2rad(45.5))),
    ])
    def test_parse(self, text, expected):
        l1, l2, theta = parse_state_descriptor(text)
        assert (l1, l2) == expected[:2]
        assert theta == pytest.approx(expected[2], abs=1e-12)

    @pytest.mark.parametrize("bad", ["PPB(1,3)", "PPB(a,3,0)", "PVB(1,3,0)", ""])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_state_descriptor(bad)

    def test_round_trip(self):
        text = format_state_descriptor(-3, 4, np.pi / 2)
        assert text == "PPB(-3,4,90)"
        assert parse_state_descriptor(text) == (-3, 4, pytest.approx(np.pi / 2))
