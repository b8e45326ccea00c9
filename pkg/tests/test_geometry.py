import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bctsim import geometry as g

TAU = 2.0 * math.pi

angle_st = st.floats(min_value=0.0, max_value=TAU, exclude_max=True, allow_nan=False)
theta_st = st.floats(min_value=0.0, max_value=g.THETA_SPAN, exclude_max=True, allow_nan=False)


class TestNormalizeAngle:
    def test_full_turn_wraps_to_zero(self):
        assert g.normalize_angle(TAU) == 0.0

    def test_negative_quarter_turn(self):
        assert g.normalize_angle(-math.pi / 2) == pytest.approx(3 * math.pi / 2, abs=1e-12)

    def test_two_and_a_half_turns(self):
        assert g.normalize_angle(5 * math.pi) == pytest.approx(math.pi, abs=1e-12)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            g.normalize_angle(bad)

    @given(x=st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
    def test_result_in_range_and_congruent(self, x):
        y = g.normalize_angle(x)
        assert 0.0 <= y < TAU
        assert math.isclose(math.cos(y), math.cos(x), abs_tol=1e-9)
        assert math.isclose(math.sin(y), math.sin(x), abs_tol=1e-9)


class TestArcDistance:
    def test_short_way_around(self):
        assert g.arc_distance(0.0, 3 * math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_identity(self):
        assert g.arc_distance(1.234, 1.234) == 0.0

    def test_near_antipodal_pair(self):
        assert g.arc_distance(math.pi, 19 * math.pi / 20) == pytest.approx(math.pi / 20, abs=1e-12)

    @given(x=angle_st, y=angle_st)
    def test_symmetric_and_bounded(self, x, y):
        d = g.arc_distance(x, y)
        assert d == g.arc_distance(y, x)
        assert 0.0 <= d <= math.pi

    @given(x=angle_st, y=angle_st, z=angle_st)
    def test_triangle_inequality(self, x, y, z):
        assert g.arc_distance(x, z) <= g.arc_distance(x, y) + g.arc_distance(y, z) + 1e-12


class TestSlotSystems:
    def test_alpha_boundaries(self):
        sys_a = g.alpha_system()
        assert len(sys_a) == 10
        assert sys_a.boundaries == tuple(j * math.pi / 5 for j in range(10))

    def test_gamma_is_half_turn_of_beta(self):
        for theta in np.linspace(0.0, g.THETA_SPAN, 37, endpoint=False):
            beta = g.beta_system(theta)
            gamma = g.gamma_system(theta)
            for b_k, g_k in zip(beta.boundaries, gamma.boundaries):
                assert g.arc_distance(g_k, b_k + math.pi) < 1e-12

    def test_wrong_boundary_count_rejected(self):
        with pytest.raises(ValueError):
            g.SlotSystem((0.0, 1.0), "beta")
        with pytest.raises(ValueError):
            g.SlotSystem(tuple(float(j) for j in range(3)), "alpha")

    def test_slot_index_quarter_turn_in_alpha(self):
        assert g.slot_index(math.pi / 2, g.alpha_system()) == 2

    def test_slot_index_walkthrough_beta_gamma(self):
        theta = 0.35 * math.pi
        assert g.slot_index(math.pi / 2, g.beta_system(theta)) == 0
        assert g.slot_index(math.pi / 2, g.gamma_system(theta)) == 1

    @given(x=angle_st, th=theta_st)
    def test_partition_totality(self, x, th):
        # every angle gets exactly one valid slot in each system, and every
        # boundary is owned by the slot it opens (half-open convention)
        for system in (g.alpha_system(), g.beta_system(th), g.gamma_system(th)):
            n = len(system)
            assert 0 <= g.slot_index(x, system) < n
            for j, b in enumerate(system.boundaries):
                assert g.slot_index(b, system) == j

    def test_partition_totality_random_intervals(self):
        # on generic inputs the rank rule agrees with direct half-open
        # interval membership
        rng = np.random.default_rng(314)
        for _ in range(10_000):
            x = float(rng.uniform(0.0, TAU))
            th = float(rng.uniform(0.0, g.THETA_SPAN))
            for system in (g.alpha_system(), g.beta_system(th), g.gamma_system(th)):
                n = len(system)
                hits = [
                    j
                    for j in range(n)
                    if (x - system.boundaries[j]) % TAU
                    < (system.boundaries[(j + 1) % n] - system.boundaries[j]) % TAU
                ]
                assert hits == [g.slot_index(x, system)]

    def test_partition_totality_bulk(self):
        rng = np.random.default_rng(20240)
        xs = rng.uniform(0.0, TAU, 10_000)
        ths = rng.uniform(0.0, g.THETA_SPAN, 10_000)
        for x, th in zip(xs, ths):
            cell = g.cell_index(float(x), float(th))
            assert 0 <= cell.index <= 15
            assert cell.alpha_slot == g.slot_index(float(x), g.alpha_system())

    def test_arithmetic_slots_match_interval_walk(self):
        rng = np.random.default_rng(99)
        for _ in range(2_000):
            x = float(rng.uniform(0.0, TAU))
            th = float(rng.uniform(0.0, g.THETA_SPAN))
            assert int(g.alpha_slot_of(x)) == g.slot_index(x, g.alpha_system())
            assert int(g.beta_slot_of(x, th)) == g.slot_index(x, g.beta_system(th))
            assert int(g.gamma_slot_of(x, th)) == g.slot_index(x, g.gamma_system(th))

    @given(x=angle_st, th=theta_st)
    def test_gamma_slot_equals_beta_slot_of_antipode(self, x, th):
        # the index permutation between the systems is the identity
        antipode = g.normalize_angle(x + math.pi)
        assert g.slot_index(x, g.gamma_system(th)) == g.slot_index(antipode, g.beta_system(th))


class TestAlphaSlotCyclicDifference:
    @pytest.mark.parametrize("j1,j2,want", [(2, 0, 2), (2, 5, 3), (9, 0, 1), (7, 2, 5)])
    def test_values(self, j1, j2, want):
        assert g.alpha_slot_cyclic_difference(j1, j2) == want

    def test_brute_force_both_directions(self):
        for j1 in range(10):
            for j2 in range(10):
                want = min((j1 - j2) % 10, (j2 - j1) % 10)
                assert g.alpha_slot_cyclic_difference(j1, j2) == want

    @pytest.mark.parametrize("j1,j2", [(-1, 0), (0, 10), (11, 3)])
    def test_out_of_range_rejected(self, j1, j2):
        with pytest.raises(ValueError):
            g.alpha_slot_cyclic_difference(j1, j2)


class TestBoundaryBetween:
    def test_walkthrough_crossing(self):
        # between pi/2 and pi under the beta system at theta = 0.35*pi the
        # only boundary is beta_1 = 0.95*pi; enumerate all three to confirm
        theta = 0.35 * math.pi
        system = g.beta_system(theta)
        inside = [b for b in system.boundaries if math.pi / 2 < b < math.pi]
        assert inside == [pytest.approx(0.95 * math.pi)]
        hit = g.boundary_between(math.pi / 2, math.pi, system)
        assert hit is not None
        assert hit.angle == pytest.approx(0.95 * math.pi, abs=1e-12)
        assert hit.index == 1
        assert not hit.multiple

    def test_same_angle_gives_none(self):
        assert g.boundary_between(1.0, 1.0, g.beta_system(0.35 * math.pi)) is None

    def test_same_slot_gives_none(self):
        system = g.beta_system(0.35 * math.pi)
        assert g.slot_index(0.0, system) == g.slot_index(math.pi / 10, system) == 2
        assert g.boundary_between(0.0, math.pi / 10, system) is None

    def test_endpoint_on_boundary_is_returned(self):
        # y exactly on a boundary still separates the slots, with zero gap
        theta = 2 * math.pi / 5  # beta_1 lands exactly on pi
        system = g.beta_system(theta)
        hit = g.boundary_between(math.pi / 2, math.pi, system)
        assert hit is not None
        assert g.arc_distance(hit.angle, math.pi) == 0.0

    def test_multiple_boundaries_flagged(self):
        # an arc of length pi can hold two boundaries of a three-slot system
        system = g.beta_system(0.1 * math.pi)
        hit = g.boundary_between(0.0, math.pi, system)
        assert hit is not None
        assert hit.multiple
        # nearest to the endpoint wins
        assert hit.angle == pytest.approx(0.7 * math.pi, abs=1e-12)

    def test_alpha_system_rejected(self):
        with pytest.raises(ValueError):
            g.boundary_between(0.0, 1.0, g.alpha_system())

    @given(x=angle_st, y=angle_st, th=theta_st)
    @settings(max_examples=200)
    def test_crossing_consistent_with_slots(self, x, y, th):
        system = g.beta_system(th)
        hit = g.boundary_between(x, y, system)
        same = g.slot_index(x, system) == g.slot_index(y, system)
        assert (hit is None) == same


class TestCellIndex:
    def test_walkthrough_triple(self):
        cell = g.cell_index(math.pi / 2, 0.35 * math.pi)
        assert cell.triple == (2, 0, 1)

    def test_last_alpha_slot(self):
        cell = g.cell_index(TAU - 1e-9, 0.123)
        assert cell.alpha_slot == 9

    def test_origin_triple_in_walkthrough_frame(self):
        cell = g.cell_index(0.0, 0.35 * math.pi)
        assert cell.triple == (0, 2, 1)

    def test_rejects_theta_out_of_range(self):
        with pytest.raises(ValueError):
            g.cell_index(1.0, g.THETA_SPAN)
        with pytest.raises(ValueError):
            g.cell_index(1.0, -0.1)

    def test_degenerate_theta_collapses_cells(self):
        # at theta = 0 all six beta/gamma boundaries coincide with alpha
        # ones, leaving ten nonempty cells; empty cells are allowed
        seen = {g.cell_index(float(x), 0.0).index for x in np.linspace(0, TAU, 5000, endpoint=False)}
        assert len(seen) == 10
        assert all(0 <= i <= 15 for i in seen)

    def test_decode_round_trip(self):
        rng = np.random.default_rng(4242)
        for _ in range(10_000):
            x = float(rng.uniform(0.0, TAU))
            th = float(rng.uniform(0.0, g.THETA_SPAN))
            cell = g.cell_index(x, th)
            assert g.cell_to_triple(cell.index, th) == cell.triple

    def test_decode_empty_cell_rejected(self):
        # at theta = 0 the beta boundaries coincide with alpha ones
        bounds = g._cell_bounds(0.0)
        empty = next(i for i in range(15) if bounds[i] == bounds[i + 1])
        with pytest.raises(ValueError):
            g.cell_to_triple(empty, 0.0)
