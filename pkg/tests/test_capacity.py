import math

import pytest

from smclab import capacity
from smclab.errors import DimensionMismatch
from smclab.probability import Channel, mutual_info

LN2 = math.log(2)


def h2(p):
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


class TestRegionPoint:
    def test_zero_rates_feasible_with_zero_floors(self, simple_chain):
        feasible, floors = capacity.region_point(simple_chain, (0.0, 0.0), "smc")
        assert feasible
        assert floors == (0.0,)

    def test_strong_security_regime_clamps(self, simple_chain):
        i_vy = mutual_info(simple_chain, "I(V;Y|U)")
        i_vz = mutual_info(simple_chain, "I(V;Z|U)")
        r_1 = (i_vy - i_vz) / 2
        _, floors = capacity.region_point(simple_chain, (0.0, r_1), "smc")
        assert floors == (0.0,)

    def test_degraded_boundary_floor_zero(self, simple_chain):
        # R_1 at exactly I(V;Y) - I(V;Z): floor hits 0 at the boundary
        gap = mutual_info(simple_chain, "I(V;Y|U)") - mutual_info(simple_chain, "I(V;Z|U)")
        assert gap == pytest.approx(h2(0.2) - h2(0.1), abs=1e-12)
        _, floors = capacity.region_point(simple_chain, (0.0, gap), "bcc_leaked")
        assert floors[0] == pytest.approx(0.0, abs=1e-12)

    def test_bcd_feasibility(self, simple_chain):
        i_vy = mutual_info(simple_chain, "I(V;Y|U)")
        assert capacity.region_point(simple_chain, (0.0, i_vy), "bcd")[0]
        assert not capacity.region_point(simple_chain, (0.0, i_vy + 0.01), "bcd")[0]

    def test_equivocation_ceiling(self, simple_chain):
        _, floors = capacity.region_point(simple_chain, (0.0, 2.0), "bcc_equivocation")
        expected = mutual_info(simple_chain, "I(V;Y|U)") - mutual_info(simple_chain, "I(V;Z|U)")
        assert floors[0] == pytest.approx(expected, abs=1e-12)

    def test_floors_monotone_in_index_set(self, rng):
        from conftest import random_chain

        for _ in range(10):
            chain = random_chain(rng)
            rates = (0.01, 0.2, 0.3)
            _, floors = capacity.region_point(chain, rates, "smc",
                                              index_sets=[(1,), (2,), (1, 2)])
            assert floors[0] <= floors[2] + 1e-12
            assert floors[1] <= floors[2] + 1e-12

    def test_unknown_model(self, simple_chain):
        with pytest.raises(DimensionMismatch):
            capacity.region_point(simple_chain, (0.0, 0.0), "nonsense")


class TestRegionSample:
    def test_trivial_aux_sizes_give_zero_rates(self):
        points = capacity.region_sample(Channel.bsc(0.1), Channel.bsc(0.2),
                                        "bcc_leaked", 1, 1, 3, seed=1)
        for point in points:
            assert point.rates[1] == pytest.approx(0.0, abs=1e-12)

    def test_degraded_pair_reaches_secrecy_capacity(self):
        points = capacity.region_sample(Channel.bsc(0.1), Channel.bsc(0.2),
                                        "bcc_leaked", 1, 2, 500, seed=2)
        best = capacity.max_secrecy_rate(points)
        assert best >= h2(0.2) - h2(0.1) - 1e-3

    def test_identical_channels_leak_everything(self):
        points = capacity.region_sample(Channel.bsc(0.15), Channel.bsc(0.15),
                                        "bcc_leaked", 1, 2, 200, seed=3)
        assert capacity.max_secrecy_rate(points) <= 1e-9

    def test_points_self_consistent(self):
        points = capacity.region_sample(Channel.bsc(0.1), Channel.bsc(0.2),
                                        "smc", 2, 2, 50, seed=4)
        for point in points:
            feasible, floors = capacity.region_point(point.chain, point.rates, point.model)
            assert feasible
            assert floors[0] == pytest.approx(point.floors[0], abs=1e-12)

    def test_deterministic_in_seed(self):
        a = capacity.region_sample(Channel.bsc(0.1), Channel.bsc(0.2), "bcd", 1, 2, 20, seed=5)
        b = capacity.region_sample(Channel.bsc(0.1), Channel.bsc(0.2), "bcd", 1, 2, 20, seed=5)
        assert all(x.rates == y.rates for x, y in zip(a, b))


class TestSecrecyCapacityDegraded:
    def test_degraded_bsc_pair(self):
        value = capacity.secrecy_capacity_degraded(Channel.bsc(0.1), Channel.bsc(0.2))
        assert value == pytest.approx(h2(0.2) - h2(0.1), abs=1e-4)

    def test_eve_noiseless_gives_zero(self):
        assert capacity.secrecy_capacity_degraded(Channel.bsc(0.1), Channel.identity(2)) == 0.0

    def test_oblivious_eve_gives_full_capacity(self):
        value = capacity.secrecy_capacity_degraded(Channel.identity(2), Channel.bsc(0.5))
        assert value == pytest.approx(LN2, abs=1e-9)

    def test_invariant_under_output_relabeling(self):
        w_b = Channel([[0.8, 0.15, 0.05], [0.1, 0.2, 0.7]])
        w_b_swapped = Channel(w_b.rows[:, [2, 0, 1]])
        w_e = Channel.bsc(0.3)
        a = capacity.secrecy_capacity_degraded(w_b, w_e, grid=2001)
        b = capacity.secrecy_capacity_degraded(w_b_swapped, w_e, grid=2001)
        assert a == pytest.approx(b, abs=1e-13)

    def test_requires_binary_input(self):
        with pytest.raises(DimensionMismatch):
            capacity.secrecy_capacity_degraded(Channel([[1 / 3] * 3] * 3), Channel.bsc(0.1))
