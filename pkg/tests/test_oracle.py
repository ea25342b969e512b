import math

import numpy as np
import pytest

from smclab import affine, oracle, smc_codec
from smclab.errors import CapExceeded, DimensionMismatch
from smclab.probability import ChainSpec, Channel, Distribution, tensor_power
from smclab.renyi import JointSource
from test_smc_codec import otp_code, repetition_code, uniform_source

LN2 = math.log(2)


def h2(p):
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


class TestExactLeakage:
    def test_one_time_pad_perfect_secrecy(self):
        code = otp_code()
        assert oracle.exact_leakage(code, uniform_source((1, 2, 2)), (1,)) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_biased_pad(self):
        code = otp_code()
        joint = np.zeros((1, 2, 2))
        for s1 in range(2):
            for s2 in range(2):
                joint[0, s1, s2] = 0.5 * (0.75 if s2 == 1 else 0.25)
        source = JointSource((1, 2, 2), Distribution(joint.reshape(-1, order="F")),
                             a_axes=(0, 1, 2))
        # oracle: direct joint enumeration gives ln 2 - h(0.25)
        assert oracle.exact_leakage(code, source, (1,)) == pytest.approx(
            LN2 - h2(0.25), abs=1e-9
        )

    def test_full_index_set_reveals_everything_visible(self):
        code = otp_code()  # Z sees s_1 + s_2 only
        value = oracle.exact_leakage(code, uniform_source((1, 2, 2)), (1, 2))
        assert value == pytest.approx(LN2, abs=1e-12)

    def test_injective_noiseless_reveals_conditional_entropy(self):
        # noiseless Z with distinct codewords: I(S_{1..T} : Z | S_0) = H(S_{1..T} | S_0)
        chain = ChainSpec(Distribution([1.0]), Channel([[0.25] * 4]), Channel.identity(4),
                          Channel.identity(4), Channel.identity(4))
        layout = affine.MessageLayout(2, (0, 2), 0, 2)
        table_p = np.arange(4, dtype=np.int64).reshape(1, 1, 4, 1)
        code = smc_codec.SmcCode(layout, smc_codec.BcdCodebook(1, np.zeros((1, 1, 1), np.int64), table_p),
                                 affine.AffineMap.identity(2, 2), "second", chain)
        src = uniform_source((1, 4))
        assert oracle.exact_leakage(code, src, (1,)) == pytest.approx(math.log(4), abs=1e-12)

    def test_leakage_capped_by_entropy_and_output(self, rng):
        code = otp_code()
        for _ in range(10):
            probs = rng.dirichlet(np.ones(4))
            src = JointSource((1, 2, 2), Distribution(probs), a_axes=(0, 1, 2))
            value = oracle.exact_leakage(code, src, (1,))
            marg = probs.reshape((2, 2), order="F").sum(axis=1)
            h_s1 = -sum(p * math.log(p) for p in marg if p > 0)
            assert value <= min(h_s1, code.n * LN2) + 1e-12

    def test_cap(self):
        code = otp_code()
        with pytest.raises(CapExceeded):
            oracle.exact_leakage(code, uniform_source((1, 2, 2)), (1,), cap=3)


class TestExactLeakageCrossValidation:
    def test_matches_dict_based_enumeration_q3(self, rng):
        # fully independent reference: dictionary-accumulated joint law over
        # (s_0, s_I, z-string) with hand-rolled per-letter channel products
        q = 3
        layout = affine.MessageLayout(q, (1, 1, 1), 1, 1)
        chain = ChainSpec(
            Distribution([0.5, 0.3, 0.2]),
            Channel(np.array([[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.1, 0.2, 0.7]])),
            Channel.identity(3),
            Channel(np.array([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.15, 0.15, 0.7]])),
            Channel(np.array([[0.5, 0.3, 0.2], [0.25, 0.5, 0.25], [0.2, 0.3, 0.5]])),
        )
        codebook = smc_codec.sample_codebook(chain, layout, n=2, seed=5)
        code = smc_codec.SmcCode(layout, codebook, affine.sample_map(q, 2, seed=8),
                                 "first", chain)
        probs = rng.dirichlet(np.ones(27))
        src = JointSource((3, 3, 3), Distribution(probs), a_axes=(0, 1, 2))
        table = probs.reshape((3, 3, 3), order="F")
        wz = chain.p_z_given_v.rows

        def reference(index):
            from collections import defaultdict

            joint, marg, p_group, p_s0 = (defaultdict(float) for _ in range(4))
            for s0 in range(3):
                for s1 in range(3):
                    for s2 in range(3):
                        pm = table[s0, s1, s2]
                        v = code.v_string(s0, (s1, s2))
                        key = tuple((s1, s2)[i - 1] for i in index)
                        for z0 in range(3):
                            for z1 in range(3):
                                pz = wz[v[0], z0] * wz[v[1], z1]
                                joint[(s0, key, (z0, z1))] += pm * pz
                                marg[(s0, (z0, z1))] += pm * pz
                        p_group[(s0, key)] += pm
                        p_s0[s0] += pm
            total = 0.0
            for (s0, key, z), p in joint.items():
                if p > 0:
                    total += p * math.log((p / p_group[(s0, key)]) / (marg[(s0, z)] / p_s0[s0]))
            return total

        for index in [(1,), (2,), (1, 2)]:
            assert oracle.exact_leakage(code, src, index) == pytest.approx(
                reference(index), abs=1e-11
            )


class TestExactResolvability:
    def test_identity_zero(self):
        d, psi = oracle.exact_resolvability([0, 1], Distribution.uniform(2),
                                            Channel.bsc(0.1), Distribution.uniform(2), 1.0)
        assert d == pytest.approx(0.0, abs=1e-14)
        assert psi == pytest.approx(0.0, abs=1e-14)

    def test_biased_input(self):
        d, _ = oracle.exact_resolvability([0, 1], Distribution([0.75, 0.25]),
                                          Channel.bsc(0.1), Distribution.uniform(2), 0.5)
        # oracle: output (0.7, 0.3); D = 0.7 ln 1.4 + 0.3 ln 0.6
        assert d == pytest.approx(0.7 * math.log(1.4) + 0.3 * math.log(0.6), abs=1e-13)

    def test_constant_encoder(self):
        d, _ = oracle.exact_resolvability([0, 0], Distribution.uniform(2),
                                          Channel.bsc(0.1), Distribution.uniform(2), 0.5)
        # oracle: 0.9 ln 1.8 + 0.1 ln 0.2
        assert d == pytest.approx(0.9 * math.log(1.8) + 0.1 * math.log(0.2), abs=1e-13)


class TestEnsembleChecks:
    def test_thm1_worked_example(self):
        inst = oracle.Thm1Instance(Distribution([0.75, 0.25]), Channel.bsc(0.1),
                                   Distribution.uniform(2))
        result = oracle.ensemble_bound_check("thm1", inst, 1.0)
        # oracle: 4 maps with e^psi in {1.64, 1.64, 1.16, 1.16}, each weight 1/4
        assert result.lhs_psi_avg == pytest.approx(1.4, abs=1e-12)
        assert result.rhs == pytest.approx(2.025, abs=1e-12)
        assert result.holds

    def test_thm1_holds_across_rho(self):
        inst = oracle.Thm1Instance(Distribution([0.75, 0.25]), Channel.bsc(0.1),
                                   Distribution.uniform(2))
        for rho in np.linspace(0.1, 1.0, 10):
            result = oracle.ensemble_bound_check("thm1", inst, float(rho))
            assert result.holds
            assert result.lhs_psi_avg >= result.lhs_d_avg >= 1.0 - 1e-12

    def test_thm2_uniform_message_rhs_uses_log_cardinality(self):
        w = tensor_power(Channel.bsc(0.1), 2)
        inst = oracle.Thm2Instance(2, 2, Distribution.uniform(4), w)
        result = oracle.ensemble_bound_check("thm2", inst, 1.0)
        from smclab.renyi import psi_channel

        expected_rhs = 1.0 + math.exp(-math.log(4)) * math.exp(
            psi_channel(w, Distribution.uniform(4), 1.0)
        )
        assert result.rhs == pytest.approx(expected_rhs, abs=1e-12)
        assert result.holds

    def test_thm2_bijections_tighter_than_thm1(self):
        # restricted to bijections the average stays below the full-random rhs
        w = tensor_power(Channel.bsc(0.1), 2)
        p_a = Distribution([0.4, 0.3, 0.2, 0.1])
        r2 = oracle.ensemble_bound_check("thm2", oracle.Thm2Instance(2, 2, p_a, w), 0.7)
        assert r2.holds

    def test_regular_channel_fixed_offset_suffices(self):
        # For a regular (group-translation) channel the affine family with the
        # offset pinned to zero already meets the thm2 bound.
        from smclab import affine
        from smclab.renyi import dist_renyi_entropy, psi_channel

        w = tensor_power(Channel.bsc(0.1), 2)
        p_a = Distribution([0.4, 0.3, 0.2, 0.1])
        p_mix = Distribution.uniform(4)
        rho = 1.0
        family = affine.enumerate_family(2, 2)
        terms = []
        for mat in family:
            assignment = [
                affine.FieldVec(2, tuple((mat @ np.array(affine.FieldVec.from_index(2, 2, a).coords)) % 2)).to_index()
                for a in range(4)
            ]
            _, psi_val = oracle.exact_resolvability(assignment, p_a, w, p_mix, rho)
            terms.append(math.exp(psi_val))
        lhs = sum(terms) / len(terms)
        rhs = 1.0 + math.exp(-rho * dist_renyi_entropy(p_a, rho)) * math.exp(
            psi_channel(w, p_mix, rho)
        )
        assert lhs <= rhs + 1e-9

    def test_degenerate_channel_rows_identical(self):
        w = Channel([[0.5, 0.5], [0.5, 0.5]])
        inst = oracle.Thm1Instance(Distribution([0.75, 0.25]), w, Distribution.uniform(2))
        result = oracle.ensemble_bound_check("thm1", inst, 0.8)
        assert result.lhs_d_avg == pytest.approx(1.0, abs=1e-12)
        assert result.lhs_psi_avg == pytest.approx(1.0, abs=1e-12)
        assert result.holds

    def test_lem4_holds_on_random_sources(self, rng):
        layout = affine.MessageLayout(2, (1, 1, 1), 1, 1)
        chain = ChainSpec(Distribution([0.6, 0.4]), Channel([[0.7, 0.3], [0.2, 0.8]]),
                          Channel.identity(2), Channel.bsc(0.1), Channel.bsc(0.25))
        codebook = smc_codec.sample_codebook(chain, layout, n=2, seed=21)
        code = smc_codec.SmcCode(layout, codebook, affine.AffineMap.identity(2, 2),
                                 "first", chain)
        for _ in range(3):
            probs = rng.dirichlet(np.ones(8))
            source = JointSource((2, 2, 2), Distribution(probs), a_axes=(0, 1, 2))
            for index in [(1,), (2,), (1, 2)]:
                inst = oracle.Lem4Instance(code, source, frozenset(index))
                result = oracle.ensemble_bound_check("lem4", inst, 1.0)
                assert result.holds
                assert result.lhs_d_avg <= result.lhs_psi_avg + 1e-12

    def test_unknown_mode(self):
        with pytest.raises(DimensionMismatch):
            oracle.ensemble_bound_check("thm3", None, 0.5)

    def test_cap(self):
        inst = oracle.Thm1Instance(Distribution.uniform(8), Channel.bsc(0.1),
                                   Distribution.uniform(2))
        with pytest.raises(CapExceeded):
            oracle.ensemble_bound_check("thm1", inst, 0.5, cap=4)


class TestExactError:
    def test_noiseless_injective_code(self):
        chain = ChainSpec(Distribution([1.0]), Channel([[0.5, 0.5]]), Channel.identity(2),
                          Channel.identity(2), Channel.identity(2))
        layout = affine.MessageLayout(2, (0, 1), 0, 1)
        table_p = np.array([[[[0], [1]]]], dtype=np.int64)
        code = smc_codec.SmcCode(layout, smc_codec.BcdCodebook(1, np.zeros((1, 1, 1), np.int64), table_p),
                                 affine.AffineMap.identity(2, 1), "second", chain)
        assert oracle.exact_error(code, uniform_source((1, 2))) == (0.0, 0.0)

    def test_repetition_code(self):
        code = repetition_code()
        p_b, p_e = oracle.exact_error(code, uniform_source((1, 2)))
        assert p_b == pytest.approx(0.028, abs=1e-15)
        assert p_e == 0.0

    def test_single_message_never_errs(self):
        chain = ChainSpec(Distribution([1.0]), Channel([[1.0]]), Channel([[0.5, 0.5]]),
                          Channel.bsc(0.3), Channel.bsc(0.3))
        layout = affine.MessageLayout(2, (0, 0), 0, 0)
        codebook = smc_codec.BcdCodebook(
            2, np.zeros((1, 1, 2), np.int64), np.zeros((1, 1, 1, 2), np.int64)
        )
        code = smc_codec.SmcCode(layout, codebook, affine.AffineMap.identity(2, 0),
                                 "second", chain)
        p_b, p_e = oracle.exact_error(code, uniform_source((1, 1)))
        assert p_b == 0.0 and p_e == 0.0

    def test_simulation_matches_exact(self):
        code = repetition_code(n=3, p=0.2)
        src = uniform_source((1, 2))
        p_b, _ = oracle.exact_error(code, src)
        result = smc_codec.simulate(code, src, trials=20_000, seed=9)
        sigma = math.sqrt(p_b * (1 - p_b) / 20_000)
        assert abs(result.p_b_hat - p_b) <= 3 * sigma


def test_message_index_round_trip():
    code = otp_code()
    sizes = code.message_sizes()
    seen = set()
    for s1 in range(2):
        for s2 in range(2):
            seen.add(oracle._msg_index(code, (0, s1, s2)))
    assert seen == {0, 1, 2, 3}


class TestDryRun:
    def test_leakage_term_count(self):
        code = otp_code()
        count = oracle.exact_leakage(code, uniform_source((1, 2, 2)), (1,), dry_run=True)
        assert count == 4 * 2  # four messages, |Z|^n = 2

    def test_ensemble_term_counts(self):
        inst = oracle.Thm1Instance(Distribution([0.75, 0.25]), Channel.bsc(0.1),
                                   Distribution.uniform(2))
        assert oracle.ensemble_bound_check("thm1", inst, 1.0, dry_run=True) == 4
        w = tensor_power(Channel.bsc(0.1), 2)
        inst2 = oracle.Thm2Instance(2, 2, Distribution.uniform(4), w)
        assert oracle.ensemble_bound_check("thm2", inst2, 1.0, dry_run=True) == 24

    def test_exact_error_term_count(self):
        code = repetition_code()
        count = oracle.exact_error(code, uniform_source((1, 2)), dry_run=True)
        assert count == (8 + 8) * 2
