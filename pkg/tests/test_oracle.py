import numpy as np
import pytest

from haplosim import (
    ConstantGrowth,
    InvalidParameterError,
    MutationRates,
    RandomStream,
    SimulationConfig,
    classic_fw_step,
    naive_simulate,
)


def make_config(**overrides):
    base = dict(
        k=100,
        g=1,
        r=2,
        rates=MutationRates.symmetric(2, 0.0),
        schedule=ConstantGrowth(1.0),
        seed=1,
    )
    base.update(overrides)
    return SimulationConfig(**base)


class TestNaive:
    def test_zero_rates_children_are_copies(self):
        totals = []
        for rep in range(2000):
            result = naive_simulate(make_config(seed=2), replicate=rep)
            totals.append(int(result.sizes[1]))
            for hap, _ in result.final_haplotypes:
                assert hap == (0, 0)
        assert abs(np.mean(totals) - 100) <= 4 * np.sqrt(100 / 2000)

    def test_empty_start_extinct(self):
        result = naive_simulate(make_config(k=0, g=5, save_generations=(2,)))
        assert result.extinct_at == 1
        assert np.all(result.sizes == 0)
        assert result.intermediates == {2: []}

    def test_result_shape_matches_engine(self):
        config = make_config(k=50, g=4, rates=MutationRates.symmetric(2, 0.05),
                             save_generations=(2, 4), seed=3)
        result = naive_simulate(config)
        assert result.sizes.shape == (5,)
        assert result.expected_sizes.shape == (5,)
        assert set(result.intermediates) == {2, 4}
        for g, table in result.intermediates.items():
            assert sum(c for _, c in table) == result.sizes[g]
            assert table == sorted(table)

    def test_deterministic(self):
        config = make_config(k=40, g=3, rates=MutationRates.symmetric(2, 0.1), seed=4)
        a = naive_simulate(config)
        b = naive_simulate(config)
        assert np.array_equal(a.sizes, b.sizes)
        assert a.final_haplotypes == b.final_haplotypes

    def test_asymmetric_rates_bias_direction(self):
        # omega >> delta: mutated children land above the origin
        config = make_config(
            k=4000, g=1, r=1, rates=MutationRates([0.0], [0.3]), seed=5
        )
        result = naive_simulate(config)
        table = dict(result.final_haplotypes)
        assert table.get((1,), 0) > 0
        assert all(h[0] >= 0 for h in table)

    def test_multi_haplotype_start(self):
        config = make_config(
            k=100, initial_population=[((0, 0), 30), ((2, 2), 70)], seed=6
        )
        result = naive_simulate(config)
        assert {h for h, _ in result.final_haplotypes} <= {(0, 0), (2, 2)}


class TestClassicStep:
    def test_single_haplotype_fixed_point(self):
        stream = RandomStream(7)
        counts = {(0, 0): 64}
        for _ in range(20):
            counts = classic_fw_step(counts, 64, stream)
            assert counts == {(0, 0): 64}

    def test_conserves_total_exactly(self):
        stream = RandomStream(8)
        counts = {(0,): 50, (1,): 30, (2,): 20}
        for _ in range(200):
            counts = classic_fw_step(counts, 100, stream)
            assert sum(counts.values()) == 100

    def test_mean_preserved(self):
        stream = RandomStream(9)
        draws = []
        for _ in range(100_000):
            nxt = classic_fw_step({(0,): 50, (1,): 50}, 100, stream)
            draws.append(nxt.get((0,), 0))
        assert abs(np.mean(draws) - 50) <= 4 * np.sqrt(100 * 0.25 / 100_000)

    def test_count_sum_mismatch(self):
        with pytest.raises(InvalidParameterError):
            classic_fw_step({(0,): 5}, 6, RandomStream(10))

    def test_fixation_probability_equals_initial_frequency(self):
        # martingale property: a haplotype starting at frequency 1/4 fixes
        # with probability 1/4
        stream = RandomStream(11)
        fixed_a = 0
        runs = 100_000
        for _ in range(runs):
            counts = {(0,): 1, (1,): 3}
            while len(counts) > 1:
                counts = classic_fw_step(counts, 4, stream)
            fixed_a += (0,) in counts
        p_hat = fixed_a / runs
        assert abs(p_hat - 0.25) <= 4 * np.sqrt(0.25 * 0.75 / runs)

    def test_accepts_pair_iterable(self):
        out = classic_fw_step([((0,), 10)], 10, RandomStream(12))
        assert out == {(0,): 10}
