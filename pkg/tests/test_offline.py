import numpy as np
import pytest

from onlineusm.errors import ConfigError, SizeError
from onlineusm.offline import (
    brute_force_opt,
    det_double_greedy,
    rand_double_greedy,
    rand_double_greedy_stats,
    uniform_random_value,
)
from onlineusm.submodular import (
    DirectedGraph,
    GroundSet,
    SubmodularOracle,
    mask_of,
    normalize,
    oracle_from_table,
    tabulate,
)


def test_brute_force_single_edge(single_edge_oracle):
    res = brute_force_opt(single_edge_oracle)
    assert res.chosen == mask_of([1])
    assert res.value == 1.0


def test_brute_force_constant_tie_breaks_to_empty(constant_oracle):
    res = brute_force_opt(constant_oracle(4, 0.25))
    assert res.chosen == 0
    assert res.value == 0.25


def test_brute_force_modular_picks_positive_support():
    rng = np.random.default_rng(31)
    n = 8
    w = rng.uniform(-0.4, 0.6, size=n)
    offset = -w[w < 0].sum()
    scale = np.abs(w).sum()
    masks = np.arange(1 << n)
    sums = np.zeros(1 << n)
    for i in range(n):
        sums += np.where((masks >> i) & 1, w[i], 0.0)
    res = brute_force_opt(oracle_from_table((sums + offset) / scale))
    want = int(sum(1 << i for i in range(n) if w[i] > 0))
    assert res.chosen == want


def test_brute_force_size_error():
    with pytest.raises(SizeError):
        brute_force_opt(SubmodularOracle(GroundSet(21), lambda m: 0.0))


def test_det_double_greedy_single_edge_trace(single_edge_oracle):
    res = det_double_greedy(single_edge_oracle)
    assert res.chosen == mask_of([1])
    assert res.value == 1.0


def test_det_double_greedy_constant_takes_everything(constant_oracle):
    res = det_double_greedy(constant_oracle(5, 0.5))
    assert res.chosen == (1 << 5) - 1  # ties choose yes at every step


def test_det_double_greedy_value_matches_choice(cut_corpus):
    for n, oracle in cut_corpus(count=10, seed=41):
        res = det_double_greedy(oracle)
        assert res.value == pytest.approx(oracle.peek(res.chosen), abs=1e-12)


def test_det_double_greedy_third_of_opt(cut_corpus):
    for n, oracle in cut_corpus(count=40, n_range=(3, 12), seed=100):
        opt = brute_force_opt(oracle).value
        assert det_double_greedy(oracle).value >= opt / 3 - 1e-9


def test_sweep_query_budget(cut_corpus):
    for n, oracle in cut_corpus(count=5, seed=55):
        t = tabulate(oracle)
        det_double_greedy(t)
        assert t.queries == 2 * n + 2 <= 4 * n + 2
        t2 = tabulate(oracle)
        rand_double_greedy(t2, np.random.default_rng(0))
        assert t2.queries == 2 * n + 2


def test_rand_double_greedy_forced_choices(single_edge_oracle):
    # element 1 is forced yes (only alpha positive), element 2 forced no
    for seed in range(25):
        res = rand_double_greedy(single_edge_oracle, np.random.default_rng(seed))
        assert res.chosen == mask_of([1])
        assert res.value == 1.0


def test_rand_double_greedy_tie_is_fair_coin():
    # bidirected pair: alpha = beta = 0.5 for element 1
    oracle = tabulate(normalize(DirectedGraph(2, ((1, 2, 1.0), (2, 1, 1.0)))))
    rng = np.random.default_rng(7)
    hits = sum(rand_double_greedy(oracle, rng).chosen & 1 for _ in range(2000))
    assert abs(hits / 2000 - 0.5) < 0.06  # ~5 sigma


def test_rand_double_greedy_zero_marginals_choose_yes(constant_oracle):
    res = rand_double_greedy(constant_oracle(4, 0.0), np.random.default_rng(1))
    assert res.chosen == (1 << 4) - 1


def test_rand_double_greedy_stats_reproducible(cut_corpus):
    (n, oracle), = cut_corpus(count=1, n_range=(6, 6), seed=71)
    a = rand_double_greedy_stats(tabulate(oracle), trials=200, seed=5)
    b = rand_double_greedy_stats(tabulate(oracle), trials=200, seed=5)
    assert (a.chosen, a.value, a.mean, a.std, a.trials) == (b.chosen, b.value, b.mean, b.std, b.trials)
    c = rand_double_greedy_stats(tabulate(oracle), trials=200, seed=6)
    assert (a.mean, a.std) != (c.mean, c.std)


def test_rand_double_greedy_stats_half_of_opt(cut_corpus):
    (n, oracle), = cut_corpus(count=1, n_range=(8, 8), seed=19)
    t = tabulate(oracle)
    opt = brute_force_opt(t).value
    stats = rand_double_greedy_stats(t, trials=3000, seed=0)
    stderr = stats.std / np.sqrt(stats.trials)
    assert stats.mean >= opt / 2 - 3 * stderr


def test_rand_double_greedy_stats_validates_trials(single_edge_oracle):
    with pytest.raises(ConfigError):
        rand_double_greedy_stats(single_edge_oracle, trials=0, seed=0)


def test_uniform_random_value_single_edge(single_edge_oracle):
    # four subsets, exactly one cuts the edge
    assert uniform_random_value(single_edge_oracle) == pytest.approx(0.25)
    assert uniform_random_value(single_edge_oracle) == pytest.approx(
        brute_force_opt(single_edge_oracle).value / 4
    )


def test_uniform_random_value_constant(constant_oracle):
    assert uniform_random_value(constant_oracle(6, 0.37)) == pytest.approx(0.37)


def test_uniform_random_value_quarter_of_opt(cut_corpus):
    for n, oracle in cut_corpus(count=25, n_range=(3, 12), seed=23):
        opt = brute_force_opt(oracle).value
        assert uniform_random_value(oracle) >= opt / 4 - 1e-9
