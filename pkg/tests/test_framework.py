import math

import numpy as np
import pytest

from onlineusm.adversaries import CycleFunctionAdversary, FixedFunctionAdversary
from onlineusm.balance import Balancer, always_no, always_yes, uniform_coin
from onlineusm.errors import ConfigError, ContractError, SizeError
from onlineusm.framework import (
    fit_growth_exponent,
    marginal_pair,
    opt_drop_margin,
    opt_tracking_check,
    run_round,
    run_usm_game,
    usm_alpha_regret,
    value_identity_residual,
)
from onlineusm.offline import brute_force_opt
from onlineusm.submodular import (
    GroundSet,
    SubmodularOracle,
    normalize,
    oracle_from_table,
    random_digraph,
    tabulate,
)

from conftest import grow_only_oracle


def streams_for(n, seed=0):
    return [np.random.default_rng((seed, i)) for i in range(n)]


def random_cut_oracle(n, seed, density=0.5):
    return tabulate(normalize(random_digraph(n, density, (0.0, 1.0), np.random.default_rng(seed))))


# --- marginal_pair -------------------------------------------------------

def test_marginal_pair_single_edge(single_edge_oracle):
    f = single_edge_oracle
    assert marginal_pair(f, 0, 0b11, 1) == (1.0, 0.0)
    # after a yes on element 1: adding 2 kills the cut, dropping it restores
    assert marginal_pair(f, 0b01, 0b11, 2) == (-1.0, 1.0)


def test_marginal_pair_constant(constant_oracle):
    # valid context for i = 2: X and Y agree on element 1
    assert marginal_pair(constant_oracle(3), 0, 0b110, 2) == (0.0, 0.0)


def test_marginal_pair_counts_queries(single_edge_oracle):
    f = single_edge_oracle
    marginal_pair(f, 0, 0b11, 1)
    assert f.queries == 4


def test_marginal_pair_contract_errors(single_edge_oracle):
    f = single_edge_oracle
    with pytest.raises(ContractError):
        marginal_pair(f, 0b10, 0b01, 1)  # X not inside Y
    with pytest.raises(ContractError):
        marginal_pair(f, 0b01, 0b11, 1)  # i already in X
    with pytest.raises(ContractError):
        marginal_pair(f, 0, 0b01, 2)  # i missing from Y
    with pytest.raises(ContractError):
        marginal_pair(f, 0b01, 0b10, 2)  # disagree below i
    with pytest.raises(ContractError):
        marginal_pair(f, 0, 0b11, 3)  # element out of range


# --- run_round -----------------------------------------------------------

def test_run_round_forced_yes_single_element():
    f = oracle_from_table([0.0, 1.0])
    tr = run_round([always_yes()], f, streams_for(1))
    assert tr.chosen == 0b1
    assert tr.x_sets == (0, 1) and tr.y_sets == (1, 1)


def test_run_round_always_no_shrinks_y():
    f = random_cut_oracle(4, seed=3)
    tr = run_round([always_no() for _ in range(4)], f, streams_for(4))
    assert tr.chosen == 0
    assert tr.y_sets == (0b1111, 0b1110, 0b1100, 0b1000, 0b0000)
    assert tr.x_sets == (0, 0, 0, 0, 0)


def test_run_round_transcript_invariants():
    n = 6
    f = random_cut_oracle(n, seed=11)
    subs = [Balancer(64) for _ in range(n)]
    tr = run_round(subs, f, streams_for(n))
    for i in range(n + 1):
        assert tr.x_sets[i] & ~tr.y_sets[i] == 0  # X inside Y
    assert tr.x_sets[n] == tr.y_sets[n] == tr.chosen
    for a, b in tr.marginals:
        assert a + b >= -1e-9


def test_run_round_query_budget_n8():
    n = 8
    f = random_cut_oracle(n, seed=5)
    subs = [Balancer(100) for _ in range(n)]
    before = f.queries
    tr = run_round(subs, f, streams_for(n))
    assert tr.queries == f.queries - before
    assert tr.queries <= 34
    assert tr.queries <= 4 * n + 2


def test_run_round_marginals_match_direct_recompute():
    n = 5
    f = random_cut_oracle(n, seed=8)
    subs = [uniform_coin() for _ in range(n)]
    tr = run_round(subs, f, streams_for(n, seed=4))
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        x_prev, y_prev = tr.x_sets[i - 1], tr.y_sets[i - 1]
        alpha = f.peek(x_prev | bit) - f.peek(x_prev)
        beta = f.peek(y_prev & ~bit) - f.peek(y_prev)
        assert tr.marginals[i - 1] == (alpha, beta)


def test_run_round_no_cross_round_caching():
    n = 4
    f = random_cut_oracle(n, seed=2)
    subs = [always_yes() for _ in range(n)]
    tr1 = run_round(subs, f, streams_for(n))
    tr2 = run_round(subs, f, streams_for(n))
    assert tr2.queries == tr1.queries  # second identical round pays again


def test_run_round_subroutine_count_mismatch():
    f = random_cut_oracle(3, seed=1)
    with pytest.raises(ConfigError):
        run_round([always_yes()], f, streams_for(1))


# --- usm_alpha_regret ----------------------------------------------------

def test_usm_alpha_regret_zero_when_matching_opt():
    f = random_cut_oracle(4, seed=9)
    best = brute_force_opt(f).chosen
    history = [(f, best)] * 7
    assert usm_alpha_regret(history, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_usm_alpha_regret_single_round_half():
    f = oracle_from_table([0.0, 1.0])
    assert usm_alpha_regret([(f, 0)], 0.5) == pytest.approx(0.5)


def test_usm_alpha_regret_repeated_single_edge(single_edge_oracle):
    f = single_edge_oracle
    t = 13
    for a in (0.25, 0.5, 1.0):
        got = usm_alpha_regret([(f, 0b01)] * t, a)
        assert got == pytest.approx((a - 1.0) * t)


def test_usm_alpha_regret_supplied_opt_and_size_error():
    f = oracle_from_table([0.0, 1.0, 0.25, 0.5])
    history = [(f, 0b01), (f, 0b10)]
    assert usm_alpha_regret(history, 1.0, opt=0b01) == pytest.approx(2.0 - 1.25)
    big = SubmodularOracle(GroundSet(21), lambda m: 0.0)
    with pytest.raises(SizeError):
        usm_alpha_regret([(big, 0)], 0.5)
    assert usm_alpha_regret([(big, 0)], 0.5, opt=0) == 0.0
    assert usm_alpha_regret([], 0.5) == 0.0


# --- opt_tracking_check and summed diagnostics ----------------------------

def run_recorded(n, rounds, subs_factory, oracle_seed=0, coin_seed=0):
    f = random_cut_oracle(n, seed=oracle_seed)
    adversary = FixedFunctionAdversary(f)
    subs = [subs_factory() for _ in range(n)]
    streams = streams_for(n, seed=coin_seed)
    return run_usm_game(
        subs, adversary, rounds, streams,
        keep_transcripts=True, keep_oracles=True,
    )


def test_opt_tracking_passes_on_submodular_runs():
    res = run_recorded(6, 25, lambda: Balancer(25), oracle_seed=14)
    opt = brute_force_opt(res.oracles[0]).chosen
    for tr, f in zip(res.transcripts, res.oracles):
        assert opt_tracking_check(tr, f, opt) is None


def test_opt_tracking_with_opt_equal_to_choice():
    res = run_recorded(5, 10, lambda: uniform_coin(), oracle_seed=3)
    for tr, f in zip(res.transcripts, res.oracles):
        assert opt_tracking_check(tr, f, tr.chosen) is None


def test_opt_tracking_flags_non_submodular():
    n = 4
    f = grow_only_oracle(n)
    subs = [always_yes() for _ in range(n)]  # feedback ignored, no triangle check
    tr = run_round(subs, f, streams_for(n))
    violation = opt_tracking_check(tr, f, opt=0)
    assert violation is not None
    assert violation.relation == "opt-drop-yes"


def test_value_identity_residual_and_drop_margin():
    res = run_recorded(6, 40, lambda: Balancer(40), oracle_seed=21, coin_seed=5)
    opt = brute_force_opt(res.oracles[0]).chosen
    n = 6
    for i in range(1, n + 1):
        assert abs(value_identity_residual(res.transcripts, res.oracles, i)) <= 1e-9
        assert opt_drop_margin(res.transcripts, res.oracles, opt, i) >= -1e-9


# --- subroutine isolation -------------------------------------------------

def test_earlier_subroutine_inputs_ignore_later_seeds():
    n = 4
    rounds = 30
    f = random_cut_oracle(n, seed=6)

    def run_with(stream_seeds):
        adversary = FixedFunctionAdversary(f)
        subs = [Balancer(rounds) for _ in range(n)]
        streams = [np.random.default_rng(s) for s in stream_seeds]
        return run_usm_game(subs, adversary, rounds, streams, keep_transcripts=True)

    base = run_with([10, 11, 12, 13])
    moved = run_with([10, 11, 99, 98])

    def column(res, i):
        return [tr.marginals[i - 1] for tr in res.transcripts]

    # inputs of subroutines 1..3 depend only on coins of subroutines < i
    for i in (1, 2, 3):
        assert column(base, i) == column(moved, i)
    assert column(base, 4) != column(moved, 4)


# --- run_usm_game result contracts ----------------------------------------

def test_run_result_series_invariants():
    n = 5
    rounds = 60
    oracles = [random_cut_oracle(n, seed=s) for s in (1, 2)]
    adversary = CycleFunctionAdversary(oracles)
    subs = [Balancer(rounds) for _ in range(n)]
    res = run_usm_game(
        subs, adversary, rounds, streams_for(n, seed=2),
        alpha=0.5, keep_sets=True, keep_oracles=True,
    )
    assert np.allclose(np.cumsum(res.rewards), res.cum_rewards)
    assert np.all(np.diff(np.cumsum(res.round_queries)) >= 0)
    assert res.max_round_queries <= 4 * n + 2
    assert res.total_queries == int(res.round_queries.sum())
    assert res.final_opt == pytest.approx(res.cum_opt[-1])
    assert res.final_alpha_regret == pytest.approx(res.alpha_regret[-1])
    # regret series agrees with an independent recomputation on prefixes
    history = list(zip(res.oracles, res.chosen_sets))
    for t in (1, 7, 33, 60):
        want = usm_alpha_regret(history[:t], 0.5)
        assert res.alpha_regret[t - 1] == pytest.approx(want, abs=1e-9)


def test_run_usm_game_errors():
    n = 3
    f = random_cut_oracle(n, seed=4)
    adversary = FixedFunctionAdversary(f)
    subs = [always_yes() for _ in range(n)]
    with pytest.raises(ConfigError):
        run_usm_game(subs, adversary, 0, streams_for(n))
    with pytest.raises(ConfigError):
        run_usm_game([always_yes()], adversary, 5, streams_for(1))
    big = SubmodularOracle(GroundSet(21), lambda m: 0.0)
    with pytest.raises(SizeError):
        run_usm_game(
            [always_yes() for _ in range(21)],
            FixedFunctionAdversary(big),
            2,
            streams_for(21),
            track_opt=True,
        )


def test_always_no_rewards_are_empty_set_values():
    n = 4
    f = random_cut_oracle(n, seed=13)
    res = run_usm_game(
        [always_no() for _ in range(n)],
        FixedFunctionAdversary(f),
        9,
        streams_for(n),
    )
    assert np.allclose(res.rewards, f.peek(0))


def test_fit_growth_exponent():
    ts = [10, 100, 1000, 10_000]
    vals = [3.7 * math.sqrt(t) for t in ts]
    assert fit_growth_exponent(ts, vals) == pytest.approx(0.5, abs=1e-12)
    lin = fit_growth_exponent(ts, [0.2 * t for t in ts])
    assert lin == pytest.approx(1.0, abs=1e-12)
    # nonpositive values drop out; fewer than two points left means no fit
    assert math.isnan(fit_growth_exponent([10, 100], [5.0, -1.0]))
    assert math.isnan(fit_growth_exponent([10, 100], [-1.0, -2.0]))
    assert math.isnan(fit_growth_exponent([10], [5.0]))
