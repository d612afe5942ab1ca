"""Online double-greedy framework and its regret metrics.

Each round runs n binary-action subroutines, one per element, in fixed
order 1..n.  A growing set X (starts empty) and a shrinking set Y
(starts full) close in on each other: yes adds element i to X, no
removes it from Y, and the chosen set is S = X_n = Y_n.  Once the
round's function arrives, each subroutine i is fed the marginal pair

    alpha_i = f(X_{i-1} + i) - f(X_{i-1}),
    beta_i  = f(Y_{i-1} - i) - f(Y_{i-1}),

the rewards for yes and no.  Submodularity makes alpha_i + beta_i >= 0,
so the pair is a valid balance-subproblem point.

Value queries are memoized within a round (the incremental sets repeat)
so a round costs at most 2n + 2 counted queries, comfortably inside the
4n + 2 budget.  All metrics (best fixed set in hindsight, regret
series, replay diagnostics) use the oracle's uncounted peek path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .balance import BalancePoint, BalanceSubroutine, Decision
from .errors import ConfigError, ContractError, SizeError
from .submodular import ENUMERATION_LIMIT, SubmodularOracle, full_mask, value_table


@dataclass
class RoundTranscript:
    """Everything one round did: decisions, marginals, set trajectories."""

    t: int
    chosen: int
    decisions: tuple[Decision, ...]
    marginals: tuple[tuple[float, float], ...]
    x_sets: tuple[int, ...]  # X_0..X_n as bitmasks
    y_sets: tuple[int, ...]  # Y_0..Y_n
    queries: int


def marginal_pair(
    f: SubmodularOracle, x_set: int, y_set: int, i: int
) -> tuple[float, float]:
    """Counted marginals of element i at the pair (X, Y).

    Preconditions: X subset of Y, the two agree below i, i not in X,
    i in Y.  For submodular f the result satisfies alpha + beta >= 0.
    """
    n = f.ground.n
    if not 1 <= i <= n:
        raise ContractError(f"element {i} outside 1..{n}")
    bit = 1 << (i - 1)
    below = bit - 1
    if x_set & ~y_set:
        raise ContractError("X must be a subset of Y")
    if (x_set ^ y_set) & below:
        raise ContractError(f"X and Y must agree on elements below {i}")
    if x_set & bit:
        raise ContractError(f"element {i} already in X")
    if not y_set & bit:
        raise ContractError(f"element {i} already removed from Y")
    alpha = f.evaluate(x_set | bit) - f.evaluate(x_set)
    beta = f.evaluate(y_set & ~bit) - f.evaluate(y_set)
    return alpha, beta


def run_round(
    subroutines: Sequence[BalanceSubroutine],
    f: SubmodularOracle,
    streams: Sequence[np.random.Generator],
    *,
    t: int = 1,
) -> RoundTranscript:
    """One framework round: decide all elements, then feed back marginals.

    Subroutine i draws exactly one coin from streams[i]; marginals are
    computed after the chosen set is fixed and reported in index order.
    """
    n = f.ground.n
    if len(subroutines) != n:
        raise ConfigError(f"need {n} subroutines, got {len(subroutines)}")
    if len(streams) != n:
        raise ConfigError(f"need {n} coin streams, got {len(streams)}")
    q0 = f.queries
    memo: dict[int, float] = {}
    evaluate = f.evaluate

    def ev(mask: int) -> float:
        v = memo.get(mask)
        if v is None:
            v = evaluate(mask)
            memo[mask] = v
        return v

    x = 0
    y = full_mask(n)
    xs = [0]
    ys = [y]
    decisions = []
    for i in range(n):
        d = subroutines[i].decide(streams[i].random())
        if d.chose_yes:
            x |= 1 << i
        else:
            y &= ~(1 << i)
        decisions.append(d)
        xs.append(x)
        ys.append(y)

    marginals = []
    for i in range(n):
        bit = 1 << i
        xprev = xs[i]
        yprev = ys[i]
        alpha = ev(xprev | bit) - ev(xprev)
        beta = ev(yprev & ~bit) - ev(yprev)
        subroutines[i].update(BalancePoint(alpha, beta))
        marginals.append((alpha, beta))
    ev(x)  # reward value, memoized with the rest

    return RoundTranscript(
        t=t,
        chosen=x,
        decisions=tuple(decisions),
        marginals=tuple(marginals),
        x_sets=tuple(xs),
        y_sets=tuple(ys),
        queries=f.queries - q0,
    )


@dataclass
class UsmRunResult:
    """Per-round reward/regret series and query accounting for one run."""

    alpha: float
    rewards: np.ndarray
    cum_rewards: np.ndarray
    cum_opt: np.ndarray | None
    alpha_regret: np.ndarray | None
    round_queries: np.ndarray
    total_queries: int
    max_round_queries: int
    final_opt: float | None
    growth_exponent: float
    chosen_sets: list[int] | None = None
    transcripts: list[RoundTranscript] | None = None
    oracles: list[SubmodularOracle] | None = None

    @property
    def final_alpha_regret(self) -> float:
        if self.final_opt is None:
            raise SizeError("best fixed set was not tracked for this run")
        return self.alpha * self.final_opt - float(self.cum_rewards[-1])


def default_checkpoints(rounds: int) -> list[int]:
    """Log-spaced regret checkpoints: T/16, T/8, T/4, T/2, T."""
    pts = {max(1, rounds // 16), max(1, rounds // 8), max(1, rounds // 4), max(1, rounds // 2), rounds}
    return sorted(pts)


def fit_growth_exponent(ts: Iterable[float], values: Iterable[float]) -> float:
    """Slope of log(value) vs log(t) over points with positive value."""
    pairs = [(t, v) for t, v in zip(ts, values) if t > 0 and v > 0]
    if len(pairs) < 2:
        return float("nan")
    lt = np.log([t for t, _ in pairs])
    lv = np.log([v for _, v in pairs])
    return float(np.polyfit(lt, lv, 1)[0])


def run_usm_game(
    subroutines: Sequence[BalanceSubroutine],
    adversary,
    rounds: int,
    streams: Sequence[np.random.Generator],
    *,
    alpha: float = 0.5,
    track_opt: bool = True,
    regret_series: bool = True,
    keep_transcripts: bool = False,
    keep_sets: bool = False,
    keep_oracles: bool = False,
) -> UsmRunResult:
    """Drive ``rounds`` rounds of the framework against a function adversary.

    ``adversary.next_oracle(last_set)`` supplies each round's function
    (oblivious kinds ignore the argument).  With ``track_opt`` the full
    value table of each distinct oracle is accumulated (n <= 20) so the
    best fixed set in hindsight, and hence the alpha-regret series, can
    be reported without spending counted queries.
    """
    if rounds < 1:
        raise ConfigError(f"rounds must be >= 1, got {rounds}")
    n = len(subroutines)
    if track_opt and n > ENUMERATION_LIMIT:
        raise SizeError(f"tracking the best fixed set needs n <= {ENUMERATION_LIMIT}")
    rewards = np.empty(rounds)
    round_queries = np.empty(rounds, dtype=np.int64)
    cum_opt = np.empty(rounds) if (track_opt and regret_series) else None
    cum_table: np.ndarray | None = None
    table_cache: dict[int, np.ndarray] = {}
    transcripts: list[RoundTranscript] | None = [] if keep_transcripts else None
    sets: list[int] | None = [] if keep_sets else None
    oracles: list[SubmodularOracle] | None = [] if keep_oracles else None

    last_set: int | None = None
    cum_reward = 0.0
    for t in range(rounds):
        f = adversary.next_oracle(last_set)
        if f.ground.n != n:
            raise ConfigError(f"oracle ground size {f.ground.n} != subroutine count {n}")
        tr = run_round(subroutines, f, streams, t=t + 1)
        reward = f.peek(tr.chosen)
        rewards[t] = reward
        cum_reward += reward
        round_queries[t] = tr.queries
        if track_opt:
            key = id(f)
            table = table_cache.get(key)
            if table is None:
                table = value_table(f)
                table_cache[key] = table
            if cum_table is None:
                cum_table = table.copy()
            else:
                cum_table += table
            if cum_opt is not None:
                cum_opt[t] = cum_table.max()
        if transcripts is not None:
            transcripts.append(tr)
        if sets is not None:
            sets.append(tr.chosen)
        if oracles is not None:
            oracles.append(f)
        last_set = tr.chosen

    cum_rewards = np.cumsum(rewards)
    regret = None
    if cum_opt is not None:
        regret = alpha * cum_opt - cum_rewards
    final_opt = float(cum_table.max()) if cum_table is not None else None
    exponent = float("nan")
    if regret is not None:
        cps = default_checkpoints(rounds)
        exponent = fit_growth_exponent(cps, [regret[c - 1] for c in cps])
    return UsmRunResult(
        alpha=alpha,
        rewards=rewards,
        cum_rewards=cum_rewards,
        cum_opt=cum_opt,
        alpha_regret=regret,
        round_queries=round_queries,
        total_queries=int(round_queries.sum()),
        max_round_queries=int(round_queries.max()),
        final_opt=final_opt,
        growth_exponent=exponent,
        chosen_sets=sets,
        transcripts=transcripts,
        oracles=oracles,
    )


def usm_alpha_regret(
    history: Iterable[tuple[SubmodularOracle, int]],
    a: float,
    opt: int | str = "compute",
) -> float:
    """a * (best fixed set's total value) - (algorithm's total value).

    ``opt="compute"`` brute-forces the best fixed subset of the summed
    function (n <= 20, ties to the smallest bitmask); or pass a bitmask
    to compare against a specific fixed set.
    """
    items = list(history)
    if not items:
        return 0.0
    algo_total = 0.0
    if opt == "compute":
        n = items[0][0].ground.n
        if n > ENUMERATION_LIMIT:
            raise SizeError(
                f"computing the best fixed set needs n <= {ENUMERATION_LIMIT}; supply opt explicitly"
            )
        total = np.zeros(1 << n)
        cache: dict[int, np.ndarray] = {}
        for f, chosen in items:
            table = cache.get(id(f))
            if table is None:
                table = value_table(f)
                cache[id(f)] = table
            total += table
            algo_total += float(table[chosen])
        best = float(total.max())
    else:
        best = 0.0
        for f, chosen in items:
            best += f.peek(int(opt))
            algo_total += f.peek(chosen)
    return a * best - algo_total


@dataclass(frozen=True)
class TrackingViolation:
    """First failed replay relation: which one, at which element."""

    index: int
    relation: str
    lhs: float
    rhs: float


def opt_tracking_check(
    transcript: RoundTranscript,
    f: SubmodularOracle,
    opt: int,
    *,
    tol: float = 1e-9,
) -> TrackingViolation | None:
    """Replay one round against a reference set morphing into the choice.

    OPT_0 = ``opt``; OPT_i copies decision i.  Checks, per element, the
    two value-update equalities for X and Y and the submodularity bound
    on how much the reference set's value may drop:

        yes: f(X_i) = f(X_{i-1}) + alpha_i,  f(Y_i) = f(Y_{i-1}),
             i not in OPT => f(OPT_i) >= f(OPT_{i-1}) - beta_i;
        no:  f(X_i) = f(X_{i-1}),  f(Y_i) = f(Y_{i-1}) + beta_i,
             i in OPT     => f(OPT_i) >= f(OPT_{i-1}) - alpha_i.

    Returns None when every relation holds within ``tol``.
    """
    n = len(transcript.decisions)
    opt_cur = opt
    f_opt_cur = f.peek(opt_cur)
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        d = transcript.decisions[i - 1]
        alpha, beta = transcript.marginals[i - 1]
        fx_prev = f.peek(transcript.x_sets[i - 1])
        fx_cur = f.peek(transcript.x_sets[i])
        fy_prev = f.peek(transcript.y_sets[i - 1])
        fy_cur = f.peek(transcript.y_sets[i])
        if d.chose_yes:
            if abs(fx_cur - (fx_prev + alpha)) > tol:
                return TrackingViolation(i, "x-gain", fx_cur, fx_prev + alpha)
            if abs(fy_cur - fy_prev) > tol:
                return TrackingViolation(i, "y-unchanged", fy_cur, fy_prev)
            opt_next = opt_cur | bit
            f_opt_next = f.peek(opt_next)
            if not opt & bit and f_opt_next < f_opt_cur - beta - tol:
                return TrackingViolation(i, "opt-drop-yes", f_opt_next, f_opt_cur - beta)
        else:
            if abs(fx_cur - fx_prev) > tol:
                return TrackingViolation(i, "x-unchanged", fx_cur, fx_prev)
            if abs(fy_cur - (fy_prev + beta)) > tol:
                return TrackingViolation(i, "y-gain", fy_cur, fy_prev + beta)
            opt_next = opt_cur & ~bit
            f_opt_next = f.peek(opt_next)
            if opt & bit and f_opt_next < f_opt_cur - alpha - tol:
                return TrackingViolation(i, "opt-drop-no", f_opt_next, f_opt_cur - alpha)
        opt_cur = opt_next
        f_opt_cur = f_opt_next
    if opt_cur != transcript.chosen:
        return TrackingViolation(n, "opt-final", float(opt_cur), float(transcript.chosen))
    return None


def value_identity_residual(
    transcripts: Sequence[RoundTranscript],
    oracles: Sequence[SubmodularOracle],
    i: int,
) -> float:
    """Residual of the per-element value-change identity, summed over rounds.

    For element i, the total growth of f(X_i) + f(Y_i) over the run must
    equal the yes-rounds' alpha_i plus the no-rounds' beta_i.  Returns
    lhs - rhs (zero up to float accumulation).
    """
    prev = i - 1
    lhs = 0.0
    rhs = 0.0
    for tr, f in zip(transcripts, oracles):
        lhs += (
            f.peek(tr.x_sets[i]) - f.peek(tr.x_sets[prev])
            + f.peek(tr.y_sets[i]) - f.peek(tr.y_sets[prev])
        )
        alpha, beta = tr.marginals[prev]
        rhs += alpha if tr.decisions[prev].chose_yes else beta
    return lhs - rhs


def opt_drop_margin(
    transcripts: Sequence[RoundTranscript],
    oracles: Sequence[SubmodularOracle],
    opt: int,
    i: int,
) -> float:
    """Slack in the bound on the reference set's total value drop at element i.

    max(sum of alpha_i over no-rounds, sum of beta_i over yes-rounds)
    minus the actual total drop of the morphing reference set across
    element i.  Nonnegative (up to tolerance) for submodular functions.
    """
    drop = 0.0
    sum_alpha_no = 0.0
    sum_beta_yes = 0.0
    bit = 1 << (i - 1)
    for tr, f in zip(transcripts, oracles):
        opt_prev = opt
        for j in range(1, i):
            bj = 1 << (j - 1)
            if tr.decisions[j - 1].chose_yes:
                opt_prev |= bj
            else:
                opt_prev &= ~bj
        opt_next = opt_prev | bit if tr.decisions[i - 1].chose_yes else opt_prev & ~bit
        drop += f.peek(opt_prev) - f.peek(opt_next)
        alpha, beta = tr.marginals[i - 1]
        if tr.decisions[i - 1].chose_yes:
            sum_beta_yes += beta
        else:
            sum_alpha_no += alpha
    return max(sum_alpha_no, sum_beta_yes) - drop
