"""Experiment configuration, seeded multi-trial execution, result emission.

Everything is deterministic given the master seed: trial k's coin
stream for subroutine i is derived from (seed, trial, i) through a
splittable seed sequence, and instance-generating randomness (the
adversary's functions) is derived from the master seed alone so every
trial faces the same input sequence.  Result rows are merged in
(trial, round) order regardless of worker scheduling, and files are
written atomically (temp file, then rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import adversaries as adv
from . import balance as bal
from .errors import ConfigError
from .framework import (
    default_checkpoints,
    fit_growth_exponent,
    opt_tracking_check,
    run_usm_game,
    value_identity_residual,
)
from .offline import (
    brute_force_opt,
    det_double_greedy,
    rand_double_greedy_stats,
    uniform_random_value,
)
from .submodular import (
    ENUMERATION_LIMIT,
    RandomCutFamily,
    normalize,
    random_digraph,
    read_digraph,
    tabulate,
    value_table,
    verify_submodularity,
)

RESULT_HEADER = ("trial", "t", "reward", "cum_reward", "cum_opt", "alpha_regret", "queries")

SUBROUTINE_NAMES = ("balancer", "mw", "uniform", "always-yes", "always-no")

_COIN_DOMAIN = 1
_INSTANCE_DOMAIN = 2


def coin_stream(master_seed: int, trial: int, index: int) -> np.random.Generator:
    """Independent per-(trial, subroutine) uniform stream."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, _COIN_DOMAIN, trial, index]))


def instance_rng(master_seed: int) -> np.random.Generator:
    """Instance-generating stream, shared by all trials."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, _INSTANCE_DOMAIN]))


@dataclass
class ExperimentConfig:
    game: str
    rounds: int = 1
    n: int | None = None
    subroutine: str = "balancer"
    adversary: str = ""
    alpha: float | None = None
    trials: int = 1
    seed: int = 0
    output: str | None = None
    format: str = "csv"
    workers: int = 1
    keep_transcripts: bool = False
    summary_only: bool = False
    graph: str | None = None
    density: float = 0.5
    samples: int | None = None

    def validated(self) -> "ExperimentConfig":
        if self.game not in ("usm", "balance", "offline", "verify"):
            raise ConfigError(f"unknown game {self.game!r}")
        if self.game in ("usm", "balance"):
            if self.rounds < 1:
                raise ConfigError(f"--rounds must be >= 1, got {self.rounds}")
            if self.trials < 1:
                raise ConfigError(f"--trials must be >= 1, got {self.trials}")
            if self.workers < 1:
                raise ConfigError(f"--workers must be >= 1, got {self.workers}")
            if self.alpha is None:
                self.alpha = 0.5 if self.game == "usm" else 1.0
            if not 0.0 < self.alpha <= 1.0:
                raise ConfigError(f"--alpha must lie in (0, 1], got {self.alpha}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"--format must be csv or json, got {self.format!r}")
        if self.keep_transcripts and self.format == "csv" and self.output:
            raise ConfigError("--keep-transcripts diagnostics need --format json")
        if self.seed < 0:
            raise ConfigError(f"--seed must be >= 0, got {self.seed}")
        if self.game == "usm":
            if self.n is None or self.n < 1:
                raise ConfigError(f"--n must be >= 1, got {self.n}")
            if self.n > ENUMERATION_LIMIT:
                raise ConfigError(
                    f"--n {self.n} > {ENUMERATION_LIMIT}: the best fixed set (and so the regret column) "
                    "is only computed by enumeration"
                )
            if not self.adversary:
                self.adversary = "cycle-random:k=4"
        if self.game == "balance" and not self.adversary:
            self.adversary = "pattern:URL"
        if self.game == "offline":
            if self.graph is None and (self.n is None or self.n < 1):
                raise ConfigError("offline needs --graph FILE or --n for a random instance")
            if self.trials < 1:
                raise ConfigError(f"--trials must be >= 1, got {self.trials}")
        if self.game == "verify" and self.graph is None:
            raise ConfigError("verify needs a graph file")
        return self


def _parse_params(text: str, spec: dict[str, type], what: str) -> dict:
    """Parse 'k=v,k=v' descriptor parameters with typed coercion."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise ConfigError(f"bad {what} parameter {item!r}; expected key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in spec:
            raise ConfigError(f"unknown {what} parameter {key!r}; expected one of {sorted(spec)}")
        try:
            out[key] = spec[key](value)
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {what} parameter {key!r}")
    return out


def build_subroutine(name: str, horizon: int):
    if name == "balancer":
        return bal.Balancer(horizon)
    if name == "mw":
        return bal.TwoExperts(horizon)
    if name == "uniform":
        return bal.uniform_coin()
    if name == "always-yes":
        return bal.always_yes()
    if name == "always-no":
        return bal.always_no()
    raise ConfigError(f"unknown subroutine {name!r}; expected one of {SUBROUTINE_NAMES}")


def build_balance_adversary(descriptor: str):
    kind, _, rest = descriptor.partition(":")
    if kind == "pattern":
        return adv.ObliviousBalanceAdversary.from_pattern(rest)
    if kind == "adaptive":
        return adv.AdaptiveBalanceAdversary(rest)
    raise ConfigError(
        f"unknown balance adversary {descriptor!r}; expected pattern:<URL string> or adaptive:<rule>"
    )


def build_usm_adversary(descriptor: str, n: int, master_seed: int):
    """Instantiate a function adversary from its descriptor string.

    Oblivious kinds draw their instances from the master seed only, so
    all trials of an experiment face the same sequence.
    """
    kind, _, rest = descriptor.partition(":")
    rng = instance_rng(master_seed)
    tab = n <= ENUMERATION_LIMIT

    def cut_oracle(graph):
        oracle = normalize(graph)
        return tabulate(oracle) if tab else oracle

    if kind == "cycle-random":
        params = _parse_params(rest, {"k": int, "density": float, "wlo": float, "whi": float}, "cycle-random")
        k = params.get("k", 4)
        if k < 1:
            raise ConfigError(f"cycle-random needs k >= 1, got {k}")
        wr = (params.get("wlo", 0.0), params.get("whi", 1.0))
        graphs = [random_digraph(n, params.get("density", 0.5), wr, rng) for _ in range(k)]
        return adv.CycleFunctionAdversary([cut_oracle(g) for g in graphs])
    if kind == "fixed-random":
        params = _parse_params(rest, {"density": float, "wlo": float, "whi": float}, "fixed-random")
        wr = (params.get("wlo", 0.0), params.get("whi", 1.0))
        g = random_digraph(n, params.get("density", 0.5), wr, rng)
        return adv.FixedFunctionAdversary(cut_oracle(g))
    if kind == "fresh-random":
        params = _parse_params(rest, {"density": float, "wlo": float, "whi": float}, "fresh-random")
        wr = (params.get("wlo", 0.0), params.get("whi", 1.0))
        family = RandomCutFamily(n, params.get("density", 0.5), wr)
        return adv.RandomObliviousAdversary(family, seed=master_seed)
    if kind in ("cycle-files", "fixed-file"):
        paths = [p for p in rest.split(";") if p]
        if not paths or (kind == "fixed-file" and len(paths) != 1):
            raise ConfigError(f"{kind} needs graph file path(s), got {rest!r}")
        oracles = []
        for p in paths:
            g = read_digraph(p)
            if g.n != n:
                raise ConfigError(f"graph {p} has n={g.n}, experiment has n={n}")
            oracles.append(cut_oracle(g))
        if kind == "fixed-file":
            return adv.FixedFunctionAdversary(oracles[0])
        return adv.CycleFunctionAdversary(oracles)
    if kind == "adaptive":
        return adv.AdaptiveCutAdversary(n, rest)
    raise ConfigError(
        f"unknown function adversary {descriptor!r}; expected cycle-random, fixed-random, "
        "fresh-random, cycle-files, fixed-file, or adaptive"
    )


# --- balance game -------------------------------------------------------

@dataclass
class BalanceRunResult:
    ledger: bal.Ledger
    alpha: float
    regret: float
    reward_series: np.ndarray | None = None
    pile_series: np.ndarray | None = None
    decisions: list[bal.Decision] | None = None
    points: list[bal.BalancePoint] | None = None


def run_balance_game(
    subroutine,
    adversary,
    rounds: int,
    rng: np.random.Generator,
    *,
    alpha: float = 1.0,
    record: bool = False,
) -> BalanceRunResult:
    """Play ``rounds`` rounds: decide, reveal, update, settle the ledger.

    Adaptive adversaries see only strictly past decisions; the round's
    point is fixed before the round's coin is drawn.
    """
    r_alg = 0.0
    c_yes = 0.0
    c_no = 0.0
    rewards = np.empty(rounds) if record else None
    piles = np.empty(rounds) if record else None
    decisions = [] if record else None
    points = [] if record else None
    prev: bal.Decision | None = None
    next_point = adversary.next_point
    decide = subroutine.decide
    update = subroutine.update
    random = rng.random
    for t in range(rounds):
        pt = next_point(prev)
        d = decide(random())
        update(pt)
        if d.chose_yes:
            r_alg += 0.5 * pt.alpha
            c_no += pt.beta
        else:
            r_alg += 0.5 * pt.beta
            c_yes += pt.alpha
        if record:
            rewards[t] = r_alg
            piles[t] = c_yes if c_yes >= c_no else c_no
            decisions.append(d)
            points.append(pt)
        prev = d
    ledger = bal.Ledger(r_alg, c_yes, c_no)
    return BalanceRunResult(
        ledger=ledger,
        alpha=alpha,
        regret=bal.balance_alpha_regret(ledger, alpha),
        reward_series=rewards,
        pile_series=piles,
        decisions=decisions,
        points=points,
    )


# --- experiment drivers ---------------------------------------------------

def _usm_trial(config: ExperimentConfig, trial: int):
    adversary = build_usm_adversary(config.adversary, config.n, config.seed)
    subs = [build_subroutine(config.subroutine, config.rounds) for _ in range(config.n)]
    streams = [coin_stream(config.seed, trial, i) for i in range(config.n)]
    return run_usm_game(
        subs,
        adversary,
        config.rounds,
        streams,
        alpha=config.alpha,
        track_opt=True,
        regret_series=True,
        keep_transcripts=config.keep_transcripts,
        keep_oracles=config.keep_transcripts,
    )


def _balance_trial(config: ExperimentConfig, trial: int) -> BalanceRunResult:
    adversary = build_balance_adversary(config.adversary)
    sub = build_subroutine(config.subroutine, config.rounds)
    rng = coin_stream(config.seed, trial, 0)
    return run_balance_game(sub, adversary, config.rounds, rng, alpha=config.alpha, record=True)


def _summary_stats(finals: list[float]) -> tuple[float, float]:
    arr = np.asarray(finals)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std


def run_experiment(config: ExperimentConfig):
    """Run the configured experiment; returns (rows, summary).

    Rows follow RESULT_HEADER in (trial, t) order.  Deterministic given
    the config: reruns produce identical rows and summary.
    """
    config = config.validated()
    if config.game == "usm":
        return _run_usm_experiment(config)
    if config.game == "balance":
        return _run_balance_experiment(config)
    if config.game == "offline":
        return [], _run_offline(config)
    if config.game == "verify":
        return [], _run_verify(config)
    raise ConfigError(f"unknown game {config.game!r}")


def _map_trials(fn, config: ExperimentConfig):
    indices = range(config.trials)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(fn, [config] * config.trials, indices))
    return [fn(config, k) for k in indices]


def _run_usm_experiment(config: ExperimentConfig):
    results = _map_trials(_usm_trial, config)
    rows = []
    for k, res in enumerate(results):
        queries = np.cumsum(res.round_queries)
        for t in range(config.rounds):
            rows.append(
                (
                    k,
                    t + 1,
                    float(res.rewards[t]),
                    float(res.cum_rewards[t]),
                    float(res.cum_opt[t]),
                    float(res.alpha_regret[t]),
                    int(queries[t]),
                )
            )
    finals = [res.final_alpha_regret for res in results]
    mean_final, std_final = _summary_stats(finals)
    cps = default_checkpoints(config.rounds)
    mean_regret_at = [float(np.mean([res.alpha_regret[c - 1] for res in results])) for c in cps]
    summary = {
        "game": "usm",
        "n": config.n,
        "rounds": config.rounds,
        "trials": config.trials,
        "alpha": config.alpha,
        "subroutine": config.subroutine,
        "adversary": config.adversary,
        "seed": config.seed,
        "final_alpha_regret": finals,
        "mean_final_alpha_regret": mean_final,
        "std_final_alpha_regret": std_final,
        "mean_final_regret_per_n_sqrt_t": mean_final / (config.n * config.rounds ** 0.5),
        "checkpoints": cps,
        "mean_regret_at_checkpoints": mean_regret_at,
        "growth_exponent": fit_growth_exponent(cps, mean_regret_at),
        "total_queries": int(sum(res.total_queries for res in results)),
        "max_round_queries": int(max(res.max_round_queries for res in results)),
        "query_budget_per_round": 4 * config.n + 2,
    }
    if config.keep_transcripts:
        summary["diagnostics"] = _usm_diagnostics(results)
    return rows, summary


def _result_tables(res) -> list[np.ndarray]:
    cache: dict[int, np.ndarray] = {}
    out = []
    for f in res.oracles:
        t = cache.get(id(f))
        if t is None:
            t = value_table(f)
            cache[id(f)] = t
        out.append(t)
    return out


def _usm_diagnostics(results) -> dict:
    """Replay checks over retained transcripts (see framework module)."""
    worst_residual = 0.0
    failures = 0
    for res in results:
        opt = int(np.argmax(sum(_result_tables(res))))
        for tr, f in zip(res.transcripts, res.oracles):
            if opt_tracking_check(tr, f, opt) is not None:
                failures += 1
        n = len(res.transcripts[0].decisions)
        for i in range(1, n + 1):
            worst_residual = max(
                worst_residual, abs(value_identity_residual(res.transcripts, res.oracles, i))
            )
    return {"opt_tracking_failures": failures, "max_value_identity_residual": worst_residual}


def _run_balance_experiment(config: ExperimentConfig):
    results = _map_trials(_balance_trial, config)
    rows = []
    for k, res in enumerate(results):
        prev = 0.0
        for t in range(config.rounds):
            cum_r = float(res.reward_series[t])
            pile = float(res.pile_series[t])
            rows.append(
                (k, t + 1, cum_r - prev, cum_r, pile, config.alpha * pile - cum_r, 0)
            )
            prev = cum_r
    finals = [res.regret for res in results]
    mean_final, std_final = _summary_stats(finals)
    cps = default_checkpoints(config.rounds)
    mean_regret_at = [
        float(
            np.mean(
                [config.alpha * res.pile_series[c - 1] - res.reward_series[c - 1] for res in results]
            )
        )
        for c in cps
    ]
    summary = {
        "game": "balance",
        "rounds": config.rounds,
        "trials": config.trials,
        "alpha": config.alpha,
        "subroutine": config.subroutine,
        "adversary": config.adversary,
        "seed": config.seed,
        "final_alpha_regret": finals,
        "mean_final_alpha_regret": mean_final,
        "std_final_alpha_regret": std_final,
        "mean_final_regret_per_sqrt_t": mean_final / config.rounds ** 0.5,
        "checkpoints": cps,
        "mean_regret_at_checkpoints": mean_regret_at,
        "growth_exponent": fit_growth_exponent(cps, mean_regret_at),
        "total_queries": 0,
    }
    return rows, summary


def _offline_instance(config: ExperimentConfig):
    if config.graph is not None:
        g = read_digraph(config.graph)
    else:
        g = random_digraph(config.n, config.density, (0.0, 1.0), instance_rng(config.seed))
    if g.n > ENUMERATION_LIMIT:
        raise ConfigError(f"offline ladder needs n <= {ENUMERATION_LIMIT} (exhaustive optimum), got {g.n}")
    return g


def _run_offline(config: ExperimentConfig) -> dict:
    g = _offline_instance(config)
    oracle = tabulate(normalize(g))
    opt = brute_force_opt(oracle)
    det = det_double_greedy(oracle)
    rnd = rand_double_greedy_stats(oracle, config.trials, config.seed)
    uni = uniform_random_value(oracle)
    scale = opt.value if opt.value > 0 else 1.0
    return {
        "game": "offline",
        "n": g.n,
        "edges": len(g.edges),
        "seed": config.seed,
        "rdg_trials": config.trials,
        "opt": {"set": opt.chosen, "value": opt.value},
        "det_double_greedy": {"set": det.chosen, "value": det.value, "ratio": det.value / scale},
        "rand_double_greedy": {
            "best_set": rnd.chosen,
            "best_value": rnd.value,
            "mean": rnd.mean,
            "std": rnd.std,
            "mean_ratio": rnd.mean / scale,
        },
        "uniform_random_value": uni,
        "uniform_ratio": uni / scale,
    }


def _run_verify(config: ExperimentConfig) -> dict:
    g = read_digraph(config.graph)
    oracle = normalize(g)
    witness = verify_submodularity(oracle, samples=config.samples, seed=config.seed)
    summary = {
        "game": "verify",
        "n": g.n,
        "edges": len(g.edges),
        "mode": "sampled" if config.samples is not None else "exhaustive",
        "passed": witness is None,
        "witness": None,
        "queries": oracle.queries,
    }
    if witness is not None:
        s, t, i = witness
        summary["witness"] = {"s": s, "t": t, "i": i}
    return summary


# --- output -----------------------------------------------------------

def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return format(v, ".12g")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-results-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(
    rows: Sequence[tuple],
    summary: dict,
    fmt: str,
    path: str,
    *,
    config: ExperimentConfig | None = None,
    summary_only: bool = False,
) -> None:
    """Emit rows + summary as csv (12 significant digits, LF endings)
    or as a single json object; the write is atomic either way."""
    if fmt == "csv":
        lines = [",".join(RESULT_HEADER)]
        if not summary_only:
            for row in rows:
                lines.append(",".join(_fmt_cell(v) for v in row))
        _atomic_write(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        obj: dict = {}
        if config is not None:
            obj["config"] = asdict(config)
        obj["summary"] = summary
        if not summary_only:
            obj["rows"] = [list(row) for row in rows]
        _atomic_write(path, json.dumps(obj, indent=1) + "\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
