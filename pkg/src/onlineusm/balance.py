"""The balance subproblem and its binary-action subroutines.

In each round a subroutine commits to yes or no, then an adversary
reveals a point (alpha, beta) from the triangle with vertices
up (+1, +1), right (+1, -1), left (-1, +1); equivalently |alpha| <= 1,
|beta| <= 1, alpha + beta >= 0.  Choosing yes pays the algorithm
alpha / 2 and adds beta to the adversary's "no" pile; choosing no pays
beta / 2 and adds alpha to the "yes" pile.  The 1-regret target is
max(C_yes, C_no) - R_alg.

Two subroutines are provided: :class:`Balancer`, which paces a scalar
x in [0, sqrt(T)] and says yes with probability x / sqrt(T), and
:class:`TwoExperts`, a two-action multiplicative-weights learner.  The
quadratic potentials attached to the Balancer's state make its per-step
progress checkable in closed form (:func:`step_invariant_deltas`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

from .errors import DomainError, InvalidPointError


@dataclass(frozen=True)
class BalancePoint:
    """Adversary move (alpha, beta); valid points satisfy
    -1 <= alpha, beta <= 1 and alpha + beta >= 0 (up to float drift).

    Construction does not validate so that callers can represent and
    test out-of-triangle data; consuming operations enforce membership.
    """

    alpha: float
    beta: float

    def in_triangle(self, tol: float = 1e-9) -> bool:
        a, b = self.alpha, self.beta
        return (
            a >= -1.0 - tol
            and a <= 1.0 + tol
            and b >= -1.0 - tol
            and b <= 1.0 + tol
            and a + b >= -2.0 * tol
        )

    def validate(self, tol: float = 1e-9) -> "BalancePoint":
        if not self.in_triangle(tol):
            raise InvalidPointError(f"({self.alpha}, {self.beta}) outside triangle by more than {tol}")
        return self


UP = BalancePoint(1.0, 1.0)
RIGHT = BalancePoint(1.0, -1.0)
LEFT = BalancePoint(-1.0, 1.0)


@dataclass(frozen=True)
class ConvexWeights:
    """Convex combination of the three extremal moves."""

    c_up: float
    c_right: float
    c_left: float

    def reconstruct(self) -> tuple[float, float]:
        a = self.c_up + self.c_right - self.c_left
        b = self.c_up - self.c_right + self.c_left
        return a, b


def decompose(pt: BalancePoint, *, tol: float = 1e-6) -> ConvexWeights:
    """Unique affine weights of ``pt`` over up/right/left.

    c_up = (alpha+beta)/2, c_right = (1-beta)/2, c_left = (1-alpha)/2.
    Float drift can push a weight slightly negative; those are clamped
    to zero and the triple renormalized.  Points outside the triangle by
    more than ``tol`` are rejected.
    """
    if not pt.in_triangle(tol):
        raise InvalidPointError(f"({pt.alpha}, {pt.beta}) outside triangle by more than {tol}")
    c_up = 0.5 * (pt.alpha + pt.beta)
    c_right = 0.5 * (1.0 - pt.beta)
    c_left = 0.5 * (1.0 - pt.alpha)
    if c_up < 0.0 or c_right < 0.0 or c_left < 0.0:
        c_up = max(c_up, 0.0)
        c_right = max(c_right, 0.0)
        c_left = max(c_left, 0.0)
        total = c_up + c_right + c_left
        c_up, c_right, c_left = c_up / total, c_right / total, c_left / total
    return ConvexWeights(c_up, c_right, c_left)


@dataclass(frozen=True)
class Decision:
    chose_yes: bool
    p_used: float


class BalanceSubroutine(Protocol):
    """Protocol for binary-action subroutines.

    ``decide`` must depend only on internal state and the coin (one
    uniform [0,1) draw per round, always consumed); the revealed point
    arrives later through ``update``.
    """

    def decide(self, coin: float) -> Decision: ...

    def update(self, pt: BalancePoint) -> None: ...


class Balancer:
    """Pacing subroutine: keep x in [0, sqrt(T)], say yes w.p. x/sqrt(T).

    The state update x += (1 - 2p) * c_up + c_right - c_left (then cap
    into [0, sqrt(T)]) is deterministic given the revealed point; the
    coin only realizes the decision.  Update-then-cap order matters for
    the potential analysis and is preserved exactly.
    """

    def __init__(self, horizon: int, x: float | None = None):
        if horizon < 1:
            raise DomainError(f"horizon must be >= 1, got {horizon}")
        self.horizon = horizon
        self.sqrt_horizon = math.sqrt(horizon)
        self.x = 0.5 * self.sqrt_horizon if x is None else float(x)
        if not 0.0 <= self.x <= self.sqrt_horizon:
            raise DomainError(f"x={self.x} outside [0, sqrt(T)={self.sqrt_horizon}]")

    @property
    def probability(self) -> float:
        return self.x / self.sqrt_horizon

    def decide(self, coin: float) -> Decision:
        p = self.x / self.sqrt_horizon
        return Decision(coin < p, p)

    def update(self, pt: BalancePoint) -> None:
        a, b = pt.alpha, pt.beta
        if not (-1.000001 <= a <= 1.000001 and -1.000001 <= b <= 1.000001 and a + b >= -2e-6):
            raise InvalidPointError(f"({a}, {b}) outside triangle; is the function submodular?")
        c_up = 0.5 * (a + b)
        c_right = 0.5 * (1.0 - b)
        c_left = 0.5 * (1.0 - a)
        p = self.x / self.sqrt_horizon
        x = self.x + (1.0 - 2.0 * p) * c_up + c_right - c_left
        if x < 0.0:
            x = 0.0
        elif x > self.sqrt_horizon:
            x = self.sqrt_horizon
        self.x = x

    def step(self, pt: BalancePoint, coin: float) -> Decision:
        d = self.decide(coin)
        self.update(pt)
        return d


def balancer_step(state: Balancer, pt: BalancePoint, coin: float) -> Decision:
    """One round: decide from current state, then fold in the point."""
    return state.step(pt, coin)


def default_learning_rate(horizon: int) -> float:
    """Hedge tuning for two actions over a known horizon."""
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    return math.sqrt(8.0 * math.log(2.0) / horizon)


class TwoExperts:
    """Multiplicative weights over the two actions yes / no.

    Rewards are shifted from [-1, 1] to [0, 1] before exponentiation;
    weights are renormalized by their max each update so long runs stay
    in range without changing the yes-probability.
    """

    def __init__(self, horizon: int | None = None, *, eta: float | None = None):
        if eta is None:
            if horizon is None:
                raise DomainError("TwoExperts needs a horizon or an explicit eta")
            eta = default_learning_rate(horizon)
        if eta <= 0:
            raise DomainError(f"eta must be > 0, got {eta}")
        self.eta = eta
        self.w_yes = 1.0
        self.w_no = 1.0

    @property
    def probability(self) -> float:
        return self.w_yes / (self.w_yes + self.w_no)

    def decide(self, coin: float) -> Decision:
        p = self.w_yes / (self.w_yes + self.w_no)
        return Decision(coin < p, p)

    def update(self, pt: BalancePoint) -> None:
        wy = self.w_yes * math.exp(self.eta * 0.5 * (pt.alpha + 1.0))
        wn = self.w_no * math.exp(self.eta * 0.5 * (pt.beta + 1.0))
        top = wy if wy >= wn else wn
        self.w_yes = wy / top
        self.w_no = wn / top

    def step(self, pt: BalancePoint, coin: float) -> Decision:
        d = self.decide(coin)
        self.update(pt)
        return d


def mw_step(state: TwoExperts, pt: BalancePoint, coin: float) -> Decision:
    return state.step(pt, coin)


class ConstantPolicy:
    """Fixed yes-probability; ignores feedback.  Baseline subroutine."""

    def __init__(self, p: float):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability must be in [0, 1], got {p}")
        self.p = p

    def decide(self, coin: float) -> Decision:
        return Decision(coin < self.p, self.p)

    def update(self, pt: BalancePoint) -> None:
        pass


def always_yes() -> ConstantPolicy:
    return ConstantPolicy(1.0)


def always_no() -> ConstantPolicy:
    return ConstantPolicy(0.0)


def uniform_coin() -> ConstantPolicy:
    return ConstantPolicy(0.5)


class DoublingHorizon:
    """Unknown-horizon wrapper: guess T, double and restart when exceeded.

    Round r runs a fresh inner subroutine built for the smallest power
    of two >= r, so decisions within an epoch match the fixed-horizon
    subroutine exactly.
    """

    def __init__(self, factory: Callable[[int], BalanceSubroutine]):
        self.factory = factory
        self.guess = 1
        self.rounds = 0
        self.restarts = 0
        self.inner = factory(1)

    def decide(self, coin: float) -> Decision:
        self.rounds += 1
        while self.rounds > self.guess:
            self.guess *= 2
            self.inner = self.factory(self.guess)
            self.restarts += 1
        return self.inner.decide(coin)

    def update(self, pt: BalancePoint) -> None:
        self.inner.update(pt)


def horizon_doubling_wrapper(factory: Callable[[int], BalanceSubroutine]) -> DoublingHorizon:
    return DoublingHorizon(factory)


# --- ledger ------------------------------------------------------------

@dataclass(frozen=True)
class Ledger:
    """Accumulated reward and the adversary's two missed-opportunity piles."""

    r_alg: float = 0.0
    c_yes: float = 0.0
    c_no: float = 0.0


def ledger_update(ledger: Ledger, d: Decision, pt: BalancePoint) -> Ledger:
    """yes: r += alpha/2, c_no += beta.  no: r += beta/2, c_yes += alpha."""
    if d.chose_yes:
        return Ledger(ledger.r_alg + 0.5 * pt.alpha, ledger.c_yes, ledger.c_no + pt.beta)
    return Ledger(ledger.r_alg + 0.5 * pt.beta, ledger.c_yes + pt.alpha, ledger.c_no)


def balance_alpha_regret(ledger: Ledger, a: float) -> float:
    """a * max(C_yes, C_no) - R_alg; a is meant to lie in (0, 1]."""
    return a * max(ledger.c_yes, ledger.c_no) - ledger.r_alg


# --- potentials --------------------------------------------------------

def _phi_alg(x: float, s: float) -> float:
    return s / 8.0 - (2.0 * x - s) ** 2 / (8.0 * s)


def _phi_yes(x: float, s: float) -> float:
    return 0.5 * (s - x) ** 2 / s


def _phi_no(x: float, s: float) -> float:
    return 0.5 * x * x / s


def potentials(x: float, horizon: int) -> tuple[float, float, float]:
    """The three bookkeeping potentials at state x, each in [0, sqrt(T)/2].

    phi_alg peaks at x = sqrt(T)/2 and is added to the reward; phi_yes
    vanishes at x = sqrt(T) and is added to C_yes; phi_no vanishes at
    x = 0 and is added to C_no.
    """
    s = math.sqrt(horizon)
    if not 0.0 <= x <= s:
        raise DomainError(f"x={x} outside [0, sqrt(T)={s}]")
    return _phi_alg(x, s), _phi_yes(x, s), _phi_no(x, s)


def expected_ledger_deltas(p: float, pt: BalancePoint) -> tuple[float, float, float]:
    """Expected one-round (dR_alg, dC_yes, dC_no) when yes has probability p."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p={p} outside [0, 1]")
    d_r = p * 0.5 * pt.alpha + (1.0 - p) * 0.5 * pt.beta
    d_cyes = (1.0 - p) * pt.alpha
    d_cno = p * pt.beta
    return d_r, d_cyes, d_cno


def step_invariant_deltas(p: float, pt: BalancePoint, horizon: int) -> tuple[float, float, float]:
    """Exact expected one-step changes of the three potential-augmented sums.

    Evaluates the closed-form potentials at x = p*sqrt(T) and at the
    uncapped updated state x + (1-2p)c_up + c_right - c_left (the
    quadratics extend smoothly past the interval ends; capping only ever
    helps and is covered by its own monotonicity check).  The pacing
    guarantee is d_alg >= max(d_yes, d_no) - 2/sqrt(T).
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p={p} outside [0, 1]")
    w = decompose(pt)
    s = math.sqrt(horizon)
    x = p * s
    delta = (1.0 - 2.0 * p) * w.c_up + w.c_right - w.c_left
    x2 = x + delta
    d_r, d_cyes, d_cno = expected_ledger_deltas(p, pt)
    d_alg = d_r + _phi_alg(x2, s) - _phi_alg(x, s)
    d_yes = d_cyes + _phi_yes(x2, s) - _phi_yes(x, s)
    d_no = d_cno + _phi_no(x2, s) - _phi_no(x, s)
    return d_alg, d_yes, d_no
