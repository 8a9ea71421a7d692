"""Radix game and generalized radix game generators, closeness and scaling checks.

Players are 0-based: main players ``P_1..P_n`` are rows ``0..n-1``, ``Q`` is row
``n`` and ``R`` is row ``n + 1``.  Main player ``P_i`` (row ``i - 1``) is the one
whose equilibrium mass on ``s`` is ``delta ** i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .core import AnonymousGame, GameError, MixedProfile, as_fraction

UNINTERESTED = Fraction(-1)


@dataclass(frozen=True)
class StrategyRoster:
    names: Tuple[str, ...]

    @property
    def alpha(self) -> int:
        return len(self.names)

    def __getattr__(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AttributeError(name) from None

    def as_dict(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}


RADIX_ROSTER = StrategyRoster(("s", "t", "q1", "q2", "r1", "r2"))
GENERALIZED_ROSTER = StrategyRoster(("s1", "s2", "t", "q1", "q2", "r1", "r2"))


@dataclass(frozen=True)
class RadixParams:
    n: int
    N: int

    def __post_init__(self):
        if self.n < 1 or self.N < 2:
            raise GameError(f"need n >= 1 and N >= 2, got n={self.n}, N={self.N}")

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.N)

    @property
    def kappa(self) -> Fraction:
        return self.delta ** (self.n * (self.n + 1) // 2)

    def digit(self, i: int) -> Fraction:
        """``delta ** i`` for the 1-based main player ``i``."""
        return self.delta ** i


def _radix_payoff(params: RadixParams, player: int, b: str, k: Dict[str, int]) -> Fraction:
    n = params.n
    kappa = params.kappa
    if player < n:
        if b == "s":
            return params.digit(player + 1) + kappa if k["s"] == n - 1 else kappa
        if b == "t":
            return Fraction(2) if k["r1"] == 1 else Fraction(0)
        return UNINTERESTED
    if player == n:  # Q
        if b == "q1":
            return Fraction(int(k["s"] == n))
        if b == "q2":
            return Fraction(int(k["r1"] == 1))
        return UNINTERESTED
    if b == "r1":  # R
        return Fraction(int(k["q1"] == 1))
    if b == "r2":
        return Fraction(int(k["q2"] == 1))
    return UNINTERESTED


def build_radix(n: int, N: int) -> AnonymousGame:
    params = RadixParams(n, N)
    names = RADIX_ROSTER.names

    def fn(p, b, hist):
        return _radix_payoff(params, p, names[b], dict(zip(names, hist)))

    return AnonymousGame.from_function(n + 2, 6, fn, (Fraction(-1), Fraction(2)))


def merge_histogram(hist7) -> Tuple[int, ...]:
    """Map a 7-strategy histogram to the radix histogram by merging the ``s1``/``s2`` counts."""
    return (hist7[0] + hist7[1],) + tuple(hist7[2:])


def _phi(b7: int) -> int:
    return 0 if b7 <= 1 else b7 - 1


def build_generalized_radix(n: int, N: int) -> AnonymousGame:
    base = build_radix(n, N)
    return AnonymousGame.from_function(
        n + 2, 7, lambda p, b, k: base.payoff(p, _phi(b), merge_histogram(k)), base.payoff_bounds
    )


def canonical_radix_ne(n: int, N: int, generalized: bool = False) -> MixedProfile:
    """The unique equilibrium ``x_i = delta^i``, ``y = 1/2``, ``z = kappa``.

    For the 7-strategy game all of each main player's ``s`` mass sits on ``s1``.
    """
    params = RadixParams(n, N)
    roster = GENERALIZED_ROSTER if generalized else RADIX_ROSTER
    alpha = roster.alpha
    rows = []
    for i in range(1, n + 1):
        row = [Fraction(0)] * alpha
        row[0] = params.digit(i)
        row[roster.t] = 1 - params.digit(i)
        rows.append(row)
    half = Fraction(1, 2)
    q = [Fraction(0)] * alpha
    q[roster.q1] = q[roster.q2] = half
    r = [Fraction(0)] * alpha
    r[roster.r1] = params.kappa
    r[roster.r2] = 1 - params.kappa
    return MixedProfile(tuple(map(tuple, rows + [q, r])))


def radix_profile(n: int, xs, y, z, generalized: bool = False, split=None) -> MixedProfile:
    """Profile with main-player s-mass ``xs``, Q on q1 with ``y``, R on r1 with ``z``.

    ``split[i]`` (generalized game only) is the share of ``xs[i]`` placed on ``s1``.
    """
    roster = GENERALIZED_ROSTER if generalized else RADIX_ROSTER
    alpha = roster.alpha
    rows = []
    for i, x in enumerate(xs):
        x = as_fraction(x)
        row = [Fraction(0)] * alpha
        if generalized:
            w = Fraction(1) if split is None else as_fraction(split[i])
            row[0], row[1] = x * w, x * (1 - w)
        else:
            row[0] = x
        row[roster.t] = 1 - x
        rows.append(row)
    y, z = as_fraction(y), as_fraction(z)
    q = [Fraction(0)] * alpha
    q[roster.q1], q[roster.q2] = y, 1 - y
    r = [Fraction(0)] * alpha
    r[roster.r1], r[roster.r2] = z, 1 - z
    return MixedProfile(tuple(map(tuple, rows + [q, r])))


def infer_radix_params(game: AnonymousGame) -> RadixParams:
    """Recover ``(n, N)`` from a radix, generalized radix or reduction game.

    Uses ``P_1``'s ``s`` payoff when every other main player is on ``t``: that
    entry is ``kappa`` (``2 * delta`` when n = 1) and is never perturbed by the
    reduction.
    """
    if game.alpha not in (6, 7) or game.n < 3:
        raise GameError("game does not have the radix shape (n + 2 players, 6 or 7 strategies)")
    n = game.n - 2
    roster = GENERALIZED_ROSTER if game.alpha == 7 else RADIX_ROSTER
    hist = [0] * game.alpha
    hist[roster.t] = n - 1
    hist[roster.q1] = 1
    hist[roster.r1] = 1
    value = game.payoff(0, 0, tuple(hist))
    if n == 1:
        if value <= 0:
            raise GameError("cannot infer N from payoffs")
        delta = value / 2
        if delta.numerator != 1:
            raise GameError("cannot infer N from payoffs")
        return RadixParams(n, delta.denominator)
    expo = n * (n + 1) // 2
    if value.numerator != 1:
        raise GameError("cannot infer N from payoffs")
    den = value.denominator
    N = round(den ** (1.0 / expo))
    for cand in (N - 1, N, N + 1):
        if cand >= 2 and cand ** expo == den:
            return RadixParams(n, cand)
    raise GameError("cannot infer N from payoffs")


def closeness_distance(G: AnonymousGame, Gstar: AnonymousGame) -> Fraction:
    """Max over all (player, strategy, histogram) of the absolute payoff difference."""
    if (G.n, G.alpha) != (Gstar.n, Gstar.alpha):
        raise GameError(f"shape mismatch: {(G.n, G.alpha)} vs {(Gstar.n, Gstar.alpha)}")
    return max(
        (abs(a - b) for a, b in zip(G.entries(), Gstar.entries())), default=Fraction(0)
    )


def tau(xi, epsilon, kappa) -> Fraction:
    kappa = as_fraction(kappa)
    if kappa <= 0:
        raise GameError("kappa must be positive")
    return (36 * as_fraction(xi) + 18 * as_fraction(epsilon)) / kappa


@dataclass(frozen=True)
class ScalingReport:
    holds: bool
    slacks: Tuple[Fraction, ...]
    allowed: Tuple[Fraction, ...]


def check_scaling(profile: MixedProfile, params: RadixParams, tau_value) -> ScalingReport:
    """Is ``|x_{i,1} + x_{i,2} - delta^i| <= tau * delta^i`` for every main player?

    ``slacks[i]`` is the exact deviation ``|x_{i,1} + x_{i,2} - delta^i|``.
    """
    tau_value = as_fraction(tau_value)
    slacks, allowed = [], []
    for i in range(1, params.n + 1):
        row = profile[i - 1]
        slacks.append(abs(row[0] + row[1] - params.digit(i)))
        allowed.append(tau_value * params.digit(i))
    holds = all(s <= a for s, a in zip(slacks, allowed))
    return ScalingReport(holds, tuple(slacks), tuple(allowed))


def interested_strategies(n: int, generalized: bool = True) -> Tuple[Tuple[int, ...], ...]:
    roster = GENERALIZED_ROSTER if generalized else RADIX_ROSTER
    main = (roster.s1, roster.s2, roster.t) if generalized else (roster.s, roster.t)
    return (main,) * n + ((roster.q1, roster.q2), (roster.r1, roster.r2))


def plays_only_interested(profile: MixedProfile, n: int, generalized: bool = True) -> bool:
    allowed = interested_strategies(n, generalized)
    return all(
        v == 0 or b in allowed[p] for p in range(profile.n) for b, v in enumerate(profile[p])
    )


def perturb_game(G: AnonymousGame, magnitude, rng, grid: int = 1 << 20,
                 bounds: Optional[Tuple[Fraction, Fraction]] = None) -> AnonymousGame:
    """Add independent noise ``magnitude * u``, ``u`` uniform on a dyadic grid in [-1, 1], to every entry."""
    magnitude = as_fraction(magnitude)

    def noisy(v):
        return v + magnitude * Fraction(rng.randint(-grid, grid), grid)

    table = tuple(tuple(tuple(noisy(v) for v in row) for row in player) for player in G.payoffs)
    lo, hi = G.payoff_bounds
    bounds = bounds or (lo - magnitude, hi + magnitude)
    return AnonymousGame(G.n, G.alpha, table, bounds)
