"""Anonymous games: data model, histogram DP, expected payoffs, equilibrium checks.

All arithmetic is exact (``fractions.Fraction``).  Histograms are count vectors
and are indexed by their position in :func:`enumerate_histograms`, which lists
them in increasing lexicographic order.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Rational = Fraction
Histogram = Tuple[int, ...]

APPROXIMATE = "approximate"
WELL_SUPPORTED = "well-supported"
MODES = (APPROXIMATE, WELL_SUPPORTED)


class GameError(ValueError):
    """Raised on malformed games, profiles or out-of-range indices."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise GameError("floating point values are not accepted; use exact rationals")
    return Fraction(value)


@lru_cache(maxsize=None)
def enumerate_histograms(observed: int, alpha: int) -> Tuple[Histogram, ...]:
    """All length-``alpha`` count vectors summing to ``observed``, lexicographically increasing."""
    if observed < 0 or alpha < 1:
        raise GameError(f"need observed >= 0 and alpha >= 1, got ({observed}, {alpha})")

    def rec(remaining: int, slots: int):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining + 1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    return tuple(rec(observed, alpha))


@lru_cache(maxsize=None)
def histogram_index(observed: int, alpha: int) -> Dict[Histogram, int]:
    return {h: i for i, h in enumerate(enumerate_histograms(observed, alpha))}


@dataclass(frozen=True)
class MixedProfile:
    """Row-stochastic ``n x alpha`` matrix; ``x[p][b]`` is the probability player p plays b."""

    x: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.x)
        object.__setattr__(self, "x", rows)
        if not rows:
            raise GameError("profile has no players")
        alpha = len(rows[0])
        for p, row in enumerate(rows):
            if len(row) != alpha:
                raise GameError(f"row {p} has {len(row)} entries, expected {alpha}")
            if any(v < 0 for v in row):
                raise GameError(f"row {p} has a negative probability")
            if sum(row) != 1:
                raise GameError(f"row {p} sums to {sum(row)}, not 1")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def alpha(self) -> int:
        return len(self.x[0])

    def __getitem__(self, p: int) -> Tuple[Fraction, ...]:
        return self.x[p]

    def replace_row(self, p: int, row: Sequence) -> "MixedProfile":
        rows = list(self.x)
        rows[p] = tuple(row)
        return MixedProfile(tuple(rows))

    @classmethod
    def pure(cls, strategies: Sequence[int], alpha: int) -> "MixedProfile":
        return cls(tuple(tuple(Fraction(int(b == s)) for b in range(alpha)) for s in strategies))

    @classmethod
    def uniform(cls, n: int, alpha: int) -> "MixedProfile":
        return cls(tuple((Fraction(1, alpha),) * alpha for _ in range(n)))


@dataclass(frozen=True)
class AnonymousGame:
    """``payoffs[p][b][k]`` is player p's payoff for strategy b when she sees histogram index k."""

    n: int
    alpha: int
    payoffs: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]
    payoff_bounds: Tuple[Fraction, Fraction]

    def __post_init__(self):
        if self.n < 1 or self.alpha < 1:
            raise GameError("need n >= 1 and alpha >= 1")
        table = tuple(
            tuple(tuple(as_fraction(v) for v in row) for row in player) for player in self.payoffs
        )
        lo, hi = (as_fraction(v) for v in self.payoff_bounds)
        object.__setattr__(self, "payoffs", table)
        object.__setattr__(self, "payoff_bounds", (lo, hi))
        if lo > hi:
            raise GameError(f"payoff bounds {lo} > {hi}")
        size = len(self.histograms)
        if len(table) != self.n:
            raise GameError(f"payoff table has {len(table)} players, expected {self.n}")
        for p, player in enumerate(table):
            if len(player) != self.alpha:
                raise GameError(f"player {p} has {len(player)} strategy rows, expected {self.alpha}")
            for b, row in enumerate(player):
                if len(row) != size:
                    raise GameError(f"payoff row ({p}, {b}) has {len(row)} entries, expected {size}")
                for v in row:
                    if not lo <= v <= hi:
                        raise GameError(f"payoff {v} of ({p}, {b}) outside [{lo}, {hi}]")

    @property
    def histograms(self) -> Tuple[Histogram, ...]:
        return enumerate_histograms(self.n - 1, self.alpha)

    @property
    def index(self) -> Dict[Histogram, int]:
        return histogram_index(self.n - 1, self.alpha)

    def payoff(self, p: int, b: int, k: Histogram) -> Fraction:
        return self.payoffs[p][b][self.index[tuple(k)]]

    def entries(self) -> Iterable[Fraction]:
        for player in self.payoffs:
            for row in player:
                yield from row

    def min_payoff(self) -> Fraction:
        return min(self.entries())

    def max_payoff(self) -> Fraction:
        return max(self.entries())

    @classmethod
    def from_function(cls, n: int, alpha: int, fn, payoff_bounds) -> "AnonymousGame":
        """Build a game from ``fn(p, b, histogram) -> payoff``."""
        hists = enumerate_histograms(n - 1, alpha)
        table = tuple(
            tuple(tuple(as_fraction(fn(p, b, k)) for k in hists) for b in range(alpha))
            for p in range(n)
        )
        return cls(n, alpha, table, payoff_bounds)

    @classmethod
    def constant(cls, n: int, alpha: int, c) -> "AnonymousGame":
        c = as_fraction(c)
        return cls.from_function(n, alpha, lambda p, b, k: c, (c, c))


@dataclass(frozen=True)
class SeenDistribution:
    observer: int
    prob: Tuple[Fraction, ...]
    histograms: Tuple[Histogram, ...]

    def __getitem__(self, k) -> Fraction:
        if isinstance(k, int):
            return self.prob[k]
        return self.prob[histogram_index(sum(k), len(k))[tuple(k)]]

    def as_dict(self) -> Dict[Histogram, Fraction]:
        return dict(zip(self.histograms, self.prob))


def histogram_dp(rows: Iterable[Sequence[Fraction]], alpha: int) -> Dict[Histogram, Fraction]:
    """Distribution of the histogram of pure strategies drawn independently from ``rows``.

    Rows are convolved in one at a time; pure profiles are never enumerated.
    Rows need not be nonnegative (the result is then the same multilinear polynomial).
    """
    dist: Dict[Histogram, Fraction] = {(0,) * alpha: Fraction(1)}
    for row in rows:
        nxt: Dict[Histogram, Fraction] = defaultdict(Fraction)
        support = [(b, v) for b, v in enumerate(row) if v]
        for hist, pr in dist.items():
            for b, v in support:
                key = hist[:b] + (hist[b] + 1,) + hist[b + 1:]
                nxt[key] += pr * v
        dist = nxt
    return dist


def _rows(profile) -> Tuple[Tuple[Fraction, ...], ...]:
    return profile.x if isinstance(profile, MixedProfile) else tuple(tuple(r) for r in profile)


def seen_distribution(game_shape: Tuple[int, int], profile, observer: int) -> SeenDistribution:
    """``Pr_X[observer, k]`` for every histogram k of the other ``n - 1`` players."""
    n, alpha = game_shape
    rows = _rows(profile)
    if len(rows) != n or any(len(r) != alpha for r in rows):
        raise GameError(f"profile shape does not match game shape {game_shape}")
    if not 0 <= observer < n:
        raise GameError(f"observer {observer} out of range for {n} players")
    dist = histogram_dp((rows[q] for q in range(n) if q != observer), alpha)
    hists = enumerate_histograms(n - 1, alpha)
    return SeenDistribution(observer, tuple(dist.get(h, Fraction(0)) for h in hists), hists)


def seen_distribution_brute_force(game_shape: Tuple[int, int], profile, observer: int) -> SeenDistribution:
    """Reference oracle: sum over all ``alpha ** (n - 1)`` pure profiles of the others."""
    import itertools

    n, alpha = game_shape
    rows = _rows(profile)
    others = [q for q in range(n) if q != observer]
    acc: Dict[Histogram, Fraction] = defaultdict(Fraction)
    for pure in itertools.product(range(alpha), repeat=len(others)):
        weight = Fraction(1)
        for q, s in zip(others, pure):
            weight *= rows[q][s]
        counts = [0] * alpha
        for s in pure:
            counts[s] += 1
        acc[tuple(counts)] += weight
    hists = enumerate_histograms(n - 1, alpha)
    return SeenDistribution(observer, tuple(acc.get(h, Fraction(0)) for h in hists), hists)


def _check_indices(game: AnonymousGame, p: int, b: Optional[int] = None):
    if not 0 <= p < game.n:
        raise GameError(f"player {p} out of range for {game.n} players")
    if b is not None and not 0 <= b < game.alpha:
        raise GameError(f"strategy {b} out of range for {game.alpha} strategies")


def payoffs_against(game: AnonymousGame, p: int, dist: Dict[Histogram, Fraction]) -> List[Fraction]:
    """``[u_p(b) for b]`` for a sparse seen-distribution ``dist``."""
    index = game.index
    table = game.payoffs[p]
    out = []
    for b in range(game.alpha):
        row = table[b]
        out.append(sum((row[index[h]] * pr for h, pr in dist.items()), Fraction(0)))
    return out


def strategy_payoffs(game: AnonymousGame, profile, p: int) -> List[Fraction]:
    """``[u_p(b, X) for b in range(alpha)]`` from one DP pass."""
    _check_indices(game, p)
    rows = _rows(profile)
    if len(rows) != game.n or any(len(r) != game.alpha for r in rows):
        raise GameError("profile shape does not match game")
    dist = histogram_dp((rows[q] for q in range(game.n) if q != p), game.alpha)
    return payoffs_against(game, p, dist)


def expected_payoff(game: AnonymousGame, profile, p: int, b: int) -> Fraction:
    _check_indices(game, p, b)
    dist = seen_distribution((game.n, game.alpha), profile, p)
    row = game.payoffs[p][b]
    return sum((v * pr for v, pr in zip(row, dist.prob)), Fraction(0))


def expected_payoff_mixed(game: AnonymousGame, profile, p: int) -> Fraction:
    rows = _rows(profile)
    u = strategy_payoffs(game, profile, p)
    return sum((x * v for x, v in zip(rows[p], u)), Fraction(0))


@dataclass(frozen=True)
class Witness:
    """A violated condition.

    approximate mode: deviating to ``better`` gains ``gap`` over the mixed payoff
    (``played`` is None).  well-supported mode: ``played`` has positive probability
    but ``better`` pays ``gap`` more.
    """

    player: int
    played: Optional[int]
    better: int
    gap: Fraction


@dataclass(frozen=True)
class EquilibriumCertificate:
    profile: object
    epsilon: Fraction
    mode: str
    verdict: str
    witnesses: Tuple[Witness, ...]
    player_gaps: Tuple[Fraction, ...] = field(default=())

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def max_gap(self) -> Fraction:
        return max(self.player_gaps, default=Fraction(0))


def verify_equilibrium(game: AnonymousGame, profile: MixedProfile, epsilon, mode: str = WELL_SUPPORTED
                       ) -> EquilibriumCertificate:
    """Exact check of the epsilon-approximate or epsilon-well-supported condition.

    ``player_gaps[p]`` is the worst regret of player p: ``max_b u(b) - u(X)`` in
    approximate mode, ``max_b u(b) - min_{a in support} u(a)`` in well-supported mode.
    """
    epsilon = as_fraction(epsilon)
    if epsilon < 0:
        raise GameError("epsilon must be nonnegative")
    if mode not in MODES:
        raise GameError(f"unknown mode {mode!r}")
    if profile.n != game.n or profile.alpha != game.alpha:
        raise GameError("profile shape does not match game")
    witnesses: List[Witness] = []
    gaps: List[Fraction] = []
    for p in range(game.n):
        u = strategy_payoffs(game, profile, p)
        row = profile[p]
        if mode == APPROXIMATE:
            mixed = sum((x * v for x, v in zip(row, u)), Fraction(0))
            gaps.append(max(u) - mixed)
            for b, v in enumerate(u):
                if mixed + epsilon < v:
                    witnesses.append(Witness(p, None, b, v - mixed))
        else:
            best = max(u)
            played = [a for a in range(game.alpha) if row[a] > 0]
            gaps.append(best - min(u[a] for a in played))
            for a in played:
                for b, v in enumerate(u):
                    if u[a] + epsilon < v:
                        witnesses.append(Witness(p, a, b, v - u[a]))
    verdict = "reject" if witnesses else "accept"
    return EquilibriumCertificate(profile, epsilon, mode, verdict, tuple(witnesses), tuple(gaps))
