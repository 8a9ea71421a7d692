"""Linear forms over seen-histogram probabilities that estimate another player's mixing.

Observer ``P_l`` sees the counts ``(k1, k2)`` of ``s1``/``s2`` among the other
main players.  When every main player ``i`` puts total mass close to ``delta^i``
on ``{s1, s2}``, a fixed linear form in ``Pr[k1 = a, k2 = b]`` recovers
``x_{r,1}`` up to ``O(r^2 delta^(r+1))``.  Player labels here are 1-based
(``P_i`` sits in profile row ``i - 1``), and ``x_{i,1}`` / ``x_{i,2}`` are the
probabilities of strategy indices 0 / 1.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, FrozenSet, List, Optional, Tuple

from .core import GameError, MixedProfile, SeenDistribution, as_fraction, histogram_dp

Key = Tuple[int, int]


@dataclass(frozen=True)
class EstimationContext:
    n: int
    N: int
    ell: int
    r: int
    lam: Optional[Fraction] = None

    def __post_init__(self):
        if self.N < 2 or self.n < 2:
            raise GameError("need n >= 2 and N >= 2")
        if not (1 <= self.ell <= self.n and 1 <= self.r <= self.n):
            raise GameError(f"(ell, r) = ({self.ell}, {self.r}) out of range for n = {self.n}")
        if self.ell == self.r:
            raise GameError("ell and r must differ")
        if self.lam is None:
            object.__setattr__(self, "lam", Fraction(1, 2 ** (self.n ** 3)))

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.N)

    @property
    def observed(self) -> FrozenSet[int]:
        return frozenset(i for i in range(1, self.n + 1) if i != self.ell)

    @property
    def L(self) -> Tuple[int, ...]:
        return tuple(sorted(i for i in self.observed if i <= self.r))

    @property
    def m(self) -> int:
        return len(self.L)

    def h(self, subset) -> Fraction:
        return self.delta ** sum(subset)

    def outside_normalizer(self, subset) -> Fraction:
        """``(prod over observed i not in subset of (1 - delta^i))^-1``."""
        prod = Fraction(1)
        for i in self.observed:
            if i not in subset:
                prod *= 1 - self.delta ** i
        return 1 / prod


@dataclass(frozen=True)
class CoeffVector:
    owner: Tuple[int, int]
    entries: Dict[Key, Fraction]
    bound: Fraction

    def value(self, k1: int, k2: int) -> Fraction:
        return self.entries.get((k1, k2), Fraction(0))

    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self.entries.values()), default=Fraction(0))

    def swapped(self) -> "CoeffVector":
        return CoeffVector(self.owner, {(b, a): v for (a, b), v in self.entries.items()}, self.bound)


def _x1(profile, i: int) -> Fraction:
    rows = profile.x if isinstance(profile, MixedProfile) else profile
    return as_fraction(rows[i - 1][0])


def poly_P(d: int, ctx: EstimationContext, profile) -> Fraction:
    """``sum over T subset of L, |T| = d`` of ``prod_{T} x_{i,1} * prod_{L \\ T} delta^i``."""
    L = ctx.L
    if not 0 <= d <= len(L):
        raise GameError(f"d = {d} out of range [0, {len(L)}]")
    total = Fraction(0)
    for T in itertools.combinations(L, d):
        term = Fraction(1)
        for i in L:
            term *= _x1(profile, i) if i in T else ctx.delta ** i
        total += term
    return total


def subset_expansion(j: int, ctx: EstimationContext, profile) -> Fraction:
    """``sum over S1 subset of L, |S1| = m - j`` of ``prod_{S1} x_{i,1} prod_{L \\ S1} (delta^i - x_{i,1})``."""
    L, m = ctx.L, ctx.m
    total = Fraction(0)
    for S1 in itertools.combinations(L, m - j):
        term = Fraction(1)
        for i in L:
            x = _x1(profile, i)
            term *= x if i in S1 else ctx.delta ** i - x
        total += term
    return total


def alternating_form(j: int, ctx: EstimationContext, profile) -> Fraction:
    """``sum_{i=0}^{j} (-1)^i C(m-j+i, m-j) P_{m-j+i}``."""
    m = ctx.m
    return sum(
        ((-1) ** i * comb(m - j + i, m - j) * poly_P(m - j + i, ctx, profile) for i in range(j + 1)),
        Fraction(0),
    )


def telescoped_P1(ctx: EstimationContext, profile) -> Fraction:
    """``sum_{j=1}^{m} j * sum_{i=0}^{m-j} (-1)^i C(j+i, j) P_{j+i}``; equals ``P_1`` identically."""
    m = ctx.m
    total = Fraction(0)
    for j in range(1, m + 1):
        inner = sum(
            ((-1) ** i * comb(j + i, j) * poly_P(j + i, ctx, profile) for i in range(m - j + 1)),
            Fraction(0),
        )
        total += j * inner
    return total


def _b_entries(ctx: EstimationContext) -> Dict[Key, Fraction]:
    L, m, r = ctx.L, ctx.m, ctx.r
    scale = ctx.delta ** r
    entries: Dict[Key, Fraction] = {}
    norm = ctx.outside_normalizer(L) / ctx.h(L)
    for j in range(1, m + 1):
        entries[(j, m - j)] = entries.get((j, m - j), Fraction(0)) + scale * j * norm
    if m > 1:
        Lp = tuple(i for i in L if i != r)
        norm_p = ctx.outside_normalizer(Lp) / ctx.h(Lp)
        for j in range(1, m):
            entries[(j, m - 1 - j)] = entries.get((j, m - 1 - j), Fraction(0)) - scale * j * norm_p
    return {k: v for k, v in entries.items() if v != 0}


def build_coeffs(ctx: EstimationContext) -> Tuple[CoeffVector, CoeffVector]:
    """Coefficient vectors estimating ``x_{r,1}`` (B) and ``x_{r,2}`` (C) from ``P_l``'s view.

    C is B with the roles of ``s1`` and ``s2`` exchanged, i.e. keys swapped.
    """
    bound = Fraction(ctx.N) ** (ctx.n ** 2)
    B = CoeffVector((ctx.ell, ctx.r), _b_entries(ctx), bound)
    return B, B.swapped()


def s_count_marginal(dist: SeenDistribution) -> Dict[Key, Fraction]:
    """Aggregate a seen distribution into ``Pr[k1 = a, k2 = b]``."""
    out: Dict[Key, Fraction] = {}
    for h, pr in zip(dist.histograms, dist.prob):
        if pr:
            key = (h[0], h[1])
            out[key] = out.get(key, Fraction(0)) + pr
    return out


def evaluate_estimate(coeffs: CoeffVector, dist: SeenDistribution, game_shape=None) -> Fraction:
    if game_shape is not None:
        n_players, alpha = game_shape
        if dist.histograms and (len(dist.histograms[0]) != alpha or sum(dist.histograms[0]) != n_players - 1):
            raise GameError("seen distribution does not match game shape")
    if dist.histograms and len(dist.histograms[0]) < 2:
        raise GameError("need at least two strategies")
    marg = s_count_marginal(dist)
    return sum((v * marg.get(k, Fraction(0)) for k, v in coeffs.entries.items()), Fraction(0))


def expand_coeffs(coeffs: CoeffVector, histograms) -> List[Fraction]:
    """Dense per-histogram coefficients: entry ``(k1, k2)`` repeated over matching histograms."""
    return [coeffs.value(h[0], h[1]) for h in histograms]


def sample_scaling_profile(n: int, N: int, lam: Fraction, rng: random.Random,
                           grid: int = 1 << 16, jitter: bool = True) -> MixedProfile:
    """7-strategy profile: ``x_{i,1} + x_{i,2} = delta^i + eta_i``, ``|eta_i| <= lam``.

    Q plays q1/q2 evenly and R plays r1 with probability ``kappa``, so neither
    ever shows up in the s1/s2 counts.
    """
    delta = Fraction(1, N)
    rows = []
    for i in range(1, n + 1):
        eta = lam * Fraction(rng.randint(-grid, grid), grid) if jitter else Fraction(0)
        total = delta ** i + eta
        w = Fraction(rng.randint(0, grid), grid)
        rows.append((total * w, total * (1 - w), 1 - total, 0, 0, 0, 0))
    kappa = delta ** (n * (n + 1) // 2)
    rows.append((0, 0, 0, Fraction(1, 2), Fraction(1, 2), 0, 0))
    rows.append((0, 0, 0, 0, 0, kappa, 1 - kappa))
    return MixedProfile(tuple(rows))


def main_player_marginal(profile: MixedProfile, n: int, ell: int) -> Dict[Key, Fraction]:
    """``Pr[k1, k2]`` seen by ``P_ell`` using only the main players' (s1, s2, rest) masses.

    Equivalent to aggregating the full seen distribution when Q and R never play s1/s2.
    """
    rows = []
    for i in range(1, n + 1):
        if i != ell:
            a, b = profile[i - 1][0], profile[i - 1][1]
            rows.append((a, b, 1 - a - b))
    dist = histogram_dp(rows, 3)
    out: Dict[Key, Fraction] = {}
    for h, pr in dist.items():
        out[(h[0], h[1])] = out.get((h[0], h[1]), Fraction(0)) + pr
    return out


def estimate_from_marginal(coeffs: CoeffVector, marg: Dict[Key, Fraction]) -> Fraction:
    return sum((v * marg.get(k, Fraction(0)) for k, v in coeffs.entries.items()), Fraction(0))


@dataclass(frozen=True)
class ErrorConstant:
    ell: int
    r: int
    max_b: Fraction
    max_c: Fraction

    @property
    def constant(self) -> Fraction:
        return max(self.max_b, self.max_c)


def normalized_errors(n: int, profile: MixedProfile, ell: int, r: int,
                      coeffs=None, marg=None) -> Tuple[Fraction, Fraction]:
    """``|estimate - x_{r,b}| / (r^2 delta^(r+1))`` for b = 1 (B vector) and b = 2 (C vector)."""
    N = 2 ** n
    ctx = EstimationContext(n, N, ell, r)
    B, C = coeffs or build_coeffs(ctx)
    marg = marg if marg is not None else main_player_marginal(profile, n, ell)
    scale = r * r * ctx.delta ** (r + 1)
    eb = abs(estimate_from_marginal(B, marg) - profile[r - 1][0]) / scale
    ec = abs(estimate_from_marginal(C, marg) - profile[r - 1][1]) / scale
    return eb, ec


def measure_error_constant(n: int, trials: int, seed: int = 0, jitter: bool = True
                           ) -> Dict[Tuple[int, int], ErrorConstant]:
    """Max normalized estimation error per ``(ell, r)`` over ``trials`` sampled profiles."""
    if n > 4:
        raise GameError("measure_error_constant supports n <= 4")
    if trials <= 0:
        return {}
    N = 2 ** n
    lam = Fraction(1, 2 ** (n ** 3))
    rng = random.Random(seed)
    pairs = [(l, r) for l in range(1, n + 1) for r in range(1, n + 1) if l != r]
    coeffs = {pr: build_coeffs(EstimationContext(n, N, *pr)) for pr in pairs}
    acc = {pr: [Fraction(0), Fraction(0)] for pr in pairs}
    for _ in range(trials):
        X = sample_scaling_profile(n, N, lam, rng, jitter=jitter)
        margs = {l: main_player_marginal(X, n, l) for l in range(1, n + 1)}
        for (l, r) in pairs:
            eb, ec = normalized_errors(n, X, l, r, coeffs[(l, r)], margs[l])
            a = acc[(l, r)]
            a[0], a[1] = max(a[0], eb), max(a[1], ec)
    return {pr: ErrorConstant(pr[0], pr[1], v[0], v[1]) for pr, v in acc.items()}


def coefficient_bound_report(n: int, N: Optional[int] = None) -> Dict[str, Fraction]:
    """Largest coefficient magnitude over all ``(ell, r)`` vs ``N^(n^2)`` and ``N^(m^2)``."""
    N = N or 2 ** n
    worst = Fraction(0)
    tight_ok = True
    for l in range(1, n + 1):
        for r in range(1, n + 1):
            if l == r:
                continue
            ctx = EstimationContext(n, N, l, r)
            B, C = build_coeffs(ctx)
            mx = max(B.max_abs(), C.max_abs())
            worst = max(worst, mx)
            tight_ok = tight_ok and mx <= Fraction(N) ** (ctx.m ** 2)
    return {
        "max_abs": worst,
        "bound": Fraction(N) ** (n ** 2),
        "within_bound": worst <= Fraction(N) ** (n ** 2),
        "within_m_squared_bound": tight_ok,
    }
