"""Polymatrix -> anonymous game reduction, payoff normalization, padding, decoding.

``compile`` perturbs the generalized radix game so that main player ``P_l``'s
payoffs for ``s1``/``s2`` carry ``xi_star * A_row . y`` through the estimation
coefficients; ``decode`` reads a polymatrix profile back off ``P_l``'s
``s1``/``s2`` split.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

from .core import (
    AnonymousGame,
    GameError,
    MixedProfile,
    WELL_SUPPORTED,
    APPROXIMATE,
    EquilibriumCertificate,
    as_fraction,
    strategy_payoffs,
    verify_equilibrium,
)
from .estimation import CoeffVector, EstimationContext, build_coeffs, expand_coeffs, sample_scaling_profile
from .polymatrix import PolyProfile, PolymatrixGame, solve_poly_small, verify_poly_wsne
from .radix import (
    GENERALIZED_ROSTER,
    RadixParams,
    build_generalized_radix,
    closeness_distance,
    interested_strategies,
    tau,
)
from .search import RefineResult, refine_wsne

MAX_COMPILE_N = 4
MAX_SEARCH_N = 3
MAX_PAD_CELLS = 2_000_000


class ParameterInfeasible(GameError):
    pass


class DecodeError(GameError):
    def __init__(self, player: int):
        super().__init__(f"main player {player} puts no mass on s1/s2; scaling property violated")
        self.player = player


@dataclass(frozen=True)
class ReductionParams:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise GameError("n must be positive")

    @property
    def N(self) -> int:
        return 2 ** self.n

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.N)

    @property
    def lam(self) -> Fraction:
        return Fraction(1, 2 ** (self.n ** 3))

    @property
    def xi(self) -> Fraction:
        return Fraction(1, 2 ** (self.n ** 4))

    @property
    def xi_star(self) -> Fraction:
        return Fraction(1, 2 ** (self.n ** 5))

    @property
    def epsilon(self) -> Fraction:
        return Fraction(1, 2 ** (self.n ** 6))

    @property
    def kappa(self) -> Fraction:
        return RadixParams(self.n, self.N).kappa

    @property
    def tau(self) -> Fraction:
        return tau(self.xi, self.epsilon, self.kappa)

    def check(self):
        if self.tau > Fraction(1, 2):
            raise ParameterInfeasible(
                f"tau = (36 xi + 18 eps) / kappa = {float(self.tau):.4g} > 1/2 for n = {self.n}"
            )

    def as_dict(self) -> Dict[str, object]:
        return {
            "n": self.n, "N": self.N, "delta": self.delta, "lambda": self.lam, "xi": self.xi,
            "xi_star": self.xi_star, "epsilon": self.epsilon, "kappa": self.kappa, "tau": self.tau,
        }


@dataclass
class ReductionBundle:
    A: PolymatrixGame
    G_A: AnonymousGame
    G_A_normalized: AnonymousGame
    params: ReductionParams
    coeff_tables: Dict[Tuple[int, int], Tuple[CoeffVector, CoeffVector]]
    base: AnonymousGame = field(repr=False, default=None)

    @property
    def normalization_factor(self) -> Fraction:
        lo, hi = self.G_A.payoff_bounds
        return hi - lo


def compile_polymatrix(A: PolymatrixGame) -> ReductionBundle:
    n = A.n
    if n > MAX_COMPILE_N:
        raise GameError(f"compile supports n <= {MAX_COMPILE_N} (memory guard), got {n}")
    params = ReductionParams(n)
    params.check()
    N, xs = params.N, params.xi_star
    base = build_generalized_radix(n, N)
    hists = base.histograms
    coeffs = {}
    for l in range(1, n + 1):
        for j in range(1, n + 1):
            if j != l:
                coeffs[(l, j)] = build_coeffs(EstimationContext(n, N, l, j))
    table = [list(list(row) for row in player) for player in base.payoffs]
    for l in range(1, n + 1):
        dense = {j: tuple(expand_coeffs(c, hists) for c in coeffs[(l, j)]) for j in range(1, n + 1) if j != l}
        for strat, arow in ((GENERALIZED_ROSTER.s1, 2 * l - 2), (GENERALIZED_ROSTER.s2, 2 * l - 1)):
            row = table[l - 1][strat]
            for j, (Bd, Cd) in dense.items():
                a1, a2 = A.A[arow][2 * j - 2], A.A[arow][2 * j - 1]
                if a1 == 0 and a2 == 0:
                    continue
                w = xs * Fraction(N) ** j
                for k in range(len(hists)):
                    row[k] += w * (a1 * Bd[k] + a2 * Cd[k])
    G_A = AnonymousGame(base.n, base.alpha, table, (Fraction(-1), Fraction(3)))
    G_norm, _ = normalize(G_A, Fraction(-1), Fraction(3))
    return ReductionBundle(A, G_A, G_norm, params, coeffs, base)


def normalize(G: AnonymousGame, a, b) -> Tuple[AnonymousGame, Fraction]:
    """Affine rescale ``(payoff - a) / (b - a)`` onto [0, 1]; returns the game and ``b - a``."""
    a, b = as_fraction(a), as_fraction(b)
    if not a < b:
        raise GameError("normalize needs a < b")
    for v in G.entries():
        if not a <= v <= b:
            raise GameError(f"payoff {v} outside [{a}, {b}]")
    width = b - a
    table = tuple(tuple(tuple((v - a) / width for v in row) for row in player) for player in G.payoffs)
    return AnonymousGame(G.n, G.alpha, table, (Fraction(0), Fraction(1))), width


def ceil_power(n: int, t) -> int:
    """Exact ``ceil(n ** t)`` for rational ``t``."""
    t = as_fraction(t)
    p, q = t.numerator, t.denominator
    target = n ** p
    lo, hi = 0, 1
    while hi ** q < target:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** q >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def pad(G: AnonymousGame, t) -> AnonymousGame:
    """Add filler players that always prefer strategy 1 (index 0) until ``ceil(n^t)`` players.

    Original players read their payoff through the shift that removes the
    fillers from the strategy-1 count, and get 0 when that count is too small.
    """
    t = as_fraction(t)
    if t <= 1:
        raise GameError("pad needs t > 1")
    n, alpha = G.n, G.alpha
    M = ceil_power(n, t)
    cells = M * alpha * comb(M - 1 + alpha - 1, alpha - 1)
    if cells > MAX_PAD_CELLS:
        raise GameError(f"padded game would have {cells} payoff cells (limit {MAX_PAD_CELLS})")
    extra = M - n
    lo, hi = G.payoff_bounds
    lo, hi = min(lo, Fraction(0)), max(hi, Fraction(1))

    def fn(p, b, k):
        if p >= n:
            return Fraction(int(b == 0))
        if k[0] < extra:
            return Fraction(0)
        return G.payoff(p, b, (k[0] - extra,) + tuple(k[1:]))

    return AnonymousGame.from_function(M, alpha, fn, (lo, hi))


def pad_profile(X: MixedProfile, total_players: int, filler_rows=None) -> MixedProfile:
    alpha = X.alpha
    pure = tuple(Fraction(int(b == 0)) for b in range(alpha))
    extra = total_players - X.n
    fillers = list(filler_rows) if filler_rows is not None else [pure] * extra
    return MixedProfile(X.x + tuple(tuple(r) for r in fillers))


def decode(X: MixedProfile, params: ReductionParams) -> PolyProfile:
    y = []
    for l in range(1, params.n + 1):
        a, b = X[l - 1][0], X[l - 1][1]
        s = a + b
        if s == 0:
            raise DecodeError(l)
        y.extend([a / s, b / s])
    return PolyProfile(tuple(y))


def lift(y: PolyProfile, params: ReductionParams) -> MixedProfile:
    """Inverse of decode at the canonical scale: ``x_{l,b} = delta^l * y_{2l-1+b}``."""
    n = params.n
    rows = []
    for l in range(1, n + 1):
        d = params.delta ** l
        rows.append((d * y.y[2 * l - 2], d * y.y[2 * l - 1], 1 - d, 0, 0, 0, 0))
    half = Fraction(1, 2)
    rows.append((0, 0, 0, half, half, 0, 0))
    rows.append((0, 0, 0, 0, 0, params.kappa, 1 - params.kappa))
    return MixedProfile(tuple(rows))


def approx_to_wsne(G: AnonymousGame, X: MixedProfile, epsilon) -> MixedProfile:
    """Shift mass off strategies at least ``epsilon / 2`` worse than the best response.

    The best response is the lowest-index maximizer.  Output is an epsilon-WSNE
    whenever X is an ``epsilon^2 / (16 alpha n)``-approximate equilibrium of a
    [0, 1]-payoff game; the shift is applied regardless.
    """
    epsilon = as_fraction(epsilon)
    rows = []
    for p in range(G.n):
        u = strategy_payoffs(G, X, p)
        best = max(u)
        sigma = u.index(best)
        J = [j for j in range(G.alpha) if best >= u[j] + epsilon / 2]
        row = list(X[p])
        moved = sum((row[j] for j in J), Fraction(0))
        for j in J:
            row[j] = Fraction(0)
        row[sigma] += moved
        rows.append(tuple(row))
    return MixedProfile(tuple(rows))


def approx_precondition(G: AnonymousGame, X: MixedProfile, epsilon) -> EquilibriumCertificate:
    """Verifier certificate for X being an ``epsilon^2 / (16 alpha n)``-approximate equilibrium."""
    epsilon = as_fraction(epsilon)
    return verify_equilibrium(G, X, epsilon ** 2 / (16 * G.alpha * G.n), APPROXIMATE)


@dataclass
class SearchReport:
    success: bool
    profile: Optional[MixedProfile]
    seed: PolyProfile
    refine: Optional[RefineResult]
    residuals: Tuple[Fraction, ...]
    message: str = ""


def _lifted_supports(y: PolyProfile, n: int):
    R = GENERALIZED_ROSTER
    supports = []
    for l in range(n):
        a, b = y.y[2 * l], y.y[2 * l + 1]
        S = tuple(s for s, v in ((R.s1, a), (R.s2, b)) if v > 0) + (R.t,)
        supports.append(S)
    supports.append((R.q1, R.q2))
    supports.append((R.r1, R.r2))
    return supports


def search_wsne_GA(bundle: ReductionBundle, refine: bool = True, max_attempts: int = 8) -> SearchReport:
    """Seed from an exact polymatrix equilibrium, lift, and refine to an epsilon-WSNE of ``G_A``."""
    params = bundle.params
    if params.n > MAX_SEARCH_N:
        raise GameError(f"search supports n <= {MAX_SEARCH_N}")
    y = solve_poly_small(bundle.A, 0)
    X0 = lift(y, params)
    eps = params.epsilon
    if not refine:
        cert = verify_equilibrium(bundle.G_A, X0, eps, WELL_SUPPORTED)
        if cert.accepted:
            return SearchReport(True, X0, y, None, cert.player_gaps, "lifted profile verified")
        return SearchReport(False, None, y, None, cert.player_gaps, "refinement skipped; lifted profile rejected")
    supports = _lifted_supports(y, params.n)
    allowed = interested_strategies(params.n, generalized=True)
    res = refine_wsne(bundle.G_A, X0, supports, eps, allowed=allowed, max_attempts=max_attempts)
    gaps = res.certificate.player_gaps if res.certificate is not None else (res.residual,)
    if res.success:
        return SearchReport(True, res.profile, y, res, gaps, "verified")
    return SearchReport(False, None, y, res, gaps, "; ".join(res.log[-3:]))


def decomposition_residuals(bundle: ReductionBundle, X: MixedProfile) -> List[Fraction]:
    """Per (main player, s1/s2): ``|u(G_A) - u(G*) - xi_star sum_j N^j (A x_j)|``."""
    params = bundle.params
    n, N, xs = params.n, params.N, params.xi_star
    A = bundle.A.A
    out = []
    for l in range(1, n + 1):
        u = strategy_payoffs(bundle.G_A, X, l - 1)
        u_star = strategy_payoffs(bundle.base, X, l - 1)
        for strat, arow in ((0, 2 * l - 2), (1, 2 * l - 1)):
            lin = sum(
                (Fraction(N) ** j * (A[arow][2 * j - 2] * X[j - 1][0] + A[arow][2 * j - 1] * X[j - 1][1])
                 for j in range(1, n + 1) if j != l),
                Fraction(0),
            )
            out.append(abs(u[strat] - u_star[strat] - xs * lin))
    return out


def random_polymatrix(n: int, rng: random.Random, denom: int = 16) -> PolymatrixGame:
    size = 2 * n
    A = [[Fraction(0)] * size for _ in range(size)]
    for k in range(size):
        for l in range(size):
            if k // 2 != l // 2:
                A[k][l] = Fraction(rng.randint(0, denom), denom)
    return PolymatrixGame(n, tuple(map(tuple, A)))


def measure_decomposition_constant(n: int, trials: int, seed: int = 0, A: Optional[PolymatrixGame] = None
                                   ) -> Fraction:
    """Max decomposition residual over sampled scaling profiles, in units of ``n^3 xi_star delta``."""
    rng = random.Random(seed)
    A = A or random_polymatrix(n, rng)
    bundle = compile_polymatrix(A)
    p = bundle.params
    unit = n ** 3 * p.xi_star * p.delta
    worst = Fraction(0)
    for _ in range(trials):
        X = sample_scaling_profile(n, p.N, p.lam, rng)
        worst = max(worst, max(decomposition_residuals(bundle, X)) / unit)
    return worst


def closeness_to_base(bundle: ReductionBundle) -> Fraction:
    return closeness_distance(bundle.G_A, bundle.base)
