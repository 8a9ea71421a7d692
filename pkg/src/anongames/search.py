"""Desk-scale equilibrium search: Newton refinement on a fixed support.

Given a support ``S_p`` (ordered; the last entry is the reference strategy) for
every player, solve the indifference system ``u_p(b) = u_p(S_p[-1])`` for
``b in S_p[:-1]``.  Payoffs are multilinear in the other players' rows, so the
Jacobian is exact: the derivative of ``u_p(b)`` in ``x_{q,c}`` (with the
reference strategy absorbing the mass) is ``u_p(b | q plays c) - u_p(b | q plays ref)``.
Iterates are rounded to a dyadic grid to keep denominators bounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .core import (
    AnonymousGame,
    EquilibriumCertificate,
    MixedProfile,
    WELL_SUPPORTED,
    as_fraction,
    histogram_dp,
    payoffs_against,
    verify_equilibrium,
)
from .polymatrix import solve_linear

Support = Tuple[int, ...]


@dataclass
class NewtonResult:
    rows: List[List[Fraction]]
    residual: Fraction
    iterations: int
    converged: bool


@dataclass
class RefineResult:
    profile: Optional[MixedProfile]
    certificate: Optional[EquilibriumCertificate]
    supports: Tuple[Support, ...]
    residual: Fraction
    attempts: int
    log: List[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.certificate is not None and self.certificate.accepted


def _shift(dist, c: int):
    out = {}
    for h, pr in dist.items():
        out[h[:c] + (h[c] + 1,) + h[c + 1:]] = pr
    return out


def _round_dyadic(v: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(round(v * scale), scale)


def _set_rows(rows, supports, values):
    i = 0
    for p, S in enumerate(supports):
        for b in S[:-1]:
            rows[p][b] = values[i]
            i += 1
        rows[p][S[-1]] = 1 - sum(rows[p][b] for b in S[:-1])


def _unknowns(rows, supports):
    return [rows[p][b] for p, S in enumerate(supports) for b in S[:-1]]


def _residuals(game, rows, supports) -> List[Fraction]:
    out = []
    for p, S in enumerate(supports):
        if len(S) < 2:
            continue
        dist = histogram_dp((rows[q] for q in range(game.n) if q != p), game.alpha)
        u = payoffs_against(game, p, dist)
        out.extend(u[b] - u[S[-1]] for b in S[:-1])
    return out


def _jacobian(game, rows, supports) -> List[List[Fraction]]:
    cols = [(q, c) for q, S in enumerate(supports) for c in S[:-1]]
    col_of = {qc: j for j, qc in enumerate(cols)}
    J = []
    for p, S in enumerate(supports):
        if len(S) < 2:
            continue
        block = [[Fraction(0)] * len(cols) for _ in S[:-1]]
        for q, Sq in enumerate(supports):
            if q == p or len(Sq) < 2:
                continue
            base = histogram_dp((rows[o] for o in range(game.n) if o not in (p, q)), game.alpha)
            u_ref = payoffs_against(game, p, _shift(base, Sq[-1]))
            for c in Sq[:-1]:
                u_c = payoffs_against(game, p, _shift(base, c))
                for r, b in enumerate(S[:-1]):
                    block[r][col_of[(q, c)]] = (u_c[b] - u_ref[b]) - (u_c[S[-1]] - u_ref[S[-1]])
        J.extend(block)
    return J


def newton_on_support(game: AnonymousGame, start_rows, supports: Sequence[Support], target,
                      max_iters: int = 40, bits: Optional[int] = None) -> NewtonResult:
    """Solve the indifference system on ``supports`` starting from ``start_rows``.

    Strategies outside each support are set to zero.  The iterate may leave the
    simplex; callers check the sign pattern afterwards.
    """
    target = as_fraction(target)
    if bits is None:
        bits = max(64, int(math.ceil(-math.log2(target))) + 32) if target > 0 else 256
    rows = [[Fraction(0)] * game.alpha for _ in range(game.n)]
    for p, S in enumerate(supports):
        for b in S:
            rows[p][b] = as_fraction(start_rows[p][b])
    _set_rows(rows, supports, [_round_dyadic(v, bits) for v in _unknowns(rows, supports)])
    F = _residuals(game, rows, supports)
    res = max((abs(f) for f in F), default=Fraction(0))
    it = 0
    while res > target and it < max_iters:
        it += 1
        J = _jacobian(game, rows, supports)
        step = solve_linear(J, [-f for f in F])
        if step is None:
            break
        v0 = _unknowns(rows, supports)
        t = Fraction(1)
        for _ in range(30):
            trial = [r[:] for r in rows]
            _set_rows(trial, supports, [_round_dyadic(a + t * d, bits) for a, d in zip(v0, step)])
            F_new = _residuals(game, trial, supports)
            res_new = max((abs(f) for f in F_new), default=Fraction(0))
            if res_new < res or res_new <= target:
                break
            t /= 2
        else:
            break
        rows, F, res = trial, F_new, res_new
    return NewtonResult(rows, res, it, res <= target)


def refine_wsne(game: AnonymousGame, seed, supports: Sequence[Support], epsilon,
                allowed: Optional[Sequence[Sequence[int]]] = None, max_attempts: int = 8,
                max_iters: int = 40) -> RefineResult:
    """Newton on a support, verify, repair the support, repeat.

    Repairs: a strategy whose solved probability is negative is dropped; an
    allowed strategy that beats a played one by more than ``epsilon`` is added.
    """
    epsilon = as_fraction(epsilon)
    target = epsilon / 4 if epsilon > 0 else Fraction(0)
    supports = [tuple(S) for S in supports]
    seed_rows = [list(r) for r in (seed.x if isinstance(seed, MixedProfile) else seed)]
    log: List[str] = []
    best_res = None
    cert = None
    profile = None
    for attempt in range(1, max_attempts + 1):
        nr = newton_on_support(game, seed_rows, supports, target, max_iters=max_iters)
        best_res = nr.residual if best_res is None else min(best_res, nr.residual)
        log.append(f"attempt {attempt}: supports={supports} residual<=2^{_log2(nr.residual)} "
                   f"iters={nr.iterations}")
        negative = [(v, p, b) for p, row in enumerate(nr.rows) for b, v in enumerate(row) if v < 0]
        if negative:
            _, p, b = min(negative)
            supports[p] = tuple(s for s in supports[p] if s != b)
            log.append(f"  drop strategy {b} of player {p} (negative mass)")
            seed_rows = _renormalize(nr.rows)
            continue
        if not nr.converged:
            drop = _worst_support_strategy(game, nr.rows, supports, epsilon)
            if drop is None:
                log.append("  newton did not reach the target residual")
                break
            p, b = drop
            supports[p] = tuple(s for s in supports[p] if s != b)
            log.append(f"  drop strategy {b} of player {p} (no indifference; worst in support)")
            rows = [list(r) for r in nr.rows]
            rows[p][b] = Fraction(0)
            seed_rows = _renormalize(rows)
            continue
        profile = MixedProfile(tuple(tuple(r) for r in nr.rows))
        cert = verify_equilibrium(game, profile, epsilon, WELL_SUPPORTED)
        if cert.accepted:
            return RefineResult(profile, cert, tuple(supports), nr.residual, attempt, log)
        added = False
        for w in cert.witnesses:
            ok = allowed is None or w.better in allowed[w.player]
            if ok and w.better not in supports[w.player]:
                S = supports[w.player]
                supports[w.player] = (w.better,) + S
                log.append(f"  add strategy {w.better} to player {w.player}")
                added = True
                break
        if not added:
            break
        seed_rows = [list(r) for r in nr.rows]
    return RefineResult(profile, cert, tuple(supports), best_res or Fraction(0), attempt, log)


def _worst_support_strategy(game, rows, supports, epsilon):
    """The (player, strategy) in a multi-strategy support trailing its best by the most, if > epsilon."""
    worst = None
    for p, S in enumerate(supports):
        if len(S) < 2:
            continue
        dist = histogram_dp((rows[q] for q in range(game.n) if q != p), game.alpha)
        u = payoffs_against(game, p, dist)
        best = max(u[b] for b in S)
        b = min(S, key=lambda c: u[c])
        if best - u[b] > epsilon and (worst is None or best - u[b] > worst[0]):
            worst = (best - u[b], p, b)
    return None if worst is None else worst[1:]


def _renormalize(rows):
    out = []
    for row in rows:
        clipped = [max(v, Fraction(0)) for v in row]
        s = sum(clipped)
        out.append([v / s for v in clipped] if s else clipped)
    return out


def _log2(v: Fraction) -> str:
    if v == 0:
        return "-inf"
    return str(int(math.floor(math.log2(v.numerator) - math.log2(v.denominator))))


def search_near_radix(game: AnonymousGame, n: int, N: int, epsilon, max_attempts: int = 8
                      ) -> RefineResult:
    """Find an epsilon-WSNE of a game close to the generalized radix game ``G*_{n,N}``.

    Seeds from the canonical equilibrium and tries the main-player supports
    ``(s1, t)``, ``(s2, t)`` and ``(s1, s2, t)`` in turn; the first verified
    result is returned, otherwise the last failure.
    """
    from .radix import GENERALIZED_ROSTER as R, interested_strategies, radix_profile

    allowed = interested_strategies(n, generalized=True)
    tail = [(R.q1, R.q2), (R.r1, R.r2)]
    xs = [Fraction(1, N) ** i for i in range(1, n + 1)]
    kappa = Fraction(1, N) ** (n * (n + 1) // 2)

    def seed(share):
        return radix_profile(n, xs, Fraction(1, 2), kappa, generalized=True, split=[share] * n)

    plans = [
        (seed(Fraction(1)), [(R.s1, R.t)] * n),
        (seed(Fraction(0)), [(R.s2, R.t)] * n),
        (seed(Fraction(1, 2)), [(R.s1, R.s2, R.t)] * n),
    ]
    result = None
    for seed, main in plans:
        result = refine_wsne(game, seed, main + tail, epsilon, allowed=allowed, max_attempts=max_attempts)
        if result.success:
            return result
    return result
