"""The Nash improvement map F on mixed profiles, its residual, and a damped iteration."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .core import (
    APPROXIMATE,
    AnonymousGame,
    EquilibriumCertificate,
    GameError,
    MixedProfile,
    as_fraction,
    strategy_payoffs,
    verify_equilibrium,
)

CUBE_ROOT_SLACK = Fraction(1, 2 ** 32)


def _check_unit_payoffs(G: AnonymousGame):
    if G.min_payoff() < 0 or G.max_payoff() > 1:
        raise GameError("the Nash map needs payoffs in [0, 1]")


def nash_map(G: AnonymousGame, X: MixedProfile, _checked: bool = False) -> MixedProfile:
    if not _checked:
        _check_unit_payoffs(G)
    rows = []
    for i in range(G.n):
        u = strategy_payoffs(G, X, i)
        ui = sum((x * v for x, v in zip(X[i], u)), Fraction(0))
        gains = [max(Fraction(0), v - ui) for v in u]
        denom = 1 + sum(gains)
        rows.append(tuple((x + g) / denom for x, g in zip(X[i], gains)))
    return MixedProfile(tuple(rows))


def sup_distance(X: MixedProfile, Y: MixedProfile) -> Fraction:
    return max(abs(a - b) for ra, rb in zip(X.x, Y.x) for a, b in zip(ra, rb))


def cube_root_upper(v, slack: Fraction = CUBE_ROOT_SLACK) -> Fraction:
    """Rational ``c >= v^(1/3)`` with ``c - v^(1/3) <= slack * c`` via bisection."""
    v = as_fraction(v)
    if v < 0:
        raise GameError("cube root of a negative value")
    if v == 0:
        return Fraction(0)
    hi = max(Fraction(1), v)
    while (hi / 2) ** 3 >= v:
        hi /= 2
    lo = hi / 2
    while hi - lo > slack * hi:
        mid = (lo + hi) / 2
        if mid ** 3 >= v:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class FixedPointReport:
    profile: MixedProfile
    residual: Fraction
    implied_ne_epsilon: Fraction
    iterations: int
    certificate: Optional[EquilibriumCertificate] = None

    @property
    def implied_epsilon_verified(self) -> bool:
        return self.certificate is None or self.certificate.accepted


def residual_report(G: AnonymousGame, X: MixedProfile, iterations: int = 0, cross_check: bool = True
                    ) -> FixedPointReport:
    """``||F(X) - X||_inf`` and the implied approximate-equilibrium epsilon ``alpha^2 * residual^(1/3)``.

    With ``cross_check`` the verifier is run at the implied epsilon.
    """
    _check_unit_payoffs(G)
    FX = nash_map(G, X, _checked=True)
    res = sup_distance(FX, X)
    implied = G.alpha ** 2 * cube_root_upper(res)
    cert = verify_equilibrium(G, X, implied, APPROXIMATE) if cross_check else None
    return FixedPointReport(X, res, implied, iterations, cert)


def lipschitz_probe(G: AnonymousGame, X: MixedProfile, Y: MixedProfile) -> Fraction:
    d = sup_distance(X, Y)
    if d == 0:
        raise GameError("lipschitz probe needs X != Y")
    _check_unit_payoffs(G)
    return sup_distance(nash_map(G, X, True), nash_map(G, Y, True)) / d


def lipschitz_bound(n: int, alpha: int) -> int:
    return 10 * n * alpha ** (n + 2)


def _coarsen(row, bits: int):
    """Round entries down to multiples of ``2^-bits``; the largest entry absorbs the remainder."""
    scale = 1 << bits
    out = [Fraction(math.floor(v * scale), scale) for v in row]
    top = max(range(len(row)), key=lambda b: row[b])
    out[top] += 1 - sum(out)
    return tuple(out)


def iterate_to_fixed_point(G: AnonymousGame, target_residual, max_iters: int = 200,
                           damping=Fraction(1, 2), max_bits: int = 256, start: MixedProfile = None
                           ) -> FixedPointReport:
    """Damped iteration ``X <- (1 - d) X + d F(X)`` from the uniform profile.

    Returns the best-residual profile seen.  When denominators exceed ``max_bits``
    the iterate is coarsened to the ``2^-max_bits`` grid (staying on the simplex).
    """
    _check_unit_payoffs(G)
    target_residual = as_fraction(target_residual)
    damping = as_fraction(damping)
    if not 0 < damping <= 1:
        raise GameError("damping must lie in (0, 1]")
    X = start or MixedProfile.uniform(G.n, G.alpha)
    best: Optional[FixedPointReport] = None
    for it in range(max_iters + 1):
        FX = nash_map(G, X, True)
        res = sup_distance(FX, X)
        if best is None or res < best.residual:
            best = FixedPointReport(X, res, G.alpha ** 2 * cube_root_upper(res), it)
        if res <= target_residual or it == max_iters:
            break
        rows: List[tuple] = []
        for rx, rf in zip(X.x, FX.x):
            row = tuple((1 - damping) * a + damping * b for a, b in zip(rx, rf))
            if any(v.denominator.bit_length() > max_bits for v in row):
                row = _coarsen(row, max_bits)
            rows.append(row)
        X = MixedProfile(tuple(rows))
    cert = verify_equilibrium(G, best.profile, best.implied_ne_epsilon, APPROXIMATE)
    return FixedPointReport(best.profile, best.residual, best.implied_ne_epsilon, best.iterations, cert)
