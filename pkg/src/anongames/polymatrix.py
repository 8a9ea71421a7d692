"""Two-strategy polymatrix games encoded as a single ``2n x 2n`` matrix.

Player ``i`` (0-based) owns rows ``2i`` and ``2i + 1``; its mixed strategy is
``(y[2i], y[2i + 1])``.  The diagonal ``2 x 2`` blocks are zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .core import EquilibriumCertificate, GameError, WELL_SUPPORTED, Witness, as_fraction

MAX_SOLVER_PLAYERS = 4

# per-player support patterns, in enumeration order
FIRST, SECOND, BOTH = "first", "second", "both"
PATTERNS = (FIRST, SECOND, BOTH)


class NoSolutionFound(RuntimeError):
    pass


@dataclass(frozen=True)
class PolymatrixGame:
    n: int
    A: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        A = tuple(tuple(as_fraction(v) for v in row) for row in self.A)
        object.__setattr__(self, "A", A)
        size = 2 * self.n
        if self.n < 1 or len(A) != size or any(len(row) != size for row in A):
            raise GameError(f"A must be {size} x {size} for n = {self.n}")
        for k, row in enumerate(A):
            for l, v in enumerate(row):
                if not 0 <= v <= 1:
                    raise GameError(f"A[{k}][{l}] = {v} outside [0, 1]")
                if k // 2 == l // 2 and v != 0:
                    raise GameError(f"A[{k}][{l}] lies in a diagonal block and must be 0")

    @classmethod
    def zeros(cls, n: int) -> "PolymatrixGame":
        return cls(n, tuple((Fraction(0),) * (2 * n) for _ in range(2 * n)))


@dataclass(frozen=True)
class PolyProfile:
    y: Tuple[Fraction, ...]

    def __post_init__(self):
        y = tuple(as_fraction(v) for v in self.y)
        object.__setattr__(self, "y", y)
        if len(y) % 2 or not y:
            raise GameError("polymatrix profile must have even positive length")
        if any(v < 0 for v in y):
            raise GameError("polymatrix profile has a negative entry")
        for i in range(len(y) // 2):
            if y[2 * i] + y[2 * i + 1] != 1:
                raise GameError(f"player {i}'s probabilities do not sum to 1")

    @property
    def n(self) -> int:
        return len(self.y) // 2

    @classmethod
    def from_first(cls, first: Sequence) -> "PolyProfile":
        """Build from each player's probability on its first row."""
        y = []
        for v in first:
            v = as_fraction(v)
            y.extend([v, 1 - v])
        return cls(tuple(y))


def matching_pennies(n: int = 2) -> PolymatrixGame:
    """Player 0 is rewarded for matching player 1, player 1 for mismatching."""
    if n < 2:
        raise GameError("matching pennies needs two players")
    A = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    A[0][2] = A[1][3] = Fraction(1)
    A[2][1] = A[3][0] = Fraction(1)
    return PolymatrixGame(n, tuple(map(tuple, A)))


def poly_payoffs(game: PolymatrixGame, y: PolyProfile) -> List[Fraction]:
    if y.n != game.n:
        raise GameError(f"profile has {y.n} players, game has {game.n}")
    return [sum((a * v for a, v in zip(row, y.y)), Fraction(0)) for row in game.A]


def verify_poly_wsne(game: PolymatrixGame, y: PolyProfile, epsilon) -> EquilibriumCertificate:
    epsilon = as_fraction(epsilon)
    if epsilon < 0:
        raise GameError("epsilon must be nonnegative")
    u = poly_payoffs(game, y)
    witnesses = []
    gaps = []
    for i in range(game.n):
        a, b = 2 * i, 2 * i + 1
        gap = Fraction(0)
        if u[a] > u[b] + epsilon and y.y[b] != 0:
            witnesses.append(Witness(i, b, a, u[a] - u[b]))
        if u[b] > u[a] + epsilon and y.y[a] != 0:
            witnesses.append(Witness(i, a, b, u[b] - u[a]))
        if y.y[b] != 0:
            gap = max(gap, u[a] - u[b])
        if y.y[a] != 0:
            gap = max(gap, u[b] - u[a])
        gaps.append(gap)
    verdict = "reject" if witnesses else "accept"
    return EquilibriumCertificate(y, epsilon, WELL_SUPPORTED, verdict, tuple(witnesses), tuple(gaps))


def solve_linear(M: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Exact Gaussian elimination; returns a basic solution (free variables 0) or None if inconsistent."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    aug = [list(M[r]) + [rhs[r]] for r in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(all(v == 0 for v in aug[i][:cols]) and aug[i][cols] != 0 for i in range(rows)):
        return None
    sol = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][cols]
    return sol


def _solve_pattern(game: PolymatrixGame, pattern: Sequence[str]) -> Optional[PolyProfile]:
    first = [Fraction(1) if p == FIRST else Fraction(0) for p in pattern]
    mixed = [i for i, p in enumerate(pattern) if p == BOTH]
    if mixed:
        A = game.A
        # unknowns: first-row probability of each mixed player; indifference per mixed player
        M, rhs = [], []
        for i in mixed:
            diff = [A[2 * i][l] - A[2 * i + 1][l] for l in range(2 * game.n)]
            const = Fraction(0)
            for j in range(game.n):
                if j not in mixed:
                    const += diff[2 * j] * first[j] + diff[2 * j + 1] * (1 - first[j])
            row = []
            for j in mixed:
                const += diff[2 * j + 1]
                row.append(diff[2 * j] - diff[2 * j + 1])
            M.append(row)
            rhs.append(-const)
        sol = solve_linear(M, rhs)
        if sol is None:
            return None
        for i, v in zip(mixed, sol):
            if not 0 <= v <= 1:
                return None
            first[i] = v
    return PolyProfile.from_first(first)


def solve_poly_small(game: PolymatrixGame, epsilon=0) -> PolyProfile:
    """Support enumeration over the ``3 ** n`` patterns, lexicographic in (first, second, both).

    Returns the first candidate accepted by :func:`verify_poly_wsne` at ``epsilon``.
    """
    if game.n > MAX_SOLVER_PLAYERS:
        raise GameError(f"solve_poly_small supports n <= {MAX_SOLVER_PLAYERS}, got {game.n}")
    epsilon = as_fraction(epsilon)
    for pattern in itertools.product(PATTERNS, repeat=game.n):
        y = _solve_pattern(game, pattern)
        if y is not None and verify_poly_wsne(game, y, epsilon).accepted:
            return y
    raise NoSolutionFound("no-solution-found: support enumeration exhausted")
