"""Canonical JSON wire formats; every number is an exact ``"p/q"`` string."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict

from .core import AnonymousGame, EquilibriumCertificate, GameError, MixedProfile
from .estimation import CoeffVector
from .polymatrix import PolyProfile, PolymatrixGame


class FormatError(GameError):
    pass


def fmt(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError(f"expected a rational string, got {s!r}")
    try:
        if isinstance(s, int):
            return Fraction(s)
        text = s.strip()
        if "/" in text:
            num, den = text.split("/")
            num, den = int(num), int(den)
            if den == 0:
                raise ZeroDivisionError
            return Fraction(num, den)
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"malformed rational {s!r}") from None


def game_to_json(G: AnonymousGame) -> Dict[str, Any]:
    return {
        "n": G.n,
        "alpha": G.alpha,
        "payoff_bounds": [fmt(G.payoff_bounds[0]), fmt(G.payoff_bounds[1])],
        "payoffs": [[[fmt(v) for v in row] for row in player] for player in G.payoffs],
    }


def _require(obj, key, kind):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing field {key!r}")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise FormatError(f"field {key!r} must be an integer")
    if kind is list and not isinstance(val, list):
        raise FormatError(f"field {key!r} must be a list")
    return val


def game_from_json(obj) -> AnonymousGame:
    n = _require(obj, "n", int)
    alpha = _require(obj, "alpha", int)
    bounds = _require(obj, "payoff_bounds", list)
    payoffs = _require(obj, "payoffs", list)
    if len(bounds) != 2:
        raise FormatError("payoff_bounds must have two entries")
    try:
        table = [[[parse_rational(v) for v in row] for row in player] for player in payoffs]
    except TypeError:
        raise FormatError("payoffs must be a [player][strategy][histogram] nested list") from None
    return AnonymousGame(n, alpha, table, tuple(parse_rational(b) for b in bounds))


def profile_to_json(X: MixedProfile) -> Dict[str, Any]:
    return {"x": [[fmt(v) for v in row] for row in X.x]}


def profile_from_json(obj) -> MixedProfile:
    rows = _require(obj, "x", list)
    try:
        return MixedProfile(tuple(tuple(parse_rational(v) for v in row) for row in rows))
    except TypeError:
        raise FormatError("x must be a [player][strategy] nested list") from None


def polymatrix_to_json(A: PolymatrixGame) -> Dict[str, Any]:
    return {"n": A.n, "A": [[fmt(v) for v in row] for row in A.A]}


def polymatrix_from_json(obj) -> PolymatrixGame:
    n = _require(obj, "n", int)
    rows = _require(obj, "A", list)
    try:
        return PolymatrixGame(n, tuple(tuple(parse_rational(v) for v in row) for row in rows))
    except TypeError:
        raise FormatError("A must be a nested list") from None


def poly_profile_to_json(y: PolyProfile) -> Dict[str, Any]:
    return {"y": [fmt(v) for v in y.y]}


def poly_profile_from_json(obj) -> PolyProfile:
    return PolyProfile(tuple(parse_rational(v) for v in _require(obj, "y", list)))


def coeffs_to_json(c: CoeffVector) -> Dict[str, Any]:
    return {
        "owner": list(c.owner),
        "bound": fmt(c.bound),
        "entries": [{"k1": k1, "k2": k2, "value": fmt(v)} for (k1, k2), v in sorted(c.entries.items())],
    }


def certificate_to_json(cert: EquilibriumCertificate) -> Dict[str, Any]:
    return {
        "verdict": cert.verdict,
        "mode": cert.mode,
        "epsilon": fmt(cert.epsilon),
        "player_gaps": [fmt(g) for g in cert.player_gaps],
        "witnesses": [
            {"player": w.player, "played": w.played, "better": w.better, "gap": fmt(w.gap)}
            for w in cert.witnesses
        ],
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False)


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON in {path}: {exc}") from None
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
