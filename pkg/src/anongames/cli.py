"""Command-line entry point.

Exit codes: 0 on success or verifier accept, 2 on verifier reject (witness JSON
on stdout), 1 on usage, format, shape or parameter errors.
"""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import io
from .core import (
    APPROXIMATE,
    WELL_SUPPORTED,
    AnonymousGame,
    GameError,
    MixedProfile,
    seen_distribution,
    seen_distribution_brute_force,
    verify_equilibrium,
)
from .estimation import EstimationContext, build_coeffs, coefficient_bound_report, measure_error_constant
from .nashmap import iterate_to_fixed_point, residual_report
from .radix import build_generalized_radix, build_radix, canonical_radix_ne, infer_radix_params
from .reduction import (
    ReductionParams,
    approx_precondition,
    approx_to_wsne,
    compile_polymatrix,
    decode,
    pad,
    pad_profile,
)

EXIT_OK, EXIT_ERROR, EXIT_REJECT = 0, 1, 2

MODE_ALIASES = {
    "wsne": WELL_SUPPORTED, WELL_SUPPORTED: WELL_SUPPORTED,
    "approx": APPROXIMATE, APPROXIMATE: APPROXIMATE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj):
    print(io.dumps(obj))


def _load_game(path) -> AnonymousGame:
    return io.game_from_json(io.read_json(path))


def _load_profile(source, game: AnonymousGame) -> MixedProfile:
    if source == "canonical":
        params = infer_radix_params(game)
        return canonical_radix_ne(params.n, params.N, generalized=game.alpha == 7)
    X = io.profile_from_json(io.read_json(source))
    if X.n != game.n or X.alpha != game.alpha:
        raise GameError(f"profile shape {(X.n, X.alpha)} does not match game shape {(game.n, game.alpha)}")
    return X


def cmd_gen(args, generalized: bool):
    G = build_generalized_radix(args.n, args.N) if generalized else build_radix(args.n, args.N)
    io.write_json(args.out, io.game_to_json(G))
    if args.profile_out:
        io.write_json(args.profile_out, io.profile_to_json(canonical_radix_ne(args.n, args.N, generalized)))
    return EXIT_OK


def cmd_compile(args):
    A = io.polymatrix_from_json(io.read_json(args.A))
    if args.n is not None and args.n != A.n:
        raise GameError(f"shape mismatch: --n {args.n} but A describes {A.n} players")
    bundle = compile_polymatrix(A)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "A.json", io.polymatrix_to_json(A))
    io.write_json(out / "GA.json", io.game_to_json(bundle.G_A))
    io.write_json(out / "GA_norm.json", io.game_to_json(bundle.G_A_normalized))
    params = {k: (io.fmt(v) if isinstance(v, Fraction) else v) for k, v in bundle.params.as_dict().items()}
    params["normalization_factor"] = io.fmt(bundle.normalization_factor)
    io.write_json(out / "params.json", params)
    coeffs = []
    for (l, j), (B, C) in sorted(bundle.coeff_tables.items()):
        coeffs.append({"ell": l, "j": j, "B": io.coeffs_to_json(B), "C": io.coeffs_to_json(C)})
    io.write_json(out / "coeffs.json", {"coeffs": coeffs})
    _emit({"bundle": str(out), "n": A.n, "epsilon": io.fmt(bundle.params.epsilon)})
    return EXIT_OK


def cmd_verify(args):
    G = _load_game(args.game)
    X = _load_profile(args.profile, G)
    cert = verify_equilibrium(G, X, io.parse_rational(args.eps), MODE_ALIASES[args.mode])
    _emit(io.certificate_to_json(cert))
    return EXIT_OK if cert.accepted else EXIT_REJECT


def cmd_decode(args):
    X = io.profile_from_json(io.read_json(args.profile))
    if args.bundle:
        n = io.read_json(Path(args.bundle) / "params.json")["n"]
    elif args.n:
        n = args.n
    else:
        n = X.n - 2
    y = decode(X, ReductionParams(n))
    obj = io.poly_profile_to_json(y)
    if args.out:
        io.write_json(args.out, obj)
    _emit(obj)
    return EXIT_OK


def cmd_wsne_from_approx(args):
    G = _load_game(args.game)
    X = _load_profile(args.profile, G)
    eps = io.parse_rational(args.eps)
    pre = approx_precondition(G, X, eps)
    Y = approx_to_wsne(G, X, eps)
    cert = verify_equilibrium(G, Y, eps, WELL_SUPPORTED)
    if args.out:
        io.write_json(args.out, io.profile_to_json(Y))
    _emit({
        "precondition_certified": pre.accepted,
        "profile": io.profile_to_json(Y)["x"],
        "certificate": io.certificate_to_json(cert),
    })
    return EXIT_OK if cert.accepted else EXIT_REJECT


def cmd_pad(args):
    G = _load_game(args.game)
    P = pad(G, io.parse_rational(args.t))
    io.write_json(args.out, io.game_to_json(P))
    if args.profile:
        X = _load_profile(args.profile, G)
        XP = pad_profile(X, P.n)
        if args.profile_out:
            io.write_json(args.profile_out, io.profile_to_json(XP))
    _emit({"players": P.n, "alpha": P.alpha})
    return EXIT_OK


def cmd_estimate(args):
    N = args.N or 2 ** args.n
    B, C = build_coeffs(EstimationContext(args.n, N, args.l, args.r))
    _emit({"n": args.n, "N": N, "ell": args.l, "r": args.r,
           "B": io.coeffs_to_json(B), "C": io.coeffs_to_json(C)})
    return EXIT_OK


def cmd_calibrate(args):
    table = measure_error_constant(args.n, args.trials, args.seed)
    bound = coefficient_bound_report(args.n)
    if args.emit_latex_table:
        print(r"\begin{tabular}{ccrr}")
        print(r"$\ell$ & $r$ & $C_B$ & $C_C$ \\ \hline")
        for (l, r), c in sorted(table.items()):
            print(f"{l} & {r} & {float(c.max_b):.4g} & {float(c.max_c):.4g} \\\\")
        print(r"\end{tabular}")
        return EXIT_OK
    _emit({
        "n": args.n, "trials": args.trials, "seed": args.seed,
        "constants": [
            {"ell": l, "r": r, "max_b": io.fmt(c.max_b), "max_c": io.fmt(c.max_c),
             "max_b_float": float(c.max_b), "max_c_float": float(c.max_c)}
            for (l, r), c in sorted(table.items())
        ],
        "coefficients": {"max_abs": io.fmt(bound["max_abs"]), "bound": io.fmt(bound["bound"]),
                         "within_bound": bound["within_bound"],
                         "within_m_squared_bound": bound["within_m_squared_bound"]},
    })
    return EXIT_OK


def _report_json(rep):
    obj = {
        "residual": io.fmt(rep.residual),
        "implied_ne_epsilon": io.fmt(rep.implied_ne_epsilon),
        "iterations": rep.iterations,
        "profile": io.profile_to_json(rep.profile)["x"],
    }
    if rep.certificate is not None:
        obj["certificate"] = io.certificate_to_json(rep.certificate)
    return obj


def cmd_nashmap(args):
    G = _load_game(args.game)
    if args.iterate:
        rep = iterate_to_fixed_point(G, io.parse_rational(args.target), args.max_iters,
                                     io.parse_rational(args.damping))
    else:
        if not args.profile:
            raise UsageError("nashmap needs --profile or --iterate")
        rep = residual_report(G, _load_profile(args.profile, G))
    _emit(_report_json(rep))
    return EXIT_OK if rep.implied_epsilon_verified else EXIT_REJECT


def _random_profile(rng, n, alpha, denom=12):
    rows = []
    for _ in range(n):
        w = [rng.randint(0, denom) for _ in range(alpha)]
        if sum(w) == 0:
            w[rng.randrange(alpha)] = 1
        rows.append(tuple(Fraction(v, sum(w)) for v in w))
    return MixedProfile(tuple(rows))


def cmd_oracle_dp(args):
    if args.game:
        G = _load_game(args.game)
        X = _load_profile(args.profile, G)
        cases = [((G.n, G.alpha), X, args.observer)]
    else:
        rng = random.Random(args.seed)
        cases = [((args.n, args.alpha), _random_profile(rng, args.n, args.alpha), rng.randrange(args.n))
                 for _ in range(args.trials)]
    mismatches = 0
    for shape, X, obs in cases:
        if seen_distribution(shape, X, obs).prob != seen_distribution_brute_force(shape, X, obs).prob:
            mismatches += 1
    out = {"cases": len(cases), "mismatches": mismatches}
    if args.game:
        d = seen_distribution(cases[0][0], cases[0][1], cases[0][2])
        out["distribution"] = [{"histogram": list(h), "prob": io.fmt(p)} for h, p in zip(d.histograms, d.prob)]
    _emit(out)
    return EXIT_OK if mismatches == 0 else EXIT_REJECT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anongames", description="Exact anonymous-game toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("gen-radix", "gen-genradix"):
        s = sub.add_parser(name)
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--N", type=int, required=True)
        s.add_argument("--out", required=True)
        s.add_argument("--profile-out")

    s = sub.add_parser("compile")
    s.add_argument("--A", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--out", default="bundle")

    s = sub.add_parser("verify")
    s.add_argument("--game", required=True)
    s.add_argument("--profile", required=True, help="profile JSON or 'canonical'")
    s.add_argument("--eps", default="0")
    s.add_argument("--mode", choices=sorted(MODE_ALIASES), default="wsne")

    s = sub.add_parser("decode")
    s.add_argument("--profile", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--bundle")
    s.add_argument("--out")

    s = sub.add_parser("wsne-from-approx")
    s.add_argument("--game", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--out")

    s = sub.add_parser("pad")
    s.add_argument("--game", required=True)
    s.add_argument("--t", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--profile")
    s.add_argument("--profile-out")

    s = sub.add_parser("estimate")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--N", type=int)

    s = sub.add_parser("calibrate")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--emit-latex-table", action="store_true")

    s = sub.add_parser("nashmap")
    s.add_argument("--game", required=True)
    s.add_argument("--profile")
    s.add_argument("--iterate", action="store_true")
    s.add_argument("--target", default="1/1024")
    s.add_argument("--max-iters", type=int, default=200)
    s.add_argument("--damping", default="1/2")

    s = sub.add_parser("oracle-dp")
    s.add_argument("--game")
    s.add_argument("--profile")
    s.add_argument("--observer", type=int, default=0)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--alpha", type=int, default=3)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {
    "gen-radix": lambda a: cmd_gen(a, False),
    "gen-genradix": lambda a: cmd_gen(a, True),
    "compile": cmd_compile,
    "verify": cmd_verify,
    "decode": cmd_decode,
    "wsne-from-approx": cmd_wsne_from_approx,
    "pad": cmd_pad,
    "estimate": cmd_estimate,
    "calibrate": cmd_calibrate,
    "nashmap": cmd_nashmap,
    "oracle-dp": cmd_oracle_dp,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except io.FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
