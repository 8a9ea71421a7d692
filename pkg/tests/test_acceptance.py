"""Acceptance criteria, one check per criterion.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
Every tolerance used below is pinned in the constants block.
"""
import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anongames.core import (  # noqa: E402
    APPROXIMATE,
    WELL_SUPPORTED,
    AnonymousGame,
    MixedProfile,
    seen_distribution,
    strategy_payoffs,
    verify_equilibrium,
)
from anongames.estimation import (  # noqa: E402
    EstimationContext,
    alternating_form,
    coefficient_bound_report,
    measure_error_constant,
    poly_P,
    subset_expansion,
    telescoped_P1,
)
from anongames.nashmap import lipschitz_bound, lipschitz_probe, residual_report  # noqa: E402
from anongames.polymatrix import verify_poly_wsne  # noqa: E402
from anongames.radix import (  # noqa: E402
    RadixParams,
    build_generalized_radix,
    build_radix,
    canonical_radix_ne,
    check_scaling,
    closeness_distance,
    perturb_game,
    plays_only_interested,
    tau,
)
from anongames.reduction import (  # noqa: E402
    approx_precondition,
    approx_to_wsne,
    compile_polymatrix,
    decode,
    measure_decomposition_constant,
    normalize,
    pad,
    pad_profile,
    random_polymatrix,
    search_wsne_GA,
)
from anongames.search import search_near_radix  # noqa: E402
from oracles import brute_seen, random_game, random_profile, random_row  # noqa: E402

# pinned tolerances and sample sizes
RADIX_SECONDS = 1.0
DP_PROFILES = 100
DP_SECONDS = 30.0
SCALING_SEEDS = 3
SCALING_XI_OVER_KAPPA = F(1, 256)
IDENTITY_PROFILES = 50
ESTIMATION_PROFILES = 200
CALIBRATION_FACTOR = 2
DECOMP_PROFILES = 50
DECODE_INSTANCES = 20
CONVERSION_TRIALS = 100
FIXED_POINT_PROBES = 500
LIPSCHITZ_PROBES = 1000
EQUIVALENCE_TRIPLES = 50

RESULTS = {}


def _record(num, title, passed, detail):
    RESULTS[num] = (title, passed, detail)
    return passed, detail


def check_01_radix_equilibrium():
    worst, bad = 0.0, []
    for n in (1, 2, 3):
        for N in (2, 4, 8):
            t = time.perf_counter()
            ok = verify_equilibrium(build_radix(n, N), canonical_radix_ne(n, N), 0, WELL_SUPPORTED).accepted
            dt = time.perf_counter() - t
            worst = max(worst, dt)
            if not ok or dt >= RADIX_SECONDS:
                bad.append((n, N))
    return _record(1, "radix canonical profile is an exact 0-WSNE", not bad,
                   f"9 instances, failures={bad}, slowest={worst:.3f}s")


def check_02_dp_oracle():
    rng = random.Random(2)
    t = time.perf_counter()
    cases = mismatches = 0
    for n in range(1, 5):
        for alpha in range(1, 5):
            for _ in range(DP_PROFILES):
                X = random_profile(rng, n, alpha)
                obs = rng.randrange(n)
                d = seen_distribution((n, alpha), X, obs)
                oracle = brute_seen(X.x, obs)
                cases += 1
                if any(p != oracle.get(h, 0) for h, p in zip(d.histograms, d.prob)):
                    mismatches += 1
    dt = time.perf_counter() - t
    return _record(2, "seen-distribution DP equals exhaustive enumeration", mismatches == 0 and dt < DP_SECONDS,
                   f"{cases} profiles over n<=4, alpha<=4, mismatches={mismatches}, {dt:.1f}s")


def check_03_scaling():
    accepted = violations = searched = 0
    worst_ratio = F(0)
    for n in (1, 2, 3):
        for N in (2, 4, 8):
            p = RadixParams(n, N)
            xi = eps = p.kappa * SCALING_XI_OVER_KAPPA
            tv = tau(xi, eps, p.kappa)
            assert tv <= F(1, 2)
            base = build_generalized_radix(n, N)
            for seed in range(SCALING_SEEDS):
                G = perturb_game(base, xi, random.Random(1000 * n + 10 * N + seed))
                assert closeness_distance(G, base) <= xi
                searched += 1
                res = search_near_radix(G, n, N, eps)
                if not res.success:
                    continue
                accepted += 1
                rep = check_scaling(res.profile, p, tv)
                worst_ratio = max(worst_ratio, max(s / a for s, a in zip(rep.slacks, rep.allowed)))
                if not rep.holds or not plays_only_interested(res.profile, n):
                    violations += 1
    return _record(3, "scaling property and interested strategies on accepted WSNE", accepted > 0 and violations == 0,
                   f"{accepted}/{searched} searches accepted, violations={violations}, "
                   f"max slack/(tau delta^i)={float(worst_ratio):.3g}")


def check_04_identities():
    rng = random.Random(4)
    checks = failures = 0
    for m in range(1, 5):
        ctx = EstimationContext(m + 1, 4, ell=m + 1, r=m)
        for _ in range(IDENTITY_PROFILES):
            rows = [random_row(rng, 7, denom=64, support=(0, 1, 2)) for _ in range(m + 1)]
            for j in range(m + 1):
                checks += 1
                failures += subset_expansion(j, ctx, rows) != alternating_form(j, ctx, rows)
            checks += 1
            failures += telescoped_P1(ctx, rows) != poly_P(1, ctx, rows)
    return _record(4, "alternating-binomial and telescoping identities hold exactly", failures == 0,
                   f"{checks} exact equalities over m<=4, failures={failures}")


def check_05_estimation():
    details, ok = [], True
    for n in (3, 4):
        calib = measure_error_constant(n, ESTIMATION_PROFILES, seed=500 + n)
        test = measure_error_constant(n, ESTIMATION_PROFILES, seed=900 + n)
        worst = max(float(test[k].constant / calib[k].constant) if calib[k].constant else
                    (0.0 if test[k].constant == 0 else float("inf")) for k in calib)
        bound = coefficient_bound_report(n)
        ok = ok and worst <= CALIBRATION_FACTOR and bound["within_bound"]
        details.append(f"n={n}: max test/calibration={worst:.3f}, max|coef|={float(bound['max_abs']):.3g}"
                       f" <= N^(n^2)={float(bound['bound']):.3g}")
    return _record(5, "estimation error within 2x calibrated constant; coefficients bounded", ok, "; ".join(details))


def check_06_decomposition():
    details, ok = [], True
    for n in (2, 3):
        A = random_polymatrix(n, random.Random(60 + n))
        calib = measure_decomposition_constant(n, DECOMP_PROFILES, seed=600 + n, A=A)
        test = measure_decomposition_constant(n, DECOMP_PROFILES, seed=700 + n, A=A)
        ok = ok and test <= CALIBRATION_FACTOR * calib
        details.append(f"n={n}: calibration={float(calib):.3g}, test={float(test):.3g} (units n^3 xi* delta)")
    return _record(6, "payoff decomposition residual within 2x calibrated constant", ok, "; ".join(details))


def check_07_decoding():
    rng = random.Random(7)
    successes = sound = 0
    failures = []
    for i in range(DECODE_INSTANCES):
        A = random_polymatrix(2, rng)
        bundle = compile_polymatrix(A)
        rep = search_wsne_GA(bundle)
        if not rep.success:
            failures.append((i, [float(r) for r in rep.residuals], rep.message))
            continue
        assert verify_equilibrium(bundle.G_A, rep.profile, bundle.params.epsilon, WELL_SUPPORTED).accepted
        successes += 1
        sound += verify_poly_wsne(A, decode(rep.profile, bundle.params), F(1, 2)).accepted
    for f in failures:
        print(f"  criterion 7 search failure: instance={f[0]} residuals={f[1]} message={f[2]}")
    return _record(7, "decoded WSNE of G_A is a (1/n)-WSNE of A", successes > 0 and sound == successes,
                   f"{successes}/{DECODE_INSTANCES} searches verified, {sound} decoded sound, "
                   f"{len(failures)} failures logged")


def planted_game(rng, n, alpha):
    """Random [0, 1] game with a known exact equilibrium X (support rows shifted to payoff 1/2)."""
    X = MixedProfile(tuple(
        random_row(rng, alpha, denom=6, support=sorted(rng.sample(range(alpha), rng.randint(1, alpha))))
        for _ in range(n)))
    G = random_game(rng, n, alpha, hi=F(1, 2))
    table = [[list(row) for row in player] for player in G.payoffs]
    for p in range(n):
        u = strategy_payoffs(G, X, p)
        for b in range(alpha):
            if X[p][b] > 0:
                table[p][b] = [v + F(1, 2) - u[b] for v in table[p][b]]
    return AnonymousGame(n, alpha, table, (0, 1)), X


def check_08_conversion():
    rng = random.Random(8)
    trials = passed = 0
    while trials < CONVERSION_TRIALS:
        n, alpha = rng.randint(1, 4), rng.randint(2, 4)
        G, X = planted_game(rng, n, alpha)
        assert verify_equilibrium(G, X, 0, WELL_SUPPORTED).accepted
        eps = F(1, rng.choice([2, 4, 8, 16]))
        U = random_profile(rng, n, alpha)
        theta = F(1, 4)
        while True:
            Xp = MixedProfile(tuple(tuple((1 - theta) * a + theta * b for a, b in zip(r, s))
                                    for r, s in zip(X.x, U.x)))
            if approx_precondition(G, Xp, eps).accepted:
                break
            theta /= 2
        trials += 1
        passed += verify_equilibrium(G, approx_to_wsne(G, Xp, eps), eps, WELL_SUPPORTED).accepted
    return _record(8, "approximate-to-well-supported conversion output verifies", passed == trials,
                   f"{passed}/{trials} outputs accepted as eps-WSNE")


def check_09_nash_map():
    rng = random.Random(9)
    fp_ok = fp = 0
    while fp < FIXED_POINT_PROBES:
        n, alpha = rng.randint(1, 3), rng.randint(2, 4)
        if fp % 2:
            G = random_game(rng, n, alpha)
            X = random_profile(rng, n, alpha)
        else:
            G, X0 = planted_game(rng, n, alpha)
            theta = F(1, 2 ** rng.randint(2, 12))
            U = random_profile(rng, n, alpha)
            X = MixedProfile(tuple(tuple((1 - theta) * a + theta * b for a, b in zip(r, s))
                                   for r, s in zip(X0.x, U.x)))
        rep = residual_report(G, X, cross_check=False)
        fp += 1
        fp_ok += verify_equilibrium(G, X, rep.implied_ne_epsilon, APPROXIMATE).accepted
    lip_ok = lip = 0
    worst = 0.0
    while lip < LIPSCHITZ_PROBES:
        n, alpha = rng.randint(1, 3), rng.randint(2, 7)
        G = random_game(rng, n, alpha)
        X = random_profile(rng, n, alpha)
        if lip % 2:
            Y = random_profile(rng, n, alpha)
        else:
            h = F(1, 2 ** rng.randint(4, 20))
            Y = MixedProfile(tuple(tuple((1 - h) * a + h * b for a, b in zip(r, s))
                                   for r, s in zip(X.x, random_profile(rng, n, alpha).x)))
        if X == Y:
            continue
        ratio = lipschitz_probe(G, X, Y)
        bound = lipschitz_bound(n, alpha)
        worst = max(worst, float(ratio) / bound)
        lip += 1
        lip_ok += ratio <= bound
    return _record(9, "fixed-point residual implies approximate NE; Lipschitz bound holds",
                   fp_ok == fp and lip_ok == lip,
                   f"{fp_ok}/{fp} implied-epsilon probes accepted, {lip_ok}/{lip} Lipschitz probes within "
                   f"10 n alpha^(n+2) (max ratio/bound={worst:.3g})")


def check_10_equivalences():
    rng = random.Random(10)
    norm_match = pad_match = filler_rej = 0
    for _ in range(EQUIVALENCE_TRIPLES):
        n, alpha = rng.randint(1, 3), rng.randint(2, 3)
        a, b = F(rng.randint(-4, 0)), F(rng.randint(1, 4))
        G, X = planted_game(rng, n, alpha) if rng.random() < 0.5 else (random_game(rng, n, alpha), None)
        G = AnonymousGame(n, alpha, [[[a + (b - a) * v for v in row] for row in pl] for pl in G.payoffs], (a, b))
        X = X or random_profile(rng, n, alpha)
        H, width = normalize(G, a, b)
        gap = verify_equilibrium(H, X, 0).max_gap()
        eps = rng.choice([gap, gap / 2, F(rng.randint(0, 8), 8)])
        norm_match += verify_equilibrium(G, X, width * eps).verdict == verify_equilibrium(H, X, eps).verdict
    for _ in range(EQUIVALENCE_TRIPLES):
        n, alpha = rng.randint(1, 3), rng.randint(2, 3)
        G, X = planted_game(rng, n, alpha) if rng.random() < 0.5 else (random_game(rng, n, alpha),
                                                                        random_profile(rng, n, alpha))
        t = rng.choice([F(3, 2), F(2), F(5, 2)])
        P = pad(G, t)
        gap = verify_equilibrium(G, X, 0).max_gap()
        eps = rng.choice([gap, gap / 2, F(rng.randint(0, 8), 8)])
        pad_match += verify_equilibrium(G, X, eps).verdict == verify_equilibrium(P, pad_profile(X, P.n), eps).verdict
        if P.n > n:
            mixed = [tuple(F(1, alpha) for _ in range(alpha))] * (P.n - n)
            filler_rej += not verify_equilibrium(P, pad_profile(X, P.n, mixed), F(1, 2)).accepted
        else:
            filler_rej += 1
    total = EQUIVALENCE_TRIPLES
    return _record(10, "normalization and padding preserve WSNE verdicts",
                   norm_match == total and pad_match == total and filler_rej == total,
                   f"normalization {norm_match}/{total}, padding {pad_match}/{total}, "
                   f"mixed fillers rejected {filler_rej}/{total}")


CHECKS = [check_01_radix_equilibrium, check_02_dp_oracle, check_03_scaling, check_04_identities,
          check_05_estimation, check_06_decomposition, check_07_decoding, check_08_conversion,
          check_09_nash_map, check_10_equivalences]


@pytest.mark.parametrize("check", CHECKS, ids=lambda c: c.__name__[len("check_"):])
def test_acceptance(check):
    passed, detail = check()
    assert passed, detail


def summary_lines():
    lines = []
    for num in sorted(RESULTS):
        title, passed, detail = RESULTS[num]
        lines.append(f"[{'PASS' if passed else 'FAIL'}] criterion {num:2d}: {title} -- {detail}")
    return lines


if __name__ == "__main__":
    for check in CHECKS:
        try:
            check()
        except Exception as exc:  # a crashing check is a failing check
            num = int(check.__name__.split("_")[1])
            _record(num, check.__name__, False, f"raised {type(exc).__name__}: {exc}")
    print("\n".join(summary_lines()))
    sys.exit(0 if all(r[1] for r in RESULTS.values()) else 1)
