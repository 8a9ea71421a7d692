"""Perturb generalized radix games, search for WSNE, and report the scaling slack of each result."""
import argparse
import random
from dataclasses import dataclass
from fractions import Fraction

from anongames.radix import (
    RadixParams,
    build_generalized_radix,
    check_scaling,
    perturb_game,
    plays_only_interested,
    tau,
)
from anongames.search import search_near_radix


@dataclass(frozen=True)
class ScalingConfig:
    max_n: int = 3
    seeds: int = 3
    noise_denominator: int = 256  # xi = epsilon = kappa / noise_denominator


def run(cfg: ScalingConfig):
    for n in range(1, cfg.max_n + 1):
        for N in (2, 4, 8):
            p = RadixParams(n, N)
            xi = p.kappa / cfg.noise_denominator
            tv = tau(xi, xi, p.kappa)
            for seed in range(cfg.seeds):
                G = perturb_game(build_generalized_radix(n, N), xi, random.Random(seed))
                res = search_near_radix(G, n, N, xi)
                if not res.success:
                    print(f"n={n} N={N} seed={seed}: no WSNE found")
                    continue
                rep = check_scaling(res.profile, p, tv)
                worst = max(s / a for s, a in zip(rep.slacks, rep.allowed))
                print(f"n={n} N={N} seed={seed}: tau={float(tv):.3f} scaling={'ok' if rep.holds else 'VIOLATED'} "
                      f"max slack/allowed={float(worst):.3g} interested={plays_only_interested(res.profile, n)}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(ScalingConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    run(ScalingConfig(**vars(ap.parse_args())))
