"""Compile random polymatrix games, search G_A for a WSNE, decode, and check the decoded profile."""
import argparse
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from anongames.polymatrix import verify_poly_wsne
from anongames.reduction import compile_polymatrix, decode, random_polymatrix, search_wsne_GA


@dataclass(frozen=True)
class RoundtripConfig:
    n: int = 2
    instances: int = 20
    seed: int = 0


def run(cfg: RoundtripConfig) -> int:
    rng = random.Random(cfg.seed)
    sound = 0
    for i in range(cfg.instances):
        A = random_polymatrix(cfg.n, rng)
        t = time.perf_counter()
        bundle = compile_polymatrix(A)
        rep = search_wsne_GA(bundle)
        dt = time.perf_counter() - t
        if not rep.success:
            print(f"instance {i}: search failed ({rep.message}); gaps={[float(g) for g in rep.residuals]}")
            continue
        ok = verify_poly_wsne(A, decode(rep.profile, bundle.params), Fraction(1, cfg.n)).accepted
        sound += ok
        print(f"instance {i}: verified in {dt:.2f}s, decoded profile {'sound' if ok else 'UNSOUND'}")
    print(f"{sound}/{cfg.instances} decoded profiles are (1/n)-WSNE of A")
    return sound


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(RoundtripConfig()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    run(RoundtripConfig(**vars(ap.parse_args())))
