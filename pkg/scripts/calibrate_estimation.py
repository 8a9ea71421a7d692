"""Calibrate the estimation error constant on one sample and check it on a disjoint one."""
import argparse
from dataclasses import dataclass

from anongames.estimation import coefficient_bound_report, measure_error_constant


@dataclass(frozen=True)
class CalibrationConfig:
    n: int = 3
    trials: int = 200
    calibration_seed: int = 0
    test_seed: int = 1
    factor: float = 2.0


def run(cfg: CalibrationConfig) -> bool:
    calib = measure_error_constant(cfg.n, cfg.trials, cfg.calibration_seed)
    test = measure_error_constant(cfg.n, cfg.trials, cfg.test_seed)
    ok = True
    print(f"{'ell':>3} {'r':>3} {'calibrated':>12} {'test':>12}")
    for key in sorted(calib):
        c, t = calib[key].constant, test[key].constant
        ok = ok and t <= cfg.factor * c
        print(f"{key[0]:>3} {key[1]:>3} {float(c):>12.5g} {float(t):>12.5g}")
    rep = coefficient_bound_report(cfg.n)
    print(f"max |coefficient| = {rep['max_abs']}  bound N^(n^2) = {rep['bound']}  "
          f"within m^2 bound: {rep['within_m_squared_bound']}")
    print("OK" if ok and rep["within_bound"] else "FAILED")
    return ok


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(CalibrationConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    run(CalibrationConfig(**vars(ap.parse_args())))
