#!/usr/bin/env python3
"""Random-sample check of the theta addition formula and the rank-one
duality matrix, reporting the worst residual radius."""

from __future__ import annotations

import argparse
import random
from dataclasses import dataclass
from fractions import Fraction

from verlinde_cert.theta import addition_residual, duality_matrix_rk1, duality_residual


@dataclass
class ThetaConfig:
    samples: int = 50
    seed: int = 1
    prec: int = 128
    min_im_tau: float = 0.5
    max_im_tau: float = 2.0


def _q(rng: random.Random, lo: float, hi: float, denom: int = 4096) -> Fraction:
    return Fraction(rng.randint(int(lo * denom), int(hi * denom)), denom)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=ThetaConfig.samples)
    ap.add_argument("--seed", type=int, default=ThetaConfig.seed)
    ap.add_argument("--prec", type=int, default=ThetaConfig.prec)
    ns = ap.parse_args()
    cfg = ThetaConfig(ns.samples, ns.seed, ns.prec)
    rng = random.Random(cfg.seed)

    contained, worst = 0, 0.0
    for _ in range(cfg.samples):
        tau = (_q(rng, -1, 1), _q(rng, cfg.min_im_tau, cfg.max_im_tau))
        z, w = (_q(rng, -1, 1), _q(rng, -0.5, 0.5)), (_q(rng, -1, 1), _q(rng, -0.5, 0.5))
        res = addition_residual(tau, z, w, cfg.prec)
        contained += res.contains_zero()
        worst = max(worst, float(res.max_rad()))
    print(f"addition formula: {contained}/{cfg.samples} residuals contain 0, worst radius {worst:.3e}")

    for tau in ("i", "2i", "1+2i", "0.5+0.8i"):
        m = duality_matrix_rk1(tau, cfg.prec)
        off = max(float(m[0][1].max_rad()), float(m[1][0].max_rad()))
        check = duality_residual(m, tau, "0.17+0.03i", "-0.29-0.04i", cfg.prec)
        print(
            f"tau={tau:>9}: diagonal={m[0][1].contains_zero() and m[1][0].contains_zero()}"
            f" equal={m[0][0].overlaps(m[1][1])} M00~{complex(m[0][0]):.15g}"
            f" off-diagonal radius {off:.2e} fresh residual contains 0: {check.contains_zero()}"
        )


if __name__ == "__main__":
    main()
