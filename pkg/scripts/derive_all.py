"""Solve the quadratic multiplicativity Ansatz for every group and tabulate the result."""
import argparse
from dataclasses import dataclass

from plgroups.algebra import GROUP_IDS
from plgroups.derive import derive_group


@dataclass
class DeriveConfig:
    seed: int = 0
    rho: float = 0.5
    mu: float = 1.0


def parse_args() -> DeriveConfig:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=1.0)
    a = p.parse_args()
    return DeriveConfig(a.seed, a.rho, a.mu)


def fmt(x):
    return "-" if x is None else f"{x:.1e}"


def main() -> int:
    cfg = parse_args()
    print(f"{'group':<6} {'monomials':>9} {'nullspace':>9} {'jacobi':>6} {'constraints':>11} {'angle':>8}")
    for gid in GROUP_IDS:
        rep = derive_group(gid, seed_value=cfg.seed, rho=cfg.rho, mu=cfg.mu)
        print(f"{gid:<6} {rep.n_monomials:>9} {rep.nullspace_dimension:>9} {str(rep.jacobi_dimension):>6} "
              f"{rep.jacobi.n_quadratic_constraints:>11} {rep.stability_angle:>8.1e}")
        for m in rep.families:
            where = "inside" if m.in_ansatz else "outside"
            print(f"    {m.family:<8} {where:<7} fit {fmt(m.fit_residual)}  projection {fmt(m.projection_residual)}"
                  f"  jacobi {fmt(m.jacobi_residual)}" + (f"  ({m.note})" if m.note else ""))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
