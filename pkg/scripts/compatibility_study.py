"""How the classical-level Laplacian check separates compatible from incompatible data.

Compatible: the buoyant-cell preset. Incompatible: the same boundary data with
a ``sin(pi x) sin(pi y)`` bump, whose Laplacian does not vanish on the wall.
"""

import argparse
from dataclasses import replace

import numpy as np

from nlboussinesq.coupled import check_compatibility
from nlboussinesq.mesh import Mesh, sample
from nlboussinesq.nonlocal_ops import NonlocalParams
from nlboussinesq.scenarios import compatible_shift, scenario


def laplacian_row(bundle, params):
    rep = check_compatibility(bundle, 3, params)
    return next(c for c in rep["checks"] if c["name"] == "laplacian_theta0")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nx", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--lam", type=float, default=1.0)
    args = ap.parse_args()
    params = NonlocalParams(lam=args.lam, kappa=1.0, mu=1.0)

    print(f"{'nx':>4} {'compatible':>12} {'incompatible':>12} {'tolerance':>12}")
    for nx in args.nx:
        m = Mesh(nx)
        good = scenario("buoyant-cell", m, args.lam)
        bump = sample(m, lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
        bad = replace(good, theta_0=compatible_shift(good.theta_B, bump, args.lam))
        g, b = laplacian_row(good, params), laplacian_row(bad, params)
        print(f"{nx:4d} {g['residual']:12.3e} {b['residual']:12.3e} {g['tolerance']:12.3e}  "
              f"({g['status']}/{b['status']})")


if __name__ == "__main__":
    main()
