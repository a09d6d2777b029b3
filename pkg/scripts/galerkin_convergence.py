"""Final-time differences between Galerkin runs with growing mode counts (small data)."""

import argparse

from nlboussinesq.config import RunConfig
from nlboussinesq.coupled import galerkin_convergence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nx", type=int, default=32)
    ap.add_argument("--N", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--amplitude", type=float, default=0.01)
    ap.add_argument("--T_B", type=float, default=0.0)
    ap.add_argument("--T", type=float, default=0.5)
    args = ap.parse_args()

    cfg = RunConfig().with_(
        mesh={"nx": args.nx},
        scenario={"id": "buoyant-cell", "amplitude": args.amplitude, "T_B": args.T_B},
        time={"dt": 2e-3, "T_end": args.T, "output_every": 50},
    )
    rep = galerkin_convergence(cfg, args.N)
    print(f"{'N pair':>10} {'|dv|':>12} {'|dTheta|':>12}")
    for a, b, dv, dth in zip(rep["N"], rep["N"][1:], rep["velocity_differences"], rep["theta_differences"]):
        print(f"{a:>4}->{b:<5} {dv:12.4e} {dth:12.4e}")
    print("velocity ratios:", ", ".join(f"{r:.2f}" for r in rep["velocity_ratios"]))
    print("theta ratios:   ", ", ".join(f"{r:.2f}" for r in rep["theta_ratios"]))


if __name__ == "__main__":
    main()
