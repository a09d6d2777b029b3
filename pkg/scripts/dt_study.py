"""Sup of the time difference quotient of the mean temperature under dt halving."""

import argparse
import json

from nlboussinesq.config import RunConfig
from nlboussinesq.coupled import dt_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nx", type=int, default=32)
    ap.add_argument("--dt", type=float, default=4e-3)
    ap.add_argument("--halvings", type=int, default=3)
    ap.add_argument("--T", type=float, default=2.0)
    ap.add_argument("--json", action="store_true", help="print the full study as JSON")
    args = ap.parse_args()

    cfg = RunConfig().with_(
        mesh={"nx": args.nx},
        physics={"mu": 0.02, "kappa": 0.02},
        scenario={"id": "buoyant-cell", "amplitude": 50.0},
        time={"dt": args.dt, "T_end": args.T, "output_every": 50},
    )
    study = dt_study(cfg, args.halvings)
    if args.json:
        print(json.dumps({k: v for k, v in study.items() if k != "ledgers"}, indent=2))
        return
    for d in study["diagnostics"]:
        print(f"dt={d['dt']:.2e}  sup|d/dt avint Theta|={d['sup_mean_rate']:.6f}  sup||d/dt Theta||={d['sup_dtheta_norm']:.4f}")
    print("relative changes:", ", ".join(f"{r:.2e}" for r in study["relative_change"]), "stable:", study["stable"])


if __name__ == "__main__":
    main()
