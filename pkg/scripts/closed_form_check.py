"""Discretised divergence of the BVN against its latent closed form as the grid refines.

    python3 scripts/closed_form_check.py --quadrature
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from fassoc.bvn import BvnSpec, discretize, kl_closed_form, latent_divergence, power_closed_form
from fassoc.divergence import independence_divergence, make_kl, make_power


@dataclass
class RefinementConfig:
    rhos: tuple = (0.2, 0.5, 0.8)
    ks: tuple = (4, 8, 16, 32, 64)
    lam: float = 0.5


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quadrature", action="store_true", help="also integrate the latent divergence numerically")
    args = parser.parse_args()
    cfg = RefinementConfig()
    cases = [("kl", make_kl(), kl_closed_form), (f"power:{cfg.lam}", make_power(cfg.lam), lambda r: power_closed_form(r, cfg.lam))]
    for label, spec, closed in cases:
        print(f"\n{label}")
        print("rho   closed     " + "  ".join(f"k={k:<6}" for k in cfg.ks) + ("  quadrature" if args.quadrature else ""))
        for rho in cfg.rhos:
            target = closed(rho)
            gaps = [(target - independence_divergence(spec, discretize(BvnSpec.uniform(rho, k)))) / target for k in cfg.ks]
            line = f"{rho:<5} {target:.6f}  " + "  ".join(f"{g:8.3%}" for g in gaps)
            if args.quadrature:
                line += f"  {latent_divergence(spec, rho):.10f}"
            print(line)


if __name__ == "__main__":
    main()
