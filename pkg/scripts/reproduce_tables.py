"""Print the worked-example tables: BVN measure grid and estimate/SE/CI tables.

    python3 scripts/reproduce_tables.py [--family power|theta|both]
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from fassoc import datasets
from fassoc.bvn import BvnSpec, discretize
from fassoc.divergence import parse_divergence
from fassoc.errors import AssociationError
from fassoc.inference import estimate
from fassoc.measures import parse_variant, v1

RHOS = (-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass
class TablesConfig:
    power: tuple = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.5)
    theta: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    grid_power: tuple = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    grid_theta: tuple = (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)
    families: tuple = ("power", "theta")
    examples: dict = field(
        default_factory=lambda: {
            "race-black": "v1",
            "race-white": "v1",
            "alcohol": "v1",
            "car": "v2",
            "vision-uk-women": "v3:harmonic",
            "vision-uk-men": "v3:harmonic",
            "vision-university": "v3:harmonic",
            "vision-elementary": "v3:harmonic",
        }
    )


def bvn_grid(cfg: TablesConfig) -> None:
    tables = {rho: discretize(BvnSpec.uniform(rho, 4)) for rho in RHOS}
    for family in cfg.families:
        params = cfg.grid_power if family == "power" else cfg.grid_theta
        print(f"\nV1 = V2 = V3 on 4x4 discretised BVN, {family}")
        print("param " + " ".join(f"{r:>6.1f}" for r in RHOS))
        for param in params:
            spec = parse_divergence(f"{family}:{param}")
            print(f"{param:<5} " + " ".join(f"{v1(spec, tables[r]).value:>6.3f}" for r in RHOS))


def estimate_tables(cfg: TablesConfig) -> None:
    for name, variant_text in cfg.examples.items():
        table = datasets.load(name)
        variant, agg = parse_variant(variant_text)
        for family in cfg.families:
            params = cfg.power if family == "power" else cfg.theta
            print(f"\n{name} (n={table.n}), {variant_text}, {family}")
            for param in params:
                try:
                    line = estimate(parse_divergence(f"{family}:{param}"), table, variant, agg).display()
                except AssociationError as exc:
                    line = f"error: {exc}"
                print(f"  {param:<4} {line}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", choices=("power", "theta", "both"), default="both")
    args = parser.parse_args()
    cfg = TablesConfig()
    if args.family != "both":
        cfg.families = (args.family,)
    bvn_grid(cfg)
    estimate_tables(cfg)


if __name__ == "__main__":
    main()
